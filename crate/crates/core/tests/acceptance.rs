//! Acceptance suite: one PASS/FAIL line per criterion with its timing.
//!
//! Criterion ids given as arguments restrict the run, e.g.
//! `cargo test --release -p kolocal-core --test acceptance -- 6 8`.
//! Setting `KOLOCAL_ACCEPTANCE_JSON` to a path also writes the full details.

use std::process::ExitCode;

use kolocal_core::checks::{run, CRITERIA};

const SEED: u64 = 20240611;

fn main() -> ExitCode {
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let selected: Vec<u8> = CRITERIA.iter().map(|c| c.0).filter(|id| ids.is_empty() || ids.contains(id)).collect();
    println!("running {} acceptance criteria (seed {SEED})", selected.len());
    let mut results = Vec::new();
    for id in selected {
        let r = run(id, SEED).expect("known criterion");
        println!("{}", r.line());
        if !r.passed {
            println!("  details: {}", r.details);
        }
        results.push(r);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if let Ok(path) = std::env::var("KOLOCAL_ACCEPTANCE_JSON") {
        let doc = serde_json::Value::Array(results.iter().map(|r| r.to_json()).collect());
        if let Err(e) = std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap_or_default()) {
            eprintln!("could not write {path}: {e}");
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
