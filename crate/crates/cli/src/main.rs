//! `kolocal`: command-line front end for kolocal-core.

mod algebra;
mod config;
mod ledger;
mod output;
mod witten;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::{Format, GlobalFlags, RunConfig, OUT_DIR_ENV};

/// A failed command with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, message: msg.into() }
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Failure { code: 3, message: msg.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { code: 1, message: format!("{}: {e}", path.display()) }
    }
}

impl From<kolocal_core::witten::SpectralError> for Failure {
    fn from(e: kolocal_core::witten::SpectralError) -> Self {
        match e {
            kolocal_core::witten::SpectralError::NotConverged { .. } => Failure::numerical(e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

/// A CSV table written next to the JSON artifact.
pub struct Table {
    pub file: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Result of one command before serialization.
pub struct Outcome {
    /// Artifact file stem, e.g. `witten-fiber`.
    pub stem: String,
    pub result: Value,
    pub text: Option<String>,
    pub tables: Vec<Table>,
    /// Exit status 1 after writing the artifacts, for failed self-tests.
    pub failed: bool,
}

impl Outcome {
    pub fn new(stem: impl Into<String>, result: Value) -> Self {
        Outcome { stem: stem.into(), result, text: None, tables: Vec::new(), failed: false }
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }
}

#[derive(Parser, Debug)]
#[command(name = "kolocal", version, about = "Graded Clifford modules, KO of a point, lattice Witten deformations and reduction ledgers")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Seed for sampled checks and eigensolver start blocks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Stdout format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Artifact directory (the KOLOCAL_OUT_DIR variable takes precedence).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Eigensolver residual tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Largest scalar block solved densely.
    #[arg(long, global = true)]
    dense_limit: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact Clifford algebra products and relation checks.
    #[command(subcommand)]
    Cliff(algebra::CliffCmd),
    /// Graded modules: construction, verification, reduction.
    #[command(subcommand)]
    Module(algebra::ModuleCmd),
    /// Groups G^±(n,s⁺,s⁻): projection, spin embedding, H_n(s) translation.
    #[command(subcommand)]
    Group(algebra::GroupCmd),
    /// KO classes of graded modules and the oracle table.
    #[command(subcommand)]
    Ko(algebra::KoCmd),
    /// Lattice spectra of deformed Dirac-type operators.
    #[command(subcommand)]
    Witten(witten::WittenCmd),
    /// Characteristic-submanifold reduction ledgers.
    #[command(subcommand)]
    Ledger(ledger::LedgerCmd),
    /// Runs the acceptance criteria and prints a pass/fail table.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Comma-separated criterion ids (default: all).
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
}

fn selftest(args: &SelftestArgs, cfg: &RunConfig) -> Result<Outcome, Failure> {
    use kolocal_core::checks::{run, CRITERIA};
    let ids: Vec<u8> = CRITERIA.iter().map(|c| c.0).filter(|id| args.only.is_empty() || args.only.contains(id)).collect();
    if ids.is_empty() {
        return Err(Failure::usage(format!("no criteria match {:?}", args.only)));
    }
    let mut text = String::from("id  result  time_s   limit_s  name\n");
    let mut rows = Vec::new();
    let mut failed = false;
    for id in ids {
        let r = run(id, cfg.seed).expect("known criterion");
        eprintln!("{}", r.line());
        failed |= !r.passed;
        text.push_str(&format!(
            "{:<3} {:<7} {:>7.2}  {:>7}  {}\n",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.elapsed,
            r.limit.map_or("-".into(), |l| format!("{l:.0}")),
            r.name
        ));
        rows.push(json!({ "id": r.id, "name": r.name, "passed": r.passed, "limit_s": r.limit, "details": r.details }));
    }
    let passed = rows.iter().filter(|r| r["passed"] == true).count();
    text.push_str(&format!("{passed}/{} criteria passed", rows.len()));
    let mut out = Outcome::new("selftest", json!({ "criteria": rows, "all_passed": !failed })).with_text(text);
    out.failed = failed;
    Ok(out)
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Cliff(c) => algebra::cliff(c, cfg),
        Command::Module(c) => algebra::module(c, cfg),
        Command::Group(c) => algebra::group(c, cfg),
        Command::Ko(c) => algebra::ko(c, cfg),
        Command::Witten(c) => witten::run(c, cfg),
        Command::Ledger(c) => ledger::run(c, cfg),
        Command::Selftest(a) => selftest(a, cfg),
    }
}

/// Writes the JSON artifact and CSV tables, then prints the result.
fn emit(out: &Outcome, cfg: &RunConfig, argv: &[String]) -> Result<(), Failure> {
    let doc = json!({
        "command": argv.join(" "),
        "seed": cfg.seed,
        "config": cfg.to_json(),
        "result": out.result,
    });
    output::write_artifact(&cfg.out_dir, &format!("{}.json", out.stem), &output::to_pretty(&doc))?;
    for t in &out.tables {
        output::write_artifact(&cfg.out_dir, &t.file, &output::to_csv(&t.header, &t.rows, cfg.seed))?;
    }
    match cfg.format {
        Format::Json => println!("{}", output::to_line(&out.result)),
        Format::Text => match &out.text {
            Some(t) => println!("{t}"),
            None => print!("{}", output::to_pretty(&out.result)),
        },
        Format::Csv => match out.tables.first() {
            Some(t) => print!("{}", output::to_csv(&t.header, &t.rows, cfg.seed)),
            None => return Err(Failure::usage(format!("{} has no CSV form; use --format json or text", out.stem))),
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let flags = GlobalFlags {
        seed: cli.global.seed,
        format: cli.global.format,
        out_dir: cli.global.out_dir.clone(),
        config: cli.global.config.clone(),
        tol: cli.global.tol,
        dense_limit: cli.global.dense_limit,
    };
    let env_out = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let result = RunConfig::resolve(&flags, env_out).and_then(|cfg| {
        let out = dispatch(&cli, &cfg)?;
        emit(&out, &cfg, &argv)?;
        Ok(out.failed)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
