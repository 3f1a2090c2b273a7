//! `ledger` subcommands.

use clap::Subcommand;
use kolocal_core::ledger::{catalog_structure, run_ledger, section_independence, section_menu, t_ind, LedgerError, CATALOG};
use serde_json::json;

use crate::config::RunConfig;
use crate::{Failure, Outcome};

#[derive(Subcommand, Debug)]
pub enum LedgerCmd {
    /// Reduce a catalog structure along sections until s⁻ = 0.
    Run {
        /// Catalog key, e.g. s0, s0xrp2, torus, rp3crp3xs1.
        #[arg(long)]
        space: String,
        /// Menu entries applied in order.
        #[arg(long, value_delimiter = ',', required = true)]
        sections: Vec<String>,
    },
    /// t-ind of a gauge transformation u with section h on the locus.
    TInd {
        #[arg(long)]
        x: String,
        #[arg(long)]
        u: String,
        #[arg(long)]
        h: String,
    },
    /// Catalog structures with their section menus.
    Catalog,
    /// Terminal classes across menu entries for every catalog structure.
    Independence,
}

fn ledger_failure(e: LedgerError) -> Failure {
    match e {
        LedgerError::SpectralMismatch(_) => Failure::numerical(e.to_string()),
        other => Failure::usage(other.to_string()),
    }
}

pub fn run(cmd: &LedgerCmd, _cfg: &RunConfig) -> Result<Outcome, Failure> {
    match cmd {
        LedgerCmd::Run { space, sections } => {
            let d = catalog_structure(space).map_err(ledger_failure)?;
            let names: Vec<&str> = sections.iter().map(String::as_str).collect();
            let l = run_ledger(&d, &names).map_err(ledger_failure)?;
            Ok(Outcome::new("ledger-run", l.to_json()).with_text(l.trace_table()))
        }
        LedgerCmd::TInd { x, u, h } => {
            let d = catalog_structure(x).map_err(ledger_failure)?;
            let t = t_ind(&d, u, h).map_err(ledger_failure)?;
            let mut text = format!("t-ind = {}\n{}", t.summary(), t.verdict());
            if let Some(l) = &t.ledger {
                text = format!("{}\n{text}", l.trace_table());
            }
            Ok(Outcome::new("ledger-t-ind", t.to_json()).with_text(text))
        }
        LedgerCmd::Catalog => {
            let mut entries = Vec::new();
            let mut text = String::new();
            for key in CATALOG {
                let d = catalog_structure(key).map_err(ledger_failure)?;
                let menu: Vec<_> = section_menu(&d).iter().map(|s| s.to_json()).collect();
                text.push_str(&format!(
                    "{key:<12} {} on {} degree {}  menu: {}\n",
                    d.params,
                    d.space,
                    d.degree(),
                    section_menu(&d).iter().map(|s| s.menu.as_str()).collect::<Vec<_>>().join(", ")
                ));
                entries.push(json!({ "key": key, "structure": d.to_json(), "menu": menu }));
            }
            Ok(Outcome::new("ledger-catalog", json!(entries)).with_text(text.trim_end().to_string()))
        }
        LedgerCmd::Independence => {
            let rows = section_independence().map_err(ledger_failure)?;
            let agree = rows.iter().all(|r| r.agree);
            let text = rows
                .iter()
                .map(|r| format!("{:<8} {:<40} {:<24} {}", r.structure, r.menus.join(","), r.classes.join(","), if r.agree { "agree" } else { "DISAGREE" }))
                .collect::<Vec<_>>()
                .join("\n");
            let doc = json!({
                "rows": rows.iter().map(|r| json!({ "structure": r.structure, "menus": r.menus, "classes": r.classes, "agree": r.agree })).collect::<Vec<_>>(),
                "all_agree": agree,
            });
            let mut out = Outcome::new("ledger-independence", doc).with_text(text);
            out.failed = !agree;
            Ok(out)
        }
    }
}
