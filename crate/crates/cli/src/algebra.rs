//! `cliff`, `module`, `group` and `ko` subcommands.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use kolocal_core::checks;
use kolocal_core::group::{
    check_dictionary, check_hn, check_projection, check_spin_embedding, hn_source_params, hn_translate, project_p,
    random_element, spin_embedding, spin_embedding_relations,
};
use kolocal_core::ko::ko_analysis;
use kolocal_core::module::{reduce_pairs, regular_module, retensor_vb, v1_module, vn_module, trivial_module};
use kolocal_core::oracle::compare_with_table;
use kolocal_core::quatreps::{alpha_module, beta_module, f_module};
use kolocal_core::witten::models::default_fiber;
use kolocal_core::{GradedModule, GroupParams, Multivector, Signature, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{Failure, Outcome};

fn parse_pair(s: &str) -> Result<Signature, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [l, m] = parts.as_slice() else {
        return Err(format!("expected l,m (got {s:?})"));
    };
    let l: usize = l.parse().map_err(|_| format!("bad l in {s:?}"))?;
    let m: usize = m.parse().map_err(|_| format!("bad m in {s:?}"))?;
    Signature::try_new(l, m).map_err(|e| e.to_string())
}

fn parse_params(s: &str) -> Result<GroupParams, String> {
    let v: Result<Vec<usize>, _> = s.split(',').map(|x| x.trim().parse::<usize>()).collect();
    match v.map_err(|_| format!("expected n,s+,s- (got {s:?})"))?.as_slice() {
        &[n, p, m] if n + p + m > 0 => Ok(GroupParams::new(n, p, m)),
        _ => Err(format!("expected three counts n,s+,s- with a positive sum (got {s:?})")),
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    Plus,
    Minus,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Plus => Variant::Plus,
            VariantArg::Minus => Variant::Minus,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum CliffCmd {
    /// Product of two multivectors in text form, e.g. `2 * eps{1} e{1} + 1`.
    Mul {
        #[arg(long, value_parser = parse_pair)]
        sig: Signature,
        a: String,
        b: String,
    },
    /// Text form to JSON form.
    Parse {
        #[arg(long, value_parser = parse_pair)]
        sig: Signature,
        x: String,
    },
    /// Generator relations, dimensions and sampled associativity for l+m ≤ 9.
    Check,
}

pub fn cliff(cmd: &CliffCmd, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let parse = |sig, s: &str| Multivector::parse_text(sig, s).map_err(|e| Failure::usage(e.to_string()));
    match cmd {
        CliffCmd::Mul { sig, a, b } => {
            let (x, y) = (parse(*sig, a)?, parse(*sig, b)?);
            let p = &x * &y;
            let text = p.to_text();
            Ok(Outcome::new("cliff-mul", json!({ "sig": [sig.l, sig.m], "a": x.to_text(), "b": y.to_text(), "product": text, "product_json": p.to_json() }))
                .with_text(text))
        }
        CliffCmd::Parse { sig, x } => {
            let v = parse(*sig, x)?;
            Ok(Outcome::new("cliff-parse", v.to_json()).with_text(v.to_text()))
        }
        CliffCmd::Check => {
            let (ok, details) = checks::clifford_exactness(cfg.seed);
            let mut out = Outcome::new("cliff-check", json!({ "passed": ok, "details": details }));
            out.failed = !ok;
            Ok(out)
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModuleName {
    /// Cl₍l,m₎ acting on itself; needs --sig.
    Regular,
    /// The Cl₍1,1₎ module V₁.
    V1,
    /// V₁^{⊗n}; needs --n.
    Vn,
    /// The one-dimensional Cl₍0,0₎ module.
    Trivial,
    /// The 16-dimensional representation α.
    Alpha,
    /// The 32-dimensional representation β.
    Beta,
    /// The 512-dimensional representation f.
    F,
    /// The fiber V_n ⊗̂ V_n of the harmonic model; needs --n.
    Fiber,
}

#[derive(Args, Debug, Clone)]
pub struct ModuleSel {
    /// Named module.
    #[arg(long, value_enum, conflicts_with = "file")]
    module: Option<ModuleName>,
    /// Module in JSON form.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, value_parser = parse_pair)]
    sig: Option<Signature>,
    #[arg(long)]
    n: Option<usize>,
}

impl ModuleSel {
    fn load(&self) -> Result<(String, GradedModule), Failure> {
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let m = GradedModule::from_json(&v).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            return Ok((path.display().to_string(), m));
        }
        let name = self.module.ok_or_else(|| Failure::usage("give --module or --file"))?;
        let need_n = || self.n.ok_or_else(|| Failure::usage("this module needs --n"));
        let m = match name {
            ModuleName::Regular => regular_module(self.sig.ok_or_else(|| Failure::usage("regular module needs --sig l,m"))?),
            ModuleName::V1 => v1_module(),
            ModuleName::Vn => vn_module(need_n()?),
            ModuleName::Trivial => trivial_module(),
            ModuleName::Alpha => alpha_module(),
            ModuleName::Beta => beta_module(),
            ModuleName::F => f_module(),
            ModuleName::Fiber => default_fiber(need_n()?),
        };
        Ok((format!("{name:?}").to_lowercase(), m))
    }
}

#[derive(Subcommand, Debug)]
pub enum ModuleCmd {
    /// Module in JSON form.
    Show(ModuleSel),
    /// Relation violations, dimension and parity split.
    Verify(ModuleSel),
    /// Restriction to the joint +1-eigenspace of ε_i e_i, i ≤ b.
    Reduce {
        #[command(flatten)]
        sel: ModuleSel,
        #[arg(long)]
        b: usize,
    },
    /// Reduce by b and tensor back with V_b; compares blade traces.
    Roundtrip {
        #[command(flatten)]
        sel: ModuleSel,
        #[arg(long)]
        b: usize,
    },
}

fn parity_dims(m: &GradedModule) -> (usize, usize) {
    let tr = m.grading().trace();
    let dim = m.dim() as i64;
    let t: i64 = tr.to_integer().try_into().unwrap_or(0);
    (((dim + t) / 2) as usize, ((dim - t) / 2) as usize)
}

pub fn module(cmd: &ModuleCmd, _cfg: &RunConfig) -> Result<Outcome, Failure> {
    let module_error = |e: kolocal_core::module::ModuleError| Failure::usage(e.to_string());
    match cmd {
        ModuleCmd::Show(sel) => {
            let (_, m) = sel.load()?;
            Ok(Outcome::new("module-show", m.to_json()))
        }
        ModuleCmd::Verify(sel) => {
            let (name, m) = sel.load()?;
            let report = m.verify();
            let (even, odd) = parity_dims(&m);
            let sig = m.signature();
            let mut out = Outcome::new(
                "module-verify",
                json!({ "module": name, "sig": [sig.l, sig.m], "dim": m.dim(), "even": even, "odd": odd, "violations": report, "valid": report.is_empty() }),
            );
            out.failed = !report.is_empty();
            Ok(out)
        }
        ModuleCmd::Reduce { sel, b } => {
            let (name, m) = sel.load()?;
            let r = reduce_pairs(&m, *b).map_err(module_error)?;
            let sig = r.signature();
            Ok(Outcome::new(
                "module-reduce",
                json!({ "module": name, "b": b, "dim": m.dim(), "reduced_dim": r.dim(), "reduced_sig": [sig.l, sig.m], "reduced": r.to_json() }),
            ))
        }
        ModuleCmd::Roundtrip { sel, b } => {
            let (name, m) = sel.load()?;
            let r = kolocal_core::module::reduce_bb(&m, *b).map_err(module_error)?;
            let back = retensor_vb(&r, *b);
            let same = back.blade_traces() == m.blade_traces() && back.graded_traces() == m.graded_traces();
            let mut out = Outcome::new(
                "module-roundtrip",
                json!({ "module": name, "b": b, "dim": m.dim(), "reduced_dim": r.dim(), "retensored_dim": back.dim(), "traces_agree": same }),
            );
            out.failed = !same;
            Ok(out)
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum GroupCmd {
    /// p: G^± → S(O(n)×O(s⁺)×O(s⁻)) on sampled elements.
    Project {
        #[arg(long, value_enum, default_value = "plus")]
        variant: VariantArg,
        #[arg(long, value_parser = parse_params, default_value = "2,1,1")]
        params: GroupParams,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Spin embedding of G⁺ into Spin on sampled elements.
    Embed {
        #[arg(long, value_parser = parse_params, default_value = "2,1,1")]
        params: GroupParams,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Translation of G⁺(n,0,|s|) or G⁺(n,s,0) into H_n(s) classes.
    Hn {
        #[arg(long, allow_hyphen_values = true)]
        s: i32,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Generator dictionary G⁺(n,s⁺,s⁻) → G⁻(n,s⁻,s⁺).
    Dictionary {
        #[arg(long, value_parser = parse_params, default_value = "1,1,2")]
        params: GroupParams,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
}

pub fn group(cmd: &GroupCmd, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let group_error = |e: kolocal_core::group::GroupError| Failure::usage(e.to_string());
    let (stem, check, certificate) = match cmd {
        GroupCmd::Project { variant, params, samples } => {
            let v = Variant::from(*variant);
            let check = check_projection(&mut rng, v, *params, *samples);
            let g = random_element(&mut rng, v, *params, 2, false);
            let t = project_p(&g).map_err(group_error)?;
            ("group-project", check, json!({ "element": g.to_json(), "p": t.to_json(), "orthogonal": t.is_orthogonal() }))
        }
        GroupCmd::Embed { params, samples } => {
            let check = check_spin_embedding(&mut rng, *params, *samples);
            let g = random_element(&mut rng, Variant::Plus, *params, 2, false);
            let img = spin_embedding(&g).map_err(group_error)?;
            let relations = spin_embedding_relations(*params);
            ("group-embed", check, json!({ "element": g.to_json(), "image": img.to_json(), "relation_violations": relations }))
        }
        GroupCmd::Hn { s, n, samples } => {
            let params = hn_source_params(*n, *s).map_err(group_error)?;
            let check = check_hn(&mut rng, *n, *s, *samples);
            let g = random_element(&mut rng, Variant::Plus, params, 1, *s == 4);
            let class = hn_translate(*s, &g).map_err(group_error)?;
            ("group-hn", check, json!({ "element": g.to_json(), "class": class.to_json() }))
        }
        GroupCmd::Dictionary { params, samples } => {
            let check = check_dictionary(&mut rng, *params, *samples);
            let g = random_element(&mut rng, Variant::Plus, *params, 1, false);
            let d = kolocal_core::group::dictionary_element(&g);
            ("group-dictionary", check, json!({ "element": g.to_json(), "image": d.to_json() }))
        }
    };
    let mut out = Outcome::new(stem, json!({ "check": check.to_json(), "certificate": certificate }));
    out.failed = !check.passed();
    Ok(out)
}

#[derive(Subcommand, Debug)]
pub enum KoCmd {
    /// KO class of a graded module.
    Class {
        #[command(flatten)]
        sel: ModuleSel,
        /// Include the reduction steps.
        #[arg(long)]
        explain: bool,
    },
    /// The eight degrees against the brute-force quotient oracle.
    Table {
        #[arg(long, default_value_t = 16)]
        max_dim: usize,
    },
}

pub fn ko(cmd: &KoCmd, _cfg: &RunConfig) -> Result<Outcome, Failure> {
    match cmd {
        KoCmd::Class { sel, explain } => {
            let (_, m) = sel.load()?;
            let a = ko_analysis(&m).map_err(|e| Failure::usage(e.to_string()))?;
            let text = a.class.to_string();
            let result = if *explain { a.to_json() } else { a.class.to_json() };
            Ok(Outcome::new("ko-class", result).with_text(text))
        }
        KoCmd::Table { max_dim } => {
            let mut rows = Vec::new();
            let mut ok = true;
            for k in 0..8 {
                let c = compare_with_table(k, *max_dim).map_err(Failure::usage)?;
                ok &= c.passed();
                rows.push(c.to_json());
            }
            let mut out = Outcome::new("ko-table", json!({ "max_dim": max_dim, "degrees": rows, "all_match": ok }));
            out.failed = !ok;
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_and_params_parse() {
        assert_eq!(parse_pair("0,1").unwrap(), Signature::new(0, 1));
        assert!(parse_pair("1").is_err());
        assert_eq!(parse_params("2,1,1").unwrap(), GroupParams::new(2, 1, 1));
        assert!(parse_params("0,0,0").is_err());
    }
}
