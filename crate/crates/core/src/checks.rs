//! The nine acceptance criteria as library functions, shared by the
//! `acceptance` test target and the `selftest` subcommand.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::clifford::{Multivector, Signature};
use crate::group::{check_dictionary, check_hn, check_projection, check_spin_embedding, GroupParams, SampledCheck, Variant};
use crate::ko::{KOClass, KOValue};
use crate::ledger::{catalog_structure, run_ledger, section_independence, t_ind, SpaceTag};
use crate::module::{direct_sum_all, graded_tensor, parity_shift, permute_basis, reduce_bb, reduce_pairs, retensor_vb, vn_module, GradedModule};
use crate::oracle::{compare_with_table, irreducibles};
use crate::quatreps::quaternion_reps;
use crate::rational::q;
use crate::witten::experiments::{fiber_report, localization_experiment, richardson};
use crate::witten::{circle_operator, deformed_operator, spectrum, CircleSpin, DeformedModel, EigenOptions, Profile, SectionProfile};
use crate::witten::models::default_circle_fiber;

/// Outcome of one criterion. `passed` includes the time limit.
#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub elapsed: f64,
    pub limit: Option<f64>,
    pub details: Value,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let limit = self.limit.map_or(String::new(), |l| format!(" (limit {l:.0} s)"));
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("criterion {} [{}] {verdict} in {:.2} s{limit}", self.id, self.name, self.elapsed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "passed": self.passed,
            "elapsed_s": self.elapsed,
            "limit_s": self.limit,
            "details": self.details,
        })
    }
}

pub const CRITERIA: [(u8, &str, Option<f64>); 9] = [
    (1, "clifford exactness", Some(30.0)),
    (2, "quaternionic representations", Some(10.0)),
    (3, "H = H'V reduction", None),
    (4, "KO table vs oracle", Some(60.0)),
    (5, "group layer", None),
    (6, "fiber model", Some(60.0)),
    (7, "circle mod-2 index", Some(5.0)),
    (8, "localization", Some(120.0)),
    (9, "reduction ledger", Some(5.0)),
];

/// Runs criterion `id` with the given seed for the sampled parts.
pub fn run(id: u8, seed: u64) -> Option<CriterionResult> {
    let (_, name, limit) = *CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let (ok, details) = match id {
        1 => clifford_exactness(seed),
        2 => representations(),
        3 => reduction_roundtrip(seed),
        4 => ko_table(),
        5 => group_layer(seed),
        6 => fiber_model(),
        7 => circle_index(),
        8 => localization(),
        _ => endgame(),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let passed = ok && limit.is_none_or(|l| elapsed <= l);
    Some(CriterionResult { id, name, passed, elapsed, limit, details })
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run(c.0, seed)).collect()
}

fn random_multivector(rng: &mut ChaCha8Rng, sig: Signature) -> Multivector {
    let terms = rng.gen_range(1..=4);
    let dim = sig.dim() as u32;
    Multivector::from_terms(
        sig,
        (0..terms).map(|_| (crate::clifford::Blade(rng.gen_range(0..dim)), q(rng.gen_range(-3..=3)))),
    )
}

pub fn clifford_exactness(seed: u64) -> (bool, Value) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut signatures = 0;
    for total in 0..=9 {
        for l in 0..=total {
            let sig = Signature::new(l, total - l);
            signatures += 1;
            if sig.dim() != 1 << total || sig.blades().count() != 1 << total {
                failures.push(format!("{sig}: dimension"));
            }
            let gens: Vec<Multivector> = (0..total).map(|k| Multivector::generator(sig, k)).collect();
            for (a, ga) in gens.iter().enumerate() {
                if (ga * ga).as_scalar() != Some(q(sig.square(a) as i64)) {
                    failures.push(format!("{sig}: square of generator {a}"));
                }
                for gb in &gens[a + 1..] {
                    if !(&(ga * gb) + &(gb * ga)).is_zero() {
                        failures.push(format!("{sig}: anticommutation at {a}"));
                    }
                }
            }
            for i in 0..1000 {
                let (x, y, z) = (random_multivector(&mut rng, sig), random_multivector(&mut rng, sig), random_multivector(&mut rng, sig));
                if &(&x * &y) * &z != &x * &(&y * &z) {
                    failures.push(format!("{sig}: associativity on triple {i}"));
                }
            }
        }
    }
    failures.truncate(20);
    (failures.is_empty(), json!({ "signatures": signatures, "triples_per_signature": 1000, "failures": failures }))
}

pub fn representations() -> (bool, Value) {
    let s = quaternion_reps();
    let ok = s.alpha_report.is_empty()
        && s.beta_report.is_empty()
        && s.f_report.is_empty()
        && s.f_rank == 512
        && s.alpha_gamma_is_diag_1_m1;
    (ok, s.to_json())
}

fn random_signed_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, i32)> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx.into_iter().map(|j| (j, if rng.gen_bool(0.5) { 1 } else { -1 })).collect()
}

/// A random graded Cl₍0,c₎ module: a sum of graded irreducibles, some
/// parity-shifted, in a scrambled basis, of dimension at most `max_dim`.
fn random_reduced_module(rng: &mut ChaCha8Rng, c: usize, max_dim: usize) -> Option<GradedModule> {
    let irr: Vec<GradedModule> = irreducibles(Signature::new(1, c)).ok()?.iter().map(|i| i.as_graded()).collect();
    let mut parts = Vec::new();
    let mut dim = 0;
    for _ in 0..rng.gen_range(1..=3) {
        let mut p = irr.choose(rng)?.clone();
        if rng.gen_bool(0.5) {
            p = parity_shift(&p);
        }
        if dim + p.dim() > max_dim {
            break;
        }
        dim += p.dim();
        parts.push(p);
    }
    let m = direct_sum_all(&parts)?;
    let perm = random_signed_permutation(rng, m.dim());
    Some(permute_basis(&m, &perm))
}

pub fn reduction_roundtrip(seed: u64) -> (bool, Value) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut cases = Vec::new();
    for trial in 0..48 {
        let b = trial % 4;
        let c = rng.gen_range(0..=3);
        let Some(h) = random_reduced_module(&mut rng, c, 64 >> b) else {
            continue;
        };
        let assembled = graded_tensor(&vn_module(b), &h);
        let perm = random_signed_permutation(&mut rng, assembled.dim());
        let m = permute_basis(&assembled, &perm);
        if !m.is_valid() {
            failures.push(format!("trial {trial}: assembled module invalid"));
            continue;
        }
        let halves = (0..=b).all(|r| reduce_pairs(&m, r).is_ok_and(|x| x.dim() == m.dim() >> r));
        let roundtrip = match reduce_bb(&m, b) {
            Ok(red) => {
                let back = retensor_vb(&red, b);
                red.is_valid() && red.same_character(&h) && back.is_valid() && back.blade_traces() == m.blade_traces()
                    && back.graded_traces() == m.graded_traces()
            }
            Err(_) => false,
        };
        if !(halves && roundtrip) {
            failures.push(format!("trial {trial}: b={b}, c={c}, dim={}", m.dim()));
        }
        cases.push(json!({ "b": b, "a": b + c, "dim": m.dim() }));
    }
    let ok = failures.is_empty() && cases.len() >= 40;
    (ok, json!({ "cases": cases.len(), "max_dim": cases.iter().filter_map(|c| c["dim"].as_u64()).max(), "failures": failures }))
}

pub fn ko_table() -> (bool, Value) {
    let mut ok = true;
    let mut rows = Vec::new();
    for k in 0..8 {
        match compare_with_table(k, 16) {
            Ok(c) => {
                ok &= c.passed();
                rows.push(c.to_json());
            }
            Err(e) => {
                ok = false;
                rows.push(json!({ "k": k, "error": e }));
            }
        }
    }
    // KO^{-1}(pt) ≅ Z/2 with the rank-1 free Cl₍0,1₎ module as generator
    let z2 = compare_with_table(1, 16).is_ok_and(|c| c.free_module_class == KOClass::mod2(1, 1));
    (ok && z2, json!({ "degrees": rows, "ko_minus_one_generator": z2 }))
}

pub fn group_layer(seed: u64) -> (bool, Value) {
    const SAMPLES: usize = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks: Vec<SampledCheck> = Vec::new();
    for (variant, p) in [
        (Variant::Plus, GroupParams::new(2, 1, 1)),
        (Variant::Plus, GroupParams::new(3, 0, 2)),
        (Variant::Minus, GroupParams::new(2, 0, 2)),
        (Variant::Minus, GroupParams::new(1, 1, 1)),
    ] {
        checks.push(check_projection(&mut rng, variant, p, SAMPLES));
    }
    for p in [GroupParams::new(2, 1, 1), GroupParams::new(3, 0, 2)] {
        checks.push(check_spin_embedding(&mut rng, p, SAMPLES));
    }
    checks.push(check_dictionary(&mut rng, GroupParams::new(1, 1, 2), SAMPLES));
    for s in -3..=4 {
        checks.push(check_hn(&mut rng, 2, s, SAMPLES));
    }
    let ok = checks.iter().all(SampledCheck::passed);
    (ok, json!(checks.iter().map(SampledCheck::to_json).collect::<Vec<_>>()))
}

pub fn fiber_model() -> (bool, Value) {
    let opts = EigenOptions::default();
    let mut ok = true;
    let mut out = json!({});
    match fiber_report(1, 1.0, 10.0, 2001, &opts) {
        Ok((op, r)) => {
            let gap_err = r.gap.map(|g| (g - SQRT_2).abs() / SQRT_2);
            let pass = r.kernel_dim == op.predicted_kernel
                && r.ground_overlap.is_some_and(|o| o >= 0.999)
                && gap_err.is_some_and(|e| e <= 0.01);
            ok &= pass;
            out["n1"] = json!({ "N": 2001, "kernel_dim": r.kernel_dim, "predicted": op.predicted_kernel,
                "overlap": r.ground_overlap, "gap": r.gap, "gap_rel_err": gap_err, "method": r.method, "passed": pass });
        }
        Err(e) => {
            ok = false;
            out["n1"] = json!({ "error": e.to_string() });
        }
    }
    match fiber_report(2, 1.0, 10.0, 201, &opts) {
        Ok((op, r)) => {
            let gap_err = r.gap.map(|g| (g - SQRT_2).abs() / SQRT_2);
            let pass = r.kernel_dim == op.predicted_kernel && gap_err.is_some_and(|e| e <= 0.05);
            ok &= pass;
            out["n2"] = json!({ "N": 201, "kernel_dim": r.kernel_dim, "predicted": op.predicted_kernel,
                "gap": r.gap, "gap_rel_err": gap_err, "method": r.method, "passed": pass });
        }
        Err(e) => {
            ok = false;
            out["n2"] = json!({ "error": e.to_string() });
        }
    }
    match richardson(1.0, 10.0, [101, 201, 401], 3, &opts) {
        Ok(rr) => {
            ok &= rr.second_order();
            out["richardson"] = json!({ "report": rr, "second_order": rr.second_order() });
        }
        Err(e) => {
            ok = false;
            out["richardson"] = json!({ "error": e.to_string() });
        }
    }
    (ok, out)
}

pub fn circle_index() -> (bool, Value) {
    let opts = EigenOptions::default();
    let fiber = default_circle_fiber();
    let mut rows = Vec::new();
    let mut classes = Vec::new();
    let mut ok = true;
    for (spin, expect_full) in [(CircleSpin::Lie, true), (CircleSpin::Bounding, false)] {
        let r = circle_operator(spin, 64, 2.0 * PI, &fiber).and_then(|op| spectrum(&op, 2 * op.fiber_dim + 2, &opts).map(|r| (op, r)));
        match r {
            Ok((op, r)) => {
                let expected = if expect_full { op.fiber_dim } else { 0 };
                ok &= r.kernel_dim == expected;
                let class = KOClass::mod2(1, r.mod2_index);
                classes.push(class.clone());
                rows.push(json!({ "spin": format!("{spin:?}"), "kernel_dim": r.kernel_dim, "fiber_dim": op.fiber_dim,
                    "threshold": r.threshold, "gap": r.gap, "class": class.to_json() }));
            }
            Err(e) => {
                ok = false;
                rows.push(json!({ "spin": format!("{spin:?}"), "error": e.to_string() }));
            }
        }
    }
    let differ = classes.len() == 2 && classes[0] != classes[1];
    (ok && differ, json!({ "rows": rows, "classes_differ": differ }))
}

pub fn localization() -> (bool, Value) {
    let opts = EigenOptions::default();
    let mut ok = true;
    let mut out = json!({});
    let section = SectionProfile::on_circle(Profile::Sin { omega: 1.0 }, 2.0 * PI);
    let model = DeformedModel::CircleBundle { points: 600 };
    match localization_experiment(&model, &section, &[5.0, 10.0, 20.0], 0.5, &opts) {
        Ok(t) => {
            let pass = t.counts_match() && t.inequalities_hold();
            ok &= pass;
            out["trivial_circle"] = json!({ "table": t, "counts_match": t.counts_match(), "inequalities_hold": t.inequalities_hold() });
        }
        Err(e) => {
            ok = false;
            out["trivial_circle"] = json!({ "error": e.to_string() });
        }
    }
    let mobius = SectionProfile::mobius(2.0 * PI);
    let r = deformed_operator(&DeformedModel::Mobius { points: 601 }, &mobius, 20.0, None)
        .and_then(|op| spectrum(&op, 3 * op.fiber_dim, &opts));
    match r {
        Ok(r) => {
            ok &= r.mod2_index == 1;
            out["mobius"] = json!({ "points": 601, "m": 20.0, "kernel_dim": r.kernel_dim, "mod2_index": r.mod2_index, "gap": r.gap });
        }
        Err(e) => {
            ok = false;
            out["mobius"] = json!({ "error": e.to_string() });
        }
    }
    (ok, out)
}

pub fn endgame() -> (bool, Value) {
    let result = (|| -> Result<(bool, Value), crate::ledger::LedgerError> {
        let s0 = catalog_structure("s0")?;
        let ledger = run_ledger(&s0, &["one-zero"])?;
        let via_lie = ledger.steps.last().is_some_and(|s| s.to.space == SpaceTag::S1Lie);
        let s0_nontrivial = via_lie && ledger.terminal.value == KOValue::Mod2(1) && ledger.degree_conserved();
        let x = catalog_structure("rp3crp3xs1")?;
        let t = t_ind(&x, "standard", "one-zero")?;
        let example = t.value == 1 && t.verdict() == "determinant bundle non-orientable";
        let rows = section_independence()?;
        let independent = !rows.is_empty() && rows.iter().all(|r| r.agree);
        let table: Vec<Value> =
            rows.iter().map(|r| json!({ "structure": r.structure, "menus": r.menus, "classes": r.classes, "agree": r.agree })).collect();
        Ok((
            s0_nontrivial && example && independent,
            json!({ "s0_ledger": ledger.to_json(), "t_ind": t.to_json(), "independence": table }),
        ))
    })();
    result.unwrap_or_else(|e| (false, json!({ "error": e.to_string() })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_table_is_complete() {
        let ids: Vec<u8> = CRITERIA.iter().map(|c| c.0).collect();
        assert_eq!(ids, (1..=9).collect::<Vec<_>>());
        assert!(run(10, 0).is_none());
    }

    #[test]
    fn ledger_criterion_passes() {
        let r = run(9, 0).unwrap();
        assert!(r.passed, "{}", r.details);
    }

    #[test]
    fn representation_criterion_passes() {
        assert!(representations().0);
    }

    #[test]
    fn result_line_mentions_verdict() {
        let r = CriterionResult { id: 3, name: "x", passed: false, elapsed: 0.5, limit: Some(5.0), details: json!({}) };
        assert!(r.line().contains("FAIL") && r.line().contains("limit 5"));
    }
}
