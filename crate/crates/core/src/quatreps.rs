//! The quaternionic models α: Cl₋₄ → ℍ(2), β: Cl₊₅ → ℍ(2)⊕ℍ(2) and
//! f: Cl₍5,4₎ → (ℍ(2)⊕ℍ(2))⊗ℍ(2), realised as left-regular graded modules,
//! together with the spinor space S̃ ⊂ Cl₍5,4₎ and the map Φ onto S'⊕S'.
//!
//! Generator naming: ε₀..ε₄ of Cl₊₅ are generator indices 0..4 of
//! Signature(5,4); e₁..e₄ are indices 5..8.

use serde_json::{json, Value};

use crate::clifford::{Blade, Signature};
use crate::module::{anticommute, commute, joint_plus_eigenspace, regular_module, regular_right_actions, GradedModule, ModuleError};
use crate::qmat::{QMat, SparseVec, SpanBasis, Subspace};
use crate::quaternion::{Quat, QuatMat};
use crate::rational::q;

/// α(e₁), …, α(e₄).
pub fn alpha_gens() -> [QuatMat; 4] {
    [
        QuatMat::antidiag(Quat::one(), Quat::real(q(-1))),
        QuatMat::antidiag(Quat::i(), Quat::i()),
        QuatMat::antidiag(Quat::j(), Quat::j()),
        QuatMat::antidiag(Quat::k(), Quat::k()),
    ]
}

/// α(Γ) for Γ = e₁e₂e₃e₄, computed as the ordered product.
pub fn alpha_gamma() -> QuatMat {
    let g = alpha_gens();
    g[0].mul(&g[1]).mul(&g[2]).mul(&g[3])
}

/// β(ε₀), …, β(ε₄) as pairs in ℍ(2)⊕ℍ(2).
pub fn beta_gens() -> [(QuatMat, QuatMat); 5] {
    let gamma = alpha_gamma();
    let a = alpha_gens();
    std::array::from_fn(|p| {
        let x = if p == 0 { gamma.clone() } else { gamma.mul(&a[p - 1]) };
        let nx = x.neg();
        (x, nx)
    })
}

/// Pure tensor (A₀, A₁) ⊗ B in (ℍ(2)⊕ℍ(2))⊗ℍ(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairTensor {
    pub a0: QuatMat,
    pub a1: QuatMat,
    pub b: QuatMat,
}

impl PairTensor {
    pub fn one() -> Self {
        PairTensor { a0: QuatMat::identity(), a1: QuatMat::identity(), b: QuatMat::identity() }
    }

    pub fn mul(&self, o: &PairTensor) -> PairTensor {
        PairTensor { a0: self.a0.mul(&o.a0), a1: self.a1.mul(&o.a1), b: self.b.mul(&o.b) }
    }

    /// Real coordinates, index (16·c + a)·16 + b.
    pub fn coords(&self) -> SparseVec {
        let b = self.b.sparse_coords();
        let mut out = SparseVec::new();
        for (c, a) in [&self.a0, &self.a1].into_iter().enumerate() {
            for (ia, x) in a.sparse_coords() {
                for (ib, y) in &b {
                    out.insert((16 * c + ia) * 16 + ib, &x * y);
                }
            }
        }
        out
    }

    /// Left multiplication by this element on the 512 coordinates.
    pub fn left_matrix(&self) -> QMat {
        self.a0.left_matrix().direct_sum(&self.a1.left_matrix()).kron(&self.b.left_matrix())
    }

    pub fn right_matrix(&self) -> QMat {
        self.a0.right_matrix().direct_sum(&self.a1.right_matrix()).kron(&self.b.right_matrix())
    }
}

/// f(ε₀), …, f(ε₄), f(e₁), …, f(e₄).
pub fn f_gens() -> Vec<PairTensor> {
    let gamma = alpha_gamma();
    let mut out: Vec<PairTensor> =
        beta_gens().into_iter().map(|(x0, x1)| PairTensor { a0: x0, a1: x1, b: gamma.clone() }).collect();
    for a in alpha_gens() {
        out.push(PairTensor { a0: QuatMat::identity(), a1: QuatMat::identity(), b: a });
    }
    out
}

/// f of a basis blade of Cl₍5,4₎, as a pure tensor.
pub fn f_blade(b: Blade) -> PairTensor {
    let gens = f_gens();
    (0..9).filter(|k| b.0 & (1 << k) != 0).fold(PairTensor::one(), |acc, k| acc.mul(&gens[k]))
}

/// Exact rank of the 512 blade images f(e_T).
pub fn f_blade_image_rank() -> usize {
    let mut span = SpanBasis::new();
    for b in Signature::new(5, 4).blades() {
        span.insert(f_blade(b).coords());
    }
    span.dim()
}

fn ad_gamma_matrix() -> QMat {
    let g = alpha_gamma();
    QuatMat::linear_map_matrix(|a| g.mul(a).mul(&g))
}

fn swap_matrix(block: usize) -> QMat {
    let mut m = QMat::zeros(2 * block, 2 * block);
    for i in 0..block {
        m.set(i, block + i, q(1));
        m.set(block + i, i, q(1));
    }
    m
}

/// Cl₋₄ acting on ℍ(2) by left multiplication through α, graded by Ad(α(Γ)).
pub fn alpha_module() -> GradedModule {
    let gens = alpha_gens().iter().map(QuatMat::left_matrix).collect();
    GradedModule::new(Signature::new(0, 4), gens, ad_gamma_matrix(), None).expect("alpha shapes")
}

/// Cl₊₅ acting on ℍ(2)⊕ℍ(2) by left multiplication through β, graded by the swap.
pub fn beta_module() -> GradedModule {
    let gens = beta_gens().iter().map(|(x0, x1)| x0.left_matrix().direct_sum(&x1.left_matrix())).collect();
    GradedModule::new(Signature::new(5, 0), gens, swap_matrix(16), None).expect("beta shapes")
}

/// Cl₍5,4₎ acting on (ℍ(2)⊕ℍ(2))⊗ℍ(2) by left multiplication through f,
/// graded by swap ⊗ Ad(α(Γ)).
pub fn f_module() -> GradedModule {
    let gens = f_gens().iter().map(PairTensor::left_matrix).collect();
    GradedModule::new(Signature::new(5, 4), gens, swap_matrix(16).kron(&ad_gamma_matrix()), None).expect("f shapes")
}

/// Right multiplication by the generator images on the f model.
pub fn f_right_actions() -> Vec<QMat> {
    f_gens().iter().map(PairTensor::right_matrix).collect()
}

/// The spinor space S̃: joint +1-eigenspace of right multiplication by
/// ε_i e_i (i = 1..4) in a Cl₍5,4₎ module with commuting right action.
#[derive(Clone, Debug)]
pub struct TildeS {
    pub subspace: Subspace,
    /// Left Cl₍5,4₎ actions and grading restricted to S̃.
    pub module: GradedModule,
    /// Right action of ε₀ restricted to S̃.
    pub right_eps0: QMat,
    /// The Cl₋₁ generator e₀φ = (εφ)·ε₀.
    pub e0: QMat,
}

impl TildeS {
    /// S̃ as a graded module over Cl₋₁ = Cl₍0,1₎.
    pub fn cl_minus_one(&self) -> GradedModule {
        GradedModule::new(Signature::new(0, 1), vec![self.e0.clone()], self.module.grading().clone(), None)
            .expect("cl_-1 shapes")
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    /// Relation report: Cl₋₁ module relations, and left actions anticommuting
    /// with e₀ while commuting with right ε₀.
    pub fn verify(&self) -> Vec<String> {
        let mut report: Vec<String> = self.cl_minus_one().verify();
        for (k, g) in self.module.gens().iter().enumerate() {
            if !anticommute(g, &self.e0) {
                report.push(format!("left generator {k} does not anticommute with e0"));
            }
            if !commute(g, &self.right_eps0) {
                report.push(format!("left generator {k} does not commute with right eps0"));
            }
        }
        report.extend(self.module.verify());
        report
    }
}

pub fn tilde_s(m: &GradedModule, right: &[QMat]) -> Result<TildeS, ModuleError> {
    let sig = Signature::new(5, 4);
    if m.signature() != sig || right.len() != 9 {
        return Err(ModuleError::GeneratorCount { expected: 9, got: right.len() });
    }
    // x·(ε_i e_i) = R_{e_i} R_{ε_i} x
    let invs: Vec<QMat> = (1..5).map(|i| right[4 + i].mul(&right[i])).collect();
    let sub = joint_plus_eigenspace(m.dim(), &invs);
    let expected = m.dim() / 16;
    if sub.dim() != expected {
        return Err(ModuleError::EigenspaceDim { expected, got: sub.dim() });
    }
    let module = m.restrict(&sub)?;
    let right_eps0 = sub.restrict(&right[0]).ok_or_else(|| ModuleError::NotInvariant("right eps0".into()))?;
    let e0 = right_eps0.mul(module.grading());
    Ok(TildeS { subspace: sub, module, right_eps0, e0 })
}

/// S̃ inside the regular module of Cl₍5,4₎ (dimension 512 → 32).
pub fn tilde_s_regular() -> TildeS {
    let sig = Signature::new(5, 4);
    tilde_s(&regular_module(sig), &regular_right_actions(sig)).expect("regular S~")
}

/// S̃ inside the f model.
pub fn tilde_s_f_model() -> TildeS {
    tilde_s(&f_module(), &f_right_actions()).expect("f-model S~")
}

/// Φ((A₀,A₁)⊗B) = (A₀B*, A₁·Ad(α(Γ))(B*)) as a 32×512 real matrix.
pub fn phi_matrix() -> QMat {
    let gamma = alpha_gamma();
    let mut cols = Vec::with_capacity(512);
    for c in 0..2 {
        for ia in 0..16 {
            let a = QuatMat::basis(ia);
            for ib in 0..16 {
                let bs = QuatMat::basis(ib).star();
                let mut col = SparseVec::new();
                let img = if c == 0 { a.mul(&bs) } else { a.mul(&gamma.mul(&bs).mul(&gamma)) };
                for (k, v) in img.sparse_coords() {
                    col.insert(16 * c + k, v);
                }
                cols.push(col);
            }
        }
    }
    QMat::from_columns(32, &cols)
}

/// Operators of the S'⊕S' model on ℍ(2)⊕ℍ(2), columns of each matrix
/// identified with S'₀, S'₁.
#[derive(Clone, Debug)]
pub struct SPrimeModel {
    pub grading: QMat,
    pub right_eps0: QMat,
    pub e0: QMat,
    /// Left ε_j, j = 0..4: (A, B) ↦ (X_j A Γ, −X_j B Γ), X_j = β(ε_j)₀.
    pub left_eps: Vec<QMat>,
}

pub fn sprime_model() -> SPrimeModel {
    let gamma = alpha_gamma();
    let grading = swap_matrix(16);
    let right_eps0 = QMat::identity(16).direct_sum(&QMat::scalar(16, &q(-1)));
    let e0 = right_eps0.mul(&grading);
    let left_eps = beta_gens()
        .iter()
        .map(|(x, _)| {
            let m = QuatMat::linear_map_matrix(|a| x.mul(a).mul(&gamma));
            m.direct_sum(&m.neg())
        })
        .collect();
    SPrimeModel { grading, right_eps0, e0, left_eps }
}

/// Outcome of checking S̃ ≅ S'⊕S' through Φ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCheck {
    pub tilde_dim: usize,
    pub phi_rank_on_tilde: usize,
    pub phi_right_invariant: bool,
    pub grading: bool,
    pub e0: bool,
    pub right_eps0: bool,
    pub left_eps: bool,
    pub even_part_dim: usize,
}

impl ReductionCheck {
    pub fn passed(&self) -> bool {
        self.tilde_dim == 32
            && self.phi_rank_on_tilde == 32
            && self.phi_right_invariant
            && self.grading
            && self.e0
            && self.right_eps0
            && self.left_eps
            && self.even_part_dim == 16
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tilde_dim": self.tilde_dim,
            "phi_rank_on_tilde": self.phi_rank_on_tilde,
            "phi_right_invariant": self.phi_right_invariant,
            "intertwines_grading": self.grading,
            "intertwines_e0": self.e0,
            "intertwines_right_eps0": self.right_eps0,
            "intertwines_left_eps": self.left_eps,
            "even_part_dim": self.even_part_dim,
            "passed": self.passed(),
        })
    }
}

/// Verifies that Φ restricted to S̃ is a graded isomorphism onto S'⊕S'
/// intertwining the Cl₋₁ action, right ε₀ and left ε_j.
pub fn check_reduction_isomorphism() -> ReductionCheck {
    let ts = tilde_s_f_model();
    let phi = phi_matrix();
    let incl = ts.subspace.inclusion();
    let phi_s = phi.mul(&incl);
    let model = sprime_model();
    let gens = f_gens();
    let phi_right_invariant = (1..5).all(|i| {
        let r = gens[i].mul(&gens[4 + i]).right_matrix();
        phi.mul(&r) == phi
    });
    let intertwines = |tilde: &QMat, target: &QMat| phi_s.mul(tilde) == target.mul(&phi_s);
    let even_part_dim = {
        let g = ts.module.grading();
        let n = g.rows();
        QMat::identity(n).add(g).rank()
    };
    ReductionCheck {
        tilde_dim: ts.dim(),
        phi_rank_on_tilde: phi_s.rank(),
        phi_right_invariant,
        grading: intertwines(ts.module.grading(), &model.grading),
        e0: intertwines(&ts.e0, &model.e0),
        right_eps0: intertwines(&ts.right_eps0, &model.right_eps0),
        left_eps: (0..5).all(|j| intertwines(ts.module.gen(j), &model.left_eps[j])),
        even_part_dim,
    }
}

/// Summary of the three representations used by the acceptance checks.
#[derive(Clone, Debug)]
pub struct QuatRepsSummary {
    pub alpha_report: Vec<String>,
    pub beta_report: Vec<String>,
    pub f_report: Vec<String>,
    pub f_rank: usize,
    pub alpha_gamma_text: String,
    pub alpha_gamma_is_diag_1_m1: bool,
}

pub fn quaternion_reps() -> QuatRepsSummary {
    let g = alpha_gamma();
    QuatRepsSummary {
        alpha_report: alpha_module().verify(),
        beta_report: beta_module().verify(),
        f_report: f_module().verify(),
        f_rank: f_blade_image_rank(),
        alpha_gamma_text: g.to_text(),
        alpha_gamma_is_diag_1_m1: g == QuatMat::diag(Quat::one(), Quat::real(q(-1))),
    }
}

impl QuatRepsSummary {
    pub fn to_json(&self) -> Value {
        json!({
            "alpha": {"dim": 16, "violations": self.alpha_report},
            "beta": {"dim": 32, "violations": self.beta_report},
            "f": {"dim": 512, "violations": self.f_report, "blade_image_rank": self.f_rank},
            "alpha_gamma": self.alpha_gamma_text,
        })
    }
}

/// Parity of dim ker(s|S̃⁺) for a skew operator on S̃.
pub fn tilde_mod2_index(ts: &TildeS, s: &QMat) -> u8 {
    crate::module::even_kernel_parity(ts.module.grading(), s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_gamma_is_diag() {
        assert_eq!(alpha_gamma(), QuatMat::diag(Quat::one(), Quat::real(q(-1))));
        assert_eq!(alpha_gamma().to_text(), "[[1, 0], [0, -1]]");
        assert_eq!(alpha_gamma().mul(&alpha_gamma()), QuatMat::identity());
    }

    #[test]
    fn alpha_and_beta_modules_are_valid() {
        assert!(alpha_module().verify().is_empty(), "{:?}", alpha_module().verify());
        assert!(beta_module().verify().is_empty(), "{:?}", beta_module().verify());
        let (x0, x1) = &beta_gens()[0];
        assert_eq!(x0.mul(x0), QuatMat::identity());
        assert_eq!(x1.mul(x1), QuatMat::identity());
    }

    #[test]
    fn f_is_an_isomorphism() {
        assert!(f_module().verify().is_empty());
        assert_eq!(f_blade_image_rank(), 512);
    }

    #[test]
    fn tilde_s_has_dimension_32() {
        let ts = tilde_s_regular();
        assert_eq!(ts.dim(), 32);
        assert!(ts.verify().is_empty(), "{:?}", ts.verify());
    }

    #[test]
    fn phi_is_a_graded_isomorphism() {
        let c = check_reduction_isomorphism();
        assert!(c.passed(), "{c:?}");
    }
}
