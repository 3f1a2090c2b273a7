//! Finite-dimensional Z/2-graded Clifford modules over Q.
//!
//! Generator actions follow the global generator order of [`Signature`]:
//! the `l` generators squaring to +1 first, then the `m` squaring to −1.

use num_traits::Zero;
use serde_json::{json, Value};
use thiserror::Error;

use crate::clifford::{blade_product, Blade, Multivector, Signature};
use crate::qmat::{QMat, SparseVec, Subspace};
use crate::rational::{q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("expected {expected} generator actions, got {got}")]
    GeneratorCount { expected: usize, got: usize },
    #[error("operator `{0}` is not {1}×{1}")]
    Shape(String, usize),
    #[error("reduction needs a ≥ b, got (b,a) = ({b},{a})")]
    ReductionOrder { b: usize, a: usize },
    #[error("joint eigenspace has dimension {got}, expected {expected}")]
    EigenspaceDim { expected: usize, got: usize },
    #[error("subspace is not invariant under `{0}`")]
    NotInvariant(String),
    #[error("malformed module JSON: {0}")]
    Json(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule {
    sig: Signature,
    dim: usize,
    gens: Vec<QMat>,
    grading: QMat,
    skew: Option<QMat>,
}

impl GradedModule {
    pub fn new(sig: Signature, gens: Vec<QMat>, grading: QMat, skew: Option<QMat>) -> Result<Self, ModuleError> {
        let dim = grading.rows();
        if gens.len() != sig.generators() {
            return Err(ModuleError::GeneratorCount { expected: sig.generators(), got: gens.len() });
        }
        let square = |m: &QMat| m.rows() == dim && m.cols() == dim;
        if !square(&grading) {
            return Err(ModuleError::Shape("grading".into(), dim));
        }
        for (k, g) in gens.iter().enumerate() {
            if !square(g) {
                return Err(ModuleError::Shape(format!("generator {k}"), dim));
            }
        }
        if let Some(s) = &skew {
            if !square(s) {
                return Err(ModuleError::Shape("skew".into(), dim));
            }
        }
        Ok(GradedModule { sig, dim, gens, grading, skew })
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[QMat] {
        &self.gens
    }

    pub fn gen(&self, k: usize) -> &QMat {
        &self.gens[k]
    }

    pub fn grading(&self) -> &QMat {
        &self.grading
    }

    pub fn skew(&self) -> Option<&QMat> {
        self.skew.as_ref()
    }

    pub fn with_skew(mut self, s: Option<QMat>) -> Self {
        self.skew = s;
        self
    }

    pub fn with_gen(mut self, k: usize, g: QMat) -> Self {
        self.gens[k] = g;
        self
    }

    /// Skew operator, zero when absent.
    pub fn skew_or_zero(&self) -> QMat {
        self.skew.clone().unwrap_or_else(|| QMat::zeros(self.dim, self.dim))
    }

    /// Action of a basis blade: ordered product of its generator actions.
    pub fn blade_action(&self, b: Blade) -> QMat {
        let mut acc = QMat::identity(self.dim);
        for k in 0..self.sig.generators() {
            if b.0 & (1 << k) != 0 {
                acc = acc.mul(&self.gens[k]);
            }
        }
        acc
    }

    pub fn action(&self, x: &Multivector) -> QMat {
        assert_eq!(x.signature(), self.sig, "multivector signature does not match module");
        let mut acc = QMat::zeros(self.dim, self.dim);
        for (b, c) in x.terms() {
            acc = acc.add(&self.blade_action(*b).scale(c));
        }
        acc
    }

    /// Every violated module relation, empty when the module is valid.
    pub fn verify(&self) -> Vec<String> {
        let mut report = Vec::new();
        let n = self.dim;
        let id = QMat::identity(n);
        let name = |k: usize| {
            if k < self.sig.l {
                format!("eps{}", k + 1)
            } else {
                format!("e{}", k - self.sig.l + 1)
            }
        };
        if self.grading.mul(&self.grading) != id {
            report.push("grading^2 != 1".to_string());
        }
        for (k, g) in self.gens.iter().enumerate() {
            let want = q(self.sig.square(k) as i64);
            if !g.mul(g).is_scalar(&want) {
                report.push(format!("{}^2 != {}", name(k), want));
            }
            if !anticommute(g, &self.grading) {
                report.push(format!("{} does not anticommute with grading", name(k)));
            }
            for (k2, g2) in self.gens.iter().enumerate().skip(k + 1) {
                if !anticommute(g, g2) {
                    report.push(format!("{} and {} do not anticommute", name(k), name(k2)));
                }
            }
        }
        if let Some(s) = &self.skew {
            if !s.is_antisymmetric() {
                report.push("skew is not antisymmetric".to_string());
            }
            if !anticommute(s, &self.grading) {
                report.push("skew does not anticommute with grading".to_string());
            }
            for (k, g) in self.gens.iter().enumerate() {
                if !anticommute(s, g) {
                    report.push(format!("skew does not anticommute with {}", name(k)));
                }
            }
        }
        report
    }

    pub fn is_valid(&self) -> bool {
        self.verify().is_empty()
    }

    /// Traces of the actions of all 2^(l+m) basis blades, in blade order.
    pub fn blade_traces(&self) -> Vec<Q> {
        self.sig.blades().map(|b| self.blade_action(b).trace()).collect()
    }

    /// Traces of grading∘blade for every blade. Together with
    /// [`blade_traces`](Self::blade_traces) this is the full graded character.
    pub fn graded_traces(&self) -> Vec<Q> {
        self.sig.blades().map(|b| self.grading.mul(&self.blade_action(b)).trace()).collect()
    }

    /// Graded modules agree up to isomorphism iff their graded characters agree.
    pub fn same_character(&self, other: &GradedModule) -> bool {
        self.sig == other.sig
            && self.dim == other.dim
            && self.blade_traces() == other.blade_traces()
            && self.graded_traces() == other.graded_traces()
    }

    /// Restriction of every operator to an invariant subspace.
    pub fn restrict(&self, sub: &Subspace) -> Result<GradedModule, ModuleError> {
        let r = |m: &QMat, what: &str| sub.restrict(m).ok_or_else(|| ModuleError::NotInvariant(what.to_string()));
        let gens = self.gens.iter().enumerate().map(|(k, g)| r(g, &format!("generator {k}"))).collect::<Result<Vec<_>, _>>()?;
        let grading = r(&self.grading, "grading")?;
        let skew = match &self.skew {
            Some(s) => Some(r(s, "skew")?),
            None => None,
        };
        GradedModule::new(self.sig, gens, grading, skew)
    }

    /// Dimension of the algebra of matrices commuting with the grading and
    /// every generator action; 1, 2, 4 for irreducibles of real, complex,
    /// quaternionic type.
    pub fn commutant_dim(&self) -> usize {
        let n = self.dim;
        let mut ops: Vec<&QMat> = self.gens.iter().collect();
        ops.push(&self.grading);
        // unknown X[i][j] sits at index i·n + j; rows of (G X − X G) = 0
        let mut span = crate::qmat::SpanBasis::new();
        for g in ops {
            let gt = g.transpose();
            for i in 0..n {
                for j in 0..n {
                    let mut eq = SparseVec::new();
                    for (k, v) in g.row(i) {
                        *eq.entry(k * n + j).or_insert_with(Q::zero) += v;
                    }
                    for (k, v) in gt.row(j) {
                        *eq.entry(i * n + k).or_insert_with(Q::zero) -= v;
                    }
                    eq.retain(|_, v| !v.is_zero());
                    if !eq.is_empty() {
                        span.insert(eq);
                    }
                }
            }
        }
        n * n - span.dim()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sig": [self.sig.l, self.sig.m],
            "dim": self.dim,
            "gens": self.gens.iter().map(QMat::to_json).collect::<Vec<_>>(),
            "grading": self.grading.to_json(),
            "skew": self.skew.as_ref().map_or(Value::Null, QMat::to_json),
        })
    }

    pub fn from_json(v: &Value) -> Result<GradedModule, ModuleError> {
        let bad = |m: &str| ModuleError::Json(m.to_string());
        let sig = v.get("sig").and_then(Value::as_array).ok_or_else(|| bad("sig"))?;
        if sig.len() != 2 {
            return Err(bad("sig must be [l, m]"));
        }
        let l = sig[0].as_u64().ok_or_else(|| bad("sig"))? as usize;
        let m = sig[1].as_u64().ok_or_else(|| bad("sig"))? as usize;
        let sig = Signature::try_new(l, m).map_err(|e| ModuleError::Json(e.to_string()))?;
        let gens = v
            .get("gens")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("gens"))?
            .iter()
            .map(|g| QMat::from_json(g).ok_or_else(|| bad("generator matrix")))
            .collect::<Result<Vec<_>, _>>()?;
        let grading = v.get("grading").and_then(QMat::from_json).ok_or_else(|| bad("grading"))?;
        let skew = match v.get("skew") {
            None | Some(Value::Null) => None,
            Some(s) => Some(QMat::from_json(s).ok_or_else(|| bad("skew"))?),
        };
        let out = GradedModule::new(sig, gens, grading, skew)?;
        if let Some(d) = v.get("dim").and_then(Value::as_u64) {
            if d as usize != out.dim {
                return Err(bad("dim does not match matrices"));
            }
        }
        Ok(out)
    }
}

pub fn anticommute(a: &QMat, b: &QMat) -> bool {
    a.mul(b).add(&b.mul(a)).is_zero()
}

pub fn commute(a: &QMat, b: &QMat) -> bool {
    a.mul(b) == b.mul(a)
}

/// The two-dimensional Cl₍1,1₎ module V₁: ε ↦ antidiag(1,1), e ↦ antidiag(−1,1)
/// in the row convention [[0,−1],[1,0]], grading diag(1,−1).
pub fn v1_module() -> GradedModule {
    GradedModule::new(
        Signature::new(1, 1),
        vec![QMat::from_i64(&[&[0, 1], &[1, 0]]), QMat::from_i64(&[&[0, -1], &[1, 0]])],
        QMat::from_i64(&[&[1, 0], &[0, -1]]),
        None,
    )
    .expect("V1 shapes")
}

/// The one-dimensional even module of Cl₍0,0₎.
pub fn trivial_module() -> GradedModule {
    GradedModule::new(Signature::new(0, 0), vec![], QMat::identity(1), None).expect("trivial shapes")
}

/// Vₙ, the n-fold graded tensor power of V₁, as a Cl₍n,n₎ module. The ε and e
/// of the k-th factor become ε_k and e_k.
pub fn vn_module(n: usize) -> GradedModule {
    let mut acc = trivial_module();
    for _ in 0..n {
        acc = graded_tensor(&acc, &v1_module());
    }
    acc
}

/// Graded tensor product. Generators of `a` act as A ⊗ 1, generators of `b`
/// as ε_a ⊗ B, the grading is ε_a ⊗ ε_b and the skew operator is
/// s_a ⊗ 1 + ε_a ⊗ s_b. Generator order follows [`crate::clifford::tensor_maps`].
pub fn graded_tensor(a: &GradedModule, b: &GradedModule) -> GradedModule {
    let sig = crate::clifford::tensor_signature(a.sig, b.sig);
    let (ma, mb) = crate::clifford::tensor_maps(a.sig, b.sig);
    let mut gens = vec![QMat::zeros(0, 0); sig.generators()];
    let ib = QMat::identity(b.dim);
    for (k, g) in a.gens.iter().enumerate() {
        gens[ma[k]] = g.kron(&ib);
    }
    for (k, g) in b.gens.iter().enumerate() {
        gens[mb[k]] = a.grading.kron(g);
    }
    let grading = a.grading.kron(&b.grading);
    let skew = match (&a.skew, &b.skew) {
        (None, None) => None,
        _ => Some(a.skew_or_zero().kron(&ib).add(&a.grading.kron(&b.skew_or_zero()))),
    };
    GradedModule::new(sig, gens, grading, skew).expect("tensor shapes")
}

pub fn direct_sum(a: &GradedModule, b: &GradedModule) -> GradedModule {
    assert_eq!(a.sig, b.sig, "direct sum needs a common signature");
    let gens = a.gens.iter().zip(&b.gens).map(|(x, y)| x.direct_sum(y)).collect();
    let skew = match (&a.skew, &b.skew) {
        (None, None) => None,
        _ => Some(a.skew_or_zero().direct_sum(&b.skew_or_zero())),
    };
    GradedModule::new(a.sig, gens, a.grading.direct_sum(&b.grading), skew).expect("sum shapes")
}

pub fn direct_sum_all(parts: &[GradedModule]) -> Option<GradedModule> {
    let mut it = parts.iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, m| direct_sum(&acc, m)))
}

/// Signed-permutation matrix of left (`left = true`) or right multiplication
/// by a blade on the blade basis of Cl₍l,m₎.
pub fn regular_blade_matrix(sig: Signature, t: Blade, left: bool) -> QMat {
    let n = sig.dim();
    let mut m = QMat::zeros(n, n);
    for b in sig.blades() {
        let (s, r) = if left { blade_product(sig, t, b) } else { blade_product(sig, b, t) };
        m.set(r.0 as usize, b.0 as usize, q(s as i64));
    }
    m
}

/// The free rank-one module: Cl₍l,m₎ acting on itself by left multiplication,
/// graded by blade parity.
pub fn regular_module(sig: Signature) -> GradedModule {
    let gens = (0..sig.generators()).map(|k| regular_blade_matrix(sig, Blade(1 << k), true)).collect();
    let n = sig.dim();
    let mut grading = QMat::zeros(n, n);
    for b in sig.blades() {
        grading.set(b.0 as usize, b.0 as usize, q(if b.is_even() { 1 } else { -1 }));
    }
    GradedModule::new(sig, gens, grading, None).expect("regular shapes")
}

/// Right multiplication by each generator on the regular module.
pub fn regular_right_actions(sig: Signature) -> Vec<QMat> {
    (0..sig.generators()).map(|k| regular_blade_matrix(sig, Blade(1 << k), false)).collect()
}

/// Joint +1-eigenspace of the commuting involutions ε_i e_i, i = 1..b, of a
/// Cl₍b,a₎ module, given as explicit operators.
pub fn joint_plus_eigenspace(dim: usize, involutions: &[QMat]) -> Subspace {
    let half = q(1) / q(2);
    let mut proj = QMat::identity(dim);
    for t in involutions {
        proj = proj.mul(&QMat::identity(dim).add(t).scale(&half));
    }
    Subspace::spanned_by(dim, proj.columns().into_iter().filter(|c| !c.is_empty()))
}

/// Restriction of s, ε and e_{b+1..a} to the joint +1-eigenspace of
/// ε₁e₁, …, ε_b e_b, producing a Cl₍0,a−b₎ module of dimension dim/2^b.
/// `b` must equal the number of +1 generators of the module.
pub fn reduce_bb(m: &GradedModule, b: usize) -> Result<GradedModule, ModuleError> {
    if m.sig.l != b || m.sig.m < b {
        return Err(ModuleError::ReductionOrder { b: m.sig.l, a: m.sig.m });
    }
    reduce_pairs(m, b)
}

/// Restriction to the joint +1-eigenspace of ε_i e_i for i = 1..r. The
/// result is a Cl₍l−r,m−r₎ module carrying ε_{r+1..l}, e_{r+1..m}, the
/// grading and the skew operator.
pub fn reduce_pairs(m: &GradedModule, r: usize) -> Result<GradedModule, ModuleError> {
    let sig = m.sig;
    if r > sig.l || r > sig.m {
        return Err(ModuleError::ReductionOrder { b: sig.l, a: sig.m });
    }
    if r == 0 {
        return Ok(m.clone());
    }
    let invs: Vec<QMat> = (0..r).map(|i| m.gens[i].mul(&m.gens[sig.l + i])).collect();
    let sub = joint_plus_eigenspace(m.dim, &invs);
    let expected = m.dim >> r;
    if sub.dim() != expected || expected << r != m.dim {
        return Err(ModuleError::EigenspaceDim { expected, got: sub.dim() });
    }
    let restrict = |op: &QMat, what: String| sub.restrict(op).ok_or(ModuleError::NotInvariant(what));
    let mut gens = Vec::with_capacity(sig.generators() - 2 * r);
    for i in r..sig.l {
        gens.push(restrict(&m.gens[i], format!("eps{}", i + 1))?);
    }
    for j in r..sig.m {
        gens.push(restrict(&m.gens[sig.l + j], format!("e{}", j + 1))?);
    }
    let grading = restrict(&m.grading, "grading".into())?;
    let skew = match &m.skew {
        Some(s) => Some(restrict(s, "skew".into())?),
        None => None,
    };
    GradedModule::new(Signature::new(sig.l - r, sig.m - r), gens, grading, skew)
}

/// Inverse of [`reduce_bb`]: H' ⊗ V_b with s = s'⊗ε^b, ε = ε'⊗ε^b,
/// ε_i = 1⊗ε_i, e_i = 1⊗e_i (i ≤ b) and e_{b+i} = e'_i⊗ε^b.
pub fn retensor_vb(h: &GradedModule, b: usize) -> GradedModule {
    assert_eq!(h.sig.l, 0, "reduced module must be over Cl(0,c)");
    let v = vn_module(b);
    let c = h.sig.m;
    let sig = Signature::new(b, b + c);
    let ih = QMat::identity(h.dim);
    let mut gens = Vec::with_capacity(sig.generators());
    for i in 0..b {
        gens.push(ih.kron(&v.gens[i]));
    }
    for i in 0..b {
        gens.push(ih.kron(&v.gens[b + i]));
    }
    for g in &h.gens {
        gens.push(g.kron(&v.grading));
    }
    let skew = h.skew.as_ref().map(|s| s.kron(&v.grading));
    GradedModule::new(sig, gens, h.grading.kron(&v.grading), skew).expect("retensor shapes")
}

/// Kernel of the skew operator with all actions restricted to it. A missing
/// skew operator counts as zero.
pub fn restrict_to_skew_kernel(m: &GradedModule) -> Result<GradedModule, ModuleError> {
    match &m.skew {
        None => Ok(m.clone()),
        Some(s) => {
            let sub = Subspace::spanned_by(m.dim, s.kernel());
            let mut out = m.clone().with_skew(None).restrict(&sub)?;
            out.skew = Some(QMat::zeros(out.dim, out.dim));
            Ok(out)
        }
    }
}

/// dim ker(s|even) mod 2, the mod-2 index of a skew operator on a graded space.
pub fn even_kernel_parity(grading: &QMat, s: &QMat) -> u8 {
    let n = grading.rows();
    let half = q(1) / q(2);
    let p_even = QMat::identity(n).add(grading).scale(&half);
    let even = Subspace::spanned_by(n, p_even.columns().into_iter().filter(|c| !c.is_empty()));
    let incl = even.inclusion();
    let restricted = s.mul(&incl);
    (restricted.kernel().len() % 2) as u8
}

/// Change of basis by a signed permutation applied to every operator.
pub fn permute_basis(m: &GradedModule, perm: &[(usize, i32)]) -> GradedModule {
    GradedModule {
        sig: m.sig,
        dim: m.dim,
        gens: m.gens.iter().map(|g| g.signed_permute(perm)).collect(),
        grading: m.grading.signed_permute(perm),
        skew: m.skew.as_ref().map(|s| s.signed_permute(perm)),
    }
}

/// The reflected module with Z/2 grading negated: the parity shift ΠM.
pub fn parity_shift(m: &GradedModule) -> GradedModule {
    GradedModule { grading: m.grading.neg(), ..m.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v1_matches_stated_matrices() {
        let v = v1_module();
        assert_eq!(v.gen(0), &QMat::from_i64(&[&[0, 1], &[1, 0]]));
        assert!(v.gen(0).mul(v.gen(0)).is_identity());
        assert!(v.gen(1).mul(v.gen(1)).is_scalar(&q(-1)));
        assert!(v.is_valid());
    }

    #[test]
    fn zeroed_generator_is_reported() {
        let v = v1_module().with_gen(1, QMat::zeros(2, 2));
        let report = v.verify();
        assert!(report.iter().any(|r| r == "e1^2 != -1"), "{report:?}");
    }

    #[test]
    fn vn_dimensions_and_relations() {
        assert_eq!(vn_module(0).dim(), 1);
        let v2 = vn_module(2);
        assert_eq!(v2.dim(), 4);
        assert_eq!(v2.signature(), Signature::new(2, 2));
        assert!(v2.is_valid());
        assert_eq!(vn_module(3).commutant_dim(), 1);
    }

    #[test]
    fn regular_module_is_valid_and_reduces() {
        let m = regular_module(Signature::new(1, 1));
        assert!(m.is_valid());
        let r = reduce_bb(&m, 1).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r.signature(), Signature::new(0, 0));
        assert!(r.is_valid());
        for n in 0..4 {
            assert_eq!(reduce_bb(&vn_module(n), n).unwrap().dim(), 1);
        }
    }

    #[test]
    fn reduce_with_b_zero_is_identity() {
        let m = regular_module(Signature::new(0, 2));
        assert_eq!(reduce_bb(&m, 0).unwrap(), m);
    }

    #[test]
    fn reduce_rejects_a_below_b() {
        let m = regular_module(Signature::new(2, 1));
        assert!(matches!(reduce_bb(&m, 2), Err(ModuleError::ReductionOrder { .. })));
    }

    #[test]
    fn retensor_recovers_character() {
        let m = graded_tensor(&regular_module(Signature::new(1, 1)), &regular_module(Signature::new(0, 1)));
        let h = reduce_bb(&m, 1).unwrap();
        assert!(retensor_vb(&h, 1).same_character(&m));
    }

    #[test]
    fn tensor_koszul_signs_give_valid_module() {
        let m = graded_tensor(&regular_module(Signature::new(0, 1)), &regular_module(Signature::new(1, 0)));
        assert_eq!(m.signature(), Signature::new(1, 1));
        assert!(m.is_valid());
    }

    #[test]
    fn json_roundtrip() {
        let m = vn_module(1).with_skew(Some(QMat::zeros(2, 2)));
        assert_eq!(GradedModule::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn even_kernel_parity_of_zero_skew() {
        let m = regular_module(Signature::new(0, 1));
        assert_eq!(even_kernel_parity(m.grading(), &QMat::zeros(2, 2)), 1);
    }
}
