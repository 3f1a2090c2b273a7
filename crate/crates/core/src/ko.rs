//! KO^{-k}(pt)-valued classes of finite-dimensional graded Clifford cycles.
//!
//! A cycle over Cl₍b,a₎ lives in KO^{b−a}(pt) = KO^{-k}(pt), k = (a−b) mod 8.
//! Classification: restrict to ker s, pair off ε_i e_i, then read off the
//! Atiyah–Bott–Shapiro invariant of the remaining Cl₍0,c₎ or Cl₍p,0₎ module.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::clifford::{Blade, Signature};
use crate::module::{graded_tensor, reduce_pairs, restrict_to_skew_kernel, v1_module, GradedModule, ModuleError};
use crate::qmat::QMat;
use crate::rational::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KoError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("module relations fail: {0}")]
    Invalid(String),
    #[error("trace {trace} is not a multiple of the irreducible dimension {dim}")]
    NonIntegralTrace { trace: String, dim: usize },
    #[error("cannot add classes of degrees {0} and {1}")]
    DegreeMismatch(i32, i32),
    #[error("cannot parse KO value `{0}`")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KOGroup {
    Z,
    Z2,
    Zero,
}

impl fmt::Display for KOGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KOGroup::Z => "Z",
            KOGroup::Z2 => "Z/2",
            KOGroup::Zero => "0",
        })
    }
}

/// Bott pattern of KO^{-k}(pt).
pub fn ko_group(k: u32) -> KOGroup {
    match k % 8 {
        0 | 4 => KOGroup::Z,
        1 | 2 => KOGroup::Z2,
        _ => KOGroup::Zero,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KOValue {
    Integer(BigInt),
    Mod2(u8),
    Trivial,
}

/// Element of KO^{degree}(pt), degree ∈ {0, −1, …, −7}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KOClass {
    pub degree: i32,
    pub value: KOValue,
}

impl KOClass {
    pub fn zero(k: u32) -> Self {
        let value = match ko_group(k) {
            KOGroup::Z => KOValue::Integer(BigInt::zero()),
            KOGroup::Z2 => KOValue::Mod2(0),
            KOGroup::Zero => KOValue::Trivial,
        };
        KOClass { degree: -((k % 8) as i32), value }
    }

    pub fn integer(k: u32, n: i64) -> Self {
        assert_eq!(ko_group(k), KOGroup::Z);
        KOClass { degree: -((k % 8) as i32), value: KOValue::Integer(BigInt::from(n)) }
    }

    pub fn mod2(k: u32, bit: u8) -> Self {
        assert_eq!(ko_group(k), KOGroup::Z2);
        KOClass { degree: -((k % 8) as i32), value: KOValue::Mod2(bit & 1) }
    }

    /// k with KO^{-k}.
    pub fn k(&self) -> u32 {
        (-self.degree).rem_euclid(8) as u32
    }

    pub fn group(&self) -> KOGroup {
        ko_group(self.k())
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            KOValue::Integer(n) => n.is_zero(),
            KOValue::Mod2(b) => *b == 0,
            KOValue::Trivial => true,
        }
    }

    pub fn add(&self, other: &KOClass) -> Result<KOClass, KoError> {
        if self.degree != other.degree {
            return Err(KoError::DegreeMismatch(self.degree, other.degree));
        }
        let value = match (&self.value, &other.value) {
            (KOValue::Integer(a), KOValue::Integer(b)) => KOValue::Integer(a + b),
            (KOValue::Mod2(a), KOValue::Mod2(b)) => KOValue::Mod2((a + b) % 2),
            _ => KOValue::Trivial,
        };
        Ok(KOClass { degree: self.degree, value })
    }

    pub fn neg(&self) -> KOClass {
        match &self.value {
            KOValue::Integer(n) => KOClass { degree: self.degree, value: KOValue::Integer(-n) },
            _ => self.clone(),
        }
    }

    /// Product in the graded ring KO^{-*}(pt). Only the products that are
    /// nonzero in the ring are computed exactly: Z·anything, and η·η = η².
    pub fn mul(&self, other: &KOClass) -> KOClass {
        let k = self.k() + other.k();
        match (&self.value, &other.value) {
            (KOValue::Integer(a), KOValue::Integer(b)) if ko_group(k) == KOGroup::Z => {
                // x·y in degree 8 uses the Bott generator; degree 4·4 squares to 4·Bott
                let factor = if self.k() % 8 == 4 && other.k() % 8 == 4 { 4 } else { 1 };
                KOClass { degree: -((k % 8) as i32), value: KOValue::Integer(a * b * factor) }
            }
            (KOValue::Integer(a), KOValue::Mod2(b)) | (KOValue::Mod2(b), KOValue::Integer(a)) if self.k() % 4 == 0 || other.k() % 4 == 0 => {
                // multiplication by the degree-4 generator kills η and η²
                let zero_k4 = (self.k() % 8 == 4) || (other.k() % 8 == 4);
                if zero_k4 || ko_group(k) != KOGroup::Z2 {
                    KOClass::zero(k)
                } else {
                    let bit = ((a.mod_floor(&BigInt::from(2))).to_u8().unwrap_or(0) * b) % 2;
                    KOClass::mod2(k, bit)
                }
            }
            (KOValue::Mod2(a), KOValue::Mod2(b)) if self.k() % 8 == 1 && other.k() % 8 == 1 => KOClass::mod2(k, a * b),
            _ => KOClass::zero(k),
        }
    }

    /// "Z:n", "Z/2:b" or "0".
    pub fn value_string(&self) -> String {
        match &self.value {
            KOValue::Integer(n) => format!("Z:{n}"),
            KOValue::Mod2(b) => format!("Z/2:{b}"),
            KOValue::Trivial => "0".to_string(),
        }
    }

    pub fn parse(degree: i32, s: &str) -> Result<KOClass, KoError> {
        let k = (-degree).rem_euclid(8) as u32;
        let bad = || KoError::Parse(s.to_string());
        let out = if let Some(n) = s.strip_prefix("Z/2:") {
            KOClass { degree: -(k as i32), value: KOValue::Mod2(n.parse::<u8>().map_err(|_| bad())? & 1) }
        } else if let Some(n) = s.strip_prefix("Z:") {
            KOClass { degree: -(k as i32), value: KOValue::Integer(n.parse().map_err(|_| bad())?) }
        } else if s == "0" {
            KOClass::zero(k)
        } else {
            return Err(bad());
        };
        if out != KOClass::zero(k) && out.group() != kind_of(&out.value) {
            return Err(bad());
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({"degree": self.degree, "value": self.value_string()})
    }
}

fn kind_of(v: &KOValue) -> KOGroup {
    match v {
        KOValue::Integer(_) => KOGroup::Z,
        KOValue::Mod2(_) => KOGroup::Z2,
        KOValue::Trivial => KOGroup::Zero,
    }
}

impl fmt::Display for KOClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in KO^{}(pt)", self.value_string(), self.degree)
    }
}

/// Dimension of the irreducible graded Cl₍0,c₎ module (= irreducible
/// ungraded Cl₍1,c₎ module).
pub fn irreducible_dim_negative(c: usize) -> usize {
    const T: [usize; 8] = [1, 2, 4, 8, 8, 16, 16, 16];
    T[c % 8] * 16usize.pow((c / 8) as u32)
}

/// Dimension of the irreducible graded Cl₍p,0₎ module (= irreducible
/// ungraded Cl₍p+1,0₎ module).
pub fn irreducible_dim_positive(p: usize) -> usize {
    const T: [usize; 8] = [1, 2, 4, 8, 8, 16, 16, 16];
    T[p % 8] * 16usize.pow((p / 8) as u32)
}

/// Step-by-step record of a classification.
#[derive(Clone, Debug)]
pub struct KoAnalysis {
    pub signature: Signature,
    pub dim: usize,
    pub kernel_dim: usize,
    pub reduced_signature: Signature,
    pub reduced_dim: usize,
    pub irreducible_dim: usize,
    pub multiplicity: usize,
    /// tr(ε·ω) on the reduced module, Z degrees only.
    pub volume_trace: Option<Q>,
    pub commutant_dim: Option<usize>,
    pub class: KOClass,
}

impl KoAnalysis {
    pub fn to_json(&self) -> Value {
        json!({
            "sig": [self.signature.l, self.signature.m],
            "dim": self.dim,
            "kernel_dim": self.kernel_dim,
            "reduced_sig": [self.reduced_signature.l, self.reduced_signature.m],
            "reduced_dim": self.reduced_dim,
            "irreducible_dim": self.irreducible_dim,
            "multiplicity": self.multiplicity,
            "volume_trace": self.volume_trace.as_ref().map(crate::rational::fmt_q),
            "commutant_dim": self.commutant_dim,
            "degree": self.class.degree,
            "value": self.class.value_string(),
        })
    }
}

/// Largest reduced dimension for which the commutant is solved in
/// [`ko_analysis`]; the solve has dim² unknowns.
pub const COMMUTANT_DIM_LIMIT: usize = 32;

pub fn ko_class(m: &GradedModule) -> Result<KOClass, KoError> {
    Ok(ko_analysis(m)?.class)
}

pub fn ko_analysis(m: &GradedModule) -> Result<KoAnalysis, KoError> {
    let report = m.verify();
    if !report.is_empty() {
        return Err(KoError::Invalid(report.join("; ")));
    }
    let sig = m.signature();
    let k = (sig.m as i64 - sig.l as i64).rem_euclid(8) as u32;
    let kernel = restrict_to_skew_kernel(m)?;
    let pairs = sig.l.min(sig.m);
    let n = reduce_pairs(&kernel, pairs)?;
    let rsig = n.signature();
    // the remaining generators are all e's (a ≥ b) or all ε's (b > a)
    let (rest, d) = if rsig.l == 0 {
        (rsig.m, irreducible_dim_negative(rsig.m))
    } else {
        (rsig.l, irreducible_dim_positive(rsig.l))
    };
    if n.dim() % d != 0 {
        return Err(KoError::NonIntegralTrace { trace: n.dim().to_string(), dim: d });
    }
    let multiplicity = n.dim() / d;
    let mut volume_trace = None;
    let value = match ko_group(k) {
        KOGroup::Z => {
            let omega = Blade(((1u64 << rest) - 1) as u32);
            let t = n.grading().mul(&n.blade_action(omega)).trace();
            let dq = Q::from_integer(BigInt::from(d));
            let v = &t / &dq;
            if !v.is_integer() {
                return Err(KoError::NonIntegralTrace { trace: crate::rational::fmt_q(&t), dim: d });
            }
            volume_trace = Some(t);
            KOValue::Integer(v.to_integer())
        }
        KOGroup::Z2 => KOValue::Mod2((multiplicity % 2) as u8),
        KOGroup::Zero => KOValue::Trivial,
    };
    let commutant_dim = (n.dim() > 0 && n.dim() <= COMMUTANT_DIM_LIMIT).then(|| n.commutant_dim());
    Ok(KoAnalysis {
        signature: sig,
        dim: m.dim(),
        kernel_dim: kernel.dim(),
        reduced_signature: rsig,
        reduced_dim: n.dim(),
        irreducible_dim: d,
        multiplicity,
        volume_trace,
        commutant_dim,
        class: KOClass { degree: -(k as i32), value },
    })
}

/// V₁ ⊗̂ M: shifts Cl₍b,a₎ to Cl₍b+1,a+1₎ with the new pair first.
pub fn stabilize(m: &GradedModule) -> GradedModule {
    graded_tensor(&v1_module(), m)
}

/// Module whose skew operator is replaced by an invertible one, built as
/// T ⊗ J on M ⊗ ℝ² from an odd symmetric involution T anticommuting with
/// the Clifford action (supplied by the caller).
pub fn degenerate_double(m: &GradedModule, t: &QMat) -> GradedModule {
    let j = QMat::from_i64(&[&[0, -1], &[1, 0]]);
    let id2 = QMat::identity(2);
    let gens = m.gens().iter().map(|g| g.kron(&id2)).collect();
    GradedModule::new(m.signature(), gens, m.grading().kron(&id2), Some(t.kron(&j))).expect("double shapes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::{direct_sum, regular_module, regular_right_actions};

    #[test]
    fn regular_cl01_is_the_generator() {
        let m = regular_module(Signature::new(0, 1));
        let c = ko_class(&m).unwrap();
        assert_eq!(c.to_json(), json!({"degree": -1, "value": "Z/2:1"}));
        assert!(ko_class(&direct_sum(&m, &m)).unwrap().is_zero());
    }

    #[test]
    fn invertible_skew_gives_zero() {
        let sig = Signature::new(0, 1);
        let m = regular_module(sig);
        // T = ε ∘ R_{e1}: odd, symmetric, T² = 1, anticommutes with L_{e1}
        let t = m.grading().mul(&regular_right_actions(sig)[0]);
        let d = degenerate_double(&m, &t);
        assert!(d.is_valid(), "{:?}", d.verify());
        let c = ko_class(&d).unwrap();
        assert!(c.is_zero());
        assert_eq!(c.degree, -1);
    }

    #[test]
    fn stabilization_preserves_class() {
        for sig in [Signature::new(0, 1), Signature::new(0, 2), Signature::new(0, 4), Signature::new(1, 0)] {
            let m = regular_module(sig);
            let base = ko_class(&m).unwrap();
            let s = ko_class(&stabilize(&m)).unwrap();
            assert_eq!(base, s, "{sig}");
        }
    }

    #[test]
    fn point_index_is_superdimension() {
        let m = GradedModule::new(Signature::new(0, 0), vec![], QMat::from_i64(&[&[1, 0], &[0, 1]]), None).unwrap();
        assert_eq!(ko_class(&m).unwrap().value, KOValue::Integer(BigInt::from(2)));
    }

    #[test]
    fn positive_signatures_land_in_shifted_degrees() {
        assert_eq!(ko_class(&regular_module(Signature::new(1, 0))).unwrap().degree, -7);
        assert_eq!(ko_class(&regular_module(Signature::new(7, 0))).unwrap().group(), KOGroup::Z2);
    }

    #[test]
    fn ring_products() {
        let eta = KOClass::mod2(1, 1);
        assert_eq!(eta.mul(&eta), KOClass::mod2(2, 1));
        assert!(eta.mul(&eta).mul(&eta).is_zero());
        assert_eq!(KOClass::integer(0, 3).mul(&eta), KOClass::mod2(1, 1));
    }

    #[test]
    fn parse_roundtrip() {
        for c in [KOClass::mod2(1, 1), KOClass::integer(4, -2), KOClass::zero(3)] {
            assert_eq!(KOClass::parse(c.degree, &c.value_string()).unwrap(), c);
        }
    }
}
