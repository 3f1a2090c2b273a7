//! Exact arithmetic in the Z/2-graded Clifford algebras Cl(l,m).
//!
//! Generators ε_1..ε_l square to +1 and e_1..e_m square to −1. A blade is a
//! bitmask over the l+m generators in the global order ε_1..ε_l, e_1..e_m, so
//! bit `i < l` is ε_{i+1} and bit `l + j` is e_{j+1}.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::rational::{bigint_from_json, bigint_to_json, fmt_q, parse_q, Q};

pub const MAX_GENERATORS: usize = 30;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CliffordError {
    #[error("signature mismatch: Cl({0},{1}) vs Cl({2},{3})")]
    SignatureMismatch(usize, usize, usize, usize),
    #[error("expected {expected} coordinates, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("generator index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("too many generators ({0}); at most {MAX_GENERATORS} supported")]
    TooManyGenerators(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Counts (l, m) of generators squaring to +1 and −1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub l: usize,
    pub m: usize,
}

impl Signature {
    pub fn new(l: usize, m: usize) -> Self {
        assert!(l + m <= MAX_GENERATORS, "Cl({l},{m}) has too many generators");
        Signature { l, m }
    }

    pub fn try_new(l: usize, m: usize) -> Result<Self, CliffordError> {
        if l + m > MAX_GENERATORS {
            return Err(CliffordError::TooManyGenerators(l + m));
        }
        Ok(Signature { l, m })
    }

    pub fn generators(&self) -> usize {
        self.l + self.m
    }

    pub fn dim(&self) -> usize {
        1usize << self.generators()
    }

    /// Square (+1 or −1) of the generator at global position `k`.
    pub fn square(&self, k: usize) -> i32 {
        if k < self.l {
            1
        } else {
            -1
        }
    }

    pub fn blades(&self) -> impl Iterator<Item = Blade> {
        (0..self.dim() as u32).map(Blade)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cl({},{})", self.l, self.m)
    }
}

/// Sorted generator set encoded as a bitmask in the global generator order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Blade(pub u32);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    /// Builds a blade from 1-based ε and e indices.
    pub fn from_indices(sig: Signature, eps: &[usize], e: &[usize]) -> Result<Blade, CliffordError> {
        let mut bits = 0u32;
        for &i in eps {
            if i == 0 || i > sig.l {
                return Err(CliffordError::IndexOutOfRange(format!("eps{i} in {sig}")));
            }
            let b = 1u32 << (i - 1);
            if bits & b != 0 {
                return Err(CliffordError::IndexOutOfRange(format!("repeated eps{i}")));
            }
            bits |= b;
        }
        for &j in e {
            if j == 0 || j > sig.m {
                return Err(CliffordError::IndexOutOfRange(format!("e{j} in {sig}")));
            }
            let b = 1u32 << (sig.l + j - 1);
            if bits & b != 0 {
                return Err(CliffordError::IndexOutOfRange(format!("repeated e{j}")));
            }
            bits |= b;
        }
        Ok(Blade(bits))
    }

    pub fn grade(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_even(&self) -> bool {
        self.grade() % 2 == 0
    }

    pub fn eps_indices(&self, sig: Signature) -> Vec<usize> {
        (0..sig.l).filter(|&k| self.0 >> k & 1 == 1).map(|k| k + 1).collect()
    }

    pub fn e_indices(&self, sig: Signature) -> Vec<usize> {
        (0..sig.m).filter(|&k| self.0 >> (sig.l + k) & 1 == 1).map(|k| k + 1).collect()
    }

    /// Display order: by grade, then lexicographically by generator positions.
    pub fn display_key(&self) -> (u32, Vec<u32>) {
        (self.grade(), (0..32).filter(|k| self.0 >> k & 1 == 1).collect())
    }
}

/// Sign and result of the product of two basis blades.
pub fn blade_product(sig: Signature, a: Blade, b: Blade) -> (i32, Blade) {
    let mut swaps = 0u32;
    // each generator of b has to move past the generators of a with larger index
    let mut rest = b.0;
    while rest != 0 {
        let k = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += (a.0 >> (k + 1)).count_ones();
    }
    let mut sign = if swaps % 2 == 0 { 1 } else { -1 };
    let mut common = a.0 & b.0;
    while common != 0 {
        let k = common.trailing_zeros() as usize;
        common &= common - 1;
        sign *= sig.square(k);
    }
    (sign, Blade(a.0 ^ b.0))
}

/// Square of a basis blade, always ±1.
pub fn blade_square(sig: Signature, a: Blade) -> i32 {
    blade_product(sig, a, a).0
}

/// Exact sparse element of Cl(l,m) with no stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multivector {
    sig: Signature,
    terms: BTreeMap<Blade, Q>,
}

impl Multivector {
    pub fn zero(sig: Signature) -> Self {
        Multivector { sig, terms: BTreeMap::new() }
    }

    pub fn scalar(sig: Signature, c: Q) -> Self {
        Self::from_blade(sig, Blade::SCALAR, c)
    }

    pub fn one(sig: Signature) -> Self {
        Self::scalar(sig, Q::one())
    }

    pub fn from_blade(sig: Signature, blade: Blade, c: Q) -> Self {
        let mut mv = Self::zero(sig);
        mv.add_term(blade, c);
        mv
    }

    /// ε_i, 1-based.
    pub fn eps(sig: Signature, i: usize) -> Self {
        assert!(i >= 1 && i <= sig.l, "eps{i} not in {sig}");
        Self::from_blade(sig, Blade(1 << (i - 1)), Q::one())
    }

    /// e_j, 1-based.
    pub fn e(sig: Signature, j: usize) -> Self {
        assert!(j >= 1 && j <= sig.m, "e{j} not in {sig}");
        Self::from_blade(sig, Blade(1 << (sig.l + j - 1)), Q::one())
    }

    /// Generator at global position `k` (0-based over ε then e).
    pub fn generator(sig: Signature, k: usize) -> Self {
        assert!(k < sig.generators());
        Self::from_blade(sig, Blade(1 << k), Q::one())
    }

    pub fn from_terms(sig: Signature, terms: impl IntoIterator<Item = (Blade, Q)>) -> Self {
        let mut mv = Self::zero(sig);
        for (b, c) in terms {
            mv.add_term(b, c);
        }
        mv
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn terms(&self) -> &BTreeMap<Blade, Q> {
        &self.terms
    }

    pub fn coeff(&self, b: Blade) -> Q {
        self.terms.get(&b).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Scalar part when the element is a pure scalar.
    pub fn as_scalar(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Blade::SCALAR).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, b: Blade, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(b) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_sig(&self, other: &Multivector) -> Result<(), CliffordError> {
        if self.sig != other.sig {
            return Err(CliffordError::SignatureMismatch(self.sig.l, self.sig.m, other.sig.l, other.sig.m));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Multivector) -> Result<Multivector, CliffordError> {
        self.check_sig(other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(*b, c.clone());
        }
        Ok(out)
    }

    /// Clifford product.
    pub fn try_mul(&self, other: &Multivector) -> Result<Multivector, CliffordError> {
        self.check_sig(other)?;
        let mut out = Multivector::zero(self.sig);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (s, blade) = blade_product(self.sig, *a, *b);
                let c = ca * cb;
                out.add_term(blade, if s > 0 { c } else { -c });
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> Multivector {
        Multivector::from_terms(self.sig, self.terms.iter().map(|(b, x)| (*b, x * c)))
    }

    /// Automorphism fixing even blades and negating odd ones.
    pub fn grading_involution(&self) -> Multivector {
        Multivector::from_terms(
            self.sig,
            self.terms.iter().map(|(b, c)| (*b, if b.is_even() { c.clone() } else { -c.clone() })),
        )
    }

    pub fn even_part(&self) -> Multivector {
        Multivector::from_terms(self.sig, self.terms.iter().filter(|(b, _)| b.is_even()).map(|(b, c)| (*b, c.clone())))
    }

    pub fn odd_part(&self) -> Multivector {
        Multivector::from_terms(self.sig, self.terms.iter().filter(|(b, _)| !b.is_even()).map(|(b, c)| (*b, c.clone())))
    }

    /// Anti-automorphism reversing the order of generators in each blade.
    pub fn reverse(&self) -> Multivector {
        Multivector::from_terms(
            self.sig,
            self.terms.iter().map(|(b, c)| {
                let g = b.grade();
                let flip = (g * g.saturating_sub(1) / 2) % 2 == 1;
                (*b, if flip { -c.clone() } else { c.clone() })
            }),
        )
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|b| b.is_even())
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|b| !b.is_even())
    }

    /// Re-embeds into a larger algebra by sending the generator at position k
    /// to position `map[k]` of `target`. The map must be order preserving.
    pub fn relabel(&self, target: Signature, map: &[usize]) -> Multivector {
        debug_assert!(map.windows(2).all(|w| w[0] < w[1]));
        Multivector::from_terms(
            target,
            self.terms.iter().map(|(b, c)| {
                let mut bits = 0u32;
                for (k, &t) in map.iter().enumerate() {
                    if b.0 >> k & 1 == 1 {
                        bits |= 1 << t;
                    }
                }
                (Blade(bits), c.clone())
            }),
        )
    }

    /// Text form: `coeff * eps{i..} e{j..}` terms joined by ` + `.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by_key(|(b, _)| b.display_key());
        items
            .iter()
            .map(|(b, c)| {
                let eps = b.eps_indices(self.sig);
                let e = b.e_indices(self.sig);
                let mut blade = Vec::new();
                if !eps.is_empty() {
                    blade.push(format!("eps{{{}}}", join(&eps)));
                }
                if !e.is_empty() {
                    blade.push(format!("e{{{}}}", join(&e)));
                }
                if blade.is_empty() {
                    blade.push("1".into());
                }
                format!("{} * {}", fmt_q(c), blade.join(" "))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn parse_text(sig: Signature, s: &str) -> Result<Multivector, CliffordError> {
        let s = s.trim();
        let mut out = Multivector::zero(sig);
        if s == "0" || s.is_empty() {
            return Ok(out);
        }
        for term in s.split('+') {
            let term = term.trim();
            let (coeff, blade) = match term.split_once('*') {
                Some((c, b)) => (c.trim(), b.trim()),
                None => {
                    if term.starts_with("eps") || term.starts_with('e') {
                        ("1", term)
                    } else {
                        (term, "1")
                    }
                }
            };
            let c = parse_q(coeff).ok_or_else(|| CliffordError::Parse(format!("bad coefficient `{coeff}`")))?;
            let (eps, e) = parse_blade(blade)?;
            let b = Blade::from_indices(sig, &eps, &e)?;
            out.add_term(b, c);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by_key(|(b, _)| b.display_key());
        let terms: Vec<Value> = items
            .iter()
            .map(|(b, c)| {
                json!({
                    "eps": b.eps_indices(self.sig),
                    "e": b.e_indices(self.sig),
                    "num": bigint_to_json(c.numer()),
                    "den": bigint_to_json(c.denom()),
                })
            })
            .collect();
        json!({ "sig": [self.sig.l, self.sig.m], "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Multivector, CliffordError> {
        let bad = |what: &str| CliffordError::Parse(format!("multivector JSON: {what}"));
        let sig = v.get("sig").and_then(Value::as_array).ok_or_else(|| bad("missing sig"))?;
        if sig.len() != 2 {
            return Err(bad("sig must be [l,m]"));
        }
        let l = sig[0].as_u64().ok_or_else(|| bad("sig"))? as usize;
        let m = sig[1].as_u64().ok_or_else(|| bad("sig"))? as usize;
        let sig = Signature::try_new(l, m)?;
        let mut out = Multivector::zero(sig);
        for t in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))? {
            let idx = |key: &str| -> Result<Vec<usize>, CliffordError> {
                t.get(key)
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad(key))?
                    .iter()
                    .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| bad(key)))
                    .collect()
            };
            let b = Blade::from_indices(sig, &idx("eps")?, &idx("e")?)?;
            let num = t.get("num").and_then(bigint_from_json).ok_or_else(|| bad("num"))?;
            let den = t.get("den").and_then(bigint_from_json).ok_or_else(|| bad("den"))?;
            if den.is_zero() {
                return Err(bad("zero denominator"));
            }
            out.add_term(b, Q::new(num, den));
        }
        Ok(out)
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_blade(s: &str) -> Result<(Vec<usize>, Vec<usize>), CliffordError> {
    let mut eps = Vec::new();
    let mut e = Vec::new();
    let mut rest = s.trim();
    if rest == "1" {
        return Ok((eps, e));
    }
    while !rest.is_empty() {
        let (target, after) = if let Some(r) = rest.strip_prefix("eps{") {
            (&mut eps, r)
        } else if let Some(r) = rest.strip_prefix("e{") {
            (&mut e, r)
        } else {
            return Err(CliffordError::Parse(format!("bad blade `{s}`")));
        };
        let close = after.find('}').ok_or_else(|| CliffordError::Parse(format!("unclosed brace in `{s}`")))?;
        for idx in after[..close].split(',').map(str::trim).filter(|x| !x.is_empty()) {
            target.push(idx.parse().map_err(|_| CliffordError::Parse(format!("bad index `{idx}`")))?);
        }
        rest = after[close + 1..].trim_start();
    }
    Ok((eps, e))
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl<'a> Mul<&'a Multivector> for &'a Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &'a Multivector) -> Multivector {
        self.try_mul(rhs).expect("Clifford product of mismatched signatures")
    }
}

impl<'a> Add<&'a Multivector> for &'a Multivector {
    type Output = Multivector;
    fn add(self, rhs: &'a Multivector) -> Multivector {
        self.try_add(rhs).expect("sum of mismatched signatures")
    }
}

impl<'a> Sub<&'a Multivector> for &'a Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &'a Multivector) -> Multivector {
        self + &(-rhs)
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        Multivector::from_terms(self.sig, self.terms.iter().map(|(b, c)| (*b, -c.clone())))
    }
}

/// Clifford product with signature checking.
pub fn mul(a: &Multivector, b: &Multivector) -> Result<Multivector, CliffordError> {
    a.try_mul(b)
}

/// Degree-1 element with the given coordinates over ε_1..ε_l, e_1..e_m.
pub fn embed_vector(sig: Signature, coords: &[Q]) -> Result<Multivector, CliffordError> {
    if coords.len() != sig.generators() {
        return Err(CliffordError::LengthMismatch { expected: sig.generators(), got: coords.len() });
    }
    Ok(Multivector::from_terms(sig, coords.iter().enumerate().map(|(k, c)| (Blade(1 << k), c.clone()))))
}

/// Quadratic form Q_l − Q_m.
pub fn quadratic_form(sig: Signature, coords: &[Q]) -> Q {
    coords
        .iter()
        .enumerate()
        .map(|(k, c)| if sig.square(k) > 0 { c * c } else { -(c * c) })
        .fold(Q::zero(), |a, b| a + b)
}

/// Signature of Cl(l1,m1) ⊗̂ Cl(l2,m2).
pub fn tensor_signature(a: Signature, b: Signature) -> Signature {
    Signature::new(a.l + b.l, a.m + b.m)
}

/// Positions of the two factors' generators inside the combined algebra.
pub fn tensor_maps(a: Signature, b: Signature) -> (Vec<usize>, Vec<usize>) {
    let lt = a.l + b.l;
    let left = (0..a.l).chain((0..a.m).map(|j| lt + j)).collect();
    let right = (0..b.l).map(|i| a.l + i).chain((0..b.m).map(|j| lt + a.m + j)).collect();
    (left, right)
}

/// a ⊗̂ b realized in Cl(l1+l2, m1+m2) as ι₁(a)·ι₂(b).
pub fn graded_tensor(a: &Multivector, b: &Multivector) -> Multivector {
    let target = tensor_signature(a.sig, b.sig);
    let (lm, rm) = tensor_maps(a.sig, b.sig);
    &a.relabel(target, &lm) * &b.relabel(target, &rm)
}

/// Ordered product of all generators.
pub fn volume_element(sig: Signature) -> Multivector {
    Multivector::from_blade(sig, Blade((1u64 << sig.generators()).wrapping_sub(1) as u32), Q::one())
}

/// Inverse of a product of vectors with nonzero squares: reverse divided by
/// the scalar g·rev(g). Returns `None` when that product is not a nonzero scalar.
pub fn versor_inverse(g: &Multivector) -> Option<Multivector> {
    let r = g.reverse();
    let n = (g * &r).as_scalar()?;
    if n.is_zero() {
        return None;
    }
    Some(r.scale(&(Q::one() / n)))
}

/// Sign convention used to pick a representative of ±x: first nonzero
/// coefficient in blade display order is positive.
pub fn canonical_sign(x: &Multivector) -> i32 {
    let mut items: Vec<_> = x.terms.iter().collect();
    items.sort_by_key(|(b, _)| b.display_key());
    match items.first() {
        Some((_, c)) if c.is_negative() => -1,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    #[test]
    fn generator_squares() {
        let sig = Signature::new(1, 1);
        let e1 = Multivector::eps(sig, 1);
        let f1 = Multivector::e(sig, 1);
        assert_eq!(&e1 * &e1, Multivector::one(sig));
        assert_eq!(&f1 * &f1, -&Multivector::one(sig));
        assert!((&(&e1 * &f1) + &(&f1 * &e1)).is_zero());
    }

    #[test]
    fn embed_vector_examples() {
        let v = embed_vector(Signature::new(2, 0), &[qf(3, 5), qf(4, 5)]).unwrap();
        assert_eq!(&v * &v, Multivector::one(Signature::new(2, 0)));
        let v = embed_vector(Signature::new(1, 1), &[q(1), q(1)]).unwrap();
        assert!((&v * &v).is_zero());
        assert!(embed_vector(Signature::new(1, 1), &[q(1)]).is_err());
    }

    #[test]
    fn koszul_sign_on_odd_factors() {
        let s1 = Signature::new(0, 1);
        let e = Multivector::e(s1, 1);
        let ep = Multivector::e(s1, 1);
        let one = Multivector::one(s1);
        let lhs = &graded_tensor(&one, &e) * &graded_tensor(&ep, &one);
        assert_eq!(lhs, -&graded_tensor(&ep, &e));
    }

    #[test]
    fn grading_and_parts() {
        let sig = Signature::new(1, 1);
        let e1 = Multivector::eps(sig, 1);
        assert_eq!(e1.grading_involution(), -&e1);
        let b = &e1 * &Multivector::e(sig, 1);
        assert_eq!(b.grading_involution(), b);
        let x = &Multivector::one(sig) + &e1;
        assert_eq!(x.even_part(), Multivector::one(sig));
        assert_eq!(&x.even_part() + &x.odd_part(), x);
    }

    #[test]
    fn volume_squares() {
        let g = volume_element(Signature::new(0, 4));
        assert_eq!(&g * &g, Multivector::one(Signature::new(0, 4)));
        let g = volume_element(Signature::new(0, 2));
        assert_eq!(&g * &g, -&Multivector::one(Signature::new(0, 2)));
        let g = volume_element(Signature::new(1, 0));
        assert_eq!(&g * &g, Multivector::one(Signature::new(1, 0)));
    }

    #[test]
    fn signature_mismatch_rejected() {
        let a = Multivector::one(Signature::new(1, 0));
        let b = Multivector::one(Signature::new(0, 1));
        assert!(matches!(mul(&a, &b), Err(CliffordError::SignatureMismatch(..))));
    }

    #[test]
    fn text_and_json_roundtrip() {
        let sig = Signature::new(2, 2);
        let x = Multivector::parse_text(sig, "3/2 * eps{1} e{2} + -1 * 1 + 2 * e{1,2}").unwrap();
        let y = Multivector::parse_text(sig, &x.to_text()).unwrap();
        assert_eq!(x, y);
        assert_eq!(Multivector::from_json(&x.to_json()).unwrap(), x);
        assert_eq!(x.to_text(), "-1 * 1 + 3/2 * eps{1} e{2} + 2 * e{1,2}");
    }

    #[test]
    fn versor_inverse_of_vector_product() {
        let sig = Signature::new(2, 1);
        let v = embed_vector(sig, &[qf(3, 5), qf(4, 5), q(0)]).unwrap();
        let w = embed_vector(sig, &[q(0), q(0), q(1)]).unwrap();
        let g = &v * &w;
        let gi = versor_inverse(&g).unwrap();
        assert_eq!(&g * &gi, Multivector::one(sig));
    }
}
