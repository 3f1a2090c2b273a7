//! The groups G^±(n,s⁺,s⁻) of even products of unit vectors, the
//! projection p onto S(O(n)×O(s⁺)×O(s⁻)), the embedding into a Spin group,
//! a generator-level dictionary G⁺(n,s⁺,s⁻) → G⁻(n,s⁻,s⁺), and the
//! translations into the Freed–Hopkins groups H_n(s).
//!
//! G⁺ lives in Cl₍n+s⁺,s⁻₎ (generators ℝⁿ, ℝ^{s⁺}, ℝ^{s⁻} in that order) and
//! G⁻ in Cl₍s⁺,n+s⁻₎ (generators ℝ^{s⁺}, ℝⁿ, ℝ^{s⁻}).

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::clifford::{canonical_sign, versor_inverse, Blade, Multivector, Signature};
use crate::qmat::QMat;
use crate::rational::{fmt_q, q, qf, Q};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("a group element needs an even number of factors, got {0}")]
    OddCount(usize),
    #[error("factor {0} is not a unit vector")]
    NotUnit(usize),
    #[error("factor {index} has {got} coordinates, its subspace has dimension {expected}")]
    WrongLength { index: usize, expected: usize, got: usize },
    #[error("conjugation does not preserve the {0} subspace")]
    NotPreserved(Space),
    #[error("the Spin embedding is defined on G+ only")]
    MinusVariant,
    #[error("s = {0} is outside -3..=4")]
    SOutOfRange(i32),
    #[error("element is not in the expected source group: {0}")]
    NotDecomposable(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Plus,
    Minus,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Plus => "+",
            Variant::Minus => "-",
        })
    }
}

/// Which of ℝⁿ, ℝ^{s⁺}, ℝ^{s⁻} a vector belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    N,
    SPlus,
    SMinus,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::N => "R^n",
            Space::SPlus => "R^s+",
            Space::SMinus => "R^s-",
        })
    }
}

pub const SPACES: [Space; 3] = [Space::N, Space::SPlus, Space::SMinus];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupParams {
    pub n: usize,
    pub s_plus: usize,
    pub s_minus: usize,
}

impl GroupParams {
    pub fn new(n: usize, s_plus: usize, s_minus: usize) -> Self {
        GroupParams { n, s_plus, s_minus }
    }

    pub fn space_dim(&self, space: Space) -> usize {
        match space {
            Space::N => self.n,
            Space::SPlus => self.s_plus,
            Space::SMinus => self.s_minus,
        }
    }

    pub fn algebra(&self, variant: Variant) -> Signature {
        match variant {
            Variant::Plus => Signature::new(self.n + self.s_plus, self.s_minus),
            Variant::Minus => Signature::new(self.s_plus, self.n + self.s_minus),
        }
    }

    /// Position of basis vector `i` of `space` among the algebra generators.
    pub fn gen_index(&self, variant: Variant, space: Space, i: usize) -> usize {
        match (variant, space) {
            (Variant::Plus, Space::N) => i,
            (Variant::Plus, Space::SPlus) => self.n + i,
            (Variant::Plus, Space::SMinus) => self.n + self.s_plus + i,
            (Variant::Minus, Space::SPlus) => i,
            (Variant::Minus, Space::N) => self.s_plus + i,
            (Variant::Minus, Space::SMinus) => self.s_plus + self.n + i,
        }
    }

    /// Total dimension n + s⁺ + s⁻.
    pub fn total(&self) -> usize {
        self.n + self.s_plus + self.s_minus
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.s_plus, self.s_minus)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedVector {
    pub space: Space,
    pub coords: Vec<Q>,
}

impl TaggedVector {
    pub fn new(space: Space, coords: Vec<Q>) -> Self {
        TaggedVector { space, coords }
    }

    pub fn basis(space: Space, dim: usize, i: usize) -> Self {
        let mut coords = vec![Q::zero(); dim];
        coords[i] = Q::one();
        TaggedVector { space, coords }
    }

    pub fn norm_squared(&self) -> Q {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn neg(&self) -> Self {
        TaggedVector { space: self.space, coords: self.coords.iter().map(|c| -c).collect() }
    }

    pub fn to_multivector(&self, variant: Variant, params: GroupParams) -> Multivector {
        let sig = params.algebra(variant);
        Multivector::from_terms(
            sig,
            self.coords
                .iter()
                .enumerate()
                .map(|(i, c)| (Blade(1 << params.gen_index(variant, self.space, i)), c.clone())),
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "space": self.space.to_string(),
            "coords": self.coords.iter().map(fmt_q).collect::<Vec<_>>(),
        })
    }
}

/// v² for a unit vector of `space`.
fn unit_square(variant: Variant, space: Space) -> i32 {
    match (variant, space) {
        (_, Space::SPlus) => 1,
        (_, Space::SMinus) => -1,
        (Variant::Plus, Space::N) => 1,
        (Variant::Minus, Space::N) => -1,
    }
}

/// An element of G^± with its certificate of membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub variant: Variant,
    pub params: GroupParams,
    pub factors: Vec<TaggedVector>,
    pub value: Multivector,
}

impl GroupElement {
    pub fn new(variant: Variant, params: GroupParams, factors: Vec<TaggedVector>) -> Result<Self, GroupError> {
        if factors.len() % 2 != 0 {
            return Err(GroupError::OddCount(factors.len()));
        }
        let sig = params.algebra(variant);
        let mut value = Multivector::one(sig);
        for (i, v) in factors.iter().enumerate() {
            let expected = params.space_dim(v.space);
            if v.coords.len() != expected {
                return Err(GroupError::WrongLength { index: i, expected, got: v.coords.len() });
            }
            if !v.norm_squared().is_one() {
                return Err(GroupError::NotUnit(i));
            }
            value = &value * &v.to_multivector(variant, params);
        }
        Ok(GroupElement { variant, params, factors, value })
    }

    pub fn identity(variant: Variant, params: GroupParams) -> Self {
        GroupElement { variant, params, factors: vec![], value: Multivector::one(params.algebra(variant)) }
    }

    /// The central element −1, certified as v·(±v) for the first available basis vector.
    pub fn minus_one(variant: Variant, params: GroupParams) -> Option<Self> {
        let space = *SPACES.iter().find(|s| params.space_dim(**s) > 0)?;
        let v = TaggedVector::basis(space, params.space_dim(space), 0);
        let w = if unit_square(variant, space) == 1 { v.neg() } else { v.clone() };
        GroupElement::new(variant, params, vec![v, w]).ok()
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        assert_eq!((self.variant, self.params), (other.variant, other.params), "elements of different groups");
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        GroupElement { variant: self.variant, params: self.params, factors, value: &self.value * &other.value }
    }

    /// Inverse: reversed certificate, with one factor negated when the
    /// product of the squares is −1.
    pub fn inverse(&self) -> GroupElement {
        let mut factors: Vec<TaggedVector> = self.factors.iter().rev().cloned().collect();
        let sq: i32 = self.factors.iter().map(|v| unit_square(self.variant, v.space)).product();
        if sq < 0 {
            factors[0] = factors[0].neg();
        }
        let value = versor_inverse(&self.value).expect("group elements are invertible");
        GroupElement { variant: self.variant, params: self.params, factors, value }
    }

    pub fn neg(&self) -> Option<GroupElement> {
        if self.factors.is_empty() {
            return GroupElement::minus_one(self.variant, self.params);
        }
        let mut factors = self.factors.clone();
        factors[0] = factors[0].neg();
        Some(GroupElement { variant: self.variant, params: self.params, factors, value: -&self.value })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "variant": self.variant.to_string(),
            "params": [self.params.n, self.params.s_plus, self.params.s_minus],
            "factors": self.factors.iter().map(TaggedVector::to_json).collect::<Vec<_>>(),
            "value": self.value.to_json(),
        })
    }
}

/// An element of S(O(n)×O(s⁺)×O(s⁻)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalTriple {
    pub a: QMat,
    pub b_plus: QMat,
    pub b_minus: QMat,
}

impl OrthogonalTriple {
    pub fn identity(params: GroupParams) -> Self {
        OrthogonalTriple {
            a: QMat::identity(params.n),
            b_plus: QMat::identity(params.s_plus),
            b_minus: QMat::identity(params.s_minus),
        }
    }

    pub fn blocks(&self) -> [&QMat; 3] {
        [&self.a, &self.b_plus, &self.b_minus]
    }

    pub fn mul(&self, o: &OrthogonalTriple) -> OrthogonalTriple {
        OrthogonalTriple { a: self.a.mul(&o.a), b_plus: self.b_plus.mul(&o.b_plus), b_minus: self.b_minus.mul(&o.b_minus) }
    }

    pub fn is_orthogonal(&self) -> bool {
        self.blocks().iter().all(|m| m.transpose().mul(m).is_identity())
    }

    /// det A · det B⁺ · det B⁻.
    pub fn det_product(&self) -> Q {
        self.blocks().iter().map(|m| m.det()).product()
    }

    pub fn is_identity(&self) -> bool {
        self.blocks().iter().all(|m| m.is_identity())
    }

    pub fn to_json(&self) -> Value {
        json!({ "A": self.a.to_json(), "B+": self.b_plus.to_json(), "B-": self.b_minus.to_json() })
    }
}

/// p(g)v = g v g⁻¹ on each of the three subspaces, computed exactly.
pub fn project_p(g: &GroupElement) -> Result<OrthogonalTriple, GroupError> {
    let inv = versor_inverse(&g.value).ok_or_else(|| GroupError::NotDecomposable("not invertible".into()))?;
    let sig = g.params.algebra(g.variant);
    let block = |space: Space| -> Result<QMat, GroupError> {
        let d = g.params.space_dim(space);
        let idx: Vec<usize> = (0..d).map(|i| g.params.gen_index(g.variant, space, i)).collect();
        let mut m = QMat::zeros(d, d);
        for (j, &gj) in idx.iter().enumerate() {
            let v = Multivector::generator(sig, gj);
            let w = &(&g.value * &v) * &inv;
            for (b, c) in w.terms() {
                let pos = (b.grade() == 1).then(|| idx.iter().position(|&k| b.0 == 1 << k)).flatten();
                match pos {
                    Some(i) => m.set(i, j, c.clone()),
                    None => return Err(GroupError::NotPreserved(space)),
                }
            }
        }
        Ok(m)
    };
    Ok(OrthogonalTriple { a: block(Space::N)?, b_plus: block(Space::SPlus)?, b_minus: block(Space::SMinus)? })
}

/// Signature Cl₍0,(n+1)+(s⁺+1)+s⁻₎ of the Spin embedding target. Generator 0
/// is e'₀, generator 1 is e₀, and generator k+2 is e_{k+1}.
pub fn spin_target(params: GroupParams) -> Signature {
    Signature::new(0, params.total() + 2)
}

/// Image of source generator `k`: e'₀e₀e_{k+1} for the ℝⁿ ⊕ ℝ^{s⁺}
/// generators, e_{k+1} for the ℝ^{s⁻} ones.
pub fn spin_generator_image(params: GroupParams, k: usize) -> Multivector {
    let sig = spin_target(params);
    let ek = Multivector::generator(sig, k + 2);
    if k < params.n + params.s_plus {
        let pair = Multivector::from_blade(sig, Blade(0b11), Q::one());
        &pair * &ek
    } else {
        ek
    }
}

/// The algebra map Cl₍n+s⁺,s⁻₎ → Cl₍0,n+s⁺+s⁻+2₎ applied to any multivector.
pub fn spin_embed_multivector(params: GroupParams, x: &Multivector) -> Multivector {
    let sig = spin_target(params);
    let images: Vec<Multivector> = (0..params.total()).map(|k| spin_generator_image(params, k)).collect();
    let mut out = Multivector::zero(sig);
    for (b, c) in x.terms() {
        let mut t = Multivector::scalar(sig, c.clone());
        for (k, img) in images.iter().enumerate() {
            if b.0 >> k & 1 == 1 {
                t = &t * img;
            }
        }
        out = &out + &t;
    }
    out
}

pub fn spin_embedding(g: &GroupElement) -> Result<Multivector, GroupError> {
    if g.variant != Variant::Plus {
        return Err(GroupError::MinusVariant);
    }
    Ok(spin_embed_multivector(g.params, &g.value))
}

/// Vector representation of a Spin element: matrix of v ↦ x v x⁻¹ on all
/// generators, or `None` if some vector leaves the vector subspace.
pub fn spin_to_so(x: &Multivector) -> Option<QMat> {
    let sig = x.signature();
    let inv = versor_inverse(x)?;
    let n = sig.generators();
    let mut m = QMat::zeros(n, n);
    for j in 0..n {
        let w = &(x * &Multivector::generator(sig, j)) * &inv;
        for (b, c) in w.terms() {
            if b.grade() != 1 {
                return None;
            }
            m.set(b.0.trailing_zeros() as usize, j, c.clone());
        }
    }
    Some(m)
}

/// The orthogonal matrix the embedded image should act by: det A·det B⁺ on
/// e₀, A and B⁺ on e₁..e_{n+s⁺}, det B⁻ on e'₀, B⁻ on the rest.
pub fn expected_vector_action(params: GroupParams, t: &OrthogonalTriple) -> QMat {
    let n = params.total() + 2;
    let mut m = QMat::zeros(n, n);
    m.set(0, 0, t.b_minus.det());
    m.set(1, 1, t.a.det() * t.b_plus.det());
    let mut offset = 2;
    for block in t.blocks() {
        for i in 0..block.rows() {
            for (j, c) in block.row(i) {
                m.set(offset + i, offset + j, c.clone());
            }
        }
        offset += block.rows();
    }
    m
}

/// Relation report for the Spin embedding: squares and anticommutators of
/// the generator images match the source algebra.
pub fn spin_embedding_relations(params: GroupParams) -> Vec<String> {
    let src = params.algebra(Variant::Plus);
    let imgs: Vec<Multivector> = (0..params.total()).map(|k| spin_generator_image(params, k)).collect();
    let tgt = spin_target(params);
    let mut bad = Vec::new();
    for (i, a) in imgs.iter().enumerate() {
        if &(a * a) != &Multivector::scalar(tgt, q(src.square(i) as i64)) {
            bad.push(format!("image of generator {} squares wrongly", i + 1));
        }
        for (j, b) in imgs.iter().enumerate().skip(i + 1) {
            if !(&(a * b) + &(b * a)).is_zero() {
                bad.push(format!("images of generators {} and {} do not anticommute", i + 1, j + 1));
            }
        }
    }
    bad
}

/// G⁺(n,s⁺,s⁻) → G⁻(n,s⁻,s⁺) on even elements: each generator v goes to
/// the generator v' of the same vector with opposite square, and an even
/// blade of grade 2k picks up (−1)^k.
pub fn dictionary_params(params: GroupParams) -> GroupParams {
    GroupParams::new(params.n, params.s_minus, params.s_plus)
}

fn dictionary_space(space: Space) -> Space {
    match space {
        Space::N => Space::N,
        Space::SPlus => Space::SMinus,
        Space::SMinus => Space::SPlus,
    }
}

fn space_of(params: GroupParams, variant: Variant, k: usize) -> (Space, usize) {
    for s in SPACES {
        for i in 0..params.space_dim(s) {
            if params.gen_index(variant, s, i) == k {
                return (s, i);
            }
        }
    }
    unreachable!("generator index out of range")
}

pub fn dictionary_multivector(params: GroupParams, x: &Multivector) -> Multivector {
    let tp = dictionary_params(params);
    let sig = tp.algebra(Variant::Minus);
    let mut out = Multivector::zero(sig);
    for (b, c) in x.terms() {
        assert!(b.is_even(), "dictionary is defined on the even part");
        let sign = if (b.grade() / 2) % 2 == 0 { c.clone() } else { -c.clone() };
        let mut t = Multivector::scalar(sig, sign);
        for k in 0..params.total() {
            if b.0 >> k & 1 == 1 {
                let (s, i) = space_of(params, Variant::Plus, k);
                t = &t * &Multivector::generator(sig, tp.gen_index(Variant::Minus, dictionary_space(s), i));
            }
        }
        out = &out + &t;
    }
    out
}

pub fn dictionary_element(g: &GroupElement) -> GroupElement {
    assert_eq!(g.variant, Variant::Plus);
    let tp = dictionary_params(g.params);
    let mut factors: Vec<TaggedVector> =
        g.factors.iter().map(|v| TaggedVector::new(dictionary_space(v.space), v.coords.clone())).collect();
    if (factors.len() / 2) % 2 == 1 {
        factors[0] = factors[0].neg();
    }
    GroupElement::new(Variant::Minus, tp, factors).expect("dictionary preserves unit vectors")
}

/// Source group of the H_n(s) translation: G⁺(n,s,0) for s = 1..3,
/// G⁺(n,0,−s) for s < 0, G⁺(n,0,4) for s = 4, Spin(n) = G⁺(n,0,0) for s = 0.
pub fn hn_source_params(n: usize, s: i32) -> Result<GroupParams, GroupError> {
    match s {
        0 => Ok(GroupParams::new(n, 0, 0)),
        1..=3 => Ok(GroupParams::new(n, s as usize, 0)),
        -3..=-1 | 4 => Ok(GroupParams::new(n, 0, s.unsigned_abs() as usize)),
        _ => Err(GroupError::SOutOfRange(s)),
    }
}

/// Algebra holding the second component of an H_n(s) pair.
pub fn hn_second_algebra(s: i32) -> Signature {
    match s {
        1..=3 => Signature::new(s as usize, 0),
        _ => Signature::new(0, s.unsigned_abs() as usize),
    }
}

/// Class [A, B] of a pair in H_n(s) modulo (A,B) ~ (−A,−B). `twisted`
/// records that the ℝⁿ part was odd, in which case A carries the twist
/// x (Γ = e₁e₂e₃ for |s| = 3, e₁ for |s| = 1, 2) and B carries x⁻¹.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnClass {
    pub s: i32,
    pub a: Multivector,
    pub b: Multivector,
    pub twisted: bool,
}

fn twist_in(sig: Signature, offset: usize, s: i32) -> Multivector {
    let gens = if s.abs() == 3 { 3 } else { 1 };
    let mut t = Multivector::one(sig);
    for k in 0..gens {
        t = &t * &Multivector::generator(sig, offset + k);
    }
    t
}

impl HnClass {
    pub fn identity(n: usize, s: i32) -> Result<Self, GroupError> {
        let p = hn_source_params(n, s)?;
        Ok(HnClass {
            s,
            a: Multivector::one(p.algebra(Variant::Plus)),
            b: Multivector::one(hn_second_algebra(s)),
            twisted: false,
        }
        .canonical())
    }

    fn canonical(mut self) -> Self {
        if canonical_sign(&self.a) < 0 {
            self.a = -&self.a;
            self.b = -&self.b;
        }
        self
    }

    /// Multiplication [A,B][A',B'] = [AA', τ(B)B'] where τ is conjugation by
    /// the twist when the right factor is twisted.
    pub fn mul(&self, o: &HnClass) -> HnClass {
        assert_eq!(self.s, o.s);
        let b = if o.twisted && self.s.abs() == 2 {
            let t = twist_in(hn_second_algebra(self.s), 0, self.s);
            let ti = versor_inverse(&t).expect("unit twist");
            &(&ti * &self.b) * &t
        } else {
            self.b.clone()
        };
        HnClass { s: self.s, a: &self.a * &o.a, b: &b * &o.b, twisted: self.twisted ^ o.twisted }.canonical()
    }

    /// The same class with the sign moved to the second slot: [−A, B].
    pub fn negate_first(&self) -> HnClass {
        HnClass { s: self.s, a: -&self.a, b: self.b.clone(), twisted: self.twisted }.canonical()
    }

    pub fn to_json(&self) -> Value {
        json!({ "s": self.s, "first": self.a.to_text(), "second": self.b.to_text(), "twisted": self.twisted })
    }
}

/// gu ↦ [g,u], or [g⊗x, x⁻¹u] when g is odd.
pub fn hn_translate(s: i32, g: &GroupElement) -> Result<HnClass, GroupError> {
    let n = g.params.n;
    let params = hn_source_params(n, s)?;
    if g.variant != Variant::Plus || g.params != params {
        return Err(GroupError::NotDecomposable(format!(
            "expected an element of G+{params}, got G{}{}",
            g.variant, g.params
        )));
    }
    let src = params.algebra(Variant::Plus);
    let b_sig = hn_second_algebra(s);
    let mut x = Multivector::one(src);
    let mut u = Multivector::one(src);
    let mut u_b = Multivector::one(b_sig);
    let mut x_count = 0usize;
    let mut inversions = 0usize;
    let mut u_seen = 0usize;
    for v in &g.factors {
        if v.space == Space::N {
            x = &x * &v.to_multivector(Variant::Plus, params);
            x_count += 1;
            inversions += u_seen;
        } else {
            if s == 4 && !v.coords[3].is_zero() {
                return Err(GroupError::NotDecomposable("s = 4 factors must fix e4".into()));
            }
            u = &u * &v.to_multivector(Variant::Plus, params);
            u_b = &u_b
                * &Multivector::from_terms(
                    b_sig,
                    v.coords.iter().enumerate().map(|(i, c)| (Blade(1 << i), c.clone())),
                );
            u_seen += 1;
        }
    }
    if inversions % 2 == 1 {
        x = -&x;
    }
    debug_assert_eq!(&x * &u, g.value);
    let twisted = x_count % 2 == 1;
    if twisted && s == 4 {
        return Err(GroupError::NotDecomposable("s = 4 translation needs an even R^n part".into()));
    }
    let (a, b) = if twisted {
        let ta = twist_in(src, n, s);
        let tb = twist_in(b_sig, 0, s);
        (&x * &ta, &versor_inverse(&tb).expect("unit twist") * &u_b)
    } else {
        (x, u_b)
    };
    Ok(HnClass { s, a, b, twisted }.canonical())
}

/// Rational point on the unit sphere S^{dim−1} by inverse stereographic
/// projection of a small random rational point, with shuffled coordinates.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Q> {
    assert!(dim > 0);
    if dim == 1 {
        return vec![if rng.gen_bool(0.5) { q(1) } else { q(-1) }];
    }
    let y: Vec<Q> = (0..dim - 1).map(|_| qf(rng.gen_range(-3..=3), rng.gen_range(1..=3))).collect();
    let r2: Q = y.iter().map(|c| c * c).sum();
    let den = &r2 + q(1);
    let mut v = Vec::with_capacity(dim);
    v.push((q(1) - &r2) / &den);
    for c in &y {
        v.push(q(2) * c / &den);
    }
    v.shuffle(rng);
    v
}

/// Random element with `pairs` pairs of unit vectors. With `fix_last` the
/// ℝ^{s⁻} vectors have zero last coordinate and factors come in same-space
/// pairs, which is the image of H_n(4) inside G⁺(n,0,4).
pub fn random_element<R: Rng + ?Sized>(
    rng: &mut R,
    variant: Variant,
    params: GroupParams,
    pairs: usize,
    fix_last: bool,
) -> GroupElement {
    let spaces: Vec<Space> = SPACES.into_iter().filter(|s| params.space_dim(*s) > 0).collect();
    let mut factors = Vec::with_capacity(2 * pairs);
    let draw = |rng: &mut R, space: Space| {
        let d = params.space_dim(space);
        if fix_last && space == Space::SMinus {
            let mut c = random_unit_vector(rng, d - 1);
            c.push(Q::zero());
            TaggedVector::new(space, c)
        } else {
            TaggedVector::new(space, random_unit_vector(rng, d))
        }
    };
    for _ in 0..pairs {
        let s1 = *spaces.choose(rng).expect("nonempty group");
        let s2 = if fix_last { s1 } else { *spaces.choose(rng).expect("nonempty group") };
        factors.push(draw(rng, s1));
        factors.push(draw(rng, s2));
    }
    GroupElement::new(variant, params, factors).expect("sampled unit vectors")
}

/// Random element with one or two pairs of factors.
fn random_short<R: Rng + ?Sized>(rng: &mut R, variant: Variant, params: GroupParams, fix_last: bool) -> GroupElement {
    let pairs = rng.gen_range(1..=2);
    random_element(rng, variant, params, pairs, fix_last)
}

/// Outcome of a sampled exact check.
#[derive(Clone, Debug, Default)]
pub struct SampledCheck {
    pub name: String,
    pub samples: usize,
    pub failures: Vec<String>,
}

impl SampledCheck {
    fn new(name: impl Into<String>) -> Self {
        SampledCheck { name: name.into(), ..Default::default() }
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < 8 {
            self.failures.push(msg);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({ "name": self.name, "samples": self.samples, "failures": self.failures, "passed": self.passed() })
    }
}

/// p is a homomorphism into S(O(n)×O(s⁺)×O(s⁻)) with kernel {±1}.
pub fn check_projection<R: Rng + ?Sized>(rng: &mut R, variant: Variant, params: GroupParams, samples: usize) -> SampledCheck {
    let mut c = SampledCheck::new(format!("p on G{variant}{params}"));
    let one = GroupElement::identity(variant, params);
    let minus = GroupElement::minus_one(variant, params).expect("nonempty group");
    for h in [&one, &minus] {
        match project_p(h) {
            Ok(t) if t.is_identity() => {}
            _ => c.fail("p(±1) is not the identity".into()),
        }
    }
    for i in 0..samples {
        let g = random_short(rng, variant, params, false);
        let h = random_short(rng, variant, params, false);
        let (Ok(pg), Ok(ph), Ok(pgh)) = (project_p(&g), project_p(&h), project_p(&g.mul(&h))) else {
            c.fail(format!("sample {i}: conjugation left the subspaces"));
            continue;
        };
        if pgh != pg.mul(&ph) {
            c.fail(format!("sample {i}: p(gh) != p(g)p(h)"));
        }
        if !pg.is_orthogonal() || !pg.det_product().is_one() {
            c.fail(format!("sample {i}: p(g) is not in S(O x O x O)"));
        }
        let gi = g.inverse();
        if !g.mul(&gi).value.as_scalar().is_some_and(|x| x.is_one()) {
            c.fail(format!("sample {i}: certified inverse is wrong"));
        }
        // kernel: g·h with p(g·h) = 1 must be ±1
        let k = g.mul(&gi).mul(&minus);
        match project_p(&k) {
            Ok(t) if t.is_identity() && k.value.as_scalar().is_some_and(|x| x.abs().is_one()) => {}
            _ => c.fail(format!("sample {i}: kernel element not detected")),
        }
        if pg.is_identity() && !g.value.as_scalar().is_some_and(|x| x.abs().is_one()) {
            c.fail(format!("sample {i}: p(g) = 1 for g != ±1"));
        }
        if pg == ph && g.value != h.value && g.value != -&h.value {
            c.fail(format!("sample {i}: p identifies elements not differing by sign"));
        }
        c.samples += 1;
    }
    c
}

/// The embedding preserves relations, lands in Spin, and its vector action
/// reproduces p.
pub fn check_spin_embedding<R: Rng + ?Sized>(rng: &mut R, params: GroupParams, samples: usize) -> SampledCheck {
    let mut c = SampledCheck::new(format!("Spin embedding of G+{params}"));
    for msg in spin_embedding_relations(params) {
        c.fail(msg);
    }
    let minus = GroupElement::minus_one(Variant::Plus, params).expect("nonempty group");
    if spin_embedding(&minus).ok() != Some(-&Multivector::one(spin_target(params))) {
        c.fail("-1 does not map to -1".into());
    }
    for i in 0..samples {
        let g = random_short(rng, Variant::Plus, params, false);
        let h = random_element(rng, Variant::Plus, params, 1, false);
        let eg = spin_embedding(&g).expect("plus variant");
        let eh = spin_embedding(&h).expect("plus variant");
        if spin_embedding(&g.mul(&h)).expect("plus variant") != &eg * &eh {
            c.fail(format!("sample {i}: embedding is not multiplicative"));
        }
        if !eg.is_even() || !(&eg * &eg.reverse()).as_scalar().is_some_and(|x| x.is_one()) {
            c.fail(format!("sample {i}: image is not a unit-norm even element"));
        }
        let Ok(pg) = project_p(&g) else {
            c.fail(format!("sample {i}: p failed"));
            continue;
        };
        match spin_to_so(&eg) {
            Some(m) if m == expected_vector_action(params, &pg) => {}
            _ => c.fail(format!("sample {i}: vector action does not match p")),
        }
        c.samples += 1;
    }
    c
}

/// The candidate dictionary G⁺(n,s⁺,s⁻) → G⁻(n,s⁻,s⁺) is multiplicative on
/// even blades and agrees with the certificate-level map on samples.
pub fn check_dictionary<R: Rng + ?Sized>(rng: &mut R, params: GroupParams, samples: usize) -> SampledCheck {
    let mut c = SampledCheck::new(format!("dictionary G+{params} -> G-{}", dictionary_params(params)));
    let sig = params.algebra(Variant::Plus);
    let even: Vec<Blade> = sig.blades().filter(Blade::is_even).collect();
    for &x in &even {
        for &y in &even {
            let mx = Multivector::from_blade(sig, x, Q::one());
            let my = Multivector::from_blade(sig, y, Q::one());
            let lhs = dictionary_multivector(params, &(&mx * &my));
            let rhs = &dictionary_multivector(params, &mx) * &dictionary_multivector(params, &my);
            if lhs != rhs {
                c.fail(format!("blades {x:?},{y:?}: not multiplicative"));
            }
        }
    }
    for i in 0..samples {
        let g = random_short(rng, Variant::Plus, params, false);
        let d = dictionary_element(&g);
        if d.value != dictionary_multivector(params, &g.value) {
            c.fail(format!("sample {i}: certificate image differs from algebra image"));
        }
        c.samples += 1;
    }
    c
}

/// hn_translate is a homomorphism, sign-compatible, and separates ±g.
pub fn check_hn<R: Rng + ?Sized>(rng: &mut R, n: usize, s: i32, samples: usize) -> SampledCheck {
    let mut c = SampledCheck::new(format!("H_{n}({s}) translation"));
    let params = match hn_source_params(n, s) {
        Ok(p) => p,
        Err(e) => {
            c.fail(e.to_string());
            return c;
        }
    };
    let fix = s == 4;
    let id = HnClass::identity(n, s).expect("valid s");
    if hn_translate(s, &GroupElement::identity(Variant::Plus, params)).ok() != Some(id.clone()) {
        c.fail("identity does not map to [1,1]".into());
    }
    let minus = GroupElement::minus_one(Variant::Plus, params).expect("nonempty group");
    match hn_translate(s, &minus) {
        Ok(m) if m == id.negate_first() && m != id => {}
        _ => c.fail("-1 does not map to [-1,1] = [1,-1]".into()),
    }
    for i in 0..samples {
        let g = random_short(rng, Variant::Plus, params, fix);
        let h = random_short(rng, Variant::Plus, params, fix);
        let (Ok(tg), Ok(th), Ok(tgh)) = (hn_translate(s, &g), hn_translate(s, &h), hn_translate(s, &g.mul(&h))) else {
            c.fail(format!("sample {i}: translation failed"));
            continue;
        };
        if tg.mul(&th) != tgh {
            c.fail(format!("sample {i}: t(g)t(h) != t(gh)"));
        }
        let ng = g.neg().expect("nonempty group");
        match hn_translate(s, &ng) {
            Ok(t) if t == tg.negate_first() && t != tg => {}
            _ => c.fail(format!("sample {i}: -g does not map to the sign-twisted class")),
        }
        if (g.value != h.value) == (tg == th) {
            c.fail(format!("sample {i}: translation not injective"));
        }
        c.samples += 1;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(space: Space, c: &[Q]) -> TaggedVector {
        TaggedVector::new(space, c.to_vec())
    }

    #[test]
    fn group_element_examples() {
        let p = GroupParams::new(3, 0, 1);
        let id = GroupElement::new(Variant::Plus, p, vec![]).unwrap();
        assert!(id.value.as_scalar().unwrap().is_one());
        let e1 = v(Space::SMinus, &[q(1)]);
        let m = GroupElement::new(Variant::Plus, p, vec![e1.clone(), e1]).unwrap();
        assert_eq!(m.value.as_scalar().unwrap(), q(-1));
        let a = v(Space::N, &[qf(3, 5), qf(4, 5), q(0)]);
        let b = v(Space::N, &[q(0), q(1), q(0)]);
        let g = GroupElement::new(Variant::Plus, p, vec![a, b]).unwrap();
        assert!(g.value.is_even());
        assert_eq!(
            GroupElement::new(Variant::Plus, p, vec![v(Space::N, &[q(1), q(1), q(0)]), v(Space::N, &[q(1), q(0), q(0)])]),
            Err(GroupError::NotUnit(0))
        );
        assert_eq!(GroupElement::new(Variant::Plus, p, vec![v(Space::N, &[q(1), q(0), q(0)])]), Err(GroupError::OddCount(1)));
    }

    #[test]
    fn projection_of_eps1_eps2() {
        let p = GroupParams::new(3, 1, 1);
        let g = GroupElement::new(
            Variant::Plus,
            p,
            vec![v(Space::N, &[q(1), q(0), q(0)]), v(Space::N, &[q(0), q(1), q(0)])],
        )
        .unwrap();
        let t = project_p(&g).unwrap();
        assert_eq!(t.a, QMat::from_i64(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, 1]]));
        assert!(t.b_plus.is_identity() && t.b_minus.is_identity());
    }

    #[test]
    fn embedding_of_eps1_squares_to_one() {
        let p = GroupParams::new(2, 0, 1);
        let img = spin_generator_image(p, 0);
        assert!((&img * &img).as_scalar().unwrap().is_one());
        assert!(spin_embedding_relations(p).is_empty());
    }

    #[test]
    fn sampled_group_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (variant, p) in [(Variant::Plus, GroupParams::new(2, 1, 1)), (Variant::Minus, GroupParams::new(2, 0, 2))] {
            let c = check_projection(&mut rng, variant, p, 20);
            assert!(c.passed(), "{:?}", c.failures);
        }
        let c = check_spin_embedding(&mut rng, GroupParams::new(2, 1, 1), 20);
        assert!(c.passed(), "{:?}", c.failures);
        let c = check_dictionary(&mut rng, GroupParams::new(1, 1, 2), 20);
        assert!(c.passed(), "{:?}", c.failures);
    }

    #[test]
    fn hn_translations_are_homomorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in -3..=4 {
            let c = check_hn(&mut rng, 2, s, 15);
            assert!(c.passed(), "s={s}: {:?}", c.failures);
        }
        assert_eq!(hn_source_params(2, 5), Err(GroupError::SOutOfRange(5)));
    }

    #[test]
    fn random_vectors_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..6 {
            let v = random_unit_vector(&mut rng, d);
            assert!(v.iter().map(|c| c * c).sum::<Q>().is_one());
        }
    }
}
