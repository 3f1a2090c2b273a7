//! Model operators: the flat fiber model, circles with Lie or bounding spin
//! structure, and circle or product models deformed by a section.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use super::eigen::SpectralError;
use super::lattice::{build_staggered, Axis, Profile, SparseOp};
use crate::module::{graded_tensor, reduce_pairs, regular_module, v1_module, vn_module, GradedModule};
use crate::qmat::QMat;
use crate::Signature;

/// Cutoff radii of ρ: 1 on |z| ≤ inner, 0 on |z| ≥ outer.
pub const CUTOFF_INNER: f64 = 0.5;
pub const CUTOFF_OUTER: f64 = 2.0 / 3.0;

/// Square grid [−R, R]ⁿ with N points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub n: usize,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "N")]
    pub points: usize,
}

impl Grid {
    pub fn new(n: usize, r: f64, points: usize) -> Result<Self, SpectralError> {
        if points < 3 || points % 2 == 0 {
            return Err(SpectralError::BadRequest(format!("N = {points} must be odd and at least 3")));
        }
        if !(r > 0.0) || n == 0 {
            return Err(SpectralError::BadRequest(format!("grid needs n ≥ 1 and R > 0 (got n = {n}, R = {r})")));
        }
        Ok(Grid { n, r, points })
    }

    /// Half-width 10/√m, the decay scale of the Gaussian ground state.
    pub fn default_radius(m: f64) -> f64 {
        10.0 / m.max(1e-12).sqrt()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.r / (self.points as f64 - 1.0)
    }
}

/// Dimensions of the even and odd parts of the multiplicity space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Multiplicity {
    pub even: usize,
    pub odd: usize,
}

impl Multiplicity {
    pub fn total(&self) -> usize {
        self.even + self.odd
    }

    fn of(module: &GradedModule) -> Self {
        let d = module.dim() as i64;
        let tr = crate::rational::to_f64(&module.grading().trace()).round() as i64;
        Multiplicity { even: ((d + tr) / 2) as usize, odd: ((d - tr) / 2) as usize }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Fiber,
    CircleLie,
    CircleBounding,
    TrivialCircle,
    Mobius,
    Product,
}

/// Antisymmetric lattice operator D = D₀ ⊗ 1 on (scalar lattice) ⊗ (multiplicity
/// space), graded by γ₀ ⊗ γ'. Only the scalar block D₀ is stored.
#[derive(Clone, Debug)]
pub struct LatticeOperator {
    pub kind: ModelKind,
    pub scalar: SparseOp,
    /// Lattice lift of the grading on the scalar block.
    pub grading: Vec<f64>,
    pub multiplicity: Multiplicity,
    /// Axis contributions to `scalar` (empty when the model has no axis split).
    pub parts: Vec<SparseOp>,
    pub axes: Vec<Axis>,
    /// Sublattice label of each scalar dof.
    pub sector: Vec<u32>,
    /// Coordinates, `coord_dim` per scalar dof.
    pub coords: Vec<f64>,
    pub coord_dim: usize,
    /// Distance of each scalar dof to the zero locus of the section.
    pub z: Vec<f64>,
    /// Normalized Gaussian ground profile, when the model has one.
    pub reference: Option<Vec<f64>>,
    pub m: f64,
    pub grid: Option<Grid>,
    /// Fiber dimension in the sense used by the near-kernel count of the model.
    pub fiber_dim: usize,
    /// Near-kernel dimension predicted from the zero-locus data.
    pub predicted_kernel: usize,
    /// Operator norm of the Clifford symbol of the section.
    pub symbol_norm: f64,
    /// sup |dh| of the section.
    pub dh_sup: f64,
    pub description: Value,
}

impl LatticeOperator {
    pub fn dim(&self) -> usize {
        self.scalar.n * self.multiplicity.total()
    }

    /// The full sparse matrix, dof (i, a) at index i·mult + a.
    pub fn matrix(&self) -> SparseOp {
        let k = self.multiplicity.total();
        let t = self
            .scalar
            .triplets()
            .into_iter()
            .flat_map(|(i, j, v)| (0..k).map(move |a| (i * k + a, j * k + a, v)))
            .collect();
        SparseOp::from_triplets(self.dim(), t)
    }

    pub fn full_grading(&self) -> Vec<f64> {
        let mult = self.multiplicity;
        self.grading
            .iter()
            .flat_map(|g| (0..mult.total()).map(move |a| if a < mult.even { *g } else { -*g }))
            .collect()
    }

    /// max |D + Dᵀ| relative to max |D|.
    pub fn antisymmetry_defect(&self) -> f64 {
        self.scalar.antisymmetry_defect() / self.scalar.max_abs().max(f64::MIN_POSITIVE)
    }

    /// max |γD + Dγ| relative to max |D|.
    pub fn grading_defect(&self) -> f64 {
        let left = self.scalar.left_diag(&self.grading);
        let right = self.scalar.transpose().left_diag(&self.grading).transpose();
        left.add(&right).max_abs() / self.scalar.max_abs().max(f64::MIN_POSITIVE)
    }

    /// max |D_i D_j + D_j D_i| over pairs of axis parts.
    pub fn split_anticommutator(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.parts.len() {
            for j in i + 1..self.parts.len() {
                let (a, b) = (&self.parts[i], &self.parts[j]);
                worst = worst.max(a.mul(b).add(&b.mul(a)).max_abs());
            }
        }
        worst
    }

    pub fn coord(&self, dof: usize) -> &[f64] {
        &self.coords[dof * self.coord_dim..(dof + 1) * self.coord_dim]
    }

    /// ρ(z) on each scalar dof.
    pub fn cutoff(&self) -> Vec<f64> {
        self.z.iter().map(|&z| cutoff(z)).collect()
    }

    /// Direct sum of two scalar blocks with the same multiplicity.
    pub fn direct_sum(&self, other: &LatticeOperator) -> LatticeOperator {
        assert_eq!(self.multiplicity, other.multiplicity);
        let mut out = self.clone();
        out.scalar = self.scalar.direct_sum(&other.scalar);
        out.grading.extend(&other.grading);
        out.parts.clear();
        out.sector.extend(&other.sector);
        out.coords.extend(&other.coords);
        out.z.extend(&other.z);
        out.reference = None;
        out.predicted_kernel += other.predicted_kernel;
        out.description = json!({"direct_sum": [self.description, other.description]});
        out
    }
}

/// Smooth monotone cutoff: 1 on z ≤ 1/2, 0 on z ≥ 2/3.
pub fn cutoff(z: f64) -> f64 {
    let s = (z - CUTOFF_INNER) / (CUTOFF_OUTER - CUTOFF_INNER);
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let psi = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    psi(1.0 - s) / (psi(1.0 - s) + psi(s))
}

fn operator_norm(m: &QMat) -> f64 {
    let rows = m.to_f64_dense();
    let d = DMatrix::from_fn(m.rows(), m.cols(), |i, j| rows[i][j]);
    d.singular_values().max()
}

/// V_n ⊗̂ V_n over Cl(2n, 2n); the operator uses the first factor's ε_i, e_i.
pub fn default_fiber(n: usize) -> GradedModule {
    graded_tensor(&vn_module(n), &vn_module(n))
}

/// Dirac-type operator Σ c(dxⁱ)∂ᵢ + m Σ c(eᵢ)xⁱ on [−R, R]ⁿ with Dirichlet
/// truncation. The tangent action is ε₁..εₙ, the bundle action e₁..eₙ.
pub fn fiber_operator(n: usize, m: f64, grid: Grid, fiber: &GradedModule) -> Result<LatticeOperator, SpectralError> {
    if grid.n != n {
        return Err(SpectralError::BadRequest(format!("grid dimension {} differs from n = {n}", grid.n)));
    }
    if !(m >= 0.0) {
        return Err(SpectralError::BadRequest(format!("deformation m = {m} must be non-negative")));
    }
    let sig = fiber.signature();
    if sig.l < n || sig.m < n {
        return Err(SpectralError::Fiber(format!(
            "{sig} module lacks {n} tangent (+1) and {n} bundle (−1) Clifford generators"
        )));
    }
    let reduced = reduce_pairs(fiber, n).map_err(|e| SpectralError::Fiber(e.to_string()))?;
    let multiplicity = Multiplicity::of(&reduced);
    let axes = vec![Axis::open(grid.r, grid.points, Some(Profile::Linear)); n];
    let st = build_staggered(&axes, m);
    let z: Vec<f64> = (0..st.dim()).map(|i| st.coord(i).iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut reference: Vec<f64> =
        (0..st.dim()).map(|i| if st.sector[i] == 0 { (-m * z[i] * z[i] / 2.0).exp() } else { 0.0 }).collect();
    let norm = reference.iter().map(|v| v * v).sum::<f64>().sqrt();
    reference.iter_mut().for_each(|v| *v /= norm);
    let scalar = st.operator();
    Ok(LatticeOperator {
        kind: ModelKind::Fiber,
        grading: st.grading.clone(),
        multiplicity,
        parts: st.parts.clone(),
        sector: st.sector.clone(),
        coords: st.coords.clone(),
        coord_dim: n,
        z,
        reference: Some(reference),
        m,
        grid: Some(grid),
        fiber_dim: reduced.dim(),
        predicted_kernel: reduced.dim(),
        symbol_norm: operator_norm(fiber.gen(sig.l)),
        dh_sup: 1.0,
        description: json!({"model": "fiber", "n": n, "m": m, "grid": grid, "fiber_signature": sig.to_string()}),
        axes,
        scalar,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CircleSpin {
    /// Periodic spinors, the structure induced by the Lie group framing.
    Lie,
    /// Antiperiodic spinors, the structure bounding the disk.
    Bounding,
}

/// The regular Cl(1,0) module: one even and one odd line.
pub fn default_circle_fiber() -> GradedModule {
    regular_module(Signature::new(1, 0))
}

/// c(dt) d/dt on a circle of the given length with N sites. The fiber must
/// carry an odd generator squaring to +1 (its first generator).
pub fn circle_operator(spin: CircleSpin, points: usize, length: f64, fiber: &GradedModule) -> Result<LatticeOperator, SpectralError> {
    if points < 3 {
        return Err(SpectralError::BadRequest(format!("N = {points} must be at least 3")));
    }
    if fiber.signature().l == 0 {
        return Err(SpectralError::Fiber("circle fiber needs a generator squaring to +1".into()));
    }
    let mult = Multiplicity::of(fiber);
    if mult.even != mult.odd {
        return Err(SpectralError::Fiber(format!("unbalanced grading {}|{}", mult.even, mult.odd)));
    }
    let twist = match spin {
        CircleSpin::Lie => 1.0,
        CircleSpin::Bounding => -1.0,
    };
    let axes = vec![Axis::circle(length, points, twist, None)];
    let st = build_staggered(&axes, 0.0);
    let kind = match spin {
        CircleSpin::Lie => ModelKind::CircleLie,
        CircleSpin::Bounding => ModelKind::CircleBounding,
    };
    Ok(LatticeOperator {
        kind,
        scalar: st.operator(),
        grading: st.grading.clone(),
        multiplicity: Multiplicity { even: mult.even, odd: 0 },
        parts: st.parts.clone(),
        sector: st.sector.clone(),
        coords: st.coords.clone(),
        coord_dim: 1,
        z: vec![0.0; st.dim()],
        reference: None,
        m: 0.0,
        grid: None,
        fiber_dim: fiber.dim(),
        predicted_kernel: if spin == CircleSpin::Lie { fiber.dim() } else { 0 },
        symbol_norm: operator_norm(fiber.gen(0)),
        dh_sup: 0.0,
        description: json!({"model": "circle", "spin": spin, "N": points, "length": length, "fiber_dim": fiber.dim()}),
        axes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionDomain {
    /// Circle of length L carrying a trivial line bundle.
    Circle,
    /// Base circle of length L with the Möbius bundle; h is given on the
    /// double cover of length 2L and is odd under the deck shift.
    MobiusCover,
    /// The real line.
    Line,
}

/// A section h given by a closed-form profile, with its zero set and a
/// transversality certificate (h' ≠ 0 at every zero).
#[derive(Clone, Debug, PartialEq)]
pub struct SectionProfile {
    pub profile: Profile,
    pub domain: SectionDomain,
    /// Length of the base circle (ignored on the line).
    pub length: f64,
    /// Zeros on the base.
    pub zeros: Vec<f64>,
    /// h' at each zero.
    pub slopes: Vec<f64>,
}

impl SectionProfile {
    pub fn on_circle(profile: Profile, length: f64) -> Self {
        let zeros = profile.zeros_on_circle(length);
        let slopes = zeros.iter().map(|&t| profile.derivative(t)).collect();
        SectionProfile { profile, domain: SectionDomain::Circle, length, zeros, slopes }
    }

    /// sin(πt/L) on the double cover: one simple zero on the base circle.
    pub fn mobius(length: f64) -> Self {
        let profile = Profile::Sin { omega: PI / length };
        SectionProfile { slopes: vec![profile.derivative(0.0)], profile, domain: SectionDomain::MobiusCover, length, zeros: vec![0.0] }
    }

    pub fn on_line(profile: Profile) -> Self {
        let zeros = match &profile {
            Profile::Linear => vec![0.0],
            Profile::Constant(c) if *c == 0.0 => vec![f64::NAN],
            Profile::Constant(_) => vec![],
            Profile::Sin { .. } | Profile::OneMinusCos => vec![f64::NAN],
        };
        let slopes = zeros.iter().map(|&t| profile.derivative(t)).collect();
        SectionProfile { profile, domain: SectionDomain::Line, length: f64::INFINITY, zeros, slopes }
    }

    /// Every zero is isolated with non-vanishing slope.
    pub fn is_transverse(&self) -> bool {
        self.zeros.iter().zip(&self.slopes).all(|(z, s)| z.is_finite() && s.abs() > 1e-9)
    }

    pub fn certify(&self) -> Result<(), SpectralError> {
        if self.is_transverse() {
            Ok(())
        } else {
            Err(SpectralError::Section(format!("{} is not transverse to the zero section", self.profile.tag())))
        }
    }

    /// Whether |h| ≤ 1 everywhere and |h| = 1 away from a neighbourhood of
    /// the zeros. Closed-form profiles other than constants never satisfy
    /// the second condition.
    pub fn meets_unit_normalization(&self) -> bool {
        matches!(self.profile, Profile::Constant(c) if c.abs() == 1.0)
    }

    /// Distance on the base to the nearest zero.
    pub fn distance(&self, t: f64) -> f64 {
        match self.domain {
            SectionDomain::Line => self.zeros.iter().map(|z| (t - z).abs()).fold(f64::INFINITY, f64::min),
            _ => {
                let l = self.length;
                self.zeros
                    .iter()
                    .map(|z| {
                        let d = (t - z).rem_euclid(l);
                        d.min(l - d)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "profile": self.profile.tag(), "domain": self.domain, "length": self.length,
            "zeros": self.zeros, "slopes": self.slopes, "transverse": self.is_transverse(),
            "dh_sup": self.profile.dh_sup(), "unit_normalized": self.meets_unit_normalization(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum DeformedModel {
    /// Trivial line bundle over a circle with the Lie spin structure.
    CircleBundle { points: usize },
    /// Möbius bundle over a circle; `points` sites (odd) on the double cover.
    Mobius { points: usize },
    /// S¹_Lie × ℝ with the section on the line factor.
    Product { circle_length: f64, circle_points: usize, half_width: f64, points: usize },
}

impl DeformedModel {
    /// Fiber dimension entering the near-kernel count, for the default fibers.
    pub fn fiber_dim(&self) -> usize {
        match self {
            DeformedModel::CircleBundle { .. } => 1,
            DeformedModel::Mobius { .. } => 2,
            DeformedModel::Product { .. } => 1,
        }
    }
}

/// D + m·c(h) on the given model. `fiber` overrides the default Cl(1,1)
/// fiber of the circle bundle or the Cl(2,2) fiber of the product model; the
/// Möbius model has a fixed fiber.
pub fn deformed_operator(
    model: &DeformedModel,
    section: &SectionProfile,
    m: f64,
    fiber: Option<&GradedModule>,
) -> Result<LatticeOperator, SpectralError> {
    section.certify()?;
    match model {
        DeformedModel::CircleBundle { points } => {
            if section.domain != SectionDomain::Circle {
                return Err(SpectralError::Section("circle bundle needs a section on the circle".into()));
            }
            let default = v1_module();
            let fiber = fiber.unwrap_or(&default);
            twisted_axes(
                ModelKind::TrivialCircle,
                vec![Axis::circle(section.length, *points, 1.0, Some(section.profile.clone()))],
                m,
                fiber,
                1,
                section,
                0,
            )
        }
        DeformedModel::Product { circle_length, circle_points, half_width, points } => {
            if section.domain != SectionDomain::Line {
                return Err(SpectralError::Section("product model needs a section on the line".into()));
            }
            let default = vn_module(2);
            let fiber = fiber.unwrap_or(&default);
            let axes = vec![
                Axis::circle(*circle_length, *circle_points, 1.0, None),
                Axis::open(*half_width, *points, Some(section.profile.clone())),
            ];
            twisted_axes(ModelKind::Product, axes, m, fiber, 2, section, 1)
        }
        DeformedModel::Mobius { points } => {
            if fiber.is_some() {
                return Err(SpectralError::Fiber("the Möbius model has a fixed fiber".into()));
            }
            mobius_operator(*points, m, section)
        }
    }
}

fn twisted_axes(
    kind: ModelKind,
    axes: Vec<Axis>,
    m: f64,
    fiber: &GradedModule,
    pairs: usize,
    section: &SectionProfile,
    section_axis: usize,
) -> Result<LatticeOperator, SpectralError> {
    let sig = fiber.signature();
    if sig.l < pairs || sig.m < pairs {
        return Err(SpectralError::Fiber(format!("{sig} module lacks {pairs} tangent/bundle generator pairs")));
    }
    let reduced = reduce_pairs(fiber, pairs).map_err(|e| SpectralError::Fiber(e.to_string()))?;
    let st = build_staggered(&axes, m);
    let n = axes.len();
    let z = (0..st.dim()).map(|i| section.distance(st.coord(i)[section_axis])).collect();
    let fiber_dim = reduced.dim();
    Ok(LatticeOperator {
        kind,
        scalar: st.operator(),
        grading: st.grading.clone(),
        multiplicity: Multiplicity::of(&reduced),
        parts: st.parts.clone(),
        sector: st.sector.clone(),
        coords: st.coords.clone(),
        coord_dim: n,
        z,
        reference: None,
        m,
        grid: None,
        fiber_dim,
        predicted_kernel: section.zeros.len() * fiber_dim,
        symbol_norm: operator_norm(fiber.gen(sig.l + pairs - 1)),
        dh_sup: section.profile.dh_sup(),
        description: json!({
            "model": kind, "m": m, "axes": axes.iter().map(Axis::to_json).collect::<Vec<_>>(),
            "section": section.to_json(), "fiber_signature": sig.to_string(),
        }),
        axes,
    })
}

/// Möbius model. Sections over the base are deck-invariant sections over the
/// double cover of length 2L; the deck shift by L moves integer site j to
/// half site j + M (N = 2M + 1 sites) and exchanges the two fiber lines, so
/// an invariant section is determined by its integer-site values u. The
/// lattice mass terms are deck-equivariant only up to O(h²), so K is the
/// symmetrized compression ½(D_uw P + Pᵀ D_wu); it is antisymmetric of odd size and is
/// presented graded as K ⊗ η on ℝᴺ ⊗ ℝ^{1|1}, η the odd swap.
fn mobius_operator(points: usize, m: f64, section: &SectionProfile) -> Result<LatticeOperator, SpectralError> {
    if section.domain != SectionDomain::MobiusCover {
        return Err(SpectralError::Section("Möbius model needs a section on the double cover".into()));
    }
    if points < 3 || points % 2 == 0 {
        return Err(SpectralError::BadRequest(format!("Möbius model needs an odd N ≥ 3 (got {points})")));
    }
    let l = section.length;
    for k in 0..16 {
        let t = k as f64 * l / 16.0;
        if (section.profile.eval(t + l) + section.profile.eval(t)).abs() > 1e-12 {
            return Err(SpectralError::Section("section is not odd under the deck shift".into()));
        }
    }
    let half = (points - 1) / 2;
    let axis = Axis::circle(2.0 * l, points, 1.0, Some(section.profile.clone()));
    let st = build_staggered(std::slice::from_ref(&axis), m);
    let d = st.operator();
    // w_k = u_{k−M}: half site k is the deck image of integer site k − M
    let partner = |k: usize| (k + points - half) % points;
    let mut t = Vec::new();
    for (i, j, v) in d.triplets() {
        // D_uw P: row i integer, column j half
        if i < points && j >= points {
            t.push((i, partner(j - points), 0.5 * v));
        }
        // Pᵀ D_wu: row i half, column j integer
        if i >= points && j < points {
            t.push((partner(i - points), j, 0.5 * v));
        }
    }
    let k = SparseOp::from_triplets(points, t);
    let mut graded = Vec::new();
    for (i, j, v) in k.triplets() {
        graded.push((2 * i, 2 * j + 1, v));
        graded.push((2 * i + 1, 2 * j, v));
    }
    let scalar = SparseOp::from_triplets(2 * points, graded);
    let coords: Vec<f64> = (0..points).flat_map(|j| [st.coord(j)[0]; 2]).collect();
    let z = coords.iter().map(|&t| section.distance(t)).collect();
    Ok(LatticeOperator {
        kind: ModelKind::Mobius,
        grading: (0..2 * points).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
        multiplicity: Multiplicity { even: 1, odd: 0 },
        parts: vec![],
        sector: vec![0; 2 * points],
        coord_dim: 1,
        coords,
        z,
        reference: None,
        m,
        grid: None,
        fiber_dim: 2,
        predicted_kernel: 2 * section.zeros.len(),
        symbol_norm: 1.0,
        dh_sup: section.profile.dh_sup(),
        description: json!({"model": "mobius", "m": m, "N": points, "section": section.to_json()}),
        axes: vec![axis],
        scalar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fiber1(m: f64, points: usize) -> LatticeOperator {
        fiber_operator(1, m, Grid::new(1, 10.0, points).unwrap(), &default_fiber(1)).unwrap()
    }

    #[test]
    fn fiber_operator_is_antisymmetric_and_odd() {
        let op = fiber1(1.0, 41);
        assert_eq!(op.antisymmetry_defect(), 0.0);
        assert_eq!(op.grading_defect(), 0.0);
        assert_eq!(op.multiplicity, Multiplicity { even: 1, odd: 1 });
        assert_eq!(op.dim(), (41 + 40) * 2);
        assert_eq!(op.matrix().antisymmetry_defect(), 0.0);
    }

    #[test]
    fn fiber_without_bundle_action_is_rejected() {
        let g = Grid::new(1, 10.0, 11).unwrap();
        let err = fiber_operator(1, 1.0, g, &regular_module(Signature::new(1, 0))).unwrap_err();
        assert!(matches!(err, SpectralError::Fiber(_)));
        assert!(fiber_operator(2, 1.0, Grid::new(2, 10.0, 11).unwrap(), &v1_module()).is_err());
    }

    #[test]
    fn grid_needs_odd_points() {
        assert!(Grid::new(1, 10.0, 10).is_err());
        assert!(Grid::new(1, 10.0, 1).is_err());
        assert!((Grid::new(1, 10.0, 2001).unwrap().spacing() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn product_model_splits_exactly() {
        let model = DeformedModel::Product { circle_length: 2.0 * PI, circle_points: 16, half_width: 4.0, points: 21 };
        let op = deformed_operator(&model, &SectionProfile::on_line(Profile::Linear), 2.0, None).unwrap();
        assert_eq!(op.parts.len(), 2);
        assert_eq!(op.split_anticommutator(), 0.0);
        assert_eq!(op.antisymmetry_defect(), 0.0);
    }

    #[test]
    fn non_transverse_sections_are_rejected() {
        let s = SectionProfile::on_circle(Profile::OneMinusCos, 2.0 * PI);
        let model = DeformedModel::CircleBundle { points: 64 };
        assert!(matches!(deformed_operator(&model, &s, 5.0, None), Err(SpectralError::Section(_))));
        assert!(SectionProfile::on_circle(Profile::Sin { omega: 1.0 }, 2.0 * PI).is_transverse());
    }

    #[test]
    fn mobius_compression_is_antisymmetric_with_odd_kernel() {
        let s = SectionProfile::mobius(2.0 * PI);
        let op = deformed_operator(&DeformedModel::Mobius { points: 41 }, &s, 3.0, None).unwrap();
        assert_eq!(op.antisymmetry_defect(), 0.0);
        assert_eq!(op.grading_defect(), 0.0);
        let sv = op.scalar.to_dense().singular_values();
        assert_eq!(sv.iter().filter(|v| **v < 1e-10).count(), 2);
    }

    #[test]
    fn cutoff_is_monotone_step() {
        assert_eq!(cutoff(0.2), 1.0);
        assert_eq!(cutoff(0.7), 0.0);
        let mut last = 1.0;
        for k in 0..50 {
            let v = cutoff(0.5 + k as f64 / 300.0);
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn circle_distance_wraps() {
        let s = SectionProfile::on_circle(Profile::Sin { omega: 1.0 }, 2.0 * PI);
        assert_eq!(s.zeros.len(), 2);
        assert!((s.distance(2.0 * PI - 0.1) - 0.1).abs() < 1e-12);
        assert!((s.distance(PI + 0.2) - 0.2).abs() < 1e-12);
    }
}
