//! Near-zero spectra of lattice operators.

use nalgebra::DMatrix;
use serde::Serialize;

use super::eigen::{smallest_magnitude, EigenOptions, Method, SpectralError};
use super::models::{LatticeOperator, ModelKind, Multiplicity, CUTOFF_INNER};

/// Relative floor below which eigenvalues are numerically zero before the
/// gap-relative threshold is applied.
const ZERO_FLOOR: f64 = 1e-9;
/// Kernel threshold relative to the reported gap.
pub const KERNEL_RELATIVE: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub model: ModelKind,
    pub dim: usize,
    pub scalar_dim: usize,
    pub multiplicity: Multiplicity,
    pub fiber_dim: usize,
    pub predicted_kernel: usize,
    pub requested: usize,
    /// Eigenvalues of γD sorted by magnitude; their magnitudes are the
    /// singular values of D.
    pub eigenvalues: Vec<f64>,
    /// Mass of each eigenvector inside |z| ≤ 1/2.
    pub mass_inside: Vec<f64>,
    /// Mass of each eigenvector weighted by ρ².
    pub cutoff_mass: Vec<f64>,
    pub kernel_dim: usize,
    pub even_kernel_dim: usize,
    pub mod2_index: u8,
    /// Smallest magnitude above the kernel threshold, if any was computed.
    pub gap: Option<f64>,
    pub threshold: f64,
    pub ground_overlap: Option<f64>,
    /// Smallest inside-mass among kernel vectors.
    pub concentration: Option<f64>,
    /// max over listed nonzero eigenvalues of the distance to the nearest
    /// negated partner, excluding the outermost magnitude.
    pub pairing_defect: f64,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
    pub norm: f64,
}

impl SpectralReport {
    pub fn nonzero_count(&self) -> usize {
        self.eigenvalues.len() - self.kernel_dim
    }

    /// Count of listed eigenvalues with |λ| < bound.
    pub fn count_below(&self, bound: f64) -> usize {
        self.eigenvalues.iter().filter(|v| v.abs() < bound).count()
    }
}

/// Eigenvectors of the scalar block, with the data needed for the report.
#[derive(Clone, Debug)]
pub struct ScalarSpectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub norm: f64,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
}

/// k eigenpairs of the scalar block S₀ = γ₀D₀.
pub fn scalar_spectrum(op: &LatticeOperator, k: usize, opts: &EigenOptions) -> Result<ScalarSpectrum, SpectralError> {
    let s = op.scalar.left_diag(&op.grading);
    let e = smallest_magnitude(&s, k, opts)?;
    Ok(ScalarSpectrum {
        values: e.values,
        vectors: e.vectors,
        norm: e.norm,
        method: e.method,
        iterations: e.iterations,
        residual: e.residual,
    })
}

/// The k smallest-magnitude eigenvalues of the full operator. Every scalar
/// eigenvalue μ appears once per even multiplicity line and −μ once per odd
/// line, since γ = γ₀ ⊗ γ'.
pub fn spectrum(op: &LatticeOperator, k: usize, opts: &EigenOptions) -> Result<SpectralReport, SpectralError> {
    if k == 0 {
        return Err(SpectralError::BadRequest("k must be at least 1".into()));
    }
    let mult = op.multiplicity;
    if mult.total() == 0 {
        return Err(SpectralError::Fiber("empty multiplicity space".into()));
    }
    let k = k.min(op.dim());
    let ks = k.div_ceil(mult.total()).min(op.scalar.n);
    let sc = scalar_spectrum(op, ks, opts)?;
    Ok(report_from(op, &sc, k))
}

pub fn report_from(op: &LatticeOperator, sc: &ScalarSpectrum, k: usize) -> SpectralReport {
    let mult = op.multiplicity;
    let floor = ZERO_FLOOR * sc.norm;
    let inside: Vec<f64> = (0..sc.values.len()).map(|c| mass_where(op, sc, c, |z| z <= CUTOFF_INNER)).collect();
    let rho: Vec<f64> = op.cutoff();
    let weighted: Vec<f64> = (0..sc.values.len())
        .map(|c| sc.vectors.column(c).iter().zip(&rho).map(|(v, r)| v * v * r * r).sum())
        .collect();

    // replicate: (value, scalar column, is even line)
    let mut rows: Vec<(f64, usize, bool)> = Vec::new();
    for (c, &mu) in sc.values.iter().enumerate() {
        rows.extend(std::iter::repeat((mu, c, true)).take(mult.even));
        rows.extend(std::iter::repeat((-mu, c, false)).take(mult.odd));
    }
    rows.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
    rows.truncate(k);

    let gap = rows.iter().map(|r| r.0.abs()).find(|v| *v > floor);
    let threshold = gap.map_or(floor, |g| KERNEL_RELATIVE * g);
    let kernel_cols: Vec<usize> = (0..sc.values.len()).filter(|&c| sc.values[c].abs() <= threshold).collect();
    let kernel_dim = rows.iter().filter(|r| r.0.abs() <= threshold).count();

    // even part of the kernel: trace of γ₀ on the scalar kernel, then γ'
    let (mut even_s, mut odd_s) = (0usize, 0usize);
    if !kernel_cols.is_empty() {
        let basis = DMatrix::from_fn(op.scalar.n, kernel_cols.len(), |i, c| sc.vectors[(i, kernel_cols[c])]);
        let trace: f64 = (0..basis.ncols())
            .map(|c| basis.column(c).iter().zip(&op.grading).map(|(v, g)| v * v * g).sum::<f64>())
            .sum();
        let t = trace.round() as i64;
        let d = kernel_cols.len() as i64;
        even_s = ((d + t) / 2) as usize;
        odd_s = ((d - t) / 2) as usize;
    }
    let even_kernel_dim = even_s * mult.even + odd_s * mult.odd;

    let ground_overlap = op.reference.as_ref().filter(|_| !kernel_cols.is_empty()).map(|g| {
        kernel_cols
            .iter()
            .map(|&c| sc.vectors.column(c).iter().zip(g).map(|(v, r)| v * r).sum::<f64>().powi(2))
            .sum::<f64>()
            .sqrt()
            .min(1.0)
    });
    let concentration = kernel_cols.iter().map(|&c| inside[c]).reduce(f64::min);

    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    SpectralReport {
        model: op.kind,
        dim: op.dim(),
        scalar_dim: op.scalar.n,
        multiplicity: mult,
        fiber_dim: op.fiber_dim,
        predicted_kernel: op.predicted_kernel,
        requested: k,
        mass_inside: rows.iter().map(|r| inside[r.1]).collect(),
        cutoff_mass: rows.iter().map(|r| weighted[r.1]).collect(),
        kernel_dim,
        even_kernel_dim,
        mod2_index: (even_kernel_dim % 2) as u8,
        gap,
        threshold,
        ground_overlap,
        concentration,
        pairing_defect: pairing_defect(&values, threshold, 1e-8 * sc.norm.max(1.0)),
        eigenvalues: values,
        method: sc.method,
        iterations: sc.iterations,
        residual: sc.residual,
        norm: sc.norm,
    }
}

fn mass_where(op: &LatticeOperator, sc: &ScalarSpectrum, c: usize, pred: impl Fn(f64) -> bool) -> f64 {
    sc.vectors.column(c).iter().zip(&op.z).filter(|(_, z)| pred(**z)).map(|(v, _)| v * v).sum()
}

fn pairing_defect(values: &[f64], threshold: f64, tol: f64) -> f64 {
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0f64;
    for &v in values {
        if v.abs() <= threshold || v.abs() > top - tol {
            continue;
        }
        let best = values.iter().map(|w| (v + w).abs()).fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    worst
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::witten::lattice::{Profile, SparseOp};
    use crate::witten::models::*;

    fn opts() -> EigenOptions {
        EigenOptions::default()
    }

    fn fiber1(m: f64, points: usize) -> LatticeOperator {
        fiber_operator(1, m, Grid::new(1, 10.0, points).unwrap(), &default_fiber(1)).unwrap()
    }

    #[test]
    fn zero_operator_is_all_kernel() {
        let mut op = fiber1(1.0, 5);
        op.scalar = SparseOp::zero(op.scalar.n);
        let r = spectrum(&op, op.dim(), &opts()).unwrap();
        assert_eq!(r.kernel_dim, op.dim());
        assert_eq!(r.gap, None);
    }

    #[test]
    fn fiber_model_ground_state_and_gap() {
        let r = spectrum(&fiber1(1.0, 401), 6, &opts()).unwrap();
        assert_eq!(r.kernel_dim, 2);
        assert_eq!(r.kernel_dim + r.nonzero_count(), r.requested);
        assert!((r.gap.unwrap() - 2f64.sqrt()).abs() < 0.01 * 2f64.sqrt());
        assert!(r.ground_overlap.unwrap() >= 0.999);
        assert!(r.pairing_defect < 1e-8);
        assert_eq!(r.even_kernel_dim, 1);
    }

    #[test]
    fn undeformed_spectrum_is_symmetric() {
        let r = spectrum(&fiber1(0.0, 101), 12, &opts()).unwrap();
        assert!(r.pairing_defect < 1e-9);
    }

    #[test]
    fn direct_sum_doubles_multiset() {
        let op = fiber1(1.0, 61);
        let single = spectrum(&op, 6, &opts()).unwrap();
        let double = spectrum(&op.direct_sum(&op), 12, &opts()).unwrap();
        for (k, v) in single.eigenvalues.iter().enumerate() {
            let hits = double.eigenvalues.iter().filter(|w| (w.abs() - v.abs()).abs() < 1e-9).count();
            let own = single.eigenvalues.iter().filter(|w| (w.abs() - v.abs()).abs() < 1e-9).count();
            assert!(hits >= 2 * own.min(3), "eigenvalue {k}");
        }
        assert_eq!(double.kernel_dim, 2 * single.kernel_dim);
    }

    #[test]
    fn circle_spin_structures() {
        let fiber = default_circle_fiber();
        let lie = spectrum(&circle_operator(CircleSpin::Lie, 64, 2.0 * PI, &fiber).unwrap(), 4, &opts()).unwrap();
        assert_eq!(lie.kernel_dim, fiber.dim());
        assert_eq!(lie.mod2_index, 1);
        let bnd = spectrum(&circle_operator(CircleSpin::Bounding, 64, 2.0 * PI, &fiber).unwrap(), 4, &opts()).unwrap();
        assert_eq!(bnd.kernel_dim, 0);
        assert_eq!(bnd.mod2_index, 0);
        // smallest antiperiodic mode has frequency π/L
        assert!((bnd.gap.unwrap() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn trivial_circle_two_zero_section() {
        let s = SectionProfile::on_circle(Profile::Sin { omega: 1.0 }, 2.0 * PI);
        let op = deformed_operator(&DeformedModel::CircleBundle { points: 400 }, &s, 20.0, None).unwrap();
        let r = spectrum(&op, 6, &opts()).unwrap();
        assert_eq!(r.count_below(0.5), 2 * op.fiber_dim);
    }

    #[test]
    fn constant_section_has_no_small_eigenvalues() {
        let s = SectionProfile::on_circle(Profile::Constant(1.0), 2.0 * PI);
        let op = deformed_operator(&DeformedModel::CircleBundle { points: 200 }, &s, 5.0, None).unwrap();
        assert_eq!(spectrum(&op, 4, &opts()).unwrap().count_below(0.5), 0);
    }

    #[test]
    fn mobius_model_index() {
        let s = SectionProfile::mobius(2.0 * PI);
        let op = deformed_operator(&DeformedModel::Mobius { points: 401 }, &s, 20.0, None).unwrap();
        let r = spectrum(&op, 6, &opts()).unwrap();
        assert_eq!(r.kernel_dim, op.fiber_dim);
        assert_eq!(r.mod2_index, 1);
    }
}
