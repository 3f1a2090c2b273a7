//! Numerical experiments on the lattice models: the square decomposition of
//! the fiber operator, convergence order, and localization under large
//! deformation.

use serde::Serialize;
use serde_json::Value;

use super::eigen::{EigenOptions, SpectralError};
use super::models::{
    default_fiber, deformed_operator, fiber_operator, DeformedModel, Grid, LatticeOperator, ModelKind, SectionProfile,
};
use super::spectrum::{report_from, scalar_spectrum, spectrum, SpectralReport};

#[derive(Clone, Debug, Serialize)]
pub struct SquareCheck {
    pub h: f64,
    /// max |D²f − (Δf − m²|x|²f + m n f)| on interior integer sites, with Δf exact.
    pub continuum_residual: f64,
    /// Same with the lattice Laplacian in place of Δ.
    pub lattice_residual: f64,
    /// max |D²f| off the integer sublattice.
    pub cross_sector_max: f64,
    /// max |D_i D_j + D_j D_i| over axis parts.
    pub split_anticommutator: f64,
}

/// Applies D² to f = exp(−|x|²/2) on the integer sublattice, where every
/// c_i c'_i acts by +1, and compares with −H + m Σ c_i c'_i.
pub fn square_decomposition_check(op: &LatticeOperator) -> Result<SquareCheck, SpectralError> {
    let grid = match (op.kind, op.grid) {
        (ModelKind::Fiber, Some(g)) => g,
        _ => return Err(SpectralError::BadRequest("square decomposition needs a fiber operator".into())),
    };
    let n = grid.n;
    let h = grid.spacing();
    let m = op.m;
    let gauss = |x: &[f64]| (-x.iter().map(|v| v * v).sum::<f64>() / 2.0).exp();
    let f: Vec<f64> = (0..op.scalar.n).map(|i| if op.sector[i] == 0 { gauss(op.coord(i)) } else { 0.0 }).collect();
    let y = op.scalar.apply(&op.scalar.apply(&f));
    let mut check = SquareCheck {
        h,
        continuum_residual: 0.0,
        lattice_residual: 0.0,
        cross_sector_max: 0.0,
        split_anticommutator: op.split_anticommutator(),
    };
    let edge = grid.r - 2.0 * h + 1e-9;
    for i in 0..op.scalar.n {
        if op.sector[i] != 0 {
            check.cross_sector_max = check.cross_sector_max.max(y[i].abs());
            continue;
        }
        let x = op.coord(i);
        if x.iter().any(|v| v.abs() > edge) {
            continue;
        }
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let fx = f[i];
        let potential = -m * m * r2 * fx + m * n as f64 * fx;
        let exact = (r2 - n as f64) * fx + potential;
        let mut lap = 0.0;
        let mut p = x.to_vec();
        for a in 0..n {
            p[a] = x[a] + h;
            let up = gauss(&p);
            p[a] = x[a] - h;
            let down = gauss(&p);
            p[a] = x[a];
            lap += (up - 2.0 * fx + down) / (h * h);
        }
        check.continuum_residual = check.continuum_residual.max((y[i] - exact).abs());
        check.lattice_residual = check.lattice_residual.max((y[i] - lap - potential).abs());
    }
    Ok(check)
}

/// Fiber operator with the default fiber and its report, with enough
/// eigenvalues requested to see the kernel and the first excited level.
pub fn fiber_report(n: usize, m: f64, r: f64, points: usize, opts: &EigenOptions) -> Result<(LatticeOperator, SpectralReport), SpectralError> {
    let op = fiber_operator(n, m, Grid::new(n, r, points)?, &default_fiber(n))?;
    let k = op.predicted_kernel + 2 * op.multiplicity.total();
    let report = spectrum(&op, k, opts)?;
    Ok((op, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct RichardsonReport {
    pub points: Vec<usize>,
    pub spacings: Vec<f64>,
    /// Smallest positive singular values per grid.
    pub values: Vec<Vec<f64>>,
    /// (λ_h − λ_{h/2}) / (λ_{h/2} − λ_{h/4}) for each tracked value; `None`
    /// when the value is reproduced to rounding on every grid.
    pub ratios: Vec<Option<f64>>,
    /// Ratio of successive square-decomposition residuals.
    pub residual_ratios: Vec<f64>,
}

impl RichardsonReport {
    /// Second-order convergence: every measurable ratio within [3.5, 4.5],
    /// with at least one eigenvalue ratio measurable.
    pub fn second_order(&self) -> bool {
        let order = |r: &f64| (3.5..=4.5).contains(r);
        self.ratios.iter().flatten().all(order)
            && self.ratios.iter().any(Option::is_some)
            && self.residual_ratios.iter().all(order)
    }
}

/// Tracks the `count` smallest nonzero singular values of the n = 1 fiber
/// operator over three grids with halving spacing.
pub fn richardson(m: f64, r: f64, points: [usize; 3], count: usize, opts: &EigenOptions) -> Result<RichardsonReport, SpectralError> {
    let mut values = Vec::new();
    let mut spacings = Vec::new();
    let mut residuals = Vec::new();
    for &p in &points {
        let op = fiber_operator(1, m, Grid::new(1, r, p)?, &default_fiber(1))?;
        let sc = scalar_spectrum(&op, 2 * count + 3, opts)?;
        let floor = 1e-6 * sc.norm;
        let mut pos: Vec<f64> = sc.values.iter().filter(|v| **v > floor).copied().collect();
        pos.sort_by(f64::total_cmp);
        pos.truncate(count);
        values.push(pos);
        spacings.push(op.grid.map_or(0.0, |g| g.spacing()));
        residuals.push(square_decomposition_check(&op)?.continuum_residual);
    }
    let ratios = (0..count)
        .map(|j| {
            let (a, b, c) = (values[0][j], values[1][j], values[2][j]);
            let exact = (a - b).abs().max((b - c).abs()) <= 1e-10 * c.abs();
            (!exact).then(|| (a - b) / (b - c))
        })
        .collect();
    let residual_ratios = vec![residuals[0] / residuals[1], residuals[1] / residuals[2]];
    Ok(RichardsonReport { points: points.to_vec(), spacings, values, ratios, residual_ratios })
}

/// Gap of the n = 1, m = 1 fiber model; the model value is √2.
pub fn model_gap_constant(opts: &EigenOptions) -> Result<f64, SpectralError> {
    let (_, report) = fiber_report(1, 1.0, 10.0, 401, opts)?;
    report.gap.ok_or_else(|| SpectralError::IllPosed("fiber model shows no gap".into()))
}

/// A_h(m, λ) = 2(m C₀ ‖dh‖∞ + λ²)/m².
pub fn a_h(m: f64, lambda: f64, c0: f64, dh_sup: f64) -> f64 {
    2.0 * (m * c0 * dh_sup + lambda * lambda) / (m * m)
}

/// B_h = (1 − √A_h)².
pub fn b_h(a: f64) -> f64 {
    (1.0 - a.sqrt()).powi(2)
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalizationRow {
    pub m: f64,
    /// Eigenvalues with |λ| below the window.
    pub count: usize,
    /// Smallest inside-mass among the low eigenvectors.
    pub concentration: f64,
    /// Largest mass outside |z| ≤ 1/2 among the low eigenvectors.
    pub outside_mass: f64,
    pub a_h: f64,
    pub b_h: f64,
    /// Smallest ‖ρφ‖² among the low eigenvectors (φ normalized).
    pub rho_mass: f64,
    /// Smallest magnitude at or above the window.
    pub gap_above: Option<f64>,
    pub outside_within_a_h: bool,
    pub rho_above_b_h: bool,
    pub gap_bound_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalizationTable {
    pub model: DeformedModel,
    pub section: Value,
    pub lambda: f64,
    pub lambda_c: f64,
    /// Near-kernel dimension predicted from the zero locus.
    pub dim_h: usize,
    pub c0: f64,
    pub dh_sup: f64,
    pub rows: Vec<LocalizationRow>,
}

impl LocalizationTable {
    pub fn counts_match(&self) -> bool {
        self.rows.iter().all(|r| r.count == self.dim_h)
    }

    pub fn stabilized(&self) -> bool {
        self.rows.last().is_some_and(|r| r.count == self.dim_h)
    }

    pub fn inequalities_hold(&self) -> bool {
        self.rows.iter().all(|r| r.outside_within_a_h && r.rho_above_b_h && r.gap_bound_holds)
    }
}

/// Counts eigenvalues in (−λ, λ) for each m and measures how the low
/// eigenvectors concentrate near the zero locus.
pub fn localization_experiment(
    model: &DeformedModel,
    section: &SectionProfile,
    m_list: &[f64],
    lambda: f64,
    opts: &EigenOptions,
) -> Result<LocalizationTable, SpectralError> {
    if matches!(model, DeformedModel::Product { .. }) {
        return Err(SpectralError::IllPosed("localization runs on the circle models".into()));
    }
    if m_list.is_empty() || m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpectralError::IllPosed("m values must be strictly increasing".into()));
    }
    if !(lambda > 0.0) || m_list[0] <= lambda {
        return Err(SpectralError::IllPosed(format!("need 0 < λ < min m (λ = {lambda}, min m = {})", m_list[0])));
    }
    let lambda_c = model_gap_constant(opts)?;
    if lambda >= lambda_c {
        return Err(SpectralError::IllPosed(format!("λ = {lambda} is not below the model gap {lambda_c:.6}")));
    }
    section.certify()?;
    let dim_h = section.zeros.len() * model.fiber_dim();
    let mut rows = Vec::new();
    let (mut c0, mut dh_sup) = (0.0, section.profile.dh_sup());
    for &m in m_list {
        let op = deformed_operator(model, section, m, None)?;
        c0 = op.symbol_norm;
        dh_sup = op.dh_sup;
        let mult = op.multiplicity.total();
        let mut k = dim_h + 2 * mult + 2;
        let report = loop {
            let sc = scalar_spectrum(&op, k.div_ceil(mult), opts)?;
            let report = report_from(&op, &sc, k);
            if report.count_below(lambda) < report.eigenvalues.len() || k >= op.dim() {
                break report;
            }
            k *= 2;
        };
        let low: Vec<usize> = (0..report.eigenvalues.len()).filter(|&i| report.eigenvalues[i].abs() < lambda).collect();
        let concentration = low.iter().map(|&i| report.mass_inside[i]).fold(1.0, f64::min);
        let rho_mass = low.iter().map(|&i| report.cutoff_mass[i]).fold(1.0, f64::min);
        let a = a_h(m, lambda, c0, dh_sup);
        let b = b_h(a);
        let gap_above = report.eigenvalues.iter().map(|v| v.abs()).filter(|v| *v >= lambda).reduce(f64::min);
        rows.push(LocalizationRow {
            m,
            count: low.len(),
            concentration,
            outside_mass: 1.0 - concentration,
            a_h: a,
            b_h: b,
            rho_mass,
            gap_above,
            outside_within_a_h: 1.0 - concentration <= a,
            rho_above_b_h: rho_mass >= b,
            gap_bound_holds: m < lambda_c || gap_above.is_some_and(|g| g >= 0.9 * lambda_c),
        });
    }
    Ok(LocalizationTable { model: model.clone(), section: section.to_json(), lambda, lambda_c, dim_h, c0, dh_sup, rows })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::witten::lattice::Profile;

    fn opts() -> EigenOptions {
        EigenOptions::default()
    }

    #[test]
    fn undeformed_square_is_the_lattice_laplacian() {
        let op = fiber_operator(1, 0.0, Grid::new(1, 6.0, 121).unwrap(), &default_fiber(1)).unwrap();
        let c = square_decomposition_check(&op).unwrap();
        assert!(c.lattice_residual < 1e-10, "{}", c.lattice_residual);
        assert_eq!(c.cross_sector_max, 0.0);
    }

    #[test]
    fn square_residual_is_second_order() {
        let res: Vec<f64> = [101, 201, 401]
            .iter()
            .map(|&p| {
                let op = fiber_operator(1, 1.0, Grid::new(1, 8.0, p).unwrap(), &default_fiber(1)).unwrap();
                square_decomposition_check(&op).unwrap().continuum_residual
            })
            .collect();
        for w in res.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn two_dimensional_square_has_no_cross_terms() {
        let op = fiber_operator(2, 1.0, Grid::new(2, 5.0, 21).unwrap(), &default_fiber(2)).unwrap();
        let c = square_decomposition_check(&op).unwrap();
        assert!(c.cross_sector_max < 1e-14);
        assert_eq!(c.split_anticommutator, 0.0);
        assert!(c.continuum_residual < 10.0 * c.h * c.h);
    }

    #[test]
    fn eigenvalues_converge_at_second_order() {
        let r = richardson(1.0, 10.0, [101, 201, 401], 3, &opts()).unwrap();
        assert!(r.second_order(), "{:?} {:?} {:?}", r.values, r.ratios, r.residual_ratios);
        // the first excited level is reproduced exactly by the staggered scheme
        assert_eq!(r.ratios[0], None);
    }

    #[test]
    fn localization_rejects_large_window() {
        let s = SectionProfile::on_circle(Profile::Sin { omega: 1.0 }, 2.0 * PI);
        let model = DeformedModel::CircleBundle { points: 100 };
        assert!(matches!(localization_experiment(&model, &s, &[5.0], 1.5, &opts()), Err(SpectralError::IllPosed(_))));
        assert!(localization_experiment(&model, &s, &[10.0, 5.0], 0.5, &opts()).is_err());
    }

    #[test]
    fn empty_zero_locus_has_no_low_modes() {
        let s = SectionProfile::on_circle(Profile::Constant(1.0), 2.0 * PI);
        let model = DeformedModel::CircleBundle { points: 200 };
        let t = localization_experiment(&model, &s, &[5.0, 10.0], 0.5, &opts()).unwrap();
        assert_eq!(t.dim_h, 0);
        assert!(t.rows.iter().all(|r| r.count == 0));
    }

    #[test]
    fn a_h_decays() {
        assert!(a_h(20.0, 0.5, 1.0, 1.0) < a_h(5.0, 0.5, 1.0, 1.0));
        assert_eq!(b_h(0.0), 1.0);
    }
}
