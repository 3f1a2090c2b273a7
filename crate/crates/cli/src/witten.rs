//! `witten` subcommands: lattice spectra and localization tables.

use std::f64::consts::PI;

use clap::{Args, Subcommand, ValueEnum};
use kolocal_core::witten::experiments::{fiber_report, localization_experiment, richardson, LocalizationTable};
use kolocal_core::witten::models::{default_circle_fiber, default_fiber};
use kolocal_core::witten::{
    circle_operator, deformed_operator, fiber_operator, spectrum, square_decomposition_check, CircleSpin, DeformedModel, Grid,
    LatticeOperator, Profile, SectionProfile, SpectralReport,
};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::format_float;
use crate::{Failure, Outcome, Table};

/// Lattice grid flags; unset values fall back to the config file, then to
/// built-in defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct GridArgs {
    /// Number of transverse axes.
    #[arg(long)]
    n: Option<usize>,
    /// Deformation parameter.
    #[arg(long)]
    m: Option<f64>,
    /// Half-width of the box [-R, R]^n (default 10/√m).
    #[arg(long = "R")]
    r: Option<f64>,
    /// Sites per axis.
    #[arg(long = "N")]
    points: Option<usize>,
}

impl GridArgs {
    fn n(&self, cfg: &RunConfig) -> usize {
        self.n.or(cfg.grid.n).unwrap_or(1)
    }

    fn m(&self, cfg: &RunConfig) -> f64 {
        self.m.or(cfg.grid.m).unwrap_or(1.0)
    }

    fn r(&self, cfg: &RunConfig) -> f64 {
        let m = self.m(cfg);
        self.r.or(cfg.grid.r).unwrap_or_else(|| Grid::default_radius(m))
    }

    fn points(&self, cfg: &RunConfig, default: usize) -> usize {
        self.points.or(cfg.grid.points).unwrap_or(default)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SpinArg {
    Lie,
    Bounding,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModelArg {
    /// Trivial line bundle over the circle.
    Circle,
    /// Möbius bundle over the circle.
    Mobius,
    /// S¹_Lie × ℝ with the section on the line.
    Product,
}

/// `sin`, `sin:<ω>`, `linear`, `one-minus-cos` or `const:<c>`.
fn parse_profile(s: &str) -> Result<Profile, String> {
    let (head, arg) = s.split_once(':').map_or((s, None), |(h, a)| (h, Some(a)));
    let num = |a: Option<&str>, default: f64| -> Result<f64, String> {
        a.map_or(Ok(default), |x| x.trim().parse::<f64>().map_err(|_| format!("bad number in {s:?}")))
    };
    match head.trim() {
        "sin" => Ok(Profile::Sin { omega: num(arg, 1.0)? }),
        "linear" | "x" => Ok(Profile::Linear),
        "one-minus-cos" => Ok(Profile::OneMinusCos),
        "const" => Ok(Profile::Constant(num(arg, 1.0)?)),
        _ => Err(format!("unknown section profile {s:?} (sin[:w], linear, one-minus-cos, const[:c])")),
    }
}

#[derive(Subcommand, Debug)]
pub enum WittenCmd {
    /// Harmonic fiber model on [-R, R]^n with the fiber V_n ⊗̂ V_n.
    Fiber {
        #[command(flatten)]
        grid: GridArgs,
        /// Number of eigenvalues (default: kernel plus the first excited level).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Dirac operator on a circle with the Lie or bounding spin structure.
    Circle {
        #[arg(long, value_enum, default_value = "lie")]
        spin: SpinArg,
        #[arg(long = "N", default_value_t = 64)]
        points: usize,
        #[arg(long, default_value_t = 2.0 * PI)]
        length: f64,
    },
    /// Deformed operator D + m c(h) for a section h.
    Deformed {
        #[arg(long, value_enum, default_value = "circle")]
        model: ModelArg,
        #[arg(long, value_parser = parse_profile, default_value = "sin")]
        section: Profile,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 2.0 * PI)]
        length: f64,
        /// Circle sites of the product model.
        #[arg(long, default_value_t = 32)]
        circle_points: usize,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Eigenvalue count in (-λ, λ) and concentration for several m.
    Localize {
        #[arg(long, value_enum, default_value = "circle")]
        model: ModelArg,
        #[arg(long, value_parser = parse_profile, default_value = "sin")]
        section: Profile,
        #[arg(long = "N")]
        points: Option<usize>,
        #[arg(long, default_value_t = 2.0 * PI)]
        length: f64,
        #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
        m_list: Vec<f64>,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Grid-refinement ratios of the n = 1 fiber spectrum.
    Richardson {
        #[arg(long)]
        m: Option<f64>,
        #[arg(long = "R")]
        r: Option<f64>,
        #[arg(long = "N-list", value_delimiter = ',', default_value = "101,201,401")]
        points: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// D² = -Δ + m²|x|² - m(grading) residuals on the fiber Gaussian.
    Square {
        #[command(flatten)]
        grid: GridArgs,
    },
}

fn spectrum_tables(stem: &str, r: &SpectralReport) -> Vec<Table> {
    let rows = r
        .eigenvalues
        .iter()
        .zip(&r.mass_inside)
        .enumerate()
        .map(|(i, (e, w))| vec![i.to_string(), format_float(*e), format_float(*w)])
        .collect();
    vec![Table { file: format!("{stem}.csv"), header: vec!["index", "eigenvalue", "mass_inside"], rows }]
}

fn spectrum_text(op: &LatticeOperator, r: &SpectralReport) -> String {
    let gap = r.gap.map_or("none".into(), format_float);
    let overlap = r.ground_overlap.map_or("-".into(), format_float);
    format!(
        "{}\ndim {} (scalar {} x multiplicity {})\nkernel {} (predicted {}), mod-2 index {}\ngap {gap}, threshold {}\nground overlap {overlap}\nmethod {:?}, {} iterations",
        op.description,
        r.dim,
        r.scalar_dim,
        r.multiplicity.total(),
        r.kernel_dim,
        r.predicted_kernel,
        r.mod2_index,
        format_float(r.threshold),
        r.method,
        r.iterations
    )
}

fn spectrum_outcome(stem: &str, op: &LatticeOperator, r: SpectralReport, extra: Value) -> Outcome {
    let mut doc = serde_json::to_value(&r).unwrap_or(Value::Null);
    doc["operator"] = json!({ "description": op.description, "m": op.m, "grid": op.grid, "symbol_norm": op.symbol_norm });
    if let Value::Object(extra) = extra {
        for (k, v) in extra {
            doc[k] = v;
        }
    }
    let mut out = Outcome::new(stem, doc).with_text(spectrum_text(op, &r));
    out.tables = spectrum_tables(stem, &r);
    out
}

fn section_for(model: ModelArg, profile: &Profile, length: f64) -> SectionProfile {
    match model {
        ModelArg::Circle => SectionProfile::on_circle(profile.clone(), length),
        ModelArg::Mobius => SectionProfile::mobius(length),
        ModelArg::Product => SectionProfile::on_line(profile.clone()),
    }
}

fn model_for(model: ModelArg, points: usize, length: f64, half_width: f64, circle_points: usize) -> DeformedModel {
    match model {
        ModelArg::Circle => DeformedModel::CircleBundle { points },
        ModelArg::Mobius => DeformedModel::Mobius { points },
        ModelArg::Product => DeformedModel::Product { circle_length: length, circle_points, half_width, points },
    }
}

fn localization_text(t: &LocalizationTable) -> String {
    let mut s = format!(
        "lambda {} (lambda_C {}), dim H = {}, C0 {}\n   m  count  outside   A_h      rho_mass  B_h      gap_above\n",
        format_float(t.lambda),
        format_float(t.lambda_c),
        t.dim_h,
        format_float(t.c0)
    );
    for r in &t.rows {
        s.push_str(&format!(
            "{:>5} {:>5}  {:<8.5} {:<8.5} {:<8.5}  {:<8.5} {}\n",
            r.m,
            r.count,
            r.outside_mass,
            r.a_h,
            r.rho_mass,
            r.b_h,
            r.gap_above.map_or("-".into(), |g| format!("{g:.5}"))
        ));
    }
    s.push_str(&format!("counts match: {}, inequalities hold: {}", t.counts_match(), t.inequalities_hold()));
    s
}

pub fn run(cmd: &WittenCmd, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let opts = &cfg.eigen;
    match cmd {
        WittenCmd::Fiber { grid, k } => {
            let n = grid.n(cfg);
            let (m, r) = (grid.m(cfg), grid.r(cfg));
            let points = grid.points(cfg, if n == 1 { 401 } else { 101 });
            let (op, report) = match k {
                None => fiber_report(n, m, r, points, opts)?,
                Some(k) => {
                    let op = fiber_operator(n, m, Grid::new(n, r, points)?, &default_fiber(n))?;
                    let report = spectrum(&op, *k, opts)?;
                    (op, report)
                }
            };
            Ok(spectrum_outcome("witten-fiber", &op, report, json!({})))
        }
        WittenCmd::Circle { spin, points, length } => {
            let spin = match spin {
                SpinArg::Lie => CircleSpin::Lie,
                SpinArg::Bounding => CircleSpin::Bounding,
            };
            let op = circle_operator(spin, *points, *length, &default_circle_fiber())?;
            let report = spectrum(&op, 2 * op.fiber_dim + 2, opts)?;
            let class = kolocal_core::KOClass::mod2(1, report.mod2_index);
            Ok(spectrum_outcome("witten-circle", &op, report, json!({ "ko_class": class.to_json() })))
        }
        WittenCmd::Deformed { model, section, grid, length, circle_points, k } => {
            let points = grid.points(cfg, if matches!(model, ModelArg::Mobius) { 401 } else { 400 });
            let s = section_for(*model, section, *length);
            let dm = model_for(*model, points, *length, grid.r(cfg), *circle_points);
            let op = deformed_operator(&dm, &s, grid.m(cfg), None)?;
            let k = k.unwrap_or(2 * op.predicted_kernel.max(op.fiber_dim) + 2);
            let report = spectrum(&op, k, opts)?;
            Ok(spectrum_outcome("witten-deformed", &op, report, json!({ "model": dm, "section": s.to_json() })))
        }
        WittenCmd::Localize { model, section, points, length, m_list, lambda } => {
            let default_points = if matches!(model, ModelArg::Mobius) { 401 } else { 400 };
            let points = points.or(cfg.grid.points).unwrap_or(default_points);
            let lambda = lambda.or(cfg.grid.lambda).unwrap_or(0.5);
            let s = section_for(*model, section, *length);
            let dm = model_for(*model, points, *length, 0.0, 0);
            let t = localization_experiment(&dm, &s, m_list, lambda, opts)?;
            let text = localization_text(&t);
            let doc = json!({ "table": t, "counts_match": t.counts_match(), "stabilized": t.stabilized(), "inequalities_hold": t.inequalities_hold() });
            let mut out = Outcome::new("witten-localize", doc).with_text(text);
            let col = |f: &dyn Fn(&kolocal_core::witten::experiments::LocalizationRow) -> String| {
                t.rows.iter().map(|r| vec![format_float(r.m), f(r)]).collect::<Vec<_>>()
            };
            out.tables = vec![
                Table { file: "localize-count.csv".into(), header: vec!["m", "count"], rows: col(&|r| r.count.to_string()) },
                Table {
                    file: "localize-concentration.csv".into(),
                    header: vec!["m", "concentration"],
                    rows: col(&|r| format_float(r.concentration)),
                },
            ];
            Ok(out)
        }
        WittenCmd::Richardson { m, r, points, count } => {
            let m = m.or(cfg.grid.m).unwrap_or(1.0);
            let r = r.or(cfg.grid.r).unwrap_or_else(|| Grid::default_radius(m));
            let pts: [usize; 3] =
                points.as_slice().try_into().map_err(|_| Failure::usage("--N-list takes exactly three grid sizes"))?;
            let rep = richardson(m, r, pts, *count, opts)?;
            let doc = json!({ "report": rep, "second_order": rep.second_order() });
            let rows = rep
                .ratios
                .iter()
                .enumerate()
                .map(|(j, x)| vec![j.to_string(), x.map_or("exact".into(), format_float)])
                .collect();
            let mut out = Outcome::new("witten-richardson", doc);
            out.tables = vec![Table { file: "richardson.csv".into(), header: vec!["level", "ratio"], rows }];
            Ok(out)
        }
        WittenCmd::Square { grid } => {
            let n = grid.n(cfg);
            let op = fiber_operator(n, grid.m(cfg), Grid::new(n, grid.r(cfg), grid.points(cfg, 201))?, &default_fiber(n))?;
            let c = square_decomposition_check(&op)?;
            Ok(Outcome::new(
                "witten-square",
                json!({
                    "h": c.h,
                    "continuum_residual": c.continuum_residual,
                    "lattice_residual": c.lattice_residual,
                    "cross_sector_max": c.cross_sector_max,
                    "split_anticommutator": c.split_anticommutator,
                }),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_parse() {
        assert_eq!(parse_profile("sin").unwrap(), Profile::Sin { omega: 1.0 });
        assert_eq!(parse_profile("sin:2").unwrap(), Profile::Sin { omega: 2.0 });
        assert_eq!(parse_profile("const:-1").unwrap(), Profile::Constant(-1.0));
        assert!(parse_profile("cos").is_err());
    }
}
