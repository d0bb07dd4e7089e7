use rayon::prelude::*;

use shallowwell_core::greens::{divergent_block, e4_finite_beta};
use shallowwell_core::oracles::{exact_poschl_teller, exact_square_well, shooting_solve};
use shallowwell_core::perturbation::{e4, Rational};
use shallowwell_core::resummation::{pade_shifted, pade_with_asymptote, PadeApproximant};
use shallowwell_core::variational::{minimize, TrialKind};
use shallowwell_core::{energy_series, EnergySeries, GridSpec, Potential, QuadratureGrid, Shape};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::{Cell, Report, Table};

/// Series of the unit square well, `a = 1`.
const SQUARE_WELL_SERIES: [(i64, i64); 5] = [(-1, 1), (4, 3), (-92, 45), (1072, 315), (-84752, 14175)];

/// Largest integer halfwidth for which the exact column is printed.
const MAX_EXACT_HALFWIDTH: i64 = 10;

fn unit_potential(cfg: &RunConfig) -> CliResult<Potential> {
    Ok(cfg.potential.build()?.with_strength(1.0)?)
}

fn grid_for(cfg: &RunConfig, p: &Potential) -> CliResult<QuadratureGrid> {
    let spec = match cfg.grid {
        Some(g) => g,
        None => QuadratureGrid::default_spec(p)?,
    };
    Ok(QuadratureGrid::from_spec(spec)?)
}

fn describe_grid(g: GridSpec) -> String {
    format!("{},{},{}", g.halfwidth, g.panels, g.nodes_per_panel)
}

/// `c_n(a) = c_n(1) a^{2n-2}`, for integer `a`.
fn exact_square_well_coefficient(n: usize, halfwidth: f64) -> Option<Rational> {
    if halfwidth.fract() != 0.0 || !(1.0..=MAX_EXACT_HALFWIDTH as f64).contains(&halfwidth) || !(2..=6).contains(&n) {
        return None;
    }
    let (num, den) = SQUARE_WELL_SERIES[n - 2];
    Some(Rational::new(num * (halfwidth as i64).pow(2 * n as u32 - 2), den))
}

pub fn series(cfg: &RunConfig) -> CliResult<Report> {
    let p = unit_potential(cfg)?;
    let g = grid_for(cfg, &p)?;
    let es = energy_series(&p, cfg.order, &g)?;
    let halfwidth = match p.shape() {
        Shape::SquareWell { halfwidth } => Some(*halfwidth),
        _ => None,
    };
    let mut report = Report::new("series");
    report.meta("shape", p.shape());
    report.meta("grid", describe_grid(g.spec()));
    let mut columns = vec!["n [1]", "coefficient [energy^(1-n)]", "error_estimate [energy^(1-n)]"];
    if halfwidth.is_some() {
        columns.push("exact [energy^(1-n)]");
    }
    let mut t = Table::new("series", &columns);
    for n in 2..=es.order() {
        let mut row = vec![n.into(), es.coefficient(n).into(), es.error_estimates[n].into()];
        if let Some(a) = halfwidth {
            row.push(exact_square_well_coefficient(n, a).map_or(Cell::Missing, |r| Cell::Text(r.to_string())));
        }
        t.push(row);
    }
    report.tables.push(t);
    Ok(report)
}

fn resum(cfg: &RunConfig, es: &EnergySeries, p: &Potential) -> CliResult<PadeApproximant> {
    let depth = cfg.depth.unwrap_or_else(|| p.peak_shape());
    Ok(match cfg.pade_split {
        Some((m, n)) => pade_shifted(es, depth, m, n)?,
        None => pade_with_asymptote(es, depth)?,
    })
}

pub fn pade(cfg: &RunConfig) -> CliResult<Report> {
    let p = unit_potential(cfg)?;
    let g = grid_for(cfg, &p)?;
    let es = energy_series(&p, cfg.order, &g)?;
    let pa = resum(cfg, &es, &p)?;
    let mut report = Report::new("pade");
    report.meta("shape", p.shape());
    report.meta("grid", describe_grid(g.spec()));
    report.meta("split", format!("[{}/{}]", pa.m(), pa.n()));
    let mut t = Table::new("approximant", &["part", "power [1]", "coefficient [energy^(1-power)]"]);
    t.push(vec![Cell::Text("asymptote".into()), 1usize.into(), pa.asymptote.into()]);
    for (k, c) in pa.numerator.iter().enumerate() {
        t.push(vec![Cell::Text("numerator".into()), k.into(), (*c).into()]);
    }
    for (k, c) in pa.denominator.iter().enumerate() {
        t.push(vec![Cell::Text("denominator".into()), k.into(), (*c).into()]);
    }
    report.tables.push(t);
    let mut ev = Table::new("evaluation", &["s [energy]", "pade [energy]", "series [energy]"]);
    for s in cfg.sweep.points() {
        ev.push(vec![s.into(), pa.evaluate(s).ok().into(), es.evaluate(s).into()]);
    }
    report.tables.push(ev);
    Ok(report)
}

pub fn solve(cfg: &RunConfig) -> CliResult<Report> {
    let p = cfg.potential.build()?;
    let r = shooting_solve(&p, cfg.tol)?;
    let exact = match p.shape() {
        Shape::SquareWell { halfwidth } => Some(exact_square_well(p.strength(), *halfwidth)?),
        Shape::PoschlTeller => Some(exact_poschl_teller(p.strength())?),
        _ => None,
    };
    let mut report = Report::new("solve");
    report.meta("shape", p.shape());
    report.meta("strength", p.strength());
    let mut t = Table::new(
        "bound_state",
        &[
            "energy [energy]",
            "residual [1]",
            "iterations [1]",
            "bracket_lo [energy]",
            "bracket_hi [energy]",
            "discretization_error [energy]",
            "exact [energy]",
        ],
    );
    t.push(vec![
        r.energy.into(),
        r.residual.into(),
        r.iterations.into(),
        r.bracket.0.into(),
        r.bracket.1.into(),
        r.discretization_error.into(),
        exact.into(),
    ]);
    report.tables.push(t);
    Ok(report)
}

struct CompareRow {
    series: Option<f64>,
    pade: Option<f64>,
    gaussian: Option<f64>,
    exp_sqrt: Option<f64>,
    shooting: Option<f64>,
    reasons: Vec<String>,
}

pub fn compare(cfg: &RunConfig) -> CliResult<Report> {
    let p = unit_potential(cfg)?;
    let g = grid_for(cfg, &p)?;
    let es = energy_series(&p, cfg.order, &g)?;
    let pa = resum(cfg, &es, &p);
    let rows: Vec<CompareRow> = cfg
        .sweep
        .points()
        .into_par_iter()
        .map(|s| {
            let mut reasons = Vec::new();
            let mut keep = |label: &str, r: Result<f64, String>| match r {
                Ok(v) => Some(v),
                Err(e) => {
                    reasons.push(format!("{label}: {e}"));
                    None
                }
            };
            let well = p.with_strength(s).map_err(|e| e.to_string());
            let pade = match &pa {
                Ok(pa) => keep("pade", pa.evaluate(s).map_err(|e| e.to_string())),
                Err(e) => keep("pade", Err(e.to_string())),
            };
            let var = |kind| {
                well.clone()
                    .and_then(|w| minimize(kind, &w, &g).map(|r| r.energy).map_err(|e| e.to_string()))
            };
            let gaussian = keep("var_gaussian", var(TrialKind::Gaussian));
            let exp_sqrt = keep("var_expsqrt", var(TrialKind::ExpSqrt));
            let shooting = keep(
                "shooting",
                well.clone()
                    .and_then(|w| shooting_solve(&w, cfg.tol).map(|r| r.energy).map_err(|e| e.to_string())),
            );
            CompareRow {
                series: Some(es.evaluate(s)),
                pade,
                gaussian,
                exp_sqrt,
                shooting,
                reasons,
            }
        })
        .collect();

    let mut report = Report::new("compare");
    report.meta("shape", p.shape());
    report.meta("grid", describe_grid(g.spec()));
    report.meta("order", es.order());
    let mut t = Table::new(
        "compare",
        &[
            "s [energy]",
            "series [energy]",
            "pade [energy]",
            "var_gaussian [energy]",
            "var_expsqrt [energy]",
            "shooting [energy]",
            "reason",
        ],
    );
    let mut complete = 0;
    for (s, r) in cfg.sweep.points().into_iter().zip(rows) {
        if r.reasons.is_empty() {
            complete += 1;
        }
        t.push(vec![
            s.into(),
            r.series.into(),
            r.pade.into(),
            r.gaussian.into(),
            r.exp_sqrt.into(),
            r.shooting.into(),
            Cell::Text(r.reasons.join("; ")),
        ]);
    }
    report.tables.push(t);
    if complete == 0 {
        report.failure = Some("no sweep point succeeded".into());
    }
    Ok(report)
}

fn block_grid(cfg: &RunConfig, p: &Potential) -> CliResult<QuadratureGrid> {
    let spec = match cfg.block_grid {
        Some(g) => g,
        None => GridSpec {
            halfwidth: match p.compact_support() {
                Some(a) => a,
                None => p.support_radius(1e-6)?,
            },
            panels: 6,
            nodes_per_panel: 8,
        },
    };
    Ok(QuadratureGrid::from_spec(spec)?)
}

pub fn greens_check(cfg: &RunConfig) -> CliResult<Report> {
    let p = unit_potential(cfg)?;
    let g = grid_for(cfg, &p)?;
    let exact = e4(&p, &g)?;
    let residuals: Vec<(f64, CliResult<f64>)> = cfg
        .betas
        .par_iter()
        .map(|&b| (b, e4_finite_beta(&p, &g, b).map_err(CliError::from)))
        .collect();
    let mut report = Report::new("greens-check");
    report.meta("shape", p.shape());
    report.meta("grid", describe_grid(g.spec()));
    let mut t = Table::new(
        "finite_beta",
        &["beta [1/length]", "e4_finite_beta [energy^-3]", "e4 [energy^-3]", "residual [energy^-3]"],
    );
    for (b, r) in residuals {
        let v = r?;
        t.push(vec![b.into(), v.into(), exact.into(), (v - exact).into()]);
    }
    report.tables.push(t);

    let bg = block_grid(cfg, &p)?;
    let blk = divergent_block(&p, &bg, cfg.block_beta)?;
    report.meta("block_grid", describe_grid(bg.spec()));
    let mut d = Table::new(
        "divergent_block",
        &[
            "beta [1/length]",
            "unsymmetrized [energy^-3]",
            "symmetrized [energy^-3]",
            "magnitude [energy^-3]",
        ],
    );
    d.push(vec![
        cfg.block_beta.into(),
        blk.unsymmetrized.into(),
        blk.symmetrized.into(),
        blk.magnitude.into(),
    ]);
    report.tables.push(d);
    Ok(report)
}
