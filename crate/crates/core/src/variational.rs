//! Rayleigh–Ritz upper bounds from one- and two-parameter trial states.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quadrature::QuadratureGrid;

/// `ψ²` is integrated out to where it has dropped by `e^{-2·TAIL_EXPONENT}`.
const TAIL_EXPONENT: f64 = 40.0;
const PSI_NODES: usize = 16;

pub const ALPHA_LADDER: [f64; 4] = [0.05, 0.2, 1.0, 5.0];
pub const BETA_LADDER: [f64; 3] = [0.2, 1.0, 5.0];

/// Simplex size (in log-parameters) at which a restart counts as converged.
pub const SIMPLEX_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrialKind {
    /// `e^{-αx²}`.
    Gaussian,
    /// `e^{-α√(β²+x²)}`.
    ExpSqrt,
}

impl TrialKind {
    pub fn parameter_count(self) -> usize {
        match self {
            TrialKind::Gaussian => 1,
            TrialKind::ExpSqrt => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrialFamily {
    Gaussian { alpha: f64 },
    ExpSqrt { alpha: f64, beta: f64 },
}

impl TrialFamily {
    pub fn gaussian(alpha: f64) -> Result<Self> {
        Self::new(TrialKind::Gaussian, &[alpha])
    }

    pub fn exp_sqrt(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(TrialKind::ExpSqrt, &[alpha, beta])
    }

    /// Requires `α > 0` and, for the second family, `β ≥ 0`.
    pub fn new(kind: TrialKind, params: &[f64]) -> Result<Self> {
        if params.len() != kind.parameter_count() {
            return Err(Error::LengthMismatch {
                expected: kind.parameter_count(),
                got: params.len(),
            });
        }
        let alpha = params[0];
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("α must be positive, got {alpha}")));
        }
        match kind {
            TrialKind::Gaussian => Ok(TrialFamily::Gaussian { alpha }),
            TrialKind::ExpSqrt => {
                let beta = params[1];
                if !(beta.is_finite() && beta >= 0.0) {
                    return Err(Error::InvalidArgument(format!("β must be nonnegative, got {beta}")));
                }
                Ok(TrialFamily::ExpSqrt { alpha, beta })
            }
        }
    }

    pub fn kind(&self) -> TrialKind {
        match self {
            TrialFamily::Gaussian { .. } => TrialKind::Gaussian,
            TrialFamily::ExpSqrt { .. } => TrialKind::ExpSqrt,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            TrialFamily::Gaussian { alpha } => vec![alpha],
            TrialFamily::ExpSqrt { alpha, beta } => vec![alpha, beta],
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            TrialFamily::Gaussian { alpha } => (-alpha * x * x).exp(),
            // shifted by αβ so that ψ(0) = 1 for any β
            TrialFamily::ExpSqrt { alpha, beta } => (-alpha * ((beta * beta + x * x).sqrt() - beta)).exp(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            TrialFamily::Gaussian { alpha } => -2.0 * alpha * x * self.value(x),
            TrialFamily::ExpSqrt { alpha, beta } => {
                let r = (beta * beta + x * x).sqrt();
                if r == 0.0 {
                    0.0
                } else {
                    -alpha * x / r * self.value(x)
                }
            }
        }
    }

    /// Where `ψ` has fallen to `e^{-TAIL_EXPONENT}`.
    fn extent(&self) -> f64 {
        match *self {
            TrialFamily::Gaussian { alpha } => (TAIL_EXPONENT / alpha).sqrt(),
            TrialFamily::ExpSqrt { alpha, beta } => {
                let r = beta + TAIL_EXPONENT / alpha;
                (r * r - beta * beta).sqrt()
            }
        }
    }

    /// Length on which `ψ` varies fastest near the origin.
    fn core_scale(&self) -> f64 {
        match *self {
            TrialFamily::Gaussian { alpha } => alpha.sqrt().recip(),
            TrialFamily::ExpSqrt { alpha, beta } => {
                if beta > 0.0 {
                    beta.min(alpha.recip())
                } else {
                    alpha.recip()
                }
            }
        }
    }

    /// Panels graded geometrically away from the origin, out to the extent
    /// of `ψ`.
    pub fn grid(&self) -> Result<QuadratureGrid> {
        let r = self.extent();
        if !(r.is_finite() && r > 0.0 && r < 1e12) {
            return Err(Error::NonNormalizable);
        }
        let mut half = vec![0.0];
        let mut x = (self.core_scale() / 16.0).min(r / 64.0);
        while x < r {
            half.push(x);
            x *= 1.3;
        }
        for k in 1..=64 {
            half.push(r * k as f64 / 64.0);
        }
        half.sort_by(f64::total_cmp);
        half.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * r);
        let mut edges: Vec<f64> = half.iter().rev().map(|x| -x).collect();
        edges.pop();
        edges.extend(half);
        QuadratureGrid::from_edges(edges, PSI_NODES)
    }
}

/// `(∫ψ'² + ∫Vψ²)/∫ψ²`, with the kinetic term and norm integrated on
/// `psi_grid` and the potential term on `g`.
pub fn quotient(
    psi: impl Fn(f64) -> f64,
    dpsi: impl Fn(f64) -> f64,
    psi_grid: &QuadratureGrid,
    p: &Potential,
    g: &QuadratureGrid,
) -> Result<f64> {
    let norm = psi_grid.integrate_fn(|x| psi(x).powi(2));
    if !(norm.is_finite() && norm > f64::MIN_POSITIVE) {
        return Err(Error::NonNormalizable);
    }
    let kinetic = psi_grid.integrate_fn(|x| dpsi(x).powi(2));
    let potential = g.integrate_fn(|x| p.evaluate(x) * psi(x).powi(2));
    Ok((kinetic + potential) / norm)
}

pub fn rayleigh_quotient(tf: &TrialFamily, p: &Potential, g: &QuadratureGrid) -> Result<f64> {
    quotient(|x| tf.value(x), |x| tf.derivative(x), &tf.grid()?, p, g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalResult {
    pub trial: TrialFamily,
    pub energy: f64,
    /// Restarts whose simplex shrank below [`SIMPLEX_TOL`].
    pub converged_restarts: usize,
}

struct Restart {
    x: Vec<f64>,
    f: f64,
    size: f64,
    converged: bool,
}

fn simplex_size(simplex: &[Vec<f64>]) -> f64 {
    simplex[1..]
        .iter()
        .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// Standard Nelder–Mead (reflection 1, expansion 2, contraction ½, shrink ½).
fn nelder_mead(f: &impl Fn(&[f64]) -> f64, start: Vec<f64>, step: f64) -> Restart {
    let n = start.len();
    let mut simplex = vec![start.clone()];
    for i in 0..n {
        let mut v = start.clone();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect() };
    for _ in 0..MAX_ITERATIONS {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let size = simplex_size(&simplex);
        let spread = values[n] - values[0];
        if size < SIMPLEX_TOL || (spread.abs() <= 1e-15 * values[0].abs().max(1e-300) && size < 1e-5) {
            return Restart {
                x: simplex[0].clone(),
                f: values[0],
                size,
                converged: true,
            };
        }
        let centroid: Vec<f64> = (0..n).map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        let reflected = combine(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = combine(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[n] {
            let c = combine(&centroid, &reflected, 0.5);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = combine(&centroid, &worst, 0.5);
            let fc = f(&c);
            (c, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            simplex[i] = combine(&simplex[0], &simplex[i], 0.5);
            values[i] = f(&simplex[i]);
        }
    }
    let size = simplex_size(&simplex);
    let best = (0..=n).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap_or(0);
    Restart {
        x: simplex[best].clone(),
        f: values[best],
        size,
        converged: false,
    }
}

/// Minimizes the Rayleigh quotient over the family, restarting from every
/// point of the `α × β` ladder. Parameters are optimized in log space.
pub fn minimize(kind: TrialKind, p: &Potential, g: &QuadratureGrid) -> Result<VariationalResult> {
    let objective = |logs: &[f64]| -> f64 {
        let params: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
        TrialFamily::new(kind, &params)
            .and_then(|tf| rayleigh_quotient(&tf, p, g))
            .unwrap_or(f64::INFINITY)
    };
    let starts: Vec<Vec<f64>> = match kind {
        TrialKind::Gaussian => ALPHA_LADDER.iter().map(|a| vec![a.ln()]).collect(),
        TrialKind::ExpSqrt => ALPHA_LADDER
            .iter()
            .flat_map(|a| BETA_LADDER.iter().map(move |b| vec![a.ln(), b.ln()]))
            .collect(),
    };
    let runs: Vec<Restart> = starts.into_par_iter().map(|s| nelder_mead(&objective, s, 0.5)).collect();
    let converged_restarts = runs.iter().filter(|r| r.converged).count();
    if converged_restarts == 0 {
        let size = runs.iter().map(|r| r.size).fold(f64::INFINITY, f64::min);
        return Err(Error::OptimizerStalled { size });
    }
    // best value, ties broken by the parameters themselves
    let best = runs
        .iter()
        .filter(|r| r.f.is_finite())
        .min_by(|a, b| {
            a.f.total_cmp(&b.f).then_with(|| {
                a.x.iter()
                    .zip(&b.x)
                    .map(|(u, v)| u.total_cmp(v))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        })
        .ok_or(Error::NonNormalizable)?;
    let params: Vec<f64> = best.x.iter().map(|l| l.exp()).collect();
    Ok(VariationalResult {
        trial: TrialFamily::new(kind, &params)?,
        energy: best.f,
        converged_restarts,
    })
}
