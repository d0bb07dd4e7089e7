//! Padé resummation of the weak-coupling series.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::perturbation::EnergySeries;

/// Reciprocal condition number below which the Padé system counts as singular.
pub const SINGULAR_RCOND: f64 = 1e-12;

/// `α s + p(s)/q(s)` with `q(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PadeApproximant {
    /// `p₀ … p_m`.
    pub numerator: Vec<f64>,
    /// `1, q₁ … q_n`.
    pub denominator: Vec<f64>,
    pub asymptote: f64,
}

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * s + ci)
}

impl PadeApproximant {
    pub fn m(&self) -> usize {
        self.numerator.len() - 1
    }

    pub fn n(&self) -> usize {
        self.denominator.len() - 1
    }

    pub fn evaluate(&self, s: f64) -> Result<f64> {
        let p = horner(&self.numerator, s);
        let q = horner(&self.denominator, s);
        let scale: f64 = self
            .numerator
            .iter()
            .enumerate()
            .map(|(i, c)| c.abs() * s.abs().powi(i as i32))
            .sum();
        if q == 0.0 || q.abs() < 1e-12 * scale {
            return Err(Error::PoleAtEvaluation { s });
        }
        Ok(self.asymptote * s + p / q)
    }

    /// Taylor coefficients of `α s + p/q` through `s^order`.
    pub fn taylor(&self, order: usize) -> Vec<f64> {
        // t = p/q  =>  t_k = p_k - Σ_{j≥1} q_j t_{k-j}
        let mut t = vec![0.0; order + 1];
        for k in 0..=order {
            let mut v = self.numerator.get(k).copied().unwrap_or(0.0);
            for j in 1..=self.n().min(k) {
                v -= self.denominator[j] * t[k - j];
            }
            t[k] = v;
        }
        if order >= 1 {
            t[1] += self.asymptote;
        }
        t
    }
}

/// 1-norm reciprocal condition number of a square matrix, `None` when it
/// cannot be inverted at all.
fn rcond(a: &DMatrix<f64>) -> Option<f64> {
    let norm1 = |m: &DMatrix<f64>| m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let inv = a.clone().lu().try_inverse()?;
    let r = 1.0 / (norm1(a) * norm1(&inv));
    r.is_finite().then_some(r)
}

/// `[m/n]` Padé approximant of `Σ c_k s^k` from `c₀ … c_{m+n}`; further
/// coefficients are ignored.
pub fn pade(coefficients: &[f64], m: usize, n: usize) -> Result<PadeApproximant> {
    if coefficients.len() <= m + n {
        return Err(Error::LengthMismatch {
            expected: m + n + 1,
            got: coefficients.len(),
        });
    }
    let coefficients = &coefficients[..=m + n];
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("non-finite series coefficient".into()));
    }
    let c = |k: isize| if k < 0 { 0.0 } else { coefficients[k as usize] };
    let mut q = vec![1.0];
    if n > 0 {
        // Σ_{j=1}^{n} q_j c_{k-j} = -c_k,  k = m+1 … m+n
        let a = DMatrix::from_fn(n, n, |r, j| c((m + 1 + r) as isize - (j + 1) as isize));
        let rc = rcond(&a).unwrap_or(0.0);
        if rc < SINGULAR_RCOND {
            return Err(Error::SingularPade { rcond: rc });
        }
        let rhs = nalgebra::DVector::from_fn(n, |r, _| -c((m + 1 + r) as isize));
        let sol = a.lu().solve(&rhs).ok_or(Error::SingularPade { rcond: rc })?;
        q.extend(sol.iter());
    }
    let p = (0..=m)
        .map(|k| (0..=n.min(k)).map(|j| q[j] * c((k - j) as isize)).sum())
        .collect();
    Ok(PadeApproximant {
        numerator: p,
        denominator: q,
        asymptote: 0.0,
    })
}

/// Padé of the series with the deep-well line `-depth·s` split off:
/// `E ≈ -depth·s + [m/n](E_series + depth·s)`.
pub fn pade_shifted(es: &EnergySeries, depth_coefficient: f64, m: usize, n: usize) -> Result<PadeApproximant> {
    if es.order() < m + n {
        return Err(Error::InvalidArgument(format!(
            "[{m}/{n}] needs coefficients through order {}, series stops at {}",
            m + n,
            es.order()
        )));
    }
    let alpha = -depth_coefficient;
    let mut shifted: Vec<f64> = (0..=m + n).map(|k| es.coefficient(k)).collect();
    shifted[1] -= alpha;
    let mut pa = pade(&shifted, m, n)?;
    pa.asymptote = alpha;
    Ok(pa)
}

/// The default diagonal split: `[3/3]` for a sixth-order series.
pub fn pade_with_asymptote(es: &EnergySeries, depth_coefficient: f64) -> Result<PadeApproximant> {
    let order = es.order();
    let m = order.div_ceil(2);
    pade_shifted(es, depth_coefficient, m, order - m)
}

pub fn evaluate_pade(pa: &PadeApproximant, s: f64) -> Result<f64> {
    pa.evaluate(s)
}
