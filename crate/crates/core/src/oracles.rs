//! Reference energies that do not go through the perturbation series.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::potential::{Potential, DEFAULT_EPS_TAIL};
use crate::quadrature::QuadratureGrid;

/// Ground state of `V = -s` on `|x| < a`: solves the even matching condition
/// `k tan(ka) = κ`, `k² + κ² = s`, by bisection on `k` to machine precision.
pub fn exact_square_well(s: f64, a: f64) -> Result<f64> {
    if !(s.is_finite() && s > 0.0 && a.is_finite() && a > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "square well needs s > 0 and a > 0, got s = {s}, a = {a}"
        )));
    }
    let root_s = s.sqrt();
    let mut lo = 0.0;
    let mut hi = root_s.min(0.5 * PI / a);
    // f(k) = k tan(ka) - √(s - k²) rises from -√s
    let f = |k: f64| k * (k * a).tan() - (s - k * k).max(0.0).sqrt();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    // κ from the tangent side avoids the cancellation in s - k²
    let kappa = k * (k * a).tan();
    Ok(-kappa * kappa)
}

/// `E = -κ²` with `κ = (√(1+4s) - 1)/2` for `V = -s/cosh²x`.
pub fn exact_poschl_teller(s: f64) -> Result<f64> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidArgument(format!("strength must be positive, got {s}")));
    }
    let kappa = 2.0 * s / ((1.0 + 4.0 * s).sqrt() + 1.0);
    Ok(-kappa * kappa)
}

/// Steps per side used by [`shooting_solve`] at the coarse resolution.
pub const SHOOTING_STEPS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundStateResult {
    pub energy: f64,
    /// `|W̃(E)|` of the normalized Wronskian at the returned root.
    pub residual: f64,
    pub iterations: usize,
    /// `(E_lo, E_hi)` holding exactly one eigenvalue.
    pub bracket: (f64, f64),
    /// `|E(h) - E(h/2)|`; zero for a single-resolution solve.
    pub discretization_error: f64,
}

/// Fixed-step RK4 integrator for `u'' = (V - E) u` on `[-L, L]`, with `V`
/// tabulated on the half-step lattice.
#[derive(Debug, Clone)]
pub struct Shooter {
    halfwidth: f64,
    steps: usize,
    /// `V` at `-L + j h/2`, `j = 0 ..= 4 steps`.
    v: Vec<f64>,
    v_min: f64,
}

impl Shooter {
    /// `steps` RK4 steps on each half-line. `L` is the support of compact
    /// wells and the tail radius otherwise.
    pub fn new(p: &Potential, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("need at least one step".into()));
        }
        let halfwidth = match p.compact_support() {
            Some(c) => c,
            None => p.support_radius(DEFAULT_EPS_TAIL)?,
        };
        let h = halfwidth / steps as f64;
        let v = (0..=4 * steps)
            .map(|j| p.evaluate(-halfwidth + j as f64 * 0.5 * h))
            .collect();
        Ok(Self {
            halfwidth,
            steps,
            v,
            v_min: p.min_value(),
        })
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    /// Integrates from lattice index `from` (half-step units) over `n`
    /// steps in direction `dir`, counting sign changes of `u` on the way.
    fn integrate(&self, energy: f64, from: usize, n: usize, forward: bool, mut y: [f64; 2]) -> ([f64; 2], usize) {
        let h = self.halfwidth / self.steps as f64 * if forward { 1.0 } else { -1.0 };
        let f = |vj: f64, y: [f64; 2]| [y[1], (vj - energy) * y[0]];
        let mut nodes = 0;
        let mut j = from;
        for _ in 0..n {
            let (v0, vm, v1) = if forward {
                (self.v[j], self.v[j + 1], self.v[j + 2])
            } else {
                (self.v[j], self.v[j - 1], self.v[j - 2])
            };
            let k1 = f(v0, y);
            let k2 = f(vm, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = f(vm, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = f(v1, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            let next = [
                y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            ];
            if next[0] == 0.0 || next[0].signum() != y[0].signum() {
                nodes += 1;
            }
            y = next;
            let scale = y[0].abs().max(y[1].abs());
            if scale > 1e100 {
                y = [y[0] / scale, y[1] / scale];
            }
            j = if forward { j + 2 } else { j - 2 };
        }
        (y, nodes)
    }

    fn kappa(energy: f64) -> f64 {
        (-energy).max(0.0).sqrt()
    }

    /// Normalized Wronskian of the decaying left and right solutions at
    /// `x = 0`. Bounded by one and free of poles; zero at eigenvalues.
    pub fn matching(&self, energy: f64) -> f64 {
        let kappa = Self::kappa(energy);
        let n = self.steps;
        let (l, _) = self.integrate(energy, 0, n, true, [1.0, kappa]);
        let (r, _) = self.integrate(energy, 4 * n, n, false, [1.0, -kappa]);
        let norm = |y: [f64; 2]| (y[0] * y[0] + y[1] * y[1] / (kappa * kappa)).sqrt();
        (l[0] * r[1] - l[1] * r[0]) / (kappa * norm(l) * norm(r))
    }

    /// Nodes of the left solution continued over the whole line: the number
    /// of eigenvalues below `energy`.
    pub fn node_count(&self, energy: f64) -> usize {
        let kappa = Self::kappa(energy);
        let (y, nodes) = self.integrate(energy, 0, 2 * self.steps, true, [1.0, kappa]);
        // past L, u = u(L) cosh κt + u'(L)/κ sinh κt vanishes once more when
        // it is heading down faster than it could decay
        nodes + usize::from(y[0] * y[1] < 0.0 && y[1].abs() > kappa * y[0].abs())
    }

    /// Ground state: bracket by node count, then bisect the matching
    /// function to machine precision.
    pub fn solve(&self, tol: f64) -> Result<BoundStateResult> {
        let mut lo = self.v_min;
        let mut hi = self.v_min.abs() * -1e-12;
        if !(lo < hi) || self.node_count(hi) == 0 {
            return Err(Error::BracketFailure { lo, hi });
        }
        let mut iterations = 0;
        // shrink until the bracket holds only the ground state
        while self.node_count(hi) > 1 {
            let mid = 0.5 * (lo + hi);
            if self.node_count(mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
            if iterations > 200 {
                return Err(Error::NoConvergence { iterations });
            }
        }
        let bracket = (lo, hi);
        let (mut a, mut b) = (lo, hi);
        let (mut fa, fb) = (self.matching(a), self.matching(b));
        if fa * fb > 0.0 {
            return Err(Error::BracketFailure { lo, hi });
        }
        loop {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = self.matching(mid);
            iterations += 1;
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fm * fa > 0.0 {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
            if iterations > 400 {
                return Err(Error::NoConvergence { iterations });
            }
        }
        let energy = if self.matching(a).abs() <= self.matching(b).abs() { a } else { b };
        let residual = self.matching(energy).abs();
        if residual > tol.max(1e-12) {
            return Err(Error::NoConvergence { iterations });
        }
        Ok(BoundStateResult {
            energy,
            residual,
            iterations,
            bracket,
            discretization_error: 0.0,
        })
    }
}

/// Ground state by shooting with steps `h = L/4000` and `h/2`, combined by
/// Richardson extrapolation (RK4 converges as `h⁴`).
pub fn shooting_solve(p: &Potential, tol: f64) -> Result<BoundStateResult> {
    let coarse = Shooter::new(p, SHOOTING_STEPS)?.solve(tol)?;
    let fine = Shooter::new(p, 2 * SHOOTING_STEPS)?.solve(tol)?;
    Ok(BoundStateResult {
        energy: (16.0 * fine.energy - coarse.energy) / 15.0,
        residual: fine.residual,
        iterations: coarse.iterations + fine.iterations,
        bracket: fine.bracket,
        discretization_error: (fine.energy - coarse.energy).abs(),
    })
}

/// `∫F` in the fifth-order Gaussian coefficient.
pub fn gaussian_f(x: f64) -> f64 {
    let (e1, e2) = (libm::erf(x), libm::erf(SQRT_2 * x));
    PI.powf(1.5) * (-2.0 * x * x).exp() / 128.0
        * ((x * x).exp() * x * (2.0 * e1 - 1.0) * (4.0 * SQRT_2 * x * e2 - PI.sqrt() * e1 * e1) - 2.0 * e1 * e1)
}

/// `∫G` in the sixth-order Gaussian coefficient.
pub fn gaussian_g(x: f64) -> f64 {
    let (e1, e2) = (libm::erf(x), libm::erf(SQRT_2 * x));
    let (g1, g2, g3) = ((-x * x).exp(), (-2.0 * x * x).exp(), (-3.0 * x * x).exp());
    let pi32 = PI.powf(1.5);
    PI * PI * g1 * x * e1.powi(3) / (64.0 * SQRT_2) + PI * PI * g1 * x * e2 * e1 * e1 / (32.0 * SQRT_2)
        + pi32 * g3 * e1 * e1 / 64.0
        + pi32 * g2 * e1 * e1 / (64.0 * SQRT_2)
        - pi32 * g1 * x * x * e2 * e1 / 16.0
        - pi32 * g1 * x * x * e2 * e2 / 16.0
}

/// `(c₄, c₅, c₆)` of the unit Gaussian from their closed forms, with the
/// `F` and `G` integrals done on `[-10, 10]`.
pub fn gaussian_closed_coefficients() -> (f64, f64, f64) {
    let g = QuadratureGrid::build(10.0, 40, 16).expect("fixed grid is valid");
    let (s2, s3, s5) = (SQRT_2, 3f64.sqrt(), 5f64.sqrt());
    let pi2 = PI * PI;
    let c4 = -(PI / 8.0 + s3 * PI / 8.0 + pi2 / 12.0);
    let c5 = 7.0 * PI / 96.0 + (1.5f64).sqrt() * PI / 8.0 + 3.0 * pi2 / (8.0 * s2) + g.integrate_fn(gaussian_f);
    let c6 = -3.0 * PI / 64.0 - 7.0 * PI / (96.0 * s2) - 7.0 * PI / (96.0 * s5) - 5.0 * pi2 / 16.0
        - pi2 / (64.0 * s3)
        - 7.0 * s3 * pi2 / 64.0
        - 2.0 * PI * pi2 / 45.0
        + g.integrate_fn(gaussian_g);
    (c4, c5, c6)
}

/// Least-squares fit `E(s) ≈ Σ_{n=2}^{degree} c_n s^n` (no constant or
/// linear term). Fits `E/s²` in the scaled variable `s/max s` and returns
/// `c_0 … c_degree`.
pub fn weak_coupling_fit(strengths: &[f64], energies: &[f64], degree: usize) -> Result<Vec<f64>> {
    if strengths.len() != energies.len() {
        return Err(Error::LengthMismatch {
            expected: strengths.len(),
            got: energies.len(),
        });
    }
    if degree < 2 || strengths.len() < degree - 1 {
        return Err(Error::InvalidArgument(format!(
            "need degree >= 2 and at least degree - 1 samples, got degree {degree} with {} samples",
            strengths.len()
        )));
    }
    if strengths.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidArgument("strengths must be positive".into()));
    }
    let scale = strengths.iter().copied().fold(0.0, f64::max);
    let m = degree - 1;
    let a = DMatrix::from_fn(strengths.len(), m, |i, j| (strengths[i] / scale).powi(j as i32));
    let b = DVector::from_iterator(strengths.len(), strengths.iter().zip(energies).map(|(s, e)| e / (s * s)));
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-15)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut c = vec![0.0; degree + 1];
    for j in 0..m {
        c[j + 2] = sol[j] / scale.powi(j as i32);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poschl_teller_closed_form() {
        assert!((exact_poschl_teller(2.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((exact_poschl_teller(6.0).unwrap() + 4.0).abs() < 1e-14);
        let s = 1e-3;
        assert!((exact_poschl_teller(s).unwrap() / (s * s) + 1.0).abs() < 1e-2);
        assert!(exact_poschl_teller(0.0).is_err());
    }

    #[test]
    fn square_well_weak_limit() {
        let s = 1e-3;
        assert!((exact_square_well(s, 1.0).unwrap() / (s * s) + 1.0).abs() < 1e-2);
        // deep well: ka → π/2
        let e = exact_square_well(1e4, 1.0).unwrap();
        let k = (1e4 + e).sqrt();
        assert!((k - 0.5 * PI).abs() < 0.02);
    }

    #[test]
    fn fit_recovers_polynomial() {
        let s: Vec<f64> = (0..=40).map(|i| 0.01 + 0.001 * i as f64).collect();
        let c = [0.0, 0.0, -1.0, 2.0, -5.0, 14.0, -42.0];
        let e: Vec<f64> = s.iter().map(|&x| c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)).collect();
        let fit = weak_coupling_fit(&s, &e, 6).unwrap();
        for (got, want) in fit.iter().zip(c) {
            assert!((got - want).abs() < 1e-6 * want.abs().max(1.0), "{fit:?}");
        }
    }

    #[test]
    fn shooting_rejects_zero_well() {
        let p = Potential::gaussian(0.0).unwrap();
        assert!(matches!(shooting_solve(&p, 1e-10), Err(Error::BracketFailure { .. })));
    }
}
