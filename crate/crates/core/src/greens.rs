//! Green's functions of the regulating delta well `-2β δ(x)`.
//!
//! With `ψ_0 = √β e^{-β|x|}` the bound state and `Ω̂` the reduced resolvent,
//! `𝒢_γ = ⟨x_1|(H_0 - ε_0 + γ)^{-1} Q|x_2⟩` and its Taylor coefficients in
//! `γ` are the kernels `𝒢⁽ℓ⁾ = ⟨x_1|Ω̂^{ℓ+1}|x_2⟩`. The small-`β` forms of
//! `𝒢⁽ℓ⁾` blow up like `β^{-(2ℓ+1)}`; those pieces cancel in the energy, and
//! [`e4_finite_beta`] shows it numerically at fourth order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quadrature::{compensated_sum, CompensatedSum, QuadratureGrid};

/// Largest `ℓ` for which [`greens_expansion`] is available.
pub const MAX_EXPANSION_ORDER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensParams {
    beta: f64,
    gamma: f64,
}

impl GreensParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidArgument(format!("β must be positive, got {beta}")));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("γ must be nonnegative, got {gamma}")));
        }
        Ok(Self { beta, gamma })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `Γ = √(β² + γ)`.
    pub fn big_gamma(&self) -> f64 {
        (self.beta * self.beta + self.gamma).sqrt()
    }
}

/// `ψ_0(x) = √β e^{-β|x|}`.
pub fn bound_state(beta: f64, x: f64) -> f64 {
    beta.sqrt() * (-beta * x.abs()).exp()
}

/// Closed form of `𝒢_γ(x_1, x_2)`:
///
/// ```text
/// e^{-Γ|x_1-x_2|}/(2Γ) + β(Γ+β) e^{-Γ(|x_1|+|x_2|)}/(2Γγ) - β e^{-β(|x_1|+|x_2|)}/γ
/// ```
///
/// The free propagator, its reflection off the well, and the projection
/// onto the bound state. All six sign/ordering regions share this form.
pub fn greens_closed(params: GreensParams, x1: f64, x2: f64) -> Result<f64> {
    let (b, g) = (params.beta, params.gamma);
    if g == 0.0 {
        return Err(Error::DegenerateShift);
    }
    let big = params.big_gamma();
    let d = (x1 - x2).abs();
    let s = x1.abs() + x2.abs();
    // The last two terms cancel as γ → 0. With δ = Γ - β = γ/(Γ+β) they are
    // β e^{-βs} [expm1(-δs)/δ - e^{-δs}/(2Γ)] / (Γ+β).
    let delta = g / (big + b);
    let bracket = (-delta * s).exp_m1() / delta - (-delta * s).exp() / (2.0 * big);
    Ok((-big * d).exp() / (2.0 * big) + b * (-b * s).exp() * bracket / (big + b))
}

/// `(coefficient, power)` of the `|x_1 - x_2|^{2ℓ+1}` term of `𝒢⁽ℓ⁾`, the
/// only non-smooth piece away from the origin.
pub fn expansion_kink(l: usize) -> (f64, u32) {
    match l {
        0 => (-0.5, 1),
        1 => (1.0 / 12.0, 3),
        2 => (-1.0 / 240.0, 5),
        _ => (1.0 / 10080.0, 7),
    }
}

/// Small-`β` expansion of `𝒢⁽ℓ⁾(x_1, x_2)`, from `β^{-(2ℓ+1)}` through `β⁰`.
pub fn greens_expansion(l: usize, beta: f64, x1: f64, x2: f64) -> Result<f64> {
    if l > MAX_EXPANSION_ORDER {
        return Err(Error::InvalidArgument(format!(
            "expansion known for ℓ ≤ {MAX_EXPANSION_ORDER}, got {l}"
        )));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidArgument(format!("β must be positive, got {beta}")));
    }
    Ok(expansion(l, beta, x1, x2))
}

fn expansion(l: usize, b: f64, x: f64, y: f64) -> f64 {
    let (ax, ay) = (x.abs(), y.abs());
    let d = (x - y).abs();
    let (x2, y2) = (x * x, y * y);
    match l {
        0 => 1.0 / (4.0 * b) - 0.25 * (ax + 2.0 * d + ay),
        1 => {
            let b2 = b * b;
            1.0 / (16.0 * b2 * b) - (ax + ay) / (16.0 * b2)
                + (2.0 * ax * ay - 3.0 * x2 + 8.0 * x * y - 3.0 * y2) / (32.0 * b)
                + (8.0 * d * d * d + 3.0 * ay * (3.0 * x2 + y2) + 3.0 * ax * (x2 + 3.0 * y2)) / 96.0
        }
        2 => {
            let (b2, b3) = (b * b, b * b * b);
            let (x4, y4) = (x2 * x2, y2 * y2);
            1.0 / (32.0 * b3 * b2) - (ax + ay) / (32.0 * b2 * b2)
                - (-2.0 * ax * ay + x2 - 4.0 * x * y + y2) / (64.0 * b3)
                + ((ax + 3.0 * ay) * x2 + (3.0 * ax + ay) * y2) / (192.0 * b2)
                + (5.0 * x4 - 24.0 * x2 * x * y + 30.0 * x2 * y2 - 24.0 * x * y2 * y + 5.0 * y4
                    - 4.0 * ax * ay * (x2 + y2))
                    / (768.0 * b)
                + (-16.0 * d.powi(5)
                    - 5.0 * ay * (5.0 * x4 + 10.0 * x2 * y2 + y4)
                    - 5.0 * ax * (x4 + 10.0 * x2 * y2 + 5.0 * y4))
                    / 3840.0
        }
        _ => {
            let (b2, b3, b4) = (b * b, b * b * b, b * b * b * b);
            let (x4, y4, x6, y6) = (x2 * x2, y2 * y2, x2 * x2 * x2, y2 * y2 * y2);
            5.0 / (256.0 * b4 * b3) - 5.0 * (ax + ay) / (256.0 * b3 * b3)
                + (10.0 * ax * ay - 3.0 * x2 + 16.0 * x * y - 3.0 * y2) / (512.0 * b4 * b)
                + ((ax + 3.0 * ay) * x2 + (3.0 * ax + ay) * y2) / (512.0 * b4)
                + (5.0 * x4 - 32.0 * x2 * x * y + 30.0 * x2 * y2 - 32.0 * x * y2 * y + 5.0 * y4
                    - 12.0 * ax * ay * (x2 + y2))
                    / (6144.0 * b3)
                - ((ax + 5.0 * ay) * x4 + 10.0 * (ax + ay) * x2 * y2 + (5.0 * ax + ay) * y4)
                    / (6144.0 * b2)
                + (-7.0 * x6 + 48.0 * x4 * x * y - 105.0 * x4 * y2 + 160.0 * x2 * x * y2 * y
                    - 105.0 * x2 * y4
                    + 48.0 * x * y4 * y
                    - 7.0 * y6
                    + 2.0 * ax * ay * (3.0 * x2 + y2) * (x2 + 3.0 * y2))
                    / (36864.0 * b)
                + (128.0 * d.powi(7)
                    + 35.0 * ay * (7.0 * x6 + 35.0 * x4 * y2 + 21.0 * x2 * y4 + y6)
                    + 35.0 * ax * (x6 + 21.0 * x4 * y2 + 35.0 * x2 * y4 + 7.0 * y6))
                    / 1290240.0
        }
    }
}

/// `(Ω̂^{ℓ+1} u)(x_i) ≈ ∫ 𝒢⁽ℓ⁾(x_i, y) u(y) dy` with the truncated kernel.
/// The kink term goes through the corrected `|x - y|^k` contraction; the
/// remainder is smooth apart from the origin, which the grid must place on
/// a panel edge.
pub fn apply_expansion(l: usize, beta: f64, g: &QuadratureGrid, u: &[f64]) -> Result<Vec<f64>> {
    if l > MAX_EXPANSION_ORDER {
        return Err(Error::InvalidArgument(format!(
            "expansion known for ℓ ≤ {MAX_EXPANSION_ORDER}, got {l}"
        )));
    }
    let (lead, k) = expansion_kink(l);
    let kink = g.apply_abs_power(k, u)?;
    let (x, w) = (g.nodes(), g.weights());
    Ok((0..g.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = CompensatedSum::new();
            for j in 0..x.len() {
                let smooth = expansion(l, beta, x[i], x[j]) - lead * (x[i] - x[j]).abs().powi(k as i32);
                acc.add(w[j] * smooth * u[j]);
            }
            acc.add(lead * kink[i]);
            acc.value()
        })
        .collect())
}

/// Fourth-order energy at finite `β` from the operator form
///
/// ```text
/// ⟨VΩV⟩⟨VΩ²V⟩ + 2⟨V⟩⟨VΩ²VΩV⟩ - ⟨V⟩²⟨VΩ³V⟩ - ⟨VΩVΩVΩV⟩
/// ```
///
/// with `ψ_0` exact and every `Ω̂^{ℓ+1}` replaced by its truncated expansion.
/// The `β^{-k}` pieces cancel between the terms, leaving `e4 + O(β)`.
pub fn e4_finite_beta(p: &Potential, g: &QuadratureGrid, beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidArgument(format!("β must be positive, got {beta}")));
    }
    let x = g.nodes();
    let v = g.sample(p);
    let psi: Vec<f64> = x.iter().map(|&xi| bound_state(beta, xi)).collect();
    let u: Vec<f64> = psi.iter().zip(&v).map(|(a, b)| a * b).collect();
    let dot = |a: &[f64], b: &[f64]| g.integrate_values(&a.iter().zip(b).map(|(x, y)| x * y).collect::<Vec<_>>());
    let times_v = |f: &[f64]| -> Vec<f64> { f.iter().zip(&v).map(|(a, b)| a * b).collect() };

    let om0 = apply_expansion(0, beta, g, &u)?;
    let om1 = apply_expansion(1, beta, g, &u)?;
    let om2 = apply_expansion(2, beta, g, &u)?;
    let a = dot(&u, &om0);
    let b = dot(&u, &om1);
    let c = dot(&u, &psi);
    let d = dot(&u, &apply_expansion(1, beta, g, &times_v(&om0))?);
    let e = dot(&u, &om2);
    let f1 = apply_expansion(0, beta, g, &times_v(&om0))?;
    let f = dot(&u, &apply_expansion(0, beta, g, &times_v(&f1))?);
    Ok(compensated_sum([a * b, 2.0 * c * d, -c * c * e, -f]))
}

/// The `1/β` part of the fourth-order integrand,
/// `V_1 V_2 V_3 V_4 (|x_1-x_2| + |x_2-x_3| - 2|x_3-x_4|) / (32β)`, summed on
/// the four-fold tensor product of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergentBlock {
    /// The integrand as written.
    pub unsymmetrized: f64,
    /// The integrand averaged over all relabelings of the four sites.
    pub symmetrized: f64,
    /// Sum of the absolute values of the three pieces.
    pub magnitude: f64,
}

/// Largest grid accepted by [`divergent_block`]; the cost is `N⁴`.
pub const MAX_TENSOR_NODES: usize = 96;

pub fn divergent_block(p: &Potential, g: &QuadratureGrid, beta: f64) -> Result<DivergentBlock> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidArgument(format!("β must be positive, got {beta}")));
    }
    let n = g.len();
    if n > MAX_TENSOR_NODES {
        return Err(Error::InvalidArgument(format!(
            "tensor evaluation limited to {MAX_TENSOR_NODES} nodes, grid has {n}"
        )));
    }
    let x = g.nodes();
    let wv: Vec<f64> = g.weights().iter().zip(g.sample(p)).map(|(w, v)| w * v).collect();
    let scale = 1.0 / (32.0 * beta);
    let sums = (0..n)
        .into_par_iter()
        .map(|i| {
            let (mut raw, mut sym, mut mag) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let wt = wv[i] * wv[j] * wv[k] * wv[l] * scale;
                        let (d12, d23, d34) = ((x[i] - x[j]).abs(), (x[j] - x[k]).abs(), (x[k] - x[l]).abs());
                        let (d13, d14, d24) = ((x[i] - x[k]).abs(), (x[i] - x[l]).abs(), (x[j] - x[l]).abs());
                        raw.add(wt * (d12 + d23 - 2.0 * d34));
                        // each |x_a - x_b| averages to the mean over the six pairs
                        let pairs = (d12 + d13 + d14 + d23 + d24 + d34) / 6.0;
                        sym.add(wt * (pairs + pairs - 2.0 * pairs));
                        mag.add(wt.abs() * (d12 + d23 + 2.0 * d34));
                    }
                }
            }
            (raw.value(), sym.value(), mag.value())
        })
        .collect::<Vec<_>>();
    Ok(DivergentBlock {
        unsymmetrized: compensated_sum(sums.iter().map(|s| s.0)),
        symmetrized: compensated_sum(sums.iter().map(|s| s.1)),
        magnitude: compensated_sum(sums.iter().map(|s| s.2)),
    })
}
