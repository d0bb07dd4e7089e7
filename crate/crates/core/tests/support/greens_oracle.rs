//! Independent evaluations of the delta-well Green's function.

#![allow(dead_code)]

use num_complex::Complex64;
use shallowwell_core::quadrature::gauss_legendre;

/// `∫_0^∞ dp/2π [ψ_e(x_1)ψ_e(x_2) + ψ_o(x_1)ψ_o(x_2)] / (p² + β² + γ)` with
/// the continuum states of the delta well,
/// `ψ_e = √2 (p cos px - β sin p|x|)/√(p²+β²)` and `ψ_o = √2 sin px`.
/// The free part `2cos(p(x_1-x_2))` is integrated in closed form and
/// subtracted, leaving an integrand that decays like `p^{-3}`.
pub fn spectral_greens(beta: f64, gamma: f64, x1: f64, x2: f64) -> f64 {
    let g2 = beta * beta + gamma;
    let d = x1 - x2;
    let even = |p: f64, x: f64| 2f64.sqrt() * (p * (p * x).cos() - beta * (p * x.abs()).sin()) / (p * p + beta * beta).sqrt();
    let odd = |p: f64, x: f64| 2f64.sqrt() * (p * x).sin();
    let f = |p: f64| {
        (even(p, x1) * even(p, x2) + odd(p, x1) * odd(p, x2) - 2.0 * (p * d).cos()) / (p * p + g2)
            / (2.0 * std::f64::consts::PI)
    };
    let scale = 1.0 / (1.0 + x1.abs().max(x2.abs()));
    let p_max = 40.0 / d.abs().max(1e-3) + 4000.0;
    let width = 0.25 * scale;
    let panels = (p_max / width).ceil() as usize;
    let (t, w) = gauss_legendre(8).unwrap();
    let mut total = 0.0;
    for k in 0..panels {
        let (a, b) = (k as f64 * width, (k + 1) as f64 * width);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        total += t.iter().zip(&w).map(|(t, w)| w * half * f(mid + half * t)).sum::<f64>();
    }
    let big = g2.sqrt();
    total + (-big * d.abs()).exp() / (2.0 * big)
}

/// The closed form continued to complex `γ`.
pub fn greens_complex(beta: f64, gamma: Complex64, x1: f64, x2: f64) -> Complex64 {
    let big = (gamma + beta * beta).sqrt();
    let d = (x1 - x2).abs();
    let s = x1.abs() + x2.abs();
    (-big * d).exp() / (2.0 * big) + beta * (big + beta) * (-big * s).exp() / (2.0 * big * gamma)
        - beta * (-beta * s).exp() / gamma
}

/// `(-1)^ℓ [γ^ℓ] 𝒢_γ(x_1, x_2)`, i.e. the exact `⟨x_1|Ω̂^{ℓ+1}|x_2⟩`, from a
/// trapezoidal contour integral on `|γ| = β²/2`.
pub fn taylor_kernel(l: usize, beta: f64, x1: f64, x2: f64) -> f64 {
    let m = 64;
    let r = 0.5 * beta * beta;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..m {
        let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
        let z = Complex64::from_polar(r, th);
        acc += greens_complex(beta, z, x1, x2) * Complex64::from_polar(1.0, -(l as f64) * th);
    }
    let coeff = acc.re / m as f64 / r.powi(l as i32);
    if l % 2 == 0 {
        coeff
    } else {
        -coeff
    }
}
