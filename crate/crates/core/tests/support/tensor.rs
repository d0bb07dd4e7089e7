//! Reference chain integrals by plain tensor-product quadrature: every one
//! of the `N^d` points is visited, nothing is factorized or contracted.
//!
//! Coordinates are the centre of mass `c` and the differences
//! `d_i = x_{i+1} - x_i`, so each `|x_i - x_{i+1}|` kink lies on a coordinate
//! plane. `c` uses Gauss–Hermite nodes, each `d_i` a half-range Hermite rule
//! mirrored onto both sides of zero. Node scales assume `V` decays like
//! `exp(-x²)`; the weight function is divided back out, so any `V` can be
//! integrated, just less efficiently.

#![allow(dead_code)]

use gauss_quad::GaussHermite;
use nalgebra::{DMatrix, SymmetricEigen};
use shallowwell_core::perturbation::Component;
use shallowwell_core::QuadratureGrid;

/// Gauss rule for `∫_0^∞ e^{-t²} f(t) dt` by discretized Stieltjes.
pub fn half_range_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let edges: Vec<f64> = (0..=80).map(|i| i as f64 * 0.15).collect();
    let fine = QuadratureGrid::from_edges(edges, 16).unwrap();
    let x = fine.nodes();
    let w: Vec<f64> = fine.weights().iter().zip(x).map(|(w, x)| w * (-x * x).exp()).collect();
    let dot = |a: &[f64], b: &[f64], m: &dyn Fn(f64) -> f64| -> f64 {
        (0..x.len()).map(|i| w[i] * a[i] * b[i] * m(x[i])).sum()
    };
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut prev = vec![0.0; x.len()];
    let mut cur = vec![1.0; x.len()];
    let mut norm_prev = 1.0;
    for k in 0..n {
        let norm = dot(&cur, &cur, &|_| 1.0);
        let a = dot(&cur, &cur, &|t| t) / norm;
        let b = if k == 0 { 0.0 } else { norm / norm_prev };
        alpha.push(a);
        beta.push(b);
        let next: Vec<f64> = (0..x.len()).map(|i| (x[i] - a) * cur[i] - b * prev[i]).collect();
        prev = cur;
        cur = next;
        norm_prev = norm;
    }
    let mut jac = DMatrix::zeros(n, n);
    for i in 0..n {
        jac[(i, i)] = alpha[i];
        if i + 1 < n {
            jac[(i, i + 1)] = beta[i + 1].sqrt();
            jac[(i + 1, i)] = beta[i + 1].sqrt();
        }
    }
    let mu0: f64 = w.iter().sum();
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// `(nodes, weights)` with the Gaussian weight already folded back in.
fn hermite_axis(n: usize, scale: f64) -> (Vec<f64>, Vec<f64>) {
    GaussHermite::new(n)
        .unwrap()
        .as_node_weight_pairs()
        .iter()
        .map(|&(t, w)| (t / scale, w * (t * t).exp() / scale))
        .unzip()
}

fn mirrored_axis(n: usize, scale: f64) -> (Vec<f64>, Vec<f64>) {
    let (t, w) = half_range_hermite(n / 2);
    let mut nodes = Vec::with_capacity(2 * t.len());
    let mut weights = Vec::with_capacity(2 * t.len());
    for (&ti, &wi) in t.iter().zip(&w).rev() {
        nodes.push(-ti / scale);
        weights.push(wi * (ti * ti).exp() / scale);
    }
    for (&ti, &wi) in t.iter().zip(&w) {
        nodes.push(ti / scale);
        weights.push(wi * (ti * ti).exp() / scale);
    }
    (nodes, weights)
}

/// `∫ Π V(x_j) x_j^{m_j} Π |x_{i+1} - x_i|^{k_i}` on an `n_axis`-point
/// tensor rule per dimension (`n_axis` even).
pub fn tensor_chain(v: &dyn Fn(f64) -> f64, site_powers: &[u32], link_powers: &[u32], n_axis: usize) -> f64 {
    let n = site_powers.len();
    let m = link_powers.len();
    assert_eq!(n, m + 1);
    if m == 0 {
        let (x, w) = hermite_axis(n_axis, 1.0);
        return x.iter().zip(&w).map(|(&x, &w)| w * v(x) * x.powi(site_powers[0] as i32)).sum();
    }
    // x_j = c + Σ_i A[j][i] d_i
    let a = DMatrix::from_fn(n, m, |j, i| (if i < j { 1.0 } else { 0.0 }) - (n - 1 - i) as f64 / n as f64);
    let cov = (a.transpose() * &a).try_inverse().unwrap();
    let mut axes = vec![hermite_axis(n_axis, (n as f64).sqrt())];
    for i in 0..m {
        axes.push(mirrored_axis(n_axis, 1.0 / cov[(i, i)].sqrt()));
    }
    let mut idx = vec![0usize; m + 1];
    let mut total = 0.0;
    loop {
        let c = axes[0].0[idx[0]];
        let mut f = axes[0].1[idx[0]];
        for i in 0..m {
            let d = axes[i + 1].0[idx[i + 1]];
            f *= axes[i + 1].1[idx[i + 1]] * d.abs().powi(link_powers[i] as i32);
        }
        for j in 0..n {
            let mut x = c;
            for i in 0..m {
                x += a[(j, i)] * axes[i + 1].0[idx[i + 1]];
            }
            f *= v(x) * x.powi(site_powers[j] as i32);
        }
        total += f;
        let mut k = m + 1;
        loop {
            if k == 0 {
                return total;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < n_axis {
                break;
            }
            idx[k] = 0;
        }
    }
}

pub fn tensor_component(v: &dyn Fn(f64) -> f64, c: &Component, n_axis: usize) -> f64 {
    match c {
        Component::Moment(k) => tensor_chain(v, &[*k], &[], n_axis),
        Component::Chain {
            site_powers,
            link_powers,
        } => tensor_chain(v, site_powers, link_powers, n_axis),
    }
}
