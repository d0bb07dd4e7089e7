//! Weak-coupling corrections `E⁽²⁾ … E⁽⁶⁾` in the zero-range-state limit.
//!
//! Each correction is a sum of [`ClusterTerm`]s. A term factorizes into
//! single-site moments and polynomial-weighted chains, and a chain of `m`
//! links costs `m` kernel contractions on the grid, so no term ever needs a
//! tensor-product quadrature.

mod tables;
mod terms;

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quadrature::{compensated_sum, GridSpec, QuadratureGrid};

pub use tables::table;
pub use terms::{AbsLink, ClusterTerm, Component, Rational, TermTable};

/// Highest order with a built-in term table.
pub const MAX_ORDER: usize = 6;
/// Longest chain `chain` accepts.
pub const MAX_CHAIN_LINKS: usize = 4;
/// Largest `|x - y|` power `chain` accepts.
pub const MAX_LINK_POWER: u32 = 3;

fn pow(x: f64, k: u32) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => x.powi(k as i32),
    }
}

/// `μ_k = ∫ V(x) x^k dx`.
pub fn moment(p: &Potential, g: &QuadratureGrid, k: u32) -> f64 {
    g.integrate_fn(|x| p.evaluate(x) * pow(x, k))
}

fn check_chain(link_powers: &[u32]) -> Result<()> {
    if link_powers.is_empty()
        || link_powers.len() > MAX_CHAIN_LINKS
        || link_powers.iter().any(|&k| k > MAX_LINK_POWER)
    {
        return Err(Error::UnsupportedChain(link_powers.to_vec()));
    }
    Ok(())
}

/// `∫ V(x_1) |x_1 - x_2|^{k_1} V(x_2) … V(x_{m+1})`.
pub fn chain(p: &Potential, g: &QuadratureGrid, link_powers: &[u32]) -> Result<f64> {
    let site_powers = vec![0; link_powers.len() + 1];
    weighted_chain(p, g, &site_powers, link_powers)
}

/// Chain with an extra `x_i^{m_i}` on every site.
pub fn weighted_chain(
    p: &Potential,
    g: &QuadratureGrid,
    site_powers: &[u32],
    link_powers: &[u32],
) -> Result<f64> {
    check_chain(link_powers)?;
    if site_powers.len() != link_powers.len() + 1 {
        return Err(Error::LengthMismatch {
            expected: link_powers.len() + 1,
            got: site_powers.len(),
        });
    }
    eval_chain(g, &g.sample(p), site_powers, link_powers)
}

fn eval_chain(g: &QuadratureGrid, v: &[f64], site_powers: &[u32], link_powers: &[u32]) -> Result<f64> {
    let x = g.nodes();
    let weighted = |m: u32, f: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(v)
            .zip(f)
            .map(|((&xi, &vi), &fi)| pow(xi, m) * vi * fi)
            .collect()
    };
    let mut f = vec![1.0; g.len()];
    for (&m, &k) in site_powers.iter().zip(link_powers) {
        f = g.apply_abs_power(k, &weighted(m, &f))?;
    }
    let last = site_powers[site_powers.len() - 1];
    Ok(g.integrate_values(&weighted(last, &f)))
}

fn eval_component(g: &QuadratureGrid, v: &[f64], c: &Component) -> Result<f64> {
    match c {
        Component::Moment(k) => {
            let x = g.nodes();
            Ok(g.integrate_values(&x.iter().zip(v).map(|(&xi, &vi)| pow(xi, *k) * vi).collect::<Vec<_>>()))
        }
        Component::Chain {
            site_powers,
            link_powers,
        } => {
            check_chain(link_powers)?;
            eval_chain(g, v, site_powers, link_powers)
        }
    }
}

fn coefficient(t: &ClusterTerm) -> f64 {
    t.coefficient.to_f64().unwrap_or(f64::NAN)
}

/// Coefficient times the product of the term's component integrals.
pub fn evaluate_term(t: &ClusterTerm, p: &Potential, g: &QuadratureGrid) -> Result<f64> {
    let v = g.sample(p);
    let mut value = coefficient(t);
    for c in t.components(0)? {
        value *= eval_component(g, &v, &c)?;
    }
    Ok(value)
}

/// Sum of a term table. Distinct components are evaluated once, in
/// parallel; the final sum runs in table order.
pub fn evaluate_table(table: &TermTable, p: &Potential, g: &QuadratureGrid) -> Result<f64> {
    let v = g.sample(p);
    let decomposed = table
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| t.components(i))
        .collect::<Result<Vec<_>>>()?;
    let mut unique: Vec<&Component> = decomposed.iter().flatten().collect();
    unique.sort();
    unique.dedup();
    let values: BTreeMap<&Component, f64> = unique
        .into_par_iter()
        .map(|c| eval_component(g, &v, c).map(|val| (c, val)))
        .collect::<Result<_>>()?;
    Ok(compensated_sum(table.terms.iter().zip(&decomposed).map(|(t, comps)| {
        comps.iter().fold(coefficient(t), |acc, c| acc * values[c])
    })))
}

/// `E⁽ⁿ⁾` for `n` in 1..=6. The first-order term vanishes in the limit.
pub fn correction(order: usize, p: &Potential, g: &QuadratureGrid) -> Result<f64> {
    if order == 1 {
        return Ok(0.0);
    }
    let t = table(order).ok_or_else(|| {
        Error::InvalidArgument(format!("order must lie in 1..={MAX_ORDER}, got {order}"))
    })?;
    evaluate_table(t, p, g)
}

/// `-μ_0² / 4`.
pub fn e2(p: &Potential, g: &QuadratureGrid) -> Result<f64> {
    correction(2, p, g)
}

/// `-(μ_0 / 4) C[1]`.
pub fn e3(p: &Potential, g: &QuadratureGrid) -> Result<f64> {
    correction(3, p, g)
}

/// `-(1/16) μ_0² C[2] - (1/8) μ_0 C[1,1] - (1/16) C[1]²`.
pub fn e4(p: &Potential, g: &QuadratureGrid) -> Result<f64> {
    correction(4, p, g)
}

pub fn e5(p: &Potential, g: &QuadratureGrid) -> Result<f64> {
    correction(5, p, g)
}

pub fn e6(p: &Potential, g: &QuadratureGrid) -> Result<f64> {
    correction(6, p, g)
}

/// `E(s) ≈ Σ c_n s^n` for a fixed shape.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    /// `coefficients[n]` is `c_n`; index 0 is the (zero) constant term.
    pub coefficients: Vec<f64>,
    /// `|c_n(P) - c_n(2P)|` from the grid and its refinement.
    pub error_estimates: Vec<f64>,
    pub shape: String,
    pub grid: GridSpec,
}

impl EnergySeries {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `c_n`, zero beyond the computed order.
    pub fn coefficient(&self, n: usize) -> f64 {
        self.coefficients.get(n).copied().unwrap_or(0.0)
    }

    /// Truncated sum at strength `s`.
    pub fn evaluate(&self, s: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }
}

/// Coefficients `c_1 … c_order` of the unit-strength shape of `p`, with
/// error estimates from the `P` vs `2P` refinement of `g`.
pub fn energy_series(p: &Potential, order: usize, g: &QuadratureGrid) -> Result<EnergySeries> {
    if !(2..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "series order must lie in 2..={MAX_ORDER}, got {order}"
        )));
    }
    let unit = p.with_strength(1.0)?;
    let fine = g.refined()?;
    let mut coefficients = vec![0.0; order + 1];
    let mut error_estimates = vec![0.0; order + 1];
    for n in 2..=order {
        let coarse = correction(n, &unit, g)?;
        let refined = correction(n, &unit, &fine)?;
        coefficients[n] = coarse;
        error_estimates[n] = (coarse - refined).abs();
    }
    Ok(EnergySeries {
        coefficients,
        error_estimates,
        shape: p.shape().to_string(),
        grid: g.spec(),
    })
}
