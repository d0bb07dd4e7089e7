//! Composite Gauss–Legendre grids and the two integral primitives built on
//! them: weighted integration and `|x - y|^k` kernel contraction.
//!
//! The contraction kernel has a kink on the diagonal for odd `k`. Rows whose
//! node lies in a panel use product-integration weights for that panel,
//!
//! ```text
//! C[a][b] = ∫_{-1}^{1} |t_a - t|^k  ℓ_b(t) dt,
//! ```
//!
//! where `ℓ_b` is the Lagrange basis on the panel nodes. Every other panel
//! sees a polynomial in `y` and keeps its ordinary Gauss weights, so the
//! contraction is as accurate as interpolating the smooth factor panelwise.

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::{Potential, DEFAULT_EPS_TAIL};

pub const DEFAULT_PANELS: usize = 128;
pub const DEFAULT_NODES_PER_PANEL: usize = 8;
/// Extra half-width added beyond the support radius of non-compact shapes.
pub const DEFAULT_MARGIN: f64 = 5.0;
pub const MAX_NODES_PER_PANEL: usize = 16;

/// Rows below this count are contracted serially.
const PARALLEL_ROWS: usize = 256;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

/// Gauss–Legendre rule on `[-1, 1]`, nodes ascending. `q = 1` is the midpoint rule.
pub fn gauss_legendre(q: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    match q {
        0 => Err(Error::InvalidGridSpec("a rule needs at least one node".into())),
        1 => Ok((vec![0.0], vec![2.0])),
        _ => {
            let rule = GaussLegendre::new(q)
                .map_err(|e| Error::InvalidGridSpec(format!("Gauss-Legendre rule: {e}")))?;
            let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            Ok(pairs.into_iter().unzip())
        }
    }
}

/// Barycentric Lagrange basis values `ℓ_b(t)` for nodes `ts`.
fn lagrange_basis(ts: &[f64], bary: &[f64], t: f64, out: &mut [f64]) {
    if let Some(hit) = ts.iter().position(|&tb| tb == t) {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[hit] = 1.0;
        return;
    }
    let mut denom = 0.0;
    for (b, (&tb, &lb)) in ts.iter().zip(bary).enumerate() {
        let r = lb / (t - tb);
        out[b] = r;
        denom += r;
    }
    out.iter_mut().for_each(|v| *v /= denom);
}

fn barycentric_weights(ts: &[f64]) -> Vec<f64> {
    (0..ts.len())
        .map(|b| {
            let prod: f64 = (0..ts.len())
                .filter(|&c| c != b)
                .map(|c| ts[b] - ts[c])
                .product();
            1.0 / prod
        })
        .collect()
}

/// Product-integration weights `C[a][b] = ∫_{-1}^{1} |t_a - t|^k ℓ_b(t) dt`
/// on the reference panel, row-major `q × q`.
pub fn panel_kink_weights(q: usize, k: u32) -> Result<Vec<f64>> {
    let (ts, ws) = gauss_legendre(q)?;
    if k == 0 {
        return Ok((0..q).flat_map(|_| ws.iter().copied()).collect());
    }
    let bary = barycentric_weights(&ts);
    // Integrand on each side of t_a is a polynomial of degree k + q - 1.
    let order = (k as usize + q).div_ceil(2) + 1;
    let (us, vs) = gauss_legendre(order.max(2))?;
    let mut out = vec![0.0; q * q];
    let mut basis = vec![0.0; q];
    for a in 0..q {
        let ta = ts[a];
        for (lo, hi) in [(-1.0, ta), (ta, 1.0)] {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (&u, &v) in us.iter().zip(&vs) {
                let t = mid + half * u;
                lagrange_basis(&ts, &bary, t, &mut basis);
                let kern = (ta - t).abs().powi(k as i32) * v * half;
                for b in 0..q {
                    out[a * q + b] += kern * basis[b];
                }
            }
        }
    }
    Ok(out)
}

/// Values of a function at the nodes of a [`QuadratureGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn constant(grid: &QuadratureGrid, value: f64) -> Self {
        Self::new(vec![value; grid.len()])
    }

    pub fn from_fn(grid: &QuadratureGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::new(grid.nodes().iter().map(|&x| f(x)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `(L, P, q)` triple describing a uniform composite grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub halfwidth: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
}

/// Composite Gauss–Legendre grid on `[-L, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    halfwidth: f64,
    q: usize,
    edges: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    /// `P` equal panels on `[-L, L]` with `q` nodes each.
    pub fn build(halfwidth: f64, panels: usize, q: usize) -> Result<Self> {
        if !(halfwidth.is_finite() && halfwidth > 0.0) {
            return Err(Error::InvalidGridSpec(format!(
                "half-width must be positive, got {halfwidth}"
            )));
        }
        if panels == 0 {
            return Err(Error::InvalidGridSpec("panel count must be >= 1".into()));
        }
        let h = 2.0 * halfwidth / panels as f64;
        let mut edges: Vec<f64> = (0..=panels).map(|p| -halfwidth + p as f64 * h).collect();
        // exact symmetry of the edge list
        for p in 0..=panels / 2 {
            let e = 0.5 * (edges[panels - p] - edges[p]);
            edges[p] = -e;
            edges[panels - p] = e;
        }
        if panels % 2 == 0 {
            edges[panels / 2] = 0.0;
        }
        Self::from_edges(edges, q)
    }

    pub fn from_spec(spec: GridSpec) -> Result<Self> {
        Self::build(spec.halfwidth, spec.panels, spec.nodes_per_panel)
    }

    /// Composite grid on arbitrary strictly increasing panel edges.
    pub fn from_edges(edges: Vec<f64>, q: usize) -> Result<Self> {
        if !(1..=MAX_NODES_PER_PANEL).contains(&q) {
            return Err(Error::InvalidGridSpec(format!(
                "nodes per panel must lie in 1..={MAX_NODES_PER_PANEL}, got {q}"
            )));
        }
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGridSpec(
                "panel edges must be strictly increasing".into(),
            ));
        }
        let (ts, ws) = gauss_legendre(q)?;
        let mut nodes = Vec::with_capacity((edges.len() - 1) * q);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in edges.windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[1] + w[0]);
            for (&t, &wt) in ts.iter().zip(&ws) {
                nodes.push(mid + half * t);
                weights.push(half * wt);
            }
        }
        let halfwidth = edges[0].abs().max(edges[edges.len() - 1].abs());
        Ok(Self {
            halfwidth,
            q,
            edges,
            nodes,
            weights,
        })
    }

    /// Default grid for a potential: compact wells are integrated exactly
    /// over their support (discontinuities land on panel edges); smooth
    /// wells use the support radius plus a fixed margin.
    pub fn for_potential(p: &Potential) -> Result<Self> {
        Self::from_spec(Self::default_spec(p)?)
    }

    pub fn default_spec(p: &Potential) -> Result<GridSpec> {
        let halfwidth = match p.compact_support() {
            Some(c) => c,
            None => p.support_radius(DEFAULT_EPS_TAIL)? + DEFAULT_MARGIN,
        };
        Ok(GridSpec {
            halfwidth,
            panels: DEFAULT_PANELS,
            nodes_per_panel: DEFAULT_NODES_PER_PANEL,
        })
    }

    /// Every panel split in two.
    pub fn refined(&self) -> Result<Self> {
        let mut edges = Vec::with_capacity(2 * self.edges.len() - 1);
        for w in self.edges.windows(2) {
            edges.push(w[0]);
            edges.push(0.5 * (w[0] + w[1]));
        }
        edges.push(self.edges[self.edges.len() - 1]);
        Self::from_edges(edges, self.q)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            halfwidth: self.halfwidth,
            panels: self.panel_count(),
            nodes_per_panel: self.q,
        }
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn panel_count(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.q
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }

    /// `Σ w_i f_i`.
    pub fn integrate(&self, f: &GridFunction) -> Result<f64> {
        self.check_len(f.len())?;
        Ok(self.integrate_values(f.values()))
    }

    pub(crate) fn integrate_values(&self, f: &[f64]) -> f64 {
        compensated_sum(self.weights.iter().zip(f).map(|(w, v)| w * v))
    }

    /// Integral of a closure sampled at the nodes.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        compensated_sum(self.nodes.iter().zip(&self.weights).map(|(&x, w)| w * f(x)))
    }

    /// Potential sampled at the nodes.
    pub fn sample(&self, p: &Potential) -> Vec<f64> {
        self.nodes.iter().map(|&x| p.evaluate(x)).collect()
    }

    /// One chain link: `h_i = Σ_j W_ij x_j^m V(x_j) f_j` with
    /// `W_ij ≈ w_j |x_i - x_j|^k` (product-integrated on the diagonal panel).
    pub fn contract(
        &self,
        p: &Potential,
        abs_power: u32,
        poly_power: u32,
        f: &GridFunction,
    ) -> Result<GridFunction> {
        self.check_len(f.len())?;
        let u: Vec<f64> = self
            .nodes
            .iter()
            .zip(f.values())
            .map(|(&x, &fv)| x.powi(poly_power as i32) * p.evaluate(x) * fv)
            .collect();
        Ok(GridFunction::new(self.apply_abs_power(abs_power, &u)?))
    }

    /// `h_i = Σ_j W_ij u_j` for the `|x - y|^k` kernel. `u` carries no
    /// quadrature weights; they are part of `W`.
    pub fn apply_abs_power(&self, k: u32, u: &[f64]) -> Result<Vec<f64>> {
        self.check_len(u.len())?;
        if k == 0 {
            let total = self.integrate_values(u);
            return Ok(vec![total; u.len()]);
        }
        let q = self.q;
        let corr = panel_kink_weights(q, k)?;
        let row = |i: usize| -> f64 {
            let panel = i / q;
            let a = i % q;
            let xi = self.nodes[i];
            let start = panel * q;
            let mut acc = CompensatedSum::new();
            for j in (0..start).chain(start + q..self.len()) {
                acc.add(self.weights[j] * (xi - self.nodes[j]).abs().powi(k as i32) * u[j]);
            }
            let scale = (0.5 * (self.edges[panel + 1] - self.edges[panel])).powi(k as i32 + 1);
            for b in 0..q {
                acc.add(scale * corr[a * q + b] * u[start + b]);
            }
            acc.value()
        };
        let n = self.len();
        Ok(if n >= PARALLEL_ROWS {
            (0..n).into_par_iter().map(row).collect()
        } else {
            (0..n).map(row).collect()
        })
    }
}

/// `build_grid(L, P, q)`.
pub fn build_grid(halfwidth: f64, panels: usize, q: usize) -> Result<QuadratureGrid> {
    QuadratureGrid::build(halfwidth, panels, q)
}
