//! Short-range attractive wells `V(x) = -s * shape(x)`.
//!
//! The strength `s` is the expansion parameter of the weak-coupling series;
//! `shape` is nonnegative, bounded and integrable. Units follow the kinetic
//! convention `H = -d²/dx² + V`.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Candidate truncation radii tried by [`Potential::support_radius`].
pub const SUPPORT_LADDER: [f64; 4] = [5.0, 10.0, 20.0, 40.0];

/// Default relative tail threshold for [`Potential::support_radius`].
pub const DEFAULT_EPS_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `1` for `|x| <= halfwidth`, `0` outside.
    SquareWell { halfwidth: f64 },
    /// `1 / cosh²(x)`.
    PoschlTeller,
    /// `exp(-x²)`.
    Gaussian,
    /// Piecewise-linear through `(abscissas[i], depths[i])`, zero outside the
    /// sampled range. `depths` holds `-V/s` and is therefore nonnegative.
    Tabulated { abscissas: Vec<f64>, depths: Vec<f64> },
}

impl Shape {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Shape::SquareWell { halfwidth } => {
                if x.abs() <= *halfwidth {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::PoschlTeller => {
                let c = x.cosh();
                1.0 / (c * c)
            }
            Shape::Gaussian => (-x * x).exp(),
            Shape::Tabulated { abscissas, depths } => interpolate(abscissas, depths, x),
        }
    }

    fn peak(&self) -> f64 {
        match self {
            Shape::Tabulated { depths, .. } => depths.iter().copied().fold(0.0, f64::max),
            _ => 1.0,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::SquareWell { halfwidth } => write!(f, "square_well(a={halfwidth})"),
            Shape::PoschlTeller => write!(f, "poschl_teller"),
            Shape::Gaussian => write!(f, "gaussian"),
            Shape::Tabulated { abscissas, .. } => write!(f, "tabulated(n={})", abscissas.len()),
        }
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return 0.0;
    }
    // first index with xs[i] > x
    let i = xs.partition_point(|&xi| xi <= x);
    if i == n {
        return ys[n - 1];
    }
    let (x0, x1) = (xs[i - 1], xs[i]);
    let t = (x - x0) / (x1 - x0);
    ys[i - 1] + t * (ys[i] - ys[i - 1])
}

/// A strength-factored attractive well. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    strength: f64,
    shape: Shape,
}

impl Potential {
    pub fn new(strength: f64, shape: Shape) -> Result<Self> {
        if !(strength.is_finite() && strength >= 0.0) {
            return Err(Error::InvalidPotential(format!(
                "strength must be finite and nonnegative, got {strength}"
            )));
        }
        match &shape {
            Shape::SquareWell { halfwidth } if !(halfwidth.is_finite() && *halfwidth > 0.0) => {
                return Err(Error::InvalidPotential(format!(
                    "square well halfwidth must be positive, got {halfwidth}"
                )));
            }
            Shape::Tabulated { abscissas, depths } => validate_table(abscissas, depths)?,
            _ => {}
        }
        Ok(Self { strength, shape })
    }

    pub fn square_well(strength: f64, halfwidth: f64) -> Result<Self> {
        Self::new(strength, Shape::SquareWell { halfwidth })
    }

    pub fn poschl_teller(strength: f64) -> Result<Self> {
        Self::new(strength, Shape::PoschlTeller)
    }

    pub fn gaussian(strength: f64) -> Result<Self> {
        Self::new(strength, Shape::Gaussian)
    }

    /// Builds a tabulated well from samples of `V` itself (all `<= 0`).
    /// The result has unit strength, so `evaluate` reproduces the samples.
    pub fn tabulated(abscissas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| **v > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "tabulated values must be <= 0, found {v}"
            )));
        }
        let depths = values.iter().map(|v| -v).collect();
        Self::new(1.0, Shape::Tabulated { abscissas, depths })
    }

    /// Parses the two-column `x V` sample format. Blank lines and anything
    /// after a `#` are ignored.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64> {
                tok.and_then(|t| t.parse::<f64>().ok()).ok_or_else(|| {
                    Error::InvalidPotential(format!(
                        "line {}: expected two numeric columns",
                        lineno + 1
                    ))
                })
            };
            let x = parse(cols.next())?;
            let v = parse(cols.next())?;
            if cols.next().is_some() {
                return Err(Error::InvalidPotential(format!(
                    "line {}: more than two columns",
                    lineno + 1
                )));
            }
            xs.push(x);
            vs.push(v);
        }
        Self::tabulated(xs, vs)
    }

    pub fn read_table(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidPotential(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::parse_table(&text)
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Same shape, different strength.
    pub fn with_strength(&self, strength: f64) -> Result<Self> {
        Self::new(strength, self.shape.clone())
    }

    /// `V(x) = -s * shape(x)`.
    pub fn evaluate(&self, x: f64) -> f64 {
        -self.strength * self.shape.value(x)
    }

    pub fn shape_at(&self, x: f64) -> f64 {
        self.shape.value(x)
    }

    /// Maximum of `shape`; the well depth is `strength * peak_shape`.
    pub fn peak_shape(&self) -> f64 {
        self.shape.peak()
    }

    /// Deepest value of `V`.
    pub fn min_value(&self) -> f64 {
        -self.strength * self.peak_shape()
    }

    /// Smallest ladder radius where the shape has fallen below `eps_tail`
    /// of its peak. Tabulated wells return the largest sampled `|x|`.
    pub fn support_radius(&self, eps_tail: f64) -> Result<f64> {
        if !(eps_tail > 0.0 && eps_tail < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "eps_tail must lie in (0, 1), got {eps_tail}"
            )));
        }
        if let Shape::Tabulated { abscissas, .. } = &self.shape {
            return Ok(table_extent(abscissas));
        }
        let peak = self.peak_shape();
        SUPPORT_LADDER
            .iter()
            .copied()
            .find(|&l| {
                self.shape.value(l) < eps_tail * peak && self.shape.value(-l) < eps_tail * peak
            })
            .ok_or(Error::TailNotDecayed { eps_tail })
    }

    /// Half-width of the region outside which `V` vanishes identically, for
    /// shapes with compact support.
    pub fn compact_support(&self) -> Option<f64> {
        match &self.shape {
            Shape::SquareWell { halfwidth } => Some(*halfwidth),
            Shape::Tabulated { abscissas, .. } => Some(table_extent(abscissas)),
            _ => None,
        }
    }

    /// Points where `V` is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::SquareWell { halfwidth } => vec![-halfwidth, *halfwidth],
            _ => Vec::new(),
        }
    }

    /// True for the built-in analytic (even) shapes.
    pub fn is_even(&self) -> bool {
        !matches!(self.shape, Shape::Tabulated { .. })
    }
}

fn table_extent(abscissas: &[f64]) -> f64 {
    let first = abscissas.first().copied().unwrap_or(0.0).abs();
    let last = abscissas.last().copied().unwrap_or(0.0).abs();
    first.max(last)
}

fn validate_table(xs: &[f64], depths: &[f64]) -> Result<()> {
    if xs.len() != depths.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            got: depths.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidPotential(
            "a tabulated well needs at least two samples".into(),
        ));
    }
    if xs.iter().chain(depths).any(|v| !v.is_finite()) {
        return Err(Error::InvalidPotential("non-finite sample".into()));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidPotential(
            "abscissas must be strictly increasing".into(),
        ));
    }
    if depths.iter().any(|d| *d < 0.0) {
        return Err(Error::InvalidPotential(
            "tabulated values must be <= 0".into(),
        ));
    }
    Ok(())
}
