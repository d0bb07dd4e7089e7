//! Run configuration: flat `key = value` lines, with the well described
//! under a `[potential]` header.
//!
//! ```text
//! order = 6
//! grid = 15, 128, 8
//! s_min = 0.1
//!
//! [potential]
//! kind = square_well
//! strength = 1
//! halfwidth = 1
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use shallowwell_core::perturbation::MAX_ORDER;
use shallowwell_core::quadrature::MAX_NODES_PER_PANEL;
use shallowwell_core::{GridSpec, Potential};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    SquareWell { strength: f64, halfwidth: f64 },
    PoschlTeller { strength: f64 },
    Gaussian { strength: f64 },
    /// Two-column `x V` samples.
    Tabulated { path: PathBuf },
}

impl PotentialSpec {
    pub fn build(&self) -> CliResult<Potential> {
        let p = match self {
            PotentialSpec::SquareWell { strength, halfwidth } => Potential::square_well(*strength, *halfwidth),
            PotentialSpec::PoschlTeller { strength } => Potential::poschl_teller(*strength),
            PotentialSpec::Gaussian { strength } => Potential::gaussian(*strength),
            PotentialSpec::Tabulated { path } => Potential::read_table(path),
        };
        p.map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub s_min: f64,
    pub s_max: f64,
    /// Number of sample points, endpoints included.
    pub steps: usize,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        let h = (self.s_max - self.s_min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.s_max } else { self.s_min + i as f64 * h })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub order: usize,
    pub grid: Option<GridSpec>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub sweep: Sweep,
    pub pade_split: Option<(usize, usize)>,
    /// Deep-well slope split off before resumming; defaults to the peak
    /// depth of the shape.
    pub depth: Option<f64>,
    pub tol: f64,
    pub betas: Vec<f64>,
    pub block_beta: f64,
    pub block_grid: Option<GridSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            potential: PotentialSpec::Gaussian { strength: 1.0 },
            order: MAX_ORDER,
            grid: None,
            format: Format::Text,
            out: None,
            sweep: Sweep {
                s_min: 0.1,
                s_max: 3.0,
                steps: 30,
            },
            pade_split: None,
            depth: None,
            tol: 1e-10,
            betas: vec![0.02, 0.01, 0.005],
            block_beta: 0.01,
            block_grid: None,
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn number(key: &str, v: &str) -> CliResult<f64> {
    let x: f64 = v.trim().parse().map_err(|_| bad(format!("{key}: expected a number, got '{v}'")))?;
    if !x.is_finite() {
        return Err(bad(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn integer(key: &str, v: &str) -> CliResult<usize> {
    v.trim()
        .parse()
        .map_err(|_| bad(format!("{key}: expected a nonnegative integer, got '{v}'")))
}

fn list(key: &str, v: &str) -> CliResult<Vec<f64>> {
    v.split(',').map(|t| number(key, t)).collect()
}

/// `L,P,q`.
pub fn parse_grid(v: &str) -> CliResult<GridSpec> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 3 {
        return Err(bad(format!("grid: expected L,P,q, got '{v}'")));
    }
    let spec = GridSpec {
        halfwidth: number("grid", parts[0])?,
        panels: integer("grid", parts[1])?,
        nodes_per_panel: integer("grid", parts[2])?,
    };
    validate_grid("grid", spec)
}

fn validate_grid(key: &str, g: GridSpec) -> CliResult<GridSpec> {
    if !(g.halfwidth > 0.0) || g.panels == 0 || !(1..=MAX_NODES_PER_PANEL).contains(&g.nodes_per_panel) {
        return Err(bad(format!(
            "{key}: need L > 0, P >= 1 and 1 <= q <= {MAX_NODES_PER_PANEL}"
        )));
    }
    Ok(g)
}

pub fn parse_format(v: &str) -> CliResult<Format> {
    match v.trim() {
        "text" => Ok(Format::Text),
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(bad(format!("format: expected text, csv or json, got '{other}'"))),
    }
}

#[derive(Default)]
struct PotentialKeys {
    kind: Option<String>,
    strength: Option<f64>,
    halfwidth: Option<f64>,
    file: Option<String>,
}

impl RunConfig {
    /// Parses a config file. Relative potential file paths resolve against
    /// `base`.
    pub fn parse(text: &str, base: &Path) -> CliResult<Self> {
        let mut cfg = RunConfig::default();
        let mut pot = PotentialKeys::default();
        let mut seen = BTreeSet::new();
        let mut section = String::new();
        let (mut pade_m, mut pade_n) = (None, None);
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if name != "potential" {
                    return Err(bad(format!("line {lineno}: unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {lineno}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(format!("{section}.{key}")) {
                return Err(bad(format!("line {lineno}: duplicate key '{key}'")));
            }
            let at = |e: CliError| match e {
                CliError::Config(m) => bad(format!("line {lineno}: {m}")),
                other => other,
            };
            if section == "potential" {
                match key {
                    "kind" => pot.kind = Some(value.to_string()),
                    "strength" => pot.strength = Some(number(key, value).map_err(at)?),
                    "halfwidth" => pot.halfwidth = Some(number(key, value).map_err(at)?),
                    "file" => pot.file = Some(value.to_string()),
                    _ => return Err(bad(format!("line {lineno}: unknown potential key '{key}'"))),
                }
                continue;
            }
            match key {
                "order" => cfg.order = integer(key, value).map_err(at)?,
                "grid" => cfg.grid = Some(parse_grid(value).map_err(at)?),
                "format" => cfg.format = parse_format(value).map_err(at)?,
                "out" => cfg.out = Some(base.join(value)),
                "s_min" => cfg.sweep.s_min = number(key, value).map_err(at)?,
                "s_max" => cfg.sweep.s_max = number(key, value).map_err(at)?,
                "steps" => cfg.sweep.steps = integer(key, value).map_err(at)?,
                "pade_m" => pade_m = Some(integer(key, value).map_err(at)?),
                "pade_n" => pade_n = Some(integer(key, value).map_err(at)?),
                "depth" => cfg.depth = Some(number(key, value).map_err(at)?),
                "tol" => cfg.tol = number(key, value).map_err(at)?,
                "betas" => cfg.betas = list(key, value).map_err(at)?,
                "block_beta" => cfg.block_beta = number(key, value).map_err(at)?,
                "block_grid" => cfg.block_grid = Some(parse_grid(value).map_err(at)?),
                _ => return Err(bad(format!("line {lineno}: unknown key '{key}'"))),
            }
        }
        cfg.pade_split = match (pade_m, pade_n) {
            (None, None) => None,
            (Some(m), Some(n)) => Some((m, n)),
            _ => return Err(bad("pade_m and pade_n must be given together")),
        };
        cfg.potential = potential_spec(pot, base)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Range checks; run again after command-line overrides.
    pub fn validate(&self) -> CliResult<()> {
        if !(2..=MAX_ORDER).contains(&self.order) {
            return Err(bad(format!("order must lie in 2..={MAX_ORDER}, got {}", self.order)));
        }
        let Sweep { s_min, s_max, steps } = self.sweep;
        if !(s_min > 0.0 && s_min < s_max) || steps < 2 {
            return Err(bad(format!(
                "sweep needs 0 < s_min < s_max and steps >= 2, got [{s_min}, {s_max}] with {steps} steps"
            )));
        }
        if let Some((m, n)) = self.pade_split {
            if m + n > self.order {
                return Err(bad(format!("[{m}/{n}] Padé needs order >= {}", m + n)));
            }
        }
        if let Some(d) = self.depth {
            if !(d >= 0.0) {
                return Err(bad("depth must be nonnegative"));
            }
        }
        if !(self.tol >= 1e-12) {
            return Err(bad(format!("tol must be >= 1e-12, got {}", self.tol)));
        }
        if self.betas.is_empty() || self.betas.iter().any(|b| !(*b > 0.0)) || !(self.block_beta > 0.0) {
            return Err(bad("regulator strengths must be positive"));
        }
        Ok(())
    }
}

fn potential_spec(keys: PotentialKeys, base: &Path) -> CliResult<PotentialSpec> {
    let kind = keys.kind.as_deref().unwrap_or("gaussian");
    let strength = keys.strength.unwrap_or(1.0);
    if strength < 0.0 {
        return Err(bad(format!("strength must be nonnegative, got {strength}")));
    }
    let only = |allowed: &[&str]| -> CliResult<()> {
        let given = [
            ("strength", keys.strength.is_some()),
            ("halfwidth", keys.halfwidth.is_some()),
            ("file", keys.file.is_some()),
        ];
        match given.iter().find(|(k, set)| *set && !allowed.contains(k)) {
            Some((k, _)) => Err(bad(format!("key '{k}' does not apply to kind {kind}"))),
            None => Ok(()),
        }
    };
    match kind {
        "square_well" => {
            only(&["strength", "halfwidth"])?;
            let halfwidth = keys.halfwidth.unwrap_or(1.0);
            if !(halfwidth > 0.0) {
                return Err(bad(format!("halfwidth must be positive, got {halfwidth}")));
            }
            Ok(PotentialSpec::SquareWell { strength, halfwidth })
        }
        "poschl_teller" => {
            only(&["strength"])?;
            Ok(PotentialSpec::PoschlTeller { strength })
        }
        "gaussian" => {
            only(&["strength"])?;
            Ok(PotentialSpec::Gaussian { strength })
        }
        "tabulated" => {
            only(&["file"])?;
            let file = keys.file.ok_or_else(|| bad("tabulated potential needs a file"))?;
            Ok(PotentialSpec::Tabulated { path: base.join(file) })
        }
        other => Err(bad(format!("unknown potential kind '{other}'"))),
    }
}
