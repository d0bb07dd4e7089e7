//! Cluster terms: one additive piece of a correction formula.
//!
//! A term is `coefficient × ∫ Π_i V(x_i) x_i^{p_i} Π_links |x_a - x_b|^k`.
//! The links must form disjoint simple paths, so the integral factorizes into
//! single-site moments and polynomial-weighted chains.
//!
//! Text format, one term per line (sites are 1-based, `#` starts a comment):
//!
//! ```text
//! -1/32 ; 0 0 0 0 0 0 ; 1-2:1 2-3:1 3-4:1 4-5:1
//! ```
//!
//! i.e. `coefficient ; site powers ; links` with each link `a-b:k`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Factor `|x_a - x_b|^power` (0-based site indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbsLink {
    pub a: usize,
    pub b: usize,
    pub power: u32,
}

impl AbsLink {
    pub fn new(a: usize, b: usize, power: u32) -> Self {
        Self { a, b, power }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterTerm {
    pub coefficient: Rational,
    pub site_powers: Vec<u32>,
    pub links: Vec<AbsLink>,
}

/// A connected piece of a term's factor graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    /// Isolated site: `∫ V(x) x^k dx`.
    Moment(u32),
    /// Path `x_1 - x_2 - … - x_n` with per-site powers (length `n`) and
    /// link powers (length `n - 1`), stored in canonical orientation.
    Chain {
        site_powers: Vec<u32>,
        link_powers: Vec<u32>,
    },
}

impl Component {
    fn chain(site_powers: Vec<u32>, link_powers: Vec<u32>) -> Self {
        let mut rs = site_powers.clone();
        rs.reverse();
        let mut rl = link_powers.clone();
        rl.reverse();
        if (rs.as_slice(), rl.as_slice()) < (site_powers.as_slice(), link_powers.as_slice()) {
            Component::Chain {
                site_powers: rs,
                link_powers: rl,
            }
        } else {
            Component::Chain {
                site_powers,
                link_powers,
            }
        }
    }

    pub fn site_count(&self) -> usize {
        match self {
            Component::Moment(_) => 1,
            Component::Chain { site_powers, .. } => site_powers.len(),
        }
    }
}

impl ClusterTerm {
    pub fn new(coefficient: Rational, site_powers: Vec<u32>, links: Vec<AbsLink>) -> Self {
        Self {
            coefficient,
            site_powers,
            links,
        }
    }

    pub fn site_count(&self) -> usize {
        self.site_powers.len()
    }

    /// Total power of length carried by the kernel: polynomial plus links.
    pub fn degree(&self) -> u32 {
        self.site_powers.iter().sum::<u32>() + self.links.iter().map(|l| l.power).sum::<u32>()
    }

    /// Splits the factor graph into moments and paths. `index` is only used
    /// for error reporting.
    pub fn components(&self, index: usize) -> Result<Vec<Component>> {
        let n = self.site_count();
        let bad = || Error::NonPathComponent { term: index };
        let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        for l in &self.links {
            if l.a >= n || l.b >= n || l.a == l.b {
                return Err(bad());
            }
            adj[l.a].push((l.b, l.power));
            adj[l.b].push((l.a, l.power));
        }
        if adj.iter().any(|nb| nb.len() > 2) {
            return Err(bad());
        }
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || adj[start].len() > 1 {
                continue;
            }
            seen[start] = true;
            if adj[start].is_empty() {
                out.push(Component::Moment(self.site_powers[start]));
                continue;
            }
            let mut powers = vec![self.site_powers[start]];
            let mut links = Vec::new();
            let (mut prev, mut cur) = (usize::MAX, start);
            while let Some(&(b, k)) = adj[cur].iter().find(|(b, _)| *b != prev) {
                seen[b] = true;
                links.push(k);
                powers.push(self.site_powers[b]);
                prev = cur;
                cur = b;
            }
            out.push(Component::chain(powers, links));
        }
        // anything unvisited sits on a cycle
        if seen.iter().any(|s| !s) {
            return Err(bad());
        }
        Ok(out)
    }
}

/// A validated table of terms for one perturbative order.
#[derive(Debug, Clone, PartialEq)]
pub struct TermTable {
    pub order: usize,
    pub terms: Vec<ClusterTerm>,
}

impl TermTable {
    /// Checks site counts, link endpoints, path structure and that every
    /// term carries length degree `order - 2`.
    pub fn new(order: usize, terms: Vec<ClusterTerm>) -> Result<Self> {
        let degree = order.checked_sub(2).ok_or_else(|| {
            Error::InvalidArgument(format!("term tables start at order 2, got {order}"))
        })? as u32;
        for (i, t) in terms.iter().enumerate() {
            if t.site_count() != order {
                return Err(Error::TableFormat {
                    line: i + 1,
                    reason: format!("expected {order} sites, found {}", t.site_count()),
                });
            }
            if t.degree() != degree {
                return Err(Error::TableFormat {
                    line: i + 1,
                    reason: format!("expected degree {degree}, found {}", t.degree()),
                });
            }
            t.components(i)?;
        }
        Ok(Self { order, terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Renders the documented text format.
    pub fn dump(&self) -> String {
        let mut s = format!(
            "# order {} ({} terms, length degree {})\n",
            self.order,
            self.terms.len(),
            self.order - 2
        );
        for t in &self.terms {
            s.push_str(&t.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(order: usize, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let term = line.parse::<ClusterTerm>().map_err(|e| match e {
                Error::TableFormat { reason, .. } => Error::TableFormat {
                    line: lineno + 1,
                    reason,
                },
                other => other,
            })?;
            terms.push(term);
        }
        Self::new(order, terms)
    }
}

impl fmt::Display for ClusterTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ;", self.coefficient)?;
        for p in &self.site_powers {
            write!(f, " {p}")?;
        }
        write!(f, " ;")?;
        for l in &self.links {
            write!(f, " {}-{}:{}", l.a + 1, l.b + 1, l.power)?;
        }
        Ok(())
    }
}

impl FromStr for ClusterTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: String| Error::TableFormat { line: 0, reason };
        let fields: Vec<&str> = s.split(';').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(fail(format!("expected 3 ';'-separated fields, got {}", fields.len())));
        }
        let coefficient = Rational::from_str(fields[0])
            .map_err(|_| fail(format!("bad coefficient '{}'", fields[0])))?;
        let site_powers = fields[1]
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| fail(format!("bad site power '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        let links = fields[2]
            .split_whitespace()
            .map(|t| {
                let (pair, k) = t
                    .split_once(':')
                    .ok_or_else(|| fail(format!("bad link '{t}'")))?;
                let (a, b) = pair
                    .split_once('-')
                    .ok_or_else(|| fail(format!("bad link '{t}'")))?;
                let parse_site = |v: &str| -> Result<usize> {
                    match v.parse::<usize>() {
                        Ok(i) if i >= 1 => Ok(i - 1),
                        _ => Err(fail(format!("bad site index in '{t}'"))),
                    }
                };
                let power = k.parse::<u32>().map_err(|_| fail(format!("bad link power '{t}'")))?;
                Ok(AbsLink::new(parse_site(a)?, parse_site(b)?, power))
            })
            .collect::<Result<Vec<_>>>()?;
        if coefficient.is_zero() {
            return Err(fail("zero coefficient".into()));
        }
        Ok(Self::new(coefficient, site_powers, links))
    }
}
