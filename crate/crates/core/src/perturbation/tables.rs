//! Correction formulas for orders 2 through 6, transcribed in the grouped
//! form they are usually written in and expanded into cluster terms.
//!
//! Sites are 1-based in the source data below. `d_i` stands for
//! `x_i - x_{i+1}`.

use std::sync::OnceLock;

use super::terms::{AbsLink, ClusterTerm, Rational, TermTable};

/// (numerator, denominator, chains as (first site, link powers)).
type ChainEntry = (i64, i64, &'static [(usize, &'static [u32])]);
/// (numerator, denominator, site pairs).
type LinkEntry = (i64, i64, &'static [(usize, usize)]);
/// (numerator, denominator, first site, second site).
type BracketEntry = (i64, i64, usize, usize);

/// Orders 2..=5: `μ_0` powers times plain chains. Each entry is the
/// coefficient followed by chains given as (first site, link powers).
const LOW_ORDER: [&[ChainEntry]; 4] = [
    // E2 = -μ0²/4
    &[(-1, 4, &[])],
    // E3 = -μ0/4 · C[1]
    &[(-1, 4, &[(2, &[1])])],
    // E4
    &[
        (-1, 16, &[(3, &[2])]),
        (-1, 8, &[(2, &[1, 1])]),
        (-1, 16, &[(1, &[1]), (3, &[1])]),
    ],
    // E5
    &[
        (-1, 96, &[(4, &[3])]),
        (-1, 16, &[(3, &[1, 2])]),
        (-1, 16, &[(2, &[1, 1, 1])]),
        (-1, 16, &[(2, &[1]), (4, &[2])]),
        (-1, 16, &[(1, &[1]), (3, &[1, 1])]),
    ],
];

/// E6, μ0² block: monomials in x1..x4, sites 5 and 6 free.
const E6_MONOMIALS: [(i64, i64, [u32; 4]); 5] = [
    (-1, 96, [4, 0, 0, 0]),
    (1, 24, [3, 1, 0, 0]),
    (-5, 64, [2, 2, 0, 0]),
    (3, 32, [2, 1, 1, 0]),
    (-3, 64, [1, 1, 1, 1]),
];

/// E6, bracket multiplying |x1-x2| |x2-x3|: entries `(num, den, i, j)` for `d_i d_j`.
const E6_BRACKET_CHAIN: [BracketEntry; 15] = [
    (-1, 48, 1, 1),
    (-1, 32, 2, 1),
    (-1, 32, 3, 1),
    (-1, 48, 4, 1),
    (-1, 96, 5, 1),
    (-1, 48, 2, 2),
    (-1, 32, 3, 3),
    (-1, 24, 4, 4),
    (-1, 32, 5, 5),
    (-1, 32, 2, 3),
    (-1, 48, 2, 4),
    (-1, 24, 3, 4),
    (-1, 96, 2, 5),
    (-1, 48, 3, 5),
    (-1, 24, 4, 5),
];

/// E6, bracket multiplying |x1-x2| |x3-x4|.
const E6_BRACKET_PAIR: [BracketEntry; 15] = [
    (-1, 32, 1, 1),
    (-3, 64, 2, 1),
    (-5, 128, 3, 1),
    (-1, 32, 4, 1),
    (-1, 64, 5, 1),
    (-3, 64, 2, 2),
    (-1, 16, 3, 3),
    (-1, 16, 4, 4),
    (-3, 64, 5, 5),
    (-5, 64, 2, 3),
    (-1, 16, 2, 4),
    (-3, 32, 3, 4),
    (-1, 32, 2, 5),
    (-3, 64, 3, 5),
    (-1, 16, 4, 5),
];

/// E6, pure link products with unit powers.
const E6_LINKS: [LinkEntry; 3] = [
    (-1, 32, &[(1, 2), (2, 3), (3, 4), (4, 5)]),
    (-1, 64, &[(1, 2), (2, 3), (4, 5), (5, 6)]),
    (-1, 32, &[(1, 2), (2, 3), (3, 4), (5, 6)]),
];

/// Accumulates terms, merging identical kernels in order of first appearance.
struct Builder {
    sites: usize,
    terms: Vec<ClusterTerm>,
}

impl Builder {
    fn new(sites: usize) -> Self {
        Self {
            sites,
            terms: Vec::new(),
        }
    }

    fn add(&mut self, c: Rational, site_powers: Vec<u32>, links: Vec<AbsLink>) {
        debug_assert_eq!(site_powers.len(), self.sites);
        if let Some(t) = self
            .terms
            .iter_mut()
            .find(|t| t.site_powers == site_powers && t.links == links)
        {
            t.coefficient += c;
        } else {
            self.terms.push(ClusterTerm::new(c, site_powers, links));
        }
    }

    fn finish(self, order: usize) -> TermTable {
        let terms = self
            .terms
            .into_iter()
            .filter(|t| t.coefficient != Rational::from_integer(0))
            .collect();
        TermTable::new(order, terms).expect("built-in term table is valid")
    }
}

fn link(a: usize, b: usize, k: u32) -> AbsLink {
    AbsLink::new(a - 1, b - 1, k)
}

fn low_order(order: usize) -> TermTable {
    let mut b = Builder::new(order);
    for &(num, den, chains) in LOW_ORDER[order - 2] {
        let mut links = Vec::new();
        for &(first, powers) in chains {
            for (i, &k) in powers.iter().enumerate() {
                links.push(link(first + i, first + i + 1, k));
            }
        }
        b.add(Rational::new(num, den), vec![0; order], links);
    }
    b.finish(order)
}

fn sixth_order() -> TermTable {
    let mut b = Builder::new(6);
    for (num, den, m) in E6_MONOMIALS {
        let mut p = vec![0; 6];
        p[..4].copy_from_slice(&m);
        b.add(Rational::new(num, den), p, Vec::new());
    }
    let blocks: [(&[BracketEntry], Vec<AbsLink>); 2] = [
        (&E6_BRACKET_CHAIN, vec![link(1, 2, 1), link(2, 3, 1)]),
        (&E6_BRACKET_PAIR, vec![link(1, 2, 1), link(3, 4, 1)]),
    ];
    for (bracket, links) in blocks {
        for &(num, den, i, j) in bracket {
            // d_i d_j expanded into four monomials
            for (si, ci) in [(i, 1i64), (i + 1, -1)] {
                for (sj, cj) in [(j, 1i64), (j + 1, -1)] {
                    let mut p = vec![0; 6];
                    p[si - 1] += 1;
                    p[sj - 1] += 1;
                    b.add(Rational::new(num * ci * cj, den), p, links.clone());
                }
            }
        }
    }
    for (num, den, pairs) in E6_LINKS {
        let links = pairs.iter().map(|&(a, c)| link(a, c, 1)).collect();
        b.add(Rational::new(num, den), vec![0; 6], links);
    }
    b.finish(6)
}

/// Built-in table for `order` in 2..=6.
pub fn table(order: usize) -> Option<&'static TermTable> {
    static TABLES: OnceLock<Vec<TermTable>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        let mut v: Vec<TermTable> = (2..=5).map(low_order).collect();
        v.push(sixth_order());
        v
    });
    order.checked_sub(2).and_then(|i| tables.get(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let sizes: Vec<usize> = (2..=6).map(|n| table(n).unwrap().len()).collect();
        assert_eq!(sizes, vec![1, 1, 3, 5, 46]);
        assert!(table(1).is_none());
        assert!(table(7).is_none());
    }

    #[test]
    fn dump_parse_round_trip() {
        for n in 2..=6 {
            let t = table(n).unwrap();
            assert_eq!(&TermTable::parse(n, &t.dump()).unwrap(), t);
        }
    }

    #[test]
    fn sixth_order_coefficients_are_exact() {
        let t = table(6).unwrap();
        // d1² |x1-x2||x2-x3| contributes -1/48 x1², nothing else lands there
        let x1sq = t
            .terms
            .iter()
            .find(|c| c.site_powers == [2, 0, 0, 0, 0, 0] && c.links.len() == 2 && c.links[1].a == 1)
            .unwrap();
        assert_eq!(x1sq.coefficient, Rational::new(-1, 48));
    }
}
