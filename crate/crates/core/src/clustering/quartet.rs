use super::Dendrogram;
use crate::complexity::NcdMatrix;
use crate::error::{Error, Result};

/// Quartet objective of a tree against a distance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeScore {
    /// Sum over leaf quartets of the cost of the pairing the tree induces.
    pub raw: f64,
    /// `(worst - raw) / (worst - best)`; 1 when every quartet takes its
    /// cheapest pairing.
    pub normalized: f64,
}

/// Per-quartet pairing costs for one matrix, reused across many trees.
///
/// For leaves `a < b < c < d` the three pairings are `ab|cd`, `ac|bd` and
/// `ad|bc`; a pairing costs the sum of its two within-pair distances.
#[derive(Debug, Clone)]
pub struct QuartetTable {
    n: usize,
    quartets: Vec<[u32; 4]>,
    costs: Vec<[f64; 3]>,
    best: f64,
    worst: f64,
}

impl QuartetTable {
    pub fn new(m: &NcdMatrix) -> Self {
        let n = m.len();
        let mut quartets = Vec::new();
        let mut costs = Vec::new();
        let (mut best, mut worst) = (0.0, 0.0);
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    for d in (c + 1)..n {
                        let cost = [
                            m.get(a, b) + m.get(c, d),
                            m.get(a, c) + m.get(b, d),
                            m.get(a, d) + m.get(b, c),
                        ];
                        best += cost.iter().copied().fold(f64::INFINITY, f64::min);
                        worst += cost.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        quartets.push([a as u32, b as u32, c as u32, d as u32]);
                        costs.push(cost);
                    }
                }
            }
        }
        QuartetTable {
            n,
            quartets,
            costs,
            best,
            worst,
        }
    }

    pub fn best(&self) -> f64 {
        self.best
    }

    pub fn worst(&self) -> f64 {
        self.worst
    }

    pub fn normalize(&self, raw: f64) -> f64 {
        if self.worst > self.best {
            (self.worst - raw) / (self.worst - self.best)
        } else {
            1.0
        }
    }

    /// Scores a tree whose leaf `i` is matrix row `i`.
    pub(crate) fn score_aligned(&self, t: &Dendrogram) -> TreeScore {
        debug_assert_eq!(t.leaf_count(), self.n);
        let n = self.n;
        let d = t.leaf_path_edges();
        let at = |x: u32, y: u32| d[x as usize * n + y as usize];
        let mut raw = 0.0;
        for (&[a, b, c, e], cost) in self.quartets.iter().zip(&self.costs) {
            let s = [
                at(a, b) + at(c, e),
                at(a, c) + at(b, e),
                at(a, e) + at(b, c),
            ];
            // in a binary tree exactly one pairing has the strictly shortest paths
            let k = if s[0] < s[1] && s[0] < s[2] {
                0
            } else if s[1] < s[2] {
                1
            } else {
                2
            };
            raw += cost[k];
        }
        TreeScore {
            raw,
            normalized: self.normalize(raw),
        }
    }
}

pub fn quartet_score(t: &Dendrogram, m: &NcdMatrix) -> Result<TreeScore> {
    let aligned = align(t, m)?;
    Ok(QuartetTable::new(m).score_aligned(&aligned))
}

/// `t` renumbered so that leaf `i` is matrix row `i`.
pub(crate) fn align(t: &Dendrogram, m: &NcdMatrix) -> Result<Dendrogram> {
    if t.leaf_count() != m.len() {
        return Err(Error::invalid(format!(
            "tree has {} leaves but the matrix has {} labels",
            t.leaf_count(),
            m.len()
        )));
    }
    if t.labels() == m.labels() {
        return Ok(t.clone());
    }
    t.reindexed(m.labels())
}
