use rand::Rng;

use super::quartet::{align, QuartetTable};
use super::{Dendrogram, TreeScore};
use crate::complexity::NcdMatrix;
use crate::error::Result;
use crate::seed::rng_from;

#[derive(Debug, Clone)]
pub struct ClimbReport {
    pub tree: Dendrogram,
    pub score: TreeScore,
    /// Normalized score of the starting tree, then after each accepted move.
    pub trace: Vec<f64>,
    pub proposals: usize,
}

/// Strict-improvement local search from `start`.
///
/// Each of the `budget` proposals is a leaf swap or a subtree prune and
/// regraft, chosen with equal probability. A proposal replaces the current
/// tree only if its normalized quartet score is strictly higher. The output
/// leaf order follows the matrix labels.
pub fn hill_climb(t0: &Dendrogram, m: &NcdMatrix, budget: usize, seed: u64) -> Result<Dendrogram> {
    Ok(hill_climb_report(t0, m, budget, seed)?.tree)
}

pub fn hill_climb_report(
    t0: &Dendrogram,
    m: &NcdMatrix,
    budget: usize,
    seed: u64,
) -> Result<ClimbReport> {
    let table = QuartetTable::new(m);
    let start = align(t0, m)?;
    Ok(climb_with_table(start, &table, budget, seed))
}

pub(crate) fn climb_with_table(
    start: Dendrogram,
    table: &QuartetTable,
    budget: usize,
    seed: u64,
) -> ClimbReport {
    let n = start.leaf_count();
    let mut current = start;
    let mut score = table.score_aligned(&current);
    let mut trace = vec![score.normalized];
    if n < 4 {
        return ClimbReport {
            tree: current,
            score,
            trace,
            proposals: 0,
        };
    }
    let mut rng = rng_from(seed);
    let mut candidate = current.clone();
    for _ in 0..budget {
        candidate.clone_from(&current);
        if rng.gen_bool(0.5) {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            candidate.swap_leaves(a, b);
        } else {
            candidate.random_spr(&mut rng);
        }
        let s = table.score_aligned(&candidate);
        if s.normalized > score.normalized {
            std::mem::swap(&mut current, &mut candidate);
            score = s;
            trace.push(score.normalized);
        }
    }
    ClimbReport {
        tree: current,
        score,
        trace,
        proposals: budget,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{enumerate_trees, neighbor_joining, quartet_score};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    fn random_matrix(n: usize, seed: u64) -> NcdMatrix {
        let mut rng = rng_from(seed);
        NcdMatrix::from_fn(labels(n), |_, _| rng.gen_range(0.0..1.0)).unwrap()
    }

    #[test]
    fn zero_budget_returns_start() {
        let m = random_matrix(6, 1);
        let t0 = Dendrogram::random(labels(6), &mut rng_from(2)).unwrap();
        let out = hill_climb(&t0, &m, 0, 9).unwrap();
        assert_eq!(out, t0);
    }

    #[test]
    fn never_worse_and_trace_monotone() {
        for seed in 0..5 {
            let m = random_matrix(8, seed);
            let t0 = Dendrogram::random(labels(8), &mut rng_from(seed + 50)).unwrap();
            let before = quartet_score(&t0, &m).unwrap().normalized;
            let report = hill_climb_report(&t0, &m, 500, seed).unwrap();
            assert!(report.score.normalized >= before);
            assert!(report.trace.windows(2).all(|w| w[1] > w[0]));
            assert_eq!(*report.trace.last().unwrap(), report.score.normalized);
            report.tree.validate().unwrap();
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let m = random_matrix(7, 4);
        let t0 = neighbor_joining(&m).unwrap();
        let a = hill_climb(&t0, &m, 300, 77).unwrap();
        let b = hill_climb(&t0, &m, 300, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reaches_brute_force_optimum_at_five_leaves() {
        let m = random_matrix(5, 12);
        let table = QuartetTable::new(&m);
        let best = enumerate_trees(&labels(5))
            .unwrap()
            .map(|t| table.score_aligned(&t).normalized)
            .fold(f64::NEG_INFINITY, f64::max);
        let t0 = Dendrogram::random(labels(5), &mut rng_from(3)).unwrap();
        let out = hill_climb_report(&t0, &m, 2000, 5).unwrap();
        assert_eq!(out.score.normalized, best);
    }
}
