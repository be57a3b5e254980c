//! Unrooted binary dendrograms built from a distance matrix.
//!
//! The pipeline is neighbor joining for a starting tree, then strict
//! hill climbing on the quartet objective. Small instances can be checked
//! against [`enumerate_trees`].

mod climb;
mod dendrogram;
mod enumerate;
mod newick;
mod nj;
mod quartet;

pub use climb::{hill_climb, hill_climb_report, ClimbReport};
pub use dendrogram::Dendrogram;
pub use enumerate::{enumerate_trees, MAX_ENUMERATION_LEAVES};
pub use newick::{parse_newick, to_newick};
pub use nj::neighbor_joining;
pub use quartet::{quartet_score, QuartetTable, TreeScore};

use crate::complexity::NcdMatrix;
use crate::error::Result;

/// Default hill-climb budget: ten thousand proposals per leaf.
pub fn default_budget(leaves: usize) -> usize {
    10_000 * leaves
}

/// Neighbor joining followed by hill climbing.
pub fn build_tree(m: &NcdMatrix, budget: usize, seed: u64) -> Result<ClimbReport> {
    let start = neighbor_joining(m)?;
    let table = QuartetTable::new(m);
    Ok(climb::climb_with_table(start, &table, budget, seed))
}
