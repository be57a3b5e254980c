use super::dendrogram::insert_on_edge;
use super::Dendrogram;
use crate::error::{Error, Result};

/// Largest leaf count `enumerate_trees` accepts (945 topologies).
pub const MAX_ENUMERATION_LEAVES: usize = 7;

/// Every unrooted binary topology on `labels`, each exactly once.
///
/// Trees are grown by stepwise addition: leaf `k` is inserted on each edge of
/// every tree over the first `k` leaves, giving `(2n - 5)!!` trees.
pub fn enumerate_trees(labels: &[String]) -> Result<std::vec::IntoIter<Dendrogram>> {
    let n = labels.len();
    if !(3..=MAX_ENUMERATION_LEAVES).contains(&n) {
        return Err(Error::invalid(format!(
            "tree enumeration supports 3..={MAX_ENUMERATION_LEAVES} leaves, got {n}"
        )));
    }
    let mut star = vec![Vec::with_capacity(3); 2 * n - 2];
    for leaf in 0..3 {
        star[leaf].push(n);
        star[n].push(leaf);
    }
    let mut partial = vec![star];
    for leaf in 3..n {
        let w = n + leaf - 2;
        let mut grown = Vec::with_capacity(partial.len() * (2 * leaf - 3));
        for adj in &partial {
            for (x, y) in partial_edges(adj) {
                let mut next = adj.clone();
                insert_on_edge(&mut next, x, y, w, leaf);
                grown.push(next);
            }
        }
        partial = grown;
    }
    let trees = partial
        .into_iter()
        .map(|adj| Dendrogram::from_parts(labels.to_vec(), adj))
        .collect::<Result<Vec<_>>>()?;
    Ok(trees.into_iter())
}

fn partial_edges(adj: &[Vec<usize>]) -> Vec<(usize, usize)> {
    adj.iter()
        .enumerate()
        .flat_map(|(v, nbrs)| nbrs.iter().filter(move |&&w| v < w).map(move |&w| (v, w)))
        .collect()
}
