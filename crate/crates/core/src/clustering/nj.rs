use super::Dendrogram;
use crate::complexity::NcdMatrix;
use crate::error::{Error, Result};

/// Neighbor joining over the off-diagonal entries of `m`.
///
/// At each step the active pair minimizing
/// `Q(i, j) = (r - 2) d(i, j) - R(i) - R(j)` is joined, where `r` is the number
/// of active nodes and `R` the row sums. Ties keep the first pair in
/// ascending `(i, j)` order. The last three active nodes share one internal
/// node. Branch lengths are not kept.
pub fn neighbor_joining(m: &NcdMatrix) -> Result<Dendrogram> {
    let n = m.len();
    if n < 3 {
        return Err(Error::invalid(format!(
            "neighbor joining needs at least 3 documents, got {n}"
        )));
    }
    let total = 2 * n - 2;
    let mut d = vec![0.0f64; total * total];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[i * total + j] = m.get(i, j);
            }
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(3); total];
    let mut active: Vec<usize> = (0..n).collect();
    let mut next = n;

    while active.len() > 3 {
        let r = active.len() as f64;
        let row_sum = |i: usize| active.iter().map(|&k| d[i * total + k]).sum::<f64>();
        let sums: Vec<f64> = active.iter().map(|&i| row_sum(i)).collect();

        let mut best = (f64::INFINITY, 0, 1);
        for a in 0..active.len() {
            for b in (a + 1)..active.len() {
                let (i, j) = (active[a], active[b]);
                let q = (r - 2.0) * d[i * total + j] - sums[a] - sums[b];
                if q < best.0 {
                    best = (q, a, b);
                }
            }
        }
        let (_, a, b) = best;
        let (i, j) = (active[a], active[b]);
        let u = next;
        next += 1;
        let dij = d[i * total + j];
        for &k in &active {
            if k != i && k != j {
                let v = 0.5 * (d[i * total + k] + d[j * total + k] - dij);
                d[u * total + k] = v;
                d[k * total + u] = v;
            }
        }
        for x in [i, j] {
            adj[u].push(x);
            adj[x].push(u);
        }
        // b > a, so removing b first keeps a's position valid
        active.remove(b);
        active.remove(a);
        active.push(u);
    }

    let center = next;
    for &x in &active {
        adj[center].push(x);
        adj[x].push(center);
    }
    Dendrogram::from_parts(m.labels().to_vec(), adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n)
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect()
    }

    #[test]
    fn three_leaves_make_a_star() {
        let m = NcdMatrix::from_fn(labels(3), |i, j| (i + j) as f64 / 10.0).unwrap();
        let t = neighbor_joining(&m).unwrap();
        assert_eq!(t.node_count(), 4);
        assert!(t.splits().is_empty());
    }

    #[test]
    fn four_leaves_pair_the_close_ones() {
        let close = |i: usize, j: usize| (i / 2) == (j / 2);
        let m = NcdMatrix::from_fn(labels(4), |i, j| if close(i, j) { 0.1 } else { 0.9 }).unwrap();
        let t = neighbor_joining(&m).unwrap();
        let splits: Vec<_> = t.splits().into_iter().collect();
        assert_eq!(splits, vec![vec!["c".to_string(), "d".to_string()]]);
    }

    #[test]
    fn too_small_is_rejected() {
        let m = NcdMatrix::from_fn(labels(2), |_, _| 0.5).unwrap();
        assert!(neighbor_joining(&m).is_err());
    }

    #[test]
    fn additive_distances_recover_the_tree() {
        // caterpillar ((a,b),c,(d,(e,f))) with unit edges: distances are path lengths
        let truth = crate::clustering::parse_newick("((a,b),c,(d,(e,f)));").unwrap();
        let truth = truth.reindexed(&labels(6)).unwrap();
        let d = truth.leaf_path_edges();
        let m = NcdMatrix::from_fn(labels(6), |i, j| d[i * 6 + j] as f64).unwrap();
        assert!(neighbor_joining(&m).unwrap().same_topology(&truth));
    }
}
