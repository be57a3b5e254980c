use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::Rng;

use crate::error::{Error, Result};

/// Unrooted binary tree with labeled leaves.
///
/// Nodes `0..n` are the leaves (node `i` carries `labels[i]`); nodes
/// `n..2n-2` are internal and have degree exactly 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dendrogram {
    labels: Vec<String>,
    adj: Vec<Vec<usize>>,
}

impl Dendrogram {
    /// Builds and validates a tree from an undirected edge list.
    pub fn from_edges(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        if n < 3 {
            return Err(Error::invalid(format!(
                "a dendrogram needs at least 3 leaves, got {n}"
            )));
        }
        let nodes = 2 * n - 2;
        let mut adj = vec![Vec::with_capacity(3); nodes];
        for &(a, b) in edges {
            if a >= nodes || b >= nodes || a == b {
                return Err(Error::invalid(format!(
                    "bad edge ({a}, {b}) for {nodes} nodes"
                )));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let t = Dendrogram { labels, adj };
        t.validate()?;
        Ok(t)
    }

    pub(crate) fn from_parts(labels: Vec<String>, adj: Vec<Vec<usize>>) -> Result<Self> {
        let t = Dendrogram { labels, adj };
        t.validate()?;
        Ok(t)
    }

    /// The only tree on three leaves.
    pub fn star(labels: Vec<String>) -> Result<Self> {
        if labels.len() != 3 {
            return Err(Error::invalid("a star has exactly three leaves"));
        }
        Self::from_edges(labels, &[(0, 3), (1, 3), (2, 3)])
    }

    /// Checks degrees, node count, label uniqueness and connectivity.
    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if n < 3 || self.adj.len() != 2 * n - 2 {
            return Err(Error::invalid(format!(
                "{n} leaves need {} nodes, found {}",
                2 * n.max(2) - 2,
                self.adj.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = self.labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::DuplicateId(dup.clone()));
        }
        for (v, nbrs) in self.adj.iter().enumerate() {
            let want = if v < n { 1 } else { 3 };
            if nbrs.len() != want {
                return Err(Error::invalid(format!(
                    "node {v} has degree {}, expected {want}",
                    nbrs.len()
                )));
            }
        }
        // n + 3(n-2) half-edges = 2n-3 edges on 2n-2 nodes: connected means tree
        let mut visited = vec![false; self.adj.len()];
        let mut stack = vec![0];
        visited[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != self.adj.len() {
            return Err(Error::invalid("dendrogram is not connected"));
        }
        Ok(())
    }

    pub fn leaf_count(&self) -> usize {
        self.labels.len()
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        node < self.labels.len()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn leaf_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Undirected edges as `(low, high)` node pairs, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(v, nbrs)| nbrs.iter().filter(move |&&w| v < w).map(move |&w| (v, w)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Number of edges between every pair of leaves, row-major `n × n`.
    pub fn leaf_path_edges(&self) -> Vec<u32> {
        let n = self.labels.len();
        let mut out = vec![0u32; n * n];
        let mut depth = vec![u32::MAX; self.adj.len()];
        let mut queue = VecDeque::new();
        for src in 0..n {
            depth.iter_mut().for_each(|d| *d = u32::MAX);
            depth[src] = 0;
            queue.push_back(src);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adj[v] {
                    if depth[w] == u32::MAX {
                        depth[w] = depth[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            out[src * n..(src + 1) * n].copy_from_slice(&depth[..n]);
        }
        out
    }

    /// Non-trivial splits, each given by the side that does not contain the
    /// lexicographically smallest label. Two trees have the same topology iff
    /// their split sets are equal.
    pub fn splits(&self) -> BTreeSet<Vec<String>> {
        let n = self.labels.len();
        let anchor = (0..n).min_by_key(|&i| &self.labels[i]).expect("non-empty");
        let mut out = BTreeSet::new();
        for (a, b) in self.edges() {
            if self.is_leaf(a) || self.is_leaf(b) {
                continue;
            }
            let side = self.leaves_beyond(a, b);
            let side: Vec<usize> = if side.contains(&anchor) {
                (0..n).filter(|i| !side.contains(i)).collect()
            } else {
                side
            };
            let mut names: Vec<String> = side.iter().map(|&i| self.labels[i].clone()).collect();
            names.sort();
            out.insert(names);
        }
        out
    }

    pub fn same_topology(&self, other: &Dendrogram) -> bool {
        let mine: BTreeSet<&String> = self.labels.iter().collect();
        let theirs: BTreeSet<&String> = other.labels.iter().collect();
        mine == theirs && self.splits() == other.splits()
    }

    /// Leaves reachable from `to` without crossing back over the edge `from–to`.
    pub(crate) fn leaves_beyond(&self, from: usize, to: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![(from, to)];
        while let Some((parent, v)) = stack.pop() {
            if self.is_leaf(v) {
                out.push(v);
            }
            for &w in &self.adj[v] {
                if w != parent {
                    stack.push((v, w));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The same tree with leaves renumbered so that leaf `i` carries `order[i]`.
    pub fn reindexed(&self, order: &[String]) -> Result<Dendrogram> {
        let n = self.labels.len();
        if order.len() != n {
            return Err(Error::invalid(format!(
                "tree has {n} leaves but {} labels were given",
                order.len()
            )));
        }
        let index: HashMap<&str, usize> = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        // old node id -> new node id
        let mut map: Vec<usize> = (0..self.adj.len()).collect();
        let mut seen = vec![false; n];
        for (new, label) in order.iter().enumerate() {
            let &old = index
                .get(label.as_str())
                .ok_or_else(|| Error::UnknownLeaf(label.clone()))?;
            if seen[old] {
                return Err(Error::DuplicateId(label.clone()));
            }
            seen[old] = true;
            map[old] = new;
        }
        let mut adj = vec![Vec::new(); self.adj.len()];
        for (v, nbrs) in self.adj.iter().enumerate() {
            adj[map[v]] = nbrs.iter().map(|&w| map[w]).collect();
        }
        Dendrogram::from_parts(order.to_vec(), adj)
    }

    fn replace_neighbor(&mut self, node: usize, old: usize, new: usize) {
        let slot = self.adj[node]
            .iter_mut()
            .find(|w| **w == old)
            .expect("edge present");
        *slot = new;
    }

    /// Exchanges the positions of two leaves.
    pub(crate) fn swap_leaves(&mut self, a: usize, b: usize) {
        let (pa, pb) = (self.adj[a][0], self.adj[b][0]);
        if pa == pb {
            return;
        }
        self.replace_neighbor(pa, a, b);
        self.replace_neighbor(pb, b, a);
        self.adj[a][0] = pb;
        self.adj[b][0] = pa;
    }

    /// Subtree prune and regraft: detach the subtree hanging from internal
    /// node `u` toward `v`, then reattach it on a uniformly chosen edge of the
    /// remaining tree. Needs at least four leaves.
    pub(crate) fn random_spr<R: Rng>(&mut self, rng: &mut R) {
        let n = self.labels.len();
        debug_assert!(n >= 4);
        let u = rng.gen_range(n..self.adj.len());
        let v = self.adj[u][rng.gen_range(0..3)];
        let others: Vec<usize> = self.adj[u].iter().copied().filter(|&w| w != v).collect();
        let (p, q) = (others[0], others[1]);
        self.replace_neighbor(p, u, q);
        self.replace_neighbor(q, u, p);
        self.adj[u] = vec![v];

        let mut edges = Vec::new();
        let mut stack = vec![(usize::MAX, p)];
        while let Some((parent, x)) = stack.pop() {
            for &y in &self.adj[x] {
                if y != parent {
                    edges.push((x, y));
                    stack.push((x, y));
                }
            }
        }
        let (x, y) = edges[rng.gen_range(0..edges.len())];
        self.replace_neighbor(x, y, u);
        self.replace_neighbor(y, x, u);
        self.adj[u] = vec![v, x, y];
    }

    /// A uniformly random topology, grown by random stepwise leaf insertion.
    pub fn random<R: Rng>(labels: Vec<String>, rng: &mut R) -> Result<Dendrogram> {
        let n = labels.len();
        if n < 3 {
            return Err(Error::invalid(format!(
                "a dendrogram needs at least 3 leaves, got {n}"
            )));
        }
        let mut adj = vec![Vec::with_capacity(3); 2 * n - 2];
        for leaf in 0..3 {
            adj[leaf].push(n);
            adj[n].push(leaf);
        }
        let mut edges = vec![(0, n), (1, n), (2, n)];
        for leaf in 3..n {
            let w = n + leaf - 2;
            let k = rng.gen_range(0..edges.len());
            let (x, y) = edges[k];
            insert_on_edge(&mut adj, x, y, w, leaf);
            edges[k] = (x, w);
            edges.push((w, y));
            edges.push((w, leaf));
        }
        Dendrogram::from_parts(labels, adj)
    }
}

/// Subdivides edge `x–y` with new node `w` and hangs `leaf` from it.
pub(crate) fn insert_on_edge(adj: &mut [Vec<usize>], x: usize, y: usize, w: usize, leaf: usize) {
    for (a, b) in [(x, y), (y, x)] {
        let slot = adj[a].iter_mut().find(|z| **z == b).expect("edge present");
        *slot = w;
    }
    adj[w] = vec![x, y, leaf];
    adj[leaf] = vec![w];
}
