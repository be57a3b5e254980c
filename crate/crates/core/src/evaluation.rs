//! Clustering error of a dendrogram against a known grouping.
//!
//! The distance between two leaves is the number of internal nodes on the path
//! joining them, so two leaves on the same cherry are at distance 1. The error
//! of a tree is the sum of that distance over every unordered pair of leaves
//! that share a group; lower is better.
//!
//! The ideal error for a grouping is the minimum over all trees. Up to
//! [`MAX_ENUMERATION_LEAVES`] leaves it is found by enumeration. Beyond that a
//! packing construction is used: every group of two or more becomes its own
//! clade, shaped to minimize its internal error, and clades and ungrouped
//! leaves hang off a caterpillar backbone. Any other arrangement attaches the
//! rest of the tree to at least one more edge of some group's subtree, and
//! each such attachment costs at least as much as the cheapest one, so the
//! packing value is also the minimum; it is still labelled as constructive.

use std::collections::BTreeMap;
use std::rc::Rc;

use crate::clustering::{enumerate_trees, Dendrogram, MAX_ENUMERATION_LEAVES};
use crate::corpus::Document;
use crate::error::{Error, Result};

/// Document id → group tag.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Grouping {
    groups: BTreeMap<String, String>,
}

impl Grouping {
    pub fn new(groups: BTreeMap<String, String>) -> Self {
        Grouping { groups }
    }

    pub fn from_documents(docs: &[Document]) -> Self {
        Grouping {
            groups: docs
                .iter()
                .map(|d| (d.id().to_string(), d.group_tag().to_string()))
                .collect(),
        }
    }

    /// Groups labels by the text before their first `.`; a label without a dot
    /// is its own group.
    pub fn by_label_prefix<S: AsRef<str>>(labels: &[S]) -> Self {
        Grouping {
            groups: labels
                .iter()
                .map(|l| {
                    let l = l.as_ref();
                    let group = l.split_once('.').map_or(l, |(g, _)| g);
                    (l.to_string(), group.to_string())
                })
                .collect(),
        }
    }

    pub fn group_of(&self, label: &str) -> Option<&str> {
        self.groups.get(label).map(String::as_str)
    }

    pub fn insert(&mut self, label: impl Into<String>, group: impl Into<String>) {
        self.groups.insert(label.into(), group.into());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdealMethod {
    /// Minimum over every topology.
    Enumerated,
    /// Value of the packing tree.
    Packing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdealError {
    pub value: u64,
    pub method: IdealMethod,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorReport {
    pub total: u64,
    pub per_group: BTreeMap<String, u64>,
    pub ideal: IdealError,
}

/// Internal nodes on the path between two distinct leaves.
pub fn leaf_distance(t: &Dendrogram, a: &str, b: &str) -> Result<u64> {
    let ia = t
        .leaf_index(a)
        .ok_or_else(|| Error::UnknownLeaf(a.to_string()))?;
    let ib = t
        .leaf_index(b)
        .ok_or_else(|| Error::UnknownLeaf(b.to_string()))?;
    if ia == ib {
        return Err(Error::invalid(format!("leaf distance of `{a}` to itself")));
    }
    let n = t.leaf_count();
    Ok(u64::from(t.leaf_path_edges()[ia * n + ib]) - 1)
}

fn group_members(t: &Dendrogram, g: &Grouping) -> Result<BTreeMap<String, Vec<usize>>> {
    let mut members: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, label) in t.labels().iter().enumerate() {
        let group = g
            .group_of(label)
            .ok_or_else(|| Error::UngroupedLeaf(label.clone()))?;
        members.entry(group.to_string()).or_default().push(i);
    }
    Ok(members)
}

fn error_of(t: &Dendrogram, members: &BTreeMap<String, Vec<usize>>) -> BTreeMap<String, u64> {
    let n = t.leaf_count();
    let d = t.leaf_path_edges();
    members
        .iter()
        .map(|(group, leaves)| {
            let mut sum = 0u64;
            for (k, &a) in leaves.iter().enumerate() {
                for &b in &leaves[k + 1..] {
                    sum += u64::from(d[a * n + b]) - 1;
                }
            }
            (group.clone(), sum)
        })
        .collect()
}

pub fn clustering_error(t: &Dendrogram, g: &Grouping) -> Result<ErrorReport> {
    let members = group_members(t, g)?;
    let per_group = error_of(t, &members);
    let sizes: Vec<usize> = members.values().map(Vec::len).collect();
    let ideal = ideal_error(&sizes, t.leaf_count())?;
    Ok(ErrorReport {
        total: per_group.values().sum(),
        per_group,
        ideal,
    })
}

fn check_sizes(group_sizes: &[usize], n_total: usize) -> Result<()> {
    if n_total < 3 {
        return Err(Error::invalid(format!(
            "a dendrogram needs at least 3 leaves, got {n_total}"
        )));
    }
    if group_sizes.contains(&0) {
        return Err(Error::invalid("group sizes must be positive"));
    }
    let sum: usize = group_sizes.iter().sum();
    if sum > n_total {
        return Err(Error::invalid(format!(
            "group sizes sum to {sum}, more than the {n_total} leaves"
        )));
    }
    Ok(())
}

/// Minimum clustering error over all trees with `n_total` leaves, where the
/// listed groups are the only same-group relations (remaining leaves are
/// ungrouped). Enumerates up to seven leaves, otherwise uses the packing.
pub fn ideal_error(group_sizes: &[usize], n_total: usize) -> Result<IdealError> {
    check_sizes(group_sizes, n_total)?;
    if n_total <= MAX_ENUMERATION_LEAVES {
        Ok(IdealError {
            value: enumerated_ideal(group_sizes, n_total)?,
            method: IdealMethod::Enumerated,
        })
    } else {
        Ok(IdealError {
            value: packing_ideal(group_sizes, n_total)?,
            method: IdealMethod::Packing,
        })
    }
}

fn synthetic_labels(group_sizes: &[usize], n_total: usize) -> (Vec<String>, Grouping) {
    let mut labels = Vec::with_capacity(n_total);
    let mut grouping = Grouping::default();
    for (g, &size) in group_sizes.iter().enumerate() {
        for j in 0..size {
            let label = format!("g{g}.{j}");
            grouping.insert(&label, format!("g{g}"));
            labels.push(label);
        }
    }
    for j in labels.len()..n_total {
        let label = format!("s{j}");
        grouping.insert(&label, &label);
        labels.push(label);
    }
    (labels, grouping)
}

/// Brute-force minimum over [`enumerate_trees`].
pub fn enumerated_ideal(group_sizes: &[usize], n_total: usize) -> Result<u64> {
    check_sizes(group_sizes, n_total)?;
    let (labels, grouping) = synthetic_labels(group_sizes, n_total);
    let mut best = u64::MAX;
    for t in enumerate_trees(&labels)? {
        let members = group_members(&t, &grouping)?;
        best = best.min(error_of(&t, &members).values().sum());
    }
    Ok(best)
}

/// Clustering error of [`packing_tree`].
pub fn packing_ideal(group_sizes: &[usize], n_total: usize) -> Result<u64> {
    let (tree, grouping) = packing_tree(group_sizes, n_total)?;
    clustering_error_unchecked(&tree, &grouping)
}

fn clustering_error_unchecked(t: &Dendrogram, g: &Grouping) -> Result<u64> {
    let members = group_members(t, g)?;
    Ok(error_of(t, &members).values().sum())
}

#[derive(Debug)]
enum Shape {
    Leaf,
    Join(Rc<Shape>, Rc<Shape>),
}

/// A rooted clade shape: `cost` is its same-group error, `depth_sum` the sum
/// of leaf depths (edges) below its root.
#[derive(Debug, Clone)]
struct Clade {
    cost: u64,
    depth_sum: u64,
    shape: Rc<Shape>,
}

/// Pareto fronts over (cost, depth_sum) for rooted clades of 1..=k leaves.
fn clade_fronts(k: usize) -> Vec<Vec<Clade>> {
    let mut fronts: Vec<Vec<Clade>> = vec![Vec::new(); k + 1];
    if k == 0 {
        return fronts;
    }
    fronts[1] = vec![Clade {
        cost: 0,
        depth_sum: 0,
        shape: Rc::new(Shape::Leaf),
    }];
    for size in 2..=k {
        let mut candidates = Vec::new();
        for a in 1..=size / 2 {
            let b = size - a;
            let (a64, b64) = (a as u64, b as u64);
            for left in &fronts[a] {
                for right in &fronts[b] {
                    candidates.push(Clade {
                        cost: left.cost
                            + right.cost
                            + b64 * left.depth_sum
                            + a64 * right.depth_sum
                            + a64 * b64,
                        depth_sum: left.depth_sum + right.depth_sum + a64 + b64,
                        shape: Rc::new(Shape::Join(left.shape.clone(), right.shape.clone())),
                    });
                }
            }
        }
        candidates.sort_by_key(|c| (c.cost, c.depth_sum));
        let mut front: Vec<Clade> = Vec::new();
        for c in candidates {
            if front.last().is_none_or(|last| c.depth_sum < last.depth_sum) {
                front.push(c);
            }
        }
        fronts[size] = front;
    }
    fronts
}

struct Builder {
    adj: Vec<Vec<usize>>,
    next_internal: usize,
}

impl Builder {
    fn link(&mut self, a: usize, b: usize) {
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    fn internal(&mut self) -> usize {
        let v = self.next_internal;
        self.next_internal += 1;
        v
    }

    /// Lays out `shape` over `leaves` and returns its root node.
    fn clade(&mut self, shape: &Shape, leaves: &mut impl Iterator<Item = usize>) -> usize {
        match shape {
            Shape::Leaf => leaves.next().expect("shape size matches leaf count"),
            Shape::Join(l, r) => {
                let v = self.internal();
                let a = self.clade(l, leaves);
                let b = self.clade(r, leaves);
                self.link(v, a);
                self.link(v, b);
                v
            }
        }
    }
}

/// The packing tree and its grouping. Group `g` contributes leaves `g{g}.{j}`;
/// ungrouped leaves are `s{j}`.
pub fn packing_tree(group_sizes: &[usize], n_total: usize) -> Result<(Dendrogram, Grouping)> {
    check_sizes(group_sizes, n_total)?;
    let (labels, grouping) = synthetic_labels(group_sizes, n_total);
    let largest = group_sizes.iter().copied().max().unwrap_or(1).max(1);
    let fronts = clade_fronts(largest);
    let mut b = Builder {
        adj: vec![Vec::with_capacity(3); 2 * n_total - 2],
        next_internal: n_total,
    };
    let mut leaves = 0..n_total;

    let grouped: usize = group_sizes.iter().sum();
    let items = group_sizes.len() + (n_total - grouped);
    if items == 1 {
        // one group holds every leaf: join the best pair of clades by an edge
        let k = n_total;
        let mut best: Option<(u64, &Clade, &Clade)> = None;
        for a in 1..=k / 2 {
            let bsize = k - a;
            for left in &fronts[a] {
                for right in &fronts[bsize] {
                    let cost = left.cost
                        + right.cost
                        + bsize as u64 * left.depth_sum
                        + a as u64 * right.depth_sum;
                    if best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
                        best = Some((cost, left, right));
                    }
                }
            }
        }
        let (_, left, right) = best.expect("k >= 3 has a split");
        let x = b.clade(&left.shape, &mut leaves);
        let y = b.clade(&right.shape, &mut leaves);
        b.link(x, y);
    } else {
        let mut roots = Vec::with_capacity(items);
        for &size in group_sizes {
            // cheapest cost first; depth only matters when joining clades
            let shape = fronts[size][0].shape.clone();
            roots.push(b.clade(&shape, &mut leaves));
        }
        roots.extend(&mut leaves);
        if roots.len() == 2 {
            b.link(roots[0], roots[1]);
        } else {
            let spine: Vec<usize> = (0..roots.len() - 2).map(|_| b.internal()).collect();
            b.link(spine[0], roots[0]);
            for (i, &v) in spine.iter().enumerate() {
                b.link(v, roots[i + 1]);
                if i + 1 < spine.len() {
                    b.link(v, spine[i + 1]);
                }
            }
            b.link(
                *spine.last().expect("non-empty spine"),
                roots[roots.len() - 1],
            );
        }
    }
    let tree = Dendrogram::from_parts(labels, b.adj)?;
    Ok((tree, grouping))
}
