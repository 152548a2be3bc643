//! Optimal expanding search on a rooted tree by density merging.
//!
//! Every non-root vertex starts as a cluster whose length is its parent edge.
//! The densest cluster (mass / length) is appended to the cluster containing
//! its parent until only the root cluster is left; its order is optimal.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{ExpandingSearch, Instance, RootedTree, Vertex, ROOT};

/// The optimal visiting order of a tree and its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSequence {
    /// Tree vertices in visiting order, root excluded.
    pub order: Vec<Vertex>,
    /// Tree edges as (parent, child) in visiting order.
    pub steps: Vec<(Vertex, Vertex)>,
    pub cost: f64,
}

impl TreeSequence {
    pub fn search(&self) -> ExpandingSearch {
        ExpandingSearch::new(self.steps.clone())
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Key {
    mass: f64,
    length: f64,
    min_id: Vertex,
    head: Vertex,
    version: u32,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        // compare mass/length without dividing
        (self.mass * other.length)
            .total_cmp(&(other.mass * self.length))
            .then(Reverse(self.min_id).cmp(&Reverse(other.min_id)))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sequences the vertices of `tree` optimally under vertex weights `prob`.
pub fn sequence_tree(tree: &RootedTree, prob: &[f64]) -> TreeSequence {
    let n = tree.host_size();
    // cluster bookkeeping indexed by the cluster's head vertex
    let mut owner: Vec<Vertex> = (0..n).collect();
    let mut next = vec![usize::MAX; n];
    let mut tail: Vec<Vertex> = (0..n).collect();
    let mut mass = prob.to_vec();
    let mut length = vec![0.0; n];
    let mut min_id: Vec<Vertex> = (0..n).collect();
    let mut version = vec![0u32; n];
    let mut merged = vec![false; n];

    let mut heap = BinaryHeap::new();
    for v in tree.vertices().filter(|&v| v != ROOT) {
        let (_, len) = tree.parent(v).expect("non-root tree vertex has a parent");
        length[v] = len;
        heap.push(Key { mass: mass[v], length: len, min_id: v, head: v, version: 0 });
    }

    fn find(owner: &mut [Vertex], mut v: Vertex) -> Vertex {
        while owner[v] != v {
            owner[v] = owner[owner[v]];
            v = owner[v];
        }
        v
    }

    while let Some(key) = heap.pop() {
        let c = key.head;
        if merged[c] || key.version != version[c] {
            continue;
        }
        let (p, _) = tree.parent(c).expect("cluster head has a parent");
        let target = find(&mut owner, p);
        next[tail[target]] = c;
        tail[target] = tail[c];
        owner[c] = target;
        merged[c] = true;
        if target != ROOT {
            mass[target] += mass[c];
            length[target] += length[c];
            min_id[target] = min_id[target].min(min_id[c]);
            version[target] += 1;
            heap.push(Key {
                mass: mass[target],
                length: length[target],
                min_id: min_id[target],
                head: target,
                version: version[target],
            });
        }
    }

    let mut order = Vec::with_capacity(tree.vertex_count().saturating_sub(1));
    let mut steps = Vec::with_capacity(order.capacity());
    let mut v = next[ROOT];
    let mut elapsed = 0.0;
    let mut cost = 0.0;
    while v != usize::MAX {
        let (p, len) = tree.parent(v).expect("non-root");
        elapsed += len;
        cost += prob[v] * elapsed;
        order.push(v);
        steps.push((p, v));
        v = next[v];
    }
    TreeSequence { order, steps, cost }
}

/// c⋆(T): the optimal search cost of a tree.
pub fn c_star(tree: &RootedTree, prob: &[f64]) -> f64 {
    sequence_tree(tree, prob).cost
}

/// Optimal expanding search of an instance whose graph is a tree.
pub fn optimal_tree_search(inst: &Instance) -> Result<(ExpandingSearch, f64)> {
    if !inst.is_tree() {
        return Err(Error::NotATree(format!(
            "{} edges on {} vertices",
            inst.edges().len(),
            inst.n_total()
        )));
    }
    let edges: Vec<_> = inst.edges().iter().map(|e| (e.u, e.v, e.length)).collect();
    let tree = RootedTree::from_edges(inst.n_total(), &edges)?;
    let seq = sequence_tree(&tree, inst.probs());
    Ok((seq.search(), seq.cost))
}
