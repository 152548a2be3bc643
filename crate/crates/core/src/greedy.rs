//! Greedy approximation: repeatedly extract a dense subtree of the graph with
//! the visited vertices contracted into the root.

use crate::error::Result;
use crate::graph::{contract, ExpandingSearch, Instance, RootedTree, Vertex, ROOT};
use crate::pcst::{default_epsilon, parametric_search};
use crate::tree_seq::sequence_tree;

/// One extraction step, in the ids of the contracted graph it was found in.
#[derive(Debug, Clone)]
pub struct Iteration {
    pub tree: RootedTree,
    /// Original vertex id of every contracted vertex.
    pub to_original: Vec<Vertex>,
    /// Visited set before the iteration, in original ids.
    pub visited_before: Vec<bool>,
    pub lambda: f64,
    pub mass: f64,
    pub remaining: f64,
    pub price: f64,
    /// Approximation factor `(1 + ε)(2 − 1/n)` of the density search.
    pub factor: f64,
    pub density: f64,
}

#[derive(Debug, Clone, Default)]
pub struct GreedyTrace {
    pub iterations: Vec<Iteration>,
}

impl GreedyTrace {
    /// `Σ p(T_i)·φ_i`, an upper bound on the greedy search cost.
    pub fn upper_bound(&self) -> f64 {
        self.iterations.iter().map(|it| it.mass * it.price).sum()
    }
}

pub fn greedy_upper_bound(trace: &GreedyTrace) -> f64 {
    trace.upper_bound()
}

/// Runs the greedy algorithm with `ε = 1/(2n − 1)`.
pub fn greedy_search_default(inst: &Instance) -> Result<(ExpandingSearch, GreedyTrace)> {
    greedy_search(inst, default_epsilon(inst.n()))
}

pub fn greedy_search(inst: &Instance, epsilon: f64) -> Result<(ExpandingSearch, GreedyTrace)> {
    let n = inst.n_total();
    let mut visited = vec![false; n];
    visited[ROOT] = true;
    let mut steps: Vec<(Vertex, Vertex)> = Vec::with_capacity(n - 1);
    let mut trace = GreedyTrace::default();
    let total = inst.total_prob();
    let mut found = 0.0;
    while (0..n).any(|v| !visited[v] && inst.prob(v) > 0.0) {
        let c = contract(inst, &visited)?;
        let g = &c.instance;
        let res = parametric_search(g, epsilon)?;
        let tree = res.tree;
        let lambda = tree.total_length();
        let mass = tree.mass(g.probs());
        let remaining = (total - found).max(0.0);
        let seq = sequence_tree(&tree, g.probs());
        let visited_before = visited.clone();
        for &(a, b) in &seq.steps {
            let (u, v) = c.original_edge(a, b);
            debug_assert!(visited[u] && !visited[v]);
            steps.push((u, v));
            visited[v] = true;
        }
        found += mass;
        trace.iterations.push(Iteration {
            price: remaining * lambda / mass,
            factor: (1.0 + epsilon) * (2.0 - 1.0 / g.n() as f64),
            density: res.density,
            tree,
            to_original: c.to_original,
            visited_before,
            lambda,
            mass,
            remaining,
        });
    }
    append_nearest(inst, &mut visited, &mut steps);
    Ok((ExpandingSearch::new(steps), trace))
}

/// Completes a partial search by repeatedly taking the shortest edge out of
/// the visited set (ties: smaller new vertex, then smaller visited endpoint).
pub(crate) fn append_nearest(inst: &Instance, visited: &mut [bool], steps: &mut Vec<(Vertex, Vertex)>) {
    let n = inst.n_total();
    loop {
        let mut best: Option<(f64, Vertex, Vertex)> = None;
        for e in inst.edges() {
            let (from, to) = match (visited[e.u], visited[e.v]) {
                (true, false) => (e.u, e.v),
                (false, true) => (e.v, e.u),
                _ => continue,
            };
            let cand = (e.length, to, from);
            if best.is_none_or(|b| cand.0 < b.0 || (cand.0 == b.0 && (cand.1, cand.2) < (b.1, b.2))) {
                best = Some(cand);
            }
        }
        let Some((_, to, from)) = best else { break };
        visited[to] = true;
        steps.push((from, to));
        if steps.len() == n - 1 {
            break;
        }
    }
}
