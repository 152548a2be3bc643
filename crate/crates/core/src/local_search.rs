//! Local search over spanning trees of the metric closure, and the
//! permutation-insertion neighborhood used as a baseline.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{fundamental_cycle, ExpandingSearch, Instance, MetricClosure, RootedTree, Vertex, ROOT};
use crate::tree_seq::sequence_tree;

/// Relative margin a neighbor must beat to count as an improvement.
pub const IMPROVE_TOL: f64 = 1e-9;

fn improves(candidate: f64, current: f64) -> bool {
    candidate < current - IMPROVE_TOL * current.abs().max(1.0)
}

#[derive(Debug, Clone)]
pub struct SwapOutcome {
    /// Final spanning tree of the closure.
    pub tree: RootedTree,
    /// c⋆ of the final tree.
    pub tree_cost: f64,
    /// Search in the original graph and its cost.
    pub search: ExpandingSearch,
    pub cost: f64,
    pub swaps: usize,
}

/// Memoized c⋆ keyed by the parent array.
struct CostCache<'a> {
    prob: &'a [f64],
    seen: HashMap<Vec<u32>, f64>,
}

impl<'a> CostCache<'a> {
    fn new(prob: &'a [f64]) -> Self {
        CostCache { prob, seen: HashMap::new() }
    }

    fn cost(&mut self, tree: &RootedTree) -> f64 {
        let key: Vec<u32> =
            tree.parents().iter().map(|p| p.map_or(u32::MAX, |(u, _)| u as u32)).collect();
        let prob = self.prob;
        *self.seen.entry(key).or_insert_with(|| sequence_tree(tree, prob).cost)
    }
}

/// Best neighbor of `tree` obtained by adding `e` and dropping an edge of its
/// fundamental cycle, if it improves on `current`.
fn best_swap(
    closure: &Instance,
    tree: &RootedTree,
    e: (Vertex, Vertex),
    current: f64,
    cache: &mut CostCache<'_>,
) -> Result<Option<(RootedTree, f64)>> {
    let cycle = fundamental_cycle(tree, e)?;
    let mut best: Option<(RootedTree, f64)> = None;
    for &(a, b) in &cycle[..cycle.len() - 1] {
        let cand = tree.swap(closure, e, (a, b))?;
        let c = cache.cost(&cand);
        if improves(c, current) && best.as_ref().is_none_or(|(_, bc)| c < *bc) {
            best = Some((cand, c));
        }
    }
    Ok(best)
}

/// Closure edges ordered by (length, edge id).
fn scan_order(closure: &Instance) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..closure.edges().len()).collect();
    ids.sort_by(|&a, &b| closure.edge(a).length.total_cmp(&closure.edge(b).length).then(a.cmp(&b)));
    ids
}

/// Edge-swap local search on spanning trees of the metric closure, followed
/// by conversion of the final tree's optimal order into a search of `graph`.
pub fn edge_swap_local_search(graph: &Instance, closure: &MetricClosure, t0: &RootedTree) -> Result<SwapOutcome> {
    let cl = &closure.instance;
    if t0.host_size() != cl.n_total() || !t0.is_spanning() {
        return Err(Error::NotATree("start tree does not span the closure".into()));
    }
    let mut tree = t0.relengthed(cl)?;
    let mut cache = CostCache::new(cl.probs());
    let mut current = cache.cost(&tree);
    let order = scan_order(cl);
    let mut swaps = 0;
    let mut cursor = 0;
    while cursor < order.len() {
        let e = cl.edge(order[cursor]);
        cursor += 1;
        if tree.has_edge(e.u, e.v) {
            continue;
        }
        if let Some((next, c)) = best_swap(cl, &tree, (e.u, e.v), current, &mut cache)? {
            log::trace!("swap in {}-{}: {current} -> {c}", e.u, e.v);
            tree = next;
            current = c;
            swaps += 1;
            cursor = 0;
        }
    }
    let seq = sequence_tree(&tree, cl.probs());
    let search = convert_to_graph_sequence(graph, closure, &seq.search())?;
    let cost = crate::graph::search_cost(graph, &search)?;
    Ok(SwapOutcome { tree, tree_cost: current, search, cost, swaps })
}

/// Greedy search followed by edge-swap local search from the greedy tree.
pub fn greedy_local_search(graph: &Instance) -> Result<SwapOutcome> {
    let (sigma, _) = crate::greedy::greedy_search_default(graph)?;
    let closure = crate::graph::metric_closure(graph);
    let t0 = closure_tree_of(&closure, graph, &sigma)?;
    edge_swap_local_search(graph, &closure, &t0)
}

/// True when no single edge swap improves c⋆ of `tree`.
pub fn is_swap_local_optimum(closure: &Instance, tree: &RootedTree) -> Result<bool> {
    let mut cache = CostCache::new(closure.probs());
    let current = cache.cost(tree);
    for e in closure.edges() {
        if !tree.has_edge(e.u, e.v) && best_swap(closure, tree, (e.u, e.v), current, &mut cache)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Replaces every closure step by its shortest path in `graph`, skipping
/// edges whose far end was already visited.
pub fn convert_to_graph_sequence(
    graph: &Instance,
    closure: &MetricClosure,
    closure_seq: &ExpandingSearch,
) -> Result<ExpandingSearch> {
    let (oriented, _) = closure_seq.walk(&closure.instance)?;
    let mut visited = vec![false; graph.n_total()];
    visited[ROOT] = true;
    let mut steps = Vec::with_capacity(graph.n());
    for (from, to) in oriented {
        if visited[to] {
            continue;
        }
        let path = closure.path(from, to);
        for w in path.windows(2) {
            if !visited[w[1]] {
                visited[w[1]] = true;
                steps.push((w[0], w[1]));
            }
        }
    }
    Ok(ExpandingSearch::new(steps))
}

/// Spanning tree of the closure formed by the edges of a search in the graph.
pub fn closure_tree_of(closure: &MetricClosure, graph: &Instance, search: &ExpandingSearch) -> Result<RootedTree> {
    search.tree(graph)?.relengthed(&closure.instance)
}

/// T^π: each vertex joins the closest earlier vertex of the permutation
/// (ties: the earlier one).
pub fn permutation_tree(closure: &Instance, pi: &[Vertex]) -> RootedTree {
    let n = closure.n_total();
    let mut parent = vec![None; n];
    let mut best: Vec<(f64, Vertex)> = (0..n)
        .map(|v| (if v == ROOT { 0.0 } else { closure.length(ROOT, v).expect("complete") }, ROOT))
        .collect();
    for (k, &v) in pi.iter().enumerate() {
        parent[v] = Some((best[v].1, best[v].0));
        for &w in &pi[k + 1..] {
            let d = closure.length(v, w).expect("complete");
            if d < best[w].0 {
                best[w] = (d, v);
            }
        }
    }
    RootedTree::from_parents(parent).expect("every vertex joins an earlier one")
}

fn check_permutation(closure: &Instance, pi: &[Vertex]) -> Result<()> {
    let n = closure.n_total();
    let mut seen = vec![false; n];
    seen[ROOT] = true;
    for &v in pi {
        if v >= n || seen[v] {
            return Err(Error::NotATree(format!("permutation repeats or misses vertex {v}")));
        }
        seen[v] = true;
    }
    if pi.len() != n - 1 {
        return Err(Error::IncompleteSearch { visited: pi.len() + 1, expected: n });
    }
    Ok(())
}

fn insert(pi: &[Vertex], j: usize, i: usize) -> Vec<Vertex> {
    let mut out = pi.to_vec();
    let v = out.remove(j);
    out.insert(i, v);
    out
}

/// First improving insertion of a later vertex at an earlier position.
fn improving_insertion(closure: &Instance, pi: &[Vertex], current: f64) -> Option<(Vec<Vertex>, f64)> {
    for j in 1..pi.len() {
        for i in 0..j {
            let cand = insert(pi, j, i);
            let c = sequence_tree(&permutation_tree(closure, &cand), closure.probs()).cost;
            if improves(c, current) {
                return Some((cand, c));
            }
        }
    }
    None
}

/// Insertion local search over permutations (root excluded from `pi0`).
pub fn insertion_local_search(closure: &Instance, pi0: &[Vertex]) -> Result<(Vec<Vertex>, f64)> {
    check_permutation(closure, pi0)?;
    let mut pi = pi0.to_vec();
    let mut current = sequence_tree(&permutation_tree(closure, &pi), closure.probs()).cost;
    while let Some((next, c)) = improving_insertion(closure, &pi, current) {
        pi = next;
        current = c;
    }
    Ok((pi, current))
}

pub fn is_insertion_local_optimum(closure: &Instance, pi: &[Vertex]) -> Result<bool> {
    check_permutation(closure, pi)?;
    let current = sequence_tree(&permutation_tree(closure, pi), closure.probs()).cost;
    Ok(improving_insertion(closure, pi, current).is_none())
}
