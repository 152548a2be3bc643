//! Exponential-time reference solvers for small instances.

use crate::error::{Error, Result};
use crate::graph::{induced_mst, ExpandingSearch, Instance, RootedTree, ROOT};

/// Default vertex cap of the subset dynamic program (2^20 states).
pub const DP_CAP: usize = 20;

/// Vertex cap of the enumeration-based tree oracles.
pub const ENUM_CAP: usize = 12;

/// Exact optimum by dynamic programming over visited sets.
///
/// Adding `v` to the visited set `S` costs `min λ(S, v) · (1 − p(S))`, so the
/// optimum over all orders is a shortest path in the subset lattice.
pub fn optimal_search_dp(inst: &Instance) -> Result<(f64, ExpandingSearch)> {
    optimal_search_dp_capped(inst, DP_CAP)
}

pub fn optimal_search_dp_capped(inst: &Instance, cap: usize) -> Result<(f64, ExpandingSearch)> {
    let n = inst.n();
    if n > cap.min(DP_CAP) {
        return Err(Error::TooLarge { n, cap: cap.min(DP_CAP) });
    }
    if n == 0 {
        return Ok((0.0, ExpandingSearch::default()));
    }
    // bit i of a mask stands for vertex i + 1
    let full = (1usize << n) - 1;
    let mut nbr = vec![0usize; n + 1];
    for e in inst.edges() {
        let bit = |v: usize| if v == ROOT { 0 } else { 1 << (v - 1) };
        nbr[e.u] |= bit(e.v);
        nbr[e.v] |= bit(e.u);
    }
    let mut g = vec![f64::INFINITY; full + 1];
    let mut mass = vec![0.0; full + 1];
    // (from, to) edge that produced the state
    let mut last = vec![(u8::MAX, u8::MAX); full + 1];
    g[0] = 0.0;
    for s in 0..=full {
        if s != 0 {
            let low = s.trailing_zeros() as usize;
            mass[s] = mass[s & (s - 1)] + inst.prob(low + 1);
        }
        if !g[s].is_finite() {
            continue;
        }
        let residual = 1.0 - mass[s];
        for v in 1..=n {
            let vb = 1 << (v - 1);
            if s & vb != 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut from = usize::MAX;
            for &(w, id) in inst.neighbors(v) {
                let visited = w == ROOT || s & (1 << (w - 1)) != 0;
                let len = inst.edge(id).length;
                if visited && len < best {
                    best = len;
                    from = w;
                }
            }
            if from == usize::MAX {
                continue;
            }
            let cand = g[s] + best * residual;
            let t = s | vb;
            if cand < g[t] {
                g[t] = cand;
                last[t] = (from as u8, v as u8);
            }
        }
    }
    let mut steps = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let (from, to) = last[s];
        steps.push((from as usize, to as usize));
        s &= !(1 << (to as usize - 1));
    }
    steps.reverse();
    Ok((g[full], ExpandingSearch::new(steps)))
}

/// Calls `f` with every vertex set containing the root that induces a
/// connected subgraph, together with its minimum spanning tree.
fn for_each_connected_set(inst: &Instance, cap: usize, mut f: impl FnMut(&RootedTree)) -> Result<()> {
    let n = inst.n();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let mut subset = vec![false; n + 1];
    subset[ROOT] = true;
    for mask in 0usize..(1 << n) {
        for v in 1..=n {
            subset[v] = mask & (1 << (v - 1)) != 0;
        }
        if let Some(tree) = induced_mst(inst, &subset) {
            f(&tree);
        }
    }
    Ok(())
}

/// Maximum density subtree by enumeration of connected vertex sets.
pub fn max_density_subtree_bruteforce(inst: &Instance) -> Result<(RootedTree, f64)> {
    let mut best: Option<(RootedTree, f64)> = None;
    for_each_connected_set(inst, ENUM_CAP, |tree| {
        if let Some(rho) = tree.density(inst.probs()) {
            if best.as_ref().is_none_or(|(_, b)| rho > *b) {
                best = Some((tree.clone(), rho));
            }
        }
    })?;
    best.ok_or(Error::UndefinedDensity)
}

/// Exact rooted prize-collecting Steiner tree: minimizes
/// `Σ_{e∈T} lengths[e] + Σ_{v∉T} penalties[v]`. `lengths` is indexed by edge id.
pub fn pcst_bruteforce(inst: &Instance, lengths: &[f64], penalties: &[f64]) -> Result<(RootedTree, f64)> {
    let weighted = reweigh(inst, lengths)?;
    let total: f64 = penalties.iter().sum();
    let mut best: Option<(RootedTree, f64)> = None;
    for_each_connected_set(&weighted, ENUM_CAP, |tree| {
        let obj = tree.total_length() + total - tree.mass(penalties);
        if best.as_ref().is_none_or(|(_, b)| obj < *b) {
            best = Some((tree.clone(), obj));
        }
    })?;
    Ok(best.expect("root-only tree is always enumerated"))
}

pub(crate) fn reweigh(inst: &Instance, lengths: &[f64]) -> Result<Instance> {
    let edges = inst.edges().iter().zip(lengths).map(|(e, &len)| (e.u, e.v, len));
    Instance::with_weights(inst.probs().to_vec(), edges)
}
