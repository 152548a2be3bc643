//! Rooted prize-collecting Steiner trees (primal-dual moat growing) and the
//! bisection search for a dense subtree built on top of it.

use crate::error::{Error, Result};
use crate::graph::{shortest_path_tree, Instance, RootedTree, Vertex, ROOT};

const EVENT_TOL: f64 = 1e-12;

/// Primal-dual moat growing for the rooted prize-collecting Steiner tree with
/// edge costs `lengths` (indexed by edge id) and vertex `penalties`.
///
/// The returned tree carries `lengths` as its edge lengths. It satisfies
/// `L(T) + (2 − 1/n)·π(V∖T) ≤ (2 − 1/n)·(L(T′) + π(V∖T′))` for every rooted T′.
pub fn gw_pcst(inst: &Instance, lengths: &[f64], penalties: &[f64]) -> RootedTree {
    let n = inst.n_total();
    assert_eq!(lengths.len(), inst.edges().len(), "one length per edge");
    assert_eq!(penalties.len(), n, "one penalty per vertex");

    // components as union-find; per-root state below
    let mut comp: Vec<Vertex> = (0..n).collect();
    let mut members: Vec<Vec<Vertex>> = (0..n).map(|v| vec![v]).collect();
    let mut active: Vec<bool> = (0..n).map(|v| v != ROOT).collect();
    let mut budget: Vec<f64> = penalties.to_vec();
    // dual load d(v) = Σ of moats around v
    let mut load = vec![0.0; n];
    let mut forest: Vec<usize> = Vec::new();
    // deactivated sets in order, as member lists
    let mut dead: Vec<Vec<Vertex>> = Vec::new();

    fn find(comp: &mut [Vertex], mut v: Vertex) -> Vertex {
        while comp[v] != v {
            comp[v] = comp[comp[v]];
            v = comp[v];
        }
        v
    }

    budget[ROOT] = f64::INFINITY;
    // vertices with nothing to collect die immediately
    for v in 1..n {
        if budget[v] <= EVENT_TOL {
            active[v] = false;
            dead.push(vec![v]);
        }
    }

    loop {
        let mut best_edge: Option<(f64, usize)> = None;
        for (id, e) in inst.edges().iter().enumerate() {
            let (a, b) = (find(&mut comp, e.u), find(&mut comp, e.v));
            if a == b {
                continue;
            }
            let rate = active[a] as u8 + active[b] as u8;
            if rate == 0 {
                continue;
            }
            let slack = (lengths[id] - load[e.u] - load[e.v]).max(0.0);
            let t = slack / rate as f64;
            if best_edge.is_none_or(|(bt, _)| t < bt - EVENT_TOL) {
                best_edge = Some((t, id));
            }
        }
        let mut best_dead: Option<(f64, Vertex)> = None;
        for c in 0..n {
            if comp[c] == c && active[c] {
                let t = budget[c].max(0.0);
                if best_dead.is_none_or(|(bt, _)| t < bt) {
                    best_dead = Some((t, c));
                }
            }
        }
        let (step, edge_event) = match (best_edge, best_dead) {
            (None, None) => break,
            (Some((te, _)), Some((td, _))) => {
                if te <= td + EVENT_TOL {
                    (te, true)
                } else {
                    (td, false)
                }
            }
            (Some((te, _)), None) => (te, true),
            (None, Some((td, _))) => (td, false),
        };
        for c in 0..n {
            if comp[c] == c && active[c] {
                budget[c] -= step;
                for &v in &members[c] {
                    load[v] += step;
                }
            }
        }
        if edge_event {
            let id = best_edge.expect("edge event").1;
            let e = inst.edge(id);
            let (a, b) = (find(&mut comp, e.u), find(&mut comp, e.v));
            forest.push(id);
            let (keep, gone) = if members[a].len() >= members[b].len() { (a, b) } else { (b, a) };
            comp[gone] = keep;
            let moved = std::mem::take(&mut members[gone]);
            members[keep].extend(moved);
            let has_root = find(&mut comp, ROOT) == keep;
            let joined = if has_root { f64::INFINITY } else { budget[a].max(0.0) + budget[b].max(0.0) };
            budget[keep] = joined;
            active[keep] = !has_root;
            active[gone] = false;
            if !has_root && joined <= EVENT_TOL {
                active[keep] = false;
                dead.push(members[keep].clone());
            }
        } else {
            let c = best_dead.expect("deactivation event").1;
            active[c] = false;
            budget[c] = 0.0;
            dead.push(members[c].clone());
        }
    }

    prune(inst, lengths, &forest, &dead)
}

/// Keeps the root's component of the forest and strips every deactivated set
/// that hangs off the rest of the tree by a single edge.
fn prune(inst: &Instance, lengths: &[f64], forest: &[usize], dead: &[Vec<Vertex>]) -> RootedTree {
    let n = inst.n_total();
    let mut adj: Vec<Vec<(Vertex, usize)>> = vec![Vec::new(); n];
    for &id in forest {
        let e = inst.edge(id);
        adj[e.u].push((e.v, id));
        adj[e.v].push((e.u, id));
    }
    let mut keep = vec![false; n];
    let mut stack = vec![ROOT];
    keep[ROOT] = true;
    while let Some(v) = stack.pop() {
        for &(w, _) in &adj[v] {
            if !keep[w] {
                keep[w] = true;
                stack.push(w);
            }
        }
    }
    let mut inside = vec![false; n];
    loop {
        let mut changed = false;
        for set in dead {
            if !set.iter().any(|&v| keep[v]) {
                continue;
            }
            for &v in set {
                inside[v] = true;
            }
            let crossing = set
                .iter()
                .filter(|&&v| keep[v])
                .flat_map(|&v| adj[v].iter())
                .filter(|&&(w, _)| keep[w] && !inside[w])
                .count();
            if crossing <= 1 {
                for &v in set {
                    keep[v] = false;
                }
                changed = true;
            }
            for &v in set {
                inside[v] = false;
            }
        }
        if !changed {
            break;
        }
    }
    let edges: Vec<_> = forest
        .iter()
        .map(|&id| inst.edge(id))
        .zip(forest)
        .filter(|(e, _)| keep[e.u] && keep[e.v])
        .map(|(e, &id)| (e.u, e.v, lengths[id]))
        .collect();
    RootedTree::from_edges(n, &edges).expect("pruned forest component is a rooted tree")
}

/// Seed tree of the bisection: shortest paths from the root to every vertex
/// with positive probability.
pub fn initial_tree(inst: &Instance) -> RootedTree {
    let spt = shortest_path_tree(inst);
    let n = inst.n_total();
    let mut keep = vec![false; n];
    keep[ROOT] = true;
    for v in 0..n {
        if inst.prob(v) > 0.0 {
            let mut w = v;
            while !keep[w] {
                keep[w] = true;
                w = spt.parent(w).expect("reaches the root").0;
            }
        }
    }
    let parent = (0..n).map(|v| if keep[v] { spt.parent(v) } else { None }).collect();
    RootedTree::from_parents(parent).expect("subtree of a rooted tree")
}

/// Bisection bounds recorded at the head of each loop iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone)]
pub struct ParametricResult {
    pub tree: RootedTree,
    pub density: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Brackets at every loop head, final state last.
    pub brackets: Vec<Bracket>,
}

/// Default termination gap 1/(2n − 1), which makes the search a
/// 1/2-approximation for the maximum density.
pub fn default_epsilon(n: usize) -> f64 {
    1.0 / (2.0 * n.max(1) as f64 - 1.0)
}

/// Finds a subtree whose density is within `(1 + ε)(2 − 1/n)` of the maximum.
pub fn parametric_search(inst: &Instance, epsilon: f64) -> Result<ParametricResult> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::BadEpsilon(epsilon));
    }
    if !inst.probs().iter().any(|&p| p > 0.0) {
        return Err(Error::UndefinedDensity);
    }
    let factor = 2.0 - 1.0 / inst.n() as f64;
    let mut best = initial_tree(inst);
    let mut alpha = factor * best.density(inst.probs()).expect("seed tree has an edge");
    let mut beta = inst
        .edges()
        .iter()
        .map(|e| (inst.prob(e.u) / e.length).max(inst.prob(e.v) / e.length))
        .fold(0.0, f64::max);
    let mut brackets = vec![Bracket { alpha, beta }];
    while beta > (1.0 + epsilon) * alpha {
        let rho = 0.5 * (alpha + beta);
        let scaled: Vec<f64> = inst.edges().iter().map(|e| rho * e.length).collect();
        let tree = gw_pcst(inst, &scaled, inst.probs())
            .relengthed(inst)
            .expect("tree edges come from the instance");
        let mass = tree.mass(inst.probs());
        let len = tree.total_length();
        if factor * mass <= rho * len {
            beta = rho;
        } else {
            alpha = factor * mass / len;
            best = tree;
        }
        brackets.push(Bracket { alpha, beta });
    }
    let density = best.density(inst.probs()).expect("positive length");
    Ok(ParametricResult { tree: best, density, alpha, beta, brackets })
}
