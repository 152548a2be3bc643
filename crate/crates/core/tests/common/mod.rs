#![allow(dead_code)]

use expsearch::bnc::{Cut, CutFamily, MipModel};
use expsearch::graph::{search_cost, ExpandingSearch, Instance, RootedTree, ROOT};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn normalized(weights: Vec<f64>) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Root 0 plus `n` vertices with random positive weights (a few zero when
/// `zeros` is set).
pub fn random_probs(rng: &mut ChaCha8Rng, n: usize, zeros: bool) -> Vec<f64> {
    loop {
        let mut w = vec![0.0];
        for _ in 0..n {
            let x: u32 = rng.gen_range(if zeros { 0..=10 } else { 1..=10 });
            w.push(if zeros && x < 3 { 0.0 } else { x as f64 });
        }
        if w.iter().any(|&x| x > 0.0) {
            return normalized(w);
        }
    }
}

pub fn random_tree_edges(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize, f64)> {
    (1..=n).map(|v| (rng.gen_range(0..v), v, rng.gen_range(1..=9) as f64)).collect()
}

pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    let prob = random_probs(rng, n, false);
    Instance::new(prob, random_tree_edges(rng, n)).unwrap()
}

/// Connected graph: random tree plus `extra` random chords.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize, zeros: bool) -> Instance {
    let prob = random_probs(rng, n, zeros);
    let mut edges = random_tree_edges(rng, n);
    for _ in 0..extra {
        let u = rng.gen_range(0..=n);
        let v = rng.gen_range(0..=n);
        if u != v {
            edges.push((u, v, rng.gen_range(1..=9) as f64));
        }
    }
    Instance::new(prob, edges).unwrap()
}

pub fn cycle(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    let prob = random_probs(rng, n, false);
    let edges = (0..=n).map(|v| (v, (v + 1) % (n + 1), rng.gen_range(1..=9) as f64));
    Instance::new(prob, edges).unwrap()
}

/// Root joined to k vertices and a hub at length m; vertices joined to the hub at 1.
pub fn hub_gadget(k: usize, m: f64) -> Instance {
    let hub = k + 1;
    let mut prob = vec![0.0; hub + 1];
    let mut edges = vec![(0, hub, m)];
    for i in 1..=k {
        prob[i] = 1.0 / k as f64;
        edges.push((0, i, m));
        edges.push((i, hub, 1.0));
    }
    Instance::new(prob, edges).unwrap()
}

/// Cycle r, 1, …, n with {r,1} and {n,r} of length n and {i,i+1} of length i.
pub fn ring_gadget(n: usize) -> Instance {
    let mut prob = vec![1.0 / n as f64; n + 1];
    prob[0] = 0.0;
    let mut edges = vec![(0, 1, n as f64), (n, 0, n as f64)];
    for i in 1..n {
        edges.push((i, i + 1, i as f64));
    }
    Instance::new(prob, edges).unwrap()
}

/// Minimum cost over every expanding search, by depth-first enumeration.
pub fn enumerate_min_cost(inst: &Instance) -> f64 {
    fn go(inst: &Instance, visited: &mut Vec<bool>, steps: &mut Vec<(usize, usize)>, best: &mut f64) {
        if steps.len() == inst.n() {
            let c = search_cost(inst, &ExpandingSearch::new(steps.clone())).unwrap();
            *best = best.min(c);
            return;
        }
        for e in inst.edges() {
            let (from, to) = match (visited[e.u], visited[e.v]) {
                (true, false) => (e.u, e.v),
                (false, true) => (e.v, e.u),
                _ => continue,
            };
            visited[to] = true;
            steps.push((from, to));
            go(inst, visited, steps, best);
            steps.pop();
            visited[to] = false;
        }
    }
    let mut visited = vec![false; inst.n_total()];
    visited[ROOT] = true;
    let mut best = f64::INFINITY;
    go(inst, &mut visited, &mut Vec::new(), &mut best);
    best
}

/// Minimum cost over all linear extensions of a spanning tree.
pub fn enumerate_tree_orders(tree: &RootedTree, prob: &[f64]) -> f64 {
    fn go(tree: &RootedTree, prob: &[f64], done: &mut Vec<bool>, t: f64, acc: f64, left: usize, best: &mut f64) {
        if left == 0 {
            *best = best.min(acc);
            return;
        }
        for v in 0..done.len() {
            if done[v] {
                continue;
            }
            let (p, len) = tree.parent(v).unwrap();
            if !done[p] {
                continue;
            }
            done[v] = true;
            go(tree, prob, done, t + len, acc + prob[v] * (t + len), left - 1, best);
            done[v] = false;
        }
    }
    let mut done = vec![false; tree.host_size()];
    done[ROOT] = true;
    let mut best = f64::INFINITY;
    go(tree, prob, &mut done, 0.0, 0.0, tree.host_size() - 1, &mut best);
    best
}

/// Random spanning tree of a complete graph: vertices attach in random order
/// to random earlier ones.
pub fn random_spanning_tree(rng: &mut ChaCha8Rng, inst: &Instance) -> RootedTree {
    let n = inst.n_total();
    let mut order: Vec<usize> = (1..n).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut placed = vec![ROOT];
    let mut parent = vec![None; n];
    for v in order {
        let candidates: Vec<usize> = placed.iter().copied().filter(|&u| inst.length(u, v).is_some()).collect();
        let u = candidates[rng.gen_range(0..candidates.len())];
        parent[v] = Some((u, inst.length(u, v).unwrap()));
        placed.push(v);
    }
    RootedTree::from_parents(parent).unwrap()
}

/// Smallest right-hand-side-minus-load over every root side S, by enumeration.
pub fn enumerate_worst(m: &MipModel, values: &[f64], family: CutFamily) -> f64 {
    let n = m.n_total();
    let y = m.y_values(values);
    let z = m.z_values(values);
    let mut worst = f64::NEG_INFINITY;
    for mask in 0usize..(1 << (n - 1)) {
        let set: Vec<bool> = (0..n).map(|v| v == ROOT || mask & (1 << (v - 1)) != 0).collect();
        let targets: Vec<Option<usize>> = match family {
            CutFamily::C1 => (1..n).filter(|&k| !set[k]).map(Some).collect(),
            CutFamily::C2 => vec![None],
        };
        for k in targets {
            let cut = Cut { family, set: set.clone(), k };
            worst = worst.max(cut.violation_at(m.arcs(), &y, &z, m.prob()));
        }
    }
    worst
}
