mod common;

use common::*;
use expsearch::graph::{
    contract, fundamental_cycle, metric_closure, search_cost, ExpandingSearch, Instance, RootedTree, ROOT,
};
use expsearch::greedy::greedy_search_default;
use expsearch::local_search::{
    closure_tree_of, convert_to_graph_sequence, edge_swap_local_search, insertion_local_search,
    is_insertion_local_optimum, is_swap_local_optimum, permutation_tree,
};
use expsearch::oracle::{max_density_subtree_bruteforce, optimal_search_dp, pcst_bruteforce};
use expsearch::pcst::{default_epsilon, gw_pcst, parametric_search};
use expsearch::tree_seq::{c_star, optimal_tree_search, sequence_tree};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The hub-first order costs m + (k+1)/2, yet visiting one leaf before the
/// hub saves 1/k, so the true optimum is m + (k+1)/2 − 1/k.
#[test]
fn hub_gadget_costs() {
    let inst = hub_gadget(4, 3.0);
    let hub = 5;
    let sigma1 = ExpandingSearch::new(vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, hub)]);
    let star = ExpandingSearch::new(vec![(0, hub), (hub, 1), (hub, 2), (hub, 3), (hub, 4)]);
    let leaf_first = ExpandingSearch::new(vec![(0, 1), (1, hub), (hub, 2), (hub, 3), (hub, 4)]);
    assert!((search_cost(&inst, &sigma1).unwrap() - 7.5).abs() < 1e-12);
    assert!((search_cost(&inst, &star).unwrap() - 5.5).abs() < 1e-12);
    assert!((search_cost(&inst, &leaf_first).unwrap() - 5.25).abs() < 1e-12);
    assert!((optimal_search_dp(&inst).unwrap().0 - 5.25).abs() < 1e-12);
    for (k, m) in [(3usize, 3.0), (5, 4.0), (6, 3.0)] {
        let inst = hub_gadget(k, m);
        let kf = k as f64;
        let want = m + (kf + 1.0) / 2.0 - 1.0 / kf;
        assert!((optimal_search_dp(&inst).unwrap().0 - want).abs() < 1e-9);
    }
}

#[test]
fn hub_gadget_contraction_of_hub() {
    let inst = hub_gadget(4, 3.0);
    let mut set = vec![false; 6];
    set[0] = true;
    set[5] = true;
    let c = contract(&inst, &set).unwrap();
    for i in 1..=4 {
        assert_eq!(c.instance.length(ROOT, i), Some(1.0));
    }
}

#[test]
fn hub_gadget_ratio_tends_to_two() {
    for k in [4usize, 16, 64, 256] {
        let inst = hub_gadget(k, 2.0);
        let sigma1: Vec<_> = (1..=k + 1).map(|v| (0, v)).collect();
        let c1 = search_cost(&inst, &ExpandingSearch::new(sigma1)).unwrap();
        let mut star = vec![(0, k + 1)];
        star.extend((1..=k).map(|v| (k + 1, v)));
        let cs = search_cost(&inst, &ExpandingSearch::new(star)).unwrap();
        let kf = k as f64;
        assert!((c1 - (kf + 1.0)).abs() < 1e-9);
        assert!((cs - (2.0 + (kf + 1.0) / 2.0)).abs() < 1e-9);
        assert!(c1 / cs < 2.0);
    }
    let k = 256.0;
    assert!(2.0 - (k + 1.0) / (2.0 + (k + 1.0) / 2.0) < 0.04);
}

/// The clockwise order has the closed-form tree cost, but it is not a fixed
/// point of the insertion search: pulling vertex 2 to the front reaches it
/// through the transitive edge {r, 2} and is strictly cheaper.
#[test]
fn ring_gadget_clockwise_order() {
    for n in 5..=10 {
        let inst = ring_gadget(n);
        let cl = metric_closure(&inst);
        let clockwise: Vec<usize> = (1..=n).rev().collect();
        let tree = permutation_tree(&cl.instance, &clockwise);
        let expected = ((n + 1) * (2 * n + 1)) as f64 / 6.0;
        assert!((c_star(&tree, inst.probs()) - expected).abs() < 1e-9, "n = {n}");
        let mut moved = clockwise.clone();
        moved.retain(|&v| v != 2);
        moved.insert(0, 2);
        assert!(c_star(&permutation_tree(&cl.instance, &moved), inst.probs()) < expected - 1e-9);
        assert!(!is_insertion_local_optimum(&cl.instance, &clockwise).unwrap());
        let (pi, cost) = insertion_local_search(&cl.instance, &clockwise).unwrap();
        assert!(is_insertion_local_optimum(&cl.instance, &pi).unwrap());
        let opt = optimal_search_dp(&inst).unwrap().0;
        assert!(opt <= cost + 1e-9 && cost < expected);
    }
}

#[test]
fn ring_gadget_closure_matches_path_enumeration() {
    let inst = ring_gadget(4);
    let cl = metric_closure(&inst);
    // walking either way round the 5-cycle
    let around = |from: usize, to: usize| {
        let order = [0usize, 1, 2, 3, 4];
        let n = order.len();
        let step = |i: usize, j: usize| inst.length(order[i], order[j]).unwrap();
        let mut fw = 0.0;
        let mut i = from;
        while i != to {
            fw += step(i, (i + 1) % n);
            i = (i + 1) % n;
        }
        let mut bw = 0.0;
        let mut i = from;
        while i != to {
            bw += step(i, (i + n - 1) % n);
            i = (i + n - 1) % n;
        }
        f64::min(fw, bw)
    };
    for u in 0..5 {
        for v in u + 1..5 {
            assert_eq!(cl.instance.length(u, v).unwrap(), around(u, v));
        }
    }
}

#[test]
fn dp_matches_full_enumeration() {
    let mut r = rng(11);
    for _ in 0..40 {
        let n = r.gen_range(2..=7);
        let inst = random_graph(&mut r, n, n, true);
        let (dp, sigma) = optimal_search_dp(&inst).unwrap();
        assert!((dp - enumerate_min_cost(&inst)).abs() < 1e-9);
        assert!((search_cost(&inst, &sigma).unwrap() - dp).abs() < 1e-9);
    }
}

#[test]
fn dp_is_invariant_under_relabelling() {
    let mut r = rng(12);
    for _ in 0..20 {
        let n = r.gen_range(3..=8);
        let inst = random_graph(&mut r, n, 4, false);
        let mut perm: Vec<usize> = (1..=n).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, r.gen_range(0..=i));
        }
        let map = |v: usize| if v == 0 { 0 } else { perm[v - 1] };
        let mut prob = vec![0.0; n + 1];
        for v in 0..=n {
            prob[map(v)] = inst.prob(v);
        }
        let edges = inst.edges().iter().map(|e| (map(e.u), map(e.v), e.length));
        let relabelled = Instance::new(prob, edges).unwrap();
        let a = optimal_search_dp(&inst).unwrap().0;
        let b = optimal_search_dp(&relabelled).unwrap().0;
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn tree_sequencer_matches_oracles() {
    let mut r = rng(13);
    for _ in 0..60 {
        let n = r.gen_range(1..=9);
        let inst = random_tree(&mut r, n);
        let (sigma, cost) = optimal_tree_search(&inst).unwrap();
        assert!((search_cost(&inst, &sigma).unwrap() - cost).abs() < 1e-9);
        assert!((optimal_search_dp(&inst).unwrap().0 - cost).abs() < 1e-9);
        let tree = sigma.tree(&inst).unwrap();
        assert!((enumerate_tree_orders(&tree, inst.probs()) - cost).abs() < 1e-9);
    }
}

#[test]
fn tree_order_survives_adjacent_block_swaps() {
    let mut r = rng(14);
    for _ in 0..40 {
        let n = r.gen_range(3..=10);
        let inst = random_tree(&mut r, n);
        let (sigma, cost) = optimal_tree_search(&inst).unwrap();
        let steps = sigma.steps().to_vec();
        for _ in 0..20 {
            let i = r.gen_range(0..steps.len() - 1);
            let mut swapped = steps.clone();
            swapped.swap(i, i + 1);
            if let Ok(c) = search_cost(&inst, &ExpandingSearch::new(swapped)) {
                assert!(c >= cost - 1e-9);
            }
        }
    }
}

#[test]
fn c_star_on_closure_trees_matches_linear_extensions() {
    let mut r = rng(15);
    for _ in 0..25 {
        let n = r.gen_range(2..=8);
        let inst = random_graph(&mut r, n, 5, true);
        let cl = metric_closure(&inst);
        let tree = random_spanning_tree(&mut r, &cl.instance);
        let seq = sequence_tree(&tree, inst.probs());
        assert!((enumerate_tree_orders(&tree, inst.probs()) - seq.cost).abs() < 1e-9);
    }
}

#[test]
fn gw_meets_its_guarantee() {
    let mut r = rng(16);
    for _ in 0..40 {
        let n = r.gen_range(1..=8);
        let inst = random_graph(&mut r, n, 6, false);
        let lengths: Vec<f64> = inst.edges().iter().map(|_| r.gen_range(1..=20) as f64 / 4.0).collect();
        let mut pen: Vec<f64> = (0..=n).map(|_| r.gen_range(0..=12) as f64 / 3.0).collect();
        pen[0] = 0.0;
        let tree = gw_pcst(&inst, &lengths, &pen);
        assert!(tree.contains(ROOT));
        let f = 2.0 - 1.0 / n as f64;
        let total: f64 = pen.iter().sum();
        let lhs = tree.total_length() + f * (total - tree.mass(&pen));
        let (_, best) = pcst_bruteforce(&inst, &lengths, &pen).unwrap();
        assert!(lhs <= f * best + 1e-6, "{lhs} > {f} * {best}");
    }
}

#[test]
fn parametric_brackets_behave() {
    let mut r = rng(17);
    for _ in 0..30 {
        let n = r.gen_range(2..=9);
        let inst = random_graph(&mut r, n, 5, true);
        let eps = default_epsilon(n);
        let res = parametric_search(&inst, eps).unwrap();
        let (_, rho_star) = max_density_subtree_bruteforce(&inst).unwrap();
        assert!(res.density >= rho_star / 2.0 - 1e-9);
        let f = 2.0 - 1.0 / n as f64;
        assert!(rho_star <= (1.0 + eps) * f * res.density + 1e-9);
        for w in res.brackets.windows(2) {
            assert!(w[1].alpha >= w[0].alpha && w[1].beta <= w[0].beta);
        }
        for b in &res.brackets {
            assert!(b.beta >= rho_star - 1e-9);
        }
        assert!((res.alpha - f * res.density).abs() < 1e-9);
        let (a0, b0) = (res.brackets[0].alpha, res.brackets[0].beta);
        let bound = if b0 > (1.0 + eps) * a0 { ((b0 - a0) / (eps * a0)).log2().ceil() as usize + 1 } else { 0 };
        assert!(res.brackets.len() - 1 <= bound);
    }
}

#[test]
fn greedy_is_within_eight_and_below_its_bound() {
    let mut r = rng(18);
    for _ in 0..40 {
        let n = r.gen_range(1..=10);
        let inst = random_graph(&mut r, n, 6, true);
        let (sigma, trace) = greedy_search_default(&inst).unwrap();
        let cost = search_cost(&inst, &sigma).unwrap();
        let opt = optimal_search_dp(&inst).unwrap().0;
        assert!(cost >= opt - 1e-9);
        assert!(cost <= 8.0 * opt + 1e-9);
        assert!(cost <= trace.upper_bound() + 1e-9);
        assert!(trace.iterations.len() <= n);
        let mut remaining = 1.0;
        for it in &trace.iterations {
            assert!((it.remaining - remaining).abs() < 1e-9);
            assert!(it.mass > 0.0 && it.price > 0.0);
            remaining -= it.mass;
        }
    }
}

/// For every subtree T of G, p(V[T] ∖ S_i) ≤ λ(T)·factor_i·ρ(T_i).
#[test]
fn greedy_density_cap() {
    let mut r = rng(19);
    for _ in 0..15 {
        let n = r.gen_range(2..=8);
        let inst = random_graph(&mut r, n, 4, true);
        let (_, trace) = greedy_search_default(&inst).unwrap();
        for it in &trace.iterations {
            for mask in 1usize..(1 << n) {
                let mut subset = vec![true; n + 1];
                for v in 1..=n {
                    subset[v] = mask & (1 << (v - 1)) != 0;
                }
                let Some(t) = expsearch::graph::induced_mst(&inst, &subset) else { continue };
                let fresh: f64 = t.vertices().filter(|&v| !it.visited_before[v]).map(|v| inst.prob(v)).sum();
                assert!(fresh <= t.total_length() * it.factor * it.density + 1e-9);
            }
        }
    }
}

#[test]
fn cycle_local_search_is_exact() {
    let mut r = rng(20);
    for _ in 0..10 {
        let n = r.gen_range(3..=9);
        let inst = cycle(&mut r, n);
        let cl = metric_closure(&inst);
        let opt = optimal_search_dp(&inst).unwrap().0;
        for _ in 0..3 {
            let t0 = random_spanning_tree(&mut r, &cl.instance);
            let out = edge_swap_local_search(&inst, &cl, &t0).unwrap();
            assert!((out.cost - opt).abs() < 1e-6 * opt.max(1.0), "{} vs {opt}", out.cost);
            assert!(is_swap_local_optimum(&cl.instance, &out.tree).unwrap());
        }
    }
}

#[test]
fn local_search_from_greedy() {
    let mut r = rng(21);
    let mut swap_wins = 0;
    let total = 20;
    for _ in 0..total {
        let inst = random_graph(&mut r, 8, 8, true);
        let cl = metric_closure(&inst);
        let (sigma, _) = greedy_search_default(&inst).unwrap();
        let greedy_cost = search_cost(&inst, &sigma).unwrap();
        let t0 = closure_tree_of(&cl, &inst, &sigma).unwrap();
        let out = edge_swap_local_search(&inst, &cl, &t0).unwrap();
        let opt = optimal_search_dp(&inst).unwrap().0;
        assert!(out.cost <= greedy_cost + 1e-9);
        assert!(out.cost <= out.tree_cost + 1e-9);
        assert!(out.cost >= opt - 1e-9);
        let pi0: Vec<usize> = (1..=8).collect();
        let (_, ins) = insertion_local_search(&cl.instance, &pi0).unwrap();
        assert!(ins >= opt - 1e-9);
        if ins >= out.cost - 1e-9 {
            swap_wins += 1;
        }
    }
    assert!(swap_wins * 2 > total, "{swap_wins} of {total}");
}

#[test]
fn contraction_matches_enumeration() {
    let mut r = rng(22);
    for _ in 0..30 {
        let inst = random_graph(&mut r, 6, 8, false);
        let mut set: Vec<bool> = (0..7).map(|_| r.gen_bool(0.4)).collect();
        set[0] = true;
        if set.iter().all(|&b| b) {
            set[1] = false;
        }
        let c = contract(&inst, &set).unwrap();
        for (cw, &w) in c.to_original.iter().enumerate().skip(1) {
            let best = inst
                .neighbors(w)
                .iter()
                .filter(|&&(s, _)| set[s])
                .map(|&(_, id)| inst.edge(id).length)
                .fold(f64::INFINITY, f64::min);
            assert_eq!(c.instance.length(ROOT, cw).unwrap_or(f64::INFINITY), best);
        }
        // contracting a superset in two stages agrees with one stage
        let mut bigger = set.clone();
        if let Some(v) = (1..7).find(|&v| !bigger[v]) {
            bigger[v] = true;
        }
        if bigger.iter().all(|&b| b) {
            continue;
        }
        let once = contract(&inst, &bigger).unwrap();
        let inner: Vec<bool> = c.to_original.iter().map(|&v| bigger[v]).collect();
        let twice = contract(&c.instance, &inner).unwrap();
        assert_eq!(once.instance.edges(), twice.instance.edges());
    }
}

#[test]
fn fundamental_cycles_are_cycles() {
    let mut r = rng(23);
    for _ in 0..30 {
        let inst = random_graph(&mut r, 5, 0, false);
        let cl = metric_closure(&inst);
        let tree = random_spanning_tree(&mut r, &cl.instance);
        let non_tree: Vec<_> = cl.instance.edges().iter().filter(|e| !tree.has_edge(e.u, e.v)).collect();
        let e = non_tree[r.gen_range(0..non_tree.len())];
        let cyc = fundamental_cycle(&tree, (e.u, e.v)).unwrap();
        let mut deg = [0usize; 6];
        for &(a, b) in &cyc {
            deg[a] += 1;
            deg[b] += 1;
        }
        assert!(deg.iter().all(|&d| d == 0 || d == 2));
        for w in cyc.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
    }
}

#[test]
fn conversion_never_delays_arrivals() {
    let mut r = rng(24);
    for _ in 0..40 {
        let inst = random_graph(&mut r, 8, 5, true);
        let cl = metric_closure(&inst);
        let tree = random_spanning_tree(&mut r, &cl.instance);
        let seq = sequence_tree(&tree, inst.probs());
        let converted = convert_to_graph_sequence(&inst, &cl, &seq.search()).unwrap();
        let before = seq.search().arrivals(&cl.instance).unwrap();
        let after = converted.arrivals(&inst).unwrap();
        for v in 0..inst.n_total() {
            assert!(after[v] <= before[v] + 1e-9);
        }
        assert!(search_cost(&inst, &converted).unwrap() <= seq.cost + 1e-9);
    }
}

fn arb_instance() -> impl Strategy<Value = Instance> {
    (1usize..=7, any::<u64>()).prop_map(|(n, seed)| random_graph(&mut rng(seed), n, n, true))
}

proptest! {
    #[test]
    fn cost_reaggregation_agrees(inst in arb_instance(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let cl = metric_closure(&inst);
        let tree = random_spanning_tree(&mut r, &cl.instance);
        let sigma = convert_to_graph_sequence(&inst, &cl, &sequence_tree(&tree, inst.probs()).search()).unwrap();
        let (oriented, arrival) = sigma.walk(&inst).unwrap();
        let mut seen = 0.0;
        let mut alt = 0.0;
        let mut prev = 0.0;
        for &(from, to) in &oriented {
            alt += inst.length(from, to).unwrap() * (1.0 - seen);
            seen += inst.prob(to);
            prop_assert!(arrival[to] >= prev);
            prev = arrival[to];
        }
        prop_assert!((alt - search_cost(&inst, &sigma).unwrap()).abs() < 1e-9);
        prop_assert!(optimal_search_dp(&inst).unwrap().0 <= alt + 1e-9);
    }

    #[test]
    fn closure_is_idempotent(inst in arb_instance()) {
        let once = metric_closure(&inst);
        let twice = metric_closure(&once.instance);
        prop_assert_eq!(once.instance.edges(), twice.instance.edges());
    }

    #[test]
    fn tree_order_respects_parents(inst in arb_instance(), seed in any::<u64>()) {
        let cl = metric_closure(&inst);
        let tree = random_spanning_tree(&mut rng(seed), &cl.instance);
        let seq = sequence_tree(&tree, inst.probs());
        let mut pos = vec![0usize; inst.n_total()];
        for (i, &v) in seq.order.iter().enumerate() {
            pos[v] = i + 1;
        }
        for (u, v, _) in tree.edges() {
            prop_assert!(pos[u] < pos[v]);
        }
    }
}

#[test]
fn spanning_tree_helper_is_valid() {
    let inst = random_graph(&mut rng(1), 6, 20, false);
    let cl = metric_closure(&inst);
    let t: RootedTree = random_spanning_tree(&mut rng(2), &cl.instance);
    assert!(t.is_spanning());
}
