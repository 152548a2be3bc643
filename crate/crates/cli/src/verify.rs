use std::path::Path;

use expsearch::bnc::{branch_and_cut, lp_lower_bound, BncOptions, CutConfig};
use expsearch::greedy::greedy_search_default;
use expsearch::io::read_instance;
use expsearch::local_search::{greedy_local_search, is_swap_local_optimum};
use expsearch::oracle::{max_density_subtree_bruteforce, optimal_search_dp, ENUM_CAP};
use expsearch::pcst::{default_epsilon, parametric_search};
use expsearch::tree_seq::optimal_tree_search;
use expsearch::{metric_closure, search_cost, Instance};

use crate::bench::INSTANCE_EXT;
use crate::Failure;

/// Instances up to this many non-root vertices are checked against the oracle.
const ORACLE_LIMIT: usize = 12;

fn rel_le(a: f64, b: f64, tol: f64) -> bool {
    a <= b + tol * b.abs().max(1.0)
}

/// Violated invariants of one instance, empty when all hold.
pub fn check_instance(inst: &Instance) -> Result<Vec<String>, Failure> {
    let mut bad = Vec::new();
    let (greedy, trace) = greedy_search_default(inst)?;
    let g = search_cost(inst, &greedy)?;
    if !rel_le(g, trace.upper_bound(), 1e-9) {
        bad.push(format!("greedy cost {g} exceeds its accounting bound {}", trace.upper_bound()));
    }
    let ls = greedy_local_search(inst)?;
    if !rel_le(ls.cost, ls.tree_cost, 1e-9) {
        bad.push(format!("converted search {} costs more than its tree {}", ls.cost, ls.tree_cost));
    }
    let closure = metric_closure(inst);
    if !is_swap_local_optimum(&closure.instance, &ls.tree)? {
        bad.push("local search stopped at a tree with an improving swap".into());
    }
    if inst.is_tree() {
        let (_, c) = optimal_tree_search(inst)?;
        let exact = branch_and_cut(inst, &BncOptions::default(), None)?;
        if (exact.cost - c).abs() > 1e-6 * c.max(1.0) {
            bad.push(format!("tree sequencing {c} differs from branch-and-cut {}", exact.cost));
        }
    }
    if inst.n() <= ORACLE_LIMIT {
        let (opt, _) = optimal_search_dp(inst)?;
        if !rel_le(g, 8.0 * opt, 1e-9) {
            bad.push(format!("greedy {g} above 8 × optimum {opt}"));
        }
        if !rel_le(opt, ls.cost, 1e-9) {
            bad.push(format!("local search {} below the optimum {opt}", ls.cost));
        }
        let exact = branch_and_cut(inst, &BncOptions::default(), None)?;
        if (exact.cost - opt).abs() > 1e-6 * opt.max(1.0) || exact.gap != 0.0 {
            bad.push(format!("branch-and-cut {} (gap {}) differs from oracle {opt}", exact.cost, exact.gap));
        }
        let b = |c| lp_lower_bound(inst, c);
        let (none, c1, c2, both) = (b(CutConfig::None)?, b(CutConfig::C1)?, b(CutConfig::C2)?, b(CutConfig::C1C2)?);
        let tol = 1e-7;
        if !(rel_le(none, c1, tol) && rel_le(none, c2, tol) && rel_le(c1, both, tol) && rel_le(c2, both, tol)) {
            bad.push(format!("bounds out of order: none {none} c1 {c1} c2 {c2} c1c2 {both}"));
        }
        if !rel_le(both, opt, tol) {
            bad.push(format!("bound {both} above optimum {opt}"));
        }
    }
    if inst.n() <= ENUM_CAP.min(10) && inst.probs().iter().any(|&p| p > 0.0) {
        let (_, best) = max_density_subtree_bruteforce(inst)?;
        let res = parametric_search(inst, default_epsilon(inst.n()))?;
        if res.density < best / 2.0 - 1e-9 {
            bad.push(format!("density search {} below half the maximum {best}", res.density));
        }
    }
    Ok(bad)
}

pub fn verify_dir(dir: &Path) -> Result<(), Failure> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == INSTANCE_EXT))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Infeasible(format!("no .{INSTANCE_EXT} files in {}", dir.display())));
    }
    let mut failed = 0;
    for p in &paths {
        let file = read_instance(p)?;
        let bad = check_instance(&file.instance)?;
        if bad.is_empty() {
            crate::emit(&format!("PASS {}\n", file.name));
        } else {
            failed += 1;
            crate::emit(&format!("FAIL {}: {}\n", file.name, bad.join("; ")));
        }
    }
    if failed > 0 {
        return Err(Failure::Verify(format!("{failed} of {} instance(s) failed", paths.len())));
    }
    Ok(())
}
