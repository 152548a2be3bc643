//! Cutting-plane loop and best-bound branch-and-cut over arc fixings.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::rc::Rc;
use std::time::{Duration, Instant};

use expsearch_lp::{Basis, LpSolution, Row, Simplex, Status, INT_TOL};

use super::model::MipModel;
use super::separation::{separate_c1, separate_c2, triangle_row, violated_triangles, Cut, CutFamily};
use crate::error::{Error, Result};
use crate::graph::{search_cost, ExpandingSearch, Instance, RootedTree};
use crate::tree_seq::sequence_tree;

/// Which directed-cut families the cutting-plane loop separates. The C2
/// configurations also carry the static rows `z_j ≥ p_j + y_jk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutConfig {
    None,
    C1,
    C2,
    C1C2,
}

impl CutConfig {
    pub fn c1(self) -> bool {
        matches!(self, CutConfig::C1 | CutConfig::C1C2)
    }

    pub fn c2(self) -> bool {
        matches!(self, CutConfig::C2 | CutConfig::C1C2)
    }

    pub fn name(self) -> &'static str {
        match self {
            CutConfig::None => "none",
            CutConfig::C1 => "c1",
            CutConfig::C2 => "c2",
            CutConfig::C1C2 => "c1c2",
        }
    }
}

impl std::str::FromStr for CutConfig {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(CutConfig::None),
            "c1" => Ok(CutConfig::C1),
            "c2" => Ok(CutConfig::C2),
            "c1c2" => Ok(CutConfig::C1C2),
            other => Err(format!("unknown cut configuration `{other}` (none, c1, c2, c1c2)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BncOptions {
    pub time_limit: Duration,
    pub cuts: CutConfig,
    /// Directed cuts added per round.
    pub max_cuts_per_round: usize,
    /// Ordering triangles added per round.
    pub max_triangles_per_round: usize,
    /// Rounds with objective gain below `1e-9` before directed-cut separation stops.
    pub stall_rounds: usize,
    /// Seed the incumbent with greedy plus edge-swap local search when none is given.
    pub warm_start: bool,
}

impl Default for BncOptions {
    fn default() -> Self {
        BncOptions {
            time_limit: Duration::from_secs(1200),
            cuts: CutConfig::C1C2,
            max_cuts_per_round: 50,
            max_triangles_per_round: 400,
            stall_rounds: 3,
            warm_start: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    TimeLimit,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub cost: f64,
    pub search: ExpandingSearch,
    pub lower_bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub cuts_c1: usize,
    pub cuts_c2: usize,
    pub triangles: usize,
    pub lp_iterations: usize,
    pub wall: Duration,
}

/// Outcome of the cutting-plane loop at one node.
#[derive(Debug, Clone)]
pub enum NodeLp {
    Solved { values: Vec<f64>, objective: f64 },
    Infeasible,
    TimedOut,
}

/// The relaxation together with its simplex state and cut pool.
pub struct CuttingPlanes {
    pub mip: MipModel,
    simplex: Simplex,
    pool: HashSet<Cut>,
    config: CutConfig,
    pub cuts_c1: usize,
    pub cuts_c2: usize,
    pub triangles: usize,
    pub lp_iterations: usize,
    /// Objective after every LP solve of the most recent loop.
    pub history: Vec<f64>,
}

impl CuttingPlanes {
    pub fn new(inst: &Instance, config: CutConfig) -> Self {
        let mip = MipModel::build(inst, config.c2());
        let simplex = Simplex::new(mip.lp.clone());
        CuttingPlanes {
            mip,
            simplex,
            pool: HashSet::new(),
            config,
            cuts_c1: 0,
            cuts_c2: 0,
            triangles: 0,
            lp_iterations: 0,
            history: Vec::new(),
        }
    }

    /// Restricts arc variables to the given fixings; others return to [0, 1].
    pub fn fix_arcs(&mut self, ones: &[usize], zeros: &[usize]) -> Result<()> {
        for a in 0..self.mip.arcs().len() {
            self.simplex.set_col_bounds(self.mip.x_col(a), 0.0, 1.0)?;
        }
        for &a in ones {
            self.simplex.set_col_bounds(self.mip.x_col(a), 1.0, 1.0)?;
        }
        for &a in zeros {
            self.simplex.set_col_bounds(self.mip.x_col(a), 0.0, 0.0)?;
        }
        Ok(())
    }

    pub fn basis(&self) -> Basis {
        self.simplex.basis()
    }

    /// Every C1/C2 cut added so far.
    pub fn cuts(&self) -> impl Iterator<Item = &Cut> {
        self.pool.iter()
    }

    /// Restarts from a basis exported earlier; rows added since then start
    /// with basic logicals.
    pub fn restore(&mut self, basis: &Basis) -> Result<()> {
        self.simplex.set_basis(basis)?;
        Ok(())
    }

    fn solve_lp(&mut self) -> Result<LpSolution> {
        let sol = self.simplex.solve();
        self.lp_iterations += sol.iterations;
        match sol.status {
            Status::Optimal | Status::Infeasible => Ok(sol),
            other => {
                // retry from a fresh basis before giving up
                log::debug!("simplex ended with {other:?}; restarting cold");
                let mut fresh = Simplex::new(self.simplex.model().clone());
                let sol = fresh.solve();
                self.lp_iterations += sol.iterations;
                self.simplex = fresh;
                match sol.status {
                    Status::Optimal | Status::Infeasible => Ok(sol),
                    other => Err(Error::LpFailure(format!("{other:?}"))),
                }
            }
        }
    }

    /// Solve, separate, add rows, repeat until nothing is violated (or the
    /// directed cuts stall; ordering triangles are always separated to the end).
    pub fn run(&mut self, opts: &BncOptions, deadline: Option<Instant>) -> Result<NodeLp> {
        self.history.clear();
        let mut stalled = 0;
        loop {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return Ok(NodeLp::TimedOut);
            }
            let sol = self.solve_lp()?;
            if sol.status == Status::Infeasible {
                return Ok(NodeLp::Infeasible);
            }
            if let Some(&last) = self.history.last() {
                if sol.objective - last < 1e-9 {
                    stalled += 1;
                } else {
                    stalled = 0;
                }
            }
            self.history.push(sol.objective);
            let values = sol.values;
            let mut rows: Vec<Row> = Vec::new();
            for (t, _) in violated_triangles(&self.mip, &values, opts.max_triangles_per_round) {
                rows.push(triangle_row(&self.mip, t));
                self.triangles += 1;
            }
            if stalled < opts.stall_rounds {
                let mut found: Vec<(Cut, f64)> = Vec::new();
                if self.config.c1() {
                    found.extend(separate_c1(&self.mip, &values));
                }
                if self.config.c2() {
                    found.extend(separate_c2(&self.mip, &values));
                }
                found.retain(|(c, _)| !self.pool.contains(c));
                found.sort_by(|a, b| b.1.total_cmp(&a.1));
                for (cut, _) in found.into_iter().take(opts.max_cuts_per_round) {
                    rows.push(cut.row(&self.mip));
                    match cut.family {
                        CutFamily::C1 => self.cuts_c1 += 1,
                        CutFamily::C2 => self.cuts_c2 += 1,
                    }
                    self.pool.insert(cut);
                }
            }
            if rows.is_empty() {
                return Ok(NodeLp::Solved { values, objective: sol.objective });
            }
            self.simplex.add_rows(rows)?;
        }
    }
}

/// Root relaxation bound under the chosen cut families.
pub fn lp_lower_bound(inst: &Instance, cuts: CutConfig) -> Result<f64> {
    let opts = BncOptions { cuts, ..BncOptions::default() };
    let mut cp = CuttingPlanes::new(inst, cuts);
    match cp.run(&opts, None)? {
        NodeLp::Solved { objective, .. } => Ok(objective),
        _ => Err(Error::LpFailure("root relaxation infeasible".into())),
    }
}

/// Relaxation of the arc formulation with the static strengthened rows.
pub fn build_relaxation(inst: &Instance) -> MipModel {
    MipModel::build(inst, true)
}

struct Node {
    bound: f64,
    depth: usize,
    id: usize,
    ones: Vec<usize>,
    zeros: Vec<usize>,
    /// Final basis of the parent node.
    basis: Option<Rc<Basis>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl Ord for Node {
    // max-heap: smallest bound first, then deepest, then oldest
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.id.cmp(&self.id))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Tree selected by integral arc values.
fn selected_tree(mip: &MipModel, x: &[f64]) -> Option<RootedTree> {
    let mut parent = vec![None; mip.n_total()];
    for (a, &(u, v)) in mip.arcs().iter().enumerate() {
        if x[a] > 0.5 {
            parent[v] = Some((u, mip.arc_length(a)));
        }
    }
    RootedTree::from_parents(parent).ok().filter(|t| t.is_spanning())
}

/// Arc whose value is closest to 1/2 (ties: smallest arc id).
fn branching_arc(x: &[f64]) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (a, &v) in x.iter().enumerate() {
        if v > INT_TOL && v < 1.0 - INT_TOL {
            let d = (v - 0.5).abs();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, a));
            }
        }
    }
    best.map(|(_, a)| a)
}

/// Exact solve by branch-and-cut. Without an `incumbent` the greedy search
/// improved by edge-swap local search provides the first upper bound.
pub fn branch_and_cut(inst: &Instance, opts: &BncOptions, incumbent: Option<ExpandingSearch>) -> Result<SolveReport> {
    let start = Instant::now();
    let deadline = start.checked_add(opts.time_limit);
    let (mut best_search, mut ub) = match incumbent {
        Some(s) => {
            let c = search_cost(inst, &s)?;
            (Some(s), c)
        }
        None if opts.warm_start => {
            let out = crate::local_search::greedy_local_search(inst)?;
            (Some(out.search), out.cost)
        }
        None => (None, f64::INFINITY),
    };
    let tol = |ub: f64| if ub.is_finite() { 1e-9 * ub.abs().max(1.0) } else { 0.0 };
    if inst.n() == 0 {
        return Ok(SolveReport {
            status: SolveStatus::Optimal,
            cost: 0.0,
            search: ExpandingSearch::default(),
            lower_bound: 0.0,
            gap: 0.0,
            nodes: 0,
            cuts_c1: 0,
            cuts_c2: 0,
            triangles: 0,
            lp_iterations: 0,
            wall: start.elapsed(),
        });
    }
    let mut cp = CuttingPlanes::new(inst, opts.cuts);
    let mut heap = BinaryHeap::new();
    heap.push(Node { bound: f64::NEG_INFINITY, depth: 0, id: 0, ones: vec![], zeros: vec![], basis: None });
    let mut next_id = 1;
    let mut nodes = 0;
    let mut timed_out = false;
    while let Some(node) = heap.pop() {
        if node.bound >= ub - tol(ub) {
            continue;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            heap.push(node);
            timed_out = true;
            break;
        }
        cp.fix_arcs(&node.ones, &node.zeros)?;
        if let Some(b) = &node.basis {
            cp.restore(b)?;
        }
        let outcome = cp.run(opts, deadline)?;
        nodes += 1;
        let (values, objective) = match outcome {
            NodeLp::Infeasible => continue,
            NodeLp::TimedOut => {
                heap.push(node);
                timed_out = true;
                break;
            }
            NodeLp::Solved { values, objective } => (values, objective),
        };
        let bound = objective.max(node.bound);
        log::trace!("node {} depth {} bound {bound} ub {ub}", node.id, node.depth);
        if bound >= ub - tol(ub) {
            continue;
        }
        let x = cp.mip.x_values(&values);
        match branching_arc(&x) {
            None => {
                let tree = selected_tree(&cp.mip, &x)
                    .ok_or_else(|| Error::LpFailure("integral arcs do not form a spanning tree".into()))?;
                let seq = sequence_tree(&tree, inst.probs());
                if seq.cost > bound + 1e-6 * bound.abs().max(1.0) {
                    log::debug!("integral node bound {bound} below tree cost {}", seq.cost);
                }
                if seq.cost < ub {
                    ub = seq.cost;
                    best_search = Some(seq.search());
                }
            }
            Some(a) => {
                let basis = Some(Rc::new(cp.basis()));
                let mut ones = node.ones.clone();
                ones.push(a);
                let mut zeros = node.zeros.clone();
                zeros.push(a);
                for (o, z) in [(ones, node.zeros.clone()), (node.ones.clone(), zeros)] {
                    heap.push(Node { bound, depth: node.depth + 1, id: next_id, ones: o, zeros: z, basis: basis.clone() });
                    next_id += 1;
                }
            }
        }
    }
    let best_search = match best_search {
        Some(s) => s,
        None => {
            // stopped before any integral node: fall back to the greedy search
            let (s, _) = crate::greedy::greedy_search_default(inst)?;
            ub = search_cost(inst, &s)?;
            s
        }
    };
    let open_bound = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let (status, lower_bound) = if timed_out {
        (SolveStatus::TimeLimit, open_bound.min(ub).max(0.0))
    } else {
        (SolveStatus::Optimal, ub)
    };
    let gap = if ub > 0.0 { ((ub - lower_bound) / ub).clamp(0.0, 1.0) } else { 0.0 };
    Ok(SolveReport {
        status,
        cost: ub,
        search: best_search,
        lower_bound,
        gap,
        nodes,
        cuts_c1: cp.cuts_c1,
        cuts_c2: cp.cuts_c2,
        triangles: cp.triangles,
        lp_iterations: cp.lp_iterations,
        wall: start.elapsed(),
    })
}
