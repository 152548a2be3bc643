use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use clap::ValueEnum;
use expsearch::bnc::{branch_and_cut, lp_lower_bound, BncOptions, CutConfig, SolveStatus};
use expsearch::greedy::greedy_search;
use expsearch::io::{read_instance, write_solution, SolutionFile};
use expsearch::local_search::greedy_local_search;
use expsearch::oracle::optimal_search_dp;
use expsearch::pcst::default_epsilon;
use expsearch::{search_cost, ExpandingSearch, Instance};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Greedy,
    Local,
    Oracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Greedy => "greedy",
            Method::Local => "local",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Params {
    pub time_limit: Duration,
    pub epsilon: Option<f64>,
    pub warm_start: bool,
}

/// Result of one method on one instance; `cost` is always recomputed from `search`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub search: ExpandingSearch,
    pub cost: f64,
    pub lower_bound: Option<f64>,
    pub gap: Option<f64>,
    pub optimal: bool,
    pub nodes: usize,
    pub cuts_c1: usize,
    pub cuts_c2: usize,
    pub wall: Duration,
}

pub fn run_method(inst: &Instance, method: Method, params: &Params) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let mut out = Outcome {
        search: ExpandingSearch::default(),
        cost: 0.0,
        lower_bound: None,
        gap: None,
        optimal: false,
        nodes: 0,
        cuts_c1: 0,
        cuts_c2: 0,
        wall: Duration::ZERO,
    };
    let claimed = match method {
        Method::Exact => {
            let opts = BncOptions { time_limit: params.time_limit, warm_start: params.warm_start, ..BncOptions::default() };
            let rep = branch_and_cut(inst, &opts, None)?;
            out.search = rep.search;
            out.lower_bound = Some(rep.lower_bound);
            out.gap = Some(rep.gap);
            out.optimal = rep.status == SolveStatus::Optimal;
            out.nodes = rep.nodes;
            out.cuts_c1 = rep.cuts_c1;
            out.cuts_c2 = rep.cuts_c2;
            rep.cost
        }
        Method::Greedy => {
            let eps = params.epsilon.unwrap_or_else(|| default_epsilon(inst.n()));
            let (search, trace) = greedy_search(inst, eps)?;
            out.search = search;
            trace.upper_bound()
        }
        Method::Local => {
            let res = greedy_local_search(inst)?;
            out.search = res.search;
            res.cost
        }
        Method::Oracle => {
            let (cost, search) = optimal_search_dp(inst)?;
            out.search = search;
            out.gap = Some(0.0);
            out.optimal = true;
            cost
        }
    };
    out.wall = start.elapsed();
    out.cost = search_cost(inst, &out.search)?;
    if method == Method::Oracle {
        out.lower_bound = Some(out.cost);
    }
    // greedy reports its accounting bound, the others their own cost
    let consistent = match method {
        Method::Greedy => out.cost <= claimed + 1e-9 * claimed.abs().max(1.0),
        _ => (out.cost - claimed).abs() <= 1e-6 * claimed.abs().max(1.0),
    };
    if !consistent {
        return Err(Failure::Internal(format!(
            "{} reported {claimed} but its search costs {}",
            method.name(),
            out.cost
        )));
    }
    Ok(out)
}

pub fn solve_command(path: &Path, method: Method, params: &Params, output: Option<&Path>) -> Result<(), Failure> {
    let file = read_instance(path)?;
    let inst = &file.instance;
    let out = run_method(inst, method, params)?;
    let mut text = String::new();
    writeln!(text, "method {}", method.name()).unwrap();
    if method == Method::Exact {
        writeln!(text, "status {}", if out.optimal { "optimal" } else { "time-limit" }).unwrap();
    }
    writeln!(text, "cost {}", out.cost).unwrap();
    if let Some(lb) = out.lower_bound {
        writeln!(text, "lower_bound {lb}").unwrap();
    }
    if let Some(gap) = out.gap {
        writeln!(text, "gap {gap}").unwrap();
    }
    if method == Method::Exact {
        writeln!(text, "nodes {}", out.nodes).unwrap();
        writeln!(text, "cuts_c1 {}", out.cuts_c1).unwrap();
        writeln!(text, "cuts_c2 {}", out.cuts_c2).unwrap();
    }
    writeln!(text, "wall_ms {:.3}", out.wall.as_secs_f64() * 1e3).unwrap();
    let steps: Vec<String> =
        out.search.steps().iter().map(|&(a, b)| format!("{}-{}", inst.name(a), inst.name(b))).collect();
    writeln!(text, "sequence {}", steps.join(" ")).unwrap();
    crate::emit(&text);
    if let Some(p) = output {
        write_solution(p, &SolutionFile::from_search(&file.name, inst, method.name(), out.cost, &out.search))?;
    }
    Ok(())
}

pub fn bounds_command(path: &Path, cuts: CutConfig) -> Result<(), Failure> {
    let file = read_instance(path)?;
    let start = Instant::now();
    let bound = lp_lower_bound(&file.instance, cuts)?;
    crate::emit(&format!("cuts {}\nbound {bound}\nwall_ms {:.3}\n", cuts.name(), start.elapsed().as_secs_f64() * 1e3));
    Ok(())
}
