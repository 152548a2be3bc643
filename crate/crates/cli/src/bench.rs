use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use expsearch::bnc::{lp_lower_bound, CutConfig};
use expsearch::io::{generate, read_instance, write_instance, write_solution, GeneratorSpec, InstanceFile, SolutionFile};
use rayon::prelude::*;

use crate::run::{run_method, Method, Params};
use crate::Failure;

pub const INSTANCE_EXT: &str = "inst";

/// Columns of the results CSV.
pub const HEADER: [&str; 12] =
    ["instance", "method", "cost", "lower_bound", "gap", "nodes", "cuts_c1", "cuts_c2", "wall_ms", "n", "density", "status"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenchMethod {
    Solve(Method),
    Bound(CutConfig),
}

impl BenchMethod {
    pub fn name(self) -> String {
        match self {
            BenchMethod::Solve(m) => m.name().to_string(),
            BenchMethod::Bound(c) => format!("lp-{}", c.name()),
        }
    }
}

pub fn parse_methods(list: &str) -> Result<Vec<BenchMethod>, Failure> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "exact" => Ok(BenchMethod::Solve(Method::Exact)),
            "greedy" => Ok(BenchMethod::Solve(Method::Greedy)),
            "local" => Ok(BenchMethod::Solve(Method::Local)),
            "oracle" => Ok(BenchMethod::Solve(Method::Oracle)),
            other => match other.strip_prefix("lp-").map(str::parse::<CutConfig>) {
                Some(Ok(c)) => Ok(BenchMethod::Bound(c)),
                _ => Err(Failure::Usage(format!("unknown method `{other}`"))),
            },
        })
        .collect()
}

pub fn generate_many(spec: &GeneratorSpec, count: u64, out: &Path) -> Result<Vec<PathBuf>, Failure> {
    fs::create_dir_all(out)?;
    let mut paths = Vec::new();
    for k in 0..count {
        let s = GeneratorSpec { seed: spec.seed + k, ..spec.clone() };
        let file = generate(&s)?;
        let path = out.join(format!("{}.{INSTANCE_EXT}", file.name));
        write_instance(&path, &file)?;
        paths.push(path);
    }
    Ok(paths)
}

fn instance_paths(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == INSTANCE_EXT))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Infeasible(format!("no .{INSTANCE_EXT} files in {}", dir.display())));
    }
    Ok(paths)
}

/// Edge density, from the generator metadata when present.
fn density_of(file: &InstanceFile) -> f64 {
    if let Some(d) = file.metadata.get("density").and_then(|d| d.parse().ok()) {
        return d;
    }
    let n = file.instance.n_total() as f64;
    file.instance.edges().len() as f64 / (n * (n - 1.0) / 2.0)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn bench_instance(
    path: &Path,
    methods: &[BenchMethod],
    params: &Params,
    solutions: &Path,
) -> Result<Vec<Vec<String>>, Failure> {
    let file = read_instance(path)?;
    let inst = &file.instance;
    let n = inst.n_total().to_string();
    let density = format!("{:.2}", density_of(&file));
    let mut rows = Vec::new();
    for &m in methods {
        let start = Instant::now();
        let row = match m {
            BenchMethod::Solve(method) => match run_method(inst, method, params) {
                Ok(out) => {
                    let sol = SolutionFile::from_search(&file.name, inst, method.name(), out.cost, &out.search);
                    write_solution(solutions.join(format!("{}.{}.sol", file.name, method.name())), &sol)?;
                    let status = match method {
                        Method::Exact | Method::Oracle if out.optimal => "optimal",
                        Method::Exact => "time-limit",
                        _ => "heuristic",
                    };
                    vec![
                        out.cost.to_string(),
                        fmt_opt(out.lower_bound),
                        fmt_opt(out.gap),
                        out.nodes.to_string(),
                        out.cuts_c1.to_string(),
                        out.cuts_c2.to_string(),
                        format!("{:.3}", out.wall.as_secs_f64() * 1e3),
                        status.to_string(),
                    ]
                }
                Err(f @ Failure::Infeasible(_)) => {
                    log::warn!("{}: {} skipped: {}", file.name, method.name(), f.message());
                    vec![String::new(), String::new(), String::new(), "0".into(), "0".into(), "0".into(), String::new(), "skipped".into()]
                }
                Err(f) => return Err(f),
            },
            BenchMethod::Bound(c) => {
                let lb = lp_lower_bound(inst, c)?;
                let ms = format!("{:.3}", start.elapsed().as_secs_f64() * 1e3);
                vec![String::new(), lb.to_string(), String::new(), "1".into(), "0".into(), "0".into(), ms, "bound".into()]
            }
        };
        let mut full = vec![file.name.clone(), m.name()];
        full.extend(row[..7].iter().cloned());
        full.push(n.clone());
        full.push(density.clone());
        full.push(row[7].clone());
        rows.push(full);
    }
    Ok(rows)
}

pub fn bench(dir: &Path, methods: &[BenchMethod], out: &Path, time_limit: Duration, jobs: usize) -> Result<(), Failure> {
    let paths = instance_paths(dir)?;
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "results".into());
    let solutions = out.with_file_name(format!("{stem}-solutions"));
    fs::create_dir_all(&solutions)?;
    let params = Params { time_limit, epsilon: None, warm_start: true };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Failure::Internal(e.to_string()))?;
    let results: Vec<Result<Vec<Vec<String>>, Failure>> =
        pool.install(|| paths.par_iter().map(|p| bench_instance(p, methods, &params, &solutions)).collect());
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(HEADER)?;
    for rows in results {
        for row in rows? {
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    crate::emit(&format!("{}\n", out.display()));
    Ok(())
}

const RATIO_COLUMNS: [&str; 6] = ["lp-none", "lp-c1", "lp-c2", "lp-c1c2", "greedy", "local"];

/// Mean bound/optimum and heuristic/optimum per (n, density) group.
pub fn ratio_report(results: &Path, out: &Path) -> Result<(), Failure> {
    let mut reader = csv::Reader::from_path(results)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize, Failure> {
        headers.iter().position(|h| h == name).ok_or_else(|| Failure::Invalid(format!("results lack column `{name}`")))
    };
    let (ci, cm, cc, cl, cn, cd, cs) =
        (col("instance")?, col("method")?, col("cost")?, col("lower_bound")?, col("n")?, col("density")?, col("status")?);
    // instance -> (group, optimum, method values)
    let mut per_instance: BTreeMap<String, ((usize, String), Option<f64>, BTreeMap<String, f64>)> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec?;
        let num = |i: usize| rec.get(i).and_then(|s| s.parse::<f64>().ok());
        let n: usize = rec.get(cn).and_then(|s| s.parse().ok()).ok_or_else(|| Failure::Invalid("bad `n` field".into()))?;
        let entry = per_instance
            .entry(rec[ci].to_string())
            .or_insert_with(|| ((n, rec[cd].to_string()), None, BTreeMap::new()));
        let method = &rec[cm];
        match method {
            "exact" | "oracle" if &rec[cs] == "optimal" => entry.1 = num(cc).or(entry.1),
            _ => {}
        }
        let value = if method.starts_with("lp-") { num(cl) } else { num(cc) };
        if let Some(v) = value {
            entry.2.insert(method.to_string(), v);
        }
    }
    let mut groups: BTreeMap<(usize, String), Vec<(f64, BTreeMap<String, f64>)>> = BTreeMap::new();
    let mut missing: BTreeMap<(usize, String), usize> = BTreeMap::new();
    for (_, (group, opt, values)) in per_instance {
        match opt {
            Some(o) if o > 0.0 => groups.entry(group).or_default().push((o, values)),
            _ => *missing.entry(group).or_default() += 1,
        }
    }
    for (g, count) in &missing {
        if !groups.contains_key(g) {
            log::warn!("group n={} density={} has no optimum; skipped", g.0, g.1);
        } else {
            log::warn!("group n={} density={}: {count} instance(s) without optimum left out", g.0, g.1);
        }
    }
    let mut w = csv::Writer::from_path(out)?;
    let mut header = vec!["n", "density", "instances"];
    header.extend(RATIO_COLUMNS);
    w.write_record(&header)?;
    for ((n, density), items) in &groups {
        let mut row = vec![n.to_string(), density.clone(), items.len().to_string()];
        for m in RATIO_COLUMNS {
            let ratios: Vec<f64> = items.iter().filter_map(|(o, v)| v.get(m).map(|x| x / o)).collect();
            row.push(if ratios.is_empty() {
                String::new()
            } else {
                format!("{:.6}", ratios.iter().sum::<f64>() / ratios.len() as f64)
            });
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    crate::emit(&format!("{}\n", out.display()));
    Ok(())
}
