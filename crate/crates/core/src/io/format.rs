use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{ExpandingSearch, Instance, Vertex, ROOT};

pub const FORMAT_HEADER: &str = "expsearch-instance 1";
pub const SOLUTION_HEADER: &str = "expsearch-solution 1";

/// How vertex probabilities are stored: exact integer weights `a_v / Σa` or
/// plain decimals.
#[derive(Debug, Clone, PartialEq)]
pub enum Probabilities {
    Weights { weights: Vec<u64>, total: u64 },
    Decimal,
}

/// Free-form `key value` pairs describing how an instance was produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value.to_string(),
            None => self.entries.push((key.to_string(), value.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub name: String,
    pub instance: Instance,
    pub probabilities: Probabilities,
    pub metadata: Metadata,
    /// Point of every vertex, when the lengths came from coordinates.
    pub coords: Option<Vec<Vec<i64>>>,
    /// Parallel edges collapsed while reading.
    pub collapsed: usize,
}

impl InstanceFile {
    pub fn new(name: impl Into<String>, instance: Instance) -> Self {
        InstanceFile {
            name: name.into(),
            instance,
            probabilities: Probabilities::Decimal,
            metadata: Metadata::default(),
            coords: None,
            collapsed: 0,
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn field<'a>(tokens: &[&'a str], i: usize, line: usize, what: &str) -> Result<&'a str> {
    tokens.get(i).copied().ok_or_else(|| parse_err(line, format!("missing {what}")))
}

fn number<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T> {
    token.parse().map_err(|_| parse_err(line, format!("invalid {what} `{token}`")))
}

fn check_name(s: &str) -> Result<()> {
    if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '#') {
        return Err(Error::InfeasibleRequest(format!("`{s}` cannot be written as a name or label")));
    }
    Ok(())
}

enum Prob {
    Weight(u64, u64),
    Decimal(f64),
}

/// Parses the text of an instance file.
///
/// Lines are `key value…` records; `#` starts a comment. Vertex labels are
/// arbitrary tokens: the root gets id 0 and the others follow in file order.
pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let mut header = false;
    let mut name = None;
    let mut declared: Option<usize> = None;
    let mut root_label: Option<(String, usize)> = None;
    let mut vertices: Vec<(String, Prob, usize)> = Vec::new();
    let mut raw_edges: Vec<(String, String, f64, usize)> = Vec::new();
    let mut raw_coords: Vec<(String, Vec<i64>, usize)> = Vec::new();
    let mut metadata = Metadata::default();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if !header {
            if content != FORMAT_HEADER {
                return Err(parse_err(line, format!("expected `{FORMAT_HEADER}`")));
            }
            header = true;
            continue;
        }
        let arity = |k: usize| -> Result<()> {
            if tokens.len() != k {
                return Err(parse_err(line, format!("`{}` takes {} fields, found {}", tokens[0], k - 1, tokens.len() - 1)));
            }
            Ok(())
        };
        match tokens[0] {
            "name" => {
                arity(2)?;
                name = Some(tokens[1].to_string());
            }
            "vertices" => {
                arity(2)?;
                declared = Some(number(tokens[1], line, "vertex count")?);
            }
            "root" => {
                arity(2)?;
                root_label = Some((tokens[1].to_string(), line));
            }
            "vertex" => {
                arity(3)?;
                let p = field(&tokens, 2, line, "probability")?;
                let prob = match p.split_once('/') {
                    Some((a, b)) => {
                        let a: u64 = number(a, line, "weight")?;
                        let b: u64 = number(b, line, "weight total")?;
                        if b == 0 {
                            return Err(parse_err(line, "weight total is zero"));
                        }
                        Prob::Weight(a, b)
                    }
                    None => Prob::Decimal(number(p, line, "probability")?),
                };
                vertices.push((tokens[1].to_string(), prob, line));
            }
            "edge" => {
                arity(4)?;
                let len: f64 = number(tokens[3], line, "length")?;
                raw_edges.push((tokens[1].to_string(), tokens[2].to_string(), len, line));
            }
            "coord" => {
                if tokens.len() < 3 {
                    return Err(parse_err(line, "`coord` needs a label and at least one coordinate"));
                }
                let xs = tokens[2..].iter().map(|t| number(t, line, "coordinate")).collect::<Result<_>>()?;
                raw_coords.push((tokens[1].to_string(), xs, line));
            }
            "meta" => {
                if tokens.len() < 3 {
                    return Err(parse_err(line, "`meta` needs a key and a value"));
                }
                metadata.entries.push((tokens[1].to_string(), tokens[2..].join(" ")));
            }
            other => return Err(parse_err(line, format!("unknown record `{other}`"))),
        }
    }
    if !header {
        return Err(parse_err(last_line.max(1), format!("expected `{FORMAT_HEADER}`")));
    }
    let (root, root_line) = root_label.ok_or_else(|| parse_err(last_line, "missing `root` record"))?;
    // dense ids: root first, then file order
    let mut labels: Vec<String> = vec![root.clone()];
    let mut ids = std::collections::HashMap::new();
    ids.insert(root.clone(), ROOT);
    let mut probs: Vec<Option<Prob>> = vec![None];
    for (label, p, line) in vertices {
        let id = match ids.get(&label) {
            Some(&ROOT) if probs[ROOT].is_none() => ROOT,
            Some(_) => return Err(parse_err(line, format!("vertex `{label}` declared twice"))),
            None => {
                ids.insert(label.clone(), labels.len());
                labels.push(label);
                probs.push(None);
                labels.len() - 1
            }
        };
        probs[id] = Some(p);
    }
    if probs[ROOT].is_none() {
        return Err(parse_err(root_line, format!("root `{root}` has no vertex record")));
    }
    let n_total = labels.len();
    if let Some(d) = declared {
        if d != n_total {
            return Err(parse_err(last_line, format!("`vertices {d}` but {n_total} vertex records")));
        }
    }
    let probs: Vec<Prob> = probs.into_iter().map(|p| p.expect("filled above")).collect();
    let all_weights = probs.iter().all(|p| matches!(p, Prob::Weight(..)));
    let probabilities = if all_weights {
        let total = match probs[0] {
            Prob::Weight(_, b) => b,
            Prob::Decimal(_) => unreachable!(),
        };
        let mut weights = Vec::with_capacity(n_total);
        for p in &probs {
            match *p {
                Prob::Weight(a, b) if b == total => weights.push(a),
                _ => return Err(parse_err(last_line, "weight totals differ between vertices")),
            }
        }
        let sum: u64 = weights.iter().sum();
        if sum != total {
            return Err(Error::ProbabilitySum(sum as f64 / total as f64));
        }
        Probabilities::Weights { weights, total }
    } else {
        Probabilities::Decimal
    };
    let prob: Vec<f64> = probs
        .iter()
        .map(|p| match *p {
            Prob::Weight(a, b) => a as f64 / b as f64,
            Prob::Decimal(x) => x,
        })
        .collect();
    let lookup = |label: &str, line: usize| -> Result<Vertex> {
        ids.get(label).copied().ok_or_else(|| parse_err(line, format!("unknown vertex `{label}`")))
    };
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (a, b, len, line) in &raw_edges {
        let (u, v) = (lookup(a, *line)?, lookup(b, *line)?);
        if u == v {
            return Err(parse_err(*line, format!("self-loop at `{a}`")));
        }
        if !(*len > 0.0 && len.is_finite()) {
            return Err(parse_err(*line, format!("edge length must be positive, found {len}")));
        }
        edges.push((u, v, *len));
    }
    let coords = if raw_coords.is_empty() {
        None
    } else {
        let mut out: Vec<Option<Vec<i64>>> = vec![None; n_total];
        for (label, xs, line) in raw_coords {
            let v = lookup(&label, line)?;
            if out[v].is_some() {
                return Err(parse_err(line, format!("coordinates of `{label}` given twice")));
            }
            out[v] = Some(xs);
        }
        Some(out.into_iter().enumerate().map(|(v, c)| c.ok_or_else(|| {
            parse_err(last_line, format!("vertex `{}` has no coordinates", labels[v]))
        })).collect::<Result<Vec<_>>>()?)
    };
    let (instance, collapsed) = Instance::build(prob, edges, true)?;
    if collapsed > 0 {
        log::warn!("{collapsed} parallel edge(s) collapsed to the shortest length");
    }
    let instance = instance.with_names(labels);
    Ok(InstanceFile {
        name: name.unwrap_or_else(|| "unnamed".to_string()),
        instance,
        probabilities,
        metadata,
        coords,
        collapsed,
    })
}

/// Canonical text of an instance file.
pub fn render_instance(file: &InstanceFile) -> Result<String> {
    let inst = &file.instance;
    check_name(&file.name)?;
    for label in inst.names() {
        check_name(label)?;
    }
    let mut out = String::new();
    let name = |v: Vertex| inst.name(v);
    writeln!(out, "{FORMAT_HEADER}").unwrap();
    writeln!(out, "name {}", file.name).unwrap();
    writeln!(out, "vertices {}", inst.n_total()).unwrap();
    writeln!(out, "root {}", name(ROOT)).unwrap();
    for (k, v) in &file.metadata.entries {
        check_name(k)?;
        writeln!(out, "meta {k} {v}").unwrap();
    }
    for v in 0..inst.n_total() {
        match &file.probabilities {
            Probabilities::Weights { weights, total } => {
                writeln!(out, "vertex {} {}/{}", name(v), weights[v], total).unwrap()
            }
            Probabilities::Decimal => writeln!(out, "vertex {} {}", name(v), inst.prob(v)).unwrap(),
        }
    }
    for e in inst.edges() {
        writeln!(out, "edge {} {} {}", name(e.u), name(e.v), e.length).unwrap();
    }
    if let Some(coords) = &file.coords {
        for (v, xs) in coords.iter().enumerate() {
            let xs: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
            writeln!(out, "coord {} {}", name(v), xs.join(" ")).unwrap();
        }
    }
    Ok(out)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<InstanceFile> {
    parse_instance(&read_text(path.as_ref())?)
}

pub fn write_instance(path: impl AsRef<Path>, file: &InstanceFile) -> Result<()> {
    write_text(path.as_ref(), &render_instance(file)?)
}

/// A search recorded against a named instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub instance: String,
    pub method: String,
    pub cost: f64,
    /// Steps as pairs of vertex labels.
    pub steps: Vec<(String, String)>,
}

impl SolutionFile {
    pub fn from_search(instance_name: &str, inst: &Instance, method: &str, cost: f64, search: &ExpandingSearch) -> Self {
        SolutionFile {
            instance: instance_name.to_string(),
            method: method.to_string(),
            cost,
            steps: search.steps().iter().map(|&(a, b)| (inst.name(a).to_string(), inst.name(b).to_string())).collect(),
        }
    }

    /// The steps in the dense ids of `inst`.
    pub fn search(&self, inst: &Instance) -> Result<ExpandingSearch> {
        let ids: std::collections::HashMap<&str, Vertex> =
            inst.names().iter().enumerate().map(|(v, s)| (s.as_str(), v)).collect();
        let id = |s: &str| {
            ids.get(s).copied().ok_or_else(|| Error::InfeasibleRequest(format!("unknown vertex `{s}` in solution")))
        };
        let steps = self.steps.iter().map(|(a, b)| Ok((id(a)?, id(b)?))).collect::<Result<_>>()?;
        Ok(ExpandingSearch::new(steps))
    }
}

pub fn render_solution(sol: &SolutionFile) -> String {
    let mut out = String::new();
    writeln!(out, "{SOLUTION_HEADER}").unwrap();
    writeln!(out, "instance {}", sol.instance).unwrap();
    writeln!(out, "method {}", sol.method).unwrap();
    writeln!(out, "cost {}", sol.cost).unwrap();
    for (a, b) in &sol.steps {
        writeln!(out, "step {a} {b}").unwrap();
    }
    out
}

pub fn parse_solution(text: &str) -> Result<SolutionFile> {
    let mut sol = SolutionFile { instance: String::new(), method: String::new(), cost: f64::NAN, steps: Vec::new() };
    let mut header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if !header {
            if content != SOLUTION_HEADER {
                return Err(parse_err(line, format!("expected `{SOLUTION_HEADER}`")));
            }
            header = true;
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match (tokens[0], tokens.len()) {
            ("instance", 2) => sol.instance = tokens[1].to_string(),
            ("method", 2) => sol.method = tokens[1].to_string(),
            ("cost", 2) => sol.cost = number(tokens[1], line, "cost")?,
            ("step", 3) => sol.steps.push((tokens[1].to_string(), tokens[2].to_string())),
            _ => return Err(parse_err(line, format!("malformed record `{content}`"))),
        }
    }
    if !header {
        return Err(parse_err(1, format!("expected `{SOLUTION_HEADER}`")));
    }
    Ok(sol)
}

pub fn read_solution(path: impl AsRef<Path>) -> Result<SolutionFile> {
    parse_solution(&read_text(path.as_ref())?)
}

pub fn write_solution(path: impl AsRef<Path>, sol: &SolutionFile) -> Result<()> {
    write_text(path.as_ref(), &render_solution(sol))
}
