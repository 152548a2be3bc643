use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::format::{InstanceFile, Metadata, Probabilities};
use crate::error::{Error, Result};
use crate::graph::{metric_closure, Instance, ROOT};

/// Largest vertex weight drawn for weighted instances.
const MAX_WEIGHT: u64 = 1000;
/// Range of the uniform integer edge lengths of the random-metric family.
const LENGTH_RANGE: (u32, u32) = (1, 100);
/// Coordinates are uniform integers in `[0, COORD_MAX]`.
const COORD_MAX: i64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    RandomMetric,
    Euclidean,
    DensityControlled,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::RandomMetric => "random-metric",
            Family::Euclidean => "euclidean",
            Family::DensityControlled => "density-controlled",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random-metric" => Ok(Family::RandomMetric),
            "euclidean" => Ok(Family::Euclidean),
            "density-controlled" => Ok(Family::DensityControlled),
            other => Err(format!("unknown family `{other}` (random-metric, euclidean, density-controlled)")),
        }
    }
}

/// Parameters of a generated instance. `n` counts every vertex, root included.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    /// Target `|E| / (n(n−1)/2)`; only the density-controlled family uses it.
    pub density: f64,
    pub weighted: bool,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn default_name(&self) -> String {
        let w = if self.weighted { "w" } else { "u" };
        match self.family {
            Family::DensityControlled => {
                format!("{}-n{}-d{}-{w}-s{}", self.family.name(), self.n, (self.density * 100.0).round(), self.seed)
            }
            _ => format!("{}-n{}-{w}-s{}", self.family.name(), self.n, self.seed),
        }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<InstanceFile> {
    match spec.family {
        Family::RandomMetric => generate_random_metric(spec),
        Family::Euclidean => generate_euclidean(spec),
        Family::DensityControlled => generate_density_controlled(spec),
    }
}

fn check_n(spec: &GeneratorSpec) -> Result<()> {
    if spec.n < 2 {
        return Err(Error::InfeasibleRequest(format!("need at least 2 vertices, got {}", spec.n)));
    }
    Ok(())
}

/// Integer weights `a_v` (root 0) and their sum.
fn draw_weights(rng: &mut ChaCha8Rng, n: usize, weighted: bool) -> (Vec<u64>, u64) {
    loop {
        let weights: Vec<u64> = (0..n)
            .map(|v| match (v == ROOT, weighted) {
                (true, _) => 0,
                (false, true) => rng.gen_range(0..=MAX_WEIGHT),
                (false, false) => 1,
            })
            .collect();
        let total: u64 = weights.iter().sum();
        if total > 0 {
            return (weights, total);
        }
    }
}

fn finish(
    spec: &GeneratorSpec,
    weights: (Vec<u64>, u64),
    edges: Vec<(usize, usize, f64)>,
    coords: Option<Vec<Vec<i64>>>,
    extra: &[(&str, String)],
) -> Result<InstanceFile> {
    let (weights, total) = weights;
    let prob = weights.iter().map(|&a| a as f64 / total as f64).collect();
    let instance = Instance::new(prob, edges)?;
    let mut metadata = Metadata::default();
    metadata.set("family", spec.family.name());
    metadata.set("seed", spec.seed);
    metadata.set("weighted", spec.weighted);
    for (k, v) in extra {
        metadata.set(k, v);
    }
    Ok(InstanceFile {
        name: spec.default_name(),
        instance,
        probabilities: Probabilities::Weights { weights, total },
        metadata,
        coords,
        collapsed: 0,
    })
}

/// Complete graph with uniform integer lengths replaced by shortest-path distances.
pub fn generate_random_metric(spec: &GeneratorSpec) -> Result<InstanceFile> {
    check_n(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let weights = draw_weights(&mut rng, n, spec.weighted);
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v, rng.gen_range(LENGTH_RANGE.0..=LENGTH_RANGE.1) as f64));
        }
    }
    let raw = Instance::with_weights(vec![0.0; n], edges.iter().copied())?;
    let closure = metric_closure(&raw);
    let edges = edges.iter().map(|&(u, v, _)| (u, v, closure.distance(u, v))).collect();
    let range = format!("uniform-int {} {}", LENGTH_RANGE.0, LENGTH_RANGE.1);
    finish(spec, weights, edges, None, &[("lengths", range)])
}

fn points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<i64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.gen_range(0..=COORD_MAX)).collect()).collect()
}

/// Rounded euclidean distance, at least 1.
pub(crate) fn euclidean_length(a: &[i64], b: &[i64]) -> f64 {
    let d2: i64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (d2 as f64).sqrt().round().max(1.0)
}

/// Rectilinear distance, at least 1.
pub(crate) fn rectilinear_length(a: &[i64], b: &[i64]) -> f64 {
    let d: i64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    d.max(1) as f64
}

/// Complete graph on uniform integer points of the plane with rounded
/// euclidean lengths.
pub fn generate_euclidean(spec: &GeneratorSpec) -> Result<InstanceFile> {
    check_n(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let weights = draw_weights(&mut rng, n, spec.weighted);
    let pts = points(&mut rng, n, 2);
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v, euclidean_length(&pts[u], &pts[v])));
        }
    }
    finish(spec, weights, edges, Some(pts), &[("coordinates", format!("uniform-int 0 {COORD_MAX}"))])
}

/// Number of edges requested by `density`, rounded to the nearest integer.
pub(crate) fn target_edges(n: usize, density: f64) -> Result<usize> {
    let pairs = n * (n - 1) / 2;
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InfeasibleRequest(format!("density must lie in (0, 1], got {density}")));
    }
    let m = (density * pairs as f64).round() as usize;
    if m < n - 1 {
        return Err(Error::InfeasibleRequest(format!(
            "density {density} gives {m} edges, fewer than the {} a connected graph on {n} vertices needs",
            n - 1
        )));
    }
    Ok(m)
}

/// Random spanning tree from a stream of random vertex pairs (a pair is kept
/// when it joins two components), then random extra edges up to the target
/// density. Points are uniform in the cube `[0, 100]³`, lengths rectilinear.
pub fn generate_density_controlled(spec: &GeneratorSpec) -> Result<InstanceFile> {
    check_n(spec)?;
    let n = spec.n;
    let m = target_edges(n, spec.density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let weights = draw_weights(&mut rng, n, spec.weighted);
    let pts = points(&mut rng, n, 3);
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(comp: &mut [usize], mut v: usize) -> usize {
        while comp[v] != v {
            comp[v] = comp[comp[v]];
            v = comp[v];
        }
        v
    }
    let mut used = vec![false; n * n];
    let mut pairs = Vec::with_capacity(m);
    while pairs.len() < n - 1 {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let (a, b) = (find(&mut comp, u), find(&mut comp, v));
        if a != b {
            comp[a] = b;
            let (u, v) = (u.min(v), u.max(v));
            used[u * n + v] = true;
            pairs.push((u, v));
        }
    }
    let mut rest: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| !used[u * n + v]).collect();
    rest.shuffle(&mut rng);
    pairs.extend(rest.into_iter().take(m - (n - 1)));
    pairs.sort_unstable();
    let edges = pairs.iter().map(|&(u, v)| (u, v, rectilinear_length(&pts[u], &pts[v]))).collect();
    let extra = [("density", spec.density.to_string()), ("coordinates", format!("uniform-int 0 {COORD_MAX}"))];
    finish(spec, weights, edges, Some(pts), &extra)
}
