//! Rooted edge-weighted graphs, expanding searches and the tree utilities shared
//! by every solver.
//!
//! Vertices are dense ids `0..n_total` and the root is always vertex 0. External
//! labels survive in a name table so files can use arbitrary identifiers.

use std::collections::VecDeque;

use crate::error::{Error, Result, SearchViolation};

pub type Vertex = usize;

pub const ROOT: Vertex = 0;

/// Absolute tolerance on `Σ p_v = 1`.
pub const PROB_SUM_TOL: f64 = 1e-9;

const NO_EDGE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub length: f64,
}

impl Edge {
    pub fn other(&self, w: Vertex) -> Vertex {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A connected graph with root 0, vertex probabilities and positive lengths.
///
/// Instances built with [`Instance::new`] satisfy `p_root = 0` and `Σ p = 1`.
/// Derived graphs (contractions, PCST inputs) are built with
/// [`Instance::with_weights`], which only requires non-negative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    names: Vec<String>,
    prob: Vec<f64>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(Vertex, usize)>>,
    index: Vec<usize>,
}

impl Instance {
    /// Builds a validated instance; parallel edges collapse to the shortest one.
    pub fn new(prob: Vec<f64>, edges: impl IntoIterator<Item = (Vertex, Vertex, f64)>) -> Result<Self> {
        Ok(Self::build(prob, edges, true)?.0)
    }

    /// Like [`Instance::new`] without the `Σ p = 1` requirement.
    pub fn with_weights(prob: Vec<f64>, edges: impl IntoIterator<Item = (Vertex, Vertex, f64)>) -> Result<Self> {
        Ok(Self::build(prob, edges, false)?.0)
    }

    /// Builds an instance and reports how many parallel edges were collapsed.
    pub fn build(
        prob: Vec<f64>,
        edges: impl IntoIterator<Item = (Vertex, Vertex, f64)>,
        normalized: bool,
    ) -> Result<(Self, usize)> {
        let count = prob.len();
        if count == 0 {
            return Err(Error::VertexOutOfRange { vertex: ROOT, count });
        }
        for (v, &p) in prob.iter().enumerate() {
            let limit = if normalized { 1.0 + PROB_SUM_TOL } else { f64::INFINITY };
            if !(p >= 0.0 && p <= limit) || p.is_nan() {
                return Err(Error::BadProbability { vertex: v, p });
            }
        }
        if prob[ROOT] != 0.0 {
            return Err(Error::RootProbability(prob[ROOT]));
        }
        if normalized {
            let sum: f64 = prob.iter().sum();
            if (sum - 1.0).abs() > PROB_SUM_TOL {
                return Err(Error::ProbabilitySum(sum));
            }
        }
        let mut inst = Instance {
            names: (0..count).map(|v| v.to_string()).collect(),
            prob,
            edges: Vec::new(),
            adj: vec![Vec::new(); count],
            index: vec![NO_EDGE; count * count],
        };
        let mut collapsed = 0;
        for (u, v, length) in edges {
            for w in [u, v] {
                if w >= count {
                    return Err(Error::VertexOutOfRange { vertex: w, count });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !(length > 0.0 && length.is_finite()) {
                return Err(Error::BadLength { u, v, length });
            }
            let (a, b) = (u.min(v), u.max(v));
            match inst.index[a * count + b] {
                NO_EDGE => {
                    let id = inst.edges.len();
                    inst.edges.push(Edge { u: a, v: b, length });
                    inst.index[a * count + b] = id;
                    inst.index[b * count + a] = id;
                    inst.adj[a].push((b, id));
                    inst.adj[b].push((a, id));
                }
                id => {
                    collapsed += 1;
                    let e = &mut inst.edges[id];
                    e.length = e.length.min(length);
                }
            }
        }
        for list in &mut inst.adj {
            list.sort_unstable();
        }
        let reach = inst.reachable_from_root();
        if let Some(v) = reach.iter().position(|&r| !r) {
            return Err(Error::Disconnected(v));
        }
        Ok((inst, collapsed))
    }

    fn reachable_from_root(&self) -> Vec<bool> {
        let mut seen = vec![false; self.n_total()];
        let mut queue = VecDeque::from([ROOT]);
        seen[ROOT] = true;
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.n_total(), "one name per vertex");
        self.names = names;
        self
    }

    /// Number of vertices including the root.
    pub fn n_total(&self) -> usize {
        self.prob.len()
    }

    /// Number of non-root vertices.
    pub fn n(&self) -> usize {
        self.prob.len() - 1
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn prob(&self, v: Vertex) -> f64 {
        self.prob[v]
    }

    pub fn probs(&self) -> &[f64] {
        &self.prob
    }

    pub fn total_prob(&self) -> f64 {
        self.prob.iter().sum()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    pub fn edge_id(&self, u: Vertex, v: Vertex) -> Option<usize> {
        let n = self.n_total();
        if u >= n || v >= n {
            return None;
        }
        match self.index[u * n + v] {
            NO_EDGE => None,
            id => Some(id),
        }
    }

    pub fn length(&self, u: Vertex, v: Vertex) -> Option<f64> {
        self.edge_id(u, v).map(|id| self.edges[id].length)
    }

    /// Neighbors of `v` with the connecting edge id, sorted by neighbor.
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, usize)] {
        &self.adj[v]
    }

    pub fn max_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    /// Same graph with new vertex weights (validated like [`Instance::with_weights`]).
    pub fn reweighted(&self, prob: Vec<f64>) -> Result<Self> {
        let edges = self.edges.iter().map(|e| (e.u, e.v, e.length));
        Ok(Self::with_weights(prob, edges)?.with_names(self.names.clone()))
    }

    /// Same graph with every length scaled by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let edges = self.edges.iter().map(|e| (e.u, e.v, e.length * factor));
        Ok(Self::with_weights(self.prob.clone(), edges)?.with_names(self.names.clone()))
    }

    /// True when the edges form a spanning tree.
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.n_total()
    }
}

/// An ordered sequence of edges; orientation inside each pair is not significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExpandingSearch {
    steps: Vec<(Vertex, Vertex)>,
}

impl ExpandingSearch {
    pub fn new(steps: Vec<(Vertex, Vertex)>) -> Self {
        ExpandingSearch { steps }
    }

    pub fn steps(&self) -> &[(Vertex, Vertex)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Steps oriented as (previously visited, newly visited) along with the
    /// arrival length of every vertex. Fails on the first invalid step.
    pub fn walk(&self, inst: &Instance) -> Result<(Vec<(Vertex, Vertex)>, Vec<f64>)> {
        let n = inst.n_total();
        let mut visited = vec![false; n];
        visited[ROOT] = true;
        let mut arrival = vec![0.0; n];
        let mut elapsed = 0.0;
        let mut oriented = Vec::with_capacity(self.steps.len());
        for (step, &(a, b)) in self.steps.iter().enumerate() {
            let fail = |violation| Err(Error::InvalidSearch { step, violation });
            if a >= n || b >= n {
                return fail(SearchViolation::UnknownVertex(a.max(b)));
            }
            let Some(len) = inst.length(a, b) else {
                return fail(SearchViolation::NotAnEdge(a, b));
            };
            let (from, to) = match (visited[a], visited[b]) {
                (true, false) => (a, b),
                (false, true) => (b, a),
                (true, true) => return fail(SearchViolation::Revisit(a, b)),
                (false, false) => return fail(SearchViolation::Disconnected(a, b)),
            };
            elapsed += len;
            visited[to] = true;
            arrival[to] = elapsed;
            oriented.push((from, to));
        }
        if oriented.len() != n - 1 {
            return Err(Error::IncompleteSearch { visited: oriented.len() + 1, expected: n });
        }
        Ok((oriented, arrival))
    }

    /// Arrival length of every vertex (root at 0).
    pub fn arrivals(&self, inst: &Instance) -> Result<Vec<f64>> {
        Ok(self.walk(inst)?.1)
    }

    /// The spanning tree formed by the search edges.
    pub fn tree(&self, inst: &Instance) -> Result<RootedTree> {
        let (oriented, _) = self.walk(inst)?;
        let mut parent = vec![None; inst.n_total()];
        for (from, to) in oriented {
            parent[to] = Some((from, inst.length(from, to).expect("validated edge")));
        }
        RootedTree::from_parents(parent)
    }

    /// Order in which vertices are first reached (root excluded).
    pub fn visit_order(&self, inst: &Instance) -> Result<Vec<Vertex>> {
        Ok(self.walk(inst)?.0.into_iter().map(|(_, to)| to).collect())
    }
}

/// Expected distance travelled before the target is found.
pub fn search_cost(inst: &Instance, sigma: &ExpandingSearch) -> Result<f64> {
    let arrival = sigma.arrivals(inst)?;
    Ok(inst.probs().iter().zip(&arrival).map(|(p, a)| p * a).sum())
}

/// A tree containing the root, stored as parent links into a host graph.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    parent: Vec<Option<(Vertex, f64)>>,
    in_tree: Vec<bool>,
}

impl RootedTree {
    /// Root-only tree in a host graph of `n_total` vertices.
    pub fn root_only(n_total: usize) -> Self {
        let mut in_tree = vec![false; n_total];
        in_tree[ROOT] = true;
        RootedTree { parent: vec![None; n_total], in_tree }
    }

    /// Builds a tree from parent links; vertices with no parent (other than the
    /// root) are outside the tree. Every parent chain must reach the root.
    pub fn from_parents(parent: Vec<Option<(Vertex, f64)>>) -> Result<Self> {
        let n = parent.len();
        if parent.get(ROOT).copied().flatten().is_some() {
            return Err(Error::NotATree("root has a parent".into()));
        }
        let mut in_tree = vec![false; n];
        in_tree[ROOT] = true;
        for v in 0..n {
            if parent[v].is_none() {
                continue;
            }
            let mut w = v;
            let mut steps = 0;
            while let Some((p, len)) = parent[w] {
                if p >= n {
                    return Err(Error::NotATree(format!("parent {p} out of range")));
                }
                if !(len > 0.0) {
                    return Err(Error::NotATree(format!("non-positive length on {p}-{w}")));
                }
                w = p;
                steps += 1;
                if steps > n {
                    return Err(Error::NotATree(format!("cycle through vertex {v}")));
                }
            }
            if w != ROOT {
                return Err(Error::NotATree(format!("vertex {v} does not reach the root")));
            }
            in_tree[v] = true;
        }
        Ok(RootedTree { parent, in_tree })
    }

    /// Orients an undirected edge list away from the root.
    pub fn from_edges(n_total: usize, edges: &[(Vertex, Vertex, f64)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n_total];
        for &(u, v, len) in edges {
            if u >= n_total || v >= n_total {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), count: n_total });
            }
            adj[u].push((v, len));
            adj[v].push((u, len));
        }
        let mut parent = vec![None; n_total];
        let mut seen = vec![false; n_total];
        seen[ROOT] = true;
        let mut queue = VecDeque::from([ROOT]);
        let mut reached = 0;
        while let Some(v) = queue.pop_front() {
            for &(w, len) in &adj[v] {
                if Some(v) == parent[w].map(|(p, _)| p) || parent[v].map(|(p, _)| p) == Some(w) {
                    continue;
                }
                if seen[w] {
                    return Err(Error::NotATree(format!("cycle through edge {v}-{w}")));
                }
                seen[w] = true;
                parent[w] = Some((v, len));
                reached += 1;
                queue.push_back(w);
            }
        }
        if reached != edges.len() {
            return Err(Error::NotATree("edges not connected to the root".into()));
        }
        Self::from_parents(parent)
    }

    pub fn host_size(&self) -> usize {
        self.parent.len()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.in_tree[v]
    }

    pub fn parent(&self, v: Vertex) -> Option<(Vertex, f64)> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<(Vertex, f64)>] {
        &self.parent
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.parent.len()).filter(|&v| self.in_tree[v])
    }

    pub fn vertex_count(&self) -> usize {
        self.in_tree.iter().filter(|&&b| b).count()
    }

    pub fn is_spanning(&self) -> bool {
        self.in_tree.iter().all(|&b| b)
    }

    /// Tree edges as (parent, child, length).
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, f64)> + '_ {
        self.parent.iter().enumerate().filter_map(|(v, p)| p.map(|(u, len)| (u, v, len)))
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.parent[a].map(|(p, _)| p) == Some(b) || self.parent[b].map(|(p, _)| p) == Some(a)
    }

    /// λ(T).
    pub fn total_length(&self) -> f64 {
        self.edges().map(|(_, _, len)| len).sum()
    }

    /// p(T) under the given vertex weights.
    pub fn mass(&self, prob: &[f64]) -> f64 {
        self.vertices().map(|v| prob[v]).sum()
    }

    /// p(T)/λ(T); `None` for the root-only tree.
    pub fn density(&self, prob: &[f64]) -> Option<f64> {
        let len = self.total_length();
        (len > 0.0).then(|| self.mass(prob) / len)
    }

    pub fn depth(&self, mut v: Vertex) -> usize {
        let mut d = 0;
        while let Some((p, _)) = self.parent[v] {
            v = p;
            d += 1;
        }
        d
    }

    /// Children lists (sorted ascending).
    pub fn children(&self) -> Vec<Vec<Vertex>> {
        let mut ch = vec![Vec::new(); self.parent.len()];
        for (u, v, _) in self.edges() {
            ch[u].push(v);
        }
        ch
    }

    /// Same vertex set re-rooted edges with new lengths taken from `inst`.
    pub fn relengthed(&self, inst: &Instance) -> Result<Self> {
        let parent = self
            .parent
            .iter()
            .enumerate()
            .map(|(v, p)| match p {
                None => Ok(None),
                Some((u, _)) => inst
                    .length(*u, v)
                    .map(|len| Some((*u, len)))
                    .ok_or_else(|| Error::NotATree(format!("edge {u}-{v} missing from host graph"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parents(parent)
    }

    /// Replaces edge `add` for edge `remove`, which must lie on the
    /// fundamental cycle of `add`. Lengths come from `inst`.
    pub fn swap(&self, inst: &Instance, add: (Vertex, Vertex), remove: (Vertex, Vertex)) -> Result<Self> {
        let mut edges: Vec<(Vertex, Vertex, f64)> = self
            .edges()
            .filter(|&(u, v, _)| !((u, v) == remove || (v, u) == remove))
            .collect();
        if edges.len() == self.edge_count() {
            return Err(Error::NotATree(format!("edge {}-{} not in tree", remove.0, remove.1)));
        }
        let len = inst
            .length(add.0, add.1)
            .ok_or_else(|| Error::NotATree(format!("edge {}-{} missing from host graph", add.0, add.1)))?;
        edges.push((add.0, add.1, len));
        Self::from_edges(self.parent.len(), &edges)
    }
}

/// The unique cycle of `tree + e`, as tree-path edges followed by `e` itself.
pub fn fundamental_cycle(tree: &RootedTree, e: (Vertex, Vertex)) -> Result<Vec<(Vertex, Vertex)>> {
    let (a, b) = e;
    if a >= tree.host_size() || b >= tree.host_size() || !tree.contains(a) || !tree.contains(b) {
        return Err(Error::EdgeOutsideTree(a, b));
    }
    if a == b || tree.has_edge(a, b) {
        return Err(Error::EdgeInTree(a, b));
    }
    let (mut x, mut y) = (a, b);
    let (mut dx, mut dy) = (tree.depth(x), tree.depth(y));
    let mut left = Vec::new();
    let mut right = Vec::new();
    while dx > dy {
        let p = tree.parent(x).expect("non-root").0;
        left.push((x, p));
        x = p;
        dx -= 1;
    }
    while dy > dx {
        let p = tree.parent(y).expect("non-root").0;
        right.push((y, p));
        y = p;
        dy -= 1;
    }
    while x != y {
        let px = tree.parent(x).expect("non-root").0;
        let py = tree.parent(y).expect("non-root").0;
        left.push((x, px));
        right.push((y, py));
        x = px;
        y = py;
    }
    right.reverse();
    left.extend(right.into_iter().map(|(c, p)| (p, c)));
    left.push((b, a));
    Ok(left)
}

/// Complete graph of shortest-path distances plus one witness path per pair.
#[derive(Debug, Clone)]
pub struct MetricClosure {
    pub instance: Instance,
    next: Vec<Vertex>,
}

impl MetricClosure {
    /// A shortest path in the original graph from `u` to `v` (both ends included).
    pub fn path(&self, u: Vertex, v: Vertex) -> Vec<Vertex> {
        let n = self.instance.n_total();
        let mut path = vec![u];
        let mut w = u;
        while w != v {
            w = self.next[w * n + v];
            path.push(w);
        }
        path
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> f64 {
        if u == v {
            0.0
        } else {
            self.instance.length(u, v).expect("closure is complete")
        }
    }
}

/// All-pairs shortest paths (Floyd–Warshall); only strict improvements replace a
/// distance so the closure of a metric graph returns identical lengths.
pub fn metric_closure(inst: &Instance) -> MetricClosure {
    let n = inst.n_total();
    let mut dist = vec![f64::INFINITY; n * n];
    let mut next = vec![usize::MAX; n * n];
    for v in 0..n {
        dist[v * n + v] = 0.0;
        next[v * n + v] = v;
    }
    for e in inst.edges() {
        dist[e.u * n + e.v] = e.length;
        dist[e.v * n + e.u] = e.length;
        next[e.u * n + e.v] = e.v;
        next[e.v * n + e.u] = e.u;
    }
    let scale = inst.max_length().max(1.0);
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let cand = dik + dist[k * n + j];
                if cand < dist[i * n + j] - 1e-12 * scale {
                    dist[i * n + j] = cand;
                    next[i * n + j] = next[i * n + k];
                }
            }
        }
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v, dist[u * n + v]));
        }
    }
    let instance = Instance::with_weights(inst.probs().to_vec(), edges)
        .expect("closure of a connected graph is valid")
        .with_names(inst.names().to_vec());
    MetricClosure { instance, next }
}

/// The graph `G/S` with its bookkeeping back to `G`.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub instance: Instance,
    /// Contracted vertex id → original vertex id (0 ↦ root).
    pub to_original: Vec<Vertex>,
    /// Original vertex id → contracted id, `None` for contracted vertices.
    pub from_original: Vec<Option<Vertex>>,
    /// For each contracted vertex `w` adjacent to the new root: the original
    /// edge `(s, w_orig)` with `s ∈ S` realizing the minimum length.
    pub witness: Vec<Option<(Vertex, Vertex)>>,
}

impl Contraction {
    /// Maps an edge of the contracted graph to the original edge it stands for.
    pub fn original_edge(&self, a: Vertex, b: Vertex) -> (Vertex, Vertex) {
        if a == ROOT {
            self.witness[b].expect("root edge has a witness")
        } else if b == ROOT {
            let (s, w) = self.witness[a].expect("root edge has a witness");
            (w, s)
        } else {
            (self.to_original[a], self.to_original[b])
        }
    }
}

/// Contracts the vertex set `set` (which must contain the root) into the root.
pub fn contract(inst: &Instance, set: &[bool]) -> Result<Contraction> {
    let n = inst.n_total();
    if !set[ROOT] {
        return Err(Error::RootNotInSet);
    }
    if set.iter().all(|&b| b) {
        return Err(Error::NothingToContract);
    }
    let mut to_original = vec![ROOT];
    let mut from_original = vec![None; n];
    from_original[ROOT] = Some(ROOT);
    for v in 0..n {
        if !set[v] {
            from_original[v] = Some(to_original.len());
            to_original.push(v);
        }
    }
    let m = to_original.len();
    let mut witness: Vec<Option<(Vertex, Vertex)>> = vec![None; m];
    let mut root_len = vec![f64::INFINITY; m];
    let mut edges = Vec::new();
    for e in inst.edges() {
        match (set[e.u], set[e.v]) {
            (true, true) => {}
            (false, false) => {
                edges.push((from_original[e.u].unwrap(), from_original[e.v].unwrap(), e.length))
            }
            (su, _) => {
                let (s, w) = if su { (e.u, e.v) } else { (e.v, e.u) };
                let cw = from_original[w].unwrap();
                let better = match witness[cw] {
                    None => true,
                    Some((s_old, _)) => {
                        e.length < root_len[cw] || (e.length == root_len[cw] && s < s_old)
                    }
                };
                if better {
                    witness[cw] = Some((s, w));
                    root_len[cw] = e.length;
                }
            }
        }
    }
    for w in 1..m {
        if witness[w].is_some() {
            edges.push((ROOT, w, root_len[w]));
        }
    }
    let prob = to_original.iter().map(|&v| if v == ROOT { 0.0 } else { inst.prob(v) }).collect();
    let names = to_original.iter().map(|&v| inst.name(v).to_string()).collect();
    let instance = Instance::with_weights(prob, edges)?.with_names(names);
    Ok(Contraction { instance, to_original, from_original, witness })
}

/// Minimum spanning tree of the subgraph induced by `subset` (Prim), rooted at
/// the root. `None` when the induced subgraph is disconnected or misses the root.
pub fn induced_mst(inst: &Instance, subset: &[bool]) -> Option<RootedTree> {
    let n = inst.n_total();
    if !subset[ROOT] {
        return None;
    }
    let mut parent = vec![None; n];
    let mut best = vec![f64::INFINITY; n];
    let mut best_from = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut cur = ROOT;
    done[ROOT] = true;
    let total = subset.iter().filter(|&&b| b).count();
    for _ in 1..total {
        for &(w, id) in inst.neighbors(cur) {
            let len = inst.edge(id).length;
            if subset[w] && !done[w] && len < best[w] {
                best[w] = len;
                best_from[w] = cur;
            }
        }
        let next = (0..n).filter(|&w| subset[w] && !done[w] && best[w].is_finite()).min_by(|&a, &b| {
            best[a].total_cmp(&best[b]).then(a.cmp(&b))
        })?;
        done[next] = true;
        parent[next] = Some((best_from[next], best[next]));
        cur = next;
    }
    RootedTree::from_parents(parent).ok()
}

/// Shortest-path tree from the root (Dijkstra, ties to the smaller predecessor).
pub fn shortest_path_tree(inst: &Instance) -> RootedTree {
    let n = inst.n_total();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<(Vertex, f64)>> = vec![None; n];
    let mut done = vec![false; n];
    dist[ROOT] = 0.0;
    for _ in 0..n {
        let Some(v) = (0..n).filter(|&v| !done[v] && dist[v].is_finite()).min_by(|&a, &b| {
            dist[a].total_cmp(&dist[b]).then(a.cmp(&b))
        }) else {
            break;
        };
        done[v] = true;
        for &(w, id) in inst.neighbors(v) {
            let len = inst.edge(id).length;
            let cand = dist[v] + len;
            if !done[w] && cand < dist[w] {
                dist[w] = cand;
                parent[w] = Some((v, len));
            }
        }
    }
    RootedTree::from_parents(parent).expect("shortest-path tree of a connected graph")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_ab() -> Instance {
        Instance::new(vec![0.0, 0.5, 0.5], [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn path_cost() {
        let inst = path_ab();
        let sigma = ExpandingSearch::new(vec![(0, 1), (1, 2)]);
        assert_eq!(search_cost(&inst, &sigma).unwrap(), 1.5);
    }

    #[test]
    fn invalid_searches_name_the_step() {
        let inst = path_ab();
        let err = search_cost(&inst, &ExpandingSearch::new(vec![(1, 2), (0, 1)])).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidSearch { step: 0, violation: SearchViolation::Disconnected(1, 2) }
        );
        let err = search_cost(&inst, &ExpandingSearch::new(vec![(0, 1), (0, 1)])).unwrap_err();
        assert_eq!(err, Error::InvalidSearch { step: 1, violation: SearchViolation::Revisit(0, 1) });
        let err = search_cost(&inst, &ExpandingSearch::new(vec![(0, 2)])).unwrap_err();
        assert_eq!(err, Error::InvalidSearch { step: 0, violation: SearchViolation::NotAnEdge(0, 2) });
        let err = search_cost(&inst, &ExpandingSearch::new(vec![(0, 1)])).unwrap_err();
        assert_eq!(err, Error::IncompleteSearch { visited: 2, expected: 3 });
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            Instance::new(vec![0.0, 0.9], [(0, 1, 1.0)]).unwrap_err(),
            Error::ProbabilitySum(0.9)
        );
        assert_eq!(Instance::new(vec![0.0, 1.0], [(1, 1, 1.0)]).unwrap_err(), Error::SelfLoop(1));
        assert!(matches!(
            Instance::new(vec![0.0, 1.0], [(0, 1, 0.0)]).unwrap_err(),
            Error::BadLength { .. }
        ));
        assert_eq!(
            Instance::new(vec![0.0, 0.5, 0.5], [(0, 1, 1.0)]).unwrap_err(),
            Error::Disconnected(2)
        );
        assert_eq!(
            Instance::new(vec![0.1, 0.9], [(0, 1, 1.0)]).unwrap_err(),
            Error::RootProbability(0.1)
        );
    }

    #[test]
    fn parallel_edges_collapse_to_minimum() {
        let (inst, collapsed) =
            Instance::build(vec![0.0, 1.0], [(0, 1, 3.0), (1, 0, 2.0), (0, 1, 5.0)], true).unwrap();
        assert_eq!(collapsed, 2);
        assert_eq!(inst.edges().len(), 1);
        assert_eq!(inst.length(0, 1), Some(2.0));
    }

    #[test]
    fn closure_shortcuts_triangle() {
        let inst =
            Instance::new(vec![0.0, 0.5, 0.5], [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]).unwrap();
        let cl = metric_closure(&inst);
        assert_eq!(cl.instance.length(0, 2), Some(2.0));
        assert_eq!(cl.path(0, 2), vec![0, 1, 2]);
        let again = metric_closure(&cl.instance);
        assert_eq!(again.instance.edges(), cl.instance.edges());
    }

    #[test]
    fn identity_contraction() {
        let inst =
            Instance::new(vec![0.0, 0.5, 0.5], [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]).unwrap();
        let c = contract(&inst, &[true, false, false]).unwrap();
        let mut got: Vec<_> = c.instance.edges().iter().map(|e| (e.u, e.v, e.length)).collect();
        let mut want: Vec<_> = inst.edges().iter().map(|e| (e.u, e.v, e.length)).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, want);
        assert_eq!(contract(&inst, &[true; 3]).unwrap_err(), Error::NothingToContract);
        assert_eq!(contract(&inst, &[false, true, true]).unwrap_err(), Error::RootNotInSet);
    }

    #[test]
    fn contraction_witness_prefers_smallest_endpoint_on_ties() {
        // vertices 1 and 2 both reach 3 at length 2
        let inst = Instance::new(
            vec![0.0, 0.2, 0.2, 0.6],
            [(0, 1, 1.0), (0, 2, 1.0), (2, 3, 2.0), (1, 3, 2.0)],
        )
        .unwrap();
        let c = contract(&inst, &[true, true, true, false]).unwrap();
        assert_eq!(c.instance.length(0, 1), Some(2.0));
        assert_eq!(c.witness[1], Some((1, 3)));
        assert_eq!(c.original_edge(1, 0), (3, 1));
    }

    #[test]
    fn cycles_in_small_trees() {
        // star: 0-1, 0-2, 0-3
        let star = RootedTree::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        assert_eq!(fundamental_cycle(&star, (1, 2)).unwrap().len(), 3);
        // path 0-1-2-3
        let path = RootedTree::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let cyc = fundamental_cycle(&path, (0, 3)).unwrap();
        assert_eq!(cyc, vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(fundamental_cycle(&path, (1, 2)).unwrap_err(), Error::EdgeInTree(1, 2));
    }

    #[test]
    fn tree_from_edges_rejects_cycles() {
        let err = RootedTree::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::NotATree(_)));
    }

    #[test]
    fn mst_and_spt() {
        let inst =
            Instance::new(vec![0.0, 0.5, 0.5], [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.5)]).unwrap();
        let mst = induced_mst(&inst, &[true, true, true]).unwrap();
        assert_eq!(mst.total_length(), 2.0);
        let spt = shortest_path_tree(&inst);
        assert_eq!(spt.parent(2), Some((0, 1.5)));
        assert!(induced_mst(&inst, &[true, false, true]).unwrap().total_length() == 1.5);
    }
}
