//! The mixed integer program over arcs and its tree-only linear program.

use expsearch_lp::{LpModel, Row, Sense};

use crate::graph::{Instance, RootedTree, Vertex, ROOT};

const NO_COL: usize = usize::MAX;

/// Column layout of the relaxation of the arc formulation.
///
/// The root is visited first, so every `δ_rj` is the constant 1 and only pairs
/// of non-root vertices get a column; for `i < j` the column stands for `δ_ij`
/// and `δ_ji = 1 − δ_ij`. Arcs into the root can never carry a search and are
/// left out, as is `z_r = 1`.
#[derive(Debug, Clone)]
pub struct MipModel {
    pub lp: LpModel,
    n_total: usize,
    prob: Vec<f64>,
    arcs: Vec<(Vertex, Vertex)>,
    arc_length: Vec<f64>,
    arc_index: Vec<usize>,
    delta: Vec<usize>,
    z: Vec<usize>,
    x: Vec<usize>,
    y: Vec<usize>,
    pub inflow_rows: bool,
}

/// An affine term `constant + coef · column` for one ordering variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTerm {
    pub col: Option<usize>,
    pub coef: f64,
    pub constant: f64,
}

impl MipModel {
    /// Builds the reach-probability, arc-selection and arc-load rows; with
    /// `inflow_rows` also the strengthened rows `z_j ≥ p_j + y_jk`. Ordering triangles are separated
    /// lazily (see [`crate::bnc::violated_triangles`]).
    pub fn build(inst: &Instance, inflow_rows: bool) -> Self {
        let n = inst.n_total();
        let mut lp = LpModel::new();
        let mut delta = vec![NO_COL; n * n];
        for i in 1..n {
            for j in i + 1..n {
                let c = lp.add_named_column(format!("d_{i}_{j}"), 0.0, 1.0, 0.0);
                delta[i * n + j] = c;
                delta[j * n + i] = c;
            }
        }
        let mut z = vec![NO_COL; n];
        for (j, slot) in z.iter_mut().enumerate().skip(1) {
            *slot = lp.add_named_column(format!("z_{j}"), 0.0, 1.0, 0.0);
        }
        let mut arcs = Vec::new();
        let mut arc_length = Vec::new();
        for e in inst.edges() {
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                if b != ROOT {
                    arcs.push((a, b));
                    arc_length.push(e.length);
                }
            }
        }
        let mut arc_index = vec![NO_COL; n * n];
        let mut x = Vec::with_capacity(arcs.len());
        let mut y = Vec::with_capacity(arcs.len());
        for (id, &(a, b)) in arcs.iter().enumerate() {
            arc_index[a * n + b] = id;
            x.push(lp.add_named_column(format!("x_{a}_{b}"), 0.0, 1.0, 0.0));
        }
        for (id, &(a, b)) in arcs.iter().enumerate() {
            y.push(lp.add_named_column(format!("y_{a}_{b}"), 0.0, 1.0, arc_length[id]));
        }
        let mut m = MipModel {
            lp,
            n_total: n,
            prob: inst.probs().to_vec(),
            arcs,
            arc_length,
            arc_index,
            delta,
            z,
            x,
            y,
            inflow_rows,
        };
        m.add_static_rows();
        m
    }

    fn add_static_rows(&mut self) {
        let n = self.n_total;
        let mut rows = Vec::new();
        // z_i = p_i + Σ_j p_j δ_ij
        for i in 1..n {
            let mut coeffs = vec![(self.z[i], 1.0)];
            let mut rhs = self.prob[i];
            for j in 1..n {
                if j == i || self.prob[j] == 0.0 {
                    continue;
                }
                let t = self.delta_term(i, j);
                rhs += self.prob[j] * t.constant;
                coeffs.push((t.col.expect("non-root pair"), -self.prob[j] * t.coef));
            }
            rows.push(Row::new(coeffs, Sense::Eq, rhs));
        }
        // one incoming arc, carrying z_j
        let mut into: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (id, &(_, b)) in self.arcs.iter().enumerate() {
            into[b].push(id);
        }
        for j in 1..n {
            rows.push(Row::new(into[j].iter().map(|&a| (self.x[a], 1.0)).collect(), Sense::Eq, 1.0));
            let mut coeffs: Vec<_> = into[j].iter().map(|&a| (self.y[a], 1.0)).collect();
            coeffs.push((self.z[j], -1.0));
            rows.push(Row::new(coeffs, Sense::Eq, 0.0));
        }
        // y ≤ x and x ≤ δ
        for (id, &(a, b)) in self.arcs.iter().enumerate() {
            rows.push(Row::new(vec![(self.y[id], 1.0), (self.x[id], -1.0)], Sense::Le, 0.0));
            let t = self.delta_term(a, b);
            if let Some(col) = t.col {
                rows.push(Row::new(vec![(self.x[id], 1.0), (col, -t.coef)], Sense::Le, t.constant));
            }
        }
        if self.inflow_rows {
            for (id, &(j, _)) in self.arcs.iter().enumerate() {
                if j != ROOT {
                    let coeffs = vec![(self.z[j], 1.0), (self.y[id], -1.0)];
                    rows.push(Row::new(coeffs, Sense::Ge, self.prob[j]));
                }
            }
        }
        self.lp.add_rows(rows).expect("columns exist");
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn prob(&self) -> &[f64] {
        &self.prob
    }

    pub fn arcs(&self) -> &[(Vertex, Vertex)] {
        &self.arcs
    }

    pub fn arc_length(&self, arc: usize) -> f64 {
        self.arc_length[arc]
    }

    pub fn arc_id(&self, a: Vertex, b: Vertex) -> Option<usize> {
        match self.arc_index[a * self.n_total + b] {
            NO_COL => None,
            id => Some(id),
        }
    }

    pub fn x_col(&self, arc: usize) -> usize {
        self.x[arc]
    }

    pub fn y_col(&self, arc: usize) -> usize {
        self.y[arc]
    }

    pub fn z_col(&self, v: Vertex) -> Option<usize> {
        (v != ROOT).then(|| self.z[v])
    }

    /// `δ_ij` as an affine function of the columns.
    pub fn delta_term(&self, i: Vertex, j: Vertex) -> DeltaTerm {
        if i == ROOT {
            return DeltaTerm { col: None, coef: 0.0, constant: 1.0 };
        }
        if j == ROOT {
            return DeltaTerm { col: None, coef: 0.0, constant: 0.0 };
        }
        let col = self.delta[i * self.n_total + j];
        if i < j {
            DeltaTerm { col: Some(col), coef: 1.0, constant: 0.0 }
        } else {
            DeltaTerm { col: Some(col), coef: -1.0, constant: 1.0 }
        }
    }

    pub fn delta_value(&self, values: &[f64], i: Vertex, j: Vertex) -> f64 {
        let t = self.delta_term(i, j);
        t.constant + t.col.map_or(0.0, |c| t.coef * values[c])
    }

    /// z values of every vertex (root at 1).
    pub fn z_values(&self, values: &[f64]) -> Vec<f64> {
        (0..self.n_total).map(|v| if v == ROOT { 1.0 } else { values[self.z[v]] }).collect()
    }

    pub fn x_values(&self, values: &[f64]) -> Vec<f64> {
        self.x.iter().map(|&c| values[c]).collect()
    }

    pub fn y_values(&self, values: &[f64]) -> Vec<f64> {
        self.y.iter().map(|&c| values[c]).collect()
    }

    /// Column values of the integral point describing `tree` searched in `order`.
    pub fn integral_point(&self, tree: &RootedTree, order: &[Vertex]) -> Vec<f64> {
        let n = self.n_total;
        let mut rank = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            rank[v] = k + 1;
        }
        let mut values = vec![0.0; self.lp.num_cols()];
        for i in 1..n {
            for j in i + 1..n {
                values[self.delta[i * n + j]] = if rank[i] < rank[j] { 1.0 } else { 0.0 };
            }
        }
        let mut residual = 1.0;
        for &v in order {
            values[self.z[v]] = residual;
            residual -= self.prob[v];
        }
        for (v, p) in tree.parents().iter().enumerate() {
            if let Some((u, _)) = p {
                let a = self.arc_id(*u, v).expect("tree arc exists");
                values[self.x[a]] = 1.0;
                values[self.y[a]] = values[self.z[v]];
            }
        }
        values
    }
}

/// The ordering linear program of a rooted tree: columns `δ_ij` for ordered
/// pairs `i < j` (with `δ_ji = 1 − δ_ij`) and `z_i`, all triangle rows, the
/// precedence fixings of tree arcs, and objective `Σ_{(i,j)} λ_ij z_j`.
pub fn tree_lp(tree: &RootedTree, prob: &[f64]) -> LpModel {
    let n = tree.host_size();
    let mut lp = LpModel::new();
    let mut col = vec![NO_COL; n * n];
    for i in 0..n {
        for j in i + 1..n {
            col[i * n + j] = lp.add_named_column(format!("d_{i}_{j}"), 0.0, 1.0, 0.0);
        }
    }
    // δ_ij = constant + coef · column
    let term = |i: usize, j: usize| -> (usize, f64, f64) {
        if i < j {
            (col[i * n + j], 1.0, 0.0)
        } else {
            (col[j * n + i], -1.0, 1.0)
        }
    };
    let z: Vec<usize> = (0..n)
        .map(|v| {
            let cost = tree.parent(v).map_or(0.0, |(_, len)| len);
            lp.add_named_column(format!("z_{v}"), 0.0, 1.0, cost)
        })
        .collect();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                // δ_ij + δ_jk + δ_ki ≥ 1 and the reverse cycle, as one ranged row
                let coeffs = vec![(col[i * n + j], 1.0), (col[j * n + k], 1.0), (col[i * n + k], -1.0)];
                rows.push(Row::ranged(coeffs, 0.0, 1.0));
            }
        }
    }
    for (v, p) in tree.parents().iter().enumerate() {
        if let Some((u, _)) = p {
            let (c, coef, constant) = term(*u, v);
            rows.push(Row::new(vec![(c, coef)], Sense::Eq, 1.0 - constant));
        }
    }
    for i in 0..n {
        let mut coeffs = vec![(z[i], 1.0)];
        let mut rhs = prob[i];
        for j in 0..n {
            if j != i && prob[j] != 0.0 {
                let (c, coef, constant) = term(i, j);
                rhs += prob[j] * constant;
                coeffs.push((c, -prob[j] * coef));
            }
        }
        rows.push(Row::new(coeffs, Sense::Eq, rhs));
    }
    lp.add_rows(rows).expect("columns exist");
    lp
}
