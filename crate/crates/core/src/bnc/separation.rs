//! Directed-cut inequalities and their separation by minimum cuts.

use expsearch_lp::{Row, Sense};

use super::model::MipModel;
use crate::flow::FlowNetwork;
use crate::graph::{Vertex, ROOT};

/// Cuts whose violation does not exceed this are ignored.
pub const CUT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutFamily {
    /// `Σ_{C(S)} y ≥ z_k` for a vertex `k` outside `S`.
    C1,
    /// `Σ_{C(S)} y ≥ Σ_{i∉S} p_i`.
    C2,
}

/// A directed-cut inequality identified by its root side `S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cut {
    pub family: CutFamily,
    pub set: Vec<bool>,
    pub k: Option<Vertex>,
}

impl Cut {
    /// Arcs leaving the root side.
    pub fn arcs<'a>(&'a self, arcs: &'a [(Vertex, Vertex)]) -> impl Iterator<Item = usize> + 'a {
        arcs.iter().enumerate().filter(|(_, &(a, b))| self.set[a] && !self.set[b]).map(|(id, _)| id)
    }

    /// Right-hand side minus left-hand side at the given arc loads and reach
    /// probabilities; positive means violated.
    pub fn violation_at(&self, arcs: &[(Vertex, Vertex)], y: &[f64], z: &[f64], prob: &[f64]) -> f64 {
        let lhs: f64 = self.arcs(arcs).map(|a| y[a]).sum();
        self.rhs_at(z, prob) - lhs
    }

    fn rhs_at(&self, z: &[f64], prob: &[f64]) -> f64 {
        match self.family {
            CutFamily::C1 => z[self.k.expect("C1 cut has a target")],
            CutFamily::C2 => prob.iter().zip(&self.set).filter(|(_, &s)| !s).map(|(p, _)| p).sum(),
        }
    }

    pub fn violation(&self, m: &MipModel, values: &[f64]) -> f64 {
        self.violation_at(m.arcs(), &m.y_values(values), &m.z_values(values), m.prob())
    }

    pub fn row(&self, m: &MipModel) -> Row {
        let mut coeffs: Vec<(usize, f64)> = self.arcs(m.arcs()).map(|a| (m.y_col(a), 1.0)).collect();
        match self.family {
            CutFamily::C1 => {
                let k = self.k.expect("C1 cut has a target");
                coeffs.push((m.z_col(k).expect("target is not the root"), -1.0));
                Row::new(coeffs, Sense::Ge, 0.0)
            }
            CutFamily::C2 => {
                let rhs = self.rhs_at(&[], m.prob());
                Row::new(coeffs, Sense::Ge, rhs)
            }
        }
    }
}

fn network(n_total: usize, arcs: &[(Vertex, Vertex)], y: &[f64], extra: usize) -> FlowNetwork {
    let mut net = FlowNetwork::new(n_total + extra);
    for (&(a, b), &cap) in arcs.iter().zip(y) {
        net.add_arc(a, b, cap.max(0.0)).expect("valid arc");
    }
    net
}

/// For every `k` with `z_k > 0`, the minimum root–`k` cut under capacities `y`;
/// returns a C1 cut for each `k` whose cut is below `z_k − CUT_TOL`.
pub fn separate_c1_at(n_total: usize, arcs: &[(Vertex, Vertex)], y: &[f64], z: &[f64]) -> Vec<(Cut, f64)> {
    let net = network(n_total, arcs, y, 0);
    let mut out = Vec::new();
    for k in 1..n_total {
        if z[k] <= CUT_TOL {
            continue;
        }
        let cut = net.max_flow_min_cut(ROOT, k, 1e-12);
        if cut.value < z[k] - CUT_TOL {
            out.push((Cut { family: CutFamily::C1, set: cut.source_side, k: Some(k) }, z[k] - cut.value));
        }
    }
    out
}

/// One maximum flow to a dummy sink fed by arcs of capacity `p_i`; returns the
/// C2 cut of the minimum cut when its capacity is below `1 − CUT_TOL`.
pub fn separate_c2_at(n_total: usize, arcs: &[(Vertex, Vertex)], y: &[f64], prob: &[f64]) -> Option<(Cut, f64)> {
    let mut net = network(n_total, arcs, y, 1);
    let sink = n_total;
    for (i, &p) in prob.iter().enumerate() {
        net.add_arc(i, sink, p).expect("valid arc");
    }
    let total: f64 = prob.iter().sum();
    let cut = net.max_flow_min_cut(ROOT, sink, 1e-12);
    (cut.value < total - CUT_TOL).then(|| {
        let mut set = cut.source_side;
        set.truncate(n_total);
        (Cut { family: CutFamily::C2, set, k: None }, total - cut.value)
    })
}

pub fn separate_c1(m: &MipModel, values: &[f64]) -> Vec<(Cut, f64)> {
    separate_c1_at(m.n_total(), m.arcs(), &m.y_values(values), &m.z_values(values))
}

pub fn separate_c2(m: &MipModel, values: &[f64]) -> Option<(Cut, f64)> {
    separate_c2_at(m.n_total(), m.arcs(), &m.y_values(values), m.prob())
}

/// Ordering triangles `0 ≤ δ_ij + δ_jk − δ_ik ≤ 1` over non-root triples,
/// most violated first.
pub fn violated_triangles(m: &MipModel, values: &[f64], limit: usize) -> Vec<((Vertex, Vertex, Vertex), f64)> {
    let n = m.n_total();
    let mut out = Vec::new();
    for i in 1..n {
        for j in i + 1..n {
            let dij = m.delta_value(values, i, j);
            for k in j + 1..n {
                let v = dij + m.delta_value(values, j, k) - m.delta_value(values, i, k);
                let viol = (-v).max(v - 1.0);
                if viol > CUT_TOL {
                    out.push(((i, j, k), viol));
                }
            }
        }
    }
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    out.truncate(limit);
    out
}

pub fn triangle_row(m: &MipModel, (i, j, k): (Vertex, Vertex, Vertex)) -> Row {
    let col = |a, b| m.delta_term(a, b).col.expect("non-root pair");
    Row::ranged(vec![(col(i, j), 1.0), (col(j, k), 1.0), (col(i, k), -1.0)], 0.0, 1.0)
}
