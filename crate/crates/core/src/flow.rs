//! Maximum flow by breadth-first augmenting paths (Edmonds–Karp).

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    nodes: usize,
    // arc i and its reverse i ^ 1 are stored next to each other
    head: Vec<usize>,
    cap: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

/// A maximum flow and the source side of a minimum cut.
#[derive(Debug, Clone, PartialEq)]
pub struct MinCut {
    pub value: f64,
    pub source_side: Vec<bool>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { nodes, head: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn add_arc(&mut self, from: usize, to: usize, capacity: f64) -> Result<()> {
        if !(capacity >= 0.0 && capacity.is_finite()) {
            return Err(Error::BadCapacity(capacity));
        }
        for v in [from, to] {
            if v >= self.nodes {
                return Err(Error::VertexOutOfRange { vertex: v, count: self.nodes });
            }
        }
        let id = self.head.len();
        self.head.push(to);
        self.cap.push(capacity);
        self.adj[from].push(id);
        self.head.push(from);
        self.cap.push(0.0);
        self.adj[to].push(id + 1);
        Ok(())
    }

    /// Arcs as (from, to, capacity) in insertion order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.head.len()).step_by(2).map(|i| (self.head[i + 1], self.head[i], self.cap[i]))
    }

    /// Capacity of the arcs leaving `side`.
    pub fn cut_capacity(&self, side: &[bool]) -> f64 {
        self.arcs().filter(|&(u, v, _)| side[u] && !side[v]).map(|(_, _, c)| c).sum()
    }

    /// Residual capacities below `tol` count as saturated, which keeps the
    /// reported cut consistent with the flow value under rounding.
    pub fn max_flow_min_cut(&self, source: usize, sink: usize, tol: f64) -> MinCut {
        let mut residual = self.cap.clone();
        let mut value = 0.0;
        let mut pred = vec![usize::MAX; self.nodes];
        loop {
            pred.iter_mut().for_each(|p| *p = usize::MAX);
            let mut seen = vec![false; self.nodes];
            seen[source] = true;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &a in &self.adj[u] {
                    let v = self.head[a];
                    if !seen[v] && residual[a] > tol {
                        seen[v] = true;
                        pred[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if source == sink || !seen[sink] {
                let value = if source == sink { f64::INFINITY } else { value };
                return MinCut { value, source_side: seen };
            }
            let mut bottleneck = f64::INFINITY;
            let mut v = sink;
            while v != source {
                let a = pred[v];
                bottleneck = bottleneck.min(residual[a]);
                v = self.head[a ^ 1];
            }
            let mut v = sink;
            while v != source {
                let a = pred[v];
                residual[a] -= bottleneck;
                residual[a ^ 1] += bottleneck;
                v = self.head[a ^ 1];
            }
            value += bottleneck;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arc() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, 3.0).unwrap();
        let cut = net.max_flow_min_cut(0, 1, 0.0);
        assert_eq!(cut.value, 3.0);
        assert_eq!(cut.source_side, vec![true, false]);
    }

    #[test]
    fn two_parallel_paths() {
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 2.0).unwrap();
        net.add_arc(1, 3, 1.0).unwrap();
        net.add_arc(0, 2, 3.0).unwrap();
        net.add_arc(2, 3, 4.0).unwrap();
        let cut = net.max_flow_min_cut(0, 3, 0.0);
        assert_eq!(cut.value, 4.0);
        assert_eq!(net.cut_capacity(&cut.source_side), 4.0);
    }

    #[test]
    fn zero_network() {
        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, 0.0).unwrap();
        let cut = net.max_flow_min_cut(0, 2, 0.0);
        assert_eq!(cut.value, 0.0);
        assert_eq!(cut.source_side, vec![true, false, false]);
    }

    #[test]
    fn rejects_negative_capacity() {
        let mut net = FlowNetwork::new(2);
        assert_eq!(net.add_arc(0, 1, -1.0).unwrap_err(), Error::BadCapacity(-1.0));
    }
}
