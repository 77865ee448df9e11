//! Min-cost flow via successive shortest paths with node potentials.
//!
//! Capacities and balances are integral, so augmenting unit bottlenecks keeps
//! every intermediate flow integral; costs are real-valued arc lengths.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::Real;

#[derive(Debug, Clone)]
struct Edge<F> {
    to: usize,
    cap: i64,
    cost: F,
}

/// Residual graph with paired forward/backward edges.
#[derive(Debug, Clone)]
pub struct MinCostFlow<F> {
    adj: Vec<Vec<u32>>,
    edges: Vec<Edge<F>>,
    initial_cap: Vec<i64>,
}

struct HeapItem<F> {
    dist: F,
    node: usize,
}

impl<F: PartialOrd> PartialEq for HeapItem<F> {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.node == other.node
    }
}
impl<F: PartialOrd> Eq for HeapItem<F> {}
impl<F: PartialOrd> PartialOrd for HeapItem<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<F: PartialOrd> Ord for HeapItem<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap, we want the nearest node first
        other.dist.partial_cmp(&self.dist).unwrap_or(Ordering::Equal)
    }
}

impl<F: Real> MinCostFlow<F> {
    pub fn new(num_nodes: usize) -> Self {
        Self { adj: vec![Vec::new(); num_nodes], edges: Vec::new(), initial_cap: Vec::new() }
    }

    /// Add a directed edge; returns its id for flow queries.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: F) -> usize {
        let id = self.edges.len();
        self.adj[from].push(id as u32);
        self.edges.push(Edge { to, cap, cost });
        self.adj[to].push(id as u32 + 1);
        self.edges.push(Edge { to: from, cap: 0, cost: -cost });
        self.initial_cap.push(cap);
        self.initial_cap.push(0);
        id
    }

    /// Flow currently routed over the edge returned by [`Self::add_edge`].
    pub fn flow_on(&self, edge_id: usize) -> i64 {
        self.initial_cap[edge_id] - self.edges[edge_id].cap
    }

    /// Send up to `limit` units from `source` to `sink` at minimum cost.
    /// Returns (flow shipped, total cost).
    pub fn solve(&mut self, source: usize, sink: usize, limit: i64) -> (i64, F) {
        let n = self.adj.len();
        let mut potential = vec![F::zero(); n];
        let mut shipped = 0i64;
        let mut total_cost = F::zero();
        let mut dist = vec![F::infinity(); n];
        let mut parent = vec![u32::MAX; n];

        while shipped < limit {
            for d in dist.iter_mut() {
                *d = F::infinity();
            }
            for p in parent.iter_mut() {
                *p = u32::MAX;
            }
            dist[source] = F::zero();
            let mut heap = BinaryHeap::new();
            heap.push(HeapItem { dist: F::zero(), node: source });
            while let Some(HeapItem { dist: d, node: u }) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &eid in &self.adj[u] {
                    let e = &self.edges[eid as usize];
                    if e.cap <= 0 {
                        continue;
                    }
                    // reduced cost; clamp float noise at zero
                    let rc = (e.cost + potential[u] - potential[e.to]).max(F::zero());
                    let nd = d + rc;
                    if nd < dist[e.to] {
                        dist[e.to] = nd;
                        parent[e.to] = eid;
                        heap.push(HeapItem { dist: nd, node: e.to });
                    }
                }
            }
            if dist[sink].is_infinite() {
                break;
            }
            for v in 0..n {
                if !dist[v].is_infinite() {
                    potential[v] = potential[v] + dist[v];
                }
            }
            // bottleneck along the path
            let mut bottleneck = limit - shipped;
            let mut v = sink;
            while v != source {
                let eid = parent[v] as usize;
                bottleneck = bottleneck.min(self.edges[eid].cap);
                v = self.edges[eid ^ 1].to;
            }
            let mut v = sink;
            while v != source {
                let eid = parent[v] as usize;
                self.edges[eid].cap -= bottleneck;
                self.edges[eid ^ 1].cap += bottleneck;
                total_cost =
                    total_cost + self.edges[eid].cost * F::from_i64(bottleneck).unwrap();
                v = self.edges[eid ^ 1].to;
            }
            shipped += bottleneck;
        }
        (shipped, total_cost)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arc() {
        let mut g = MinCostFlow::<f64>::new(2);
        let e = g.add_edge(0, 1, 1, 5.0);
        let (flow, cost) = g.solve(0, 1, 1);
        assert_eq!(flow, 1);
        assert_eq!(cost, 5.0);
        assert_eq!(g.flow_on(e), 1);
    }

    #[test]
    fn parallel_arcs_pick_cheap() {
        let mut g = MinCostFlow::<f64>::new(2);
        let cheap = g.add_edge(0, 1, 1, 1.0);
        let dear = g.add_edge(0, 1, 1, 3.0);
        let (flow, cost) = g.solve(0, 1, 1);
        assert_eq!(flow, 1);
        assert_eq!(cost, 1.0);
        assert_eq!(g.flow_on(cheap), 1);
        assert_eq!(g.flow_on(dear), 0);
    }

    #[test]
    fn forced_saturation() {
        // demand 2 over unit arcs of cost 1 and 3: both saturate, cost 4
        let mut g = MinCostFlow::<f64>::new(2);
        g.add_edge(0, 1, 1, 1.0);
        g.add_edge(0, 1, 1, 3.0);
        let (flow, cost) = g.solve(0, 1, 2);
        assert_eq!(flow, 2);
        assert_eq!(cost, 4.0);
    }

    #[test]
    fn rerouting_through_residuals() {
        // classic residual test: path 0->1->3 is cheap but blocks 0->2->3
        let mut g = MinCostFlow::<f64>::new(4);
        g.add_edge(0, 1, 1, 1.0);
        g.add_edge(1, 3, 1, 1.0);
        g.add_edge(0, 2, 1, 2.0);
        g.add_edge(2, 3, 1, 2.0);
        g.add_edge(1, 2, 1, 0.0);
        let (flow, cost) = g.solve(0, 3, 2);
        assert_eq!(flow, 2);
        assert_eq!(cost, 6.0);
    }
}
