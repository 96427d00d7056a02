//! Partial permutation graphs grown one edge at a time.
//!
//! A partial permutation graph on `{0, …, n-1}` has at most one outgoing and
//! one incoming edge per vertex. While it stays acyclic every component is a
//! chain, well-ordered by the edge relation, with a unique head (no incoming
//! edge) and a unique tail (no outgoing edge). Adding an edge either merges
//! two chains (component count drops by one) or closes the chain it lives on
//! into a cycle (component count unchanged, cycle count up by one).
//!
//! Components are tracked with a union-find structure augmented with the
//! order-theoretic endpoints and the size of each component, so the lazy
//! oracles can answer "head of this chain" and "tail of this chain" in
//! near-constant time.

use serde_json::json;
use thiserror::Error;

/// Largest domain for which a graph may be allocated.
pub const MAX_GRAPH_N: u64 = 1 << 24;

const NO_EDGE: u64 = u64::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("domain size must be at least 1")]
    ZeroDomain,
    #[error("domain size {n} exceeds the graph cap {max}")]
    DomainTooLarge { n: u64, max: u64 },
    #[error("vertex {v} is outside the domain of size {n}")]
    VertexOutOfRange { v: u64, n: u64 },
    #[error("vertex {x} already has an outgoing edge")]
    OutgoingEdgeExists { x: u64 },
    #[error("vertex {y} already has an incoming edge")]
    IncomingEdgeExists { y: u64 },
    #[error("graph contains a cycle but is not a completed cyclus")]
    NotExtendable,
    #[error("extension count ({components} components) overflows u128")]
    ExtensionOverflow { components: u64 },
}

/// What inserting an edge did to the component structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeEffect {
    /// The edge joined two distinct chains into one.
    MergedComponents,
    /// The edge ran from the tail of a chain to its own head, closing a cycle.
    ClosedCycle,
}

/// Order-theoretic endpoints and size of one component.
///
/// `min` is the element with no incoming edge (the chain head) and `max` the
/// element with no outgoing edge (the chain tail): endpoints in the edge
/// well-order, not numeric extremes. For a component that has been closed
/// into a cycle, the endpoints of the chain it was closed from are retained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentInfo {
    pub min: u64,
    pub max: u64,
    pub size: u64,
}

#[derive(Clone, Debug)]
pub struct PartialPermGraph {
    succ: Vec<u64>,
    pred: Vec<u64>,
    parent: Vec<u32>,
    size: Vec<u64>,
    order_min: Vec<u64>,
    order_max: Vec<u64>,
    component_count: u64,
    cycle_count: u64,
    edge_count: u64,
}

impl PartialPermGraph {
    pub fn new(n: u64) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::ZeroDomain);
        }
        if n > MAX_GRAPH_N {
            return Err(GraphError::DomainTooLarge {
                n,
                max: MAX_GRAPH_N,
            });
        }
        let len = n as usize;
        Ok(Self {
            succ: vec![NO_EDGE; len],
            pred: vec![NO_EDGE; len],
            parent: (0..len as u32).collect(),
            size: vec![1; len],
            order_min: (0..n).collect(),
            order_max: (0..n).collect(),
            component_count: n,
            cycle_count: 0,
            edge_count: 0,
        })
    }

    /// Rebuilds a graph from an edge list (order does not matter).
    pub fn from_edges(n: u64, edges: &[(u64, u64)]) -> Result<Self, GraphError> {
        let mut g = Self::new(n)?;
        for &(x, y) in edges {
            g.add_edge(x, y)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> u64 {
        self.succ.len() as u64
    }

    pub fn component_count(&self) -> u64 {
        self.component_count
    }

    pub fn cycle_count(&self) -> u64 {
        self.cycle_count
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    /// Set once any inserted edge has closed a cycle.
    pub fn bad(&self) -> bool {
        self.cycle_count > 0
    }

    pub fn successor(&self, x: u64) -> Option<u64> {
        match self.succ[x as usize] {
            NO_EDGE => None,
            y => Some(y),
        }
    }

    pub fn predecessor(&self, y: u64) -> Option<u64> {
        match self.pred[y as usize] {
            NO_EDGE => None,
            x => Some(x),
        }
    }

    pub fn has_edges_at(&self, v: u64) -> bool {
        self.succ[v as usize] != NO_EDGE || self.pred[v as usize] != NO_EDGE
    }

    fn check_vertex(&self, v: u64) -> Result<(), GraphError> {
        if v >= self.n() {
            return Err(GraphError::VertexOutOfRange { v, n: self.n() });
        }
        Ok(())
    }

    /// Non-compressing root lookup; paths stay short under union by size.
    fn root(&self, v: u64) -> usize {
        let mut r = v as usize;
        while self.parent[r] as usize != r {
            r = self.parent[r] as usize;
        }
        r
    }

    fn root_compress(&mut self, v: u64) -> usize {
        let r = self.root(v);
        let mut cur = v as usize;
        while self.parent[cur] as usize != cur {
            let next = self.parent[cur] as usize;
            self.parent[cur] = r as u32;
            cur = next;
        }
        r
    }

    /// Inserts the edge `x → y`.
    ///
    /// `x` must not yet have an outgoing edge and `y` must not yet have an
    /// incoming one; equivalently, `x` is the tail of its chain and `y` the
    /// head of its chain. A self-loop `x → x` on an isolated vertex is legal
    /// and closes a fixed-point cycle.
    pub fn add_edge(&mut self, x: u64, y: u64) -> Result<EdgeEffect, GraphError> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        if self.succ[x as usize] != NO_EDGE {
            return Err(GraphError::OutgoingEdgeExists { x });
        }
        if self.pred[y as usize] != NO_EDGE {
            return Err(GraphError::IncomingEdgeExists { y });
        }
        self.succ[x as usize] = y;
        self.pred[y as usize] = x;
        self.edge_count += 1;

        let rx = self.root_compress(x);
        let ry = self.root_compress(y);
        if rx == ry {
            self.cycle_count += 1;
            return Ok(EdgeEffect::ClosedCycle);
        }
        // The merged chain runs from x's head to y's tail.
        let new_min = self.order_min[rx];
        let new_max = self.order_max[ry];
        let new_size = self.size[rx] + self.size[ry];
        let (big, small) = if self.size[rx] >= self.size[ry] {
            (rx, ry)
        } else {
            (ry, rx)
        };
        self.parent[small] = big as u32;
        self.size[big] = new_size;
        self.order_min[big] = new_min;
        self.order_max[big] = new_max;
        self.component_count -= 1;
        Ok(EdgeEffect::MergedComponents)
    }

    /// Aggregates of the component containing `x`. An isolated vertex reports
    /// `(x, x, 1)`.
    pub fn component_info(&self, x: u64) -> ComponentInfo {
        let r = self.root(x);
        ComponentInfo {
            min: self.order_min[r],
            max: self.order_max[r],
            size: self.size[r],
        }
    }

    pub fn same_component(&self, x: u64, y: u64) -> bool {
        self.root(x) == self.root(y)
    }

    /// True when the graph is still extendable to a cyclus and is not one yet.
    pub fn is_proper_partial_cyclus(&self) -> bool {
        self.cycle_count == 0
    }

    /// True when the graph is the complete graph of a cyclus.
    pub fn is_complete_cyclus(&self) -> bool {
        self.cycle_count == 1 && self.component_count == 1 && self.edge_count == self.n()
    }

    /// Number of cyclus graphs extending this one: `(m-1)!` for a cycle-free
    /// graph with `m` components, and 1 for a completed cyclus.
    pub fn count_cyclus_extensions(&self) -> Result<u128, GraphError> {
        if self.is_complete_cyclus() {
            return Ok(1);
        }
        if self.cycle_count > 0 {
            return Err(GraphError::NotExtendable);
        }
        let m = self.component_count;
        let mut acc: u128 = 1;
        for k in 2..m {
            acc = acc
                .checked_mul(k as u128)
                .ok_or(GraphError::ExtensionOverflow { components: m })?;
        }
        Ok(acc)
    }

    /// Edges sorted by source vertex.
    pub fn edges(&self) -> Vec<(u64, u64)> {
        self.succ
            .iter()
            .enumerate()
            .filter(|&(_, &y)| y != NO_EDGE)
            .map(|(x, &y)| (x as u64, y))
            .collect()
    }

    /// Debug dump as `{"n": …, "edges": [[x, y], …]}` for test fixtures.
    pub fn dump_json(&self) -> serde_json::Value {
        json!({
            "n": self.n(),
            "edges": self.edges(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{for_each_cyclus, Permutation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn merge_then_close() {
        let mut g = PartialPermGraph::new(3).unwrap();
        assert_eq!(g.component_count(), 3);
        assert_eq!(g.add_edge(0, 1).unwrap(), EdgeEffect::MergedComponents);
        assert_eq!(g.component_count(), 2);
        assert_eq!(g.cycle_count(), 0);
        assert_eq!(g.add_edge(1, 0).unwrap(), EdgeEffect::ClosedCycle);
        assert_eq!(g.component_count(), 2);
        assert_eq!(g.cycle_count(), 1);
        assert!(g.bad());
    }

    #[test]
    fn duplicate_endpoints_rejected() {
        let mut g = PartialPermGraph::new(3).unwrap();
        g.add_edge(0, 1).unwrap();
        assert_eq!(
            g.add_edge(0, 2),
            Err(GraphError::OutgoingEdgeExists { x: 0 })
        );
        assert_eq!(
            g.add_edge(2, 1),
            Err(GraphError::IncomingEdgeExists { y: 1 })
        );
    }

    #[test]
    fn component_info_examples() {
        let g = PartialPermGraph::new(8).unwrap();
        assert_eq!(
            g.component_info(5),
            ComponentInfo {
                min: 5,
                max: 5,
                size: 1
            }
        );

        // Chain 2 → 0 → 4: the head in the edge order is 2, the tail is 4.
        let g = PartialPermGraph::from_edges(8, &[(2, 0), (0, 4)]).unwrap();
        assert_eq!(
            g.component_info(4),
            ComponentInfo {
                min: 2,
                max: 4,
                size: 3
            }
        );

        let mut g = PartialPermGraph::new(1).unwrap();
        assert_eq!(g.add_edge(0, 0).unwrap(), EdgeEffect::ClosedCycle);
        assert_eq!(
            g.component_info(0),
            ComponentInfo {
                min: 0,
                max: 0,
                size: 1
            }
        );
    }

    #[test]
    fn extension_counts() {
        let g = PartialPermGraph::new(4).unwrap();
        assert_eq!(g.count_cyclus_extensions().unwrap(), 6);

        let g = PartialPermGraph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.component_count(), 2);
        assert_eq!(g.count_cyclus_extensions().unwrap(), 1);

        // Completed cyclus: exactly one extension (itself).
        let g = PartialPermGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(g.count_cyclus_extensions().unwrap(), 1);

        // A closed cycle that is not the full cyclus cannot be extended.
        let g = PartialPermGraph::from_edges(3, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.count_cyclus_extensions(), Err(GraphError::NotExtendable));
    }

    #[test]
    fn proper_partial_cyclus_flag() {
        let g = PartialPermGraph::new(4).unwrap();
        assert!(g.is_proper_partial_cyclus());
        let g = PartialPermGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(!g.is_proper_partial_cyclus());
        assert!(g.is_complete_cyclus());
        let g = PartialPermGraph::from_edges(3, &[(0, 1), (1, 0)]).unwrap();
        assert!(!g.is_proper_partial_cyclus());
    }

    #[test]
    fn dump_json_shape() {
        let g = PartialPermGraph::from_edges(3, &[(2, 0), (0, 1)]).unwrap();
        assert_eq!(
            g.dump_json(),
            serde_json::json!({"n": 3, "edges": [[0, 1], [2, 0]]})
        );
    }

    /// Counts, by brute force over all cycluses of S_n, how many are
    /// consistent with every edge of `g`.
    fn brute_force_extensions(g: &PartialPermGraph) -> u128 {
        let mut count = 0u128;
        for_each_cyclus(g.n(), |c| {
            if g.edges().iter().all(|&(x, y)| c.apply(x) == y) {
                count += 1;
            }
        })
        .unwrap();
        count
    }

    fn random_proper_graph(n: u64, rng: &mut impl Rng) -> PartialPermGraph {
        let mut g = PartialPermGraph::new(n).unwrap();
        let target = rng.random_range(0..n);
        while g.edge_count() < target {
            let tails: Vec<u64> = (0..n).filter(|&v| g.successor(v).is_none()).collect();
            let x = tails[rng.random_range(0..tails.len())];
            let heads: Vec<u64> = (0..n)
                .filter(|&v| g.predecessor(v).is_none() && !g.same_component(v, x))
                .collect();
            if heads.is_empty() {
                break;
            }
            let y = heads[rng.random_range(0..heads.len())];
            assert_eq!(g.add_edge(x, y).unwrap(), EdgeEffect::MergedComponents);
        }
        g
    }

    #[test]
    fn extension_count_matches_brute_force() {
        let mut rng = ChaCha12Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let n = rng.random_range(1..=6);
            let g = random_proper_graph(n, &mut rng);
            assert_eq!(
                g.count_cyclus_extensions().unwrap(),
                brute_force_extensions(&g),
                "n={n} edges={:?}",
                g.edges()
            );
        }
    }

    #[test]
    fn acyclic_iff_extendable_small() {
        // A graph built by legal insertions extends to at least one cyclus
        // exactly when it has no cycle.
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..300 {
            let n = rng.random_range(1..=6);
            let mut g = PartialPermGraph::new(n).unwrap();
            let steps = rng.random_range(0..=n);
            for _ in 0..steps {
                let tails: Vec<u64> = (0..n).filter(|&v| g.successor(v).is_none()).collect();
                if tails.is_empty() {
                    break;
                }
                let x = tails[rng.random_range(0..tails.len())];
                let heads: Vec<u64> = (0..n).filter(|&v| g.predecessor(v).is_none()).collect();
                let y = heads[rng.random_range(0..heads.len())];
                let _ = g.add_edge(x, y);
            }
            let extendable = brute_force_extensions(&g) > 0;
            assert_eq!(
                g.is_proper_partial_cyclus() || g.is_complete_cyclus(),
                extendable
            );
        }
    }

    #[test]
    fn aggregates_match_recomputation() {
        let mut rng = ChaCha12Rng::seed_from_u64(4242);
        for _ in 0..100 {
            let n = rng.random_range(1..=24);
            let p = Permutation::random(n, &mut rng).unwrap();
            let mut g = PartialPermGraph::new(n).unwrap();
            let mut merges = 0;
            // Insert the permutation's edges in random order; each prefix is a
            // legal partial permutation graph.
            let mut order: Vec<u64> = (0..n).collect();
            for i in (1..order.len()).rev() {
                let j = rng.random_range(0..=i);
                order.swap(i, j);
            }
            for &x in &order {
                if g.add_edge(x, p.apply(x)).unwrap() == EdgeEffect::MergedComponents {
                    merges += 1;
                }
                assert_eq!(g.component_count(), n - merges);
                check_endpoints(&g);
            }
        }
    }

    /// Recomputes each component's head, tail, and size by scanning edges.
    fn check_endpoints(g: &PartialPermGraph) {
        'vertices: for v in 0..g.n() {
            let info = g.component_info(v);
            // Walk to the head unless the component is a closed cycle.
            let mut head = v;
            let mut steps = 0;
            while let Some(p) = g.predecessor(head) {
                head = p;
                steps += 1;
                if steps > g.n() {
                    // Closed cycle: endpoints retain their pre-closure values.
                    continue 'vertices;
                }
            }
            let mut tail = v;
            while let Some(s) = g.successor(tail) {
                tail = s;
            }
            let mut size = 1;
            let mut cur = head;
            while let Some(s) = g.successor(cur) {
                cur = s;
                size += 1;
            }
            assert_eq!(info.min, head);
            assert_eq!(info.max, tail);
            assert_eq!(info.size, size);
        }
    }
}
