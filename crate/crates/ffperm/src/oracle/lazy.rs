//! Lazily sampled permutation state shared by the incremental oracles.
//!
//! The core grows a partial permutation graph one edge per fresh query. A
//! fresh forward query at `x` picks a component uniformly at random, answers
//! with its chain head, and records the edge from `x` to that head; a
//! backward query dually answers with a chain tail. In cyclus mode the
//! component of `x` is excluded, so no cycle can close until only one
//! component remains, at which point the closing answer is forced. In
//! permutation mode the component of `x` is eligible too; choosing it closes
//! a cycle and raises the bad flag.
//!
//! Randomness enters only through a choice index in `[0, choice_count)`,
//! which keeps the decision structure enumerable: the exact-distribution
//! checks expand every index instead of drawing one.

use rand::Rng;

use crate::graph::{GraphError, PartialPermGraph};
use crate::oracle::{BasicQuery, Direction};

const NO_POS: usize = usize::MAX;

#[derive(Clone, Debug)]
pub(crate) struct LazyCore {
    graph: PartialPermGraph,
    /// Heads (order-minimal elements) of the still-open components, in a
    /// dense array so a uniform choice and a removal are O(1).
    heads: Vec<u64>,
    head_pos: Vec<usize>,
    include_own: bool,
}

impl LazyCore {
    pub(crate) fn new(n: u64, include_own: bool) -> Result<Self, GraphError> {
        let graph = PartialPermGraph::new(n)?;
        Ok(Self {
            graph,
            heads: (0..n).collect(),
            head_pos: (0..n as usize).collect(),
            include_own,
        })
    }

    pub(crate) fn n(&self) -> u64 {
        self.graph.n()
    }

    pub(crate) fn bad(&self) -> bool {
        self.graph.bad()
    }

    #[cfg(test)]
    pub(crate) fn graph(&self) -> &PartialPermGraph {
        &self.graph
    }

    /// The recorded answer, if this query's edge is already present.
    pub(crate) fn replay(&self, q: BasicQuery) -> Option<u64> {
        match q.dir {
            Direction::Forward => self.graph.successor(q.x),
            Direction::Backward => self.graph.predecessor(q.x),
        }
    }

    /// Number of equally likely answers to a fresh query.
    pub(crate) fn choice_count(&self, q: BasicQuery) -> u64 {
        debug_assert!(self.replay(q).is_none());
        let open = self.heads.len() as u64;
        if self.include_own {
            open
        } else if open > 1 {
            open - 1
        } else {
            // Only the component of x is left: the closing answer is forced.
            1
        }
    }

    /// Applies choice `idx` (in `0..choice_count(q)`) and returns the answer.
    pub(crate) fn respond_with_choice(&mut self, q: BasicQuery, idx: u64) -> u64 {
        let own_head = self.graph.component_info(q.x).min;
        let chosen_head = if self.include_own {
            self.heads[idx as usize]
        } else if self.heads.len() == 1 {
            own_head
        } else {
            // Skip the position of x's own component.
            let own_pos = self.head_pos[own_head as usize];
            let dense = if (idx as usize) < own_pos {
                idx as usize
            } else {
                idx as usize + 1
            };
            self.heads[dense]
        };
        let (from, to, answer) = match q.dir {
            // x has no outgoing edge, so it is the tail of its chain; the
            // chosen component contributes its head.
            Direction::Forward => (q.x, chosen_head, chosen_head),
            // x has no incoming edge, so it is the head of its chain; the
            // chosen component contributes its tail.
            Direction::Backward => {
                let tail = self.graph.component_info(chosen_head).max;
                (tail, q.x, tail)
            }
        };
        self.graph
            .add_edge(from, to)
            .expect("choice construction keeps the edge legal");
        // The edge target gained an incoming edge and stops being a head;
        // on a merge the surviving chain keeps its old head, and on a
        // closure the component stops being open altogether.
        self.remove_head(to);
        answer
    }

    pub(crate) fn query(&mut self, q: BasicQuery, rng: &mut impl Rng) -> u64 {
        if let Some(y) = self.replay(q) {
            return y;
        }
        let idx = rng.random_range(0..self.choice_count(q));
        self.respond_with_choice(q, idx)
    }

    fn remove_head(&mut self, head: u64) {
        let pos = self.head_pos[head as usize];
        debug_assert_ne!(pos, NO_POS);
        let last = self.heads.len() - 1;
        self.heads.swap(pos, last);
        let moved = self.heads[pos];
        self.heads.pop();
        self.head_pos[moved as usize] = pos;
        self.head_pos[head as usize] = NO_POS;
    }
}
