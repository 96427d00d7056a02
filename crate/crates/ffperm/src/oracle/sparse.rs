//! Hash-backed lazy sampling for domains too large to materialize.
//!
//! State is kept only for elements that queries have touched. `SparseChains`
//! grows two-way chains under the same component-choice law as the dense
//! lazy core, with untouched elements standing in for singleton components.
//! `SparseCycles` reveals whole cycles at a time, which is the granularity a
//! power query needs; the memory cost is the length of each revealed cycle,
//! so a power query deep into a huge random permutation is inherently
//! expensive to answer exactly.

use std::collections::{HashMap, HashSet};

use rand::Rng;

use crate::oracle::{BasicQuery, Direction, OracleRng};

#[derive(Debug)]
pub(crate) struct SparseChains {
    n: u64,
    succ: HashMap<u64, u64>,
    pred: HashMap<u64, u64>,
    /// Heads of open chains that already carry at least one edge; untouched
    /// elements are implicit singleton components.
    open_heads: Vec<u64>,
    head_pos: HashMap<u64, usize>,
    touched: HashSet<u64>,
    rng: OracleRng,
}

impl SparseChains {
    pub(crate) fn new(n: u64, rng: OracleRng) -> Self {
        Self {
            n,
            succ: HashMap::new(),
            pred: HashMap::new(),
            open_heads: Vec::new(),
            head_pos: HashMap::new(),
            touched: HashSet::new(),
            rng,
        }
    }

    fn head_of(&self, x: u64) -> u64 {
        let mut cur = x;
        while let Some(&p) = self.pred.get(&cur) {
            cur = p;
        }
        cur
    }

    fn tail_of(&self, x: u64) -> u64 {
        let mut cur = x;
        while let Some(&s) = self.succ.get(&cur) {
            cur = s;
        }
        cur
    }

    fn sample_untouched(&mut self) -> u64 {
        loop {
            let e = self.rng.random_range(0..self.n);
            if !self.touched.contains(&e) {
                return e;
            }
        }
    }

    fn remove_open_head(&mut self, head: u64) {
        if let Some(pos) = self.head_pos.remove(&head) {
            self.open_heads.swap_remove(pos);
            if pos < self.open_heads.len() {
                let moved = self.open_heads[pos];
                self.head_pos.insert(moved, pos);
            }
        }
    }

    fn register_open_head(&mut self, head: u64) {
        if !self.head_pos.contains_key(&head) {
            self.head_pos.insert(head, self.open_heads.len());
            self.open_heads.push(head);
        }
    }

    pub(crate) fn query(&mut self, q: BasicQuery) -> u64 {
        let replay = match q.dir {
            Direction::Forward => self.succ.get(&q.x),
            Direction::Backward => self.pred.get(&q.x),
        };
        if let Some(&y) = replay {
            return y;
        }

        let untouched = self.n - self.touched.len() as u64;
        let total = self.open_heads.len() as u64 + untouched;
        let idx = self.rng.random_range(0..total);
        let chosen_head = if (idx as usize) < self.open_heads.len() {
            self.open_heads[idx as usize]
        } else {
            self.sample_untouched()
        };
        let own_head = if self.touched.contains(&q.x) {
            self.head_of(q.x)
        } else {
            q.x
        };
        let closing = chosen_head == own_head;

        let (from, to, answer) = match q.dir {
            Direction::Forward => (q.x, chosen_head, chosen_head),
            Direction::Backward => {
                let tail = self.tail_of(chosen_head);
                (tail, q.x, tail)
            }
        };
        self.succ.insert(from, to);
        self.pred.insert(to, from);
        self.touched.insert(from);
        self.touched.insert(to);

        if closing {
            self.remove_open_head(own_head);
        } else {
            // The target gained an incoming edge; the merged chain keeps the
            // head of the upstream side.
            self.remove_open_head(to);
            let merged_head = match q.dir {
                Direction::Forward => own_head,
                Direction::Backward => chosen_head,
            };
            self.register_open_head(merged_head);
        }
        answer
    }
}

#[derive(Debug)]
pub(crate) struct SparseCycles {
    n: u64,
    membership: HashMap<u64, (usize, u64)>,
    cycles: Vec<Vec<u64>>,
    rng: OracleRng,
}

impl SparseCycles {
    pub(crate) fn new(n: u64, rng: OracleRng) -> Self {
        Self {
            n,
            membership: HashMap::new(),
            cycles: Vec::new(),
            rng,
        }
    }

    /// Reveals the cycle through `x` if needed, then indexes into it.
    pub(crate) fn query_pow(&mut self, x: u64, m: i64) -> u64 {
        if !self.membership.contains_key(&x) {
            self.reveal_cycle(x);
        }
        let &(cid, pos) = self.membership.get(&x).expect("cycle was just revealed");
        let cycle = &self.cycles[cid];
        let len = cycle.len() as u64;
        let target = ((pos as i128 + m as i128).rem_euclid(len as i128)) as usize;
        cycle[target]
    }

    fn reveal_cycle(&mut self, x: u64) {
        // Conditioned on the cycles revealed so far, the hidden permutation
        // restricted to the untouched elements is uniform; walking from x,
        // each step either closes the cycle or continues to a uniformly
        // chosen fresh element, which makes the cycle length uniform on
        // {1, …, remaining}.
        let remaining = self.n - self.membership.len() as u64;
        let mut chain = vec![x];
        let mut chain_set: HashSet<u64> = [x].into_iter().collect();
        loop {
            let options = remaining - chain.len() as u64 + 1;
            if self.rng.random_range(0..options) == 0 {
                break;
            }
            let fresh = loop {
                let e = self.rng.random_range(0..self.n);
                if !self.membership.contains_key(&e) && !chain_set.contains(&e) {
                    break e;
                }
            };
            chain_set.insert(fresh);
            chain.push(fresh);
        }
        let cid = self.cycles.len();
        for (pos, &e) in chain.iter().enumerate() {
            self.membership.insert(e, (cid, pos as u64));
        }
        self.cycles.push(chain);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> OracleRng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    #[test]
    fn chains_replay_consistently() {
        let mut chains = SparseChains::new(1 << 40, rng(1));
        let q0 = BasicQuery {
            x: 12345,
            dir: Direction::Forward,
        };
        let y = chains.query(q0);
        assert_eq!(chains.query(q0), y);
        assert_eq!(
            chains.query(BasicQuery {
                x: y,
                dir: Direction::Backward
            }),
            12345
        );
    }

    #[test]
    fn chains_build_valid_permutation_on_small_domain() {
        for seed in 0..50 {
            let mut chains = SparseChains::new(12, rng(seed));
            let mut image = vec![u64::MAX; 12];
            for x in 0..12 {
                image[x as usize] = chains.query(BasicQuery {
                    x,
                    dir: Direction::Forward,
                });
            }
            let mut seen = [false; 12];
            for &y in &image {
                assert!(!seen[y as usize]);
                seen[y as usize] = true;
            }
            // Backward queries agree with the forward image.
            for x in 0..12u64 {
                let y = image[x as usize];
                assert_eq!(
                    chains.query(BasicQuery {
                        x: y,
                        dir: Direction::Backward
                    }),
                    x
                );
            }
        }
    }

    #[test]
    fn chains_first_answer_uniform_on_small_domain() {
        let n = 8u64;
        let trials = 80_000u64;
        let mut counts = vec![0u64; n as usize];
        for seed in 0..trials {
            let mut chains = SparseChains::new(n, rng(seed));
            let y = chains.query(BasicQuery {
                x: 0,
                dir: Direction::Forward,
            });
            counts[y as usize] += 1;
        }
        let expected = trials as f64 / n as f64;
        let sigma = (trials as f64 * (1.0 / n as f64) * (1.0 - 1.0 / n as f64)).sqrt();
        for &c in &counts {
            assert!(
                (c as f64 - expected).abs() < 4.0 * sigma,
                "counts {counts:?}"
            );
        }
    }

    #[test]
    fn cycles_power_arithmetic() {
        // Kept modest: revealing the cycle of x costs memory proportional to
        // its length, which is uniform in {1, …, n}.
        let mut cycles = SparseCycles::new(100_000, rng(7));
        let x = 99u64;
        let y = cycles.query_pow(x, 12_345);
        assert_eq!(cycles.query_pow(y, -12_345), x);
        assert_eq!(cycles.query_pow(x, 0), x);
    }

    #[test]
    fn cycle_length_of_point_uniform_small_domain() {
        let n = 6u64;
        let trials = 60_000u64;
        let mut counts = vec![0u64; n as usize + 1];
        for seed in 0..trials {
            let mut cycles = SparseCycles::new(n, rng(seed));
            cycles.query_pow(0, 1);
            counts[cycles.cycles[0].len()] += 1;
        }
        let expected = trials as f64 / n as f64;
        let sigma = (trials as f64 * (1.0 / n as f64) * (1.0 - 1.0 / n as f64)).sqrt();
        for len in 1..=n as usize {
            assert!(
                (counts[len] as f64 - expected).abs() < 4.0 * sigma,
                "counts {counts:?}"
            );
        }
    }
}
