//! Keyed small-domain permutations and counter-mode number derivation.
//!
//! `KeyedPerm` is an 8-round Feistel network over `⌈log₂ n⌉` bits with a
//! SHA-256 round function, restricted to `{0, …, n-1}` by cycle walking. It
//! stands in for a key-addressed permutation oracle; no cryptographic
//! strength is claimed for this instantiation.
//!
//! The derivation oracles turn a stream of values in `[0, n)` into values in
//! a smaller range `[0, x)`: each output combines a pair `(a, b)` as
//! `(a + n·b) mod x`, which is close to uniform because the pair encodes a
//! single draw from `[0, n²)` and only the final partial block of size
//! `n² mod x` is biased.

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ccl::StepSource;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrngError {
    #[error("domain size must be at least 1")]
    ZeroDomain,
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("modulus {x} exceeds the domain size {n}")]
    ModulusExceedsDomain { x: u64, n: u64 },
    #[error("{need} counter values requested but the domain has only {n}")]
    WindowExceedsDomain { need: u64, n: u64 },
    #[error("pair combination needs an even number of base values, got {len}")]
    OddBaseLength { len: usize },
}

/// A key-determined permutation of `{0, …, n-1}`.
///
/// Forward and inverse walks apply the Feistel block cipher until the value
/// lands inside the domain; since the cipher's domain is less than `2n`, the
/// expected walk length is below 2.
#[derive(Clone, Debug)]
pub struct KeyedPerm {
    key: Vec<u8>,
    n: u64,
    rounds: u32,
    left_bits: u32,
    right_bits: u32,
}

impl KeyedPerm {
    pub fn new(key: &[u8], n: u64) -> Result<Self, PrngError> {
        Self::with_rounds(key, n, 8)
    }

    pub fn with_rounds(key: &[u8], n: u64, rounds: u32) -> Result<Self, PrngError> {
        if n == 0 {
            return Err(PrngError::ZeroDomain);
        }
        // width = ⌈log₂ n⌉, so the cipher domain 2^width is < 2n.
        let width = if n <= 1 {
            0
        } else {
            64 - (n - 1).leading_zeros()
        };
        let right_bits = width / 2;
        let left_bits = width - right_bits;
        Ok(Self {
            key: key.to_vec(),
            n,
            rounds,
            left_bits,
            right_bits,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    fn round_value(&self, round: u32, half: u64) -> u64 {
        let mut hasher = Sha256::new();
        hasher.update(&self.key);
        hasher.update(round.to_le_bytes());
        hasher.update(half.to_le_bytes());
        let digest = hasher.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
    }

    fn mask(bits: u32) -> u64 {
        if bits == 0 {
            0
        } else {
            u64::MAX >> (64 - bits)
        }
    }

    /// One pass of the cipher over the power-of-two domain. Rounds alternate
    /// which half is XOR-masked, so odd widths need no half swapping and each
    /// round is its own inverse.
    fn encrypt(&self, v: u64) -> u64 {
        let lmask = Self::mask(self.left_bits);
        let rmask = Self::mask(self.right_bits);
        let mut low = v & rmask;
        let mut high = v >> self.right_bits;
        for round in 0..self.rounds {
            if round % 2 == 0 {
                high ^= self.round_value(round, low) & lmask;
            } else {
                low ^= self.round_value(round, high) & rmask;
            }
        }
        (high << self.right_bits) | low
    }

    fn decrypt(&self, v: u64) -> u64 {
        let lmask = Self::mask(self.left_bits);
        let rmask = Self::mask(self.right_bits);
        let mut low = v & rmask;
        let mut high = v >> self.right_bits;
        for round in (0..self.rounds).rev() {
            if round % 2 == 0 {
                high ^= self.round_value(round, low) & lmask;
            } else {
                low ^= self.round_value(round, high) & rmask;
            }
        }
        (high << self.right_bits) | low
    }

    pub fn forward(&self, x: u64) -> u64 {
        self.forward_walk(x).0
    }

    pub fn inverse(&self, y: u64) -> u64 {
        self.inverse_walk(y).0
    }

    /// Forward evaluation plus the number of cipher applications the cycle
    /// walk needed.
    pub fn forward_walk(&self, x: u64) -> (u64, u32) {
        assert!(x < self.n, "element {x} outside domain of size {}", self.n);
        let mut v = self.encrypt(x);
        let mut steps = 1;
        while v >= self.n {
            v = self.encrypt(v);
            steps += 1;
        }
        (v, steps)
    }

    pub fn inverse_walk(&self, y: u64) -> (u64, u32) {
        assert!(y < self.n, "element {y} outside domain of size {}", self.n);
        let mut v = self.decrypt(y);
        let mut steps = 1;
        while v >= self.n {
            v = self.decrypt(v);
            steps += 1;
        }
        (v, steps)
    }
}

/// Derives an independent key by appending a domain-separation tag.
pub fn subkey(master: &[u8], tag: u8) -> Vec<u8> {
    let mut key = master.to_vec();
    key.push(tag);
    key
}

/// A derived number stream: `values.len()` entries, all below `modulus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedStream {
    pub modulus: u64,
    pub values: Vec<u64>,
}

impl DerivedStream {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_modulus(x: u64, n: u64) -> Result<(), PrngError> {
    if x == 0 {
        return Err(PrngError::ZeroModulus);
    }
    if x > n {
        return Err(PrngError::ModulusExceedsDomain { x, n });
    }
    Ok(())
}

/// `k` independent uniform values in `[0, x)` straight from the rng.
pub fn rnd(x: u64, k: usize, rng: &mut impl rand::Rng) -> Result<DerivedStream, PrngError> {
    if x == 0 {
        return Err(PrngError::ZeroModulus);
    }
    Ok(DerivedStream {
        modulus: x,
        values: (0..k).map(|_| rng.random_range(0..x)).collect(),
    })
}

/// Combines consecutive base-value pairs `(a, b)` from `[0, n)` into
/// `(a + n·b) mod x`, in 128-bit arithmetic.
pub fn pair_combine(n: u64, x: u64, base: &[u64]) -> Result<Vec<u64>, PrngError> {
    check_modulus(x, n)?;
    if !base.len().is_multiple_of(2) {
        return Err(PrngError::OddBaseLength { len: base.len() });
    }
    Ok(base
        .chunks_exact(2)
        .map(|pair| {
            let c = pair[0] as u128 + n as u128 * pair[1] as u128;
            (c % x as u128) as u64
        })
        .collect())
}

/// `k` values in `[0, x)` derived by pair combination from `2k` uniform base
/// values in `[0, n)`.
pub fn rnd1(
    n: u64,
    x: u64,
    k: usize,
    rng: &mut impl rand::Rng,
) -> Result<DerivedStream, PrngError> {
    check_modulus(x, n)?;
    let base = rnd(n, 2 * k, rng)?;
    Ok(DerivedStream {
        modulus: x,
        values: pair_combine(n, x, &base.values)?,
    })
}

/// Counter-mode variant of [`rnd1`]: the `2k` base values are the keyed
/// permutation evaluated on counters `p0, p0+1, …` (mod `n`). Deterministic
/// given `(key, p0, x, k)`. Callers must keep counter windows from separate
/// derivations disjoint; this function does not track prior windows.
pub fn rnd2(prp: &KeyedPerm, x: u64, k: usize, p0: u64) -> Result<DerivedStream, PrngError> {
    let n = prp.n();
    check_modulus(x, n)?;
    let need = 2 * k as u64;
    if need > n {
        return Err(PrngError::WindowExceedsDomain { need, n });
    }
    let base: Vec<u64> = (0..need).map(|j| prp.forward((p0 + j) % n)).collect();
    Ok(DerivedStream {
        modulus: x,
        values: pair_combine(n, x, &base)?,
    })
}

/// Single-call variant: `k` counter evaluations reduced directly mod `x`.
/// Cheaper but more biased than [`rnd2`]; offered for experimentation only.
pub fn rnd3(prp: &KeyedPerm, x: u64, k: usize, p0: u64) -> Result<DerivedStream, PrngError> {
    let n = prp.n();
    check_modulus(x, n)?;
    let need = k as u64;
    if need > n {
        return Err(PrngError::WindowExceedsDomain { need, n });
    }
    Ok(DerivedStream {
        modulus: x,
        values: (0..need).map(|j| prp.forward((p0 + j) % n) % x).collect(),
    })
}

/// Draws sampler steps from counter-mode pair combination: one pair of keyed
/// evaluations per step, reduced modulo the requested bound.
pub struct CounterPairSource<'a> {
    prp: &'a KeyedPerm,
    counter: u64,
}

impl<'a> CounterPairSource<'a> {
    pub fn new(prp: &'a KeyedPerm, p0: u64) -> Self {
        Self { prp, counter: p0 }
    }

    /// Counter values consumed so far start at `p0` and end here (exclusive).
    pub fn counter(&self) -> u64 {
        self.counter
    }
}

impl StepSource for CounterPairSource<'_> {
    fn sample_below(&mut self, bound: u64) -> u64 {
        let n = self.prp.n();
        let a = self.prp.forward(self.counter % n);
        let b = self.prp.forward((self.counter + 1) % n);
        self.counter += 2;
        ((a as u128 + n as u128 * b as u128) % bound as u128) as u64
    }
}

/// Single-call analogue of [`CounterPairSource`].
pub struct CounterSingleSource<'a> {
    prp: &'a KeyedPerm,
    counter: u64,
}

impl<'a> CounterSingleSource<'a> {
    pub fn new(prp: &'a KeyedPerm, p0: u64) -> Self {
        Self { prp, counter: p0 }
    }
}

impl StepSource for CounterSingleSource<'_> {
    fn sample_below(&mut self, bound: u64) -> u64 {
        let n = self.prp.n();
        let a = self.prp.forward(self.counter % n);
        self.counter += 1;
        a % bound
    }
}
