//! Explicit permutations of `{0, …, n-1}`, cycle decomposition, conjugation,
//! and the divisor-counting helpers used by the fast-forward distinguishers.
//!
//! Everything here materializes the full image array, so domain sizes are
//! capped at [`MAX_MATERIALIZED_N`]; the lazy oracles cover larger domains.

use std::fmt;

use rand::Rng;
use thiserror::Error;

/// Largest domain for which a permutation may be materialized explicitly.
pub const MAX_MATERIALIZED_N: u64 = 1 << 24;

/// Largest domain accepted by the exhaustive enumeration helpers.
pub const MAX_ENUMERATED_N: u64 = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("domain size must be at least 1")]
    ZeroDomain,
    #[error("domain size {n} exceeds the materialization cap {max}")]
    DomainTooLarge { n: u64, max: u64 },
    #[error("image value {value} is outside the domain of size {n}")]
    ImageValueOutOfRange { value: u64, n: u64 },
    #[error("image value {value} appears more than once")]
    DuplicateImageValue { value: u64 },
    #[error("domain sizes differ: {left} vs {right}")]
    SizeMismatch { left: u64, right: u64 },
    #[error("enumeration over S_{n} is not supported (cap {max})")]
    EnumerationTooLarge { n: u64, max: u64 },
}

/// An element of `S_n`, stored as its image array: `image[x] = P(x)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<u64>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({:?})", self.image)
    }
}

fn check_domain(n: u64) -> Result<usize, PermError> {
    if n == 0 {
        return Err(PermError::ZeroDomain);
    }
    if n > MAX_MATERIALIZED_N {
        return Err(PermError::DomainTooLarge {
            n,
            max: MAX_MATERIALIZED_N,
        });
    }
    Ok(n as usize)
}

impl Permutation {
    /// Validates that `image` is a bijection on `{0, …, image.len()-1}`.
    pub fn new(image: Vec<u64>) -> Result<Self, PermError> {
        let n = image.len() as u64;
        check_domain(n)?;
        let mut seen = vec![false; image.len()];
        for &v in &image {
            if v >= n {
                return Err(PermError::ImageValueOutOfRange { value: v, n });
            }
            if seen[v as usize] {
                return Err(PermError::DuplicateImageValue { value: v });
            }
            seen[v as usize] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(n: u64) -> Result<Self, PermError> {
        let len = check_domain(n)?;
        Ok(Self {
            image: (0..len as u64).collect(),
        })
    }

    /// The successor cyclus `x ↦ x+1 mod n`.
    pub fn successor(n: u64) -> Result<Self, PermError> {
        let len = check_domain(n)?;
        Ok(Self {
            image: (0..len as u64).map(|x| (x + 1) % n).collect(),
        })
    }

    /// Uniformly random permutation (Fisher-Yates shuffle).
    pub fn random(n: u64, rng: &mut impl Rng) -> Result<Self, PermError> {
        let len = check_domain(n)?;
        let mut image: Vec<u64> = (0..len as u64).collect();
        for i in (1..len).rev() {
            let j = rng.random_range(0..=i);
            image.swap(i, j);
        }
        Ok(Self { image })
    }

    /// Uniformly random cyclus (Sattolo shuffle: the swap target is always
    /// strictly below the pivot, which forces a single cycle).
    pub fn random_cyclus(n: u64, rng: &mut impl Rng) -> Result<Self, PermError> {
        let len = check_domain(n)?;
        let mut image: Vec<u64> = (0..len as u64).collect();
        for i in (1..len).rev() {
            let j = rng.random_range(0..i);
            image.swap(i, j);
        }
        Ok(Self { image })
    }

    pub fn n(&self) -> u64 {
        self.image.len() as u64
    }

    pub fn image(&self) -> &[u64] {
        &self.image
    }

    /// `P(x)`. Panics if `x` is outside the domain.
    pub fn apply(&self, x: u64) -> u64 {
        self.image[x as usize]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u64; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            inv[y as usize] = x as u64;
        }
        Permutation { image: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.n() != other.n() {
            return Err(PermError::SizeMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        let image = other.image.iter().map(|&y| self.apply(y)).collect();
        Ok(Permutation { image })
    }

    /// Length of the cycle containing `x`.
    pub fn cycle_len(&self, x: u64) -> u64 {
        let mut len = 1u64;
        let mut cur = self.apply(x);
        while cur != x {
            cur = self.apply(cur);
            len += 1;
        }
        len
    }

    /// `P^m(x)` by walking the cycle of `x` once to find its length and then
    /// stepping `m mod len` times. Cost is O(cycle length), independent of `m`.
    pub fn pow_at(&self, x: u64, m: i64) -> u64 {
        match m {
            0 => return x,
            1 => return self.apply(x),
            _ => {}
        }
        let len = self.cycle_len(x);
        let steps = (m as i128).rem_euclid(len as i128) as u64;
        let mut cur = x;
        for _ in 0..steps {
            cur = self.apply(cur);
        }
        cur
    }

    /// True when the whole domain forms a single cycle.
    pub fn is_cyclus(&self) -> bool {
        self.cycle_len(0) == self.n()
    }

    pub fn cycle_count(&self) -> u64 {
        self.ocs().len() as u64
    }

    /// Cycles ordered by their minimum element, each listed starting at its
    /// minimum.
    pub fn cycle_decomposition(&self) -> CycleDecomposition {
        let n = self.image.len();
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut cycle = vec![start as u64];
            visited[start] = true;
            let mut cur = self.apply(start as u64);
            while cur as usize != start {
                visited[cur as usize] = true;
                cycle.push(cur);
                cur = self.apply(cur);
            }
            cycles.push(cycle);
        }
        CycleDecomposition { cycles }
    }

    /// Ordered cycle structure: cycle lengths, ordered by each cycle's
    /// minimum element. Entries sum to `n`.
    pub fn ocs(&self) -> Vec<u64> {
        let n = self.image.len();
        let mut visited = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            visited[start] = true;
            let mut len = 1u64;
            let mut cur = self.apply(start as u64);
            while cur as usize != start {
                visited[cur as usize] = true;
                len += 1;
                cur = self.apply(cur);
            }
            lengths.push(len);
        }
        lengths
    }

    /// Multiplicative order: lcm of the cycle lengths, or `None` on overflow.
    pub fn order(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for len in self.ocs() {
            let len = len as u128;
            let g = gcd_u128(acc, len);
            acc = acc.checked_mul(len / g)?;
        }
        Some(acc)
    }

    fn from_image_unchecked(image: Vec<u64>) -> Self {
        Self { image }
    }
}

/// Cycles of a permutation, ordered by minimum element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    cycles: Vec<Vec<u64>>,
}

impl CycleDecomposition {
    pub fn cycles(&self) -> &[Vec<u64>] {
        &self.cycles
    }

    pub fn lengths(&self) -> Vec<u64> {
        self.cycles.iter().map(|c| c.len() as u64).collect()
    }

    /// Rebuilds the permutation from an explicit cycle list.
    pub fn to_permutation(n: u64, cycles: &[Vec<u64>]) -> Result<Permutation, PermError> {
        let len = check_domain(n)?;
        let mut image: Vec<u64> = (0..len as u64).collect();
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= n {
                    return Err(PermError::ImageValueOutOfRange { value: x, n });
                }
                image[x as usize] = cycle[(i + 1) % cycle.len()];
            }
        }
        Permutation::new(image)
    }
}

/// `Q = p ∘ sigma ∘ p⁻¹`. Relabels `sigma` along `p`, so `Q` has the same
/// cycle-length multiset as `sigma`.
pub fn conjugate(p: &Permutation, sigma: &Permutation) -> Result<Permutation, PermError> {
    if p.n() != sigma.n() {
        return Err(PermError::SizeMismatch {
            left: p.n(),
            right: sigma.n(),
        });
    }
    let mut image = vec![0u64; p.image.len()];
    for x in 0..p.n() {
        image[p.apply(x) as usize] = p.apply(sigma.apply(x));
    }
    Ok(Permutation { image })
}

/// `(x + m) mod n` with a Euclidean (always non-negative) reduction, so the
/// successor cyclus can be stepped by any signed exponent.
pub fn successor_power(n: u64, x: u64, m: i64) -> u64 {
    assert!(n >= 1, "domain size must be at least 1");
    assert!(x < n, "element {x} outside domain of size {n}");
    ((x as i128 + m as i128).rem_euclid(n as i128)) as u64
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing prime order. `prime_factors(1)` is empty.
pub fn prime_factors(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorization needs n >= 1");
    let mut n = n;
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        if n.is_multiple_of(p) {
            let mut e = 0u32;
            while n.is_multiple_of(p) {
                *n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// d(n): number of divisors, via the factorization.
pub fn divisor_count(n: u64) -> u64 {
    prime_factors(n)
        .iter()
        .map(|&(_, e)| (e as u64) + 1)
        .product()
}

/// ν(n): number of distinct prime divisors.
pub fn distinct_prime_count(n: u64) -> u32 {
    prime_factors(n).len() as u32
}

/// Heap's algorithm over a scratch slice; calls `visit` once per arrangement.
fn heap_visit(items: &mut [u64], visit: &mut impl FnMut(&[u64])) {
    let k = items.len();
    let mut c = vec![0usize; k];
    visit(items);
    let mut i = 1;
    while i < k {
        if c[i] < i {
            if i.is_multiple_of(2) {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(items);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn check_enumerable(n: u64) -> Result<(), PermError> {
    if n == 0 {
        return Err(PermError::ZeroDomain);
    }
    if n > MAX_ENUMERATED_N {
        return Err(PermError::EnumerationTooLarge {
            n,
            max: MAX_ENUMERATED_N,
        });
    }
    Ok(())
}

/// Visits every element of `S_n` exactly once. Intended as a ground-truth
/// enumeration oracle for small `n`.
pub fn for_each_permutation(n: u64, mut f: impl FnMut(&Permutation)) -> Result<(), PermError> {
    check_enumerable(n)?;
    let mut items: Vec<u64> = (0..n).collect();
    let mut scratch = Permutation::identity(n)?;
    heap_visit(&mut items, &mut |order| {
        scratch.image.copy_from_slice(order);
        f(&scratch);
    });
    let _ = scratch;
    Ok(())
}

/// Visits every cyclus of `S_n` exactly once: each of the `(n-1)!`
/// arrangements of `{1, …, n-1}` after the fixed starting point `0`.
pub fn for_each_cyclus(n: u64, mut f: impl FnMut(&Permutation)) -> Result<(), PermError> {
    check_enumerable(n)?;
    if n == 1 {
        f(&Permutation::identity(1)?);
        return Ok(());
    }
    let mut rest: Vec<u64> = (1..n).collect();
    let mut scratch = Permutation::identity(n)?;
    heap_visit(&mut rest, &mut |order| {
        let mut prev = 0u64;
        for &v in order {
            scratch.image[prev as usize] = v;
            prev = v;
        }
        scratch.image[prev as usize] = 0;
        f(&scratch);
    });
    Ok(())
}

/// Builds a permutation directly from a materialized image without
/// revalidating; callers must guarantee bijectivity.
pub(crate) fn from_trusted_image(image: Vec<u64>) -> Permutation {
    debug_assert!(Permutation::new(image.clone()).is_ok());
    Permutation::from_image_unchecked(image)
}
