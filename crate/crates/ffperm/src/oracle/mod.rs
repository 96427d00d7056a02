//! Stateful query oracles over hidden permutations, behind one handle type.
//!
//! Basic oracles answer queries `(x, ±1)` with `P^{±1}(x)`; power oracles
//! answer `(x, m)` with `P^m(x)` for any signed exponent. Each handle fixes
//! one hidden permutation (explicitly, lazily, or through a keyed
//! construction) for its lifetime and replays recorded answers, so a
//! transcript is always consistent with a single permutation.
//!
//! | id       | hidden object                                            |
//! |----------|----------------------------------------------------------|
//! | `c`      | uniformly random cyclus, materialized                    |
//! | `o2`     | lazily sampled cyclus                                    |
//! | `o3`     | lazily sampled permutation, with a bad flag on cycles    |
//! | `p`      | uniformly random permutation (basic queries only)        |
//! | `pff`    | uniformly random permutation with power queries          |
//! | `f`      | sampled cycle code conjugated by a random permutation    |
//! | `fprime` | keyed variant of `f`: counter-derived code, keyed conjugator |

pub(crate) mod lazy;
pub(crate) mod sparse;

use rand_chacha::ChaCha12Rng;
use serde_json::json;
use thiserror::Error;

use crate::ccl::{truncated_ccl, truncated_ccl_with, CclError, CycleLengths};
use crate::ff::{FFPerm, FfError};
use crate::graph::GraphError;
use crate::perm::{PermError, Permutation};
use crate::prng::{subkey, CounterPairSource, CounterSingleSource, KeyedPerm, PrngError};

use lazy::LazyCore;
use sparse::{SparseChains, SparseCycles};

/// The rng type every oracle consumes; trial runners hand each handle an
/// independent stream of one seeded generator.
pub type OracleRng = ChaCha12Rng;

pub fn seeded_rng(seed: u64) -> OracleRng {
    use rand::SeedableRng;
    OracleRng::seed_from_u64(seed)
}

/// Draws a fresh 16-byte key from an rng stream.
pub fn random_key(rng: &mut OracleRng) -> [u8; 16] {
    use rand::RngCore;
    let mut key = [0u8; 16];
    rng.fill_bytes(&mut key);
    key
}

/// Domains up to this size are materialized outright; larger ones fall back
/// to hash-backed lazy sampling.
pub const DEFAULT_MATERIALIZE_MAX: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("domain size must be at least 1")]
    ZeroDomain,
    #[error("query point {x} is outside the domain of size {n}")]
    QueryOutOfRange { x: u64, n: u64 },
    #[error("oracle `{oracle}` does not answer this query type")]
    UnsupportedQuery { oracle: &'static str },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Ff(#[from] FfError),
    #[error(transparent)]
    Ccl(#[from] CclError),
    #[error(transparent)]
    Prng(#[from] PrngError),
}

/// Direction of a basic query: `+1` applies the permutation, `-1` its
/// inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn signum(self) -> i64 {
        match self {
            Direction::Forward => 1,
            Direction::Backward => -1,
        }
    }

    pub fn from_signum(i: i64) -> Option<Self> {
        match i {
            1 => Some(Direction::Forward),
            -1 => Some(Direction::Backward),
            _ => None,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasicQuery {
    pub x: u64,
    pub dir: Direction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FFQuery {
    pub x: u64,
    pub m: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Query {
    Basic(BasicQuery),
    Pow(FFQuery),
}

impl Query {
    pub fn basic(x: u64, dir: Direction) -> Self {
        Query::Basic(BasicQuery { x, dir })
    }

    pub fn pow(x: u64, m: i64) -> Self {
        Query::Pow(FFQuery { x, m })
    }

    pub fn x(&self) -> u64 {
        match self {
            Query::Basic(q) => q.x,
            Query::Pow(q) => q.x,
        }
    }

    /// Second slot of the serialized pair: the direction sign or exponent.
    pub fn arg(&self) -> i64 {
        match self {
            Query::Basic(q) => q.dir.signum(),
            Query::Pow(q) => q.m,
        }
    }
}

/// Ordered record of (query, response) pairs for one handle.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    entries: Vec<(Query, u64)>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Query, u64)] {
        &self.entries
    }

    fn push(&mut self, q: Query, r: u64) {
        self.entries.push((q, r));
    }

    /// One JSON object per line: `{"q":[x,i_or_m],"r":y}`.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for (q, r) in &self.entries {
            out.push_str(&json!({"q": [q.x(), q.arg()], "r": r}).to_string());
            out.push('\n');
        }
        out
    }
}

/// Truncation length used by the conjugated oracle when none is given:
/// `⌈4 ln n⌉`, long enough that force-closing the final block is vanishingly
/// rare.
pub fn default_truncation(n: u64) -> u64 {
    ((4.0 * (n as f64).ln()).ceil() as u64).max(1)
}

/// Short truncation for the single-call derivation preset: `⌈ln n⌉`.
pub fn single_call_truncation(n: u64) -> u64 {
    (((n as f64).ln()).ceil() as u64).max(1)
}

/// A uniformly random cyclus with O(1) power evaluation: the orbit of 0 and
/// each element's position along it.
#[derive(Debug)]
pub struct CyclusOracle {
    orbit: Vec<u64>,
    position: Vec<u64>,
}

impl CyclusOracle {
    fn new(n: u64, rng: &mut OracleRng) -> Result<Self, OracleError> {
        let perm = Permutation::random_cyclus(n, rng)?;
        let mut orbit = Vec::with_capacity(n as usize);
        let mut position = vec![0u64; n as usize];
        let mut cur = 0u64;
        for i in 0..n {
            orbit.push(cur);
            position[cur as usize] = i;
            cur = perm.apply(cur);
        }
        Ok(Self { orbit, position })
    }

    fn answer_pow(&self, x: u64, m: i64) -> u64 {
        let n = self.orbit.len() as u64;
        let idx = (self.position[x as usize] as i128 + m as i128).rem_euclid(n as i128);
        self.orbit[idx as usize]
    }
}

#[derive(Debug)]
enum PermBackend {
    Materialized {
        forward: Permutation,
        inverse: Permutation,
    },
    Sparse(Box<SparseChains>),
}

/// A uniformly random permutation answering basic queries only.
#[derive(Debug)]
pub struct PermOracle {
    n: u64,
    backend: PermBackend,
}

impl PermOracle {
    fn new(n: u64, mut rng: OracleRng) -> Result<Self, OracleError> {
        if n == 0 {
            return Err(OracleError::ZeroDomain);
        }
        let backend = if n <= DEFAULT_MATERIALIZE_MAX {
            let forward = Permutation::random(n, &mut rng)?;
            PermBackend::Materialized {
                inverse: forward.inverse(),
                forward,
            }
        } else {
            PermBackend::Sparse(Box::new(SparseChains::new(n, rng)))
        };
        Ok(Self { n, backend })
    }

    fn answer_basic(&mut self, q: BasicQuery) -> u64 {
        match &mut self.backend {
            PermBackend::Materialized { forward, inverse } => match q.dir {
                Direction::Forward => forward.apply(q.x),
                Direction::Backward => inverse.apply(q.x),
            },
            PermBackend::Sparse(chains) => chains.query(q),
        }
    }
}

#[derive(Debug)]
enum PowBackend {
    Materialized(Permutation),
    Sparse(Box<SparseCycles>),
}

/// A uniformly random permutation answering power queries; basic queries are
/// handled as exponents ±1.
#[derive(Debug)]
pub struct PowPermOracle {
    n: u64,
    backend: PowBackend,
}

impl PowPermOracle {
    fn new(n: u64, mut rng: OracleRng) -> Result<Self, OracleError> {
        if n == 0 {
            return Err(OracleError::ZeroDomain);
        }
        let backend = if n <= DEFAULT_MATERIALIZE_MAX {
            PowBackend::Materialized(Permutation::random(n, &mut rng)?)
        } else {
            PowBackend::Sparse(Box::new(SparseCycles::new(n, rng)))
        };
        Ok(Self { n, backend })
    }

    fn answer_pow(&mut self, x: u64, m: i64) -> u64 {
        match &mut self.backend {
            PowBackend::Materialized(p) => p.pow_at(x, m),
            PowBackend::Sparse(cycles) => cycles.query_pow(x, m),
        }
    }
}

#[derive(Debug)]
enum Conjugator {
    Materialized {
        forward: Permutation,
        inverse: Permutation,
    },
    Sparse(Box<SparseChains>),
    Keyed(KeyedPerm),
}

impl Conjugator {
    fn forward(&mut self, z: u64) -> u64 {
        match self {
            Conjugator::Materialized { forward, .. } => forward.apply(z),
            Conjugator::Sparse(chains) => chains.query(BasicQuery {
                x: z,
                dir: Direction::Forward,
            }),
            Conjugator::Keyed(kp) => kp.forward(z),
        }
    }

    fn inverse(&mut self, x: u64) -> u64 {
        match self {
            Conjugator::Materialized { inverse, .. } => inverse.apply(x),
            Conjugator::Sparse(chains) => chains.query(BasicQuery {
                x,
                dir: Direction::Backward,
            }),
            Conjugator::Keyed(kp) => kp.inverse(x),
        }
    }
}

/// `P ∘ π^m ∘ P⁻¹` where `π` is a coded fast-forward permutation and `P` a
/// hidden conjugator: the fast-forward construction with an arbitrary cycle
/// structure. Each query costs one inverse and one forward conjugator call
/// around an O(log l) block lookup.
#[derive(Debug)]
pub struct ConjugatedOracle {
    n: u64,
    label: &'static str,
    ff: FFPerm,
    conj: Conjugator,
}

impl ConjugatedOracle {
    fn answer_pow(&mut self, x: u64, m: i64) -> u64 {
        let z = self.conj.inverse(x);
        let w = self.ff.eval_pow(z, m).expect("conjugator stays in domain");
        self.conj.forward(w)
    }
}

#[derive(Debug)]
enum OracleImpl {
    Cyclus(CyclusOracle),
    LazyCyclus(LazyCyclusOracle),
    LazyPerm(LazyPermOracle),
    RandomPerm(PermOracle),
    PowPerm(PowPermOracle),
    Conjugated(ConjugatedOracle),
}

/// Lazily sampled cyclus oracle.
#[derive(Debug)]
pub struct LazyCyclusOracle {
    core: LazyCore,
    rng: OracleRng,
}

/// Lazily sampled permutation oracle; sets a bad flag whenever a random
/// choice closes a cycle.
#[derive(Debug)]
pub struct LazyPermOracle {
    core: LazyCore,
    rng: OracleRng,
}

/// Uniform stateful query interface over every oracle kind, with a
/// transcript of all answered queries.
pub struct OracleHandle {
    inner: OracleImpl,
    transcript: Transcript,
}

impl std::fmt::Debug for OracleHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OracleHandle")
            .field("kind", &self.kind())
            .field("n", &self.n())
            .field("queries", &self.transcript.len())
            .finish()
    }
}

impl OracleHandle {
    fn wrap(inner: OracleImpl) -> Self {
        Self {
            inner,
            transcript: Transcript::default(),
        }
    }

    pub fn n(&self) -> u64 {
        match &self.inner {
            OracleImpl::Cyclus(o) => o.orbit.len() as u64,
            OracleImpl::LazyCyclus(o) => o.core.n(),
            OracleImpl::LazyPerm(o) => o.core.n(),
            OracleImpl::RandomPerm(o) => o.n,
            OracleImpl::PowPerm(o) => o.n,
            OracleImpl::Conjugated(o) => o.n,
        }
    }

    /// The string id of this oracle kind.
    pub fn kind(&self) -> &'static str {
        match &self.inner {
            OracleImpl::Cyclus(_) => "c",
            OracleImpl::LazyCyclus(_) => "o2",
            OracleImpl::LazyPerm(_) => "o3",
            OracleImpl::RandomPerm(_) => "p",
            OracleImpl::PowPerm(_) => "pff",
            OracleImpl::Conjugated(o) => o.label,
        }
    }

    pub fn query(&mut self, q: Query) -> Result<u64, OracleError> {
        let n = self.n();
        if q.x() >= n {
            return Err(OracleError::QueryOutOfRange { x: q.x(), n });
        }
        let answer = match (&mut self.inner, q) {
            (OracleImpl::Cyclus(o), Query::Basic(b)) => o.answer_pow(b.x, b.dir.signum()),
            (OracleImpl::Cyclus(o), Query::Pow(p)) => o.answer_pow(p.x, p.m),
            (OracleImpl::LazyCyclus(o), Query::Basic(b)) => o.core.query(b, &mut o.rng),
            (OracleImpl::LazyCyclus(_), Query::Pow(_)) => {
                return Err(OracleError::UnsupportedQuery { oracle: "o2" })
            }
            (OracleImpl::LazyPerm(o), Query::Basic(b)) => o.core.query(b, &mut o.rng),
            (OracleImpl::LazyPerm(_), Query::Pow(_)) => {
                return Err(OracleError::UnsupportedQuery { oracle: "o3" })
            }
            (OracleImpl::RandomPerm(o), Query::Basic(b)) => o.answer_basic(b),
            (OracleImpl::RandomPerm(_), Query::Pow(_)) => {
                return Err(OracleError::UnsupportedQuery { oracle: "p" })
            }
            (OracleImpl::PowPerm(o), Query::Basic(b)) => o.answer_pow(b.x, b.dir.signum()),
            (OracleImpl::PowPerm(o), Query::Pow(p)) => o.answer_pow(p.x, p.m),
            (OracleImpl::Conjugated(o), Query::Basic(b)) => o.answer_pow(b.x, b.dir.signum()),
            (OracleImpl::Conjugated(o), Query::Pow(p)) => o.answer_pow(p.x, p.m),
        };
        self.transcript.push(q, answer);
        Ok(answer)
    }

    pub fn query_basic(&mut self, x: u64, dir: Direction) -> Result<u64, OracleError> {
        self.query(Query::basic(x, dir))
    }

    pub fn query_pow(&mut self, x: u64, m: i64) -> Result<u64, OracleError> {
        self.query(Query::pow(x, m))
    }

    /// The bad flag of the lazy permutation oracle, if this is one.
    pub fn bad_flag(&self) -> Option<bool> {
        match &self.inner {
            OracleImpl::LazyPerm(o) => Some(o.core.bad()),
            _ => None,
        }
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn query_count(&self) -> usize {
        self.transcript.len()
    }

    /// The cycle-length code behind a conjugated oracle, if this is one.
    pub fn ff_code(&self) -> Option<CycleLengths> {
        match &self.inner {
            OracleImpl::Conjugated(o) => Some(o.ff.lengths()),
            _ => None,
        }
    }
}

/// True random cyclus: materialized, answers basic and power queries.
pub fn oracle_c(n: u64, mut rng: OracleRng) -> Result<OracleHandle, OracleError> {
    Ok(OracleHandle::wrap(OracleImpl::Cyclus(CyclusOracle::new(
        n, &mut rng,
    )?)))
}

/// Lazily sampled cyclus.
pub fn oracle_o2(n: u64, rng: OracleRng) -> Result<OracleHandle, OracleError> {
    Ok(OracleHandle::wrap(OracleImpl::LazyCyclus(
        LazyCyclusOracle {
            core: LazyCore::new(n, false)?,
            rng,
        },
    )))
}

/// Lazily sampled permutation with a bad flag.
pub fn oracle_o3(n: u64, rng: OracleRng) -> Result<OracleHandle, OracleError> {
    Ok(OracleHandle::wrap(OracleImpl::LazyPerm(LazyPermOracle {
        core: LazyCore::new(n, true)?,
        rng,
    })))
}

/// True random permutation, basic queries only.
pub fn oracle_p(n: u64, rng: OracleRng) -> Result<OracleHandle, OracleError> {
    Ok(OracleHandle::wrap(OracleImpl::RandomPerm(PermOracle::new(
        n, rng,
    )?)))
}

/// True random permutation with power queries.
pub fn oracle_pff(n: u64, rng: OracleRng) -> Result<OracleHandle, OracleError> {
    Ok(OracleHandle::wrap(OracleImpl::PowPerm(PowPermOracle::new(
        n, rng,
    )?)))
}

fn conjugated_from_code(
    code: CycleLengths,
    mut rng: OracleRng,
    label: &'static str,
) -> Result<OracleHandle, OracleError> {
    let n = code.n();
    let ff = FFPerm::from_code(&code);
    let conj = if n <= DEFAULT_MATERIALIZE_MAX {
        let forward = Permutation::random(n, &mut rng)?;
        Conjugator::Materialized {
            inverse: forward.inverse(),
            forward,
        }
    } else {
        Conjugator::Sparse(Box::new(SparseChains::new(n, rng)))
    };
    Ok(OracleHandle::wrap(OracleImpl::Conjugated(
        ConjugatedOracle { n, label, ff, conj },
    )))
}

/// Fast-forward construction: samples an `l`-truncated cycle code, then
/// conjugates the coded permutation by a hidden random permutation.
pub fn oracle_f(n: u64, l: u64, mut rng: OracleRng) -> Result<OracleHandle, OracleError> {
    let code = truncated_ccl(n, l, &mut rng)?;
    conjugated_from_code(code, rng, "f")
}

/// Same construction with a caller-fixed cycle code.
pub fn oracle_f_with_code(code: CycleLengths, rng: OracleRng) -> Result<OracleHandle, OracleError> {
    conjugated_from_code(code, rng, "f")
}

/// Options for the keyed construction.
#[derive(Clone, Copy, Debug, Default)]
pub struct KeyedCclOptions {
    /// Truncation length; defaults to `⌈4 ln n⌉` (or `⌈ln n⌉` for the
    /// single-call preset).
    pub truncation: Option<u64>,
    /// Derive each sampler step from one keyed evaluation instead of a
    /// combined pair. Experimental preset; more biased.
    pub single_call: bool,
}

/// Keyed, fully deterministic variant: the cycle code is derived from
/// counter-mode evaluations of one keyed permutation, and the conjugator is
/// a second keyed permutation. Both keys come from `master_key` by domain
/// separation.
pub fn oracle_fprime(
    n: u64,
    master_key: &[u8],
    p0: u64,
    opts: KeyedCclOptions,
) -> Result<OracleHandle, OracleError> {
    if n == 0 {
        return Err(OracleError::ZeroDomain);
    }
    let conj_perm = KeyedPerm::new(&subkey(master_key, 0x00), n)?;
    let ctr_perm = KeyedPerm::new(&subkey(master_key, 0x01), n)?;
    let code = if opts.single_call {
        let l = opts.truncation.unwrap_or_else(|| single_call_truncation(n));
        let mut src = CounterSingleSource::new(&ctr_perm, p0);
        truncated_ccl_with(n, l, &mut src)?
    } else {
        let l = opts.truncation.unwrap_or_else(|| default_truncation(n));
        let mut src = CounterPairSource::new(&ctr_perm, p0);
        truncated_ccl_with(n, l, &mut src)?
    };
    Ok(OracleHandle::wrap(OracleImpl::Conjugated(
        ConjugatedOracle {
            n,
            label: "fprime",
            ff: FFPerm::from_code(&code),
            conj: Conjugator::Keyed(conj_perm),
        },
    )))
}

/// Key-determined cyclus: the successor cyclus conjugated by a keyed
/// permutation. A concrete stand-in for a pseudorandom cyclus oracle.
pub fn oracle_pseudo_cyclus(n: u64, key: &[u8]) -> Result<OracleHandle, OracleError> {
    if n == 0 {
        return Err(OracleError::ZeroDomain);
    }
    let code = CycleLengths::new(vec![n])?;
    Ok(OracleHandle::wrap(OracleImpl::Conjugated(
        ConjugatedOracle {
            n,
            label: "cprime",
            ff: FFPerm::from_code(&code),
            conj: Conjugator::Keyed(KeyedPerm::new(key, n)?),
        },
    )))
}
