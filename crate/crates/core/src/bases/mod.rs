//! The level bases `q_1 < q_2 < … → q_KL`, quasi-greedy expansions of 1,
//! and the threshold constants `z_n`, `z_{1,k}`.
//!
//! `q_n` is the root in `(1, 2)` of `1 = Σ_{i=1}^{2^n} τ_i q^{-i}` and
//! `q_KL` the root of the full Thue-Morse series. Both equations are
//! evaluated with the product identity
//! `Σ_{i<2^k} (-1)^{τ_i} u^i = Π_{j<k} (1 - u^{2^j})`, which turns a sum of
//! `2^k` terms into `k` multiplications.

mod algebraic;
mod base;
mod real;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

pub use algebraic::{AlgebraicBase, QPoly};
pub use base::Base;
pub(crate) use base::Elem;
pub use real::{render_rational, series_fraction, ExactReal, SeriesBase};

use crate::precise::{
    bisect_root, eval_at, parse_exact, scoped, working_precision, Dyadic, PreciseError, PreciseReal,
    PrecisionPolicy, RealOrdering, Round, RootInterval, MAX_PRECISION,
};
use crate::words::{thue_morse_digit, thue_morse_range, BinaryWord, EventuallyPeriodicSeq};

/// Highest level the ladder will compute.
pub const MAX_LEVEL: usize = 20;

/// The ladder stops adding levels once `q_KL - q_n` drops below this.
pub const EARLY_STOP_GAP: &str = "1e-14";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BasesError {
    #[error("level {level} outside 1..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("base must lie strictly between 1 and 2")]
    BaseOutOfRange,
    #[error("digit {index} undecided: {context}")]
    Boundary { index: usize, context: String },
    #[error(transparent)]
    Precise(#[from] PreciseError),
}

fn check_level(n: usize) -> Result<(), BasesError> {
    if (1..=MAX_LEVEL).contains(&n) {
        Ok(())
    } else {
        Err(BasesError::LevelOutOfRange { level: n, max: MAX_LEVEL })
    }
}

fn half() -> PreciseReal {
    PreciseReal::exact(Dyadic::pow2(-1))
}

/// `Σ_{i=1}^{2^k} τ_i u^i`.
fn thue_morse_sum(u: &PreciseReal, k: u32) -> PreciseReal {
    let one = PreciseReal::one();
    let mut product = one.clone();
    let mut power = u.clone();
    for _ in 0..k {
        product = &product * &(&one - &power);
        power = &power * &power;
    }
    // Σ_{i<2^k} u^i and Σ_{i<2^k} (-1)^{τ_i} u^i give the sum over τ_i = 1.
    let geometric = (&one - &power).checked_div(&(&one - u)).expect("u < 1");
    &(&(&geometric - &product) * &half()) + &power
}

/// `1 - Σ_{i=1}^{2^n} τ_i q^{-i}`, increasing in `q`.
fn level_equation(n: usize, q: &PreciseReal) -> Result<PreciseReal, PreciseError> {
    let u = q.recip()?;
    Ok(&PreciseReal::one() - &thue_morse_sum(&u, n as u32))
}

/// `1 - Σ_{i≥1} τ_i q^{-i}` for `q ≥ 27/16`. The series is cut after
/// `m = 2^k` terms, with `k` tied to the working precision, and the tail
/// `0 ≤ Σ_{i>m} τ_i q^{-i} ≤ q^{-m-1}/(1 - 1/q)` is folded into the result.
fn kl_equation(q: &PreciseReal) -> Result<PreciseReal, PreciseError> {
    let u = q.recip()?;
    // log2(27/16) > 3/4, so 2^k ≥ 4(bits + 8)/3 terms push the tail below 2^-(bits+4).
    let terms_needed = (working_precision() as u64 + 8) * 4 / 3;
    let k = 64 - terms_needed.leading_zeros();
    let one = PreciseReal::one();
    let head = &one - &thue_morse_sum(&u, k);
    let tail = u.powi((1u32 << k) + 1).checked_div(&(&one - &u))?;
    Ok(head.hull(&(&head - &tail)))
}

fn bracket() -> (Dyadic, Dyadic) {
    (Dyadic::new(3.into(), -1), Dyadic::from_int(2))
}

/// Isolates `q_n` to width `tol`.
pub fn compute_qn(n: usize, tol: &Dyadic) -> Result<RootInterval, BasesError> {
    check_level(n)?;
    let (lo, hi) = bracket();
    let root = bisect_root(|q| level_equation(n, q), &lo, &hi, tol, MAX_PRECISION)?;
    Ok(root.with_label(format!("q_{n}")))
}

/// Isolates `q_KL` to width `tol`.
pub fn compute_qkl(tol: &Dyadic) -> Result<RootInterval, BasesError> {
    let lo = Dyadic::new(27.into(), -4);
    let hi = Dyadic::new(29.into(), -4);
    let root = bisect_root(kl_equation, &lo, &hi, tol, MAX_PRECISION)?;
    Ok(root.with_label("q_KL"))
}

/// Width used for cached enclosures at `bits` of working precision.
pub fn ladder_tolerance(bits: u32) -> Dyadic {
    Dyadic::pow2(-(bits.saturating_sub(24).max(16) as i64))
}

type LevelCache = Mutex<HashMap<(usize, u32), RootInterval>>;

fn level_cache() -> &'static LevelCache {
    static CACHE: OnceLock<LevelCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn kl_cache() -> &'static Mutex<HashMap<u32, RootInterval>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, RootInterval>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Cached enclosure of `q_n` accurate to [`ladder_tolerance`]`(bits)`.
pub fn level_interval(n: usize, bits: u32) -> Result<RootInterval, BasesError> {
    check_level(n)?;
    if let Some(hit) = level_cache().lock().unwrap().get(&(n, bits)) {
        return Ok(hit.clone());
    }
    let root = compute_qn(n, &ladder_tolerance(bits))?;
    level_cache().lock().unwrap().insert((n, bits), root.clone());
    Ok(root)
}

/// Enclosure of `q_n` at the current working precision; `q_0 = 1`.
pub fn level_enclosure(n: usize) -> Result<PreciseReal, BasesError> {
    if n == 0 {
        return Ok(PreciseReal::one());
    }
    Ok(level_interval(n, working_precision())?.enclosure())
}

/// Cached enclosure of `q_KL` accurate to [`ladder_tolerance`]`(bits)`.
pub fn kl_interval(bits: u32) -> Result<RootInterval, BasesError> {
    if let Some(hit) = kl_cache().lock().unwrap().get(&bits) {
        return Ok(hit.clone());
    }
    let root = scoped(bits, || compute_qkl(&ladder_tolerance(bits)))?;
    kl_cache().lock().unwrap().insert(bits, root.clone());
    Ok(root)
}

/// Enclosure of `q_KL` at the current working precision.
pub fn kl_enclosure() -> Result<PreciseReal, BasesError> {
    Ok(kl_interval(working_precision())?.enclosure())
}

/// `D_n(q) = q^{2^n} - Σ_{i=1}^{2^n} τ_i q^{2^n - i}`, whose root in `(1, 2)`
/// is `q_n`.
pub fn level_polynomial(n: usize) -> QPoly {
    let m = 1usize << n;
    let mut coeffs = vec![0i64; m + 1];
    coeffs[m] = 1;
    for i in 1..=m {
        coeffs[m - i] -= thue_morse_digit(i as u64) as i64;
    }
    QPoly::from_integers(coeffs)
}

/// `q_n` as an exact algebraic base. Cached per level.
pub fn level_base(n: usize) -> Result<Arc<AlgebraicBase>, BasesError> {
    check_level(n)?;
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<AlgebraicBase>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return Ok(hit.clone());
    }
    let seed = compute_qn(n, &Dyadic::pow2(-48))?;
    let base = AlgebraicBase::new(level_polynomial(n), seed.lo, seed.hi, format!("q_{n}"))?;
    let base = Arc::new(base);
    cache.lock().unwrap().insert(n, base.clone());
    Ok(base)
}

/// Enclosures of `q_1, q_2, …` and `q_KL` at one working precision.
#[derive(Debug, Clone)]
pub struct BaseLadder {
    bits: u32,
    tolerance: Dyadic,
    levels: Vec<RootInterval>,
    kl: RootInterval,
}

impl BaseLadder {
    /// Computes levels `1..=MAX_LEVEL`, stopping after the first level
    /// within [`EARLY_STOP_GAP`] of `q_KL`.
    pub fn build(bits: u32) -> Result<Self, BasesError> {
        let kl = kl_interval(bits)?;
        let gap = Dyadic::from_rational(&parse_exact(EARLY_STOP_GAP)?, 64, Round::Floor);
        let mut levels = Vec::new();
        for n in 1..=MAX_LEVEL {
            let q = level_interval(n, bits)?;
            let close = &kl.hi - &q.lo < gap;
            levels.push(q);
            if close {
                break;
            }
        }
        Ok(BaseLadder { bits, tolerance: ladder_tolerance(bits), levels, kl })
    }

    /// Process-wide ladder for `bits`, built on first use.
    pub fn shared(bits: u32) -> Result<Arc<Self>, BasesError> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<BaseLadder>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(hit) = cache.lock().unwrap().get(&bits) {
            return Ok(hit.clone());
        }
        let ladder = Arc::new(Self::build(bits)?);
        cache.lock().unwrap().insert(bits, ladder.clone());
        Ok(ladder)
    }

    /// Ladder at the current working precision.
    pub fn current() -> Result<Arc<Self>, BasesError> {
        Self::shared(working_precision())
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn tolerance(&self) -> &Dyadic {
        &self.tolerance
    }

    /// Number of cached levels.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// `q_n` for `0 ≤ n ≤ level_count()`.
    pub fn level(&self, n: usize) -> PreciseReal {
        if n == 0 {
            PreciseReal::one()
        } else {
            self.levels[n - 1].enclosure()
        }
    }

    pub fn level_interval(&self, n: usize) -> Option<&RootInterval> {
        n.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    pub fn kl(&self) -> PreciseReal {
        self.kl.enclosure()
    }

    pub fn kl_interval(&self) -> &RootInterval {
        &self.kl
    }
}

/// `τ_1 ⋯ τ_{2^{n-1}} (τ_{2^{n-1}+1} ⋯ τ_{2^n})^∞`, whose value at `q_n` is `z_n`.
pub fn zn_sequence(n: usize) -> Result<EventuallyPeriodicSeq, BasesError> {
    check_level(n)?;
    let half = 1usize << (n - 1);
    let seq = EventuallyPeriodicSeq::new(thue_morse_range(1, half), thue_morse_range(half + 1, 2 * half))
        .expect("nonempty cycle");
    Ok(seq)
}

/// `1^k (01)^∞`, whose value at `q_1` is `z_{1,k}`.
pub fn z1k_sequence(k: usize) -> EventuallyPeriodicSeq {
    EventuallyPeriodicSeq::new(BinaryWord::repeat_digit(1, k), "01".parse().expect("literal"))
        .expect("nonempty cycle")
}

/// `z_n` at the current working precision.
pub fn compute_zn(n: usize) -> Result<PreciseReal, BasesError> {
    let seq = zn_sequence(n)?;
    Ok(eval_at(&seq, &level_enclosure(n)?)?)
}

/// `z_{1,k}` at the current working precision.
pub fn compute_z1k(k: usize) -> Result<PreciseReal, BasesError> {
    Ok(eval_at(&z1k_sequence(k), &level_enclosure(1)?)?)
}

/// `z_1, …, z_N` and `z_{1,1}, …, z_{1,K}` at one working precision.
#[derive(Debug, Clone)]
pub struct ZLadder {
    pub z: Vec<PreciseReal>,
    pub z1k: Vec<PreciseReal>,
}

impl ZLadder {
    pub fn build(levels: usize, ks: usize) -> Result<Self, BasesError> {
        let z = (1..=levels).map(compute_zn).collect::<Result<_, _>>()?;
        let z1k = (1..=ks).map(compute_z1k).collect::<Result<_, _>>()?;
        Ok(ZLadder { z, z1k })
    }
}

/// The first `count` digits of the quasi-greedy expansion of 1 in base `q`:
/// each digit is 1 exactly when the partial sum stays strictly below 1.
pub fn quasi_greedy_alpha(q: &Base, count: usize) -> Result<BinaryWord, BasesError> {
    quasi_greedy_alpha_with(q, count, PrecisionPolicy::default())
}

pub fn quasi_greedy_alpha_with(q: &Base, count: usize, policy: PrecisionPolicy) -> Result<BinaryWord, BasesError> {
    q.check_range()?;
    let one = BigRational::one();
    let mut r = q.elem(&one);
    let mut digits = Vec::with_capacity(count);
    for index in 1..=count {
        let scaled = q.mul_q(&r);
        let after_one = q.sub_rational(&scaled, &one);
        match q.sign(&after_one, policy)? {
            RealOrdering::Greater => {
                digits.push(1);
                r = after_one;
            }
            RealOrdering::Equal | RealOrdering::Less => {
                digits.push(0);
                r = scaled;
            }
            RealOrdering::Undecided => {
                return Err(BasesError::Boundary {
                    index,
                    context: "partial sum indistinguishable from 1 at this base enclosure".into(),
                })
            }
        }
    }
    Ok(BinaryWord::new(digits).expect("binary digits"))
}
