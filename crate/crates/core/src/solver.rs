//! `q_s(x)`: the smallest base in `(1, 2)` in which `x` has a unique
//! expansion.
//!
//! Off three gap intervals in `(0, 1)` and four exceptional points,
//! `q_s(x) < q_KL`. Then `q_s(x) ∈ (q_{n-1}, q_n]` for the first level `n`
//! whose family reaches `x`, and `q_s(x)` is the root of `(γ)_q = x` where
//! `γ` is the lexicographically smallest level-`n` member with
//! `(γ)_{q_{n-1}} > x`.
//!
//! Level membership uses the minimal `γ` alone: if some member `d`
//! satisfies `(d)_{q_n} ≤ x < (d)_{q_{n-1}}`, then `γ ≤ d`
//! lexicographically, hence `(γ)_{q_n} ≤ (d)_{q_n} ≤ x`. So `x` is reached
//! at level `n` exactly when `(γ)_{q_n} ≤ x`.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::bases::{
    kl_interval, level_interval, z1k_sequence, zn_sequence, BaseLadder, BasesError, ExactReal, SeriesBase,
};
use crate::family::{smallest_gamma, FamilyAutomaton, FamilyError, DEFAULT_MAX_DEPTH};
use crate::precise::{
    bisect_root, eval_at, parse_exact, Dyadic, PreciseError, PreciseReal, PrecisionPolicy, RealOrdering, Round,
    RootInterval, DEFAULT_PRECISION, MAX_PRECISION,
};
use crate::words::EventuallyPeriodicSeq;

/// Default root tolerance.
pub const DEFAULT_TOLERANCE: &str = "1e-12";

/// Upper bound on the partition index searched by the mid-band closed form.
const MAX_PARTITION_INDEX: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("boundary case: {0}")]
    Boundary(String),
    #[error(transparent)]
    Bases(BasesError),
    #[error(transparent)]
    Family(FamilyError),
}

impl SolverError {
    /// Inputs that sit on (or within precision of) a decision boundary.
    pub fn is_boundary(&self) -> bool {
        match self {
            SolverError::Boundary(_) => true,
            SolverError::Bases(e) | SolverError::Family(FamilyError::Bases(e)) => {
                matches!(e, BasesError::Boundary { .. } | BasesError::Precise(PreciseError::Precision { .. }))
            }
            SolverError::Family(FamilyError::DepthExceeded { .. }) => true,
            _ => false,
        }
    }
}

impl From<BasesError> for SolverError {
    fn from(e: BasesError) -> Self {
        SolverError::Bases(e)
    }
}

impl From<FamilyError> for SolverError {
    fn from(e: FamilyError) -> Self {
        SolverError::Family(e)
    }
}

impl From<PreciseError> for SolverError {
    fn from(e: PreciseError) -> Self {
        SolverError::Bases(BasesError::Precise(e))
    }
}

fn precise(e: BasesError) -> PreciseError {
    match e {
        BasesError::Precise(p) => p,
        other => PreciseError::Precision { bits: 0, context: other.to_string() },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Closed forms where they apply, the level scan elsewhere.
    #[default]
    Auto,
    /// Always the level scan.
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub tol: BigRational,
    pub precision_cap: u32,
    pub max_level: usize,
    pub max_depth: usize,
    pub strategy: Strategy,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: parse_exact(DEFAULT_TOLERANCE).expect("literal"),
            precision_cap: MAX_PRECISION,
            max_level: crate::bases::MAX_LEVEL,
            max_depth: DEFAULT_MAX_DEPTH,
            strategy: Strategy::Auto,
        }
    }
}

impl SolverOptions {
    pub fn general() -> Self {
        SolverOptions { strategy: Strategy::General, ..Self::default() }
    }

    pub fn policy(&self) -> PrecisionPolicy {
        PrecisionPolicy::with_cap(self.precision_cap)
    }

    fn tol_dyadic(&self) -> Dyadic {
        Dyadic::from_rational(&self.tol, 64, Round::Floor)
    }

    fn check(&self) -> Result<(), SolverError> {
        if !self.tol.is_positive() {
            return Err(SolverError::Domain("tolerance must be positive".into()));
        }
        if !(crate::precise::MIN_PRECISION..=MAX_PRECISION).contains(&self.precision_cap) {
            return Err(SolverError::Domain(format!(
                "precision cap must lie in {}..={MAX_PRECISION}",
                crate::precise::MIN_PRECISION
            )));
        }
        if self.max_level == 0 {
            return Err(SolverError::Domain("level cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    BelowKL,
    EqualKL,
    AboveKL,
    /// No level up to the cap reaches `x`; `q_s(x) ∈ (q_N, q_KL]`.
    NearKL,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::BelowKL => "BelowKL",
            Classification::EqualKL => "EqualKL",
            Classification::AboveKL => "AboveKL",
            Classification::NearKL => "NearKL",
        })
    }
}

/// Which computation produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePath {
    ClosedFormLarge,
    ClosedFormMidband,
    General,
    GapInterval,
    ExceptionalPoint,
    LevelCap,
}

impl fmt::Display for SolvePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolvePath::ClosedFormLarge => "closed-form-large",
            SolvePath::ClosedFormMidband => "closed-form-midband",
            SolvePath::General => "general",
            SolvePath::GapInterval => "gap-interval",
            SolvePath::ExceptionalPoint => "exceptional-point",
            SolvePath::LevelCap => "level-cap",
        })
    }
}

/// Where `x` falls before any level scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    /// Inside gap `k ∈ {1, 2, 3}`.
    InGap(usize),
    /// Equal to exceptional point `i` of [`exceptional_points`].
    Exceptional(usize),
    Scannable,
}

/// The four values with `q_s(x) = q_KL`: `1`, `((10)^∞)_{q_KL}`,
/// `((01)^∞)_{q_KL}` and `(0(01)^∞)_{q_KL}`.
pub fn exceptional_points() -> [ExactReal; 4] {
    let at_kl = |s: &str| ExactReal::series(s.parse().expect("literal"), SeriesBase::Kl);
    [
        ExactReal::Rational(BigRational::one()),
        at_kl("(10)^inf"),
        at_kl("(01)^inf"),
        at_kl("0(01)^inf"),
    ]
}

/// The intervals `[(0^k(10)^∞)_{q_1}, (0^{k-1}(10)^∞)_{q_KL})`, `k = 1, 2, 3`,
/// on which `q_s(x) > q_KL`.
#[derive(Debug, Clone)]
pub struct GapIntervals {
    bounds: Vec<(ExactReal, ExactReal)>,
}

impl Default for GapIntervals {
    fn default() -> Self {
        Self::new()
    }
}

impl GapIntervals {
    pub fn new() -> Self {
        let tail: EventuallyPeriodicSeq = "(10)^inf".parse().expect("literal");
        let zeros = |k: usize| crate::words::BinaryWord::repeat_digit(0, k);
        let bounds = (1..=3)
            .map(|k| {
                (
                    ExactReal::series(tail.prepend(&zeros(k)), SeriesBase::Level(1)),
                    ExactReal::series(tail.prepend(&zeros(k - 1)), SeriesBase::Kl),
                )
            })
            .collect();
        GapIntervals { bounds }
    }

    /// Left and right endpoint of gap `k`.
    pub fn endpoints(&self, k: usize) -> (&ExactReal, &ExactReal) {
        let (l, r) = &self.bounds[k - 1];
        (l, r)
    }

    /// Gap containing `x`, if any.
    pub fn locate(&self, x: &ExactReal, policy: PrecisionPolicy) -> Result<Option<usize>, SolverError> {
        for k in 1..=3 {
            let (left, right) = self.endpoints(k);
            if x.compare(left, policy).map_err(|e| boundary(e, x, "a gap endpoint"))? != Ordering::Less
                && x.compare(right, policy).map_err(|e| boundary(e, x, "a gap endpoint"))? == Ordering::Less
            {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }
}

fn boundary(e: BasesError, x: &ExactReal, what: &str) -> SolverError {
    match e {
        BasesError::Precise(PreciseError::Precision { bits, .. }) => {
            SolverError::Boundary(format!("{x} cannot be separated from {what} at {bits} bits"))
        }
        other => SolverError::Bases(other),
    }
}

fn check_positive(x: &ExactReal) -> Result<(), SolverError> {
    let positive = match x {
        ExactReal::Rational(r) => r.is_positive(),
        _ => x.enclosure()?.sign() == RealOrdering::Greater,
    };
    if positive {
        Ok(())
    } else {
        Err(SolverError::Domain(format!("x must be positive, got {x}")))
    }
}

/// Places `x` relative to the gaps and exceptional points.
///
/// Equality with 1 is exact. The other exceptional points are irrational;
/// a symbolic input equal to one of them, or an enclosure that cannot be
/// separated from one at the precision cap, is classified exceptional. A
/// rational that cannot be separated is a boundary error.
pub fn classify(x: &ExactReal, options: &SolverOptions) -> Result<Class, SolverError> {
    check_positive(x)?;
    let policy = options.policy();
    for (i, point) in exceptional_points().iter().enumerate() {
        match x.compare(point, policy) {
            Ok(Ordering::Equal) => return Ok(Class::Exceptional(i)),
            Ok(_) => {}
            Err(BasesError::Precise(PreciseError::Precision { bits, .. })) => {
                if x.as_rational().is_some() {
                    return Err(SolverError::Boundary(format!(
                        "{x} cannot be separated from the exceptional value {point} at {bits} bits"
                    )));
                }
                return Ok(Class::Exceptional(i));
            }
            Err(e) => return Err(e.into()),
        }
    }
    match GapIntervals::new().locate(x, policy)? {
        Some(k) => Ok(Class::InGap(k)),
        None => Ok(Class::Scannable),
    }
}

/// Outcome of a `q_s` query.
#[derive(Debug, Clone, PartialEq)]
pub struct QsResult {
    pub x: ExactReal,
    pub classification: Classification,
    pub path: SolvePath,
    /// Level `n` with `q_s(x) ∈ (q_{n-1}, q_n]`.
    pub level: Option<usize>,
    pub gamma: Option<EventuallyPeriodicSeq>,
    /// Enclosure of `q_s(x)`; for `NearKL` the bracket `[q_N, q_KL]`.
    pub qs: Option<RootInterval>,
    pub gap: Option<usize>,
    pub exceptional: Option<usize>,
    /// Partition index of the mid-band closed form.
    pub partition: Option<usize>,
}

impl QsResult {
    fn bare(x: &ExactReal, classification: Classification, path: SolvePath) -> Self {
        QsResult {
            x: x.clone(),
            classification,
            path,
            level: None,
            gamma: None,
            qs: None,
            gap: None,
            exceptional: None,
            partition: None,
        }
    }
}

/// `z_1 = (1^∞)_{q_1}`.
pub fn z1() -> ExactReal {
    ExactReal::series(zn_sequence(1).expect("level 1"), SeriesBase::Level(1))
}

/// `z_n = (τ_1 ⋯ τ_{2^{n-1}} (τ_{2^{n-1}+1} ⋯ τ_{2^n})^∞)_{q_n}`.
pub fn zn(n: usize) -> Result<ExactReal, SolverError> {
    Ok(ExactReal::series(zn_sequence(n)?, SeriesBase::Level(n)))
}

/// `z_{1,k} = (1^k (01)^∞)_{q_1}`.
pub fn z1k(k: usize) -> ExactReal {
    ExactReal::series(z1k_sequence(k), SeriesBase::Level(1))
}

/// `q_s(x)`.
pub fn qs(x: &ExactReal, options: &SolverOptions) -> Result<QsResult, SolverError> {
    options.check()?;
    match classify(x, options)? {
        Class::InGap(k) => {
            let mut r = QsResult::bare(x, Classification::AboveKL, SolvePath::GapInterval);
            r.gap = Some(k);
            return Ok(r);
        }
        Class::Exceptional(i) => {
            let mut r = QsResult::bare(x, Classification::EqualKL, SolvePath::ExceptionalPoint);
            r.exceptional = Some(i);
            r.qs = Some(kl_interval(DEFAULT_PRECISION)?);
            return Ok(r);
        }
        Class::Scannable => {}
    }
    if options.strategy == Strategy::Auto {
        let policy = options.policy();
        if compare(x, &z1(), policy)? != Ordering::Less {
            let q = qs_closed_large(x, options)?;
            let mut r = QsResult::bare(x, Classification::BelowKL, SolvePath::ClosedFormLarge);
            r.level = Some(1);
            r.gamma = Some(EventuallyPeriodicSeq::constant(1));
            r.qs = Some(RootInterval { lo: q.lo().clone(), hi: q.hi().clone(), label: "q = 1/x + 1".into() });
            return Ok(r);
        }
        if compare(x, &zn(2)?, policy)? != Ordering::Less {
            let (k, root) = qs_closed_midband(x, options)?;
            let mut r = QsResult::bare(x, Classification::BelowKL, SolvePath::ClosedFormMidband);
            r.level = Some(2);
            r.gamma = Some(z1k_sequence(k + 1));
            r.qs = Some(root);
            r.partition = Some(k);
            return Ok(r);
        }
    }
    scan(x, options)
}

fn compare(x: &ExactReal, y: &ExactReal, policy: PrecisionPolicy) -> Result<Ordering, SolverError> {
    x.compare(y, policy).map_err(|e| boundary(e, x, &y.to_string()))
}

fn scan(x: &ExactReal, options: &SolverOptions) -> Result<QsResult, SolverError> {
    let ladder = BaseLadder::shared(DEFAULT_PRECISION)?;
    let top = options.max_level.min(ladder.level_count());
    for n in 1..=top {
        let Some(gamma) = level_witness(x, n, options)? else { continue };
        let root = solve_on_level(x, &gamma, n, options)?;
        let mut r = QsResult::bare(x, Classification::BelowKL, SolvePath::General);
        r.level = Some(n);
        r.gamma = Some(gamma);
        r.qs = Some(root);
        return Ok(r);
    }
    let mut r = QsResult::bare(x, Classification::NearKL, SolvePath::LevelCap);
    let q_top = ladder.level_interval(top).expect("level within ladder");
    r.qs = Some(RootInterval {
        lo: q_top.lo.clone(),
        hi: ladder.kl_interval().hi.clone(),
        label: format!("(q_{top}, q_KL]"),
    });
    r.level = Some(top);
    Ok(r)
}

/// `γ` for level `n` when `x` belongs to that level's range, else `None`.
fn level_witness(x: &ExactReal, n: usize, options: &SolverOptions) -> Result<Option<EventuallyPeriodicSeq>, SolverError> {
    let automaton = FamilyAutomaton::shared(n)?;
    let policy = options.policy();
    let found = match smallest_gamma(&automaton, x, policy, options.max_depth) {
        Ok(found) => found,
        Err(FamilyError::NotFound { .. }) => return Ok(None),
        Err(FamilyError::Bases(e)) => return Err(boundary(e, x, &format!("a level-{n} family value"))),
        Err(e) => return Err(e.into()),
    };
    let reached = x
        .compare_series(&found.gamma, SeriesBase::Level(n), policy)
        .map_err(|e| boundary(e, x, &format!("({})_q_{n}", found.gamma)))?;
    Ok((reached != Ordering::Less).then_some(found.gamma))
}

/// Whether `x` lies in the range of the level-`n` family over `(q_{n-1}, q_n]`.
pub fn membership_dn(x: &ExactReal, n: usize, options: &SolverOptions) -> Result<bool, SolverError> {
    options.check()?;
    check_positive(x)?;
    Ok(level_witness(x, n, options)?.is_some())
}

/// Root of `(γ)_q = x` on `(q_{n-1}, q_n]`.
fn solve_on_level(
    x: &ExactReal,
    gamma: &EventuallyPeriodicSeq,
    n: usize,
    options: &SolverOptions,
) -> Result<RootInterval, SolverError> {
    let label = format!("({gamma})_q = {x}");
    let policy = options.policy();
    if x.compare_series(gamma, SeriesBase::Level(n), policy).map_err(|e| boundary(e, x, "q_n"))? == Ordering::Equal {
        return Ok(level_interval(n, DEFAULT_PRECISION)?.with_label(label));
    }
    let hi = level_interval(n, DEFAULT_PRECISION)?.hi;
    let lo = if n == 1 {
        // (γ)_q grows without bound as q → 1.
        let mut k = 1i64;
        loop {
            let probe = &Dyadic::one() + &Dyadic::pow2(-k);
            let v = eval_at(gamma, &PreciseReal::exact(probe.clone()))?;
            if v.compare(&x.enclosure()?) == RealOrdering::Greater {
                break probe;
            }
            k += 1;
            if k > 4096 {
                return Err(SolverError::Domain(format!("{x} is too large to bracket")));
            }
        }
    } else {
        level_interval(n - 1, DEFAULT_PRECISION)?.lo
    };
    let f = |q: &PreciseReal| -> Result<PreciseReal, PreciseError> {
        Ok(&eval_at(gamma, q)? - &x.enclosure().map_err(precise)?)
    };
    let root = bisect_root(f, &lo, &hi, &options.tol_dyadic(), options.precision_cap)
        .map_err(|e| boundary(BasesError::Precise(e), x, "the root bracket"))?;
    Ok(root.with_label(label))
}

/// `q_s(x) = 1/x + 1` for `x ≥ z_1`.
pub fn qs_closed_large(x: &ExactReal, options: &SolverOptions) -> Result<PreciseReal, SolverError> {
    if compare(x, &z1(), options.policy())? == Ordering::Less {
        return Err(SolverError::Domain(format!("{x} is below z_1")));
    }
    Ok(match x {
        ExactReal::Rational(r) => PreciseReal::from_rational(&(r.recip() + BigRational::one())),
        _ => &x.enclosure()?.recip()? + &PreciseReal::one(),
    })
}

/// The index `k` of the cell of `[z_2, z_1)` containing `x`: `k = 1` on
/// `[z_2, z_{1,2})` and `z_{1,k} ≤ x < z_{1,k+1}` for `k ≥ 2`.
pub fn midband_partition(x: &ExactReal, options: &SolverOptions) -> Result<usize, SolverError> {
    let policy = options.policy();
    if compare(x, &zn(2)?, policy)? == Ordering::Less || compare(x, &z1(), policy)? != Ordering::Less {
        return Err(SolverError::Domain(format!("{x} is outside [z_2, z_1)")));
    }
    let mut k = 1;
    while k < MAX_PARTITION_INDEX {
        if compare(x, &z1k(k + 1), policy)? == Ordering::Less {
            return Ok(k);
        }
        k += 1;
    }
    Err(SolverError::Boundary(format!("{x} is within z_1 - z_(1,{k}) of z_1")))
}

/// `Σ_{i=1}^{k+1} q^{-i} + q^{-(k+1)} / (q^2 - 1)`, the value of `1^{k+1}(01)^∞`.
pub fn midband_value(k: usize, q: &PreciseReal) -> Result<PreciseReal, PreciseError> {
    let u = q.recip()?;
    let one = PreciseReal::one();
    let mut sum = PreciseReal::zero();
    let mut power = one.clone();
    for _ in 0..=k {
        power = &power * &u;
        sum = &sum + &power;
    }
    let tail = power.checked_div(&(&(q * q) - &one))?;
    Ok(&sum + &tail)
}

/// `q_s(x)` on `[z_2, z_1)`, with the partition index used.
pub fn qs_closed_midband(x: &ExactReal, options: &SolverOptions) -> Result<(usize, RootInterval), SolverError> {
    let k = midband_partition(x, options)?;
    let gamma = z1k_sequence(k + 1);
    let label = format!("{} = value of 1^{}(01)^inf at q", x, k + 1);
    let policy = options.policy();
    if x.compare_series(&gamma, SeriesBase::Level(2), policy).map_err(|e| boundary(e, x, "q_2"))? == Ordering::Equal {
        return Ok((k, level_interval(2, DEFAULT_PRECISION)?.with_label(label)));
    }
    let lo = level_interval(1, DEFAULT_PRECISION)?.lo;
    let hi = level_interval(2, DEFAULT_PRECISION)?.hi;
    let f = |q: &PreciseReal| -> Result<PreciseReal, PreciseError> {
        Ok(&midband_value(k, q)? - &x.enclosure().map_err(precise)?)
    };
    let root = bisect_root(f, &lo, &hi, &options.tol_dyadic(), options.precision_cap)
        .map_err(|e| boundary(BasesError::Precise(e), x, "the root bracket"))?;
    Ok((k, root.with_label(label)))
}
