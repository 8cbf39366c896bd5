//! Brute-force checks of expansions, independent of the level machinery.
//!
//! With remainder `r_k = q^k x - Σ_{i≤k} d_i q^{k-i}`, digit 1 can follow
//! iff `r ≥ 1/q` and digit 0 iff `r ≤ 1/(q(q-1))`; any prefix whose
//! remainder lies in `[0, 1/(q-1)]` extends to a full expansion. Two
//! feasible digits at some step therefore prove non-uniqueness, while a
//! single feasible digit at every step up to a depth only certifies
//! uniqueness up to that depth.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::bases::{Base, BasesError, Elem, ExactReal};
use crate::family::FamilyAutomaton;
use crate::precise::{
    bisect_root, eval_at, scoped, Dyadic, PreciseError, PreciseReal, PrecisionPolicy, RealOrdering, RootInterval,
    MAX_PRECISION,
};
use crate::words::{BinaryWord, EventuallyPeriodicSeq};

/// Default depth for uniqueness checks.
pub const DEFAULT_DEPTH: usize = 60;
/// Largest accepted depth.
pub const MAX_DEPTH: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("digit {index} undecided at this base enclosure")]
    Boundary { index: usize },
    #[error(transparent)]
    Bases(#[from] BasesError),
}

impl From<PreciseError> for OracleError {
    fn from(e: PreciseError) -> Self {
        OracleError::Bases(e.into())
    }
}

/// Result of following all expansions of `x` for a number of digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchVerdict {
    /// Exactly one digit was feasible at each of the first `depth` steps.
    Unique { depth: usize },
    /// Both digits are feasible at step `depth`.
    Multiple { depth: usize },
    /// `x` lies outside `[0, 1/(q-1)]`.
    Infeasible,
    /// Feasibility at step `depth` could not be decided.
    Undecided { depth: usize },
}

impl fmt::Display for BranchVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchVerdict::Unique { depth } => write!(f, "Unique (through depth {depth})"),
            BranchVerdict::Multiple { depth } => write!(f, "Multiple (branches at digit {depth})"),
            BranchVerdict::Infeasible => write!(f, "Infeasible"),
            BranchVerdict::Undecided { depth } => write!(f, "Undecided (at digit {depth})"),
        }
    }
}

fn check_depth(depth: usize) -> Result<(), OracleError> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(OracleError::Domain(format!("depth must lie in 1..={MAX_DEPTH}")));
    }
    Ok(())
}

fn start(x: &ExactReal, q: &Base) -> Result<Elem, OracleError> {
    Ok(match x {
        ExactReal::Rational(r) => q.elem(r),
        other => Elem::Ball(other.enclosure()?),
    })
}

/// Signs of `q r - 1` (digit 1 feasible iff ≥ 0) and `q(q r - r) - 1`
/// (digit 0 feasible iff ≤ 0).
fn feasibility(q: &Base, r: &Elem, policy: PrecisionPolicy) -> Result<(RealOrdering, RealOrdering, Elem), OracleError> {
    let one = BigRational::one();
    let qr = q.mul_q(r);
    let after_one = q.sub_rational(&qr, &one);
    let scaled = q.sub_rational(&q.mul_q(&q.sub(&qr, r)), &one);
    Ok((q.sign(&after_one, policy)?, q.sign(&scaled, policy)?, qr))
}

fn in_range(x: &ExactReal, q: &Base, policy: PrecisionPolicy) -> Result<RealOrdering, OracleError> {
    let r = start(x, q)?;
    let below = q.sign(&r, policy)?;
    // (q - 1) x - 1 ≤ 0
    let above = q.sign(&q.sub_rational(&q.sub(&q.mul_q(&r), &r), &BigRational::one()), policy)?;
    Ok(match (below, above) {
        (RealOrdering::Less, _) | (_, RealOrdering::Greater) => RealOrdering::Greater,
        (RealOrdering::Undecided, _) | (_, RealOrdering::Undecided) => RealOrdering::Undecided,
        _ => RealOrdering::Less,
    })
}

/// Follows the expansions of `x` in base `q` for up to `depth` digits.
pub fn expansion_branches(x: &ExactReal, q: &Base, depth: usize) -> Result<BranchVerdict, OracleError> {
    branches(x, q, depth, true)
}

fn branches(x: &ExactReal, q: &Base, depth: usize, range_check: bool) -> Result<BranchVerdict, OracleError> {
    check_depth(depth)?;
    q.check_range()?;
    let policy = PrecisionPolicy::default();
    if range_check {
        match in_range(x, q, policy)? {
            RealOrdering::Greater => return Ok(BranchVerdict::Infeasible),
            RealOrdering::Undecided => return Ok(BranchVerdict::Undecided { depth: 0 }),
            _ => {}
        }
    }
    let mut r = start(x, q)?;
    for k in 1..=depth {
        let (one, zero, qr) = feasibility(q, &r, policy)?;
        if one == RealOrdering::Undecided || zero == RealOrdering::Undecided {
            return Ok(BranchVerdict::Undecided { depth: k });
        }
        let one_ok = one != RealOrdering::Less;
        let zero_ok = zero != RealOrdering::Greater;
        r = match (one_ok, zero_ok) {
            (true, true) => return Ok(BranchVerdict::Multiple { depth: k }),
            (true, false) => q.sub_rational(&qr, &BigRational::one()),
            (false, true) => qr,
            (false, false) => return Ok(BranchVerdict::Infeasible),
        };
    }
    Ok(BranchVerdict::Unique { depth })
}

/// The greedy expansion: digit 1 whenever it is feasible.
pub fn greedy_expansion(x: &ExactReal, q: &Base, count: usize) -> Result<BinaryWord, OracleError> {
    digit_by_digit(x, q, count, false)
}

/// The quasi-greedy expansion: digit 1 whenever the remainder stays
/// positive, so the result never ends in `0^∞` for `x > 0`.
pub fn quasi_greedy_expansion(x: &ExactReal, q: &Base, count: usize) -> Result<BinaryWord, OracleError> {
    digit_by_digit(x, q, count, true)
}

fn digit_by_digit(x: &ExactReal, q: &Base, count: usize, strict: bool) -> Result<BinaryWord, OracleError> {
    q.check_range()?;
    let policy = PrecisionPolicy::default();
    match in_range(x, q, policy)? {
        RealOrdering::Less => {}
        RealOrdering::Undecided => return Err(OracleError::Boundary { index: 0 }),
        _ => return Err(OracleError::Domain(format!("{x} has no expansion in this base"))),
    }
    let one = BigRational::one();
    let mut r = start(x, q)?;
    let mut digits = Vec::with_capacity(count);
    for index in 1..=count {
        let qr = q.mul_q(&r);
        let after_one = q.sub_rational(&qr, &one);
        match q.sign(&after_one, policy)? {
            RealOrdering::Equal if strict => {
                digits.push(0);
                r = qr;
            }
            RealOrdering::Greater | RealOrdering::Equal => {
                digits.push(1);
                r = after_one;
            }
            RealOrdering::Less => {
                digits.push(0);
                r = qr;
            }
            RealOrdering::Undecided => return Err(OracleError::Boundary { index }),
        }
    }
    Ok(BinaryWord::new(digits).expect("binary digits"))
}

/// [`expansion_branches`] in plain rational arithmetic, for rational `x` and `q`.
pub fn expansion_branches_rational(x: &BigRational, q: &BigRational, depth: usize) -> BranchVerdict {
    let one = BigRational::one();
    let q_minus_one = q - &one;
    if x.is_negative() || x * &q_minus_one > one {
        return BranchVerdict::Infeasible;
    }
    let low = q.recip();
    let high = (q * &q_minus_one).recip();
    let mut r = x.clone();
    for k in 1..=depth {
        let one_ok = r >= low;
        let zero_ok = r <= high;
        r = match (one_ok, zero_ok) {
            (true, true) => return BranchVerdict::Multiple { depth: k },
            (true, false) => q * &r - &one,
            (false, true) => q * &r,
            (false, false) => return BranchVerdict::Infeasible,
        };
    }
    BranchVerdict::Unique { depth }
}

/// Outcome of [`verify_uniqueness_at`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UniquenessVerdict {
    Pass,
    Fail(String),
    Undecided(String),
}

/// Checks a solver answer `(γ, q_s)` for `x` at level `n`:
/// (a) `(γ)_{q_s}` encloses `x`, (b) `γ` belongs to the level-`n` family,
/// (c) the branch search at `q_s` does not find a second expansion.
///
/// For (c) the root of `(γ)_q = x` is re-isolated inside the given
/// enclosure to a width small enough that `depth` digits stay decidable.
pub fn verify_uniqueness_at(
    x: &ExactReal,
    gamma: &EventuallyPeriodicSeq,
    level: usize,
    qs: &RootInterval,
    depth: usize,
) -> Result<UniquenessVerdict, OracleError> {
    check_depth(depth)?;
    let value = eval_at(gamma, &qs.enclosure())?;
    if !value.overlaps(&x.enclosure()?) {
        return Ok(UniquenessVerdict::Fail(format!("({gamma})_q does not enclose {x}")));
    }
    let automaton = FamilyAutomaton::shared(level).map_err(|e| OracleError::Domain(e.to_string()))?;
    if !automaton.is_member(gamma) {
        return Ok(UniquenessVerdict::Fail(format!("{gamma} is not a level-{level} family member")));
    }

    if qs.lo == qs.hi {
        let verdict = expansion_branches(x, &Base::Rational(qs.lo.to_rational()), depth)?;
        return Ok(branch_outcome(verdict));
    }

    // Each digit loses at most one bit of the base's accuracy.
    let bits = (depth as u32 + 96).min(MAX_PRECISION);
    let slack = Dyadic::pow2(-60).max(qs.width());
    let lo = &qs.lo - &slack;
    let hi = &qs.hi + &slack;
    let f = |q: &PreciseReal| -> Result<PreciseReal, PreciseError> {
        let target = x.enclosure().map_err(|e| PreciseError::Precision { bits: 0, context: e.to_string() })?;
        Ok(&eval_at(gamma, q)? - &target)
    };
    let refined = match scoped(bits, || bisect_root(f, &lo, &hi, &Dyadic::pow2(-(bits as i64 - 8)), MAX_PRECISION)) {
        Ok(root) => root,
        Err(PreciseError::Bracket(_)) => {
            return Ok(UniquenessVerdict::Fail(format!("no root of ({gamma})_q = {x} near the given base")))
        }
        Err(e) => return Ok(UniquenessVerdict::Undecided(e.to_string())),
    };
    let base = Base::Enclosure(refined.enclosure());
    // (a) already places x in [0, 1/(q-1)], possibly at an endpoint.
    let verdict = scoped(bits + 64, || branches(x, &base, depth, false))?;
    Ok(branch_outcome(verdict))
}

fn branch_outcome(verdict: BranchVerdict) -> UniquenessVerdict {
    match verdict {
        BranchVerdict::Unique { .. } => UniquenessVerdict::Pass,
        BranchVerdict::Undecided { depth } => UniquenessVerdict::Undecided(format!("branch search undecided at digit {depth}")),
        other => UniquenessVerdict::Fail(format!("branch search at q_s: {other}")),
    }
}

/// Rational point `q_s - offset` below a root enclosure.
pub fn rational_below(qs: &RootInterval, offset: &BigRational) -> BigRational {
    qs.lo.to_rational() - offset
}
