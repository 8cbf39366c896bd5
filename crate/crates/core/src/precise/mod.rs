//! Interval-backed real arithmetic, closed-form evaluation of eventually
//! periodic digit sequences, and certified root isolation.
//!
//! All real quantities are [`PreciseReal`] enclosures with dyadic endpoints.
//! Arithmetic rounds outward at the thread's working precision (see
//! [`with_precision`]) and comparisons answer [`RealOrdering::Undecided`]
//! rather than guess when two enclosures overlap.

mod decimal;
mod dyadic;
mod real;
mod root;

use thiserror::Error;

use crate::words::EventuallyPeriodicSeq;

pub use decimal::{certified_decimals, format_enclosure, format_exact, format_rational, parse_exact};
pub use dyadic::{Dyadic, Round};
pub use real::{
    with_precision, working_precision, PreciseReal, RealOrdering, DEFAULT_PRECISION, MAX_PRECISION,
    MIN_PRECISION,
};
pub(crate) use real::scoped;
pub use root::{bisect_root, bits_for_tolerance, RootInterval};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreciseError {
    #[error("working precision {bits} outside [{MIN_PRECISION}, {MAX_PRECISION}]")]
    PrecisionOutOfRange { bits: u32 },
    #[error("undecided at {bits} bits: {context}")]
    Precision { bits: u32, context: String },
    #[error("division by an enclosure containing zero")]
    DivisionByZero,
    #[error("base enclosure must lie strictly inside (1, 2)")]
    BaseOutOfRange,
    #[error("invalid bracket: {0}")]
    Bracket(String),
    #[error("cannot parse number `{0}`")]
    Parse(String),
}

/// Bounds on the working precision used by adaptive computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub start: u32,
    pub cap: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { start: DEFAULT_PRECISION, cap: MAX_PRECISION }
    }
}

impl PrecisionPolicy {
    pub fn with_cap(cap: u32) -> Self {
        PrecisionPolicy { start: DEFAULT_PRECISION.min(cap), cap }
    }

    /// The sequence of precisions tried: `start, 2·start, …` up to `cap`.
    pub fn ladder(&self) -> impl Iterator<Item = u32> {
        let cap = self.cap.clamp(MIN_PRECISION, MAX_PRECISION);
        let mut next = Some(self.start.clamp(MIN_PRECISION, cap));
        std::iter::from_fn(move || {
            let current = next?;
            next = (current < cap).then(|| (current * 2).min(cap));
            Some(current)
        })
    }
}

/// Compares two quantities, recomputing them at doubling precision until
/// the comparison is decided or the policy's cap is reached.
pub fn compare_adaptive<F>(policy: PrecisionPolicy, what: &str, compute: F) -> Result<RealOrdering, PreciseError>
where
    F: Fn() -> Result<(PreciseReal, PreciseReal), PreciseError>,
{
    let mut last = 0;
    for bits in policy.ladder() {
        let (a, b) = scoped(bits, &compute)?;
        let ord = a.compare(&b);
        if ord != RealOrdering::Undecided {
            return Ok(ord);
        }
        last = bits;
    }
    Err(PreciseError::Precision { bits: last, context: what.to_string() })
}

/// Value `Σ d_i q^{-i}` of `seq` at base `q`, in closed form:
/// `value(preamble) + q^{-|preamble|} · value(cycle) / (1 - q^{-|cycle|})`.
pub fn eval_at(seq: &EventuallyPeriodicSeq, q: &PreciseReal) -> Result<PreciseReal, PreciseError> {
    if q.lo() <= &Dyadic::one() || q.hi() >= &Dyadic::from_int(2) {
        return Err(PreciseError::BaseOutOfRange);
    }
    let u = q.recip()?;
    Ok(eval_with_inverse_base(seq, &u))
}

/// Same as [`eval_at`] but takes `u = 1/q` and skips the base check; any
/// `u` in `(0, 1)` is accepted.
pub(crate) fn eval_with_inverse_base(seq: &EventuallyPeriodicSeq, u: &PreciseReal) -> PreciseReal {
    let pre = seq.preamble();
    let cycle = seq.cycle();
    let word_value = |digits: &[u8]| {
        let mut acc = PreciseReal::zero();
        for &d in digits.iter().rev() {
            if d == 1 {
                acc = &acc + &PreciseReal::one();
            }
            acc = &acc * u;
        }
        acc
    };
    let head = word_value(pre.digits());
    if seq.is_finite_support() {
        return head;
    }
    let cycle_value = word_value(cycle.digits());
    let denom = &PreciseReal::one() - &u.powi(cycle.len() as u32);
    let tail = cycle_value.checked_div(&denom).expect("u < 1 keeps the denominator positive");
    &head + &(&u.powi(pre.len() as u32) * &tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn seq(s: &str) -> EventuallyPeriodicSeq {
        s.parse().unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn golden() -> PreciseReal {
        let root = bisect_root(
            |q| Ok(&(q * q) - &(q + &PreciseReal::one())),
            &Dyadic::new(3.into(), -1),
            &Dyadic::new(7.into(), -2),
            &Dyadic::pow2(-100),
            4096,
        )
        .unwrap();
        root.enclosure()
    }

    #[test]
    fn closed_form_examples() {
        let phi = golden();
        let v = eval_at(&seq("(10)^inf"), &phi).unwrap();
        assert!(v.contains(&Dyadic::one()));
        assert!(v.width() < Dyadic::pow2(-90));
        let zero = eval_at(&seq("(0)^inf"), &PreciseReal::from_rational(&rat(3, 2))).unwrap();
        assert_eq!(zero, PreciseReal::zero());
        let two = eval_at(&seq("(1)^inf"), &PreciseReal::from_rational(&rat(3, 2))).unwrap();
        assert!(two.contains(&Dyadic::from_int(2)));
    }

    #[test]
    fn base_outside_unit_interval_rejected() {
        let one = PreciseReal::one();
        assert_eq!(eval_at(&seq("(1)^inf"), &one), Err(PreciseError::BaseOutOfRange));
        let two = PreciseReal::from_int(2);
        assert_eq!(eval_at(&seq("(1)^inf"), &two), Err(PreciseError::BaseOutOfRange));
    }

    #[test]
    fn adaptive_comparisons() {
        let phi_compare = |x: BigRational| {
            compare_adaptive(PrecisionPolicy::default(), "test", move || {
                let q = golden();
                Ok((eval_at(&seq("(10)^inf"), &q)?, PreciseReal::from_rational(&x)))
            })
        };
        // Equal quantities never separate.
        assert!(matches!(phi_compare(rat(1, 1)), Err(PreciseError::Precision { .. })));
        let big = BigInt::from(10).pow(30);
        let close = BigRational::new(&big + 1, big.clone());
        assert_eq!(phi_compare(close).unwrap(), RealOrdering::Less);

        let tiny = BigRational::new(1.into(), big.clone());
        let x = rat(7, 3);
        let ord = compare_adaptive(PrecisionPolicy::with_cap(256), "sep", || {
            Ok((PreciseReal::from_rational(&x), PreciseReal::from_rational(&(&x + &tiny))))
        })
        .unwrap();
        assert_eq!(ord, RealOrdering::Less);
    }

    #[test]
    fn policy_ladder_doubles_to_cap() {
        let steps: Vec<u32> = PrecisionPolicy { start: 128, cap: 1000 }.ladder().collect();
        assert_eq!(steps, vec![128, 256, 512, 1000]);
        let single: Vec<u32> = PrecisionPolicy::with_cap(64).ladder().collect();
        assert_eq!(single, vec![64]);
    }
}
