use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::algebraic::QPoly;
use super::{kl_enclosure, level_base, level_enclosure, BasesError};
use crate::precise::{
    eval_at, format_exact, parse_exact, scoped, PreciseError, PreciseReal, PrecisionPolicy,
};
use crate::words::EventuallyPeriodicSeq;

/// Highest level whose exact comparisons start after a short enclosure
/// ladder.
const EXACT_FIRST_LEVEL: usize = 3;

/// Base at which a symbolic series value is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesBase {
    /// `q_n`, `n ≥ 1`.
    Level(usize),
    Kl,
}

impl SeriesBase {
    /// Enclosure at the current working precision.
    pub fn enclosure(&self) -> Result<PreciseReal, BasesError> {
        match self {
            SeriesBase::Level(n) => level_enclosure(*n),
            SeriesBase::Kl => kl_enclosure(),
        }
    }
}

impl fmt::Display for SeriesBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesBase::Level(n) => write!(f, "q_{n}"),
            SeriesBase::Kl => write!(f, "q_KL"),
        }
    }
}

/// A positive real given exactly enough to decide the comparisons the
/// solver needs.
///
/// Decimal inputs are `Rational`. Thresholds such as `z_2` are `Series`:
/// the value of a digit sequence at a ladder base, compared exactly against
/// other values at the same base. `Interval` is a fixed enclosure and only
/// ever compares by separation.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactReal {
    Rational(BigRational),
    Series { seq: EventuallyPeriodicSeq, base: SeriesBase },
    Interval(PreciseReal),
}

impl ExactReal {
    /// Parses a decimal or `p/q` fraction.
    pub fn parse(text: &str) -> Result<Self, PreciseError> {
        parse_exact(text).map(ExactReal::Rational)
    }

    pub fn series(seq: EventuallyPeriodicSeq, base: SeriesBase) -> Self {
        ExactReal::Series { seq, base }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactReal::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Enclosure at the current working precision.
    pub fn enclosure(&self) -> Result<PreciseReal, BasesError> {
        match self {
            ExactReal::Rational(r) => Ok(PreciseReal::from_rational(r)),
            ExactReal::Series { seq, base } => Ok(eval_at(seq, &base.enclosure()?)?),
            ExactReal::Interval(p) => Ok(p.clone()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactReal::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            _ => self.enclosure().map(|p| p.to_f64()).unwrap_or(f64::NAN),
        }
    }

    /// Certified comparison; `Err` when the two values cannot be separated
    /// within `policy.cap` bits and no exact argument applies.
    pub fn compare(&self, other: &ExactReal, policy: PrecisionPolicy) -> Result<Ordering, BasesError> {
        use ExactReal::*;
        match (self, other) {
            (Rational(a), Rational(b)) => return Ok(a.cmp(b)),
            (Series { seq: s, base: b }, Series { seq: t, base: c }) if b == c && s == t => {
                return Ok(Ordering::Equal)
            }
            _ => {}
        }
        let exact_base = match (self.level(), other.level()) {
            (Some(Some(m)), Some(None)) | (Some(None), Some(Some(m))) => Some(m),
            (Some(Some(m)), Some(Some(k))) if m == k => Some(m),
            _ => None,
        };
        // Separated values are settled by enclosures; exact arithmetic is
        // kept for the hard cases. The level polynomial has degree about
        // 2^m, so from level 4 on the enclosures get the full budget first.
        let quick_cap = match exact_base {
            Some(m) if m <= EXACT_FIRST_LEVEL => policy.cap.min(512),
            _ => policy.cap,
        };
        for bits in (PrecisionPolicy { start: policy.start, cap: quick_cap }).ladder() {
            let (a, b) = scoped(bits, || Ok::<_, BasesError>((self.enclosure()?, other.enclosure()?)))?;
            if let Some(ord) = a.compare(&b).decided() {
                if ord != Ordering::Equal {
                    return Ok(ord);
                }
            }
        }
        if let Some(m) = exact_base {
            let (n1, d1) = self.fraction().expect("exact operand");
            let (n2, d2) = other.fraction().expect("exact operand");
            let diff = n1.mul(&d2).sub(&n2.mul(&d1));
            return Ok(level_base(m)?.sign_of(&diff, policy)?);
        }
        Err(PreciseError::Precision {
            bits: quick_cap,
            context: format!("comparing {self} with {other}"),
        }
        .into())
    }

    /// Compares with the value of `seq` at `base`.
    pub fn compare_series(
        &self,
        seq: &EventuallyPeriodicSeq,
        base: SeriesBase,
        policy: PrecisionPolicy,
    ) -> Result<Ordering, BasesError> {
        self.compare(&ExactReal::series(seq.clone(), base), policy)
    }

    /// `Some(Some(n))` for a series at `q_n`, `Some(None)` for a rational,
    /// `None` otherwise.
    fn level(&self) -> Option<Option<usize>> {
        match self {
            ExactReal::Rational(_) => Some(None),
            ExactReal::Series { base: SeriesBase::Level(n), .. } => Some(Some(*n)),
            _ => None,
        }
    }

    /// Value as `N(q) / D(q)` with `D(q) > 0` for `q > 1`.
    fn fraction(&self) -> Option<(QPoly, QPoly)> {
        match self {
            ExactReal::Rational(r) => Some((QPoly::constant(r.clone()), QPoly::constant(BigRational::one()))),
            ExactReal::Series { seq, .. } => Some(series_fraction(seq)),
            ExactReal::Interval(_) => None,
        }
    }
}

/// `(N, D)` with `(seq)_q = N(q) / D(q)` and `D(q) = q^L (q^c - 1)`, where
/// `L` and `c` are the preamble and cycle lengths.
pub fn series_fraction(seq: &EventuallyPeriodicSeq) -> (QPoly, QPoly) {
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    // Σ w_i q^{|w| - i}
    let word_poly = |digits: &[u8]| {
        let len = digits.len();
        let mut coeffs = vec![BigRational::zero(); len.max(1)];
        for (i, &d) in digits.iter().enumerate() {
            coeffs[len - 1 - i] = int(d as i64);
        }
        QPoly::new(coeffs)
    };
    let monomial = |k: usize| {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = BigRational::one();
        QPoly::new(coeffs)
    };
    let pre = seq.preamble().digits();
    let cyc = seq.cycle().digits();
    let qc_minus_one = monomial(cyc.len()).sub(&QPoly::constant(BigRational::one()));
    let numerator = qc_minus_one.mul(&word_poly(pre)).add(&word_poly(cyc));
    let denominator = monomial(pre.len()).mul(&qc_minus_one);
    (numerator, denominator)
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactReal::Rational(r) => f.write_str(&render_rational(r)),
            ExactReal::Series { seq, base } => write!(f, "({seq})_{base}"),
            ExactReal::Interval(p) => write!(f, "{p}"),
        }
    }
}

/// Terminating decimals print as decimals, anything else as `p/q`.
pub fn render_rational(r: &BigRational) -> String {
    let mut d = r.denom().clone();
    let mut digits = 0usize;
    for p in [2u32, 5] {
        let p = BigInt::from(p);
        let mut count = 0usize;
        while d.is_multiple_of(&p) {
            d /= &p;
            count += 1;
        }
        digits = digits.max(count);
    }
    if d.is_one() {
        format_exact(r, digits)
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl From<BigRational> for ExactReal {
    fn from(r: BigRational) -> Self {
        ExactReal::Rational(r)
    }
}
