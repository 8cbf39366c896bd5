use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use super::dyadic::{Dyadic, Round};
use super::PreciseError;

/// Smallest working precision accepted by [`with_precision`].
pub const MIN_PRECISION: u32 = 64;
/// Largest working precision accepted by [`with_precision`].
pub const MAX_PRECISION: u32 = 4096;
/// Working precision used when nothing else was requested.
pub const DEFAULT_PRECISION: u32 = 128;

thread_local! {
    static WORKING_PRECISION: Cell<u32> = const { Cell::new(DEFAULT_PRECISION) };
}

/// Working precision (significant bits) of the current thread.
pub fn working_precision() -> u32 {
    WORKING_PRECISION.with(Cell::get)
}

/// Runs `computation` with the given working precision on this thread and
/// restores the previous precision afterwards.
pub fn with_precision<R>(bits: u32, computation: impl FnOnce() -> R) -> Result<R, PreciseError> {
    if !(MIN_PRECISION..=MAX_PRECISION).contains(&bits) {
        return Err(PreciseError::PrecisionOutOfRange { bits });
    }
    Ok(scoped(bits, computation))
}

pub(crate) fn scoped<R>(bits: u32, computation: impl FnOnce() -> R) -> R {
    struct Restore(u32);
    impl Drop for Restore {
        fn drop(&mut self) {
            WORKING_PRECISION.with(|p| p.set(self.0));
        }
    }
    let _restore = Restore(WORKING_PRECISION.with(|p| p.replace(bits)));
    computation()
}

/// Outcome of comparing two enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealOrdering {
    Less,
    /// Both operands are the same exact point.
    Equal,
    Greater,
    /// The enclosures overlap without being identical points.
    Undecided,
}

impl RealOrdering {
    pub fn decided(self) -> Option<Ordering> {
        match self {
            RealOrdering::Less => Some(Ordering::Less),
            RealOrdering::Equal => Some(Ordering::Equal),
            RealOrdering::Greater => Some(Ordering::Greater),
            RealOrdering::Undecided => None,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            RealOrdering::Less => RealOrdering::Greater,
            RealOrdering::Greater => RealOrdering::Less,
            other => other,
        }
    }
}

impl From<Ordering> for RealOrdering {
    fn from(ord: Ordering) -> Self {
        match ord {
            Ordering::Less => RealOrdering::Less,
            Ordering::Equal => RealOrdering::Equal,
            Ordering::Greater => RealOrdering::Greater,
        }
    }
}

/// A real number known to lie in the closed interval `[lo, hi]`.
///
/// Endpoints are dyadic and every operation rounds outward to the current
/// working precision, so results always enclose the exact value. The
/// midpoint/radius view is available through [`PreciseReal::midpoint`] and
/// [`PreciseReal::radius`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PreciseReal {
    lo: Dyadic,
    hi: Dyadic,
}

impl PreciseReal {
    pub fn from_bounds(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "empty enclosure");
        PreciseReal { lo, hi }
    }

    pub fn exact(value: Dyadic) -> Self {
        PreciseReal { lo: value.clone(), hi: value }
    }

    pub fn from_int(value: i64) -> Self {
        Self::exact(Dyadic::from_int(value))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// Outward-rounded enclosure of a rational at the working precision.
    pub fn from_rational(value: &BigRational) -> Self {
        let bits = working_precision();
        PreciseReal {
            lo: Dyadic::from_rational(value, bits, Round::Floor),
            hi: Dyadic::from_rational(value, bits, Round::Ceil),
        }
    }

    /// Midpoint-radius constructor.
    pub fn from_ball(midpoint: &Dyadic, radius: &Dyadic) -> Self {
        let radius = radius.abs();
        PreciseReal { lo: midpoint - &radius, hi: midpoint + &radius }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn midpoint(&self) -> Dyadic {
        Dyadic::midpoint(&self.lo, &self.hi)
    }

    pub fn radius(&self) -> Dyadic {
        let w = self.width();
        Dyadic::new(w.mantissa().clone(), w.exponent() - 1)
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    pub fn contains(&self, value: &Dyadic) -> bool {
        &self.lo <= value && value <= &self.hi
    }

    pub fn contains_rational(&self, value: &BigRational) -> bool {
        &self.lo.to_rational() <= value && value <= &self.hi.to_rational()
    }

    /// True when `other` lies inside `self`.
    pub fn encloses(&self, other: &PreciseReal) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &PreciseReal) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Intersection, or `None` when the enclosures are disjoint.
    pub fn intersect(&self, other: &PreciseReal) -> Option<PreciseReal> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then_some(PreciseReal { lo, hi })
    }

    /// Smallest enclosure containing both.
    pub fn hull(&self, other: &PreciseReal) -> PreciseReal {
        PreciseReal {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn compare(&self, other: &PreciseReal) -> RealOrdering {
        if self.hi < other.lo {
            RealOrdering::Less
        } else if self.lo > other.hi {
            RealOrdering::Greater
        } else if self.is_exact() && other.is_exact() && self.lo == other.lo {
            RealOrdering::Equal
        } else {
            RealOrdering::Undecided
        }
    }

    pub fn sign(&self) -> RealOrdering {
        self.compare(&PreciseReal::zero())
    }

    fn rounded(lo: Dyadic, hi: Dyadic) -> Self {
        let bits = working_precision();
        PreciseReal { lo: lo.round(bits, Round::Floor), hi: hi.round(bits, Round::Ceil) }
    }

    /// Reciprocal; fails when the enclosure touches zero.
    pub fn recip(&self) -> Result<PreciseReal, PreciseError> {
        let one = Dyadic::one();
        if self.lo.is_positive() || self.hi.is_negative() {
            let bits = working_precision();
            Ok(PreciseReal {
                lo: Dyadic::div_round(&one, &self.hi, bits, Round::Floor),
                hi: Dyadic::div_round(&one, &self.lo, bits, Round::Ceil),
            })
        } else {
            Err(PreciseError::DivisionByZero)
        }
    }

    pub fn checked_div(&self, rhs: &PreciseReal) -> Result<PreciseReal, PreciseError> {
        if rhs.is_exact() && (rhs.lo.is_positive() || rhs.lo.is_negative()) {
            // Directed division by a point avoids the extra reciprocal rounding.
            let bits = working_precision();
            let (a, b) = if rhs.lo.is_positive() {
                (&self.lo, &self.hi)
            } else {
                (&self.hi, &self.lo)
            };
            return Ok(PreciseReal {
                lo: Dyadic::div_round(a, &rhs.lo, bits, Round::Floor),
                hi: Dyadic::div_round(b, &rhs.lo, bits, Round::Ceil),
            });
        }
        Ok(self * &rhs.recip()?)
    }

    /// `self^exponent` by repeated squaring.
    pub fn powi(&self, exponent: u32) -> PreciseReal {
        let mut result = PreciseReal::one();
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }
}

impl Add for &PreciseReal {
    type Output = PreciseReal;

    fn add(self, rhs: &PreciseReal) -> PreciseReal {
        PreciseReal::rounded(&self.lo + &rhs.lo, &self.hi + &rhs.hi)
    }
}

impl Sub for &PreciseReal {
    type Output = PreciseReal;

    fn sub(self, rhs: &PreciseReal) -> PreciseReal {
        PreciseReal::rounded(&self.lo - &rhs.hi, &self.hi - &rhs.lo)
    }
}

impl Mul for &PreciseReal {
    type Output = PreciseReal;

    fn mul(self, rhs: &PreciseReal) -> PreciseReal {
        if !self.lo.is_negative() && !rhs.lo.is_negative() {
            return PreciseReal::rounded(&self.lo * &rhs.lo, &self.hi * &rhs.hi);
        }
        let products = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        PreciseReal::rounded(lo, hi)
    }
}

impl Neg for &PreciseReal {
    type Output = PreciseReal;

    fn neg(self) -> PreciseReal {
        PreciseReal { lo: -&self.hi, hi: -&self.lo }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for PreciseReal {
            type Output = PreciseReal;
            fn $method(self, rhs: PreciseReal) -> PreciseReal {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&PreciseReal> for PreciseReal {
            type Output = PreciseReal;
            fn $method(self, rhs: &PreciseReal) -> PreciseReal {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl fmt::Debug for PreciseReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Display for PreciseReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::decimal::format_enclosure(self))
    }
}
