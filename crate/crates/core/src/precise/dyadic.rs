use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for inexact operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Floor,
    Ceil,
}

/// An exact binary fraction `mantissa · 2^exponent`.
///
/// Kept normalized: the mantissa is odd unless it is zero, in which case the
/// exponent is zero. Normalization makes `==` structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz as usize;
            self.exponent += tz as i64;
        }
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: 0 }
    }

    pub fn from_int(value: i64) -> Self {
        Dyadic::new(BigInt::from(value), 0)
    }

    /// `2^exponent`.
    pub fn pow2(exponent: i64) -> Self {
        Dyadic { mantissa: BigInt::one(), exponent }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// Significant bits of the mantissa.
    pub fn precision_bits(&self) -> u64 {
        self.mantissa.bits()
    }

    /// Exponent of the leading bit, i.e. `floor(log2 |self|)`; `None` for zero.
    pub fn magnitude(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exponent + self.mantissa.bits() as i64 - 1)
        }
    }

    /// Rounds to at most `bits` significant bits in the given direction.
    pub fn round(&self, bits: u32, dir: Round) -> Self {
        let have = self.mantissa.bits();
        if have <= bits as u64 {
            return self.clone();
        }
        let shift = (have - bits as u64) as usize;
        let floor = &self.mantissa >> shift;
        let mantissa = match dir {
            Round::Floor => floor,
            Round::Ceil => {
                if (&floor << shift) == self.mantissa {
                    floor
                } else {
                    floor + 1
                }
            }
        };
        Dyadic::new(mantissa, self.exponent + shift as i64)
    }

    /// Rounds to an integer multiple of `2^exponent`.
    pub fn round_to_exponent(&self, exponent: i64, dir: Round) -> Self {
        if self.exponent >= exponent {
            return self.clone();
        }
        let shift = (exponent - self.exponent) as usize;
        let floor = &self.mantissa >> shift;
        let mantissa = match dir {
            Round::Floor => floor,
            Round::Ceil => {
                if (&floor << shift) == self.mantissa {
                    floor
                } else {
                    floor + 1
                }
            }
        };
        Dyadic::new(mantissa, exponent)
    }

    /// `numerator / denominator` rounded to `bits` significant bits.
    pub fn div_round(numerator: &Dyadic, denominator: &Dyadic, bits: u32, dir: Round) -> Self {
        assert!(!denominator.is_zero(), "division by zero");
        if numerator.is_zero() {
            return Dyadic::zero();
        }
        let (n, d) = (&numerator.mantissa, &denominator.mantissa);
        // Scale so the integer quotient carries `bits + 2` significant bits.
        let shift = bits as i64 + 2 + d.bits() as i64 - n.bits() as i64;
        let (n_scaled, d_scaled) = if shift >= 0 {
            (n << shift as usize, d.clone())
        } else {
            (n.clone(), d << (-shift) as usize)
        };
        let q = match dir {
            Round::Floor => n_scaled.div_floor(&d_scaled),
            Round::Ceil => Integer::div_ceil(&n_scaled, &d_scaled),
        };
        Dyadic::new(q, numerator.exponent - denominator.exponent - shift).round(bits, dir)
    }

    pub fn from_rational(value: &BigRational, bits: u32, dir: Round) -> Self {
        let num = Dyadic::new(value.numer().clone(), 0);
        let den = Dyadic::new(value.denom().clone(), 0);
        if den.mantissa.is_one() {
            return Dyadic::new(value.numer().clone(), -den.exponent).round(bits, dir);
        }
        Dyadic::div_round(&num, &den, bits, dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as usize)
        } else {
            BigRational::new(self.mantissa.clone(), BigInt::one() << (-self.exponent) as usize)
        }
    }

    /// Nearest `f64` (approximate; saturates for huge magnitudes).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        let shift = (bits - 60).max(0);
        let top = (&self.mantissa >> shift as usize).to_f64().unwrap_or(f64::NAN);
        let exp = (self.exponent + shift).clamp(-4000, 4000) as i32;
        top * 2f64.powi(exp / 2) * 2f64.powi(exp - exp / 2)
    }

    /// Exact midpoint of two dyadics.
    pub fn midpoint(a: &Dyadic, b: &Dyadic) -> Self {
        let sum = a + b;
        Dyadic::new(sum.mantissa, sum.exponent - 1)
    }

    pub fn signum(&self) -> Ordering {
        match self.mantissa.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn min(self, other: Dyadic) -> Dyadic {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Dyadic) -> Dyadic {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = &other.mantissa << (other.exponent - e) as usize;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = &rhs.mantissa << (rhs.exponent - e) as usize;
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        -&self
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{} (~{:e})", self.mantissa, self.exponent, self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rounding_brackets_the_exact_value() {
        let third = rat(1, 3);
        for bits in [8, 53, 200] {
            let lo = Dyadic::from_rational(&third, bits, Round::Floor);
            let hi = Dyadic::from_rational(&third, bits, Round::Ceil);
            assert!(lo.to_rational() < third && third < hi.to_rational());
            assert!(lo.precision_bits() <= bits as u64);
            let gap = &hi - &lo;
            assert!(gap.magnitude().unwrap() <= -(bits as i64) + 1);
        }
        let minus = rat(-7, 5);
        let lo = Dyadic::from_rational(&minus, 20, Round::Floor);
        let hi = Dyadic::from_rational(&minus, 20, Round::Ceil);
        assert!(lo.to_rational() < minus && minus < hi.to_rational());
    }

    #[test]
    fn exact_values_survive_rounding() {
        let x = Dyadic::from_rational(&rat(3, 8), 4, Round::Ceil);
        assert_eq!(x, Dyadic::new(3.into(), -3));
        assert_eq!(x.round(2, Round::Floor), x);
        assert_eq!(Dyadic::from_int(12), Dyadic::new(3.into(), 2));
    }

    #[test]
    fn negative_rounding_directions() {
        let x = Dyadic::new((-13).into(), 0);
        assert_eq!(x.round(2, Round::Floor), Dyadic::from_int(-16));
        assert_eq!(x.round(2, Round::Ceil), Dyadic::from_int(-12));
    }

    #[test]
    fn ordering_and_arithmetic() {
        let a = Dyadic::new(5.into(), -2);
        let b = Dyadic::new(3.into(), -1);
        assert!(a < b);
        assert_eq!(&a + &b, Dyadic::new(11.into(), -2));
        assert_eq!(&a * &b, Dyadic::new(15.into(), -3));
        assert_eq!(Dyadic::midpoint(&a, &b), Dyadic::new(11.into(), -3));
        assert!((a.to_f64() - 1.25).abs() < 1e-15);
    }
}
