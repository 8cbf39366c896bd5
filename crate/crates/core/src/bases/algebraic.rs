//! Exact sign decisions at algebraic bases.
//!
//! A base such as `q_n` is the unique root of an integer polynomial inside
//! an isolating bracket. Deciding whether a polynomial expression in `q`
//! vanishes at the base (the ties that show up in greedy and quasi-greedy
//! digit selection) cannot be done with enclosures alone, so it is done
//! here with exact polynomial remainders and gcds over the rationals.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::precise::{
    bisect_root, scoped, Dyadic, PreciseError, PreciseReal, PrecisionPolicy, RealOrdering,
};

/// Polynomial with rational coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq)]
pub struct QPoly(Vec<BigRational>);

impl QPoly {
    pub fn new(mut coefficients: Vec<BigRational>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        QPoly(coefficients)
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(coefficients: I) -> Self {
        Self::new(coefficients.into_iter().map(|c| BigRational::from_integer(c.into())).collect())
    }

    pub fn constant(value: BigRational) -> Self {
        Self::new(vec![value])
    }

    pub fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn leading(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    /// `x · self`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = Vec::with_capacity(self.0.len() + 1);
        c.push(BigRational::zero());
        c.extend(self.0.iter().cloned());
        QPoly(c)
    }

    pub fn add(&self, other: &QPoly) -> Self {
        let n = self.0.len().max(other.0.len());
        let zero = BigRational::zero();
        Self::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&zero) + other.0.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &QPoly) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self::new(self.0.iter().map(|c| c * factor).collect())
    }

    pub fn mul(&self, other: &QPoly) -> Self {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().clone();
        let mut rem = self.0.clone();
        let mut quot = vec![BigRational::zero(); self.0.len().saturating_sub(d)];
        while rem.len() > d && !rem.is_empty() {
            let top = rem.len() - 1;
            let factor = &rem[top] / &lead;
            if !factor.is_zero() {
                for (k, c) in divisor.0.iter().enumerate() {
                    let idx = top - d + k;
                    rem[idx] -= &factor * c;
                }
                quot[top - d] = factor;
            }
            rem.pop();
        }
        (QPoly::new(quot), QPoly::new(rem))
    }

    pub fn rem(&self, divisor: &QPoly) -> QPoly {
        self.div_rem(divisor).1
    }

    fn monic(&self) -> QPoly {
        let lead = self.leading().clone();
        self.scale(&(BigRational::one() / lead))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.monic() };
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Positive multiple with integer coefficients.
    pub fn integer_multiple(&self) -> Vec<BigInt> {
        let lcm = self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        self.0.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect()
    }

    /// Enclosure of the value on an enclosure of the argument.
    pub fn eval(&self, x: &PreciseReal) -> PreciseReal {
        let coeffs = self.integer_multiple();
        eval_integer_poly(&coeffs, x)
    }

    /// Exact value at a rational point.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> =
            self.0.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| format!("({c})x^{i}")).collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

fn eval_integer_poly(coeffs: &[BigInt], x: &PreciseReal) -> PreciseReal {
    let mut acc = PreciseReal::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + &PreciseReal::exact(Dyadic::new(c.clone(), 0));
    }
    acc
}

fn eval_integer_poly_exact(coeffs: &[BigInt], x: &Dyadic) -> Dyadic {
    let mut acc = Dyadic::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + &Dyadic::new(c.clone(), 0);
    }
    acc
}

/// A real algebraic number given as the unique root of `poly` in a bracket.
pub struct AlgebraicBase {
    poly: QPoly,
    integer_poly: Vec<BigInt>,
    bracket: Mutex<(Dyadic, Dyadic)>,
    label: String,
}

impl Clone for AlgebraicBase {
    fn clone(&self) -> Self {
        AlgebraicBase {
            poly: self.poly.clone(),
            integer_poly: self.integer_poly.clone(),
            bracket: Mutex::new(self.bracket.lock().unwrap().clone()),
            label: self.label.clone(),
        }
    }
}

impl fmt::Debug for AlgebraicBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraicBase({}, root of {:?})", self.label, self.poly)
    }
}

impl AlgebraicBase {
    /// Checks that `poly` changes sign strictly on `[lo, hi]`. The caller
    /// guarantees the root there is unique and simple.
    pub fn new(poly: QPoly, lo: Dyadic, hi: Dyadic, label: impl Into<String>) -> Result<Self, PreciseError> {
        let integer_poly = poly.integer_multiple();
        let s_lo = eval_integer_poly_exact(&integer_poly, &lo).signum();
        let s_hi = eval_integer_poly_exact(&integer_poly, &hi).signum();
        if s_lo == Ordering::Equal || s_hi == Ordering::Equal || s_lo == s_hi || lo >= hi {
            return Err(PreciseError::Bracket("polynomial does not change sign on the bracket".into()));
        }
        Ok(AlgebraicBase { poly, integer_poly, bracket: Mutex::new((lo, hi)), label: label.into() })
    }

    /// The golden ratio as the root of `x^2 - x - 1` in `[3/2, 2]`.
    pub fn golden_ratio() -> Self {
        Self::new(QPoly::from_integers([-1, -1, 1]), Dyadic::new(3.into(), -1), Dyadic::from_int(2), "q_G")
            .expect("golden ratio bracket")
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Enclosure of width at most `2^-bits`.
    pub fn enclosure(&self, bits: u32) -> PreciseReal {
        let tol = Dyadic::pow2(-(bits as i64));
        let mut guard = self.bracket.lock().unwrap();
        let (lo, hi) = guard.clone();
        if &hi - &lo > tol {
            let poly = &self.integer_poly;
            // Exact evaluation at dyadic points: signs are always decided.
            let root = bisect_root(
                |x| Ok(PreciseReal::exact(eval_integer_poly_exact(poly, x.lo()))),
                &lo,
                &hi,
                &tol,
                crate::precise::MAX_PRECISION,
            )
            .expect("exact evaluation never stalls");
            *guard = (root.lo.clone(), root.hi.clone());
        }
        let (lo, hi) = guard.clone();
        PreciseReal::from_bounds(lo, hi)
    }

    /// Exact sign of `p(q)` at this base.
    pub fn sign_of(&self, p: &QPoly, policy: PrecisionPolicy) -> Result<Ordering, PreciseError> {
        let r = p.rem(&self.poly);
        if r.is_zero() {
            return Ok(Ordering::Equal);
        }
        let cheap = PrecisionPolicy { start: policy.start, cap: policy.cap.min(512) };
        if let Some(ord) = self.sign_by_enclosure(&r, cheap) {
            return Ok(ord);
        }
        // `r(q)` may vanish only if `r` shares the factor of `poly` that has
        // `q` as a root.
        let g = r.gcd(&self.poly);
        if g.degree().unwrap_or(0) > 0 {
            let cofactor = self.poly.div_rem(&g).0;
            if self.sign_by_enclosure(&cofactor, policy).is_some() {
                return Ok(Ordering::Equal);
            }
        }
        self.sign_by_enclosure(&r, policy).ok_or_else(|| PreciseError::Precision {
            bits: policy.cap,
            context: format!("sign of polynomial at {}", self.label),
        })
    }

    fn sign_by_enclosure(&self, p: &QPoly, policy: PrecisionPolicy) -> Option<Ordering> {
        for bits in policy.ladder() {
            let q = self.enclosure(bits + 16);
            let value = scoped(bits, || p.eval(&q));
            match value.sign() {
                RealOrdering::Undecided => continue,
                RealOrdering::Equal => return Some(Ordering::Equal),
                ord => return ord.decided(),
            }
        }
        None
    }
}

/// Sign of a rational, as an `Ordering` against zero.
pub(crate) fn rational_sign(x: &BigRational) -> Ordering {
    if x.is_positive() {
        Ordering::Greater
    } else if x.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}
