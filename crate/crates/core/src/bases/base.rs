use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use super::algebraic::{rational_sign, AlgebraicBase, QPoly};
use super::{level_base, BasesError};
use crate::precise::{Dyadic, PreciseError, PreciseReal, PrecisionPolicy, RealOrdering};

/// A base `q ∈ (1, 2)` in one of three representations.
///
/// Rational and algebraic bases support exact digit decisions, so ties such
/// as `q·r = 1` are detected rather than left undecided. An enclosure base
/// is a fixed interval; decisions on it may come back undecided.
#[derive(Clone)]
pub enum Base {
    Rational(BigRational),
    Algebraic(Arc<AlgebraicBase>),
    Enclosure(PreciseReal),
}

/// A quantity `a(q)` built from rationals by the operations below.
#[derive(Clone, Debug)]
pub(crate) enum Elem {
    Rat(BigRational),
    Poly(QPoly),
    Ball(PreciseReal),
}

impl fmt::Debug for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Rational(r) => write!(f, "Base::Rational({r})"),
            Base::Algebraic(a) => write!(f, "Base::Algebraic({})", a.label()),
            Base::Enclosure(p) => write!(f, "Base::Enclosure({p:?})"),
        }
    }
}

impl Base {
    /// The level base `q_n`, with exact arithmetic.
    pub fn level(n: usize) -> Result<Base, BasesError> {
        Ok(Base::Algebraic(level_base(n)?))
    }

    pub fn golden_ratio() -> Base {
        Base::Algebraic(Arc::new(AlgebraicBase::golden_ratio()))
    }

    /// Enclosure of `q`; at least `bits` accurate for exact representations.
    pub fn enclosure_at(&self, bits: u32) -> PreciseReal {
        match self {
            Base::Rational(r) => crate::precise::scoped(bits, || PreciseReal::from_rational(r)),
            Base::Algebraic(a) => a.enclosure(bits),
            Base::Enclosure(p) => p.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Base::Enclosure(_))
    }

    /// Checks `1 < q < 2`.
    pub fn check_range(&self) -> Result<(), BasesError> {
        let inside = match self {
            Base::Rational(r) => *r > BigRational::one() && *r < BigRational::from_integer(2.into()),
            _ => {
                let q = self.enclosure_at(64);
                q.lo() > &Dyadic::one() && q.hi() < &Dyadic::from_int(2)
            }
        };
        if inside {
            Ok(())
        } else {
            Err(BasesError::BaseOutOfRange)
        }
    }

    pub(crate) fn elem(&self, x: &BigRational) -> Elem {
        match self {
            Base::Enclosure(_) => Elem::Ball(PreciseReal::from_rational(x)),
            _ => Elem::Rat(x.clone()),
        }
    }

    fn q_ball(&self) -> PreciseReal {
        self.enclosure_at(crate::precise::working_precision() + 16)
    }

    /// `q · a`.
    pub(crate) fn mul_q(&self, a: &Elem) -> Elem {
        match (self, a) {
            (Base::Rational(q), Elem::Rat(r)) => Elem::Rat(q * r),
            (Base::Algebraic(base), Elem::Rat(r)) => {
                Elem::Poly(QPoly::constant(r.clone()).shift().rem(base.poly()))
            }
            (Base::Algebraic(base), Elem::Poly(p)) => Elem::Poly(p.shift().rem(base.poly())),
            (_, Elem::Ball(b)) => Elem::Ball(b * &self.q_ball()),
            (_, Elem::Rat(r)) => Elem::Ball(&PreciseReal::from_rational(r) * &self.q_ball()),
            (_, Elem::Poly(p)) => Elem::Ball(&p.eval(&self.q_ball()) * &self.q_ball()),
        }
    }

    /// `a - b`.
    pub(crate) fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x - y),
            (Elem::Ball(x), Elem::Ball(y)) => Elem::Ball(x - y),
            (Elem::Ball(x), other) => Elem::Ball(x - &self.to_ball(other)),
            (other, Elem::Ball(y)) => Elem::Ball(&self.to_ball(other) - y),
            (x, y) => Elem::Poly(as_poly(x).sub(&as_poly(y))),
        }
    }

    pub(crate) fn sub_rational(&self, a: &Elem, k: &BigRational) -> Elem {
        self.sub(a, &Elem::Rat(k.clone()))
    }

    fn to_ball(&self, a: &Elem) -> PreciseReal {
        match a {
            Elem::Rat(r) => PreciseReal::from_rational(r),
            Elem::Poly(p) => p.eval(&self.q_ball()),
            Elem::Ball(b) => b.clone(),
        }
    }

    /// Sign of `a`. Only enclosure bases can answer `Undecided`.
    pub(crate) fn sign(&self, a: &Elem, policy: PrecisionPolicy) -> Result<RealOrdering, PreciseError> {
        Ok(match a {
            Elem::Rat(r) => rational_sign(r).into(),
            Elem::Poly(p) => match self {
                Base::Algebraic(base) => base.sign_of(p, policy)?.into(),
                _ => self.to_ball(a).sign(),
            },
            Elem::Ball(b) => b.sign(),
        })
    }
}

fn as_poly(a: &Elem) -> QPoly {
    match a {
        Elem::Rat(r) => QPoly::constant(r.clone()),
        Elem::Poly(p) => p.clone(),
        Elem::Ball(_) => unreachable!("balls are handled before polynomial arithmetic"),
    }
}
