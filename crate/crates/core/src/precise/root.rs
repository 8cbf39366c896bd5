use std::cmp::Ordering;
use std::fmt;

use super::dyadic::{Dyadic, Round};
use super::real::{scoped, working_precision, PreciseReal, RealOrdering, MAX_PRECISION};
use super::PreciseError;

/// A certified bracket `[lo, hi]` around the unique root of a monotone
/// function.
#[derive(Clone, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Dyadic,
    pub hi: Dyadic,
    /// Which equation this root solves, e.g. `x = (11(01)^inf)_q, x = 6/5`.
    pub label: String,
}

impl RootInterval {
    pub fn enclosure(&self) -> PreciseReal {
        PreciseReal::from_bounds(self.lo.clone(), self.hi.clone())
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Dyadic {
        Dyadic::midpoint(&self.lo, &self.hi)
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

impl fmt::Debug for RootInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootInterval({:?} for {})", self.enclosure(), self.label)
    }
}

/// Number of bits `b` with `2^-b <= tol`.
pub fn bits_for_tolerance(tol: &Dyadic) -> u32 {
    match tol.magnitude() {
        Some(m) if m < 0 => (-m) as u32,
        _ => 1,
    }
}

/// Isolates the root of a strictly monotone function on `[lo, hi]`.
///
/// The bracket is kept certified at every step: a point replaces an
/// endpoint only after the sign of `f` there has been decided by interval
/// evaluation. Steps are Illinois-modified regula falsi with a bisection
/// fallback whenever the bracket fails to halve, so the result is
/// deterministic for fixed inputs. When a sign cannot be decided the
/// working precision is doubled, up to `precision_cap`.
pub fn bisect_root<F>(
    f: F,
    lo: &Dyadic,
    hi: &Dyadic,
    tol: &Dyadic,
    precision_cap: u32,
) -> Result<RootInterval, PreciseError>
where
    F: Fn(&PreciseReal) -> Result<PreciseReal, PreciseError>,
{
    assert!(tol.is_positive(), "tolerance must be positive");
    if lo >= hi {
        return Err(PreciseError::Bracket("empty bracket".into()));
    }
    let cap = precision_cap.min(MAX_PRECISION);
    let tol_bits = bits_for_tolerance(tol);
    let mut bits = working_precision().max(tol_bits + 32).min(cap);

    // Sign of f at x, doubling the precision up to `limit`; None if still
    // undecided there.
    let probe = |x: &Dyadic, bits: &mut u32, limit: u32| -> Result<Option<(Ordering, Dyadic)>, PreciseError> {
        loop {
            let value = scoped(*bits, || f(&PreciseReal::exact(x.clone())))?;
            match value.sign() {
                RealOrdering::Undecided => {
                    if *bits >= limit {
                        return Ok(None);
                    }
                    *bits = (*bits * 2).min(limit);
                }
                ord => return Ok(Some((ord.decided().unwrap(), value.midpoint()))),
            }
        }
    };
    let undecided = |x: &Dyadic, bits: u32| PreciseError::Precision {
        bits,
        context: format!("sign of function at {:e} undecided", x.to_f64()),
    };
    let decided = |x: &Dyadic, bits: &mut u32| -> Result<(Ordering, Dyadic), PreciseError> {
        probe(x, bits, cap)?.ok_or_else(|| undecided(x, *bits))
    };

    let (sign_lo, mut f_lo) = decided(lo, &mut bits)?;
    let (sign_hi, mut f_hi) = decided(hi, &mut bits)?;
    let exact = |x: &Dyadic| RootInterval { lo: x.clone(), hi: x.clone(), label: String::new() };
    if sign_lo == Ordering::Equal {
        return Ok(exact(lo));
    }
    if sign_hi == Ordering::Equal {
        return Ok(exact(hi));
    }
    if sign_lo == sign_hi {
        return Err(PreciseError::Bracket(format!(
            "function has the same sign at {:e} and {:e}",
            lo.to_f64(),
            hi.to_f64()
        )));
    }

    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    // Grid for trial points: fine enough to resolve the tolerance.
    let grid = -(tol_bits as i64) - 8;
    let quarter_tol = Dyadic::pow2(-(tol_bits as i64) - 2);
    let mut kept_side: Option<bool> = None;
    let mut width_before = &hi - &lo;
    let mut steps_since_check = 0;
    let mut force_bisect = false;

    while &hi - &lo > *tol {
        let width = &hi - &lo;
        let mid = Dyadic::midpoint(&lo, &hi);
        let mut point = if force_bisect {
            mid.clone()
        } else {
            // lo - f_lo * (hi - lo) / (f_hi - f_lo)
            let denom = &f_hi - &f_lo;
            if denom.is_zero() {
                mid.clone()
            } else {
                let step = Dyadic::div_round(&(&f_lo * &width), &denom, bits, Round::Floor);
                (&lo - &step).round_to_exponent(grid, Round::Floor)
            }
        };
        if point <= lo || point >= hi {
            point = mid;
        }
        force_bisect = false;
        let current = bits;
        let Some((sign, value)) = probe(&point, &mut bits, current)? else {
            // The root is within rounding distance of `point` (possibly
            // exactly on it); bracket it at a quarter tolerance either side.
            let left = &point - &quarter_tol;
            let right = &point + &quarter_tol;
            let left_sign = if left <= lo { sign_lo } else { decided(&left, &mut bits)?.0 };
            let right_sign = if right >= hi { sign_hi } else { decided(&right, &mut bits)?.0 };
            if left_sign == Ordering::Equal {
                return Ok(exact(&left));
            }
            if right_sign == Ordering::Equal {
                return Ok(exact(&right));
            }
            if left_sign == right_sign {
                return Err(undecided(&point, bits));
            }
            return Ok(RootInterval { lo: left.max(lo), hi: right.min(hi), label: String::new() });
        };
        if sign == Ordering::Equal {
            return Ok(exact(&point));
        }
        if sign == sign_lo {
            lo = point;
            f_lo = value;
            if kept_side == Some(false) {
                f_hi = Dyadic::new(f_hi.mantissa().clone(), f_hi.exponent() - 1);
            }
            kept_side = Some(false);
        } else {
            hi = point;
            f_hi = value;
            if kept_side == Some(true) {
                f_lo = Dyadic::new(f_lo.mantissa().clone(), f_lo.exponent() - 1);
            }
            kept_side = Some(true);
        }
        steps_since_check += 1;
        if steps_since_check == 3 {
            let now = &hi - &lo;
            let halved_once = Dyadic::new(width_before.mantissa().clone(), width_before.exponent() - 1);
            if now > halved_once {
                force_bisect = true;
            }
            width_before = now;
            steps_since_check = 0;
        }
    }
    Ok(RootInterval { lo, hi, label: String::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn dec(s: &str) -> Dyadic {
        let r = super::super::decimal::parse_exact(s).unwrap();
        Dyadic::from_rational(&r, 200, Round::Floor)
    }

    #[test]
    fn golden_ratio_bracket() {
        let tol = Dyadic::pow2(-40);
        let root = bisect_root(
            |q| Ok(&(q * q) - &(q + &PreciseReal::one())),
            &dec("1.4"),
            &dec("1.8"),
            &tol,
            4096,
        )
        .unwrap();
        assert!(root.width() <= tol);
        // Exact sign check of q^2 - q - 1 at both endpoints.
        let p = |d: &Dyadic| {
            let r = d.to_rational();
            &r * &r - &r - BigRational::from_integer(BigInt::from(1))
        };
        assert!(p(&root.lo) < BigRational::from_integer(0.into()));
        assert!(p(&root.hi) > BigRational::from_integer(0.into()));
        assert!((root.to_f64() - 1.618033988749895).abs() < 1e-11);
    }

    #[test]
    fn rational_root() {
        let tol = Dyadic::pow2(-45);
        let root = bisect_root(
            |q| Ok(&(q - &PreciseReal::one()).recip()? - &PreciseReal::from_int(2)),
            &dec("1.2"),
            &dec("1.9"),
            &tol,
            4096,
        )
        .unwrap();
        assert!(root.enclosure().contains(&dec("1.5")));
    }

    #[test]
    fn rejects_bad_bracket() {
        let err = bisect_root(|q| Ok(q.clone()), &dec("1"), &dec("2"), &Dyadic::pow2(-10), 4096);
        assert!(matches!(err, Err(PreciseError::Bracket(_))));
    }

    #[test]
    fn root_on_a_grid_point() {
        // 1/(q-1) = 2 at q = 3/2, where 1/(q-1) is never exact.
        let tol = Dyadic::pow2(-40);
        let root = bisect_root(
            |q| Ok(&(q - &PreciseReal::one()).recip()? - &PreciseReal::from_int(2)),
            &Dyadic::new(9.into(), -3),
            &Dyadic::new(15.into(), -3),
            &tol,
            4096,
        )
        .unwrap();
        assert!(root.width() <= tol);
        assert!(root.enclosure().contains(&Dyadic::new(3.into(), -1)));
    }

    #[test]
    fn tiny_tolerance_converges_quickly() {
        let tol = Dyadic::pow2(-1000);
        let root = bisect_root(
            |q| Ok(&(q * q) - &PreciseReal::from_int(2)),
            &Dyadic::one(),
            &Dyadic::from_int(2),
            &tol,
            4096,
        )
        .unwrap();
        assert!(root.width() <= tol);
        let sq = |d: &Dyadic| d * d;
        assert!(sq(&root.lo) < Dyadic::from_int(2) && sq(&root.hi) > Dyadic::from_int(2));
    }
}
