//! Exact decimal/fraction parsing and certified decimal rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;
use super::real::PreciseReal;
use super::PreciseError;

/// Digits never printed past this many decimals.
pub const MAX_PRINTED_DECIMALS: usize = 40;

/// Parses `[+-]digits[.digits][(e|E)[+-]digits]` or `p/q` into an exact
/// rational.
pub fn parse_exact(text: &str) -> Result<BigRational, PreciseError> {
    let s = text.trim();
    let err = || PreciseError::Parse(text.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => {
            let exp_text = &body[i + 1..];
            let exp_digits = exp_text.strip_prefix(['+', '-']).unwrap_or(exp_text);
            if exp_digits.is_empty() || !exp_digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            (&body[..i], exp_text.parse::<i64>().map_err(|_| err())?)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !all_digits(int_part) || !all_digits(frac_part) {
        return Err(err());
    }
    if exponent.unsigned_abs() > 100_000 {
        return Err(err());
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| err())?;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Renders `value` with exactly `decimals` fractional digits, rounding
/// half to even.
pub fn format_rational(value: &BigRational, decimals: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), decimals);
    let scaled = value * BigRational::from_integer(scale.clone());
    let floor = scaled.floor();
    let frac = &scaled - &floor;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut n = floor.to_integer();
    if frac > half || (frac == half && n.is_odd()) {
        n += 1;
    }
    let negative = n.is_negative();
    let digits = n.abs().to_string();
    let padded = if digits.len() <= decimals {
        format!("{}{}", "0".repeat(decimals + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int_part, frac_part) = padded.split_at(padded.len() - decimals);
    let sign = if negative { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Largest number of decimals `d` with `10^-d > width`, capped at
/// [`MAX_PRINTED_DECIMALS`]; exact values get the cap.
pub fn certified_decimals(width: &Dyadic) -> usize {
    if width.is_zero() {
        return MAX_PRINTED_DECIMALS;
    }
    let w = width.to_rational();
    let mut decimals = 0usize;
    let mut unit = BigRational::one();
    let tenth = BigRational::new(BigInt::one(), BigInt::from(10));
    while decimals < MAX_PRINTED_DECIMALS {
        let next = &unit * &tenth;
        if next <= w {
            break;
        }
        unit = next;
        decimals += 1;
    }
    decimals
}

/// Midpoint of the enclosure printed with as many decimals as its width
/// certifies.
pub fn format_enclosure(value: &PreciseReal) -> String {
    let decimals = certified_decimals(&value.width());
    let text = format_rational(&value.midpoint().to_rational(), decimals);
    if value.is_exact() {
        trim_zeros(&text)
    } else {
        text
    }
}

fn trim_zeros(text: &str) -> String {
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text.to_string()
    }
}

/// Exact decimal rendering of a rational known to have a terminating
/// expansion with at most `decimals` digits; trailing zeros are trimmed.
pub fn format_exact(value: &BigRational, decimals: usize) -> String {
    trim_zeros(&format_rational(value, decimals))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_decimal_grammar() {
        assert_eq!(parse_exact("1.2").unwrap(), rat(6, 5));
        assert_eq!(parse_exact("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_exact("+3").unwrap(), rat(3, 1));
        assert_eq!(parse_exact("1e-12").unwrap(), BigRational::new(1.into(), BigInt::from(10).pow(12)));
        assert_eq!(parse_exact("2.5E+2").unwrap(), rat(250, 1));
        assert_eq!(parse_exact(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_exact("7/3").unwrap(), rat(7, 3));
        assert_eq!(parse_exact(" 10/4 ").unwrap(), rat(5, 2));
        for bad in ["", "abc", "1..2", "1e", "1/0", "--1", "1.2.3", "e5", "0x10", "1/2/3"] {
            assert!(parse_exact(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn rounds_half_to_even() {
        assert_eq!(format_rational(&rat(5, 2), 0), "2");
        assert_eq!(format_rational(&rat(7, 2), 0), "4");
        assert_eq!(format_rational(&rat(1, 8), 2), "0.12");
        assert_eq!(format_rational(&rat(3, 8), 2), "0.38");
        assert_eq!(format_rational(&rat(-1, 3), 4), "-0.3333");
        assert_eq!(format_rational(&rat(2, 3), 3), "0.667");
        assert_eq!(format_rational(&rat(1, 1000), 2), "0.00");
    }

    #[test]
    fn decimals_track_width() {
        assert_eq!(certified_decimals(&Dyadic::pow2(-10)), 3);
        assert_eq!(certified_decimals(&Dyadic::pow2(-40)), 12);
        assert_eq!(certified_decimals(&Dyadic::from_int(3)), 0);
        assert_eq!(certified_decimals(&Dyadic::zero()), MAX_PRINTED_DECIMALS);
    }
}
