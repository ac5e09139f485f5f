// Decimal literal -> tightest enclosing interval.
//
// The nearest double `x` comes from the standard (correctly rounded) parser;
// the exact comparison between `x` and the decimal value decides which
// neighbour completes the bracket.

use std::cmp::Ordering;

use num_bigint::BigInt;

use super::{Interval, IntervalError};

struct Decimal {
    negative: bool,
    digits: BigInt,
    exp10: i64,
}

fn parse_decimal(text: &str) -> Option<Decimal> {
    let s = text.trim();
    let (negative, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let digits: BigInt = if all.is_empty() {
        BigInt::from(0)
    } else {
        all.parse().ok()?
    };
    Some(Decimal {
        negative,
        digits,
        exp10: exponent - frac_part.len() as i64,
    })
}

/// Exact comparison of the finite double `x` with `digits * 10^exp10` (both >= 0).
fn compare(x: f64, digits: &BigInt, exp10: i64) -> Ordering {
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e2) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    };
    // x = m * 2^e2, d = digits * 10^exp10; cross-multiply to integers.
    let mut lhs = BigInt::from(m);
    let mut rhs = digits.clone();
    if e2 >= 0 {
        lhs <<= e2 as usize;
    } else {
        rhs <<= (-e2) as usize;
    }
    let ten = BigInt::from(10);
    if exp10 >= 0 {
        rhs *= ten.pow(exp10 as u32);
    } else {
        lhs *= ten.pow((-exp10) as u32);
    }
    lhs.cmp(&rhs)
}

pub(super) fn enclose(text: &str) -> Result<Interval, IntervalError> {
    let parse_err = || IntervalError::Parse(text.to_string());
    let dec = parse_decimal(text).ok_or_else(parse_err)?;
    if dec.exp10.abs() > 400 {
        // Far outside the binary64 range where exactness matters; fall back to
        // a one-ulp bracket around the nearest value.
        let x: f64 = text.trim().parse().map_err(|_| parse_err())?;
        if !x.is_finite() {
            return Err(IntervalError::Unbounded);
        }
        return Ok(Interval {
            lo: x.next_down(),
            hi: x.next_up(),
        });
    }
    let nearest: f64 = text
        .trim()
        .trim_start_matches(['+', '-'])
        .parse()
        .map_err(|_| parse_err())?;
    if !nearest.is_finite() {
        return Err(IntervalError::Unbounded);
    }
    let (lo, hi) = match compare(nearest, &dec.digits, dec.exp10) {
        Ordering::Equal => (nearest, nearest),
        Ordering::Less => (nearest, nearest.next_up()),
        Ordering::Greater => (nearest.next_down(), nearest),
    };
    if !hi.is_finite() {
        return Err(IntervalError::Unbounded);
    }
    Ok(if dec.negative {
        Interval { lo: -hi, hi: -lo }
    } else {
        Interval { lo, hi }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_literals_are_points() {
        assert_eq!(enclose("0.25").unwrap(), Interval::point(0.25));
        assert_eq!(enclose("-3").unwrap(), Interval::point(-3.0));
        assert_eq!(enclose("1e2").unwrap(), Interval::point(100.0));
        assert_eq!(enclose("0.015625").unwrap(), Interval::point(0.015625));
    }

    #[test]
    fn inexact_literals_bracket_adjacent_neighbours() {
        let tenth = enclose("0.1").unwrap();
        assert_eq!(tenth.hi(), tenth.lo().next_up());
        assert!(tenth.contains(0.1));
        // 0.1 rounds up to the double, so the double is the upper end.
        assert_eq!(tenth.hi(), 0.1);
        let mu = enclose("3.2").unwrap();
        assert_eq!(mu, Interval::from_ratio(32, 10).unwrap());
        let neg = enclose("-0.1").unwrap();
        assert_eq!(neg, -tenth);
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(enclose("abc").is_err());
        assert!(enclose("").is_err());
        assert!(enclose("1.2.3").is_err());
        assert!(enclose(".").is_err());
    }
}
