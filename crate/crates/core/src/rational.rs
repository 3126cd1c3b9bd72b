//! Exact rational helpers shared by every module.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_usize(n: usize) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

pub fn qs(values: &[i64]) -> Vec<Q> {
    values.iter().map(|&v| q(v)).collect()
}

/// Parses `"12"`, `"-3"`, `"2.75"` or `"7/3"`.
pub fn parse_q(text: &str) -> Option<Q> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int {
            "" | "-" | "+" => BigInt::zero(),
            s => s.parse().ok()?,
        };
        let scale = num::pow(BigInt::from(10), frac.len());
        let frac_part: BigInt = frac.parse().ok()?;
        let magnitude = int_part.abs() * &scale + frac_part;
        let numer = if negative { -magnitude } else { magnitude };
        return Some(Q::new(numer, scale));
    }
    t.parse::<BigInt>().ok().map(Q::from_integer)
}

/// Exact rendering: an integer, or `p/q` in lowest terms.
pub fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Decimal rendering with at most `digits` fractional digits, truncated toward zero.
pub fn fmt_decimal(v: &Q, digits: usize) -> String {
    if v.is_integer() {
        return v.numer().to_string();
    }
    let negative = v.is_negative();
    let a = v.abs();
    let int = a.trunc().to_integer();
    let mut rest = a.fract();
    let mut out = format!("{}{}.", if negative { "-" } else { "" }, int);
    let ten = q(10);
    for _ in 0..digits {
        rest *= &ten;
        let d = rest.trunc().to_integer();
        out.push_str(&d.to_string());
        rest = rest.fract();
        if rest.is_zero() {
            break;
        }
    }
    out
}

pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Number of integers in the half-open interval `(lo, hi]`.
pub fn integers_in(lo: &Q, hi: &Q) -> BigInt {
    if hi <= lo {
        return BigInt::zero();
    }
    hi.floor().to_integer() - lo.floor().to_integer()
}

pub fn to_usize(v: &Q) -> Option<usize> {
    if v.is_integer() {
        v.to_integer().to_usize()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_q("12"), Some(q(12)));
        assert_eq!(parse_q("-3"), Some(q(-3)));
        assert_eq!(parse_q("2.75"), Some(Q::new(11.into(), 4.into())));
        assert_eq!(parse_q("-0.5"), Some(Q::new((-1).into(), 2.into())));
        assert_eq!(parse_q("7/3"), Some(Q::new(7.into(), 3.into())));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("abc"), None);
        assert_eq!(parse_q("1."), None);
    }

    #[test]
    fn formats_round_trip() {
        for s in ["0", "5", "-7", "7/3", "-1/2"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(fmt_decimal(&Q::new(1.into(), 3.into()), 4), "0.3333");
        assert_eq!(fmt_decimal(&Q::new((-5).into(), 2.into()), 4), "-2.5");
    }

    #[test]
    fn counts_integers_in_interval() {
        assert_eq!(integers_in(&q(0), &q(3)), BigInt::from(3));
        assert_eq!(
            integers_in(&Q::new(1.into(), 2.into()), &Q::new(7.into(), 2.into())),
            BigInt::from(3)
        );
        assert_eq!(integers_in(&q(4), &q(4)), BigInt::from(0));
    }
}
