//! Exact rational scalars used throughout formulation code.
//!
//! Every coefficient stays a `Rat` until the annealing boundary, where
//! values are rendered to `f64` once.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = num_rational::BigRational;

/// Integer-valued rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n / d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Exact integer value, if the rational is an integer fitting i64.
pub fn to_i64(r: &Rat) -> Option<i64> {
    if is_integer(r) {
        r.numer().to_i64()
    } else {
        None
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `p/q` or a plain integer.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

/// Renders as `p/q`, or just `p` for integers.
pub fn format_rat(r: &Rat) -> String {
    if is_integer(r) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `ceil(log2(1 + t))` for a nonnegative integer, i.e. the bit count of `t`.
pub fn ceil_log2_succ(t: u64) -> u32 {
    64 - t.leading_zeros()
}

pub fn abs(r: &Rat) -> Rat {
    if r.is_negative() {
        -r.clone()
    } else {
        r.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/2", "-7", "0", "22/7", "-5/3"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert_eq!(parse_rat("6/4").unwrap(), ratio(3, 2));
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }

    #[test]
    fn bit_counts() {
        assert_eq!(ceil_log2_succ(0), 0);
        assert_eq!(ceil_log2_succ(1), 1);
        assert_eq!(ceil_log2_succ(5), 3);
        assert_eq!(ceil_log2_succ(15), 4);
        assert_eq!(ceil_log2_succ(16), 5);
    }
}
