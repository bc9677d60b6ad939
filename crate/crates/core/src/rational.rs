use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision reduced fraction: the exact substrate for every
/// computation in the crate. `num_rational` keeps the invariants we need
/// (gcd(num, den) = 1, den >= 1, zero is 0/1) through `Ratio::new`.
pub type ExactRational = num_rational::BigRational;

pub fn rational_from_int(n: i64) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n))
}

/// Exact rational n/d; panics on d = 0 (test/helper use only).
pub fn rat(n: i64, d: i64) -> ExactRational {
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `num` or `num/den` with an optional leading sign.
pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let s = s.trim();
    let bad = |m: &str| Error::ParseError(format!("{m}: {s:?}"));
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| bad("expected an integer numerator"))?;
    let den: BigInt = match den_str {
        Some(d) => d
            .parse()
            .map_err(|_| bad("expected an integer denominator"))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad("denominator must be nonzero"));
    }
    Ok(ExactRational::new(num, den))
}

/// Renders `num/den`, or just `num` for integers, matching the parser.
pub fn format_rational(x: &ExactRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Exponent of p in a nonzero integer (None for zero).
pub fn int_valuation(p: &BigInt, n: &BigInt) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let mut v = 0u64;
    let mut m = n.abs();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&m, p);
        if !r.is_zero() {
            return Some(v);
        }
        v += 1;
        m = q;
    }
}
