use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::prime::PrimeContext;
use crate::rational::ExactRational;
use crate::valuation::{big_to_u64, mod_inverse, valuation, Valuation};

/// A p-adic number known modulo p^N: the represented set is
/// `{ y : |y - p^e * sum d_i p^i|_p <= p^{-(e + k)} }` with N = e + k.
///
/// Canonical form keeps the leading digit nonzero, so `e` is the true
/// valuation whenever any digit is stored. A value indistinguishable from 0
/// at precision N is stored with no digits and `e = N`; it is distinct from
/// the exact zero, whose precision is infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicApprox {
    exact_zero: bool,
    e: i64,
    digits: Vec<u64>,
}

impl PAdicApprox {
    pub fn exact_zero() -> Self {
        Self {
            exact_zero: true,
            e: 0,
            digits: Vec::new(),
        }
    }

    /// The class "0 mod p^n": no known digits, only a precision bound.
    pub fn zero_at_precision(n: i64) -> Self {
        Self {
            exact_zero: false,
            e: n,
            digits: Vec::new(),
        }
    }

    pub fn from_unit_digits(e: i64, digits: Vec<u64>) -> Self {
        assert!(
            digits.first().is_none_or(|&d| d != 0),
            "leading digit must be nonzero"
        );
        Self {
            exact_zero: false,
            e,
            digits,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }

    /// True for both the exact zero and a precision-limited zero class.
    pub fn has_no_digits(&self) -> bool {
        self.digits.is_empty()
    }

    /// The valuation, when it is pinned down by a stored digit.
    pub fn known_valuation(&self) -> Option<i64> {
        (!self.digits.is_empty()).then_some(self.e)
    }

    pub fn unit_digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn digit_count(&self) -> usize {
        self.digits.len()
    }

    /// Absolute precision N = e + k; infinite for the exact zero.
    pub fn precision(&self) -> Valuation {
        if self.exact_zero {
            Valuation::Infinity
        } else {
            Valuation::Finite(self.e + self.digits.len() as i64)
        }
    }

    /// The stored unit part as an integer, sum of d_i p^i.
    fn unit_value(&self, ctx: &PrimeContext) -> BigInt {
        let mut acc = BigInt::zero();
        for &d in self.digits.iter().rev() {
            acc = acc * ctx.prime_big() + BigInt::from(d);
        }
        acc
    }

    /// Canonicalizes `p^base_e * value` known on a span of `span` digits.
    fn from_scaled(ctx: &PrimeContext, base_e: i64, value: &BigInt, span: usize) -> Self {
        let mut rem = value.mod_floor(&ctx.pow_big(span as u64));
        let mut digits = Vec::with_capacity(span);
        for _ in 0..span {
            let (q, r) = rem.div_rem(ctx.prime_big());
            digits.push(big_to_u64(&r));
            rem = q;
        }
        match digits.iter().position(|&d| d != 0) {
            None => Self::zero_at_precision(base_e + span as i64),
            Some(j) => Self::from_unit_digits(base_e + j as i64, digits.split_off(j)),
        }
    }
}

impl fmt::Display for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact_zero {
            return write!(f, "zero");
        }
        write!(f, "{}:", self.e)?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Parses `zero` or `e:d0,d1,...` (`e:` alone is the zero class mod p^e).
pub fn parse_approx(ctx: &PrimeContext, s: &str) -> Result<PAdicApprox> {
    let s = s.trim();
    if s == "zero" {
        return Ok(PAdicApprox::exact_zero());
    }
    let bad = |m: String| Error::ParseError(m);
    let (e_str, digits_str) = s
        .split_once(':')
        .ok_or_else(|| bad(format!("expected `e:d0,d1,...` or `zero`, got {s:?}")))?;
    let e: i64 = e_str
        .trim()
        .parse()
        .map_err(|_| bad(format!("invalid valuation {e_str:?}")))?;
    let digits = parse_digit_list(ctx, digits_str)?;
    if digits.is_empty() {
        return Ok(PAdicApprox::zero_at_precision(e));
    }
    if digits[0] == 0 {
        return Err(bad(format!(
            "leading digit must be nonzero in {s:?}; the valuation prefix is explicit"
        )));
    }
    Ok(PAdicApprox::from_unit_digits(e, digits))
}

pub(crate) fn parse_digit_list(ctx: &PrimeContext, s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|part| {
            let d: u64 = part
                .trim()
                .parse()
                .map_err(|_| Error::ParseError(format!("invalid digit {part:?}")))?;
            if d >= ctx.prime() {
                return Err(Error::ParseError(format!(
                    "digit {d} out of range for p = {}",
                    ctx.prime()
                )));
            }
            Ok(d)
        })
        .collect()
}

/// Truncates x to absolute precision n; requires n > v(x) for nonzero x.
pub fn approx_from_rational(ctx: &PrimeContext, x: &ExactRational, n: i64) -> Result<PAdicApprox> {
    let v = match valuation(ctx, x) {
        Valuation::Infinity => return Ok(PAdicApprox::exact_zero()),
        Valuation::Finite(v) => v,
    };
    if n <= v {
        return Err(Error::PrecisionTooLow {
            requested: n,
            valuation: v,
        });
    }
    let k = (n - v) as usize;
    let unit = x * ctx.pow_rational(-v);
    let modulus = ctx.pow_big(k as u64);
    let den_inv = mod_inverse(&unit.denom().mod_floor(&modulus), &modulus)
        .expect("unit denominator is invertible mod p^k");
    let residue = (unit.numer().mod_floor(&modulus) * den_inv).mod_floor(&modulus);
    Ok(PAdicApprox::from_scaled(ctx, v, &residue, k))
}

/// The canonical representative p^e * sum d_i p^i in Z[1/p] (0 when no
/// digits are stored).
pub fn approx_truncation_value(ctx: &PrimeContext, a: &PAdicApprox) -> ExactRational {
    if a.digits.is_empty() {
        return ExactRational::zero();
    }
    ExactRational::from_integer(a.unit_value(ctx)) * ctx.pow_rational(a.e)
}

/// Sum at absolute precision min(N_a, N_b). Cancellation can leave no known
/// digits; the result is then the zero class at the combined precision.
pub fn approx_add(ctx: &PrimeContext, a: &PAdicApprox, b: &PAdicApprox) -> PAdicApprox {
    if a.exact_zero {
        return b.clone();
    }
    if b.exact_zero {
        return a.clone();
    }
    let n = a.precision().min(b.precision()).expect_finite();
    // A digitless class contributes the value 0 with its bound as alignment.
    let m = a.e.min(b.e);
    let span = (n - m) as usize;
    let scaled = |x: &PAdicApprox| x.unit_value(ctx) * ctx.pow_big((x.e - m) as u64);
    let sum = scaled(a) + scaled(b);
    PAdicApprox::from_scaled(ctx, m, &sum, span)
}

/// Product: valuations add, relative precision is min(k_a, k_b).
pub fn approx_mul(ctx: &PrimeContext, a: &PAdicApprox, b: &PAdicApprox) -> PAdicApprox {
    if a.exact_zero || b.exact_zero {
        return PAdicApprox::exact_zero();
    }
    let e = a.e + b.e;
    let k = a.digits.len().min(b.digits.len());
    if k == 0 {
        return PAdicApprox::zero_at_precision(e);
    }
    let prod = a.unit_value(ctx) * b.unit_value(ctx);
    PAdicApprox::from_scaled(ctx, e, &prod, k)
}

/// Reciprocal: valuation negated, relative precision preserved.
pub fn approx_inv(ctx: &PrimeContext, a: &PAdicApprox) -> Result<PAdicApprox> {
    if a.exact_zero {
        return Err(Error::DivisionByZero);
    }
    if a.digits.is_empty() {
        return Err(Error::PrecisionExhausted);
    }
    let k = a.digits.len();
    let modulus = ctx.pow_big(k as u64);
    let inv = mod_inverse(&a.unit_value(ctx), &modulus)
        .expect("a unit with nonzero leading digit is invertible mod p^k");
    Ok(PAdicApprox::from_scaled(ctx, -a.e, &inv, k))
}
