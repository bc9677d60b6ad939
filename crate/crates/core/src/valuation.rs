use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::prime::PrimeContext;
use crate::rational::{int_valuation, ExactRational};

/// v_p(x) in Z united with infinity; infinity occurs exactly for x = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinity)
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    /// Panics for the infinite valuation; use only where x != 0 is known.
    pub fn expect_finite(self) -> i64 {
        self.finite().expect("valuation of a nonzero value")
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
            (Valuation::Infinity, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Finite(_), Valuation::Infinity) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

/// The p-adic valuation v_p(num) - v_p(den); Infinity iff x = 0.
pub fn valuation(ctx: &PrimeContext, x: &ExactRational) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let p = ctx.prime_big();
    // x is reduced, so at most one of num, den is divisible by p.
    let vn = int_valuation(p, x.numer()).unwrap();
    if vn > 0 {
        Valuation::Finite(vn as i64)
    } else {
        Valuation::Finite(-(int_valuation(p, x.denom()).unwrap() as i64))
    }
}

/// |x|_p = p^{-v(x)} as an exact rational; |0|_p = 0.
pub fn abs_p(ctx: &PrimeContext, x: &ExactRational) -> ExactRational {
    match valuation(ctx, x) {
        Valuation::Infinity => ExactRational::zero(),
        Valuation::Finite(v) => ctx.pow_rational(-v),
    }
}

/// The unit part eps(x) = |x|_p * x, with eps(0) = 1 by convention.
pub fn epsilon(ctx: &PrimeContext, x: &ExactRational) -> ExactRational {
    match valuation(ctx, x) {
        Valuation::Infinity => ExactRational::one(),
        Valuation::Finite(v) => x * ctx.pow_rational(-v),
    }
}

/// The constant digit of x in Z_p: the unique a in {0,..,p-1} with
/// |x - a|_p < 1, computed as num * den^{-1} mod p.
pub fn floor_p(ctx: &PrimeContext, x: &ExactRational) -> Result<u64> {
    match valuation(ctx, x) {
        Valuation::Infinity => Ok(0),
        Valuation::Finite(v) if v < 0 => Err(Error::NotIntegral { valuation: v }),
        Valuation::Finite(_) => {
            let p = ctx.prime_big();
            let den_inv = mod_inverse(&x.denom().mod_floor(p), p)
                .expect("denominator of a p-adic integer is invertible mod p");
            let digit = (x.numer().mod_floor(p) * den_inv).mod_floor(p);
            Ok(big_to_u64(&digit))
        }
    }
}

/// Inverse of a modulo m (m >= 2), when gcd(a, m) = 1.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(m))
    } else {
        None
    }
}

pub(crate) fn big_to_u64(n: &BigInt) -> u64 {
    use num_traits::ToPrimitive;
    n.to_u64().expect("digit fits in u64")
}
