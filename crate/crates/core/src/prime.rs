use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::rational::ExactRational;

/// The fixed prime p every operation is taken relative to.
///
/// Construction runs a deterministic Miller-Rabin test, so a context can only
/// hold an actual prime. Primes are limited to 64 bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeContext {
    p: u64,
    p_big: BigInt,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self {
            p,
            p_big: BigInt::from(p),
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn prime_big(&self) -> &BigInt {
        &self.p_big
    }

    /// p^e as a non-negative integer power, e >= 0.
    pub fn pow_big(&self, e: u64) -> BigInt {
        self.p_big.pow(e as u32)
    }

    /// p^e as an exact rational, for any sign of e.
    pub fn pow_rational(&self, e: i64) -> ExactRational {
        if e >= 0 {
            ExactRational::from_integer(self.pow_big(e as u64))
        } else {
            ExactRational::new(BigInt::one(), self.pow_big(e.unsigned_abs()))
        }
    }
}

/// Deterministic Miller-Rabin for u64.
///
/// The witness set 2..=37 is known to be exact for every n < 3.3 * 10^24,
/// which covers the full u64 range.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}
