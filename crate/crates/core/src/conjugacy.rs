use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::approx::{approx_from_rational, approx_truncation_value, PAdicApprox};
use crate::dynamics::{cf_eval_exact, cf_expand, CFExpansion, CFPair, Terminal};
use crate::error::{Error, Result};
use crate::prime::PrimeContext;
use crate::rational::{format_rational, ExactRational};
use crate::valuation::{valuation, Valuation};

/// An element of Z[1/p] in the canonical form mantissa * p^exponent with the
/// mantissa coprime to p (zero is stored as 0 * p^0). This is the exact shape
/// of every value of f on a rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FImage {
    mantissa: BigInt,
    exponent: i64,
    prime: u64,
}

impl FImage {
    pub fn zero(ctx: &PrimeContext) -> Self {
        Self {
            mantissa: BigInt::zero(),
            exponent: 0,
            prime: ctx.prime(),
        }
    }

    /// Canonicalizes mantissa * p^exponent by moving every factor of p into
    /// the exponent.
    pub fn from_parts(ctx: &PrimeContext, mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Self::zero(ctx);
        }
        let shift = crate::rational::int_valuation(ctx.prime_big(), &mantissa).unwrap();
        Self {
            mantissa: mantissa / ctx.pow_big(shift),
            exponent: exponent + shift as i64,
            prime: ctx.prime(),
        }
    }

    /// Reads an exact rational, failing with `NotDyadic` when the denominator
    /// has a prime factor other than p.
    pub fn from_rational(ctx: &PrimeContext, y: &ExactRational) -> Result<Self> {
        if y.is_zero() {
            return Ok(Self::zero(ctx));
        }
        let v = valuation(ctx, y).expect_finite();
        let unit = y * ctx.pow_rational(-v);
        if !unit.is_integer() {
            return Err(Error::NotDyadic(format_rational(y)));
        }
        Ok(Self {
            mantissa: unit.to_integer(),
            exponent: v,
            prime: ctx.prime(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn to_rational(&self) -> ExactRational {
        let p = BigInt::from(self.prime);
        if self.exponent >= 0 {
            ExactRational::from_integer(&self.mantissa * p.pow(self.exponent as u32))
        } else {
            ExactRational::new(
                self.mantissa.clone(),
                p.pow(self.exponent.unsigned_abs() as u32),
            )
        }
    }
}

impl fmt::Display for FImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}*{}^{}", self.mantissa, self.prime, self.exponent)
        }
    }
}

/// Parses `0` or `m*p^k`, with p matching the context prime.
pub fn parse_fimage(ctx: &PrimeContext, s: &str) -> Result<FImage> {
    let s = s.trim();
    if s == "0" {
        return Ok(FImage::zero(ctx));
    }
    let bad = |m: String| Error::ParseError(m);
    let (m_str, pow_str) = s
        .split_once('*')
        .ok_or_else(|| bad(format!("expected `m*p^k` or `0`, got {s:?}")))?;
    let mantissa: BigInt = m_str
        .trim()
        .parse()
        .map_err(|_| bad(format!("invalid mantissa {m_str:?}")))?;
    let (base_str, exp_str) = pow_str
        .split_once('^')
        .ok_or_else(|| bad(format!("expected `p^k` after `*` in {s:?}")))?;
    let base: u64 = base_str
        .trim()
        .parse()
        .map_err(|_| bad(format!("invalid base {base_str:?}")))?;
    if base != ctx.prime() {
        return Err(bad(format!(
            "base {base} does not match the context prime {}",
            ctx.prime()
        )));
    }
    let exponent: i64 = exp_str
        .trim()
        .parse()
        .map_err(|_| bad(format!("invalid exponent {exp_str:?}")))?;
    Ok(FImage::from_parts(ctx, mantissa, exponent))
}

/// The dichotomy of the rationality criterion: a queried value either has an
/// exact rational preimage under f, or its preimage exists in Q_p but is
/// irrational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PreimageClassification {
    Rational(ExactRational),
    Irrational,
}

/// Exact value of f on a rational, together with the expansion it was read
/// from: f(x) = sum a_i p^{E_i} + t p^{E_m} with E_i the running exponent
/// sums and t in {0, -p} the terminal value.
pub fn f_rational(
    ctx: &PrimeContext,
    x: &ExactRational,
    cap: usize,
) -> Result<(FImage, CFExpansion)> {
    let expansion = cf_expand(ctx, x, cap);
    let image = f_of_expansion(ctx, &expansion, cap)?;
    Ok((image, expansion))
}

fn f_of_expansion(ctx: &PrimeContext, expansion: &CFExpansion, cap: usize) -> Result<FImage> {
    let minus_p_terminal = match expansion.terminal {
        Terminal::Zero => false,
        Terminal::MinusP => true,
        Terminal::Truncated(_) => {
            return Err(Error::OrbitNotTerminated {
                cap,
                expansion: expansion.clone(),
            })
        }
    };
    if expansion.pairs.is_empty() {
        return Ok(if minus_p_terminal {
            FImage::from_parts(ctx, BigInt::from(-1), 1)
        } else {
            FImage::zero(ctx)
        });
    }
    let sums = expansion.exponent_sums();
    let base = sums[0];
    let mut acc = BigInt::zero();
    for (pair, e_i) in expansion.pairs.iter().zip(&sums) {
        acc += BigInt::from(pair.digit) * ctx.pow_big((e_i - base) as u64);
    }
    if minus_p_terminal {
        acc -= ctx.pow_big((sums.last().unwrap() - base + 1) as u64);
    }
    Ok(FImage::from_parts(ctx, acc, base))
}

/// f on an approximation: truncate to the exact representative, evaluate f
/// exactly, and re-truncate at the input precision. Because f is an isometry
/// fixing 0, the output residue class contains f(y) for every y in the input
/// class.
pub fn f_approx(ctx: &PrimeContext, a: &PAdicApprox, cap: usize) -> Result<PAdicApprox> {
    if a.is_exact_zero() {
        return Ok(PAdicApprox::exact_zero());
    }
    if a.has_no_digits() {
        return Ok(a.clone());
    }
    let n = a.precision().expect_finite();
    let x = approx_truncation_value(ctx, a);
    let (image, _) = f_rational(ctx, &x, cap)?;
    approx_from_rational(ctx, &image.to_rational(), n)
}

/// The explicit rational preimage of an element of Z[1/p].
///
/// Positive values are re-read as their finite base-p digit support
/// sum a_i p^{E_i} and evaluated as the fraction with partial data
/// (p^{E_i - E_{i-1}}, a_i) and tail 0. Negative values are first written as
/// sum a_i p^{E_i} - p^{E_n + 1} (top digit nonzero), which is the same
/// fraction with tail -p. The construction re-checks itself by applying f to
/// the result.
pub fn f_inverse_dyadic(ctx: &PrimeContext, y: &FImage) -> ExactRational {
    if y.is_zero() {
        return ExactRational::zero();
    }
    let (support, tail) = if y.mantissa().is_positive() {
        (digit_support(ctx, y.mantissa()), ExactRational::zero())
    } else {
        (
            negative_digit_support(ctx, y.mantissa()),
            -ctx.pow_rational(1),
        )
    };
    // The mantissa is a unit, so its first digit sits at position 0.
    debug_assert_eq!(support.first().map(|&(_, pos)| pos), Some(0));
    let mut pairs = Vec::with_capacity(support.len());
    let mut prev_pos = 0i64;
    for (i, &(digit, pos)) in support.iter().enumerate() {
        let exponent = if i == 0 { y.exponent() } else { pos - prev_pos };
        pairs.push(CFPair::new(exponent, digit));
        prev_pos = pos;
    }
    let x = cf_eval_exact(ctx, &pairs, &tail).expect("constructed pairs are valid");
    let (check, _) =
        f_rational(ctx, &x, pairs.len() + 2).expect("constructed orbit terminates with the pairs");
    assert_eq!(
        &check, y,
        "inverse construction failed to reproduce its input"
    );
    x
}

/// Nonzero base-p digits of a positive integer as (digit, position).
fn digit_support(ctx: &PrimeContext, m: &BigInt) -> Vec<(u64, i64)> {
    let mut out = Vec::new();
    let mut rest = m.clone();
    let mut pos = 0i64;
    while !rest.is_zero() {
        let (q, r) = rest.div_rem(ctx.prime_big());
        if !r.is_zero() {
            out.push((crate::valuation::big_to_u64(&r), pos));
        }
        rest = q;
        pos += 1;
    }
    out
}

/// Writes a negative integer u (coprime to p) as N - p^K with
/// N = u + p^K in (0, p^K) and the digit of N at K-1 nonzero, then returns
/// the digit support of N. The tail -p supplies the -p^K term, so the top
/// digit position must be exactly K-1; when the minimal K leaves that digit
/// zero, K is bumped by one, absorbing a (p-1) digit.
fn negative_digit_support(ctx: &PrimeContext, u: &BigInt) -> Vec<(u64, i64)> {
    let abs = u.abs();
    let mut k = 1u64;
    let mut pk = ctx.prime_big().clone();
    while pk <= abs {
        pk *= ctx.prime_big();
        k += 1;
    }
    let mut shifted = u + &pk;
    let mut support = digit_support(ctx, &shifted);
    if support.last().map(|&(_, pos)| pos) != Some(k as i64 - 1) {
        pk *= ctx.prime_big();
        k += 1;
        shifted = u + &pk;
        support = digit_support(ctx, &shifted);
        debug_assert_eq!(support.last().unwrap().1, k as i64 - 1);
    }
    support
}

/// Inverse of f on an approximation, at the input precision. Valid because
/// the inverse of an isometry fixing 0 is again such an isometry.
pub fn f_inverse_approx(ctx: &PrimeContext, y: &PAdicApprox) -> PAdicApprox {
    if y.is_exact_zero() {
        return PAdicApprox::exact_zero();
    }
    if y.has_no_digits() {
        return y.clone();
    }
    let n = y.precision().expect_finite();
    let truncated = approx_truncation_value(ctx, y);
    let image =
        FImage::from_rational(ctx, &truncated).expect("a truncation value always lies in Z[1/p]");
    let x = f_inverse_dyadic(ctx, &image);
    approx_from_rational(ctx, &x, n).expect("preimage has the same valuation as the input")
}

/// The rationality criterion: y has a rational preimage under f exactly when
/// y lies in Z[1/p], in which case an exact witness is produced.
pub fn classify_preimage(ctx: &PrimeContext, y: &ExactRational) -> PreimageClassification {
    match FImage::from_rational(ctx, y) {
        Ok(image) => PreimageClassification::Rational(f_inverse_dyadic(ctx, &image)),
        Err(_) => PreimageClassification::Irrational,
    }
}

/// Checks the one-step identity f(p^e / (x + a)) = p^e (f(x) + a) exactly,
/// for a in {1,..,p-1} and x with v(x) >= 1 (or x = 0).
pub fn check_one_step_identity(
    ctx: &PrimeContext,
    e: i64,
    a: u64,
    x: &ExactRational,
    cap: usize,
) -> Result<bool> {
    if a == 0 || a >= ctx.prime() {
        return Err(Error::InvariantViolation(format!(
            "digit {a} outside 1..{}",
            ctx.prime()
        )));
    }
    match valuation(ctx, x) {
        Valuation::Finite(v) if v < 1 => {
            return Err(Error::InvariantViolation(format!(
                "argument {} has valuation {v} < 1",
                format_rational(x)
            )))
        }
        _ => {}
    }
    let a_rat = ExactRational::from_integer(a.into());
    let y = ctx.pow_rational(e) / (x + &a_rat);
    let (f_y, _) = f_rational(ctx, &y, cap)?;
    let (f_x, _) = f_rational(ctx, x, cap)?;
    let rhs = ctx.pow_rational(e) * (f_x.to_rational() + a_rat);
    Ok(f_y.to_rational() == rhs)
}
