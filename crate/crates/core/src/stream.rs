use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::prime::PrimeContext;
use crate::rational::ExactRational;
use crate::valuation::{big_to_u64, mod_inverse, valuation, Valuation};

/// Reconstruction attempts stop at this many leading digits; beyond it the
/// exact geometric-series fallback takes over.
const RECONSTRUCT_DIGIT_CAP: usize = 4096;

/// The exact p-adic expansion of a rational: value p^e * sum d_n p^n with the
/// digit sequence eventually periodic.
///
/// Canonical form: the leading digit is nonzero (e is the true valuation),
/// the preperiod is as short as possible, and the period is primitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitStream {
    is_zero: bool,
    e: i64,
    preperiod: Vec<u64>,
    period: Vec<u64>,
}

impl DigitStream {
    pub fn zero() -> Self {
        Self {
            is_zero: true,
            e: 0,
            preperiod: Vec::new(),
            period: Vec::new(),
        }
    }

    /// Builds the canonical stream for digit data `pre + per^inf` at base
    /// valuation `e` (digit i of the concatenation sits at position e + i).
    pub fn new(e: i64, pre: Vec<u64>, per: Vec<u64>) -> Self {
        assert!(!per.is_empty(), "period must be nonempty");
        let mut e = e;
        let mut pre = pre;
        let mut per = per;
        if pre.iter().all(|&d| d == 0) && per.iter().all(|&d| d == 0) {
            return Self::zero();
        }
        per = primitive_cycle(per);
        // Absorb preperiod digits that merely restate the cycle.
        while let (Some(&last_pre), Some(&last_per)) = (pre.last(), per.last()) {
            if last_pre != last_per {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        // Shift leading zeros into the valuation.
        let mut skipped = 0usize;
        while skipped < pre.len() && pre[skipped] == 0 {
            skipped += 1;
        }
        e += skipped as i64;
        pre.drain(..skipped);
        if pre.is_empty() {
            while per[0] == 0 {
                per.rotate_left(1);
                e += 1;
            }
        }
        Self {
            is_zero: false,
            e,
            preperiod: pre,
            period: per,
        }
    }

    /// Long division already emits canonical data; skip renormalization.
    fn from_canonical_parts(e: i64, pre: Vec<u64>, per: Vec<u64>) -> Self {
        debug_assert!(!per.is_empty());
        debug_assert_ne!(
            pre.first().copied().or_else(|| per.first().copied()),
            Some(0)
        );
        Self {
            is_zero: false,
            e,
            preperiod: pre,
            period: per,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    pub fn valuation(&self) -> Valuation {
        if self.is_zero {
            Valuation::Infinity
        } else {
            Valuation::Finite(self.e)
        }
    }

    pub fn preperiod(&self) -> &[u64] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    /// Digit at offset i of the unit part (offset 0 is the leading digit).
    pub fn digit(&self, i: usize) -> u64 {
        if self.is_zero {
            return 0;
        }
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }
}

impl fmt::Display for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            return write!(f, "zero");
        }
        let join = |ds: &[u64]| {
            ds.iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "{}:{}|{}",
            self.e,
            join(&self.preperiod),
            join(&self.period)
        )
    }
}

/// Shortest cycle whose repetition gives the input, via the KMP failure
/// function.
fn primitive_cycle(mut per: Vec<u64>) -> Vec<u64> {
    let n = per.len();
    if n <= 1 {
        return per;
    }
    let mut fail = vec![0usize; n];
    let mut k = 0usize;
    for i in 1..n {
        while k > 0 && per[i] != per[k] {
            k = fail[k - 1];
        }
        if per[i] == per[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let d = n - fail[n - 1];
    if n.is_multiple_of(d) {
        per.truncate(d);
    }
    per
}

/// Parses `zero` or `e:pre|per` (pre may be empty; digits comma separated).
pub fn parse_stream(ctx: &PrimeContext, s: &str) -> Result<DigitStream> {
    let s = s.trim();
    if s == "zero" {
        return Ok(DigitStream::zero());
    }
    let bad = |m: String| Error::ParseError(m);
    let (e_str, rest) = s
        .split_once(':')
        .ok_or_else(|| bad(format!("expected `e:pre|per` or `zero`, got {s:?}")))?;
    let e: i64 = e_str
        .trim()
        .parse()
        .map_err(|_| bad(format!("invalid valuation {e_str:?}")))?;
    let (pre_str, per_str) = rest
        .split_once('|')
        .ok_or_else(|| bad(format!("missing `|` between preperiod and period in {s:?}")))?;
    let pre = crate::approx::parse_digit_list(ctx, pre_str)?;
    let per = crate::approx::parse_digit_list(ctx, per_str)?;
    if per.is_empty() {
        return Err(bad(format!("period must be nonempty in {s:?}")));
    }
    Ok(DigitStream::new(e, pre, per))
}

/// The canonical eventually periodic expansion of x.
///
/// Long division by p: with the unit written as a/den (den coprime to p),
/// each step emits the constant digit and replaces a by (a - d*den)/p.
/// States with -den <= a <= 0 form an invariant set on which the step map is
/// a bijection, so they are exactly the periodic states: the preperiod ends
/// at the first such state and the period closes when it recurs. The window
/// is reached after O(log |a|) steps, guaranteeing termination.
pub fn rational_to_digit_stream(ctx: &PrimeContext, x: &ExactRational) -> DigitStream {
    let v = match valuation(ctx, x) {
        Valuation::Infinity => return DigitStream::zero(),
        Valuation::Finite(v) => v,
    };
    let unit = x * ctx.pow_rational(-v);
    let (pre, per) = expand_unit(ctx, unit.numer(), unit.denom());
    DigitStream::from_canonical_parts(v, pre, per)
}

fn expand_unit(ctx: &PrimeContext, num: &BigInt, den: &BigInt) -> (Vec<u64>, Vec<u64>) {
    const FAST_LIMIT: i128 = 1 << 40;
    let p = ctx.prime() as i128;
    if p < FAST_LIMIT {
        if let (Some(n), Some(d)) = (num.to_i128(), den.to_i128()) {
            if n.abs() < FAST_LIMIT && d < FAST_LIMIT {
                return expand_unit_i128(p, n, d);
            }
        }
    }
    expand_unit_big(ctx, num.clone(), den.clone())
}

fn inv_mod_u64(a: u64, p: u64) -> u64 {
    // Extended gcd on (a, p), gcd = 1 since p is prime and p does not divide a.
    let (mut r0, mut r1) = (a as i128, p as i128);
    let (mut t0, mut t1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(p as i128) as u64
}

fn expand_unit_i128(p: i128, num: i128, den: i128) -> (Vec<u64>, Vec<u64>) {
    let den_inv = inv_mod_u64(den.rem_euclid(p) as u64, p as u64) as i128;
    let mut state = num;
    let mut digits: Vec<u64> = Vec::new();
    let mut cycle: Option<(i128, usize)> = None;
    loop {
        match cycle {
            Some((anchor, start)) if state == anchor && digits.len() > start => {
                let per = digits.split_off(start);
                return (digits, per);
            }
            None if -den <= state && state <= 0 => {
                cycle = Some((state, digits.len()));
            }
            _ => {}
        }
        let d = (state.rem_euclid(p) * den_inv).rem_euclid(p);
        digits.push(d as u64);
        state = (state - d * den) / p;
    }
}

fn expand_unit_big(ctx: &PrimeContext, num: BigInt, den: BigInt) -> (Vec<u64>, Vec<u64>) {
    let p = ctx.prime_big();
    let den_inv = mod_inverse(&den.mod_floor(p), p).expect("unit denominator invertible mod p");
    let neg_den = -&den;
    let mut state = num;
    let mut digits: Vec<u64> = Vec::new();
    let mut cycle: Option<(BigInt, usize)> = None;
    loop {
        match &cycle {
            Some((anchor, start)) if state == *anchor && digits.len() > *start => {
                let per = digits.split_off(*start);
                return (digits, per);
            }
            None if neg_den <= state && !state.is_positive() => {
                cycle = Some((state.clone(), digits.len()));
            }
            _ => {}
        }
        let d = (state.mod_floor(p) * &den_inv).mod_floor(p);
        state = (state - &d * &den).div_floor(p);
        digits.push(big_to_u64(&d));
    }
}

/// Exact value of a canonical stream.
///
/// The value is recovered by rational reconstruction from a bounded number
/// of leading digits, with each candidate verified by re-expansion; this
/// keeps the common case (streams of modest-height rationals, whose periods
/// can still be enormous) far away from arithmetic on period-sized integers.
/// Streams whose exact value genuinely has a huge numerator or denominator
/// fall back to geometric-series summation of the periodic tail.
pub fn digit_stream_to_rational(ctx: &PrimeContext, s: &DigitStream) -> ExactRational {
    if s.is_zero {
        return ExactRational::zero();
    }
    if let Some(unit) = reconstruct_unit(ctx, s) {
        return unit * ctx.pow_rational(s.e);
    }
    geometric_value(ctx, s)
}

fn reconstruct_unit(ctx: &PrimeContext, s: &DigitStream) -> Option<ExactRational> {
    // All information is in the first mu + 2*ell digits; more adds nothing.
    let info = s.preperiod.len() + 2 * s.period.len() + 2;
    let mut k = 32usize;
    loop {
        k = k.min(info).min(RECONSTRUCT_DIGIT_CAP);
        if let Some(unit) = try_reconstruct(ctx, s, k) {
            return Some(unit);
        }
        if k >= info || k >= RECONSTRUCT_DIGIT_CAP {
            return None;
        }
        k *= 2;
    }
}

fn try_reconstruct(ctx: &PrimeContext, s: &DigitStream, k: usize) -> Option<ExactRational> {
    let modulus = ctx.pow_big(k as u64);
    let mut residue = BigInt::zero();
    for i in (0..k).rev() {
        residue = residue * ctx.prime_big() + BigInt::from(s.digit(i));
    }
    // Half extended Euclid: stop at the first remainder below sqrt(M/2).
    let bound = (&modulus / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (modulus, residue);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        (r0, r1) = (r1, r2);
        let t2 = &t0 - &q * &t1;
        (t0, t1) = (t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    // A unit has both sides coprime to p.
    if (&t1 % ctx.prime_big()).is_zero() || (&r1 % ctx.prime_big()).is_zero() {
        return None;
    }
    let candidate = ExactRational::new(r1, t1);
    unit_expansion_matches(ctx, &candidate, s).then_some(candidate)
}

/// Re-expands a candidate unit and compares against the stream, digit by
/// digit with early exit, within the step budget the stream itself needs.
fn unit_expansion_matches(ctx: &PrimeContext, unit: &ExactRational, s: &DigitStream) -> bool {
    const FAST_LIMIT: i128 = 1 << 40;
    let p = ctx.prime() as i128;
    if p < FAST_LIMIT {
        if let (Some(n), Some(d)) = (unit.numer().to_i128(), unit.denom().to_i128()) {
            if n.abs() < FAST_LIMIT && d < FAST_LIMIT {
                return unit_expansion_matches_i128(p, n, d, s);
            }
        }
    }
    unit_expansion_matches_big(ctx, unit, s)
}

fn unit_expansion_matches_i128(p: i128, num: i128, den: i128, s: &DigitStream) -> bool {
    let expected_len = s.preperiod.len() + s.period.len();
    let den_inv = inv_mod_u64(den.rem_euclid(p) as u64, p as u64) as i128;
    let mut state = num;
    let mut cycle: Option<(i128, usize)> = None;
    let mut emitted = 0usize;
    loop {
        match cycle {
            Some((anchor, start)) if state == anchor && emitted > start => {
                // Cycle closed: canonical structure must match exactly.
                return start == s.preperiod.len() && emitted - start == s.period.len();
            }
            None if -den <= state && state <= 0 => {
                cycle = Some((state, emitted));
            }
            _ => {}
        }
        if emitted > expected_len {
            return false;
        }
        let d = (state.rem_euclid(p) * den_inv).rem_euclid(p);
        if d as u64 != s.digit(emitted) {
            return false;
        }
        state = (state - d * den) / p;
        emitted += 1;
    }
}

fn unit_expansion_matches_big(ctx: &PrimeContext, unit: &ExactRational, s: &DigitStream) -> bool {
    let expected_len = s.preperiod.len() + s.period.len();
    let p = ctx.prime_big();
    let den = unit.denom();
    let den_inv = match mod_inverse(&den.mod_floor(p), p) {
        Some(inv) => inv,
        None => return false,
    };
    let neg_den = -den;
    let mut state = unit.numer().clone();
    let mut cycle: Option<(BigInt, usize)> = None;
    let mut emitted = 0usize;
    loop {
        match &cycle {
            Some((anchor, start)) if state == *anchor && emitted > *start => {
                return *start == s.preperiod.len() && emitted - start == s.period.len();
            }
            None if neg_den <= state && !state.is_positive() => {
                cycle = Some((state.clone(), emitted));
            }
            _ => {}
        }
        if emitted > expected_len {
            return false;
        }
        let d = (state.mod_floor(p) * &den_inv).mod_floor(p);
        if big_to_u64(&d) != s.digit(emitted) {
            return false;
        }
        state = (state - &d * den).div_floor(p);
        emitted += 1;
    }
}

/// Geometric-series summation of the periodic tail; exact for any stream
/// but quadratic in the period length.
fn geometric_value(ctx: &PrimeContext, s: &DigitStream) -> ExactRational {
    let p = ctx.prime_big();
    let poly = |ds: &[u64]| {
        let mut acc = BigInt::zero();
        for &d in ds.iter().rev() {
            acc = acc * p + BigInt::from(d);
        }
        acc
    };
    let pre_len = s.preperiod.len() as u64;
    let per_len = s.period.len() as u64;
    let head = ExactRational::from_integer(poly(&s.preperiod));
    let tail = ExactRational::new(
        poly(&s.period) * ctx.pow_big(pre_len),
        BigInt::one() - ctx.pow_big(per_len),
    );
    (head + tail) * ctx.pow_rational(s.e)
}
