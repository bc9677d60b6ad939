use std::fmt;

use num_traits::Zero;

use crate::approx::{approx_from_rational, PAdicApprox};
use crate::error::{Error, Result};
use crate::prime::PrimeContext;
use crate::rational::{format_rational, ExactRational};
use crate::stream::DigitStream;
use crate::valuation::{epsilon, floor_p, valuation, Valuation};

/// One continued fraction term: partial numerator p^exponent over partial
/// denominator `digit`. Every pair after the first has exponent >= 1, so the
/// partial numerators stay in p*Z_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CFPair {
    pub exponent: i64,
    pub digit: u64,
}

impl CFPair {
    pub fn new(exponent: i64, digit: u64) -> Self {
        Self { exponent, digit }
    }
}

impl fmt::Display for CFPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.exponent, self.digit)
    }
}

/// How an expansion ended: at a fixed point (exactly 0 or exactly -p), or at
/// the iteration cap with the exact residual iterate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Terminal {
    Zero,
    MinusP,
    Truncated(ExactRational),
}

/// Schneider continued fraction data of a number: collected pairs plus the
/// terminal tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFExpansion {
    pub pairs: Vec<CFPair>,
    pub terminal: Terminal,
}

impl CFExpansion {
    pub fn is_terminated(&self) -> bool {
        !matches!(self.terminal, Terminal::Truncated(_))
    }

    /// Running exponent sums E_i = e_0 + ... + e_i.
    pub fn exponent_sums(&self) -> Vec<i64> {
        self.pairs
            .iter()
            .scan(0i64, |acc, pair| {
                *acc += pair.exponent;
                Some(*acc)
            })
            .collect()
    }

    /// The exact terminal value, when the orbit terminated.
    pub fn terminal_value(&self, ctx: &PrimeContext) -> Option<ExactRational> {
        match &self.terminal {
            Terminal::Zero => Some(ExactRational::zero()),
            Terminal::MinusP => Some(-ctx.pow_rational(1)),
            Terminal::Truncated(_) => None,
        }
    }
}

/// A traced orbit: iterates x_0, x_1 = tau(x_0), ... with the pairs emitted
/// along the way (one per step, so iterates has one more entry).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitRecord {
    pub iterates: Vec<ExactRational>,
    pub pairs: Vec<CFPair>,
    pub terminated: bool,
}

/// Result of one application of the continued fraction map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TauStep {
    /// tau(0) = 0; no pair exists for the zero input.
    Fixed,
    Step {
        pair: CFPair,
        next: ExactRational,
    },
}

/// Schneider's map: x -> 1/eps(x) - floor_p(1/eps(x)), with the emitted pair
/// (v(x), floor_p(1/eps(x))). The next iterate is 0 or lies in p*Z_p.
pub fn tau_step(ctx: &PrimeContext, x: &ExactRational) -> TauStep {
    let e = match valuation(ctx, x) {
        Valuation::Infinity => return TauStep::Fixed,
        Valuation::Finite(e) => e,
    };
    let inv_unit = epsilon(ctx, x).recip();
    let a = floor_p(ctx, &inv_unit).expect("1/eps(x) is a unit");
    let next = inv_unit - ExactRational::from_integer(a.into());
    TauStep::Step {
        pair: CFPair::new(e, a),
        next,
    }
}

/// The digit shift: x -> eps(x) - floor_p(eps(x)); sigma(0) = 0 under the
/// eps(0) = 1 convention.
pub fn sigma_step(ctx: &PrimeContext, x: &ExactRational) -> ExactRational {
    let unit = epsilon(ctx, x);
    let a = floor_p(ctx, &unit).expect("eps(x) is a unit");
    unit - ExactRational::from_integer(a.into())
}

/// The shift performed on expansion data: drop the leading digit of the
/// stream and renormalize. Satisfies
/// `digit_stream_to_rational(sigma_shift_stream(s)) = sigma_step(value(s))`.
pub fn sigma_shift_stream(ctx: &PrimeContext, s: &DigitStream) -> DigitStream {
    if s.is_zero() {
        return DigitStream::zero();
    }
    debug_assert!(s.period().iter().all(|&d| d < ctx.prime()));
    let mut pre = s.preperiod().to_vec();
    let mut per = s.period().to_vec();
    if pre.is_empty() {
        per.rotate_left(1);
    } else {
        pre.remove(0);
    }
    // The surviving digits keep their absolute positions 1, 2, ...; the
    // p^e prefactor is consumed by the unit-part normalization in sigma.
    DigitStream::new(1, pre, per)
}

/// Iterates the continued fraction map until the iterate is exactly 0,
/// exactly -p, or `cap` pairs have been emitted.
pub fn cf_expand(ctx: &PrimeContext, x: &ExactRational, cap: usize) -> CFExpansion {
    let record = orbit(ctx, x, cap);
    let last = record.iterates.last().expect("orbit is nonempty");
    let terminal = if record.terminated {
        if last.is_zero() {
            Terminal::Zero
        } else {
            Terminal::MinusP
        }
    } else {
        Terminal::Truncated(last.clone())
    };
    CFExpansion {
        pairs: record.pairs,
        terminal,
    }
}

/// As `cf_expand`, but keeping every exact iterate.
pub fn orbit(ctx: &PrimeContext, x: &ExactRational, cap: usize) -> OrbitRecord {
    let minus_p = -ctx.pow_rational(1);
    let mut iterates = vec![x.clone()];
    let mut pairs = Vec::new();
    let mut current = x.clone();
    loop {
        if current.is_zero() || current == minus_p {
            return OrbitRecord {
                iterates,
                pairs,
                terminated: true,
            };
        }
        if pairs.len() >= cap {
            return OrbitRecord {
                iterates,
                pairs,
                terminated: false,
            };
        }
        match tau_step(ctx, &current) {
            TauStep::Fixed => unreachable!("only 0 is reported Fixed"),
            TauStep::Step { pair, next } => {
                pairs.push(pair);
                iterates.push(next.clone());
                current = next;
            }
        }
    }
}

fn validate_pairs(ctx: &PrimeContext, pairs: &[CFPair]) -> Result<()> {
    for (i, pair) in pairs.iter().enumerate() {
        validate_pair(ctx, pair, i == 0)?;
    }
    Ok(())
}

fn validate_pair(ctx: &PrimeContext, pair: &CFPair, first: bool) -> Result<()> {
    if pair.digit == 0 || pair.digit >= ctx.prime() {
        return Err(Error::InvariantViolation(format!(
            "partial denominator {} outside 1..{}",
            pair.digit,
            ctx.prime()
        )));
    }
    if !first && pair.exponent < 1 {
        return Err(Error::InvariantViolation(format!(
            "exponent {} < 1 after the first pair",
            pair.exponent
        )));
    }
    Ok(())
}

/// Evaluates the finite Pringsheim fraction
/// `p^{e_0}/(a_0 + ... p^{e_n}/(a_n + tail))` right-to-left, exactly.
/// Empty pairs return the tail. The tail must be 0 or lie in p*Z_p, which
/// keeps every intermediate denominator a unit.
pub fn cf_eval_exact(
    ctx: &PrimeContext,
    pairs: &[CFPair],
    tail: &ExactRational,
) -> Result<ExactRational> {
    validate_pairs(ctx, pairs)?;
    if !pairs.is_empty() {
        // With no pairs there is no division, so any tail is returnable.
        match valuation(ctx, tail) {
            Valuation::Finite(v) if v < 1 => {
                return Err(Error::InvariantViolation(format!(
                    "tail {} has valuation {v} < 1",
                    format_rational(tail)
                )))
            }
            _ => {}
        }
    }
    let mut acc = tail.clone();
    for pair in pairs.iter().rev() {
        let denom = ExactRational::from_integer(pair.digit.into()) + acc;
        debug_assert!(!denom.is_zero());
        acc = ctx.pow_rational(pair.exponent) / denom;
    }
    Ok(acc)
}

/// The convergent P_n: the fraction truncated after the given pairs.
pub fn convergent(ctx: &PrimeContext, pairs: &[CFPair]) -> Result<ExactRational> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    cf_eval_exact(ctx, pairs, &ExactRational::zero())
}

/// Consumes pairs until the running exponent sum certifies the convergent
/// modulo p^n (the tail perturbs a convergent by at most p^{-(E_m + e_{m+1})}
/// and exponents after the first are >= 1), then truncates it.
pub fn cf_eval_limit<I>(ctx: &PrimeContext, pairs: I, n: i64) -> Result<PAdicApprox>
where
    I: IntoIterator<Item = CFPair>,
{
    let mut consumed: Vec<CFPair> = Vec::new();
    let mut exponent_sum = 0i64;
    for pair in pairs {
        validate_pair(ctx, &pair, consumed.is_empty())?;
        exponent_sum += pair.exponent;
        consumed.push(pair);
        if exponent_sum + 1 >= n {
            let value = cf_eval_exact(ctx, &consumed, &ExactRational::zero())?;
            return match approx_from_rational(ctx, &value, n) {
                // The whole limit class is 0 mod p^n.
                Err(Error::PrecisionTooLow { .. }) => Ok(PAdicApprox::zero_at_precision(n)),
                other => other,
            };
        }
    }
    Err(Error::SourceExhausted {
        requested: n,
        reached: exponent_sum + 1,
    })
}

/// Parses `"(e0,a0)(e1,a1)..."`; the empty string is the empty sequence.
pub fn parse_cf_pairs(s: &str) -> Result<Vec<CFPair>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Ok(Vec::new());
    }
    let bad = || Error::ParseError(format!("expected `(e0,a0)(e1,a1)...`, got {s:?}"));
    let inner = compact
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(bad)?;
    inner
        .split(")(")
        .map(|part| {
            let (e_str, a_str) = part.split_once(',').ok_or_else(bad)?;
            let exponent: i64 = e_str.parse().map_err(|_| bad())?;
            let digit: u64 = a_str.parse().map_err(|_| bad())?;
            Ok(CFPair::new(exponent, digit))
        })
        .collect()
}
