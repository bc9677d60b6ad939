//! Exact arithmetic for Schneider p-adic continued fractions.
//!
//! The crate implements, over the rationals sitting inside `Q_p`:
//!
//! * the valuation / absolute-value layer with the unit part `eps(x) = |x|_p * x`
//!   and the constant digit `floor_p(x)`,
//! * eventually periodic digit streams of rationals and precision-tracked
//!   p-adic approximations,
//! * Schneider's continued fraction map `tau(x) = 1/eps(x) - floor_p(1/eps(x))`
//!   and the digit shift `sigma(x) = eps(x) - floor_p(eps(x))`,
//! * the conjugating isometry `f` with `f o tau = sigma o f`, its explicit
//!   inverse on `Z[1/p]`, and the rationality criterion
//!   `x in Q  <=>  f(x) in Z[1/p]`.
//!
//! All rational computations are exact; approximation types carry their
//! absolute p-adic precision explicitly.
//!
//! ```
//! use schneider_cf::{cf_expand, f_rational, f_inverse_dyadic, parse_rational, PrimeContext, Terminal};
//!
//! let ctx = PrimeContext::new(2)?;
//! let x = parse_rational("4/3")?;
//!
//! // The orbit of 4/3 under tau ends at the fixed point 0 after two steps.
//! let expansion = cf_expand(&ctx, &x, 1000);
//! assert_eq!(expansion.terminal, Terminal::Zero);
//! assert_eq!(expansion.pairs.len(), 2);
//!
//! // f maps it to 12 = 3 * 2^2 in Z[1/2], and the explicit inverse returns.
//! let (image, _) = f_rational(&ctx, &x, 1000)?;
//! assert_eq!(image.to_string(), "3*2^2");
//! assert_eq!(f_inverse_dyadic(&ctx, &image), x);
//! # Ok::<(), schneider_cf::Error>(())
//! ```

pub mod approx;
pub mod conjugacy;
pub mod dynamics;
pub mod error;
pub mod prime;
pub mod rational;
pub mod stream;
pub mod valuation;

pub use approx::{
    approx_add, approx_from_rational, approx_inv, approx_mul, approx_truncation_value,
    parse_approx, PAdicApprox,
};
pub use conjugacy::{
    check_one_step_identity, classify_preimage, f_approx, f_inverse_approx, f_inverse_dyadic,
    f_rational, parse_fimage, FImage, PreimageClassification,
};
pub use dynamics::{
    cf_eval_exact, cf_eval_limit, cf_expand, convergent, orbit, parse_cf_pairs, sigma_shift_stream,
    sigma_step, tau_step, CFExpansion, CFPair, OrbitRecord, TauStep, Terminal,
};
pub use error::{Error, Result};
pub use prime::PrimeContext;
pub use rational::{format_rational, parse_rational, ExactRational};
pub use stream::{digit_stream_to_rational, parse_stream, rational_to_digit_stream, DigitStream};
pub use valuation::{abs_p, epsilon, floor_p, valuation, Valuation};
