//! Seeded property suites behind the `selftest` subcommand.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schneider_cf::{
    approx_from_rational, check_one_step_identity, convergent, digit_stream_to_rational, f_approx,
    f_inverse_approx, f_inverse_dyadic, f_rational, orbit, rational_to_digit_stream, sigma_step,
    tau_step, valuation, ExactRational, FImage, PrimeContext, TauStep, Valuation,
};

const SAMPLES: usize = 200;
const HEIGHT: i64 = 1_000_000;

pub struct SuiteReport {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            passed: 0,
            failed: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }
}

fn sample_rational(rng: &mut ChaCha8Rng) -> ExactRational {
    let n = rng.gen_range(-HEIGHT..=HEIGHT);
    let d = rng.gen_range(1..=HEIGHT);
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

fn rng_for(seed: u64, suite: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(suite))
}

pub fn run_all(ctx: &PrimeContext, seed: u64, cap: usize, precision: i64) -> Vec<SuiteReport> {
    vec![
        fixed_points(ctx, cap),
        conjugacy(ctx, seed, cap),
        isometry(ctx, seed, cap),
        round_trip(ctx, seed, cap, precision),
        one_step_identity(ctx, seed, cap),
        convergent_bound(ctx, seed, cap),
    ]
}

fn fixed_points(ctx: &PrimeContext, cap: usize) -> SuiteReport {
    let mut report = SuiteReport::new("fixed_points");
    let zero = ExactRational::from_integer(0.into());
    let minus_p = -ctx.pow_rational(1);

    let f = |x: &ExactRational| f_rational(ctx, x, cap).map(|(image, _)| image.to_rational());
    report.record(f(&zero) == Ok(zero.clone()), || "f(0) != 0".into());
    report.record(f(&minus_p) == Ok(minus_p.clone()), || "f(-p) != -p".into());
    report.record(matches!(tau_step(ctx, &zero), TauStep::Fixed), || {
        "tau(0) not fixed".into()
    });
    report.record(
        matches!(tau_step(ctx, &minus_p), TauStep::Step { next, .. } if next == minus_p),
        || "tau(-p) != -p".into(),
    );
    report.record(sigma_step(ctx, &zero) == zero, || "sigma(0) != 0".into());
    report
}

fn conjugacy(ctx: &PrimeContext, seed: u64, cap: usize) -> SuiteReport {
    let mut report = SuiteReport::new("conjugacy");
    let mut rng = rng_for(seed, 1);
    for _ in 0..SAMPLES {
        let x = sample_rational(&mut rng);
        let next = match tau_step(ctx, &x) {
            TauStep::Fixed => ExactRational::from_integer(0.into()),
            TauStep::Step { next, .. } => next,
        };
        let ok = match (f_rational(ctx, &x, cap), f_rational(ctx, &next, cap)) {
            (Ok((fx, _)), Ok((fnext, _))) => {
                fnext.to_rational() == sigma_step(ctx, &fx.to_rational())
            }
            _ => false,
        };
        report.record(ok, || format!("f(tau(x)) != sigma(f(x)) at x = {x}"));
    }
    report
}

fn isometry(ctx: &PrimeContext, seed: u64, cap: usize) -> SuiteReport {
    let mut report = SuiteReport::new("isometry");
    let mut rng = rng_for(seed, 2);
    for _ in 0..SAMPLES {
        let x = sample_rational(&mut rng);
        let mut y = sample_rational(&mut rng);
        while y == x {
            y = sample_rational(&mut rng);
        }
        let ok = match (f_rational(ctx, &x, cap), f_rational(ctx, &y, cap)) {
            (Ok((fx, _)), Ok((fy, _))) => {
                valuation(ctx, &(fx.to_rational() - fy.to_rational())) == valuation(ctx, &(&x - &y))
            }
            _ => false,
        };
        report.record(ok, || format!("isometry fails at x = {x}, y = {y}"));
    }
    report
}

fn round_trip(ctx: &PrimeContext, seed: u64, cap: usize, precision: i64) -> SuiteReport {
    let mut report = SuiteReport::new("round_trip");
    let mut rng = rng_for(seed, 3);
    for _ in 0..SAMPLES {
        let x = sample_rational(&mut rng);
        let ok = match f_rational(ctx, &x, cap) {
            Ok((image, _)) => f_inverse_dyadic(ctx, &image) == x,
            Err(_) => false,
        };
        report.record(ok, || format!("inverse(f(x)) != x at x = {x}"));

        let mut m = rng.gen_range(-HEIGHT..=HEIGHT);
        if m == 0 {
            m = 1;
        }
        let k = rng.gen_range(-12i64..=12);
        let y = FImage::from_parts(ctx, BigInt::from(m), k);
        let ok = match f_rational(ctx, &f_inverse_dyadic(ctx, &y), cap) {
            Ok((back, _)) => back == y,
            Err(_) => false,
        };
        report.record(ok, || format!("f(inverse(y)) != y at y = {y}"));

        let s = rational_to_digit_stream(ctx, &x);
        report.record(digit_stream_to_rational(ctx, &s) == x, || {
            format!("digit stream round trip fails at x = {x}")
        });

        // Approximation route at the configured precision.
        if !x.is_zero() {
            let n = valuation(ctx, &x).expect_finite() + precision;
            let a = approx_from_rational(ctx, &x, n).unwrap();
            let ok = match f_approx(ctx, &a, cap) {
                Ok(fa) => f_inverse_approx(ctx, &fa) == a,
                Err(_) => false,
            };
            report.record(ok, || {
                format!("approx inverse(f(x)) != x at x = {x}, N = {n}")
            });
        }
    }
    report
}

fn one_step_identity(ctx: &PrimeContext, seed: u64, cap: usize) -> SuiteReport {
    let mut report = SuiteReport::new("one_step_identity");
    let mut rng = rng_for(seed, 4);
    for _ in 0..SAMPLES {
        let mut x = sample_rational(&mut rng);
        // Shift the argument into p*Z_p, where the identity applies.
        if let Valuation::Finite(v) = valuation(ctx, &x) {
            if v < 1 {
                x *= ctx.pow_rational(1 - v);
            }
        }
        let e = rng.gen_range(-8i64..=8);
        let a = rng.gen_range(1..ctx.prime());
        let ok = check_one_step_identity(ctx, e, a, &x, cap) == Ok(true);
        report.record(ok, || {
            format!("identity fails at e = {e}, a = {a}, x = {x}")
        });
    }
    report
}

fn convergent_bound(ctx: &PrimeContext, seed: u64, cap: usize) -> SuiteReport {
    let mut report = SuiteReport::new("convergent_bound");
    let mut rng = rng_for(seed, 5);
    for _ in 0..SAMPLES {
        let x = sample_rational(&mut rng);
        if x.is_zero() {
            report.record(true, String::new);
            continue;
        }
        let record = orbit(ctx, &x, cap);
        if !record.terminated {
            report.record(false, || format!("orbit of {x} hit the cap"));
            continue;
        }
        let v0 = valuation(ctx, &x).expect_finite();
        let mut exponent_sum = 0i64;
        let mut ok = true;
        for n in 0..record.pairs.len() {
            exponent_sum += record.pairs[n].exponent;
            let p_n = convergent(ctx, &record.pairs[..=n]).unwrap();
            let residual = &record.iterates[n + 1];
            if residual.is_zero() {
                ok &= p_n == x;
            } else {
                let sharp = exponent_sum + valuation(ctx, residual).expect_finite();
                let observed = valuation(ctx, &(&x - &p_n));
                ok &= observed == Valuation::Finite(sharp) && sharp > n as i64 + v0;
            }
        }
        report.record(ok, || format!("convergent bound fails at x = {x}"));
    }
    report
}
