//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Every check is exact equality or an exact valuation identity over the
//! fixed primes, with 1000 seeded samples per prime of height up to 10^6.
//! Run with `cargo test -p schneider-cf-cli --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use std::process::Command;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schneider_cf::{
    approx_from_rational, cf_expand, check_one_step_identity, classify_preimage, convergent,
    digit_stream_to_rational, epsilon, f_approx, f_inverse_dyadic, f_rational, floor_p, orbit,
    rational_to_digit_stream, sigma_shift_stream, sigma_step, tau_step, valuation, ExactRational,
    FImage, PAdicApprox, PreimageClassification, PrimeContext, TauStep, Terminal, Valuation,
};

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 101];
const SAMPLES: usize = 1000;
const HEIGHT: i64 = 1_000_000;
const CAP: usize = 100_000;
const SEED: u64 = 20260809;
const ORACLE_PRECISIONS: [i64; 4] = [8, 16, 32, 64];
const IDENTITY_TRIPLES: usize = 500;
const CONJUGACY_MIN_FRACTION: f64 = 0.999;

fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p).unwrap()
}

fn seeded_rng(p: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ (p << 8) ^ stream)
}

fn sample_rational(rng: &mut ChaCha8Rng) -> ExactRational {
    let n = rng.gen_range(-HEIGHT..=HEIGHT);
    let d = rng.gen_range(1..=HEIGHT);
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

/// The shared per-prime sample set every criterion draws from.
fn sample_set(p: u64) -> Vec<ExactRational> {
    let mut rng = seeded_rng(p, 0);
    (0..SAMPLES).map(|_| sample_rational(&mut rng)).collect()
}

fn f(ctx: &PrimeContext, x: &ExactRational) -> ExactRational {
    f_rational(ctx, x, CAP).unwrap().0.to_rational()
}

#[test]
fn criterion_01_fixed_points() {
    for p in PRIMES {
        let c = ctx(p);
        let zero = ExactRational::zero();
        let minus_p = -c.pow_rational(1);
        assert_eq!(f(&c, &zero), zero, "f(0) != 0 at p = {p}");
        assert_eq!(f(&c, &minus_p), minus_p, "f(-p) != -p at p = {p}");
    }
    println!("criterion 1 (fixed points): PASS");
}

#[test]
fn criterion_02_conjugacy() {
    for p in PRIMES {
        let c = ctx(p);
        let mut holds = 0usize;
        let mut terminating = 0usize;
        let mut unterminated: Vec<String> = Vec::new();
        for x in sample_set(p) {
            let expansion = cf_expand(&c, &x, CAP);
            if !expansion.is_terminated() {
                unterminated.push(x.to_string());
                continue;
            }
            terminating += 1;
            let next = match tau_step(&c, &x) {
                TauStep::Fixed => ExactRational::zero(),
                TauStep::Step { next, .. } => next,
            };
            if f(&c, &next) == sigma_step(&c, &f(&c, &x)) {
                holds += 1;
            }
        }
        if !unterminated.is_empty() {
            println!(
                "criterion 2: p = {p}: {} orbit(s) did not terminate within {CAP}: {:?}",
                unterminated.len(),
                unterminated
            );
        }
        let fraction = holds as f64 / terminating as f64;
        assert!(
            fraction >= CONJUGACY_MIN_FRACTION,
            "conjugacy identity fraction {fraction} < {CONJUGACY_MIN_FRACTION} at p = {p}"
        );
    }
    println!("criterion 2 (conjugacy f∘tau = sigma∘f): PASS");
}

#[test]
fn criterion_03_isometry() {
    for p in PRIMES {
        let c = ctx(p);
        let mut rng = seeded_rng(p, 3);
        for _ in 0..SAMPLES {
            let x = sample_rational(&mut rng);
            let mut y = sample_rational(&mut rng);
            while y == x {
                y = sample_rational(&mut rng);
            }
            let lhs = valuation(&c, &(f(&c, &x) - f(&c, &y)));
            let rhs = valuation(&c, &(&x - &y));
            assert_eq!(lhs, rhs, "isometry fails at p = {p}, x = {x}, y = {y}");
        }
    }
    println!("criterion 3 (isometry): PASS");
}

#[test]
fn criterion_04_range_and_round_trip() {
    for p in PRIMES {
        let c = ctx(p);
        for x in sample_set(p) {
            let (image, _) = f_rational(&c, &x, CAP).unwrap();
            let value = image.to_rational();
            // Independent range check: strip factors of p off the denominator.
            let mut den = value.denom().clone();
            while (&den % c.prime_big()).is_zero() {
                den /= c.prime_big();
            }
            assert!(den.is_one(), "f({x}) has a non-p denominator at p = {p}");
            assert_eq!(
                f_inverse_dyadic(&c, &image),
                x,
                "inverse round trip fails at p = {p}, x = {x}"
            );
        }
        let mut rng = seeded_rng(p, 4);
        for _ in 0..SAMPLES {
            let mut m = rng.gen_range(-HEIGHT..=HEIGHT);
            if m == 0 {
                m = 1;
            }
            let k = rng.gen_range(-20i64..=20);
            let y = FImage::from_parts(&c, BigInt::from(m), k);
            let preimage = f_inverse_dyadic(&c, &y);
            let (back, _) = f_rational(&c, &preimage, CAP).unwrap();
            assert_eq!(back, y, "dyadic round trip fails at p = {p}");
            match classify_preimage(&c, &y.to_rational()) {
                PreimageClassification::Rational(witness) => assert_eq!(witness, preimage),
                PreimageClassification::Irrational => {
                    panic!("dyadic value classified irrational at p = {p}")
                }
            }
        }
    }
    println!("criterion 4 (range f(Q) = Z[1/p] and round trips): PASS");
}

#[test]
fn criterion_05_orbit_termination() {
    let mut overall_max = 0usize;
    for p in PRIMES {
        let c = ctx(p);
        let mut max_len = 0usize;
        for x in sample_set(p) {
            let expansion = cf_expand(&c, &x, CAP);
            assert!(
                expansion.is_terminated(),
                "orbit of {x} did not terminate within {CAP} at p = {p}"
            );
            assert!(matches!(
                expansion.terminal,
                Terminal::Zero | Terminal::MinusP
            ));
            max_len = max_len.max(expansion.pairs.len());
        }
        println!("criterion 5: p = {p}: max orbit length {max_len}");
        overall_max = overall_max.max(max_len);
    }
    println!("criterion 5 (orbit termination, max length {overall_max}): PASS");
}

#[test]
fn criterion_06_convergent_error() {
    for p in PRIMES {
        let c = ctx(p);
        for x in sample_set(p) {
            if x.is_zero() {
                continue;
            }
            let record = orbit(&c, &x, CAP);
            assert!(record.terminated);
            let v0 = valuation(&c, &x).expect_finite();
            let mut exponent_sum = 0i64;
            for n in 0..record.pairs.len() {
                exponent_sum += record.pairs[n].exponent;
                let p_n = convergent(&c, &record.pairs[..=n]).unwrap();
                let residual = &record.iterates[n + 1];
                if residual.is_zero() {
                    assert_eq!(p_n, x, "P_n != x with zero residual at p = {p}, x = {x}");
                } else {
                    let observed = valuation(&c, &(&x - &p_n)).expect_finite();
                    let sharp = exponent_sum + valuation(&c, residual).expect_finite();
                    assert_eq!(
                        observed, sharp,
                        "sharp error fails at p = {p}, x = {x}, n = {n}"
                    );
                    assert!(
                        observed > n as i64 + v0,
                        "coarse bound fails at p = {p}, x = {x}, n = {n}"
                    );
                }
            }
        }
    }
    println!("criterion 6 (sharp and coarse convergent error): PASS");
}

#[test]
fn criterion_07_one_step_identity() {
    for p in PRIMES {
        let c = ctx(p);
        let mut rng = seeded_rng(p, 7);
        for _ in 0..IDENTITY_TRIPLES {
            let mut x = sample_rational(&mut rng);
            if let Valuation::Finite(v) = valuation(&c, &x) {
                if v < 1 {
                    x *= c.pow_rational(1 - v);
                }
            }
            let e = rng.gen_range(-8i64..=8);
            let a = rng.gen_range(1..p);
            assert_eq!(
                check_one_step_identity(&c, e, a, &x, CAP),
                Ok(true),
                "identity fails at p = {p}, e = {e}, a = {a}, x = {x}"
            );
        }
    }
    println!("criterion 7 (one-step identity for f): PASS");
}

#[test]
fn criterion_08_oracle_equivalence() {
    for p in PRIMES {
        let c = ctx(p);
        for x in sample_set(p) {
            let exact_image = f(&c, &x);
            for n in ORACLE_PRECISIONS {
                let truncated = match valuation(&c, &x) {
                    Valuation::Infinity => PAdicApprox::exact_zero(),
                    Valuation::Finite(v) if v >= n => PAdicApprox::zero_at_precision(n),
                    Valuation::Finite(_) => approx_from_rational(&c, &x, n).unwrap(),
                };
                let via_approx = f_approx(&c, &truncated, CAP).unwrap();
                // The exact route, truncated to the same residue class.
                let via_exact = match valuation(&c, &exact_image) {
                    Valuation::Infinity => PAdicApprox::exact_zero(),
                    Valuation::Finite(v) if v >= n => PAdicApprox::zero_at_precision(n),
                    Valuation::Finite(_) => approx_from_rational(&c, &exact_image, n).unwrap(),
                };
                assert_eq!(
                    via_approx, via_exact,
                    "routes disagree at p = {p}, x = {x}, N = {n}"
                );
            }
        }
    }
    println!("criterion 8 (approximate route matches exact route): PASS");
}

#[test]
fn criterion_09_expansion_machinery() {
    for p in PRIMES {
        let c = ctx(p);
        for x in sample_set(p) {
            // Digit stream round trip.
            let stream = rational_to_digit_stream(&c, &x);
            assert_eq!(
                digit_stream_to_rational(&c, &stream),
                x,
                "stream round trip fails at p = {p}, x = {x}"
            );
            // Shift commutation.
            let shifted = sigma_shift_stream(&c, &stream);
            assert_eq!(
                digit_stream_to_rational(&c, &shifted),
                sigma_step(&c, &x),
                "shift commutation fails at p = {p}, x = {x}"
            );
            // Partial sums of the digit expansion agree modulo p^{E_N}.
            let mut partial = ExactRational::zero();
            let mut product = ExactRational::one();
            let mut exponent_sum = 0i64;
            let mut current = x.clone();
            let mut exact = x.is_zero();
            for _ in 0..10 {
                if current.is_zero() {
                    exact = true;
                    break;
                }
                let digit = floor_p(&c, &epsilon(&c, &current)).unwrap();
                let v = valuation(&c, &current).expect_finite();
                product *= c.pow_rational(v);
                exponent_sum += v;
                partial += ExactRational::from_integer(digit.into()) * &product;
                current = sigma_step(&c, &current);
            }
            if exact {
                assert_eq!(partial, x, "partial sums fail at p = {p}, x = {x}");
            } else {
                let diff = &x - &partial;
                assert!(
                    valuation(&c, &diff) >= Valuation::Finite(exponent_sum),
                    "partial sums fail at p = {p}, x = {x}"
                );
            }
        }
    }
    println!("criterion 9 (expansion and shift machinery): PASS");
}

#[test]
fn criterion_10_cli_round_trip() {
    let bin = env!("CARGO_BIN_EXE_schneider-cf");
    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().expect("binary runs");
        (
            out.status.code(),
            String::from_utf8_lossy(&out.stdout).trim().to_string(),
        )
    };

    let (code, stdout) = run(&["conjugate", "-p", "2", "4/3"]);
    assert_eq!((code, stdout.as_str()), (Some(0), "3*2^2"));

    let (code, stdout) = run(&["invert", "-p", "2", "3*2^2"]);
    assert_eq!((code, stdout.as_str()), (Some(0), "4/3"));

    let (code, stdout) = run(&["classify", "-p", "2", "1/3"]);
    assert_eq!(code, Some(0));
    assert_eq!(stdout, "irrational preimage");

    let (code, stdout) = run(&["classify", "-p", "2", "--format", "structured", "1/3"]);
    assert_eq!(code, Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["irrational"], true);

    let (code, _) = run(&["selftest", "-p", "2", "--seed", "1"]);
    assert_eq!(code, Some(0), "selftest must exit 0");

    println!("criterion 10 (end-to-end CLI round trip): PASS");
}
