//! Command line front end for Schneider p-adic continued fractions.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use schneider_cf::{
    cf_eval_exact, cf_expand, classify_preimage, f_approx, f_inverse_approx, f_inverse_dyadic,
    f_rational, format_rational, parse_approx, parse_cf_pairs, parse_fimage, parse_rational,
    rational_to_digit_stream, sigma_step, tau_step, Error, ExactRational, FImage,
    PreimageClassification, PrimeContext, TauStep, Terminal,
};

mod selftest;

#[derive(Parser)]
#[command(
    name = "schneider-cf",
    version,
    about = "Exact Schneider p-adic continued fractions, the digit shift, and the conjugating isometry between them",
    after_help = "Literals: rational `num/den` or `num`; p-adic approximation `e:d0,d1,...` \
                  (exact zero: `zero`); element of Z[1/p] `m*p^k` or any rational literal; \
                  continued fraction data `\"(e0,a0)(e1,a1)...\"`.\n\
                  Write negative literals after `--` (e.g. `expand -p 2 -- -4/3`) or quoted.\n\
                  Exit status: 0 success; 1 error; 2 expansion truncated at the cap."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Prime p (checked deterministically)
    #[arg(short = 'p', long)]
    prime: u64,
    /// Working precision in digits for the selftest approximation suite
    /// (approximation literals carry their own absolute precision)
    #[arg(short = 'N', long, default_value_t = 32, value_parser = clap::value_parser!(i64).range(1..))]
    precision: i64,
    /// Iteration cap for orbit expansion
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for the randomized selftest suites
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapKind {
    Tau,
    Sigma,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a rational into continued fraction pairs until 0 or -p
    #[command(allow_negative_numbers = true)]
    Expand {
        #[command(flatten)]
        common: Common,
        /// Rational literal
        x: String,
    },
    /// Evaluate continued fraction pairs with an exact tail
    #[command(allow_negative_numbers = true)]
    Eval {
        #[command(flatten)]
        common: Common,
        /// Pairs literal, e.g. "(2,1)(1,1)" (may be empty)
        pairs: String,
        /// Rational tail, 0 or an element of p*Z_p
        tail: String,
    },
    /// Apply the conjugating isometry f to a rational or an approximation
    #[command(allow_negative_numbers = true)]
    Conjugate {
        #[command(flatten)]
        common: Common,
        /// Rational literal, or p-adic literal `e:d0,d1,...`
        x: String,
    },
    /// Apply the inverse of f to an element of Z[1/p] or an approximation
    #[command(allow_negative_numbers = true)]
    Invert {
        #[command(flatten)]
        common: Common,
        /// `m*p^k`, a rational literal in Z[1/p], or a p-adic literal
        y: String,
    },
    /// Decide whether a rational has a rational preimage under f
    #[command(allow_negative_numbers = true)]
    Classify {
        #[command(flatten)]
        common: Common,
        /// Rational literal
        y: String,
    },
    /// Trace iterates of the continued fraction map or the digit shift
    #[command(allow_negative_numbers = true)]
    Orbit {
        #[command(flatten)]
        common: Common,
        /// Rational literal
        x: String,
        /// Maximum number of steps to take
        steps: usize,
        /// Which map to iterate
        #[arg(long, value_enum, default_value_t = MapKind::Tau)]
        map: MapKind,
    },
    /// Print the eventually periodic digit expansion of a rational
    #[command(allow_negative_numbers = true)]
    Digits {
        #[command(flatten)]
        common: Common,
        /// Rational literal
        x: String,
    },
    /// Run the seeded property suites and report per-suite counts
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

struct CmdOutput {
    text: String,
    json: Map<String, Value>,
    exit: i32,
}

impl CmdOutput {
    fn new(text: String, json: Map<String, Value>) -> Self {
        Self {
            text,
            json,
            exit: 0,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let (format, result) = dispatch(cli.command);
    let code = match result {
        Ok(out) => {
            match format {
                Format::Text => println!("{}", out.text),
                Format::Structured => {
                    let mut doc = Map::new();
                    doc.insert("status".into(), json!("ok"));
                    doc.extend(out.json);
                    println!("{}", Value::Object(doc));
                }
            }
            out.exit
        }
        Err(err) => {
            match format {
                Format::Text => {
                    eprintln!("error: {err}");
                    if matches!(err, Error::NotDyadic(_)) {
                        eprintln!("hint: `classify` decides whether a rational lies in Z[1/p]");
                    }
                }
                Format::Structured => {
                    let doc = json!({
                        "status": "error",
                        "kind": error_kind(&err),
                        "message": err.to_string(),
                    });
                    println!("{doc}");
                }
            }
            1
        }
    };
    std::process::exit(code);
}

fn dispatch(command: Command) -> (Format, Result<CmdOutput, Error>) {
    match command {
        Command::Expand { common, x } => (common.format, cmd_expand(&common, &x)),
        Command::Eval {
            common,
            pairs,
            tail,
        } => (common.format, cmd_eval(&common, &pairs, &tail)),
        Command::Conjugate { common, x } => (common.format, cmd_conjugate(&common, &x)),
        Command::Invert { common, y } => (common.format, cmd_invert(&common, &y)),
        Command::Classify { common, y } => (common.format, cmd_classify(&common, &y)),
        Command::Orbit {
            common,
            x,
            steps,
            map,
        } => (common.format, cmd_orbit(&common, &x, steps, map)),
        Command::Digits { common, x } => (common.format, cmd_digits(&common, &x)),
        Command::Selftest { common } => (common.format, cmd_selftest(&common)),
    }
}

fn context(common: &Common) -> Result<PrimeContext, Error> {
    PrimeContext::new(common.prime)
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::NotPrime(_) => "invalid_prime",
        Error::NotIntegral { .. } => "not_integral",
        Error::PrecisionTooLow { .. } => "precision_too_low",
        Error::DivisionByZero => "division_by_zero",
        Error::PrecisionExhausted => "precision_exhausted",
        Error::SourceExhausted { .. } => "source_exhausted",
        Error::OrbitNotTerminated { .. } => "orbit_not_terminated",
        Error::EmptyInput => "empty_input",
        Error::NotDyadic(_) => "not_dyadic",
        Error::InvariantViolation(_) => "invariant_violation",
        Error::ParseError(_) => "parse_error",
    }
}

fn terminal_json(terminal: &Terminal) -> Value {
    match terminal {
        Terminal::Zero => json!("zero"),
        Terminal::MinusP => json!("minus_p"),
        Terminal::Truncated(residual) => json!({ "truncated": format_rational(residual) }),
    }
}

fn cmd_expand(common: &Common, x: &str) -> Result<CmdOutput, Error> {
    let ctx = context(common)?;
    let x = parse_rational(x)?;
    let expansion = cf_expand(&ctx, &x, common.cap as usize);
    let pairs_text: String = expansion.pairs.iter().map(|p| p.to_string()).collect();
    let terminal_text = match &expansion.terminal {
        Terminal::Zero => "zero".to_string(),
        Terminal::MinusP => "minus_p".to_string(),
        Terminal::Truncated(residual) => format!("truncated {}", format_rational(residual)),
    };
    let mut json = Map::new();
    json.insert(
        "pairs".into(),
        Value::Array(
            expansion
                .pairs
                .iter()
                .map(|p| json!([p.exponent, p.digit]))
                .collect(),
        ),
    );
    json.insert("terminal".into(), terminal_json(&expansion.terminal));
    json.insert("orbit_length".into(), json!(expansion.pairs.len()));
    let text = format!(
        "pairs: {}\nterminal: {}\norbit length: {}",
        pairs_text,
        terminal_text,
        expansion.pairs.len()
    );
    let mut out = CmdOutput::new(text, json);
    if !expansion.is_terminated() {
        out.exit = 2;
    }
    Ok(out)
}

fn cmd_eval(common: &Common, pairs: &str, tail: &str) -> Result<CmdOutput, Error> {
    let ctx = context(common)?;
    let pairs = parse_cf_pairs(pairs)?;
    let tail = parse_rational(tail)?;
    let value = cf_eval_exact(&ctx, &pairs, &tail)?;
    let rendered = format_rational(&value);
    let mut json = Map::new();
    json.insert("value".into(), json!(rendered));
    Ok(CmdOutput::new(rendered, json))
}

fn cmd_conjugate(common: &Common, x: &str) -> Result<CmdOutput, Error> {
    let ctx = context(common)?;
    let cap = common.cap as usize;
    if is_approx_literal(x) {
        let a = parse_approx(&ctx, x)?;
        let image = f_approx(&ctx, &a, cap)?;
        let rendered = image.to_string();
        let mut json = Map::new();
        json.insert("approx".into(), json!(rendered));
        return Ok(CmdOutput::new(rendered, json));
    }
    let x = parse_rational(x)?;
    let (image, expansion) = f_rational(&ctx, &x, cap)?;
    let rendered = image.to_string();
    let mut json = Map::new();
    json.insert("image".into(), json!(rendered));
    json.insert("orbit_length".into(), json!(expansion.pairs.len()));
    Ok(CmdOutput::new(rendered, json))
}

fn cmd_invert(common: &Common, y: &str) -> Result<CmdOutput, Error> {
    let ctx = context(common)?;
    if is_approx_literal(y) {
        let a = parse_approx(&ctx, y)?;
        let preimage = f_inverse_approx(&ctx, &a);
        let rendered = preimage.to_string();
        let mut json = Map::new();
        json.insert("approx".into(), json!(rendered));
        return Ok(CmdOutput::new(rendered, json));
    }
    let image = if y.contains('*') {
        parse_fimage(&ctx, y)?
    } else {
        FImage::from_rational(&ctx, &parse_rational(y)?)?
    };
    let preimage = f_inverse_dyadic(&ctx, &image);
    let rendered = format_rational(&preimage);
    let mut json = Map::new();
    json.insert("preimage".into(), json!(rendered));
    Ok(CmdOutput::new(rendered, json))
}

fn cmd_classify(common: &Common, y: &str) -> Result<CmdOutput, Error> {
    let ctx = context(common)?;
    let y = parse_rational(y)?;
    let mut json = Map::new();
    let text = match classify_preimage(&ctx, &y) {
        PreimageClassification::Rational(witness) => {
            let rendered = format_rational(&witness);
            json.insert("rational".into(), json!(rendered));
            format!("rational preimage: {rendered}")
        }
        PreimageClassification::Irrational => {
            json.insert("irrational".into(), json!(true));
            "irrational preimage".to_string()
        }
    };
    Ok(CmdOutput::new(text, json))
}

fn cmd_orbit(common: &Common, x: &str, steps: usize, map: MapKind) -> Result<CmdOutput, Error> {
    let ctx = context(common)?;
    let x = parse_rational(x)?;
    let step = |v: &ExactRational| -> ExactRational {
        match map {
            MapKind::Tau => match tau_step(&ctx, v) {
                TauStep::Fixed => ExactRational::from_integer(0.into()),
                TauStep::Step { next, .. } => next,
            },
            MapKind::Sigma => sigma_step(&ctx, v),
        }
    };
    let mut iterates = vec![x];
    let mut fixed = false;
    for _ in 0..steps {
        let current = iterates.last().unwrap();
        let next = step(current);
        if next == *current {
            fixed = true;
            break;
        }
        iterates.push(next);
    }
    let rendered: Vec<String> = iterates.iter().map(format_rational).collect();
    let mut lines = rendered.clone();
    if fixed {
        let last = lines.last_mut().unwrap();
        last.push_str(" (fixed)");
    }
    let mut json = Map::new();
    json.insert(
        "map".into(),
        match map {
            MapKind::Tau => json!("tau"),
            MapKind::Sigma => json!("sigma"),
        },
    );
    json.insert("iterates".into(), json!(rendered));
    json.insert("fixed".into(), json!(fixed));
    Ok(CmdOutput::new(lines.join("\n"), json))
}

fn cmd_digits(common: &Common, x: &str) -> Result<CmdOutput, Error> {
    let ctx = context(common)?;
    let x = parse_rational(x)?;
    let stream = rational_to_digit_stream(&ctx, &x);
    let rendered = stream.to_string();
    let mut json = Map::new();
    json.insert("stream".into(), json!(rendered));
    if stream.is_zero() {
        json.insert("zero".into(), json!(true));
    } else {
        json.insert(
            "valuation".into(),
            json!(stream.valuation().expect_finite()),
        );
        json.insert("preperiod".into(), json!(stream.preperiod()));
        json.insert("period".into(), json!(stream.period()));
    }
    Ok(CmdOutput::new(rendered, json))
}

fn cmd_selftest(common: &Common) -> Result<CmdOutput, Error> {
    let ctx = context(common)?;
    let reports = selftest::run_all(&ctx, common.seed, common.cap as usize, common.precision);
    let mut lines = Vec::new();
    let mut suites = Vec::new();
    let mut all_passed = true;
    for report in &reports {
        let mut line = format!(
            "{}: passed {} failed {}",
            report.name, report.passed, report.failed
        );
        if let Some(first) = &report.first_failure {
            line.push_str(&format!(" (first failure: {first})"));
        }
        lines.push(line);
        suites.push(json!({
            "name": report.name,
            "passed": report.passed,
            "failed": report.failed,
        }));
        all_passed &= report.failed == 0;
    }
    lines.push(if all_passed {
        "all suites passed".to_string()
    } else {
        "FAILURES detected".to_string()
    });
    let mut json = Map::new();
    json.insert("suites".into(), Value::Array(suites));
    json.insert("all_passed".into(), json!(all_passed));
    let mut out = CmdOutput::new(lines.join("\n"), json);
    if !all_passed {
        out.exit = 1;
    }
    Ok(out)
}

/// Approximation literals carry a `:` (or are the exact-zero word), which no
/// rational or mantissa-exponent literal does.
fn is_approx_literal(s: &str) -> bool {
    s.contains(':') || s.trim() == "zero"
}
