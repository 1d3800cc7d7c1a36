//! Command-line front end.
//!
//! Verbs map one-to-one onto the engines: `decide`, `ideal`, `epsilon`,
//! `approx`, `verify`, `gcurve`, `probe`. Reports come out as text or JSON
//! (`--format`); all stochastic output is fully determined by `--seed`.
//! Exit codes: 0 success, 1 usage or parse error, 2 resource cap hit,
//! 3 precondition violation, 4 verification failure.

use std::fs;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use crate::approximation::{build_sequence, verify_sequence, ApproxSequence};
use crate::decision::{decide, Certificate, Outcome};
use crate::numbers::{NumberError, SurdNumber};
use crate::oracle::{g_curve_check, integrability_probe, Integrability};
use crate::serde_util::rational_from_str;
use crate::staircase::{epsilon0, lct, nonmembers, sum_ratio, Exponent, WeightSpec};
use crate::{Caps, Error};

pub const SCHEMA: &str = "equising/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "equising",
    version,
    about = "Equisingular approximability of toric weights, with exact certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Cap on enumeration boxes (product of per-axis ranges).
    #[arg(long, global = true, default_value_t = 100_000_000)]
    pub max_box: u64,
    /// Cap on interval-refinement precision, in bits.
    #[arg(long, global = true, default_value_t = 4096)]
    pub max_bits: u32,
    /// Cap on the prime support of field inversion.
    #[arg(long, global = true, default_value_t = 4)]
    pub max_primes: usize,
    /// Cap on approximant denominators.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_denominator: u64,
    /// Worker threads for Monte Carlo chunks. Output bytes do not depend
    /// on this: chunks are merged in a fixed order.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Args, Debug)]
pub struct WeightArgs {
    /// Weight exponent, e.g. "2", "3/2", "1+sqrt(2)", "3/2*sqrt(8)".
    /// Repeat once per coordinate.
    #[arg(short = 'a', long = "exponent", required = true)]
    pub exponents: Vec<String>,
    /// Ambient dimension n >= m (defaults to the number of exponents).
    #[arg(long)]
    pub ambient: Option<usize>,
    /// Polydisc radius for the trailing coordinates.
    #[arg(long, default_value = "1/2")]
    pub radius: String,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Decide equisingular approximability and classify maximality.
    Decide {
        #[command(flatten)]
        weight: WeightArgs,
    },
    /// Non-member staircase and minimal generators of I(t*phi).
    Ideal {
        #[command(flatten)]
        weight: WeightArgs,
        /// Scale t > 0.
        #[arg(short = 't', long, default_value = "1")]
        scale: String,
    },
    /// The downscaling margin epsilon0 of the multiplier ideal.
    Epsilon {
        #[command(flatten)]
        weight: WeightArgs,
    },
    /// Build an approximation sequence with staircase certificates.
    Approx {
        #[command(flatten)]
        weight: WeightArgs,
        /// Number of terms.
        #[arg(short = 'K', long, default_value_t = 4)]
        terms: usize,
        /// Window parameter epsilon (defaults to epsilon0/2).
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Verify a sequence produced by `approx` against its weight.
    Verify {
        #[command(flatten)]
        weight: WeightArgs,
        /// Path to a JSON report or bare sequence object.
        #[arg(long)]
        input: String,
        /// Sample points for the pointwise monotonicity check.
        #[arg(long, default_value_t = 100)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Concavity and lower-bound checks for the minimal-integration curve.
    Gcurve {
        #[command(flatten)]
        weight: WeightArgs,
        /// Monomial exponent, comma-separated, e.g. "1,0".
        #[arg(long)]
        alpha: String,
        /// Grid of radii in (0,1], comma-separated rationals.
        #[arg(long, default_value = "1/10,2/10,3/10,4/10,5/10,6/10,7/10,8/10,9/10,1")]
        grid: String,
    },
    /// Dyadic-shell integrability probe for |z^alpha|^2 e^{-2 phi}.
    Probe {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long)]
        alpha: String,
    },
}

impl Cli {
    fn caps(&self) -> Caps {
        Caps {
            max_box: self.max_box,
            max_bits: self.max_bits,
            max_primes: self.max_primes,
            max_denominator: self.max_denominator,
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Number(NumberError::Parse { .. }) => EXIT_USAGE,
        Error::Number(NumberError::ZeroDivision) => EXIT_USAGE,
        Error::Number(_) => EXIT_RESOURCE,
        Error::BoxTooLarge { .. } | Error::DenominatorCap { .. } => EXIT_RESOURCE,
        Error::InvalidWeight(_)
        | Error::NonPositiveWeight { .. }
        | Error::NonPositiveScale
        | Error::DimensionMismatch { .. }
        | Error::InvalidGrid
        | Error::InvalidInput(_) => EXIT_USAGE,
        Error::NotApproximableInput
        | Error::EpsilonTooLarge { .. }
        | Error::NonPositiveEpsilon
        | Error::PreconditionMemberExponent
        | Error::NonIntegrableTerm { .. }
        | Error::DegenerateRegion { .. }
        | Error::TooFewSamples { .. } => EXIT_PRECONDITION,
        Error::CertificateMismatch { .. } | Error::MonotonicityViolation { .. } => {
            EXIT_VERIFICATION
        }
    }
}

/// Parse one weight expression into a positive exponent.
pub fn parse_weight(text: &str) -> Result<SurdNumber, Error> {
    let value: SurdNumber = text.parse().map_err(Error::Number)?;
    Ok(value)
}

fn build_weight(args: &WeightArgs, caps: &Caps) -> Result<WeightSpec, Error> {
    let mut exponents = Vec::with_capacity(args.exponents.len());
    for (index, text) in args.exponents.iter().enumerate() {
        let value = parse_weight(text)?;
        if value.sign_capped(caps.max_bits)? != 1 {
            return Err(Error::NonPositiveWeight { index });
        }
        exponents.push(value);
    }
    let ambient = args.ambient.unwrap_or(exponents.len());
    let radius = parse_rational(&args.radius)?;
    WeightSpec::new(exponents, ambient, radius)
}

fn parse_rational(text: &str) -> Result<BigRational, Error> {
    rational_from_str(text).map_err(Error::InvalidInput)
}

fn parse_alpha(text: &str) -> Result<Exponent, Error> {
    let parts: Result<Vec<u64>, _> = text.split(',').map(|p| p.trim().parse::<u64>()).collect();
    match parts {
        Ok(v) if !v.is_empty() => Ok(Exponent::new(v)),
        _ => Err(Error::InvalidInput(format!(
            "bad exponent list {:?}: expected comma-separated non-negative integers",
            text
        ))),
    }
}

fn parse_grid(text: &str) -> Result<Vec<BigRational>, Error> {
    text.split(',').map(|p| parse_rational(p.trim())).collect()
}

fn outcome_explanation(outcome: Outcome) -> &'static str {
    match outcome {
        Outcome::ApproximableAnalytic => {
            "condition (1) holds: a common scale c with all a_i/c rational exists \
             (condition (1') when c itself is rational)"
        }
        Outcome::ApproximableDiophantine => {
            "condition (2) holds: sum x_i/a_i = 1 has no positive integer solutions"
        }
        Outcome::NotApproximable => {
            "neither condition (1) nor condition (2) holds: the unit equation is \
             solvable and some exponent ratio is irrational"
        }
    }
}

struct Report {
    text: String,
    json: serde_json::Value,
    exit: i32,
}

fn json_report<T: Serialize>(key: &str, weights: &[String], body: &T) -> serde_json::Value {
    json!({
        "schema": SCHEMA,
        "weights": weights,
        key: body,
    })
}

fn run_decide(weight: &WeightArgs, caps: &Caps) -> Result<Report, Error> {
    let w = build_weight(weight, caps)?;
    let verdict = decide(&w, caps)?;
    let mut text = String::new();
    text.push_str(&format!("outcome: {:?}\n", verdict.outcome));
    text.push_str(&format!("  {}\n", outcome_explanation(verdict.outcome)));
    match &verdict.certificate {
        Certificate::Analytic(wit) => {
            let ratios: Vec<String> = wit.ratios.iter().map(|q| q.to_string()).collect();
            text.push_str(&format!(
                "certificate: scale c = {}, ratios ({})\n",
                wit.scale,
                ratios.join(", ")
            ));
        }
        Certificate::Diophantine(cert) => {
            let bx: Vec<String> = cert.search_box.iter().map(|b| b.to_string()).collect();
            text.push_str(&format!(
                "certificate: exhausted search box 1 <= x <= ({})\n",
                bx.join(", ")
            ));
            if let Some(d) = cert.sign_obstruction {
                text.push_str(&format!(
                    "  short-cut: the sqrt({}) component cannot vanish for positive x\n",
                    d
                ));
            }
        }
        Certificate::Solution(cert) => {
            let xs: Vec<String> = cert.solution.iter().map(|x| x.to_string()).collect();
            text.push_str(&format!(
                "certificate: solution x = ({}), ratio a_{}/a_{} = {} is irrational\n",
                xs.join(", "),
                cert.witness_i,
                cert.witness_j,
                cert.witness_ratio
            ));
        }
    }
    text.push_str(&format!("maximal equisingular: {}\n", verdict.maximal));
    Ok(Report {
        text,
        json: json_report("verdict", &w.weight_strings(), &verdict),
        exit: EXIT_OK,
    })
}

fn run_ideal(weight: &WeightArgs, scale: &str, caps: &Caps) -> Result<Report, Error> {
    let w = build_weight(weight, caps)?;
    let t = parse_weight(scale)?;
    let st = nonmembers(&w, &t, caps)?;
    let threshold = lct(&w, caps)?;
    let mut text = String::new();
    text.push_str(&format!("scale t = {}\n", t));
    text.push_str(&format!("lct = {}\n", threshold));
    let nm: Vec<String> = st.nonmembers.iter().map(|e| e.to_string()).collect();
    let gens: Vec<String> = st.generators.iter().map(|e| e.to_string()).collect();
    text.push_str(&format!("nonmembers ({}): {}\n", nm.len(), nm.join(" ")));
    text.push_str(&format!(
        "generators ({}): {}\n",
        gens.len(),
        gens.join(" ")
    ));
    let body = json!({
        "staircase": st,
        "lct": threshold.to_string(),
    });
    Ok(Report {
        text,
        json: json_report("ideal", &w.weight_strings(), &body),
        exit: EXIT_OK,
    })
}

fn run_epsilon(weight: &WeightArgs, caps: &Caps) -> Result<Report, Error> {
    let w = build_weight(weight, caps)?;
    let eps0 = epsilon0(&w, caps)?;
    let text = match &eps0 {
        Some(e) => format!("epsilon0 = {}\n", e),
        None => "epsilon0 absent: the unit equation is solvable, the weight is maximal\n".into(),
    };
    Ok(Report {
        text,
        json: json_report("epsilon0", &w.weight_strings(), &eps0),
        exit: EXIT_OK,
    })
}

fn run_approx(
    weight: &WeightArgs,
    terms: usize,
    epsilon: Option<&str>,
    caps: &Caps,
) -> Result<Report, Error> {
    let w = build_weight(weight, caps)?;
    let eps = epsilon.map(parse_weight).transpose()?;
    let seq = build_sequence(&w, terms, eps, caps)?;
    let mut text = String::new();
    text.push_str(&format!("mode: {:?}\n", seq.mode));
    text.push_str(&format!("epsilon = {}\n", seq.epsilon));
    for (k, term) in seq.terms.iter().enumerate() {
        let parts: Vec<String> = term.iter().map(|q| q.to_string()).collect();
        text.push_str(&format!(
            "term {}: ({})  certificate {}\n",
            k + 1,
            parts.join(", "),
            &seq.certificates[k].digest[..16]
        ));
    }
    Ok(Report {
        text,
        json: json_report("sequence", &w.weight_strings(), &seq),
        exit: EXIT_OK,
    })
}

fn run_verify(
    weight: &WeightArgs,
    input: &str,
    samples: u64,
    seed: u64,
    caps: &Caps,
) -> Result<Report, Error> {
    let w = build_weight(weight, caps)?;
    let raw = fs::read_to_string(input)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {}", input, e)))?;
    let value: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| Error::InvalidInput(format!("bad JSON in {}: {}", input, e)))?;
    let seq_value = value.get("sequence").cloned().unwrap_or(value);
    let seq: ApproxSequence = serde_json::from_value(seq_value)
        .map_err(|e| Error::InvalidInput(format!("bad sequence in {}: {}", input, e)))?;
    let report = verify_sequence(&seq, &w, samples, seed, caps)?;
    let text = format!(
        "verified {} terms, {} certificates, {} sampled points, {} violations\n",
        report.terms, report.certificates_checked, report.samples, report.violations
    );
    Ok(Report {
        text,
        json: json_report("verify", &w.weight_strings(), &report),
        exit: EXIT_OK,
    })
}

fn run_gcurve(weight: &WeightArgs, alpha: &str, grid: &str, caps: &Caps) -> Result<Report, Error> {
    let w = build_weight(weight, caps)?;
    let alpha = parse_alpha(alpha)?;
    let grid = parse_grid(grid)?;
    let report = g_curve_check(&alpha, &w, &grid, caps)?;
    let mut text = String::new();
    text.push_str(&format!(
        "exponent s = {} (maximal: {})\n",
        report.curve.exponent, report.curve.maximal_flag
    ));
    for (r, v) in report.curve.rs.iter().zip(&report.curve.values) {
        text.push_str(&format!("  G(-log {}) = {}\n", r, v));
    }
    text.push_str(&format!(
        "concavity: {}  lower bound: {}  equality on grid: {}\n",
        report.concavity_ok, report.lower_bound_ok, report.equality_on_grid
    ));
    text.push_str(&format!("passed: {}\n", report.passed));
    let exit = if report.passed {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    };
    Ok(Report {
        text,
        json: json_report("gcurve", &w.weight_strings(), &report),
        exit,
    })
}

fn run_probe(weight: &WeightArgs, alpha: &str, caps: &Caps) -> Result<Report, Error> {
    let w = build_weight(weight, caps)?;
    let alpha = parse_alpha(alpha)?;
    let verdict = integrability_probe(&alpha, &w, caps)?;
    let s = sum_ratio(&w, &Exponent::new(alpha.as_slice()[..w.m()].to_vec()), caps)?;
    let text = format!(
        "probe: {:?}\nshell exponent s = {} ({:.6})\n",
        verdict,
        s,
        s.to_f64()
    );
    let body = json!({
        "verdict": verdict,
        "exponent": s.to_string(),
    });
    let exit = if verdict == Integrability::Inconclusive {
        EXIT_VERIFICATION
    } else {
        EXIT_OK
    };
    Ok(Report {
        text,
        json: json_report("probe", &w.weight_strings(), &body),
        exit,
    })
}

fn dispatch(cli: &Cli) -> Result<Report, Error> {
    let caps = cli.caps();
    match &cli.verb {
        Verb::Decide { weight } => run_decide(weight, &caps),
        Verb::Ideal { weight, scale } => run_ideal(weight, scale, &caps),
        Verb::Epsilon { weight } => run_epsilon(weight, &caps),
        Verb::Approx {
            weight,
            terms,
            epsilon,
        } => run_approx(weight, *terms, epsilon.as_deref(), &caps),
        Verb::Verify {
            weight,
            input,
            samples,
            seed,
        } => run_verify(weight, input, *samples, *seed, &caps),
        Verb::Gcurve {
            weight,
            alpha,
            grid,
        } => run_gcurve(weight, alpha, grid, &caps),
        Verb::Probe { weight, alpha } => run_probe(weight, alpha, &caps),
    }
}

/// Run the CLI on the given arguments, writing reports to `out` and errors
/// to `err`; returns the process exit code.
pub fn run<O: Write, E: Write>(args: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on stdout with exit 0
            if e.use_stderr() {
                let _ = write!(err, "{}", e);
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e);
            return EXIT_OK;
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build();
    let result = match pool {
        Ok(pool) => pool.install(|| dispatch(&cli)),
        Err(_) => dispatch(&cli),
    };
    match result {
        Ok(report) => {
            match cli.format {
                Format::Text => {
                    let _ = out.write_all(report.text.as_bytes());
                }
                Format::Json => {
                    let _ = writeln!(
                        out,
                        "{}",
                        serde_json::to_string_pretty(&report.json).unwrap()
                    );
                }
            }
            report.exit
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            exit_code_for(&e)
        }
    }
}
