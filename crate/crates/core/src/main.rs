//! Batch driver: parse a problem file, run a computation or a verification
//! battery, and emit JSON.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse error,
//! 3 validation error.

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use num_complex::Complex64;
use std::path::PathBuf;
use std::process::ExitCode;

use nctheta::classical::{theta, TruncationPolicy};
use nctheta::problem::{from_wire, twisted_to_wire, Problem, ProblemSpec, WireComplex};
use nctheta::quantum::{shifted_theta, QuantumThetaParams};
use nctheta::verify::{run_suite, Suite};

#[derive(Parser)]
#[command(name = "nctheta", about = "Theta functions on quantum tori: computation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    problem_file: PathBuf,
    /// Override the problem file's truncation radius.
    #[arg(long)]
    radius: Option<i64>,
    /// Override the problem file's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the classical theta function at a point z.
    Theta {
        #[command(flatten)]
        common: Common,
        /// Argument z as a JSON array of [re, im] pairs; defaults to 0.
        #[arg(long)]
        z: Option<String>,
    },
    /// Materialize the quantum theta function as a TwistedElement.
    Qtheta {
        #[command(flatten)]
        common: Common,
    },
    /// Run verification batteries and report per-check defects.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Which battery to run.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Multiplier applied to every tolerance.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
}

const EXIT_VERIFICATION: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

fn load_problem(common: &Common) -> Result<Problem, u8> {
    let text = std::fs::read_to_string(&common.problem_file).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", common.problem_file.display());
        EXIT_PARSE
    })?;
    let spec = ProblemSpec::parse(&text).map_err(|e| {
        eprintln!("error: parse: {e}");
        EXIT_PARSE
    })?;
    let mut problem = spec.validate().map_err(|e| {
        eprintln!("error: validation: {e}");
        EXIT_VALIDATION
    })?;
    if let Some(r) = common.radius {
        problem.trunc = TruncationPolicy::new(r);
    }
    if let Some(s) = common.seed {
        problem.seed = s;
    }
    Ok(problem)
}

fn emit(common: &Common, payload: &str) -> Result<(), u8> {
    match &common.out {
        Some(path) => std::fs::write(path, payload).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_VALIDATION
        }),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

fn parse_z(raw: &Option<String>, n: usize) -> Result<DVector<Complex64>, u8> {
    match raw {
        None => Ok(DVector::zeros(n)),
        Some(s) => {
            let wire: Vec<WireComplex> = serde_json::from_str(s).map_err(|e| {
                eprintln!("error: parse z: {e}");
                EXIT_PARSE
            })?;
            if wire.len() != n {
                eprintln!("error: validation: z has {} entries, expected {n}", wire.len());
                return Err(EXIT_VALIDATION);
            }
            Ok(DVector::from_iterator(n, wire.into_iter().map(from_wire)))
        }
    }
}

fn cmd_theta(common: &Common, z: &Option<String>) -> Result<(), u8> {
    let problem = load_problem(common)?;
    let z = parse_z(z, problem.t.n())?;
    let value = theta(&z, &problem.t, &problem.trunc).map_err(|e| {
        eprintln!("error: validation: {e}");
        EXIT_VALIDATION
    })?;
    let payload = serde_json::json!({
        "value": [value.value.re, value.value.im],
        "tail_bound": value.tail_bound,
    });
    emit(common, &payload.to_string())
}

fn cmd_qtheta(common: &Common) -> Result<(), u8> {
    let problem = load_problem(common)?;
    let params =
        QuantumThetaParams::new(problem.t.clone(), problem.c.clone(), problem.d.clone()).map_err(
            |e| {
                eprintln!("error: validation: {e}");
                EXIT_VALIDATION
            },
        )?;
    let element = shifted_theta(&params)
        .map_err(|e| {
            eprintln!("error: validation: {e}");
            EXIT_VALIDATION
        })?
        .materialize(problem.trunc.radius);
    let wire = twisted_to_wire(&element);
    let payload = serde_json::to_string_pretty(&wire).expect("serializable");
    emit(common, &payload)
}

fn cmd_verify(common: &Common, suite: &str, tolerance_scale: f64) -> Result<(), u8> {
    let problem = load_problem(common)?;
    let suite: Suite = suite.parse().map_err(|e| {
        eprintln!("error: parse: {e}");
        EXIT_PARSE
    })?;
    let reports = run_suite(suite, &problem, tolerance_scale).map_err(|e| {
        eprintln!("error: validation: {e}");
        EXIT_VALIDATION
    })?;
    let payload = serde_json::to_string_pretty(&reports).expect("serializable");
    emit(common, &payload)?;
    for r in &reports {
        eprintln!(
            "{} {}: defect {:.3e} vs tolerance {:.3e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.check_name,
            r.max_defect,
            r.tolerance
        );
    }
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(EXIT_VERIFICATION)
    }
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("NCTHETA_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Theta { common, z } => cmd_theta(common, z),
        Command::Qtheta { common } => cmd_qtheta(common),
        Command::Verify { common, suite, tolerance_scale } => {
            cmd_verify(common, suite, *tolerance_scale)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
