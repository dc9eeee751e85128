use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use framelab_cli::config::{parse_algebra, OutputFormat, SuiteConfig};
use framelab_cli::suite::run_suite;
use framelab_core::algebra::AlgebraDescriptor;
use framelab_core::error::CoreError;
use framelab_core::frames::{BoundsWitness, TwoFrame};
use framelab_core::hilbert_module::{check_module_axioms, ModuleVector};
use framelab_core::report::AxiomRecord;
use framelab_core::tensor::tensor_check;
use framelab_core::two_inner::TwoInnerSpace;

#[derive(Parser)]
#[command(name = "framelab", version, about = "Frame machinery over finite-dimensional C*-algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the 2-inner-product and module axiom checkers on seeded random data
    Axioms {
        /// Algebra descriptor: diagonal:N, matrix:K, or tensor(..,..)
        #[arg(long, value_parser = parse_algebra)]
        algebra: AlgebraDescriptor,
        /// Module rank m (>= 2)
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Frame-level checks on an instance file
    Frame {
        #[command(subcommand)]
        cmd: FrameCmd,
    },
    /// Tensor-product checks on two instance files
    Tensor {
        #[command(subcommand)]
        cmd: TensorCmd,
    },
    /// Run the full check battery for a configuration file
    Suite {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum FrameCmd {
    /// Verify claimed frame bounds (from --claim or the instance file)
    Check {
        instance: PathBuf,
        /// Claimed bounds as "A,B"
        #[arg(long, value_parser = parse_claim)]
        claim: Option<(f64, f64)>,
    },
    /// Compute optimal frame bounds
    Bounds { instance: PathBuf },
    /// Reconstruct a vector through the inverse frame operator
    Reconstruct {
        instance: PathBuf,
        /// Index into the instance's vectors, or an inline JSON vector
        #[arg(long)]
        vector: String,
    },
}

#[derive(Subcommand)]
enum TensorCmd {
    /// Build the product frame and check bounds and operator factorization
    Check { left: PathBuf, right: PathBuf },
}

/// Tolerance used by file-driven frame commands.
const CHECK_TOL: f64 = 1e-9;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Axioms {
            algebra,
            rank,
            trials,
            seed,
            tol,
            format,
        } => cmd_axioms(algebra, rank, trials, seed, tol, format),
        Command::Frame { cmd } => match cmd {
            FrameCmd::Check { instance, claim } => cmd_frame_check(&instance, claim),
            FrameCmd::Bounds { instance } => cmd_frame_bounds(&instance),
            FrameCmd::Reconstruct { instance, vector } => cmd_frame_reconstruct(&instance, &vector),
        },
        Command::Tensor { cmd } => match cmd {
            TensorCmd::Check { left, right } => cmd_tensor_check(&left, &right),
        },
        Command::Suite { config } => cmd_suite(&config),
    }
}

#[derive(Serialize)]
struct AxiomsOutput {
    algebra: AlgebraDescriptor,
    rank: usize,
    trials: usize,
    seed: u64,
    tol: f64,
    records: Vec<AxiomRecord>,
    pass: bool,
}

fn cmd_axioms(
    algebra: AlgebraDescriptor,
    rank: usize,
    trials: usize,
    seed: u64,
    tol: f64,
    format: OutputFormat,
) -> Result<bool> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(anyhow!("tolerance must be positive"));
    }
    let space = TwoInnerSpace::new(algebra.clone(), rank).map_err(|e| anyhow!("{e}"))?;
    let t_report = space.check_axioms(trials, seed, tol)?;
    let i_report = check_module_axioms(&algebra, rank, trials, seed, tol)?;
    let mut records = t_report.records;
    records.extend(i_report.records);
    let pass = records.iter().all(|r| r.pass);
    let out = AxiomsOutput {
        algebra,
        rank,
        trials,
        seed,
        tol,
        records,
        pass,
    };
    match format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        OutputFormat::Text => {
            for r in &out.records {
                println!(
                    "{:<4} {:<6} worst residual {:.3e}",
                    r.axiom,
                    if r.pass { "PASS" } else { "FAIL" },
                    r.worst_residual
                );
            }
            println!("overall: {}", if pass { "PASS" } else { "FAIL" });
        }
    }
    Ok(pass)
}

fn load_frame(path: &Path) -> Result<TwoFrame> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading instance file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing instance {}", path.display()))
}

#[derive(Serialize)]
struct FrameCheckOutput {
    claimed: Option<(f64, f64)>,
    optimal: Option<(f64, f64)>,
    pass: bool,
    witness: Option<BoundsWitness>,
    note: Option<String>,
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn cmd_frame_check(instance: &Path, claim: Option<(f64, f64)>) -> Result<bool> {
    let frame = load_frame(instance)?;
    let claim = claim.or(frame.claimed_bounds());
    let out = match (claim, frame.optimal_bounds(CHECK_TOL)) {
        (Some((a, b)), Ok(_)) => {
            let verdict = frame.verify_bounds(a, b, CHECK_TOL).map_err(|e| anyhow!("{e}"))?;
            FrameCheckOutput {
                claimed: Some(verdict.claimed),
                optimal: Some(verdict.optimal),
                pass: verdict.pass,
                witness: verdict.witness,
                note: None,
            }
        }
        (None, Ok(bounds)) => FrameCheckOutput {
            claimed: None,
            optimal: Some(bounds),
            pass: true,
            witness: None,
            note: None,
        },
        (_, Err(CoreError::NotAFrame { a_opt, b_opt })) => FrameCheckOutput {
            claimed: claim,
            optimal: Some((a_opt, b_opt)),
            pass: false,
            witness: None,
            note: Some("not a frame: lower bound is within tolerance of zero".into()),
        },
        (_, Err(e)) => return Err(anyhow!("{e}")),
    };
    emit(&out)?;
    Ok(out.pass)
}

fn cmd_frame_bounds(instance: &Path) -> Result<bool> {
    let frame = load_frame(instance)?;
    let out = match frame.optimal_bounds(CHECK_TOL) {
        Ok(bounds) => FrameCheckOutput {
            claimed: frame.claimed_bounds(),
            optimal: Some(bounds),
            pass: true,
            witness: None,
            note: None,
        },
        Err(CoreError::NotAFrame { a_opt, b_opt }) => FrameCheckOutput {
            claimed: frame.claimed_bounds(),
            optimal: Some((a_opt, b_opt)),
            pass: false,
            witness: None,
            note: Some("not a frame: lower bound is within tolerance of zero".into()),
        },
        Err(e) => return Err(anyhow!("{e}")),
    };
    emit(&out)?;
    Ok(out.pass)
}

#[derive(Serialize)]
struct ReconstructOutput {
    input: ModuleVector,
    projected: ModuleVector,
    reconstructed: ModuleVector,
    residual: f64,
    pass: bool,
}

fn cmd_frame_reconstruct(instance: &Path, vector_spec: &str) -> Result<bool> {
    let frame = load_frame(instance)?;
    let x: ModuleVector = if let Ok(index) = vector_spec.parse::<usize>() {
        frame
            .vectors()
            .get(index)
            .cloned()
            .ok_or_else(|| {
                anyhow!("vector index {index} out of range (frame has {} vectors)", frame.len())
            })?
    } else {
        serde_json::from_str(vector_spec).context("parsing inline vector JSON")?
    };
    let ops = frame.operators(CHECK_TOL).map_err(|e| anyhow!("{e}"))?;
    let projected = ops.quotient().project(&x).map_err(|e| anyhow!("{e}"))?;
    let reconstructed = match frame.reconstruct(&x, CHECK_TOL) {
        Ok(v) => v,
        Err(CoreError::NotAFrame { .. }) => {
            return Err(anyhow!("instance is not a frame; cannot reconstruct"))
        }
        Err(e) => return Err(anyhow!("{e}")),
    };
    let residual = reconstructed.sub(&projected).map_err(|e| anyhow!("{e}"))?.norm()
        / x.norm().max(1e-300);
    let out = ReconstructOutput {
        input: x,
        projected,
        reconstructed,
        residual,
        pass: residual <= 1e-8,
    };
    emit(&out)?;
    Ok(out.pass)
}

fn cmd_tensor_check(left: &Path, right: &Path) -> Result<bool> {
    let left = load_frame(left)?;
    let right = load_frame(right)?;
    let report = tensor_check(&left, &right, CHECK_TOL).map_err(|e| anyhow!("{e}"))?;
    emit(&report)?;
    Ok(report.pass)
}

fn cmd_suite(config_path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(config_path)
        .with_context(|| format!("reading config {}", config_path.display()))?;
    let mut config: SuiteConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", config_path.display()))?;
    config.apply_env_seed()?;
    config.validate()?;
    let report = run_suite(&config)?;
    match config.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        OutputFormat::Text => print!("{}", report.to_text()),
    }
    Ok(report.overall_pass)
}

fn parse_claim(input: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = input.split(',').collect();
    if parts.len() != 2 {
        return Err("claim must be two comma-separated numbers, e.g. 1.0,3.0".into());
    }
    let a: f64 = parts[0].trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let b: f64 = parts[1].trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    Ok((a, b))
}
