//! Suite configuration and the command-line algebra syntax.

use anyhow::{anyhow, bail, Result};
use framelab_core::algebra::AlgebraDescriptor;
use serde::{Deserialize, Serialize};

/// Environment variable that overrides the config seed when set.
pub const SEED_ENV_VAR: &str = "FRAMELAB_SEED";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub algebra: AlgebraDescriptor,
    pub rank: usize,
    pub frame_size: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    #[serde(default)]
    pub format: OutputFormat,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            algebra: AlgebraDescriptor::diagonal(3),
            rank: 4,
            frame_size: 6,
            trials: 500,
            seed: 1,
            tol: 1e-9,
            format: OutputFormat::Json,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rank < 2 {
            bail!("rank must be >= 2, got {}", self.rank);
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            bail!("tolerance must be positive, got {}", self.tol);
        }
        Ok(())
    }

    /// Applies the FRAMELAB_SEED override when the variable is set.
    pub fn apply_env_seed(&mut self) -> Result<()> {
        if let Ok(raw) = std::env::var(SEED_ENV_VAR) {
            self.seed = raw
                .parse()
                .map_err(|_| anyhow!("{SEED_ENV_VAR} must be a 64-bit unsigned integer, got {raw:?}"))?;
        }
        Ok(())
    }
}

/// Parses the command-line algebra syntax:
/// `diagonal:N`, `matrix:K`, or `tensor(<desc>,<desc>)`.
pub fn parse_algebra(input: &str) -> Result<AlgebraDescriptor, String> {
    let (desc, rest) = parse_algebra_inner(input.trim())?;
    if !rest.is_empty() {
        return Err(format!("trailing input {rest:?} after algebra descriptor"));
    }
    Ok(desc)
}

fn parse_algebra_inner(input: &str) -> Result<(AlgebraDescriptor, &str), String> {
    if let Some(rest) = input.strip_prefix("diagonal:") {
        let (n, rest) = take_number(rest)?;
        if n == 0 {
            return Err("diagonal algebra needs n >= 1".into());
        }
        Ok((AlgebraDescriptor::diagonal(n), rest))
    } else if let Some(rest) = input.strip_prefix("matrix:") {
        let (k, rest) = take_number(rest)?;
        if k == 0 {
            return Err("matrix algebra needs k >= 1".into());
        }
        Ok((AlgebraDescriptor::matrix(k), rest))
    } else if let Some(rest) = input.strip_prefix("tensor(") {
        let (left, rest) = parse_algebra_inner(rest)?;
        let rest = rest
            .strip_prefix(',')
            .ok_or_else(|| "expected ',' between tensor factors".to_string())?;
        let (right, rest) = parse_algebra_inner(rest)?;
        let rest = rest
            .strip_prefix(')')
            .ok_or_else(|| "expected ')' closing tensor descriptor".to_string())?;
        Ok((AlgebraDescriptor::tensor_of(left, right), rest))
    } else {
        Err(format!(
            "cannot parse algebra from {input:?}; expected diagonal:N, matrix:K, or tensor(..,..)"
        ))
    }
}

fn take_number(input: &str) -> Result<(usize, &str), String> {
    let end = input
        .find(|c: char| !c.is_ascii_digit())
        .unwrap_or(input.len());
    if end == 0 {
        return Err(format!("expected a number at {input:?}"));
    }
    let n = input[..end]
        .parse()
        .map_err(|e| format!("bad number in algebra descriptor: {e}"))?;
    Ok((n, &input[end..]))
}
