//! Validated run configuration shared by every subcommand.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::weights::WeightSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Columns,
    Phi,
    VerifyTheorems,
    Kernel,
    Gap,
    Sample,
    Appendix,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Columns => "columns",
            CommandKind::Phi => "phi",
            CommandKind::VerifyTheorems => "verify-theorems",
            CommandKind::Kernel => "kernel",
            CommandKind::Gap => "gap",
            CommandKind::Sample => "sample",
            CommandKind::Appendix => "appendix",
        }
    }
}

/// Flags accepted by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Exponent of the singular factor, |alpha| < 1/2.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// JSON weight file with `alpha` and `c` = [[re, im], ...] for k = 0..M.
    #[arg(long)]
    pub c_file: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: Format,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub weight: WeightSpec,
    /// False when the command sweeps its own exponents (`appendix`).
    pub alpha_given: bool,
    pub output: OutputSpec,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: CommandKind, args: &CommonArgs) -> Result<Self> {
        let alpha = match (args.alpha, command) {
            (Some(a), _) => a,
            (None, CommandKind::Appendix) => 0.0,
            (None, _) => {
                return Err(Error::InvalidArgument(format!("--alpha is required for {}", command.name())));
            }
        };
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("--alpha must be finite, got {alpha}")));
        }
        let weight = match &args.c_file {
            Some(path) => read_weight(path, args.alpha)?,
            None => WeightSpec::pure(alpha)?,
        };
        Ok(RunConfig {
            command,
            weight,
            alpha_given: args.alpha.is_some(),
            output: OutputSpec {
                path: args.out.clone(),
                format: args.format,
            },
            seed: args.seed,
        })
    }
}

/// The file's `alpha` must agree with `--alpha` when both are present.
fn read_weight(path: &Path, alpha: Option<f64>) -> Result<WeightSpec> {
    let w = WeightSpec::from_path(path)?;
    match alpha {
        Some(a) if a != w.alpha() => Err(Error::InvalidArgument(format!(
            "--alpha {a} disagrees with alpha = {} in {}",
            w.alpha(),
            path.display()
        ))),
        _ => Ok(w),
    }
}
