//! The `opuc-fh` command line.
//!
//! `opuc-fh <command> --alpha F [--c-file PATH] --out PATH --format {csv,json} [--seed U64]`
//! plus per-command flags. Exit codes: 0 success, 2 invalid input,
//! 3 numerical diagnostic failure.

pub mod commands;
pub mod config;
pub mod emit;

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::limit_kernels::{CNormalization, Gauge};
use crate::opuc::Normalization;
use crate::toeplitz::Column;
use crate::{Error, Result};
use commands::{Method, SampleSettings, Theorem};
use config::{CommandKind, CommonArgs, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "opuc-fh", version, about = "OPUC for Fisher-Hartwig weights: columns, kernels, gap probabilities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First or last column of T_n(f)^-1.
    Columns(ColumnsArgs),
    /// Values and derivatives of Phi_N and Phi_N* at z = 1.
    Phi(PhiArgs),
    /// Exact entries against the asymptotic formulas.
    VerifyTheorems(VerifyArgs),
    /// Limit kernel on a (u, v) grid.
    Kernel(KernelArgs),
    /// Counting probabilities from the Fredholm determinant.
    Gap(GapArgs),
    /// Monte Carlo counting statistics.
    Sample(SampleArgs),
    /// Phi_N(1) sweeps for the tabulated exponents.
    Appendix(AppendixArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColumnArg {
    First,
    Last,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    Monic,
    Predictor,
    Raw,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::Monic => Normalization::Monic,
            NormalizationArg::Predictor => Normalization::Predictor,
            NormalizationArg::Raw => Normalization::Raw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    Edge,
    FarEdge,
    Bulk,
    AtOne,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GaugeArg {
    Proof,
    Statement,
}

impl From<GaugeArg> for Gauge {
    fn from(g: GaugeArg) -> Self {
        match g {
            GaugeArg::Proof => Gauge::Proof,
            GaugeArg::Statement => Gauge::Statement,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CNormArg {
    Universal,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Mcmc,
    Dpp,
}

#[derive(Debug, Args)]
pub struct ColumnsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "first")]
    pub column: ColumnArg,
    /// Also report the gap to the dense LU oracle.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub j_max: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "all")]
    pub theorem: TheoremArg,
    #[arg(long, value_delimiter = ',', default_values_t = vec![256usize, 512, 1024, 2048])]
    pub n_list: Vec<usize>,
    #[arg(long, value_enum, default_value = "predictor")]
    pub normalization: NormalizationArg,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 0.25, allow_negative_numbers = true)]
    pub u_min: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub u_max: f64,
    #[arg(long, default_value_t = 16)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "proof")]
    pub gauge: GaugeArg,
    #[arg(long, value_enum, default_value = "universal")]
    pub c_normalization: CNormArg,
    /// Add K_N(u/N, v/N)/N columns for this N.
    #[arg(long)]
    pub compare_n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, num_args = 2, value_names = ["U", "V"], allow_negative_numbers = true, required = true)]
    pub interval: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    pub m_max: usize,
    #[arg(long, default_value_t = 64)]
    pub nodes: usize,
    #[arg(long, value_enum, default_value = "proof")]
    pub gauge: GaugeArg,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "mcmc")]
    pub method: MethodArg,
    #[arg(long, num_args = 2, value_names = ["U", "V"], allow_negative_numbers = true, required = true)]
    pub interval: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub scale: u32,
    /// Grid size of the DPP sampler.
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
}

#[derive(Debug, Args)]
pub struct AppendixArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Exponents d (alpha = -d); defaults to the five tabulated values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub d_list: Option<Vec<f64>>,
    #[arg(long, default_value_t = 400)]
    pub n_min: usize,
    #[arg(long, default_value_t = 640)]
    pub n_max: usize,
    #[arg(long, default_value_t = 6)]
    pub step: usize,
}

fn pair(v: &[f64]) -> [f64; 2] {
    [v[0], v[1]]
}

/// Execute a parsed command and write its output files.
pub fn execute(command: Command) -> Result<Vec<std::path::PathBuf>> {
    let (config, report) = match command {
        Command::Columns(a) => {
            let c = RunConfig::new(CommandKind::Columns, &a.common)?;
            let which = match a.column {
                ColumnArg::First => Column::First,
                ColumnArg::Last => Column::Last,
            };
            let r = commands::columns(&c, a.n, which, a.check)?;
            (c, r)
        }
        Command::Phi(a) => {
            let c = RunConfig::new(CommandKind::Phi, &a.common)?;
            let r = commands::phi(&c, a.n, a.j_max)?;
            (c, r)
        }
        Command::VerifyTheorems(a) => {
            let c = RunConfig::new(CommandKind::VerifyTheorems, &a.common)?;
            let theorems: Vec<Theorem> = match a.theorem {
                TheoremArg::Edge => vec![Theorem::Edge],
                TheoremArg::FarEdge => vec![Theorem::FarEdge],
                TheoremArg::Bulk => vec![Theorem::Bulk],
                TheoremArg::AtOne => vec![Theorem::AtOne],
                TheoremArg::All => Theorem::ALL.to_vec(),
            };
            if a.n_list.iter().any(|&n| n < 8) {
                return Err(Error::InvalidArgument("every N in --n-list must be at least 8".into()));
            }
            let r = commands::verify_theorems(&c, &theorems, &a.n_list, a.normalization.into())?;
            (c, r)
        }
        Command::Kernel(a) => {
            let c = RunConfig::new(CommandKind::Kernel, &a.common)?;
            if a.points == 0 || a.u_min > a.u_max {
                return Err(Error::InvalidArgument("need --points > 0 and --u-min <= --u-max".into()));
            }
            let grid = commands::KernelGrid {
                u_min: a.u_min,
                u_max: a.u_max,
                points: a.points,
            };
            let cn = match a.c_normalization {
                CNormArg::Universal => CNormalization::Universal,
                CNormArg::AsPrinted => CNormalization::AsPrinted,
            };
            let r = commands::kernel(&c, &grid, a.gauge.into(), cn, a.compare_n)?;
            (c, r)
        }
        Command::Gap(a) => {
            let c = RunConfig::new(CommandKind::Gap, &a.common)?;
            let r = commands::gap(&c, pair(&a.interval), a.m_max, a.nodes, a.gauge.into())?;
            (c, r)
        }
        Command::Sample(a) => {
            let c = RunConfig::new(CommandKind::Sample, &a.common)?;
            let s = SampleSettings {
                n: a.n,
                samples: a.samples,
                method: match a.method {
                    MethodArg::Mcmc => Method::Mcmc,
                    MethodArg::Dpp => Method::Dpp,
                },
                interval: pair(&a.interval),
                scale: a.scale,
                grid: a.grid,
                chains: a.chains,
            };
            let r = commands::sample(&c, &s)?;
            (c, r)
        }
        Command::Appendix(a) => {
            let c = RunConfig::new(CommandKind::Appendix, &a.common)?;
            let ds = match (&a.d_list, c.alpha_given) {
                (Some(ds), _) => ds.clone(),
                (None, true) => vec![-c.weight.alpha()],
                (None, false) => commands::APPENDIX_D.to_vec(),
            };
            let r = commands::appendix(&c, &ds, [a.n_min, a.n_max], a.step)?;
            (c, r)
        }
    };
    emit::emit(&report, &config.output.path, config.output.format)
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERICAL
    }
}

/// Parse, run and report; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
