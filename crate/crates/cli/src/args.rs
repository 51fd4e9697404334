use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Ray tracing, wavefront prediction and consistency checks for the
/// rotating cosmic string.
///
/// Settings come from `--config` (a flat JSON object) and are overridden by
/// command-line flags. Exit status: 0 when every check passes, 1 when a
/// check fails, 2 on usage or I/O errors.
#[derive(Debug, Parser)]
#[command(name = "cosmic-string", version)]
pub struct Cli {
    /// Flat JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// `json` or `csv` (trajectories and radial modes only).
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Rotation parameter `A` (nonzero).
    #[arg(long = "A", global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one null bicharacteristic.
    Trace(TraceArgs),
    /// Predict the forward wavefront set of a seed list.
    PredictWf(PredictArgs),
    /// Build the region constants and verify the backward-tracing properties.
    RegionCheck(RegionArgs),
    /// Rayleigh quotients of the fiber operator and Mellin transform checks.
    Spectral(SpectralArgs),
    /// Solve the radial mode equation.
    Mode(ModeArgs),
    /// Time jump of near-miss rays passing the string.
    Jump(JumpArgs),
    /// Causal type of the closed circle at a given radius.
    Ctc(CtcArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct FlowArgs {
    #[arg(long)]
    pub s_max: Option<f64>,
    #[arg(long)]
    pub r_stop: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Absolute and relative integration tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TraceArgs {
    /// Standard-chart seed `t,r,phi,tau,xi,eta`.
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// `standard` or `b`.
    #[arg(long)]
    pub chart: Option<String>,
    /// `forward` or `backward` in the flow parameter.
    #[arg(long)]
    pub direction: Option<String>,
    /// Spacing of the output parameter grid.
    #[arg(long)]
    pub step: Option<f64>,
    /// Record the integrator's accepted steps instead of a uniform grid.
    #[arg(long)]
    pub adaptive: bool,
    /// Evaluate the exact flat-chart line instead of integrating.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub flow: FlowArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PredictArgs {
    /// JSON array of standard-chart seeds.
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    /// `refined` or `theorem_bound`.
    #[arg(long)]
    pub mode: Option<String>,
    #[command(flatten)]
    pub flow: FlowArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RegionArgs {
    #[arg(long = "R0")]
    pub r0: Option<f64>,
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Number of admissible seeds to trace.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub rng_seed: Option<u64>,
    #[arg(long)]
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpectralArgs {
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long)]
    pub k_max: Option<u32>,
    #[arg(long)]
    pub m_max: Option<u32>,
    /// Comma-separated real Mellin frequencies.
    #[arg(long, allow_hyphen_values = true)]
    pub mellin_xi: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModeArgs {
    /// Angular mode number.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<i64>,
    /// Time frequency.
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub r_start: Option<f64>,
    #[arg(long)]
    pub r_end: Option<f64>,
    /// Number of output radii, endpoints included.
    #[arg(long)]
    pub points: Option<usize>,
    /// Initial value `re[,im]`; defaults to the Bessel solution.
    #[arg(long, allow_hyphen_values = true)]
    pub u0: Option<String>,
    /// Initial derivative `re[,im]`.
    #[arg(long, allow_hyphen_values = true)]
    pub du0: Option<String>,
    /// Constant perturbation coefficients `f1..f4` as 8 numbers (re,im pairs).
    #[arg(long, allow_hyphen_values = true)]
    pub upsilon: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct JumpArgs {
    /// Comma-separated impact parameters.
    #[arg(long)]
    pub b: Option<String>,
    /// `left`, `right` or `both`.
    #[arg(long)]
    pub side: Option<String>,
    /// Half-length of the parameter window.
    #[arg(long)]
    pub s1: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CtcArgs {
    #[arg(long)]
    pub r0: Option<f64>,
}
