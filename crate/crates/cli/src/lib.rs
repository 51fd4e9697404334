//! Command-line front end for the `cosmic-string` toolkit.
//!
//! Every command writes one machine-readable report (JSON, or CSV for
//! sampled curves) and maps its outcome to the exit status. Batch commands
//! run in parallel but reduce in input order, so a fixed configuration and
//! RNG seed always give byte-identical output.

// `!(x > 0.0)` guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod export;

use std::path::PathBuf;

use cosmic_string::Params;

pub use args::{Cli, Command};
pub use config::Config;
pub use error::{CliError, Outcome, EXIT_CHECK_FAILED, EXIT_USAGE};
pub use export::Format;

/// Settings shared by all commands.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: Config,
    pub out: Option<PathBuf>,
    format: Option<Format>,
    a: Option<f64>,
}

impl Context {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let config = match &cli.config {
            Some(p) => Config::load(p)?,
            None => Config::empty(),
        };
        let out = config.get(cli.out.clone(), "out")?;
        let format = config
            .get(cli.format.clone(), "format")?
            .map(|f| Format::parse(&f))
            .transpose()?;
        let a = config.get(cli.a, "A")?;
        Ok(Self {
            config,
            out,
            format,
            a,
        })
    }

    pub fn params(&self) -> Result<Params, CliError> {
        let a = self
            .a
            .ok_or_else(|| CliError::Usage("missing required setting \"A\"".into()))?;
        Ok(Params::new(a)?)
    }

    /// Requested format; a `.csv` output path implies CSV.
    pub fn format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.out {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
            _ => Format::Json,
        })
    }

    /// For commands that only write JSON.
    pub fn require_json(&self) -> Result<(), CliError> {
        match self.format() {
            Format::Json => Ok(()),
            Format::Csv => Err(CliError::Usage("this command only writes JSON".into())),
        }
    }

    pub fn write(&self, bytes: &[u8]) -> Result<(), CliError> {
        export::write_output(self.out.as_deref(), bytes)
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let ctx = Context::from_cli(cli)?;
    match &cli.command {
        Command::Trace(a) => commands::trace::run(&ctx, a),
        Command::PredictWf(a) => commands::predict::run(&ctx, a),
        Command::RegionCheck(a) => commands::region::run(&ctx, a),
        Command::Spectral(a) => commands::spectral::run(&ctx, a),
        Command::Mode(a) => commands::mode::run(&ctx, a),
        Command::Jump(a) => commands::jump::run(&ctx, a),
        Command::Ctc(a) => commands::ctc::run(&ctx, a),
    }
}
