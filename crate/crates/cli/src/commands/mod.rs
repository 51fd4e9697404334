pub mod ctc;
pub mod jump;
pub mod mode;
pub mod predict;
pub mod region;
pub mod spectral;
pub mod trace;

use cosmic_string::IntegrationOptions;

use crate::args::FlowArgs;
use crate::config::Config;
use crate::error::CliError;

/// Integration options from the shared flow flags, defaults elsewhere.
pub(crate) fn flow_options(cfg: &Config, a: &FlowArgs) -> Result<IntegrationOptions, CliError> {
    let d = IntegrationOptions::default();
    let tol = cfg.or(a.tol, "tol", d.abs_tol)?;
    Ok(IntegrationOptions {
        abs_tol: tol,
        rel_tol: tol,
        r_stop: cfg.or(a.r_stop, "r_stop", d.r_stop)?,
        r_max: cfg.or(a.r_max, "r_max", d.r_max)?,
        s_max: cfg.or(a.s_max, "s_max", d.s_max)?,
        ..d
    })
}

/// Comma-separated numbers.
pub(crate) fn parse_numbers(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("invalid number list {s:?}: {e}")))
}

/// A number list given as a comma-separated flag or a JSON array.
pub(crate) fn number_list(
    cfg: &Config,
    cli: Option<&str>,
    key: &str,
) -> Result<Option<Vec<f64>>, CliError> {
    match cli {
        Some(s) => parse_numbers(s).map(Some),
        None => cfg.get::<Vec<f64>>(None, key),
    }
}
