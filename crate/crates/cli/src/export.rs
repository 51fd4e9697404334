//! File formats. Numbers are written in the shortest form that parses back
//! to the same `f64`.

use std::io::Write;
use std::path::Path;

use cosmic_string::geometry::FiberPoint;
use cosmic_string::{CotangentPoint, Trajectory};
use serde_json::{json, Value};

use crate::error::CliError;

pub const CSV_HEADER: [&str; 7] = ["s", "t", "r", "phi", "tau", "xi", "eta"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(CliError::Usage(format!(
                "unknown format {s:?}; expected json or csv"
            ))),
        }
    }
}

pub fn trajectory_json(traj: &Trajectory) -> Value {
    let samples: Vec<Value> = traj
        .samples
        .iter()
        .map(|s| {
            let p = &s.point;
            json!({
                "s": s.s, "t": p.base.t, "r": p.base.r, "phi": p.base.phi,
                "tau": p.tau, "xi": p.xi, "eta": p.eta,
            })
        })
        .collect();
    json!({
        "A": traj.params.a(),
        "chart": traj.chart.name(),
        "stop_reason": traj.stop_reason.name(),
        "samples": samples,
    })
}

pub fn trajectory_csv(traj: &Trajectory) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for s in &traj.samples {
        let p = &s.point;
        w.serialize((s.s, p.base.t, p.base.r, p.base.phi, p.tau, p.xi, p.eta))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn fiber_json(f: &FiberPoint) -> Value {
    json!({ "phi0": f.phi0, "tau0": f.tau0 })
}

pub fn point_json(q: &CotangentPoint) -> Value {
    json!({
        "t": q.base.t, "r": q.base.r, "phi": q.base.phi,
        "tau": q.tau, "xi": q.xi, "eta": q.eta,
    })
}

pub fn json_bytes(v: &Value) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes to `path`, or to standard output when absent.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn seed_from_numbers(v: &[f64]) -> Result<CotangentPoint, CliError> {
    match v {
        [t, r, phi, tau, xi, eta] => Ok(CotangentPoint::standard(*t, *r, *phi, *tau, *xi, *eta)),
        _ => Err(CliError::Usage(format!(
            "a seed needs 6 numbers (t,r,phi,tau,xi,eta), got {}",
            v.len()
        ))),
    }
}

/// Standard-chart seed from `"t,r,phi,tau,xi,eta"`.
pub fn parse_seed_str(s: &str) -> Result<CotangentPoint, CliError> {
    let nums = s
        .split([',', ';'])
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("invalid seed {s:?}: {e}")))?;
    seed_from_numbers(&nums)
}

/// A seed as a 6-array, an object with keys `t r phi tau xi eta`, or a
/// comma-separated string.
pub fn parse_seed_value(v: &Value) -> Result<CotangentPoint, CliError> {
    let bad = || CliError::Usage(format!("invalid seed {v}"));
    match v {
        Value::String(s) => parse_seed_str(s),
        Value::Array(items) => {
            let nums = items
                .iter()
                .map(|x| x.as_f64().ok_or_else(bad))
                .collect::<Result<Vec<_>, _>>()?;
            seed_from_numbers(&nums)
        }
        Value::Object(map) => {
            let nums = ["t", "r", "phi", "tau", "xi", "eta"]
                .iter()
                .map(|k| map.get(*k).and_then(Value::as_f64).ok_or_else(bad))
                .collect::<Result<Vec<_>, _>>()?;
            seed_from_numbers(&nums)
        }
        _ => Err(bad()),
    }
}

/// Seed list file: a JSON array of seeds. An empty file is an empty list.
pub fn parse_seed_list(text: &str) -> Result<Vec<CotangentPoint>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let v: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Usage(format!("seed file is not valid JSON: {e}")))?;
    let items = match &v {
        Value::Array(items) => items,
        Value::Object(map) => match map.get("seeds") {
            Some(Value::Array(items)) => items,
            _ => {
                return Err(CliError::Usage(
                    "seed file object needs a \"seeds\" array".into(),
                ))
            }
        },
        _ => return Err(CliError::Usage("seed file must hold a JSON array".into())),
    };
    items.iter().map(parse_seed_value).collect()
}
