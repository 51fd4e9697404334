use std::path::PathBuf;

use cosmic_string::wavefront::{
    assemble_prediction, collect_flowout, forward_ray, Mode, PredictedWF, SeedSet,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::flow_options;
use crate::args::PredictArgs;
use crate::error::{CliError, Outcome};
use crate::export;
use crate::Context;

fn parse_mode(s: &str) -> Result<Mode, CliError> {
    match s {
        "refined" => Ok(Mode::Refined),
        "theorem_bound" => Ok(Mode::TheoremBound),
        _ => Err(CliError::Usage(format!(
            "unknown mode {s:?}; expected refined or theorem_bound"
        ))),
    }
}

pub fn prediction_json(pred: &PredictedWF, dropped: &[usize]) -> Value {
    json!({
        "mode": pred.mode.name(),
        "rays": pred.rays.iter().map(export::trajectory_json).collect::<Vec<_>>(),
        "fibers": pred.fibers.iter().map(export::fiber_json).collect::<Vec<_>>(),
        "all_fibers": pred.all_fibers(),
        "dropped": dropped,
    })
}

pub fn run(ctx: &Context, a: &PredictArgs) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    ctx.require_json()?;
    let params = ctx.params()?;
    let path: PathBuf = cfg.require(a.seeds.clone(), "seeds")?;
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Io(format!("cannot read seeds {}: {e}", path.display())))?;
    let seeds = SeedSet::new(export::parse_seed_list(&text)?, None)?;
    let mode = parse_mode(&cfg.or(a.mode.clone(), "mode", "refined".into())?)?;
    let opts = flow_options(cfg, &a.flow)?;

    let results: Vec<_> = seeds
        .seeds
        .par_iter()
        .map(|q| forward_ray(q, &params, &opts))
        .collect();
    for (i, r) in results.iter().enumerate() {
        if let Err(e) = r {
            eprintln!("warning: seed {i} dropped: {e}");
        }
    }
    let flowout = collect_flowout(results);
    let dropped = flowout.dropped.clone();
    let pred = assemble_prediction(flowout, &params, mode);
    ctx.write(&export::json_bytes(&prediction_json(&pred, &dropped))?)?;
    Ok(Outcome::Pass)
}
