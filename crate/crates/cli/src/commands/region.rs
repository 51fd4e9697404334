use cosmic_string::regions::{
    build_regions_with_margin, sample_seeds, summarize, trace_backward, LemmaReport, Regions,
    DEFAULT_MARGIN,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::args::RegionArgs;
use crate::error::{CliError, Outcome};
use crate::export;
use crate::Context;

pub const DEFAULT_SAMPLES: usize = 1000;

/// Seeds are drawn sequentially from one ChaCha8 stream and traced in
/// parallel; results keep draw order.
pub fn check(regions: &Regions, a: f64, n: usize, rng_seed: u64) -> Result<LemmaReport, CliError> {
    let params = cosmic_string::Params::new(a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (seeds, rejected) = sample_seeds(&mut rng, regions, &params, n);
    let traced = seeds
        .par_iter()
        .map(|q| trace_backward(q, regions, &params))
        .collect();
    Ok(summarize(&seeds, traced, rejected))
}

pub fn report_json(
    regions: &Regions,
    a: f64,
    n: usize,
    rng_seed: u64,
    report: &LemmaReport,
) -> Value {
    let inequalities: Map<String, Value> = regions
        .check()
        .as_array()
        .iter()
        .map(|(k, v)| ((*k).to_string(), Value::Bool(*v)))
        .collect();
    let records: Vec<Value> = report
        .records
        .iter()
        .map(|r| {
            json!({
                "seed": export::point_json(&r.seed),
                "s0": r.s0, "r_s0": r.r_s0, "t_s0": r.t_s0, "ratio": r.ratio,
                "pass": r.pass,
            })
        })
        .collect();
    json!({
        "A": a,
        "R0": regions.base.r0,
        "T": regions.base.t_max,
        "R": regions.r,
        "Tprime": regions.t_prime,
        "epsilon_margin": regions.epsilon_margin,
        "binding": regions.binding.name(),
        "inequalities": inequalities,
        "n": n,
        "rng_seed": rng_seed,
        "rejected": report.rejected,
        "failures": report.failures.len(),
        "failed_indices": report.failures,
        "records": records,
    })
}

pub fn run(ctx: &Context, a: &RegionArgs) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    ctx.require_json()?;
    let params = ctx.params()?;
    let r0: f64 = cfg.require(a.r0, "R0")?;
    let t: f64 = cfg.require(a.t, "T")?;
    let n: usize = cfg.or(a.n, "n", DEFAULT_SAMPLES)?;
    let rng_seed: u64 = cfg.require(a.rng_seed, "rng_seed")?;
    let margin: f64 = cfg.or(a.margin, "margin", DEFAULT_MARGIN)?;
    if n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    let regions = build_regions_with_margin(r0, t, &params, margin)?;
    let report = check(&regions, params.a(), n, rng_seed)?;
    ctx.write(&export::json_bytes(&report_json(
        &regions,
        params.a(),
        n,
        rng_seed,
        &report,
    ))?)?;
    Ok(Outcome::from_pass(
        regions.check().all() && report.failures.is_empty(),
    ))
}
