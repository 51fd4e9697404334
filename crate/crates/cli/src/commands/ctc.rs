use cosmic_string::ctc_circle_type;
use serde_json::json;

use crate::args::CtcArgs;
use crate::error::{CliError, Outcome};
use crate::export;
use crate::Context;

pub fn run(ctx: &Context, a: &CtcArgs) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    ctx.require_json()?;
    let params = ctx.params()?;
    let r0: f64 = cfg.require(a.r0, "r0")?;
    let ty = ctc_circle_type(r0, &params)?;
    let v = json!({
        "A": params.a(),
        "r0": r0,
        "g_phiphi": r0 * r0 - params.a() * params.a(),
        "type": ty.name(),
    });
    ctx.write(&export::json_bytes(&v)?)?;
    Ok(Outcome::Pass)
}
