use std::f64::consts::PI;

use cosmic_string::string_interaction::{near_string_time_jump, Side};
use cosmic_string::Params;
use serde_json::{json, Value};

use super::number_list;
use crate::args::JumpArgs;
use crate::error::{CliError, Outcome};
use crate::export;
use crate::Context;

pub const DEFAULT_B: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
/// Long enough that `2|A|b - |Δt ∓ Aπ| ≈ 2|A|b(1 - 1/s₁)` dwarfs rounding.
pub const DEFAULT_S1: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRow {
    pub b: f64,
    pub side: Side,
    pub jump: f64,
    /// `±Aπ`, signed by the side.
    pub target: f64,
    /// `2|A|b`.
    pub bound: f64,
}

impl JumpRow {
    pub fn deviation(&self) -> f64 {
        (self.jump - self.target).abs()
    }

    pub fn passes(&self) -> bool {
        self.deviation() <= self.bound
    }
}

pub fn jump_row(b: f64, side: Side, s1: f64, params: &Params) -> Result<JumpRow, CliError> {
    Ok(JumpRow {
        b,
        side,
        jump: near_string_time_jump(b, side, s1, params)?,
        target: side.sign() * params.a() * PI,
        bound: 2.0 * params.abs_a() * b,
    })
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

pub fn run(ctx: &Context, a: &JumpArgs) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    ctx.require_json()?;
    let params = ctx.params()?;
    let bs = number_list(cfg, a.b.as_deref(), "b")?.unwrap_or(DEFAULT_B.to_vec());
    let s1: f64 = cfg.or(a.s1, "s1", DEFAULT_S1)?;
    let sides: &[Side] = match cfg.or(a.side.clone(), "side", "both".into())?.as_str() {
        "left" => &[Side::Left],
        "right" => &[Side::Right],
        "both" => &[Side::Left, Side::Right],
        s => {
            return Err(CliError::Usage(format!(
                "unknown side {s:?}; expected left, right or both"
            )))
        }
    };
    let mut rows = Vec::new();
    for &side in sides {
        for &b in &bs {
            rows.push(jump_row(b, side, s1, &params)?);
        }
    }
    let pass = rows.iter().all(JumpRow::passes);
    let rows_json: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "b": r.b, "side": side_name(r.side), "jump": r.jump, "target": r.target,
                "deviation": r.deviation(), "bound": r.bound, "pass": r.passes(),
            })
        })
        .collect();
    let v = json!({ "A": params.a(), "s1": s1, "passed": pass, "rows": rows_json });
    ctx.write(&export::json_bytes(&v)?)?;
    Ok(Outcome::from_pass(pass))
}
