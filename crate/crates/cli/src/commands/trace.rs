use cosmic_string::string_interaction::is_string_bound;
use cosmic_string::{
    conserved_report, in_char_set, integrate_ray, symbol, Chart, ConservedDrift, CotangentPoint,
    Direction, Error, FlatLine, IntegrationOptions, Params, Sample, StopReason, Trajectory,
};
use serde_json::Value;

use super::flow_options;
use crate::args::TraceArgs;
use crate::error::{CliError, Outcome};
use crate::export::{self, Format};
use crate::Context;

pub const DEFAULT_STEP: f64 = 0.05;
const MAX_GRID_POINTS: f64 = 1e7;

fn parse_chart(s: &str) -> Result<Chart, CliError> {
    match s {
        "standard" => Ok(Chart::Standard),
        "b" => Ok(Chart::B),
        _ => Err(CliError::Usage(format!(
            "unknown chart {s:?}; expected standard or b"
        ))),
    }
}

fn parse_direction(s: &str) -> Result<Direction, CliError> {
    match s {
        "forward" => Ok(Direction::Forward),
        "backward" => Ok(Direction::Backward),
        _ => Err(CliError::Usage(format!(
            "unknown direction {s:?}; expected forward or backward"
        ))),
    }
}

/// `±h, ±2h, …` up to `s_max` along `dir`.
fn uniform_grid(step: f64, s_max: f64, dir: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(CliError::Usage("step must be positive".into()));
    }
    let n = (s_max / step).floor();
    if n > MAX_GRID_POINTS {
        return Err(CliError::Usage("step too small for s_max".into()));
    }
    Ok((1..=n as u64).map(|k| dir * k as f64 * step).collect())
}

/// Exact flat-chart evaluation on the same grid and with the same stopping
/// rules as the integrator.
pub fn oracle_trajectory(
    seed: &CotangentPoint,
    opts: &IntegrationOptions,
    params: &Params,
) -> Result<Trajectory, CliError> {
    if opts.chart != Chart::Standard {
        return Err(CliError::Usage(
            "the oracle evaluates the standard chart only".into(),
        ));
    }
    if !(seed.base.r > 0.0) {
        return Err(Error::SingularPoint(seed.base.r).into());
    }
    if seed.is_zero_covector() {
        return Err(Error::ZeroVector.into());
    }
    if !in_char_set(seed, params, opts.null_tol) {
        return Err(Error::OffCharacteristicSet(symbol(seed, params)?).into());
    }
    let line = FlatLine::new(seed, params)?;
    let dir = opts.direction.sign();
    let (sc, b, w) = (
        line.closest_approach(),
        line.impact_parameter(),
        line.speed(),
    );
    // |x(s)|² = b² + w²(s - sc)²: first parameter ahead reaching radius rho.
    let first_hit = |rho: f64| -> Option<f64> {
        if rho < b {
            return None;
        }
        let h = (rho * rho - b * b).sqrt() / w;
        [sc - h, sc + h]
            .into_iter()
            .filter(|s| s * dir > 0.0)
            .min_by(|x, y| x.abs().total_cmp(&y.abs()))
    };
    let mut s_end = dir * opts.s_max;
    let mut stop = StopReason::MaxParam;
    if is_string_bound(seed, params, opts.string_tol)? {
        if let Some(s) = first_hit(opts.r_stop).filter(|s| s.abs() < s_end.abs()) {
            s_end = s;
            stop = StopReason::ReachedString {
                r_stop: opts.r_stop,
            };
        }
    }
    if let Some(s) = first_hit(opts.r_max).filter(|s| s.abs() < s_end.abs()) {
        s_end = s;
        stop = StopReason::LeftDomain { r_max: opts.r_max };
    }
    let mut samples = vec![Sample {
        s: 0.0,
        point: *seed,
    }];
    let grid = opts.output_grid.clone().unwrap_or_default();
    for s in grid
        .into_iter()
        .filter(|s| s * dir > 0.0 && s.abs() <= s_end.abs())
    {
        samples.push(Sample {
            s,
            point: line.point_at(s),
        });
    }
    if s_end.abs() > samples[samples.len() - 1].s.abs() {
        samples.push(Sample {
            s: s_end,
            point: line.point_at(s_end),
        });
    }
    let mut traj = Trajectory {
        chart: Chart::Standard,
        params: *params,
        direction: opts.direction,
        samples,
        stop_reason: stop,
        drift: ConservedDrift::default(),
    };
    traj.drift = conserved_report(&traj)?;
    Ok(traj)
}

pub fn run(ctx: &Context, a: &TraceArgs) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let params = ctx.params()?;
    let seed_value: Value = cfg.require(a.seed.clone().map(Value::String), "seed")?;
    let seed = export::parse_seed_value(&seed_value)?;
    let mut opts = flow_options(cfg, &a.flow)?;
    opts.chart = parse_chart(&cfg.or(a.chart.clone(), "chart", "standard".into())?)?;
    opts.direction =
        parse_direction(&cfg.or(a.direction.clone(), "direction", "forward".into())?)?;
    if !(seed.base.r < opts.r_max) {
        return Err(CliError::Usage("seed radius must be below r_max".into()));
    }
    let oracle = cfg.flag(a.oracle, "oracle")?;
    let adaptive = cfg.flag(a.adaptive, "adaptive")?;
    if oracle && adaptive {
        return Err(CliError::Usage(
            "the oracle needs a uniform grid; drop --adaptive".into(),
        ));
    }
    if !adaptive {
        let step = cfg.or(a.step, "step", DEFAULT_STEP)?;
        opts.output_grid = Some(uniform_grid(step, opts.s_max, opts.direction.sign())?);
    }
    let traj = if oracle {
        oracle_trajectory(&seed, &opts, &params)?
    } else {
        integrate_ray(&seed, &opts, &params)?
    };
    let bytes = match ctx.format() {
        Format::Json => export::json_bytes(&export::trajectory_json(&traj))?,
        Format::Csv => export::trajectory_csv(&traj)?,
    };
    ctx.write(&bytes)?;
    Ok(Outcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(step: f64, s_max: f64) -> IntegrationOptions {
        IntegrationOptions {
            s_max,
            output_grid: Some(uniform_grid(step, s_max, 1.0).unwrap()),
            ..Default::default()
        }
    }

    #[test]
    fn oracle_matches_integration_on_string_bound_seed() {
        let params = Params::new(1.0).unwrap();
        let seed = CotangentPoint::standard(0.0, 2.0, 0.0, 1.0, 1.0, -1.0);
        let o = opts(0.05, 1e3);
        let exact = oracle_trajectory(&seed, &o, &params).unwrap();
        let num = integrate_ray(&seed, &o, &params).unwrap();
        assert_eq!(exact.stop_reason.name(), "reached_string");
        assert_eq!(exact.samples.len(), num.samples.len());
        for (x, y) in exact.samples.iter().zip(&num.samples) {
            assert!((x.s - y.s).abs() < 1e-9);
            assert!((x.point.base.t - y.point.base.t).abs() < 1e-8);
            assert!((x.point.base.r - y.point.base.r).abs() < 1e-8);
        }
        let last = exact.last().point.base;
        assert!((last.r - 1e-6).abs() < 1e-12 && (last.t - 2.0).abs() < 1e-5);
    }

    #[test]
    fn oracle_matches_integration_on_escaping_seed() {
        let params = Params::new(0.5).unwrap();
        // Flat covector at 100° from the radial direction.
        let (r, tau) = (1.5, 1.0);
        let th = 100f64.to_radians();
        let seed = CotangentPoint::standard(
            0.0,
            r,
            0.4,
            tau,
            tau * th.cos(),
            r * tau * th.sin() - 0.5 * tau,
        );
        let o = IntegrationOptions {
            r_max: 30.0,
            ..opts(0.25, 100.0)
        };
        let exact = oracle_trajectory(&seed, &o, &params).unwrap();
        let num = integrate_ray(&seed, &o, &params).unwrap();
        assert_eq!(exact.stop_reason, num.stop_reason);
        assert_eq!(exact.samples.len(), num.samples.len());
        for (x, y) in exact.samples.iter().zip(&num.samples) {
            assert!((x.point.base.phi - y.point.base.phi).abs() < 1e-8);
            assert!((x.point.base.t - y.point.base.t).abs() < 1e-8);
        }
    }

    #[test]
    fn oracle_rejects_b_chart_and_off_shell() {
        let params = Params::new(1.0).unwrap();
        let seed = CotangentPoint::standard(0.0, 2.0, 0.0, 1.0, 1.0, -1.0);
        let o = IntegrationOptions {
            chart: Chart::B,
            ..opts(0.1, 1.0)
        };
        assert!(matches!(
            oracle_trajectory(&seed, &o, &params),
            Err(CliError::Usage(_))
        ));
        let off = CotangentPoint::standard(0.0, 2.0, 0.0, 1.0, 2.0, -1.0);
        assert!(matches!(
            oracle_trajectory(&off, &opts(0.1, 1.0), &params),
            Err(CliError::Core(Error::OffCharacteristicSet(_)))
        ));
    }

    #[test]
    fn grids() {
        assert_eq!(
            uniform_grid(0.5, 2.0, -1.0).unwrap(),
            vec![-0.5, -1.0, -1.5, -2.0]
        );
        assert!(uniform_grid(0.0, 1.0, 1.0).is_err());
        assert!(uniform_grid(1e-9, 1e3, 1.0).is_err());
    }
}
