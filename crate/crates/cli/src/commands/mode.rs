use cosmic_string::mode_analysis::{
    mode_type, solve_radial_on_grid, ModeParams, Perturbation, RadialSample,
};
use cosmic_string::special::{bessel_j, bessel_j_prime};
use cosmic_string::Params;
use num_complex::Complex64;
use serde_json::{json, Value};

use super::number_list;
use crate::args::ModeArgs;
use crate::config::Config;
use crate::error::{CliError, Outcome};
use crate::export::Format;
use crate::Context;

pub const BESSEL_TOL: f64 = 1e-8;
pub const MODE_CSV_HEADER: [&str; 5] = ["r", "u_re", "u_im", "du_re", "du_im"];

/// `r`-independent perturbation coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantPerturbation(pub [Complex64; 4]);

impl Perturbation for ConstantPerturbation {
    fn coefficients(&self, _r: f64) -> [Complex64; 4] {
        self.0
    }
}

fn complex_value(
    cfg: &Config,
    cli: Option<&str>,
    key: &str,
) -> Result<Option<Complex64>, CliError> {
    match number_list(cfg, cli, key)?.as_deref() {
        None => Ok(None),
        Some([re]) => Ok(Some(Complex64::new(*re, 0.0))),
        Some([re, im]) => Ok(Some(Complex64::new(*re, *im))),
        Some(_) => Err(CliError::Usage(format!("{key} takes one or two numbers"))),
    }
}

/// `n` points from `a` to `b`, endpoints exact.
pub fn linear_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// `(J_ν(|τ|r), |τ| J_ν'(|τ|r))`, the regular unperturbed solution.
pub fn bessel_data(nu: f64, tau: f64, r: f64) -> Result<(f64, f64), CliError> {
    let w = tau.abs();
    Ok((bessel_j(nu, w * r)?, w * bessel_j_prime(nu, w * r)?))
}

/// Largest deviation of `u` and `u'` from the Bessel solution.
pub fn bessel_error(samples: &[RadialSample], nu: f64, tau: f64) -> Result<f64, CliError> {
    let mut err = 0.0f64;
    for s in samples {
        let (j, dj) = bessel_data(nu, tau, s.r)?;
        err = err.max((s.u - j).norm()).max((s.du - dj).norm());
    }
    Ok(err)
}

pub fn run(ctx: &Context, a: &ModeArgs) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let params: Params = ctx.params()?;
    let k: i64 = cfg.or(a.k, "k", 0)?;
    let tau: f64 = cfg.or(a.tau, "tau", 1.0)?;
    let r_start: f64 = cfg.or(a.r_start, "r_start", 0.1)?;
    let r_end: f64 = cfg.or(a.r_end, "r_end", 10.0)?;
    let points: usize = cfg.or(a.points, "points", 100)?;
    let tol: f64 = cfg.or(a.tol, "tol", 1e-12)?;
    if points < 2 {
        return Err(CliError::Usage("points must be at least 2".into()));
    }
    let upsilon = match number_list(cfg, a.upsilon.as_deref(), "upsilon")? {
        None => None,
        Some(v) if v.len() == 8 => Some(ConstantPerturbation([
            Complex64::new(v[0], v[1]),
            Complex64::new(v[2], v[3]),
            Complex64::new(v[4], v[5]),
            Complex64::new(v[6], v[7]),
        ])),
        Some(_) => return Err(CliError::Usage("upsilon takes 8 numbers".into())),
    };
    let mut mp = ModeParams::new(k, tau, params);
    if let Some(p) = &upsilon {
        mp = mp.with_perturbation(p);
    }
    let nu = mp.nu();

    let u0 = complex_value(cfg, a.u0.as_deref(), "u0")?;
    let du0 = complex_value(cfg, a.du0.as_deref(), "du0")?;
    // The Bessel comparison applies only to the default unperturbed data.
    let (init, compare) = match (u0, du0) {
        (Some(u), Some(du)) => ((u, du), false),
        (None, None) => {
            if tau == 0.0 {
                return Err(CliError::Usage("tau = 0 needs explicit u0 and du0".into()));
            }
            let (j, dj) = bessel_data(nu, tau, r_start)?;
            (
                (Complex64::new(j, 0.0), Complex64::new(dj, 0.0)),
                upsilon.is_none(),
            )
        }
        _ => return Err(CliError::Usage("give both u0 and du0, or neither".into())),
    };

    let grid = linear_grid(r_start, r_end, points);
    let samples = solve_radial_on_grid(&grid, init, &mp, tol)?;
    let err = if compare {
        Some(bessel_error(&samples, nu, tau)?)
    } else {
        None
    };
    let pass = err.is_none_or(|e| e <= BESSEL_TOL);

    let bytes = match ctx.format() {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(MODE_CSV_HEADER)?;
            for s in &samples {
                w.serialize((s.r, s.u.re, s.u.im, s.du.re, s.du.im))?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))?
        }
        Format::Json => {
            let rows = samples
                .iter()
                .map(|s| {
                    Ok(json!({
                        "r": s.r, "u_re": s.u.re, "u_im": s.u.im,
                        "du_re": s.du.re, "du_im": s.du.im,
                        "type": mode_type(s.r, &params)?.name(),
                    }))
                })
                .collect::<Result<Vec<Value>, CliError>>()?;
            crate::export::json_bytes(&json!({
                "A": params.a(),
                "k": k,
                "tau": tau,
                "nu": nu,
                "interface_r": params.abs_a(),
                "perturbed": upsilon.is_some(),
                "bessel_max_error": err,
                "passed": pass,
                "samples": rows,
            }))?
        }
    };
    ctx.write(&bytes)?;
    Ok(Outcome::from_pass(pass))
}
