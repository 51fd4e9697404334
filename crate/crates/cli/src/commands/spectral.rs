use std::f64::consts::PI;

use cosmic_string::special::gamma_complex;
use cosmic_string::spectral::{mellin_transform, min_rayleigh, LogGrid, MinRayleigh};
use cosmic_string::{Error, Params};
use num_complex::Complex64;
use serde_json::{json, Value};

use super::number_list;
use crate::args::SpectralArgs;
use crate::error::{CliError, Outcome};
use crate::export;
use crate::Context;

pub const DEFAULT_TRUNCATION: u32 = 5;
pub const DEFAULT_MELLIN_XI: [f64; 5] = [0.0, 0.5, -0.5, 1.0, -1.0];
/// Log grid and tolerance of the Mellin check against `Γ(1 - iξ)`.
pub const MELLIN_GRID: (f64, f64, usize) = (1e-8, 50.0, 4000);
pub const MELLIN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinCheck {
    pub xi: f64,
    pub value: Complex64,
    pub oracle: Complex64,
}

impl MellinCheck {
    pub fn error(&self) -> f64 {
        (self.value - self.oracle).norm()
    }

    pub fn passes(&self) -> bool {
        self.error() < MELLIN_TOL
    }
}

/// `𝓜(r e^{-r})(ξ)` against `Γ(1 - iξ)`.
pub fn mellin_check(xi: f64) -> Result<MellinCheck, CliError> {
    let (r_min, r_max, n) = MELLIN_GRID;
    let grid = LogGrid::new(r_min, r_max, n)?;
    let f = grid.sample(|r| r * (-r).exp());
    let value = mellin_transform(&grid, &f, Complex64::new(xi, 0.0))?;
    let oracle = gamma_complex(Complex64::new(1.0, -xi));
    Ok(MellinCheck { xi, value, oracle })
}

/// The minimum must be `A²/L²` at `(k, m) = (1, 0)`.
pub fn minimum_is_expected(min: &MinRayleigh, l: f64, params: &Params) -> bool {
    let expected = params.a() * params.a() / (l * l);
    min.value > 0.0
        && min.index.k() == 1
        && min.index.m() == 0
        && (min.value - expected).abs() <= 4.0 * f64::EPSILON * expected
}

pub fn run(ctx: &Context, a: &SpectralArgs) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    ctx.require_json()?;
    let params = ctx.params()?;
    let l: f64 = cfg.require(a.l, "L")?;
    if !(l > 0.0) || !l.is_finite() {
        return Err(CliError::Usage("L must be positive".into()));
    }
    let k_max: u32 = cfg.or(a.k_max, "k_max", DEFAULT_TRUNCATION)?;
    let m_max: u32 = cfg.or(a.m_max, "m_max", DEFAULT_TRUNCATION)?;
    let xis = number_list(cfg, a.mellin_xi.as_deref(), "mellin_xi")?
        .unwrap_or(DEFAULT_MELLIN_XI.to_vec());

    let mellin = xis
        .iter()
        .map(|xi| mellin_check(*xi))
        .collect::<Result<Vec<_>, _>>()?;
    let mellin_json: Vec<Value> = mellin
        .iter()
        .map(|m| {
            json!({
                "xi": m.xi,
                "re": m.value.re, "im": m.value.im,
                "oracle_re": m.oracle.re, "oracle_im": m.oracle.im,
                "error": m.error(), "pass": m.passes(),
            })
        })
        .collect();
    let mellin_pass = mellin.iter().all(MellinCheck::passes);

    let (report, pass) = match min_rayleigh(l, &params, k_max, m_max) {
        Ok(min) => {
            let max_disc = min
                .reports
                .iter()
                .map(|r| r.discrepancy())
                .fold(0.0, f64::max);
            let max_cross = min.reports.iter().map(|r| r.cross_term).fold(0.0, f64::max);
            let quotients: Vec<Value> = min
                .reports
                .iter()
                .map(|r| {
                    json!({
                        "k": r.index.k(), "m": r.index.m(),
                        "closed_form": r.closed_form, "quadrature": r.quadrature,
                        "cross_term": r.cross_term,
                    })
                })
                .collect();
            let min_ok = minimum_is_expected(&min, l, &params);
            let v = json!({
                "A": params.a(),
                "L": l,
                "k_max": k_max,
                "m_max": m_max,
                "min_quotient": min.value,
                "argmin": { "k": min.index.k(), "m": min.index.m() },
                "expected_min": params.a() * params.a() / (l * l),
                // Pairing ⟨F²φ, φ⟩ for the unnormalized basis, ‖φ_km‖² = πL/2.
                "min_pairing_unnormalized": min.value * PI * l / 2.0,
                "max_discrepancy": max_disc,
                "max_cross_term": max_cross,
                "quotients": quotients,
                "mellin": mellin_json,
                "passed": min_ok && mellin_pass,
            });
            (v, min_ok && mellin_pass)
        }
        Err(Error::QuadratureMismatch(d)) => {
            let v = json!({
                "A": params.a(),
                "L": l,
                "k_max": k_max,
                "m_max": m_max,
                "quadrature_mismatch": d,
                "mellin": mellin_json,
                "passed": false,
            });
            (v, false)
        }
        Err(e) => return Err(e.into()),
    };
    ctx.write(&export::json_bytes(&report)?)?;
    Ok(Outcome::from_pass(pass))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mellin_gamma_at_zero() {
        let m = mellin_check(0.0).unwrap();
        assert!(m.passes(), "error {}", m.error());
        assert!((m.oracle.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn minimum_examples() {
        let p = Params::new(1.0).unwrap();
        let min = min_rayleigh(2.0, &p, 3, 3).unwrap();
        assert!(minimum_is_expected(&min, 2.0, &p));
        assert_eq!(min.value, 0.25);
    }
}
