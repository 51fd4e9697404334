//! Angular-mode reduction of the wave operator.
//!
//! The mode-`k` operator in `(t, r)` is elliptic for `r < |A|` and
//! hyperbolic for `r > |A|`. After a Fourier transform in `t` (with
//! `∂_t ↦ iτ`) it becomes the radial ODE
//!
//! `u'' = -u'/r - (τ² - ν²/r²) u - Υ̂u`,  `ν = |Aτ + k|`,
//!
//! with `Υ̂u = (iτ f₁ + ik f₂ + f₄) u + f₃ r u'`. With `Υ̂ = 0` this is
//! Bessel's equation in `τr`.

use alloc::vec::Vec;

use num_complex::Complex64;
// Inherent float methods shadow this whenever std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::Params;
use crate::ode::{Dopri5, OdeOptions, OdeSystem};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeType {
    Elliptic,
    Degenerate,
    Hyperbolic,
}

impl ModeType {
    pub fn name(&self) -> &'static str {
        match self {
            ModeType::Elliptic => "elliptic",
            ModeType::Degenerate => "degenerate",
            ModeType::Hyperbolic => "hyperbolic",
        }
    }
}

/// Type of the mode operator at radius `r`: the sign of `1 - A²/r²`.
pub fn mode_type(r: f64, params: &Params) -> Result<ModeType> {
    if !(r > 0.0) {
        return Err(Error::SingularPoint(r));
    }
    let a = params.abs_a();
    Ok(if r < a {
        ModeType::Elliptic
    } else if r == a {
        ModeType::Degenerate
    } else {
        ModeType::Hyperbolic
    })
}

/// Coefficients `[f₁, f₂, f₃, f₄]` of a `t, φ`-independent first-order
/// perturbation, as functions of `r`.
pub trait Perturbation {
    fn coefficients(&self, r: f64) -> [Complex64; 4];
}

impl<F: Fn(f64) -> [Complex64; 4]> Perturbation for F {
    fn coefficients(&self, r: f64) -> [Complex64; 4] {
        self(r)
    }
}

#[derive(Clone, Copy)]
pub struct ModeParams<'a> {
    pub k: i64,
    pub tau: f64,
    pub params: Params,
    pub perturbation: Option<&'a dyn Perturbation>,
}

impl<'a> ModeParams<'a> {
    pub fn new(k: i64, tau: f64, params: Params) -> Self {
        Self {
            k,
            tau,
            params,
            perturbation: None,
        }
    }

    pub fn with_perturbation(self, p: &'a dyn Perturbation) -> Self {
        Self {
            perturbation: Some(p),
            ..self
        }
    }

    /// Effective Bessel order `|Aτ + k|`.
    pub fn nu(&self) -> f64 {
        (self.params.a() * self.tau + self.k as f64).abs()
    }
}

impl core::fmt::Debug for ModeParams<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ModeParams")
            .field("k", &self.k)
            .field("tau", &self.tau)
            .field("params", &self.params)
            .field("perturbed", &self.perturbation.is_some())
            .finish()
    }
}

/// `u''` at `r`.
pub fn radial_rhs(r: f64, u: Complex64, du: Complex64, mp: &ModeParams) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::SingularPoint(r));
    }
    Ok(rhs_unchecked(r, u, du, mp))
}

fn rhs_unchecked(r: f64, u: Complex64, du: Complex64, mp: &ModeParams) -> Complex64 {
    let nu = mp.params.a() * mp.tau + mp.k as f64;
    let mut d2 = -du / r - (mp.tau * mp.tau - nu * nu / (r * r)) * u;
    if let Some(p) = mp.perturbation {
        let [f1, f2, f3, f4] = p.coefficients(r);
        let i = Complex64::i();
        d2 -= (f1 * i * mp.tau + f2 * i * mp.k as f64 + f4) * u + f3 * r * du;
    }
    d2
}

struct Radial<'m, 'a> {
    mp: &'m ModeParams<'a>,
}

impl OdeSystem<4> for Radial<'_, '_> {
    fn rhs(&self, r: f64, y: &[f64; 4]) -> [f64; 4] {
        let u = Complex64::new(y[0], y[1]);
        let du = Complex64::new(y[2], y[3]);
        let d2 = rhs_unchecked(r, u, du, self.mp);
        [du.re, du.im, d2.re, d2.im]
    }

    fn admissible(&self, y: &[f64; 4]) -> bool {
        y.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    pub r: f64,
    pub u: Complex64,
    pub du: Complex64,
}

fn sample_of(r: f64, y: &[f64; 4]) -> RadialSample {
    RadialSample {
        r,
        u: Complex64::new(y[0], y[1]),
        du: Complex64::new(y[2], y[3]),
    }
}

fn check_span(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::SingularPoint(a.min(b)));
    }
    Ok(())
}

/// Integrates from `span.0` (where `init = (u, u')`) to `span.1`, recording
/// every accepted step. Either direction is allowed.
pub fn solve_radial(
    span: (f64, f64),
    init: (Complex64, Complex64),
    mp: &ModeParams,
    tol: f64,
) -> Result<Vec<RadialSample>> {
    check_span(span.0, span.1)?;
    let opts = OdeOptions {
        abs_tol: tol,
        rel_tol: tol,
        ..Default::default()
    };
    let sys = Radial { mp };
    let y0 = [init.0.re, init.0.im, init.1.re, init.1.im];
    let dir = if span.1 >= span.0 { 1.0 } else { -1.0 };
    let mut out = alloc::vec![sample_of(span.0, &y0)];
    if span.0 == span.1 {
        return Ok(out);
    }
    let mut stepper = Dopri5::new(&sys, span.0, y0, dir, opts);
    loop {
        let step = stepper.step(span.1)?;
        out.push(sample_of(step.s1, &step.y1));
        if step.s1 == span.1 {
            return Ok(out);
        }
    }
}

/// Like [`solve_radial`] but reports the solution at the points of `grid`
/// (monotone, starting at the initial radius) via dense output.
pub fn solve_radial_on_grid(
    grid: &[f64],
    init: (Complex64, Complex64),
    mp: &ModeParams,
    tol: f64,
) -> Result<Vec<RadialSample>> {
    let (&first, &last) = match (grid.first(), grid.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(Vec::new()),
    };
    check_span(first, last)?;
    let dir = if last >= first { 1.0 } else { -1.0 };
    if grid.windows(2).any(|w| (w[1] - w[0]) * dir < 0.0) {
        return Err(Error::InvalidArgument("grid must be monotone"));
    }
    let opts = OdeOptions {
        abs_tol: tol,
        rel_tol: tol,
        ..Default::default()
    };
    let sys = Radial { mp };
    let y0 = [init.0.re, init.0.im, init.1.re, init.1.im];
    let mut out = Vec::with_capacity(grid.len());
    let mut idx = 0;
    while idx < grid.len() && grid[idx] == first {
        out.push(sample_of(first, &y0));
        idx += 1;
    }
    let mut stepper = Dopri5::new(&sys, first, y0, dir, opts);
    while idx < grid.len() {
        let step = stepper.step(last)?;
        while idx < grid.len() && (step.s1 - grid[idx]) * dir >= 0.0 {
            let r = grid[idx];
            let y = if r == step.s1 { step.y1 } else { step.dense(r) };
            out.push(sample_of(r, &y));
            idx += 1;
        }
    }
    Ok(out)
}

/// `r (u₁ u₂' - u₂ u₁')`, constant in `r` for two solutions of the
/// unperturbed equation.
pub fn wronskian(r: f64, a: &RadialSample, b: &RadialSample) -> Complex64 {
    (a.u * b.du - b.u * a.du) * r
}
