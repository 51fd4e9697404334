//! Metric, principal symbol and coordinate charts.
//!
//! Basis order for tangent vectors and matrices is `(t, r, φ)`. Covectors
//! are `(τ, ξ, η)`; in the b-chart the radial component is `ξ_b = r ξ`,
//! i.e. the coefficient of `dr/r`.

// Inherent float methods shadow this whenever std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::math::reduce_angle;
use crate::{Error, Result};

/// Default relative tolerance for characteristic-set tests.
pub const DEFAULT_CHAR_TOL: f64 = 1e-9;

/// Rotation parameter of the string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    a: f64,
}

impl Params {
    /// `A = 0` is the static cone and is rejected: fiber coordinates divide by `A`.
    pub fn new(a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::DegenerateRotation(a));
        }
        Ok(Self { a })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn abs_a(&self) -> f64 {
        self.a.abs()
    }
}

/// Base point `(t, r, φ)`. `phi` is kept as a continuous lift; use
/// [`Point::reduced_phi`] at API boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub t: f64,
    pub r: f64,
    pub phi: f64,
}

impl Point {
    pub const fn new(t: f64, r: f64, phi: f64) -> Self {
        Self { t, r, phi }
    }

    pub fn reduced_phi(&self) -> f64 {
        reduce_angle(self.phi)
    }

    /// Cartesian position `(r cos φ, r sin φ)` in the spatial plane.
    pub fn cartesian(&self) -> (f64, f64) {
        (self.r * self.phi.cos(), self.r * self.phi.sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    Standard,
    B,
}

impl Chart {
    pub fn name(&self) -> &'static str {
        match self {
            Chart::Standard => "standard",
            Chart::B => "b",
        }
    }
}

/// A point of the (b-)cotangent bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotangentPoint {
    pub base: Point,
    pub tau: f64,
    pub xi: f64,
    pub eta: f64,
    pub chart: Chart,
}

impl CotangentPoint {
    pub const fn new(base: Point, tau: f64, xi: f64, eta: f64, chart: Chart) -> Self {
        Self {
            base,
            tau,
            xi,
            eta,
            chart,
        }
    }

    pub const fn standard(t: f64, r: f64, phi: f64, tau: f64, xi: f64, eta: f64) -> Self {
        Self::new(Point::new(t, r, phi), tau, xi, eta, Chart::Standard)
    }

    pub const fn b(t: f64, r: f64, phi: f64, tau: f64, xi_b: f64, eta: f64) -> Self {
        Self::new(Point::new(t, r, phi), tau, xi_b, eta, Chart::B)
    }

    /// Euclidean norm of `(τ, ξ, η)` in the point's own chart.
    pub fn covector_norm(&self) -> f64 {
        (self.tau * self.tau + self.xi * self.xi + self.eta * self.eta).sqrt()
    }

    pub fn is_zero_covector(&self) -> bool {
        self.tau == 0.0 && self.xi == 0.0 && self.eta == 0.0
    }

    /// `Aτ + η`, the conserved quantity whose vanishing characterizes
    /// rays through the string. Identical in both charts.
    #[inline]
    pub fn angular_momentum(&self, params: &Params) -> f64 {
        params.a() * self.tau + self.eta
    }

    /// Standard-chart radial covector component.
    pub fn xi_standard(&self) -> Result<f64> {
        match self.chart {
            Chart::Standard => Ok(self.xi),
            Chart::B => {
                if self.base.r > 0.0 {
                    Ok(self.xi / self.base.r)
                } else {
                    Err(Error::SingularPoint(self.base.r))
                }
            }
        }
    }

    pub fn to_standard(&self) -> Result<Self> {
        Ok(Self {
            xi: self.xi_standard()?,
            chart: Chart::Standard,
            ..*self
        })
    }

    pub fn to_b(&self) -> Self {
        match self.chart {
            Chart::B => *self,
            Chart::Standard => Self {
                xi: self.base.r * self.xi,
                chart: Chart::B,
                ..*self
            },
        }
    }

    pub fn to_chart(&self, chart: Chart) -> Result<Self> {
        match chart {
            Chart::Standard => self.to_standard(),
            Chart::B => Ok(self.to_b()),
        }
    }

    /// Same point with `φ` reduced to `[0, 2π)`.
    pub fn with_reduced_phi(&self) -> Self {
        let mut q = *self;
        q.base.phi = reduce_angle(q.base.phi);
        q
    }
}

/// A helical fiber of the boundary `r = 0`, labeled by `φ₀ = φ - t/A mod 2π`
/// and the frequency `τ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberPoint {
    pub phi0: f64,
    pub tau0: f64,
}

impl FiberPoint {
    pub fn new(phi0: f64, tau0: f64) -> Result<Self> {
        if tau0 == 0.0 || !tau0.is_finite() {
            return Err(Error::InvalidArgument(
                "fiber frequency tau0 must be nonzero",
            ));
        }
        if !phi0.is_finite() {
            return Err(Error::InvalidArgument("fiber angle must be finite"));
        }
        Ok(Self {
            phi0: reduce_angle(phi0),
            tau0,
        })
    }

    /// Fiber label from a boundary point: `φ₀ = φ - t/A mod 2π`.
    pub fn from_boundary(t: f64, phi: f64, tau0: f64, params: &Params) -> Result<Self> {
        Self::new(phi - t / params.a(), tau0)
    }

    /// Normalized view in `S¹ × S⁰`: `(φ₀, sgn τ₀)`.
    pub fn normalized(&self) -> (f64, f64) {
        (self.phi0, self.tau0.signum())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalType {
    Timelike,
    Null,
    Spacelike,
}

impl CausalType {
    pub fn name(&self) -> &'static str {
        match self {
            CausalType::Timelike => "timelike",
            CausalType::Null => "null",
            CausalType::Spacelike => "spacelike",
        }
    }

    fn from_norm(g: f64) -> Self {
        if g < 0.0 {
            CausalType::Timelike
        } else if g > 0.0 {
            CausalType::Spacelike
        } else {
            CausalType::Null
        }
    }
}

/// Metric coefficients in the basis `(t, r, φ)`.
pub fn metric_eval(p: &Point, params: &Params) -> Result<[[f64; 3]; 3]> {
    if !(p.r > 0.0) {
        return Err(Error::SingularPoint(p.r));
    }
    let a = params.a();
    Ok([[-1.0, 0.0, a], [0.0, 1.0, 0.0], [a, 0.0, p.r * p.r - a * a]])
}

fn quadratic_form(g: &[[f64; 3]; 3], v: &[f64; 3]) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += g[i][j] * v[i] * v[j];
        }
    }
    acc
}

/// Causal character of a tangent vector `v = (v_t, v_r, v_φ)` at `p`.
pub fn causal_type(p: &Point, v: &[f64; 3], params: &Params) -> Result<CausalType> {
    if v.iter().all(|c| *c == 0.0) {
        return Err(Error::ZeroVector);
    }
    let g = metric_eval(p, params)?;
    Ok(CausalType::from_norm(quadratic_form(&g, v)))
}

/// Causal type of the closed curve `{r = r0, t = const, φ ∈ S¹}`.
pub fn ctc_circle_type(r0: f64, params: &Params) -> Result<CausalType> {
    if !(r0 > 0.0) {
        return Err(Error::SingularPoint(r0));
    }
    let a = params.abs_a();
    Ok(if r0 < a {
        CausalType::Timelike
    } else if r0 > a {
        CausalType::Spacelike
    } else {
        CausalType::Null
    })
}

/// Principal symbol of the wave operator in the chart tagged on `q`.
///
/// Standard: `τ² - ξ² - (Aτ+η)²/r²`; b-chart: `τ² - ξ_b²/r² - (Aτ+η)²/r²`.
pub fn symbol(q: &CotangentPoint, params: &Params) -> Result<f64> {
    let r = q.base.r;
    if !(r > 0.0) {
        return Err(Error::SingularPoint(r));
    }
    let m = q.angular_momentum(params);
    let r2 = r * r;
    Ok(match q.chart {
        Chart::Standard => q.tau * q.tau - q.xi * q.xi - m * m / r2,
        Chart::B => q.tau * q.tau - (q.xi * q.xi + m * m) / r2,
    })
}

/// `|p(q)| ≤ tol (1 + |(τ, ξ, η)|²)`; false at `r ≤ 0`.
pub fn in_char_set(q: &CotangentPoint, params: &Params, tol: f64) -> bool {
    match symbol(q, params) {
        Ok(p) => {
            let n = q.covector_norm();
            p.abs() <= tol * (1.0 + n * n)
        }
        Err(_) => false,
    }
}

/// Edge covector `(ξ_e, τ_e, η_e)` at radius `r` mapped to b-coordinates,
/// returned as `(ξ, τ, η) = (r ξ_e, τ_e, r η_e - A τ_e)`.
pub fn edge_to_b(r: f64, xi_e: f64, tau_e: f64, eta_e: f64, params: &Params) -> (f64, f64, f64) {
    (r * xi_e, tau_e, r * eta_e - params.a() * tau_e)
}

/// Metric pulled back to the flat chart `(t' = t - Aφ, r, φ)`.
pub fn flat_chart_pullback(r: f64, params: &Params) -> Result<[[f64; 3]; 3]> {
    let g = metric_eval(&Point::new(0.0, r, 0.0), params)?;
    // Jacobian of (t', r, φ) -> (t, r, φ).
    let jac = [[1.0, 0.0, params.a()], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    acc += jac[k][i] * g[k][l] * jac[l][j];
                }
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}
