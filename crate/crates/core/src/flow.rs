//! Null bicharacteristic flow.
//!
//! Two Hamilton fields are integrated: the standard-chart field of
//! `p = τ² - ξ² - (Aτ+η)²/r²` and the rescaled b-field `(r²/2) ᵇH_p`, which
//! extends smoothly to `r = 0`. Their base curves agree as sets; the
//! parameters differ by the positive factor `r²/2`.
//!
//! [`FlatLine`] is the closed-form flow: in `t' = t - Aφ` and Cartesian
//! `(x, y)` every null bicharacteristic is a straight Minkowski line.

use alloc::vec::Vec;

// Inherent float methods shadow this whenever std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{
    in_char_set, symbol, Chart, CotangentPoint, Params, Point, DEFAULT_CHAR_TOL,
};
use crate::math::signum;
use crate::ode::{locate_crossing, AcceptedStep, Dopri5, OdeOptions, OdeSystem};
use crate::{Error, Result};

/// Sign of parameter increments along a stored trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(&self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    /// Asymptotically forward in time: the parameter sign equals `sgn τ`.
    pub fn forward_in_time(tau: f64) -> Self {
        if tau < 0.0 {
            Direction::Backward
        } else {
            Direction::Forward
        }
    }

    pub fn reversed(&self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopReason {
    /// `r < r_stop` on a string-bound ray (standard chart).
    ReachedString {
        r_stop: f64,
    },
    LeftDomain {
        r_max: f64,
    },
    MaxParam,
    /// `r < r_stop` on a string-bound ray in the b-chart, where the
    /// approach to `r = 0` is only asymptotic in the flow parameter.
    ConvergedToStringAsymptote,
    MaxSteps,
}

impl StopReason {
    pub fn name(&self) -> &'static str {
        match self {
            StopReason::ReachedString { .. } => "reached_string",
            StopReason::LeftDomain { .. } => "left_domain",
            StopReason::MaxParam => "max_param",
            StopReason::ConvergedToStringAsymptote => "converged_to_string_asymptote",
            StopReason::MaxSteps => "max_steps",
        }
    }

    pub fn reached_string(&self) -> bool {
        matches!(
            self,
            StopReason::ReachedString { .. } | StopReason::ConvergedToStringAsymptote
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub r_stop: f64,
    pub r_max: f64,
    /// Maximum `|s|` of the integration.
    pub s_max: f64,
    pub max_steps: usize,
    pub chart: Chart,
    pub direction: Direction,
    /// Reject seeds off the characteristic set.
    pub require_null: bool,
    pub null_tol: f64,
    /// Relative tolerance on `|Aτ+η|` for classifying a string approach.
    pub string_tol: f64,
    /// Record samples at these parameter values (dense output) instead of
    /// at the accepted steps. Values must be ordered along `direction`.
    pub output_grid: Option<Vec<f64>>,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            r_stop: 1e-6,
            r_max: 1e3,
            s_max: 1e3,
            max_steps: 1_000_000,
            chart: Chart::Standard,
            direction: Direction::Forward,
            require_null: true,
            null_tol: DEFAULT_CHAR_TOL,
            string_tol: 1e-9,
            output_grid: None,
        }
    }
}

impl IntegrationOptions {
    fn validate(&self) -> Result<()> {
        let positive = [
            self.abs_tol,
            self.rel_tol,
            self.r_stop,
            self.r_max,
            self.null_tol,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) || !(self.s_max >= 0.0) || self.max_steps == 0 {
            return Err(Error::InvalidArgument(
                "integration options must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub s: f64,
    pub point: CotangentPoint,
}

/// Maximum drifts of the conserved quantities relative to the first sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConservedDrift {
    pub tau: f64,
    pub eta: f64,
    /// `max |p|` over samples.
    pub symbol: f64,
    /// `max |p| / (1 + |covector|²)`.
    pub symbol_relative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub chart: Chart,
    pub params: Params,
    /// Samples are strictly monotone in `s`, increasing for
    /// [`Direction::Forward`] and decreasing for [`Direction::Backward`].
    pub direction: Direction,
    pub samples: Vec<Sample>,
    pub stop_reason: StopReason,
    pub drift: ConservedDrift,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        &self.samples[self.samples.len() - 1]
    }

    pub fn min_r(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.point.base.r)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_r(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.point.base.r)
            .fold(0.0, f64::max)
    }

    /// Cubic Hermite interpolation of `(t, r, φ, ξ)` between samples, using
    /// the Hamilton field at the bracketing samples as slopes.
    pub fn interpolate(&self, s: f64) -> Option<CotangentPoint> {
        let dir = self.direction.sign();
        let idx = self
            .samples
            .windows(2)
            .position(|w| (s - w[0].s) * dir >= 0.0 && (w[1].s - s) * dir >= 0.0)?;
        let (a, b) = (&self.samples[idx], &self.samples[idx + 1]);
        let field = |q: &CotangentPoint| match self.chart {
            Chart::Standard => hamilton_rhs_standard(q, &self.params),
            Chart::B => Ok(hamilton_rhs_b_rescaled(q, &self.params)),
        };
        let fa = field(&a.point).ok()?;
        let fb = field(&b.point).ok()?;
        let h = b.s - a.s;
        let th = (s - a.s) / h;
        let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        let h10 = th * (1.0 - th) * (1.0 - th);
        let h01 = th * th * (3.0 - 2.0 * th);
        let h11 = th * th * (th - 1.0);
        let ya = state_of(&a.point);
        let yb = state_of(&b.point);
        let mut y = [0.0; 4];
        for i in 0..4 {
            y[i] = h00 * ya[i] + h10 * h * fa[i] + h01 * yb[i] + h11 * h * fb[i];
        }
        Some(point_of(&y, a.point.tau, a.point.eta, self.chart))
    }
}

fn state_of(q: &CotangentPoint) -> [f64; 4] {
    [q.base.t, q.base.r, q.base.phi, q.xi]
}

fn point_of(y: &[f64; 4], tau: f64, eta: f64, chart: Chart) -> CotangentPoint {
    CotangentPoint::new(Point::new(y[0], y[1], y[2]), tau, y[3], eta, chart)
}

struct StandardField {
    a: f64,
    tau: f64,
    eta: f64,
}

impl OdeSystem<4> for StandardField {
    fn rhs(&self, _s: f64, y: &[f64; 4]) -> [f64; 4] {
        standard_field(self.a, self.tau, self.eta, y[1], y[3])
    }

    fn admissible(&self, y: &[f64; 4]) -> bool {
        y.iter().all(|v| v.is_finite()) && y[1] > 0.0
    }
}

struct BField {
    a: f64,
    tau: f64,
    eta: f64,
}

impl OdeSystem<4> for BField {
    fn rhs(&self, _s: f64, y: &[f64; 4]) -> [f64; 4] {
        b_field(self.a, self.tau, self.eta, y[1], y[3])
    }

    fn admissible(&self, y: &[f64; 4]) -> bool {
        y.iter().all(|v| v.is_finite()) && y[1] > 0.0
    }
}

#[inline]
fn standard_field(a: f64, tau: f64, eta: f64, r: f64, xi: f64) -> [f64; 4] {
    let m = a * tau + eta;
    let r2 = r * r;
    [
        2.0 * tau - 2.0 * a * m / r2,
        -2.0 * xi,
        -2.0 * m / r2,
        -2.0 * m * m / (r2 * r),
    ]
}

#[inline]
fn b_field(a: f64, tau: f64, eta: f64, r: f64, xi_b: f64) -> [f64; 4] {
    let m = a * tau + eta;
    [r * r * tau - a * m, -xi_b * r, -m, -(xi_b * xi_b + m * m)]
}

/// Standard-chart Hamilton field: derivatives of `(t, r, φ, ξ)`;
/// `τ` and `η` are constants of motion.
pub fn hamilton_rhs_standard(q: &CotangentPoint, params: &Params) -> Result<[f64; 4]> {
    let r = q.base.r;
    if !(r > 0.0) {
        return Err(Error::SingularPoint(r));
    }
    let xi = q.xi_standard()?;
    Ok(standard_field(params.a(), q.tau, q.eta, r, xi))
}

/// Rescaled b-Hamilton field `(r²/2) ᵇH_p`: derivatives of `(t, r, φ, ξ_b)`.
/// Polynomial in `r`, so it is evaluated at `r = 0` as well.
pub fn hamilton_rhs_b_rescaled(q: &CotangentPoint, params: &Params) -> [f64; 4] {
    let xi_b = match q.chart {
        Chart::B => q.xi,
        Chart::Standard => q.base.r * q.xi,
    };
    b_field(params.a(), q.tau, q.eta, q.base.r, xi_b)
}

fn is_string_bound_rel(q: &CotangentPoint, params: &Params, tol: f64) -> bool {
    q.angular_momentum(params).abs() <= tol * q.covector_norm()
}

/// Integrates the Hamilton field of the chart selected in `opts`, starting
/// from `q0` and moving in `opts.direction`.
pub fn integrate_ray(
    q0: &CotangentPoint,
    opts: &IntegrationOptions,
    params: &Params,
) -> Result<Trajectory> {
    opts.validate()?;
    if !(q0.base.r > 0.0) {
        return Err(Error::SingularPoint(q0.base.r));
    }
    if q0.is_zero_covector() {
        return Err(Error::ZeroVector);
    }
    let start = q0.to_chart(opts.chart)?;
    if opts.require_null && !in_char_set(&start, params, opts.null_tol) {
        return Err(Error::OffCharacteristicSet(symbol(&start, params)?));
    }
    let dir = opts.direction.sign();
    let s_end = dir * opts.s_max;
    let string_bound = is_string_bound_rel(&start, params, opts.string_tol);
    let (tau, eta) = (start.tau, start.eta);

    let mut rec = Recorder::new(&start, opts);
    let stop = if opts.s_max == 0.0 {
        StopReason::MaxParam
    } else {
        match opts.chart {
            Chart::Standard => {
                let sys = StandardField {
                    a: params.a(),
                    tau,
                    eta,
                };
                drive(&sys, &start, opts, s_end, string_bound, &mut rec)
            }
            Chart::B => {
                let sys = BField {
                    a: params.a(),
                    tau,
                    eta,
                };
                drive(&sys, &start, opts, s_end, string_bound, &mut rec)
            }
        }
    };

    let mut traj = Trajectory {
        chart: opts.chart,
        params: *params,
        direction: opts.direction,
        samples: rec.samples,
        stop_reason: stop,
        drift: ConservedDrift::default(),
    };
    traj.drift = conserved_report(&traj)?;
    Ok(traj)
}

struct Recorder<'o> {
    samples: Vec<Sample>,
    tau: f64,
    eta: f64,
    chart: Chart,
    grid: Option<&'o [f64]>,
    grid_pos: usize,
    dir: f64,
}

impl<'o> Recorder<'o> {
    fn new(start: &CotangentPoint, opts: &'o IntegrationOptions) -> Self {
        let samples = alloc::vec![Sample {
            s: 0.0,
            point: *start
        }];
        let dir = opts.direction.sign();
        let grid = opts.output_grid.as_deref();
        // Grid points at or behind s = 0 are already covered by the seed.
        let grid_pos = grid.map_or(0, |g| g.iter().take_while(|s| **s * dir <= 0.0).count());
        Self {
            samples,
            tau: start.tau,
            eta: start.eta,
            chart: start.chart,
            grid,
            grid_pos,
            dir,
        }
    }

    fn push(&mut self, s: f64, y: &[f64; 4]) {
        let last = self.samples[self.samples.len() - 1].s;
        if (s - last) * self.dir > 0.0 {
            self.samples.push(Sample {
                s,
                point: point_of(y, self.tau, self.eta, self.chart),
            });
        }
    }

    /// Records the part of an accepted step up to parameter `upto`.
    fn record(&mut self, step: &AcceptedStep<4>, upto: f64, upto_state: &[f64; 4]) {
        match self.grid {
            None => self.push(upto, upto_state),
            Some(grid) => {
                while self.grid_pos < grid.len() && (upto - grid[self.grid_pos]) * self.dir >= 0.0 {
                    let s = grid[self.grid_pos];
                    let y = if s == upto {
                        *upto_state
                    } else {
                        step.dense(s)
                    };
                    self.push(s, &y);
                    self.grid_pos += 1;
                }
            }
        }
    }

    fn record_stop(&mut self, s: f64, y: &[f64; 4]) {
        self.push(s, y);
    }
}

fn drive<S: OdeSystem<4>>(
    sys: &S,
    start: &CotangentPoint,
    opts: &IntegrationOptions,
    s_end: f64,
    string_bound: bool,
    rec: &mut Recorder,
) -> StopReason {
    let ode_opts = OdeOptions {
        abs_tol: opts.abs_tol,
        rel_tol: opts.rel_tol,
        ..Default::default()
    };
    let mut stepper = Dopri5::new(sys, 0.0, state_of(start), opts.direction.sign(), ode_opts);
    let string_stop = match opts.chart {
        Chart::Standard => StopReason::ReachedString {
            r_stop: opts.r_stop,
        },
        Chart::B => StopReason::ConvergedToStringAsymptote,
    };
    for _ in 0..opts.max_steps {
        let step = match stepper.step(s_end) {
            Ok(step) => step,
            // Only happens where ξ̇ ~ r⁻³ is unresolvable: the ray is at the string.
            Err(_) => return string_stop,
        };
        let r1 = step.y1[1];
        if string_bound && r1 < opts.r_stop {
            let (s, y) = locate_crossing(&step, |y| y[1] - opts.r_stop);
            rec.record(&step, s, &y);
            rec.record_stop(s, &y);
            return string_stop;
        }
        if r1 > opts.r_max {
            let (s, y) = locate_crossing(&step, |y| y[1] - opts.r_max);
            rec.record(&step, s, &y);
            rec.record_stop(s, &y);
            return StopReason::LeftDomain { r_max: opts.r_max };
        }
        rec.record(&step, step.s1, &step.y1);
        if step.s1 == s_end {
            rec.record_stop(step.s1, &step.y1);
            // In the b-chart a string-bound ray only approaches r = 0 like
            // 1/s; an incoming one has r monotonically decreasing to 0.
            let incoming = step.y1[3] * opts.direction.sign() > 0.0;
            if string_bound && opts.chart == Chart::B && incoming {
                return StopReason::ConvergedToStringAsymptote;
            }
            return StopReason::MaxParam;
        }
    }
    let (s, y) = stepper.position();
    rec.record_stop(s, &y);
    StopReason::MaxSteps
}

/// Conserved-quantity drifts along a trajectory.
pub fn conserved_report(traj: &Trajectory) -> Result<ConservedDrift> {
    let first = traj
        .samples
        .first()
        .ok_or(Error::InvalidArgument("empty trajectory"))?;
    let mut d = ConservedDrift::default();
    for s in &traj.samples {
        let q = &s.point;
        d.tau = d.tau.max((q.tau - first.point.tau).abs());
        d.eta = d.eta.max((q.eta - first.point.eta).abs());
        let p = symbol(q, &traj.params)?.abs();
        let n = q.covector_norm();
        d.symbol = d.symbol.max(p);
        d.symbol_relative = d.symbol_relative.max(p / (1.0 + n * n));
    }
    Ok(d)
}

/// Closed-form null bicharacteristic in the flat chart.
///
/// With `ζ` the Cartesian spatial covector, the standard-chart Hamilton
/// flow reads `x(s) = x₀ - 2ζ s`, `t'(s) = t'₀ + 2τ s`, and `|ζ| = |τ|` on
/// the characteristic set, so the spatial speed is `2|τ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatLine {
    a: f64,
    x0: f64,
    y0: f64,
    zeta_x: f64,
    zeta_y: f64,
    tprime0: f64,
    phi0: f64,
    tau: f64,
    eta: f64,
}

impl FlatLine {
    /// Builds the line through `q`. Does not check `q ∈ Σ`.
    pub fn new(q: &CotangentPoint, params: &Params) -> Result<Self> {
        let q = q.to_standard()?;
        let r = q.base.r;
        if !(r > 0.0) {
            return Err(Error::SingularPoint(r));
        }
        let (c, s) = (q.base.phi.cos(), q.base.phi.sin());
        let x0 = r * c;
        let y0 = r * s;
        // Flat-chart angular covector η' = Aτ + η.
        let m = q.angular_momentum(params);
        let zeta_x = q.xi * c - m * s / r;
        let zeta_y = q.xi * s + m * c / r;
        Ok(Self {
            a: params.a(),
            x0,
            y0,
            zeta_x,
            zeta_y,
            tprime0: q.base.t - params.a() * q.base.phi,
            phi0: q.base.phi,
            tau: q.tau,
            eta: q.eta,
        })
    }

    pub fn position(&self, s: f64) -> (f64, f64) {
        (
            self.x0 - 2.0 * self.zeta_x * s,
            self.y0 - 2.0 * self.zeta_y * s,
        )
    }

    /// Flat time `t' = t - Aφ` at parameter `s`.
    pub fn flat_time(&self, s: f64) -> f64 {
        self.tprime0 + 2.0 * self.tau * s
    }

    /// Spatial speed `2|ζ|` per unit Hamilton parameter.
    pub fn speed(&self) -> f64 {
        2.0 * self.zeta_x.hypot(self.zeta_y)
    }

    /// Unit spatial direction of travel as `s` increases.
    pub fn velocity_direction(&self) -> (f64, f64) {
        let n = self.zeta_x.hypot(self.zeta_y);
        (-self.zeta_x / n, -self.zeta_y / n)
    }

    /// Distance of closest approach to the string.
    pub fn impact_parameter(&self) -> f64 {
        let n = self.zeta_x.hypot(self.zeta_y);
        (self.x0 * self.zeta_y - self.y0 * self.zeta_x).abs() / n
    }

    /// Parameter of closest approach to the string.
    pub fn closest_approach(&self) -> f64 {
        let z2 = self.zeta_x * self.zeta_x + self.zeta_y * self.zeta_y;
        (self.x0 * self.zeta_x + self.y0 * self.zeta_y) / (2.0 * z2)
    }

    /// Parameter of the point on the line nearest to the spatial point `(x, y)`.
    pub fn project(&self, x: f64, y: f64) -> f64 {
        let z2 = self.zeta_x * self.zeta_x + self.zeta_y * self.zeta_y;
        -((x - self.x0) * self.zeta_x + (y - self.y0) * self.zeta_y) / (2.0 * z2)
    }

    /// Angle swept from the seed, continuous along the line. A line missing
    /// the origin sweeps strictly less than `π`, so `atan2` is the lift.
    pub fn swept_angle(&self, s: f64) -> f64 {
        let (x, y) = self.position(s);
        let cross = self.x0 * y - self.y0 * x;
        let dot = self.x0 * x + self.y0 * y;
        cross.atan2(dot)
    }

    /// Standard-chart point at parameter `s`. `ξ` is recomputed from the
    /// position as the radial component of `ζ`, which keeps the point on
    /// the characteristic set identically.
    pub fn point_at(&self, s: f64) -> CotangentPoint {
        let (x, y) = self.position(s);
        let r = x.hypot(y);
        let phi = self.phi0 + self.swept_angle(s);
        let t = self.flat_time(s) + self.a * phi;
        let xi = (x * self.zeta_x + y * self.zeta_y) / r;
        CotangentPoint::standard(t, r, phi, self.tau, xi, self.eta)
    }
}

/// Exact flow of the standard-chart Hamilton field from `q0` by parameter
/// `s`, returned in `q0`'s chart.
pub fn flat_chart_geodesic(q0: &CotangentPoint, s: f64, params: &Params) -> Result<CotangentPoint> {
    if !(q0.base.r > 0.0) {
        return Err(Error::SingularPoint(q0.base.r));
    }
    if q0.is_zero_covector() {
        return Err(Error::ZeroVector);
    }
    if !in_char_set(q0, params, DEFAULT_CHAR_TOL) {
        return Err(Error::OffCharacteristicSet(symbol(q0, params)?));
    }
    let m = q0.angular_momentum(params);
    if m.abs() <= 1e-12 * q0.covector_norm() {
        return Err(Error::StringBound);
    }
    let line = FlatLine::new(q0, params)?;
    if s == 0.0 {
        return Ok(*q0);
    }
    line.point_at(s).to_chart(q0.chart)
}

/// `sgn ṫ` at a standard- or b-chart point, from the standard field.
pub fn time_derivative_sign(q: &CotangentPoint, params: &Params) -> Result<f64> {
    Ok(signum(hamilton_rhs_standard(q, params)?[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_4, PI};

    fn p(a: f64) -> Params {
        Params::new(a).unwrap()
    }

    #[test]
    fn standard_rhs_examples() {
        let q = CotangentPoint::standard(0.0, 2.0, 0.0, 1.0, 1.0, -1.0);
        assert_eq!(
            hamilton_rhs_standard(&q, &p(1.0)).unwrap(),
            [2.0, -2.0, 0.0, 0.0]
        );
        let q = CotangentPoint::standard(0.0, 1.0, 0.0, 1.0, 0.0, 1.0);
        let f = hamilton_rhs_standard(&q, &p(1e-300)).unwrap();
        for (got, want) in f.iter().zip([2.0, 0.0, -2.0, -2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let q0 = CotangentPoint::standard(0.0, 0.0, 0.0, 1.0, 0.0, 1.0);
        assert!(hamilton_rhs_standard(&q0, &p(1.0)).is_err());
    }

    #[test]
    fn standard_rhs_scales_linearly() {
        let params = p(0.7);
        let q = CotangentPoint::standard(0.0, 1.3, 0.2, 0.9, -0.4, 0.3);
        let f = hamilton_rhs_standard(&q, &params).unwrap();
        let lam = 3.5;
        let ql = CotangentPoint::standard(0.0, 1.3, 0.2, lam * 0.9, lam * -0.4, lam * 0.3);
        let fl = hamilton_rhs_standard(&ql, &params).unwrap();
        for i in 0..3 {
            assert!((fl[i] - lam * f[i]).abs() < 1e-12);
        }
        // ξ̇ is degree two.
        assert!((fl[3] - lam * lam * f[3]).abs() < 1e-12);
    }

    #[test]
    fn b_rhs_examples() {
        let q = CotangentPoint::b(0.0, 2.0, 0.0, 1.0, 2.0, -1.0);
        assert_eq!(hamilton_rhs_b_rescaled(&q, &p(1.0)), [4.0, -4.0, 0.0, -4.0]);
        let q = CotangentPoint::b(0.0, 0.0, 0.0, 1.0, 0.0, -1.0);
        assert_eq!(hamilton_rhs_b_rescaled(&q, &p(1.0)), [0.0; 4]);
        let q = CotangentPoint::b(0.0, 1.0, 0.0, 0.0, 1.0, 0.0);
        let f = hamilton_rhs_b_rescaled(&q, &p(1.0));
        assert_eq!(f, [0.0, -1.0, 0.0, -1.0]);
    }

    #[test]
    fn b_rhs_is_rescaled_standard_on_base() {
        let params = p(-1.3);
        let q = CotangentPoint::standard(0.4, 0.8, 1.0, 1.1, 0.3, -0.2);
        let fs = hamilton_rhs_standard(&q, &params).unwrap();
        let fb = hamilton_rhs_b_rescaled(&q.to_b(), &params);
        let r2 = 0.8 * 0.8;
        for i in 0..3 {
            assert!((fb[i] - 0.5 * r2 * fs[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn radial_string_bound_ray_hits_r_stop() {
        let params = p(1.0);
        let q0 = CotangentPoint::standard(0.0, 2.0, 0.0, 1.0, 1.0, -1.0);
        let traj = integrate_ray(&q0, &IntegrationOptions::default(), &params).unwrap();
        assert_eq!(traj.stop_reason, StopReason::ReachedString { r_stop: 1e-6 });
        let last = traj.last().point;
        assert!((last.base.r - 1e-6).abs() < 1e-12);
        assert!((last.base.t - (2.0 - 1e-6)).abs() < 1e-10);
        assert!(traj.samples.iter().all(|s| s.point.base.phi == 0.0));
    }

    #[test]
    fn b_chart_string_bound_ray_converges() {
        let params = p(1.0);
        let q0 = CotangentPoint::b(0.0, 2.0, 0.0, 1.0, 2.0, -1.0);
        for s_max in [1e3, 1e7] {
            let opts = IntegrationOptions {
                chart: Chart::B,
                s_max,
                ..Default::default()
            };
            let traj = integrate_ray(&q0, &opts, &params).unwrap();
            assert_eq!(traj.stop_reason, StopReason::ConvergedToStringAsymptote);
            let last = traj.last().point;
            // r = 2 / (1 + 2s) along this ray.
            assert!((last.base.r - 2.0 / (1.0 + 2.0 * traj.last().s)).abs() < 1e-9);
            assert!((last.base.t - (2.0 - last.base.r)).abs() < 1e-9);
        }
    }

    #[test]
    fn angular_momentum_ray_leaves_domain() {
        let params = p(1.0);
        let q0 = CotangentPoint::standard(0.0, 3.0, 0.0, 1.0, 0.0, 2.0);
        let opts = IntegrationOptions {
            r_max: 50.0,
            ..Default::default()
        };
        let traj = integrate_ray(&q0, &opts, &params).unwrap();
        assert_eq!(traj.stop_reason, StopReason::LeftDomain { r_max: 50.0 });
        assert!(traj.min_r() > 2.9);
    }

    #[test]
    fn zero_length_request() {
        let params = p(1.0);
        let q0 = CotangentPoint::standard(0.0, 3.0, 0.0, 1.0, 0.0, 2.0);
        let opts = IntegrationOptions {
            s_max: 0.0,
            ..Default::default()
        };
        let traj = integrate_ray(&q0, &opts, &params).unwrap();
        assert_eq!(traj.samples.len(), 1);
        assert_eq!(traj.samples[0].point, q0);
        assert_eq!(traj.stop_reason, StopReason::MaxParam);
    }

    #[test]
    fn off_shell_seed_rejected() {
        let params = p(1.0);
        let q0 = CotangentPoint::standard(0.0, 3.0, 0.0, 1.0, 0.5, 2.0);
        assert!(matches!(
            integrate_ray(&q0, &IntegrationOptions::default(), &params),
            Err(Error::OffCharacteristicSet(_))
        ));
        let opts = IntegrationOptions {
            require_null: false,
            s_max: 1.0,
            ..Default::default()
        };
        assert!(integrate_ray(&q0, &opts, &params).is_ok());
    }

    #[test]
    fn flat_geodesic_example() {
        // x = (2, 0), unit velocity (0, 1): τ = 1/2 makes s the flat arclength.
        let params = p(1.0);
        let q0 = CotangentPoint::standard(0.0, 2.0, 0.0, 0.5, 0.0, -1.5);
        let q = flat_chart_geodesic(&q0, 2.0, &params).unwrap();
        assert!((q.base.r - 8f64.sqrt()).abs() < 1e-14);
        assert!((q.base.phi - FRAC_PI_4).abs() < 1e-14);
        assert!((q.base.t - (2.0 + FRAC_PI_4)).abs() < 1e-14);
        assert_eq!(flat_chart_geodesic(&q0, 0.0, &params).unwrap(), q0);
    }

    #[test]
    fn flat_geodesic_rejects_string_bound() {
        let params = p(1.0);
        let q0 = CotangentPoint::standard(0.0, 2.0, 0.0, 1.0, 1.0, -1.0);
        assert_eq!(
            flat_chart_geodesic(&q0, 0.5, &params),
            Err(Error::StringBound)
        );
    }

    #[test]
    fn flat_geodesic_small_a_is_minkowski() {
        let params = p(1e-12);
        let q0 = CotangentPoint::standard(1.0, 2.0, 0.0, 0.5, 0.0, 1.0);
        let q = flat_chart_geodesic(&q0, 2.0, &params).unwrap();
        // Minkowski: x = (2, -2) after unit-speed distance 2 with ζ = (0, 1/2).
        assert!((q.base.r - 8f64.sqrt()).abs() < 1e-12);
        assert!((q.base.phi + FRAC_PI_4).abs() < 1e-12);
        assert!((q.base.t - 3.0).abs() < 1e-11);
    }

    #[test]
    fn flat_line_sweeps_less_than_pi() {
        let params = p(0.5);
        let q0 = CotangentPoint::standard(0.0, 1.0, 0.3, 1.0, 0.999, 0.0);
        let m = q0.angular_momentum(&params);
        let xi = (1.0 - m * m).sqrt();
        let q0 = CotangentPoint::standard(0.0, 1.0, 0.3, 1.0, xi, 0.0);
        let line = FlatLine::new(&q0, &params).unwrap();
        let far = line.swept_angle(1e8);
        let back = line.swept_angle(-1e8);
        assert!((far - back).abs() < PI);
        assert!((far - back).abs() > PI - 1e-6);
    }

    #[test]
    fn integrator_matches_oracle() {
        let params = p(1.0);
        // Impact parameter 0.3 < |A|: passes through the CTC region.
        let tau = 1.0;
        let m = 0.3;
        let r0 = 2.0;
        let xi = (tau * tau - m * m / (r0 * r0)).sqrt();
        let q0 = CotangentPoint::standard(0.0, r0, 0.5, tau, xi, m - params.a() * tau);
        let opts = IntegrationOptions {
            s_max: 5.0,
            ..Default::default()
        };
        let traj = integrate_ray(&q0, &opts, &params).unwrap();
        for smp in &traj.samples {
            let o = flat_chart_geodesic(&q0, smp.s, &params).unwrap();
            let d = (smp.point.base.t - o.base.t).abs()
                + (smp.point.base.r - o.base.r).abs()
                + (smp.point.base.phi - o.base.phi).abs();
            assert!(d < 1e-9, "s = {}, d = {d}", smp.s);
        }
        assert_eq!(traj.drift.tau, 0.0);
        assert_eq!(traj.drift.eta, 0.0);
        assert!(traj.drift.symbol_relative < 1e-10);
    }

    #[test]
    fn output_grid_sampling() {
        let params = p(1.0);
        let q0 = CotangentPoint::standard(0.0, 3.0, 0.0, 1.0, 0.0, 2.0);
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let opts = IntegrationOptions {
            s_max: 5.0,
            output_grid: Some(grid.clone()),
            ..Default::default()
        };
        let traj = integrate_ray(&q0, &opts, &params).unwrap();
        let ss: Vec<f64> = traj.samples.iter().map(|s| s.s).collect();
        assert_eq!(ss, grid);
        for smp in &traj.samples {
            let o = flat_chart_geodesic(&q0, smp.s, &params).unwrap();
            assert!((smp.point.base.t - o.base.t).abs() < 1e-9);
            assert!((smp.point.base.phi - o.base.phi).abs() < 1e-9);
        }
    }

    #[test]
    fn backward_integration_matches_oracle() {
        let params = p(0.25);
        let q0 = CotangentPoint::standard(1.0, 0.5, 2.0, -1.0, -0.6, 0.4 + 0.25);
        let m = q0.angular_momentum(&params);
        let xi = -(1.0 - m * m / 0.25).sqrt();
        let q0 = CotangentPoint { xi, ..q0 };
        let opts = IntegrationOptions {
            s_max: 3.0,
            direction: Direction::Backward,
            ..Default::default()
        };
        let traj = integrate_ray(&q0, &opts, &params).unwrap();
        assert!(traj.samples.windows(2).all(|w| w[1].s < w[0].s));
        let last = traj.last();
        assert_eq!(last.s, -3.0);
        let o = flat_chart_geodesic(&q0, -3.0, &params).unwrap();
        assert!((last.point.base.t - o.base.t).abs() < 1e-9);
    }

    #[test]
    fn hermite_interpolation_between_samples() {
        let params = p(1.0);
        let q0 = CotangentPoint::standard(0.0, 3.0, 0.0, 1.0, 0.0, 2.0);
        let opts = IntegrationOptions {
            s_max: 2.0,
            ..Default::default()
        };
        let traj = integrate_ray(&q0, &opts, &params).unwrap();
        let w = &traj.samples[1..3];
        let mid = 0.5 * (w[0].s + w[1].s);
        let q = traj.interpolate(mid).unwrap();
        let o = flat_chart_geodesic(&q0, mid, &params).unwrap();
        assert!((q.base.r - o.base.r).abs() < 1e-5);
        assert!(traj.interpolate(10.0).is_none());
    }

    #[test]
    fn coarse_tolerance_has_larger_drift() {
        let params = p(1.0);
        let m = 0.05;
        let r0 = 2.0;
        let xi = (1.0 - m * m / (r0 * r0)).sqrt();
        let q0 = CotangentPoint::standard(0.0, r0, 0.0, 1.0, xi, m - 1.0);
        let drift = |tol: f64| {
            let opts = IntegrationOptions {
                abs_tol: tol,
                rel_tol: tol,
                s_max: 3.0,
                ..Default::default()
            };
            integrate_ray(&q0, &opts, &params)
                .unwrap()
                .drift
                .symbol_relative
        };
        let coarse = drift(1e-2);
        let mid = drift(1e-6);
        let fine = drift(1e-10);
        assert!(coarse > 0.0);
        assert!(coarse >= mid && mid >= fine, "{coarse} {mid} {fine}");
        assert!(fine < 1e-8);
    }
}
