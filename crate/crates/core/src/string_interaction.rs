//! Rays that reach the string, their boundary fibers, outgoing fans and the
//! `±Aπ` time jump of near-miss rays.
//!
//! A null ray reaches `r = 0` iff `Aτ + η = 0`. Such a ray has `φ̇ = 0` and
//! `|dr/dt| = 1`, so its hit (or departure) time and fiber are closed form.
//! The orientation is fixed by `sgn(ξ/τ)`: `+1` is incoming, `-1` outgoing.
//! Both signs of `τ` are covered because `dr/dt = -ξ/τ` on these rays.

use alloc::vec::Vec;

use crate::flow::{FlatLine, Trajectory};
use crate::geometry::{in_char_set, symbol, CotangentPoint, FiberPoint, Params, DEFAULT_CHAR_TOL};
use crate::math::signum;
use crate::{Error, Result};

/// Relative tolerance on `|Aτ+η|` used when the caller does not supply one.
pub const DEFAULT_STRING_TOL: f64 = 1e-9;

/// Incoming or outgoing string-bound orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Incoming,
    Outgoing,
}

/// Orientation from `sgn(ξ/τ)`; `None` when `ξ` or `τ` vanishes.
pub fn orientation(q: &CotangentPoint) -> Option<Orientation> {
    let s = signum(q.xi) * signum(q.tau);
    if s > 0.0 {
        Some(Orientation::Incoming)
    } else if s < 0.0 {
        Some(Orientation::Outgoing)
    } else {
        None
    }
}

/// `|Aτ+η| ≤ tol·‖covector‖`, for `q` on the characteristic set.
pub fn is_string_bound(q: &CotangentPoint, params: &Params, tol: f64) -> Result<bool> {
    if !in_char_set(q, params, DEFAULT_CHAR_TOL) {
        return Err(Error::OffCharacteristicSet(symbol(q, params)?));
    }
    Ok(q.angular_momentum(params).abs() <= tol * q.covector_norm())
}

fn require_string_bound(q: &CotangentPoint, params: &Params) -> Result<()> {
    if !is_string_bound(q, params, DEFAULT_STRING_TOL)? {
        return Err(Error::NotStringBound(q.angular_momentum(params)));
    }
    Ok(())
}

/// Fiber reached by an incoming string-bound ray, and the hit time.
pub fn fiber_data(q: &CotangentPoint, params: &Params) -> Result<(FiberPoint, f64)> {
    require_string_bound(q, params)?;
    if orientation(q) != Some(Orientation::Incoming) {
        return Err(Error::OutgoingOrientation);
    }
    let t_hit = q.base.t + q.base.r;
    Ok((
        FiberPoint::from_boundary(t_hit, q.base.phi, q.tau, params)?,
        t_hit,
    ))
}

/// Fiber an outgoing string-bound ray departed from (limit of the reversed
/// flow), and the departure time.
pub fn outgoing_fiber_data(q: &CotangentPoint, params: &Params) -> Result<(FiberPoint, f64)> {
    require_string_bound(q, params)?;
    if orientation(q) != Some(Orientation::Outgoing) {
        return Err(Error::InvalidArgument("ray is not outgoing"));
    }
    let t_dep = q.base.t - q.base.r;
    Ok((
        FiberPoint::from_boundary(t_dep, q.base.phi, q.tau, params)?,
        t_dep,
    ))
}

/// Sampling of the outgoing bundle over one fiber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanSpec {
    pub fiber: FiberPoint,
    pub n_events: usize,
    /// Departure times `[t_start, t_end]`, inclusive.
    pub t_window: (f64, f64),
    pub epsilon_r: f64,
}

impl FanSpec {
    pub fn new(fiber: FiberPoint, n_events: usize, t_window: (f64, f64)) -> Result<Self> {
        let spec = Self {
            fiber,
            n_events,
            t_window,
            epsilon_r: 1e-4,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.t_window;
        if self.n_events == 0 {
            return Err(Error::InvalidArgument("fan needs at least one event"));
        }
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(Error::InvalidArgument("empty departure window"));
        }
        if !(self.epsilon_r > 0.0) {
            return Err(Error::InvalidArgument("departure radius must be positive"));
        }
        Ok(())
    }

    /// Evenly spaced departure times, endpoints included.
    pub fn departure_times(&self) -> Vec<f64> {
        let (a, b) = self.t_window;
        if self.n_events == 1 {
            return alloc::vec![a];
        }
        let n = (self.n_events - 1) as f64;
        (0..self.n_events)
            .map(|j| {
                if j + 1 == self.n_events {
                    b
                } else {
                    a + (b - a) * (j as f64 / n)
                }
            })
            .collect()
    }
}

/// Outgoing string-bound seeds leaving the fiber at the departure times of
/// `spec`. Each seed sits at radius `epsilon_r`, `epsilon_r` after departure,
/// with `τ = τ₀`, `η = -Aτ₀` and `ξ = -τ₀`.
pub fn outgoing_fan(spec: &FanSpec, params: &Params) -> Result<Vec<CotangentPoint>> {
    spec.validate()?;
    let tau0 = spec.fiber.tau0;
    let eps = spec.epsilon_r;
    Ok(spec
        .departure_times()
        .into_iter()
        .map(|t| {
            let phi = crate::math::reduce_angle(spec.fiber.phi0 + t / params.a());
            CotangentPoint::standard(t + eps, eps, phi, tau0, -tau0, -params.a() * tau0)
        })
        .collect())
}

/// Which side of a near-miss ray the string lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// String on the left of the direction of travel; `Δφ > 0`.
    Left,
    Right,
}

impl Side {
    pub fn sign(&self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }
}

/// Unit-speed null ray passing the string at distance `b`, with closest
/// approach at `s = 0`, `t = 0`, `φ = 0`.
pub fn near_miss_ray(b: f64, side: Side, params: &Params) -> Result<CotangentPoint> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::StringBound);
    }
    // Base point (b, 0); travel along (0, ±1). ẋ = -2ζ and τ = 1/2 give
    // unit speed with ζ = (0, ∓1/2), so η' = b·ζ_y.
    let tau = 0.5;
    let eta_flat = -0.5 * side.sign() * b;
    Ok(CotangentPoint::standard(
        0.0,
        b,
        0.0,
        tau,
        0.0,
        eta_flat - params.a() * tau,
    ))
}

/// Angular contribution `A·Δφ` to `t(s₁) - t(-s₁)` along the unit-speed line
/// at impact parameter `b`. Tends to `±Aπ` as `b → 0`.
pub fn near_string_time_jump(b: f64, side: Side, s1: f64, params: &Params) -> Result<f64> {
    if !(s1 >= 1.0) {
        return Err(Error::InvalidArgument("s1 must be at least 1"));
    }
    let q = near_miss_ray(b, side, params)?;
    let line = FlatLine::new(&q, params)?;
    let before = line.point_at(-s1);
    let after = line.point_at(s1);
    // dt'/ds = 2τ = 1.
    Ok((after.base.t - before.base.t) - 2.0 * s1)
}

/// Result of [`min_time_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeBound {
    /// `min_s [t(s) - t(0)]` over samples.
    pub min_dt: f64,
    pub passes: bool,
}

/// Checks `t(s) - t(0) ≥ -|A|π - tol` along a trajectory whose parameter
/// runs forward in time asymptotically.
pub fn min_time_bound_check(traj: &Trajectory, tol: f64) -> Result<TimeBound> {
    let first = traj
        .samples
        .first()
        .ok_or(Error::InvalidArgument("empty trajectory"))?;
    if signum(first.point.tau) != traj.direction.sign() {
        return Err(Error::Unoriented);
    }
    let t0 = first.point.base.t;
    let min_dt = traj
        .samples
        .iter()
        .map(|s| s.point.base.t - t0)
        .fold(0.0, f64::min);
    Ok(TimeBound {
        min_dt,
        passes: min_dt >= -traj.params.abs_a() * core::f64::consts::PI - tol,
    })
}
