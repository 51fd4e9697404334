//! Forward wavefront-set prediction: the forward flowout of the seeds plus
//! the outgoing bundles over every fiber the flowout strikes.
//!
//! The flow is not continued through `r = 0`. A string-bound ray ends at
//! `r_stop` and contributes its fiber instead; outgoing bundles are kept as
//! fiber labels and sampled on demand with
//! [`outgoing_fan`](crate::string_interaction::outgoing_fan).

use alloc::vec::Vec;

// Inherent float methods shadow this whenever std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::flow::{integrate_ray, Direction, FlatLine, IntegrationOptions, Trajectory};
use crate::geometry::{in_char_set, CotangentPoint, FiberPoint, Params, DEFAULT_CHAR_TOL};
use crate::math::{angle_distance, signum};
use crate::regions::BaseRegion;
use crate::string_interaction::{fiber_data, orientation, Orientation};
use crate::{Error, Result};

/// Fibers closer than this in `φ₀` with equal `sgn τ₀` are merged.
pub const FIBER_MERGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SeedSet {
    pub seeds: Vec<CotangentPoint>,
    pub region: Option<BaseRegion>,
}

impl SeedSet {
    pub fn new(seeds: Vec<CotangentPoint>, region: Option<BaseRegion>) -> Result<Self> {
        if seeds.iter().any(|q| !(q.base.r > 0.0)) {
            return Err(Error::InvalidArgument("seeds must have r > 0"));
        }
        Ok(Self { seeds, region })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Only the fibers actually struck by the flowout.
    Refined,
    /// The full outgoing bundle over every fiber.
    TheoremBound,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Refined => "refined",
            Mode::TheoremBound => "theorem_bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flowout {
    pub rays: Vec<Trajectory>,
    /// Indices of seeds off the characteristic set (or otherwise rejected).
    pub dropped: Vec<usize>,
}

/// Forward-in-time flowout of one seed: the parameter sign is `sgn τ`.
pub fn forward_ray(
    q: &CotangentPoint,
    params: &Params,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    let opts = IntegrationOptions {
        direction: Direction::forward_in_time(q.tau),
        require_null: true,
        ..opts.clone()
    };
    integrate_ray(q, &opts, params)
}

/// Forward flowout of a seed set; seeds off the characteristic set are
/// dropped and reported.
pub fn forward_flowout(seeds: &SeedSet, params: &Params, opts: &IntegrationOptions) -> Flowout {
    let results: Vec<_> = seeds
        .seeds
        .iter()
        .map(|q| forward_ray(q, params, opts))
        .collect();
    collect_flowout(results)
}

/// Splits per-seed integration results into rays and dropped indices.
pub fn collect_flowout(results: Vec<Result<Trajectory>>) -> Flowout {
    let mut rays = Vec::new();
    let mut dropped = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(traj) => rays.push(traj),
            Err(_) => dropped.push(i),
        }
    }
    Flowout { rays, dropped }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictedWF {
    pub rays: Vec<Trajectory>,
    /// Fibers struck by the flowout, deduplicated.
    pub fibers: Vec<FiberPoint>,
    pub mode: Mode,
}

impl PredictedWF {
    /// Whether every fiber's outgoing bundle is predicted.
    pub fn all_fibers(&self) -> bool {
        self.mode == Mode::TheoremBound
    }
}

fn same_fiber(a: &FiberPoint, b: &FiberPoint, tol: f64) -> bool {
    signum(a.tau0) == signum(b.tau0) && angle_distance(a.phi0, b.phi0).abs() <= tol
}

/// Builds the prediction from an already computed flowout.
pub fn assemble_prediction(flowout: Flowout, params: &Params, mode: Mode) -> PredictedWF {
    let mut fibers: Vec<FiberPoint> = Vec::new();
    for traj in &flowout.rays {
        if !traj.stop_reason.reached_string() {
            continue;
        }
        if let Ok((f, _)) = fiber_data(&traj.first().point, params) {
            if !fibers.iter().any(|g| same_fiber(g, &f, FIBER_MERGE_TOL)) {
                fibers.push(f);
            }
        }
    }
    PredictedWF {
        rays: flowout.rays,
        fibers,
        mode,
    }
}

pub fn predict_wf(
    seeds: &SeedSet,
    params: &Params,
    mode: Mode,
    opts: &IntegrationOptions,
) -> PredictedWF {
    assemble_prediction(forward_flowout(seeds, params, opts), params, mode)
}

/// Unit flat-chart covector `(τ, ζ_x, ζ_y)/|·|` and Cartesian base `(t, x, y)`.
fn flat_view(q: &CotangentPoint, params: &Params) -> Option<([f64; 3], [f64; 3])> {
    let q = q.to_standard().ok()?;
    let r = q.base.r;
    let (s, c) = q.base.phi.sin_cos();
    let m = q.angular_momentum(params);
    let zx = q.xi * c - m * s / r;
    let zy = q.xi * s + m * c / r;
    let n = (q.tau * q.tau + zx * zx + zy * zy).sqrt();
    if !(n > 0.0) {
        return None;
    }
    Some(([q.base.t, r * c, r * s], [q.tau / n, zx / n, zy / n]))
}

/// Base distance plus chordal distance of normalized covectors.
fn phase_distance(a: &([f64; 3], [f64; 3]), b: &([f64; 3], [f64; 3])) -> f64 {
    let d = |u: &[f64; 3], v: &[f64; 3]| {
        ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2) + (u[2] - v[2]).powi(2)).sqrt()
    };
    d(&a.0, &b.0) + d(&a.1, &b.1)
}

/// Distance from `q` to the traced part of `traj`, measured against the
/// exact straight line through the ray's first sample.
fn distance_to_ray(qv: &([f64; 3], [f64; 3]), traj: &Trajectory, params: &Params) -> f64 {
    let first = traj.first().point;
    let last = traj.last().point;
    let Ok(line) = FlatLine::new(&first, params) else {
        return f64::INFINITY;
    };
    let Some(lv) = flat_view(&last, params) else {
        return f64::INFINITY;
    };
    // Parameter range of the traced segment, in the line's own parameter.
    let s_end = line.project(lv.0[1], lv.0[2]);
    let (lo, hi) = if s_end >= 0.0 {
        (0.0, s_end)
    } else {
        (s_end, 0.0)
    };
    let s = line.project(qv.0[1], qv.0[2]).clamp(lo, hi);
    let candidates = [s, lo, hi];
    candidates
        .iter()
        .filter_map(|&s| {
            let p = line.point_at(s);
            (p.base.r > 0.0).then(|| flat_view(&p, params)).flatten()
        })
        .map(|pv| phase_distance(qv, &pv))
        .fold(f64::INFINITY, f64::min)
}

/// Whether `q` lies within `tol` of the prediction.
pub fn membership(
    q: &CotangentPoint,
    pred: &PredictedWF,
    params: &Params,
    tol: f64,
) -> Result<bool> {
    if !(q.base.r > 0.0) {
        return Err(Error::SingularPoint(q.base.r));
    }
    if q.is_zero_covector() {
        return Ok(false);
    }
    if let Some(qv) = flat_view(q, params) {
        if pred
            .rays
            .iter()
            .any(|traj| distance_to_ray(&qv, traj, params) <= tol)
        {
            return Ok(true);
        }
    }
    Ok(in_outgoing_bundle(q, pred, params, tol))
}

fn in_outgoing_bundle(q: &CotangentPoint, pred: &PredictedWF, params: &Params, tol: f64) -> bool {
    let Ok(qs) = q.to_standard() else {
        return false;
    };
    let n = qs.covector_norm();
    let string_bound = qs.angular_momentum(params).abs() <= tol * n;
    let on_shell = in_char_set(&qs, params, tol.max(DEFAULT_CHAR_TOL));
    if !(string_bound && on_shell && orientation(&qs) == Some(Orientation::Outgoing)) {
        return false;
    }
    if pred.all_fibers() {
        return true;
    }
    let Ok(f) = FiberPoint::from_boundary(qs.base.t - qs.base.r, qs.base.phi, qs.tau, params)
    else {
        return false;
    };
    pred.fibers.iter().any(|g| same_fiber(g, &f, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{flat_chart_geodesic, StopReason};
    use crate::string_interaction::{outgoing_fan, FanSpec};
    use core::f64::consts::TAU;
    use proptest::prelude::*;
    use std::vec;

    fn p(a: f64) -> Params {
        Params::new(a).unwrap()
    }

    fn opts() -> IntegrationOptions {
        IntegrationOptions {
            s_max: 20.0,
            r_max: 30.0,
            ..Default::default()
        }
    }

    fn string_seed() -> CotangentPoint {
        CotangentPoint::standard(0.0, 2.0, 0.0, 1.0, 1.0, -1.0)
    }

    fn free_seed() -> CotangentPoint {
        CotangentPoint::standard(0.0, 3.0, 0.0, 1.0, 0.0, 2.0)
    }

    #[test]
    fn empty_seed_set() {
        let seeds = SeedSet::new(vec![], None).unwrap();
        let pred = predict_wf(&seeds, &p(1.0), Mode::Refined, &opts());
        assert!(pred.rays.is_empty() && pred.fibers.is_empty());
    }

    #[test]
    fn free_seed_escapes() {
        let params = p(1.0);
        let seeds = SeedSet::new(vec![free_seed()], None).unwrap();
        let flow = forward_flowout(&seeds, &params, &opts());
        assert_eq!(flow.rays.len(), 1);
        assert_eq!(
            flow.rays[0].stop_reason,
            StopReason::LeftDomain { r_max: 30.0 }
        );
        assert!(flow.rays[0].min_r() > 2.9);
        let pred = assemble_prediction(flow, &params, Mode::Refined);
        assert!(pred.fibers.is_empty());
    }

    #[test]
    fn string_seed_excites_fiber() {
        let params = p(1.0);
        let seeds = SeedSet::new(vec![string_seed()], None).unwrap();
        let pred = predict_wf(&seeds, &params, Mode::Refined, &opts());
        assert!(pred.rays[0].stop_reason.reached_string());
        assert!((pred.rays[0].last().point.base.t - 2.0).abs() < 1e-5);
        assert_eq!(pred.fibers.len(), 1);
        assert!((pred.fibers[0].phi0 - 4.283185).abs() < 1e-6);

        let fan = outgoing_fan(
            &FanSpec::new(pred.fibers[0], 6, (-5.0, 30.0)).unwrap(),
            &params,
        )
        .unwrap();
        for q in &fan {
            assert!(membership(q, &pred, &params, 1e-8).unwrap());
            let flipped = CotangentPoint {
                tau: -q.tau,
                xi: -q.xi,
                eta: -q.eta,
                ..*q
            };
            assert!(!membership(&flipped, &pred, &params, 1e-8).unwrap());
        }
        // A different fiber is not excited in refined mode.
        let other = FiberPoint::new(1.0, 1.0).unwrap();
        let q = outgoing_fan(&FanSpec::new(other, 1, (0.0, 0.0)).unwrap(), &params).unwrap()[0];
        assert!(!membership(&q, &pred, &params, 1e-8).unwrap());
        let pred_all = PredictedWF {
            mode: Mode::TheoremBound,
            ..pred
        };
        assert!(membership(&q, &pred_all, &params, 1e-8).unwrap());
    }

    #[test]
    fn duplicate_fibers_merge() {
        let params = p(1.0);
        // Both rays hit the string at t = 2 with φ = 0.
        let a = string_seed();
        let b = CotangentPoint::standard(1.0, 1.0, 0.0, 1.0, 1.0, -1.0);
        let seeds = SeedSet::new(vec![a, b], None).unwrap();
        let pred = predict_wf(&seeds, &params, Mode::Refined, &opts());
        assert_eq!(pred.fibers.len(), 1);
    }

    #[test]
    fn ray_samples_and_one_sidedness() {
        let params = p(1.0);
        let q0 =
            CotangentPoint::standard(0.0, 2.0, 0.5, 1.0, (1.0f64 - 0.09 / 4.0).sqrt(), 0.3 - 1.0);
        let seeds = SeedSet::new(vec![q0], None).unwrap();
        let pred = predict_wf(&seeds, &params, Mode::Refined, &opts());
        for smp in &pred.rays[0].samples {
            assert!(membership(&smp.point, &pred, &params, 1e-7).unwrap());
            let flipped = CotangentPoint {
                tau: -smp.point.tau,
                ..smp.point
            };
            assert!(!membership(&flipped, &pred, &params, 1e-7).unwrap());
        }
        let mid = flat_chart_geodesic(&q0, 3.3, &params).unwrap();
        assert!(membership(&mid, &pred, &params, 1e-7).unwrap());
        let before = flat_chart_geodesic(&q0, -0.5, &params).unwrap();
        assert!(!membership(&before, &pred, &params, 1e-7).unwrap());
    }

    #[test]
    fn off_shell_seed_dropped() {
        let params = p(1.0);
        let off = CotangentPoint::standard(0.0, 3.0, 0.0, 1.0, 0.5, 2.0);
        let seeds = SeedSet::new(vec![off, free_seed()], None).unwrap();
        let flow = forward_flowout(&seeds, &params, &opts());
        assert_eq!(flow.dropped, vec![0]);
        assert_eq!(flow.rays.len(), 1);
        assert!(SeedSet::new(
            vec![CotangentPoint::standard(0.0, 0.0, 0.0, 1.0, 1.0, -1.0)],
            None
        )
        .is_err());
    }

    fn null_seed(a: f64, r: f64, phi: f64, m: f64, tau: f64, incoming: bool) -> CotangentPoint {
        let mm = m * r * tau.abs();
        let xi = tau.abs() * (1.0 - m * m).sqrt() * if incoming { 1.0 } else { -1.0 };
        CotangentPoint::standard(0.0, r, phi, tau, xi, mm - a * tau)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn growth_and_soundness(
            specs in prop::collection::vec((0.5f64..4.0, 0.0f64..TAU, prop::sample::select(vec![0.0, 0.3, -0.6]),
                                            prop::sample::select(vec![-1.0, 1.0]), any::<bool>()), 1..5),
            extra in (0.5f64..4.0, 0.0f64..TAU, prop::sample::select(vec![0.0, 0.5])),
        ) {
            let params = p(0.8);
            let mut seeds: Vec<_> = specs.iter().map(|&(r, phi, m, tau, inc)| null_seed(0.8, r, phi, m, tau, inc)).collect();
            let small = predict_wf(&SeedSet::new(seeds.clone(), None).unwrap(), &params, Mode::Refined, &opts());
            for f in &small.fibers {
                let from_seed = seeds.iter().filter_map(|q| fiber_data(q, &params).ok()).any(|(g, _)| same_fiber(f, &g, 1e-9));
                prop_assert!(from_seed);
            }
            seeds.push(null_seed(0.8, extra.0, extra.1, extra.2, 1.0, true));
            let big = predict_wf(&SeedSet::new(seeds, None).unwrap(), &params, Mode::Refined, &opts());
            for f in &small.fibers {
                prop_assert!(big.fibers.iter().any(|g| same_fiber(f, g, 1e-12)));
            }
            for traj in &small.rays {
                for smp in traj.samples.iter().step_by(7) {
                    prop_assert!(membership(&smp.point, &big, &params, 1e-7).unwrap());
                }
            }
            for traj in &small.rays {
                let tau = traj.first().point.tau;
                if tau > 0.0 && traj.samples.iter().all(|s| s.point.base.r > 0.8) {
                    prop_assert!(traj.samples.windows(2).all(|w| w[1].point.base.t >= w[0].point.base.t));
                }
                prop_assert!(traj.drift.symbol_relative < 1e-8);
            }
        }
    }
}
