//! Computable geometry of the rotating cosmic string spacetime
//!
//! The metric `g = -(dt - A dφ)² + r² dφ² + dr²` is flat away from the
//! string at `r = 0` but carries closed timelike curves for `r < |A|`.
//! This crate provides:
//!
//! * [`geometry`]: metric and principal symbol in the
//!   standard, b and edge charts.
//! * [`flow`]: null bicharacteristic integration with an exact flat-chart
//!   oracle.
//! * [`string_interaction`]: string-bound rays, fiber data, outgoing fans
//!   and the `±Aπ` time jump.
//! * [`wavefront`]: forward wavefront-set predictor.
//! * [`mode_analysis`] and [`special`]: angular-mode radial ODE with a
//!   Bessel-series oracle.
//! * [`spectral`]: fiber-operator Rayleigh quotients and the Mellin
//!   transform.
//! * [`regions`]: explicit constants and sets of the forward-solution
//!   construction, plus a backward ray-tracing check.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `!(x > 0.0)` guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod flow;
pub mod geometry;
pub mod mode_analysis;
pub mod ode;
pub mod regions;
pub mod special;
pub mod spectral;
pub mod string_interaction;
pub mod wavefront;

pub use error::{Error, Result};
pub use flow::{
    conserved_report, flat_chart_geodesic, hamilton_rhs_b_rescaled, hamilton_rhs_standard,
    integrate_ray, ConservedDrift, Direction, FlatLine, IntegrationOptions, Sample, StopReason,
    Trajectory,
};
pub use geometry::{
    causal_type, ctc_circle_type, edge_to_b, in_char_set, metric_eval, symbol, CausalType, Chart,
    CotangentPoint, FiberPoint, Params, Point,
};
pub use math::reduce_angle;
