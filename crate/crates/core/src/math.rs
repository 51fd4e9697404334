use core::f64::consts::TAU;

// Inherent float methods shadow this whenever std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;

/// Reduces an angle to `[0, 2π)`.
pub fn reduce_angle(phi: f64) -> f64 {
    let r = phi - TAU * (phi / TAU).floor();
    if !(0.0..TAU).contains(&r) {
        0.0
    } else {
        r
    }
}

/// Shortest signed distance between two angles, in `[-π, π]`.
pub(crate) fn angle_distance(a: f64, b: f64) -> f64 {
    let d = reduce_angle(a - b);
    if d > core::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

pub(crate) fn signum(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_angle_range() {
        assert_eq!(reduce_angle(0.0), 0.0);
        assert!((reduce_angle(-2.0) - (TAU - 2.0)).abs() < 1e-15);
        assert!((reduce_angle(7.0) - (7.0 - TAU)).abs() < 1e-15);
        assert!(reduce_angle(-1e-300) < TAU);
    }

    #[test]
    fn angle_distance_wraps() {
        assert!((angle_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-14);
        assert!((angle_distance(TAU - 0.1, 0.1) + 0.2).abs() < 1e-14);
    }
}
