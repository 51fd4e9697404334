//! Dormand–Prince 5(4) embedded pair with step-size control and
//! continuous extension.
//!
//! The stepper is driven one accepted step at a time so callers can apply
//! their own stopping rules (string proximity, domain exit) and locate
//! crossings with [`AcceptedStep::dense`].

// Inherent float methods shadow this whenever std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

pub trait OdeSystem<const N: usize> {
    fn rhs(&self, s: f64, y: &[f64; N]) -> [f64; N];

    /// States for which the right-hand side is defined. A stage leaving
    /// this set rejects the step.
    fn admissible(&self, y: &[f64; N]) -> bool {
        y.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Initial step magnitude; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const MAX_REJECTIONS: usize = 200;

/// One accepted step together with its continuous extension.
#[derive(Debug, Clone)]
pub struct AcceptedStep<const N: usize> {
    pub s0: f64,
    pub s1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> AcceptedStep<N> {
    /// State at `s` in `[s0, s1]` (either order), fourth-order accurate.
    pub fn dense(&self, s: f64) -> [f64; N] {
        let h = self.s1 - self.s0;
        if h == 0.0 {
            return self.y1;
        }
        let th = (s - self.s0) / h;
        let th1 = 1.0 - th;
        let mut out = [0.0; N];
        for i in 0..N {
            let r = &self.rcont;
            out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        out
    }
}

pub struct Dopri5<'a, S: OdeSystem<N>, const N: usize> {
    sys: &'a S,
    s: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    dir: f64,
    opts: OdeOptions,
}

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += c * k[i];
        }
    }
    out
}

impl<'a, S: OdeSystem<N>, const N: usize> Dopri5<'a, S, N> {
    /// `direction` is `+1` or `-1`: the sign of parameter increments.
    pub fn new(sys: &'a S, s0: f64, y0: [f64; N], direction: f64, opts: OdeOptions) -> Self {
        let k1 = sys.rhs(s0, &y0);
        let dir = if direction < 0.0 { -1.0 } else { 1.0 };
        let mut st = Self {
            sys,
            s: s0,
            y: y0,
            k1,
            h: 0.0,
            dir,
            opts,
        };
        st.h = match opts.h_init {
            Some(h) => h.abs(),
            None => st.initial_step(),
        }
        .min(opts.h_max);
        st
    }

    pub fn position(&self) -> (f64, [f64; N]) {
        (self.s, self.y)
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.opts.abs_tol + self.opts.rel_tol * a.abs().max(b.abs())
    }

    fn rms(&self, v: &[f64; N], reference: &[f64; N]) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let q = v[i] / self.scale(reference[i], reference[i]);
            acc += q * q;
        }
        (acc / N as f64).sqrt()
    }

    fn initial_step(&self) -> f64 {
        let d0 = self.rms(&self.y, &self.y);
        let d1 = self.rms(&self.k1, &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let y1 = axpy(&self.y, &[(self.dir * h0, &self.k1)]);
        if !self.sys.admissible(&y1) {
            return h0 * 1e-3;
        }
        let f1 = self.sys.rhs(self.s + self.dir * h0, &y1);
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = f1[i] - self.k1[i];
        }
        let d2 = self.rms(&diff, &self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1)
    }

    /// Advances one accepted step without passing `s_limit`.
    pub fn step(&mut self, s_limit: f64) -> Result<AcceptedStep<N>> {
        let remaining = (s_limit - self.s) * self.dir;
        if remaining <= 0.0 {
            return Err(Error::InvalidArgument(
                "step limit is behind the current parameter",
            ));
        }
        let mut rejections = 0usize;
        loop {
            let mut h = self.h.min(remaining).min(self.opts.h_max);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let min_h = 16.0 * f64::EPSILON * self.s.abs().max(1.0);
            if (h < min_h && !last) || rejections > MAX_REJECTIONS {
                return Err(Error::StepUnderflow(self.s));
            }
            let hs = self.dir * h;
            match self.try_step(hs) {
                Some((y1, k7, err, rcont)) if err <= 1.0 => {
                    let s1 = if last { s_limit } else { self.s + hs };
                    let fac = if err == 0.0 {
                        FAC_MAX
                    } else {
                        (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
                    };
                    let step = AcceptedStep {
                        s0: self.s,
                        s1,
                        y0: self.y,
                        y1,
                        rcont,
                    };
                    self.s = s1;
                    self.y = y1;
                    self.k1 = k7;
                    self.h = (h * fac).min(self.opts.h_max);
                    return Ok(step);
                }
                Some((_, _, err, _)) => {
                    rejections += 1;
                    let fac = if err.is_finite() {
                        (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0)
                    } else {
                        0.25
                    };
                    self.h = h * fac;
                }
                None => {
                    rejections += 1;
                    self.h = h * 0.25;
                }
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn try_step(&self, h: f64) -> Option<([f64; N], [f64; N], f64, [[f64; N]; 5])> {
        let s = self.s;
        let y = &self.y;
        let k1 = &self.k1;
        let sys = self.sys;
        let stage = |c: f64, yy: [f64; N]| -> Option<[f64; N]> {
            if !sys.admissible(&yy) {
                return None;
            }
            let k = sys.rhs(s + c * h, &yy);
            if k.iter().all(|v| v.is_finite()) {
                Some(k)
            } else {
                None
            }
        };
        let k2 = stage(C2, axpy(y, &[(h * A21, k1)]))?;
        let k3 = stage(C3, axpy(y, &[(h * A31, k1), (h * A32, &k2)]))?;
        let k4 = stage(
            C4,
            axpy(y, &[(h * A41, k1), (h * A42, &k2), (h * A43, &k3)]),
        )?;
        let k5 = stage(
            C5,
            axpy(
                y,
                &[
                    (h * A51, k1),
                    (h * A52, &k2),
                    (h * A53, &k3),
                    (h * A54, &k4),
                ],
            ),
        )?;
        let k6 = stage(
            1.0,
            axpy(
                y,
                &[
                    (h * A61, k1),
                    (h * A62, &k2),
                    (h * A63, &k3),
                    (h * A64, &k4),
                    (h * A65, &k5),
                ],
            ),
        )?;
        let y1 = axpy(
            y,
            &[
                (h * A71, k1),
                (h * A73, &k3),
                (h * A74, &k4),
                (h * A75, &k5),
                (h * A76, &k6),
            ],
        );
        let k7 = stage(1.0, y1)?;

        let mut acc = 0.0;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let q = e / self.scale(y[i], y1[i]);
            acc += q * q;
        }
        let err = (acc / N as f64).sqrt();

        let mut rcont = [[0.0; N]; 5];
        for i in 0..N {
            let ydiff = y1[i] - y[i];
            let bspl = h * k1[i] - ydiff;
            rcont[0][i] = y[i];
            rcont[1][i] = ydiff;
            rcont[2][i] = bspl;
            rcont[3][i] = ydiff - h * k7[i] - bspl;
            rcont[4][i] =
                h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        Some((y1, k7, err, rcont))
    }
}

/// Bisects `g(s) = 0` on the step's dense output, assuming a sign change
/// between `step.s0` and `step.s1`. Returns the parameter and state.
pub fn locate_crossing<const N: usize>(
    step: &AcceptedStep<N>,
    g: impl Fn(&[f64; N]) -> f64,
) -> (f64, [f64; N]) {
    let mut lo = step.s0;
    let mut hi = step.s1;
    let g_lo = g(&step.y0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let gm = g(&step.dense(mid));
        if (gm > 0.0) == (g_lo > 0.0) && gm != 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (hi, step.dense(hi))
}
