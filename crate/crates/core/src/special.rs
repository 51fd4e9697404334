//! Bessel functions of the first kind and the Gamma function.
//!
//! `J_ν` is summed from its power series in double-double arithmetic, which
//! absorbs the cancellation between terms (the largest term grows like
//! `e^x`). Large arguments switch to the Hankel asymptotic expansion.
//! Gamma uses the Lanczos approximation with `g = 7`, `n = 9`.

use core::f64::consts::PI;

use num_complex::Complex64;
// Inherent float methods shadow this whenever std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Series is summed for `x` up to this value; beyond it the Hankel
/// expansion is used when it converges.
const SERIES_X_MAX: f64 = 40.0;

/// Gamma function of a real argument. Poles return a range error.
pub fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Range("gamma pole"));
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok(PI / (s * gamma(1.0 - x)?));
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let v = (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range("gamma overflow"))
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidArgument("ln_gamma needs x > 0"));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln())
}

/// Gamma function of a complex argument.
pub fn gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Complex64::new(PI, 0.0) / (s * gamma_complex(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += *c / (z + i as f64);
    }
    t.powc(z + 0.5) * (-t).exp() * a * (2.0 * PI).sqrt()
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let e = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: e }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Self {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn two_prod(a: f64, b: f64) -> Self {
        let p = a * b;
        Self {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        let t = Self::two_sum(self.lo, o.lo);
        let s = Self::quick_two_sum(s.hi, s.lo + t.hi);
        Self::quick_two_sum(s.hi, s.lo + t.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = Self::two_prod(self.hi, o.hi);
        let lo = p.lo + (self.hi * o.lo + self.lo * o.hi);
        Self::quick_two_sum(p.hi, lo)
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Self::new(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Self::new(-q2)));
        let q3 = r.hi / o.hi;
        Self::quick_two_sum(q1, q2).add(Self::new(q3))
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

/// `(x/2)^ν / Γ(ν+1)`, evaluated in logs when the direct form overflows.
fn series_prefactor(nu: f64, x: f64) -> Result<f64> {
    let direct = (0.5 * x).powf(nu) / gamma(nu + 1.0)?;
    if direct.is_finite() && direct != 0.0 {
        return Ok(direct);
    }
    let v = (nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)?).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range("bessel prefactor overflow"))
    }
}

fn bessel_series(nu: f64, x: f64) -> Result<f64> {
    let pre = series_prefactor(nu, x)?;
    if pre == 0.0 {
        return Ok(0.0);
    }
    // q = -x²/4 exactly in double-double.
    let q = Dd::two_prod(x, x).mul(Dd::new(0.25)).neg();
    let mut term = Dd::new(1.0);
    let mut sum = Dd::new(1.0);
    let peak = 0.5 * x;
    for k in 1..10_000u32 {
        let kf = k as f64;
        let denom = Dd::new(kf).mul(Dd::two_sum(nu, kf));
        term = term.mul(q).div(denom);
        sum = sum.add(term);
        if kf > peak && term.hi.abs() <= 1e-34 * sum.hi.abs().max(1e-300) {
            return Ok(pre * (sum.hi + sum.lo));
        }
    }
    Err(Error::Range("bessel series did not converge"))
}

/// Hankel expansion; `None` when the asymptotic series stalls above 1e-16.
fn bessel_hankel(nu: f64, x: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    let mut k = 1u32;
    loop {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if term.abs() >= last {
            return None;
        }
        last = term.abs();
        // Terms alternate between the Q (odd k) and P (even k) series with
        // signs +, -, -, +, ...
        let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < 1e-17 * p.abs().max(q.abs()) {
            break;
        }
        k += 1;
        if k > 200 {
            return None;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    Some((2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

/// Bessel function of the first kind `J_ν(x)` for `ν ≥ 0`, `x ≥ 0`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(nu >= 0.0) || !(x >= 0.0) || !nu.is_finite() {
        return Err(Error::InvalidArgument("bessel_j needs nu >= 0 and x >= 0"));
    }
    if !x.is_finite() {
        return Err(Error::Range("bessel_j argument"));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x <= SERIES_X_MAX.max(nu) {
        return bessel_series(nu, x);
    }
    bessel_hankel(nu, x).ok_or(Error::Range("bessel_j argument outside supported range"))
}

/// `J_ν'(x) = (ν/x) J_ν(x) - J_{ν+1}(x)`, for `x > 0`.
pub fn bessel_j_prime(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidArgument("bessel_j_prime needs x > 0"));
    }
    Ok(nu / x * bessel_j(nu, x)? - bessel_j(nu + 1.0, x)?)
}
