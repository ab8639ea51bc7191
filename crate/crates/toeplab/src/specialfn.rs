//! Complex log-gamma, log Barnes G, modified Bessel K0/K1 and constants.

use crate::error::{Error, Result};
use crate::precision::C64;
use std::f64::consts::PI;

/// Constants used by the closed forms.
#[derive(Clone, Copy, Debug)]
pub struct MathConstants {
    pub glaisher_a: f64,
    pub euler_gamma: f64,
    pub zeta_prime_neg1: f64,
    pub pi: f64,
}

pub const GLAISHER_A: f64 = 1.282_427_129_100_622_6;
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub const ZETA_PRIME_NEG1: f64 = -0.165_421_143_700_450_93;

pub const CONSTANTS: MathConstants = MathConstants {
    glaisher_a: GLAISHER_A,
    euler_gamma: EULER_GAMMA,
    zeta_prime_neg1: ZETA_PRIME_NEG1,
    pi: PI,
};

impl MathConstants {
    /// |A - exp(1/12 - zeta'(-1))|, relative.
    pub fn glaisher_consistency(&self) -> f64 {
        ((1.0 / 12.0 - self.zeta_prime_neg1).exp() / self.glaisher_a - 1.0).abs()
    }
}

// B_2k for k = 1..=12
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// Principal log with the negative real axis sent to the upper side.
fn clog(z: C64) -> C64 {
    let z = if z.im == 0.0 { C64::new(z.re, 0.0) } else { z };
    z.ln()
}

fn tidy(z: C64) -> C64 {
    C64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im })
}

const SHIFT_RE: f64 = 15.0;

/// Principal branch of log Gamma(z).
pub fn log_gamma(z: C64) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(Error::GammaPole(z.re));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    let mut w = z;
    let mut acc = C64::new(0.0, 0.0);
    while w.re < SHIFT_RE {
        acc += clog(w);
        w += 1.0;
    }
    // Stirling series
    let lw = w.ln();
    let mut s = (w - 0.5) * lw - w + 0.5 * (2.0 * PI).ln();
    let w2inv = 1.0 / (w * w);
    let mut wp = 1.0 / w;
    for (k, b) in BERNOULLI.iter().enumerate().take(10) {
        let k1 = (k + 1) as f64;
        s += *b / (2.0 * k1 * (2.0 * k1 - 1.0)) * wp;
        wp *= w2inv;
    }
    Ok(tidy(s - acc))
}

/// Gamma(z)^{-1}, zero at the poles.
pub fn rgamma(z: C64) -> C64 {
    if is_nonpositive_integer(z) {
        C64::new(0.0, 0.0)
    } else {
        (-log_gamma(z).expect("not a pole")).exp()
    }
}

const G_SHIFT_RE: f64 = 20.0;

/// Asymptotic series for log G(w + 1), valid for large |w|.
fn log_g_asymptotic(w: C64) -> C64 {
    let lw = w.ln();
    let mut s = w * w * 0.5 * (lw - 1.5) + w * 0.5 * (2.0 * PI).ln() - lw / 12.0
        + ZETA_PRIME_NEG1;
    let w2inv = 1.0 / (w * w);
    let mut wp = w2inv;
    for k in 1..11 {
        let kf = k as f64;
        s += BERNOULLI[k] / (4.0 * kf * (kf + 1.0)) * wp;
        wp *= w2inv;
    }
    s
}

/// Principal branch of log G(z), G the Barnes function with G(1) = 1.
pub fn log_barnes_g(z: C64) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(Error::BarnesZero(z.re));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    // log G(z) = log G(z + m) - sum_{k<m} log Gamma(z + k)
    let mut w = z;
    let mut acc = C64::new(0.0, 0.0);
    while w.re < G_SHIFT_RE {
        acc += log_gamma(w)?;
        w += 1.0;
    }
    Ok(tidy(log_g_asymptotic(w - 1.0) - acc))
}

/// Coefficients r_k(a) of the 1/t^k corrections that complete the truncated
/// large-t form of log G(t + a + 1); see [`barnes_g_large_t`].
pub fn barnes_g_tail_coeff(k: usize, a: f64) -> f64 {
    let a2 = a * a;
    match k {
        1 => a * a2 / 6.0 - a / 12.0,
        2 => -a2 * a2 / 24.0 + a2 / 24.0 - 1.0 / 240.0,
        3 => a2 * a2 * a / 60.0 - a2 * a / 36.0 + a / 120.0,
        4 => (-42.0 * a2 * a2 * a2 + 105.0 * a2 * a2 - 63.0 * a2 + 5.0) / 5040.0,
        5 => (24.0 * a2 * a2 * a2 * a - 84.0 * a2 * a2 * a + 84.0 * a2 * a - 20.0 * a) / 5040.0,
        _ => 0.0,
    }
}

/// Large-t form of log G(t + a + 1) written in powers of t and log t, with up
/// to five 1/t correction terms (`tail` = 0 gives the bare leading form).
pub fn barnes_g_large_t(t: f64, a: f64, tail: usize) -> f64 {
    let lt = t.ln();
    let mut s = 1.0 / 12.0 - GLAISHER_A.ln() - 0.75 * t * t - a * t
        + 0.5 * (t + a) * (2.0 * PI).ln()
        + (0.5 * t * t + a * t + 0.5 * a * a - 1.0 / 12.0) * lt;
    for k in 1..=tail.min(5) {
        s += barnes_g_tail_coeff(k, a) / t.powi(k as i32);
    }
    s
}

/// Modified Bessel function K0.
pub fn bessel_k0(x: f64) -> Result<f64> {
    bessel_k(0, x)
}

/// Modified Bessel function K1.
pub fn bessel_k1(x: f64) -> Result<f64> {
    bessel_k(1, x)
}

fn bessel_k(nu: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel K needs x > 0, got {x}")));
    }
    if x <= 2.0 {
        Ok(k_series(nu, x))
    } else {
        Ok(k_integral(nu, x))
    }
}

// Ascending series around 0.
fn k_series(nu: u32, x: f64) -> f64 {
    let y = 0.25 * x * x;
    let l = (0.5 * x).ln();
    if nu == 0 {
        // K0 = -(ln(x/2)+g) I0 + sum y^k/(k!)^2 H_k
        let mut term = 1.0;
        let mut i0 = 1.0;
        let mut h = 0.0;
        let mut s = 0.0;
        for k in 1..60 {
            let kf = k as f64;
            term *= y / (kf * kf);
            h += 1.0 / kf;
            i0 += term;
            s += term * h;
            if term < 1e-18 * i0 {
                break;
            }
        }
        -(l + EULER_GAMMA) * i0 + s
    } else {
        // K1 = 1/x + ln(x/2) I1 - (x/4) sum [psi(k+1)+psi(k+2)] y^k/(k!(k+1)!)
        let mut term = 1.0; // y^k/(k!(k+1)!)
        let mut i1s = 1.0;
        let mut hk = 0.0; // H_k
        let mut s = -2.0 * EULER_GAMMA + 1.0; // psi(1)+psi(2)
        for k in 1..60 {
            let kf = k as f64;
            term *= y / (kf * (kf + 1.0));
            hk += 1.0 / kf;
            let psi_sum = (-EULER_GAMMA + hk) + (-EULER_GAMMA + hk + 1.0 / (kf + 1.0));
            i1s += term;
            s += psi_sum * term;
            if term < 1e-18 {
                break;
            }
        }
        let i1 = 0.5 * x * i1s;
        1.0 / x + l * i1 - 0.25 * x * s
    }
}

// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt by the trapezoidal rule,
// which converges geometrically for this analytic, rapidly decaying integrand.
fn k_integral(nu: u32, x: f64) -> f64 {
    let h = 0.05;
    let mut s = 0.5;
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let term = (-x * (t.cosh() - 1.0)).exp() * (nu as f64 * t).cosh();
        s += term;
        if term < 1e-18 * s {
            break;
        }
        k += 1;
    }
    s * h * (-x).exp()
}
