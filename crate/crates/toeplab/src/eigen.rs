//! Spectra of Hermitian Toeplitz matrices built from real symbols.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::symbols::CircleSymbol;
use crate::C64;

const TWO_PI: f64 = 2.0 * PI;
const GRID: usize = 4096;

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    /// Essential range (min, max) of the symbol; max is infinite for
    /// symbols with a blow-up.
    pub symbol_range: (f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct BulkPrediction {
    pub x: f64,
    pub lambda_x: f64,
    pub spacing: f64,
    pub psi_derivative: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapStats {
    pub gap_count: usize,
    /// Largest distance from an eigenvalue inside the gap window to the
    /// spectrum of size n + q; present only when the arc length is a
    /// rational multiple p/q of the full circle.
    pub pairing_distance: Option<f64>,
    pub period: Option<usize>,
}

fn real_at(s: &CircleSymbol, th: f64) -> Result<f64> {
    Ok(s.evaluate(th)?.re)
}

fn check_real(s: &CircleSymbol) -> Result<()> {
    let im = s.max_imag_on_grid(GRID)?;
    if im >= 1e-12 {
        return input(format!("symbol is not real (imaginary part {im:.2e})"));
    }
    Ok(())
}

/// Golden-section search for an extremum of f on [a, b]; `sgn` = 1 for a
/// minimum, -1 for a maximum.
fn golden<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, sgn: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (sgn * f(x1)?, sgn * f(x2)?);
    for _ in 0..80 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = sgn * f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = sgn * f(x2)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

fn sample(s: &CircleSymbol) -> Result<Vec<(f64, f64)>> {
    (0..GRID)
        .map(|j| {
            let th = TWO_PI * (j as f64 + 0.5) / GRID as f64;
            Ok((th, real_at(s, th)?))
        })
        .collect()
}

/// (min, max) of a real symbol, refined around the best grid points.
pub fn symbol_range(s: &CircleSymbol) -> Result<(f64, f64)> {
    let pts = sample(s)?;
    let h = TWO_PI / GRID as f64;
    let (imin, _) = pts.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).unwrap();
    let (imax, _) = pts.iter().enumerate().max_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).unwrap();
    let f = |t: f64| real_at(s, t);
    let mut lo = pts[imin].1;
    let mut hi = pts[imax].1;
    if !s.has_singularities() {
        lo = lo.min(golden(f, pts[imin].0 - h, pts[imin].0 + h, 1.0)?.1);
        hi = hi.max(golden(f, pts[imax].0 - h, pts[imax].0 + h, -1.0)?.1);
    } else if s.singularities.iter().any(|q| q.alpha.re < 0.0) {
        hi = f64::INFINITY;
    }
    Ok((lo, hi))
}

/// Hermitian Toeplitz matrix of order n, row-major.
pub fn toeplitz_matrix(s: &CircleSymbol, n: usize) -> Result<Vec<C64>> {
    let m = n as i64 - 1;
    let c = s.fourier_coeffs(-m, m)?;
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            a[j * n + k] = c[(j as i64 - k as i64 + m) as usize];
        }
    }
    Ok(a)
}

pub fn toeplitz_eigenvalues(s: &CircleSymbol, n: usize) -> Result<SpectrumReport> {
    if n == 0 {
        return input("n must be positive");
    }
    check_real(s)?;
    let a = toeplitz_matrix(s, n)?;
    let eigenvalues = hermitian_eigenvalues(&a, n);
    Ok(SpectrumReport { n, eigenvalues, symbol_range: symbol_range(s)? })
}

/// Location of the minimum and maximum of a unimodal symbol, after checking
/// the sign pattern of the derivative and the curvature at both extrema.
fn unimodal_shape(s: &CircleSymbol) -> Result<(f64, f64)> {
    if s.has_singularities() {
        return input("bulk prediction needs a smooth symbol");
    }
    check_real(s)?;
    let pts = sample(s)?;
    let h = TWO_PI / GRID as f64;
    let f = |t: f64| real_at(s, t);
    let imin = pts.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).unwrap().0;
    let t0 = golden(f, pts[imin].0 - h, pts[imin].0 + h, 1.0)?.0;
    let imax = pts.iter().enumerate().max_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).unwrap().0;
    let mut t1 = golden(f, pts[imax].0 - h, pts[imax].0 + h, -1.0)?.0;
    t1 = (t1 - t0).rem_euclid(TWO_PI);
    // derivative signs measured from the minimum
    let g = |u: f64| f(t0 + u);
    let mut prev = g(0.0)?;
    for j in 1..=GRID {
        let u = TWO_PI * j as f64 / GRID as f64;
        let v = g(u)?;
        let rising = u <= t1;
        let near_extremum = (u - t1).abs() < 2.0 * h || u < 2.0 * h || u > TWO_PI - 2.0 * h;
        if !near_extremum && ((rising && v < prev) || (!rising && v > prev)) {
            return input(format!("symbol is not unimodal near angle {:.4}", t0 + u));
        }
        prev = v;
    }
    let scale = pts.iter().map(|p| p.1.abs()).fold(0.0, f64::max).max(1e-300);
    for u in [t0, t0 + t1] {
        if derivatives(s, u)?.1.abs() < 1e-8 * scale {
            return input(format!("symbol has vanishing curvature at angle {:.6}", u.rem_euclid(TWO_PI)));
        }
    }
    Ok((t0, t1))
}

/// First and second angular derivatives of the (real part of the) symbol.
fn derivatives(s: &CircleSymbol, th: f64) -> Result<(f64, f64)> {
    if let Some(l) = &s.laurent {
        let (mut d1, mut d2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (&k, &c) in l {
            let e = c * C64::from_polar(1.0, k as f64 * th);
            d1 += e * C64::new(0.0, k as f64);
            d2 -= e * (k * k) as f64;
        }
        return Ok((d1.re, d2.re));
    }
    if s.smooth.logs.is_empty() {
        let v = s.evaluate(th)?;
        let (mut d1, mut d2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (&k, &c) in &s.smooth.poly {
            let e = c * C64::from_polar(1.0, k as f64 * th);
            d1 += e * C64::new(0.0, k as f64);
            d2 -= e * (k * k) as f64;
        }
        return Ok(((v * d1).re, (v * (d2 + d1 * d1)).re));
    }
    let e = 1e-4;
    let (a, b, c) = (real_at(s, th - e)?, real_at(s, th)?, real_at(s, th + e)?);
    Ok(((c - a) / (2.0 * e), (c - 2.0 * b + a) / (e * e)))
}

/// Bulk location lambda_x and predicted local spacing for a unimodal symbol.
pub fn bulk_prediction(s: &CircleSymbol, x: f64, n: usize) -> Result<BulkPrediction> {
    if !(x > 0.0 && x < 1.0) {
        return input("x must lie in (0, 1)");
    }
    if n == 0 {
        return input("n must be positive");
    }
    let (t0, tmax) = unimodal_shape(s)?;
    let f = |u: f64| real_at(s, t0 + u);
    let (lo_v, hi_v) = (f(0.0)?, f(tmax)?);
    // inverse branches of the rising and falling parts
    let invert = |lam: f64, a: f64, b: f64, rising: bool| -> Result<f64> {
        let (mut a, mut b) = (a, b);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let above = f(m)? > lam;
            if above == rising {
                b = m;
            } else {
                a = m;
            }
            if b - a < 1e-15 {
                break;
            }
        }
        Ok(0.5 * (a + b))
    };
    let psi = |lam: f64| -> Result<(f64, f64, f64)> {
        let u1 = invert(lam, 0.0, tmax, true)?;
        let u2 = invert(lam, tmax, TWO_PI, false)?;
        Ok((0.5 * (u1 - u2) + PI, u1, u2))
    };
    let target = PI * x;
    let (mut a, mut b) = (lo_v, hi_v);
    while b - a > 1e-12 * (1.0 + a.abs().max(b.abs())) {
        let m = 0.5 * (a + b);
        if psi(m)?.0 < target {
            a = m;
        } else {
            b = m;
        }
    }
    let lambda_x = 0.5 * (a + b);
    let (_, u1, u2) = psi(lambda_x)?;
    let d1 = derivatives(s, t0 + u1)?.0;
    let d2 = derivatives(s, t0 + u2)?.0;
    if d1 == 0.0 || d2 == 0.0 {
        return Err(Error::Numerical("flat symbol at the bulk level".into()));
    }
    let psi_derivative = 0.5 * (1.0 / d1 - 1.0 / d2);
    let spacing = PI / (psi_derivative * (n as f64 + 1.0));
    Ok(BulkPrediction { x, lambda_x, spacing, psi_derivative })
}

/// Smallest q with |r - p/q| < 1e-12 for some p, q <= 64.
fn rational_period(r: f64) -> Option<usize> {
    (1..=64usize).find(|&q| {
        let p = (r * q as f64).round();
        (r * q as f64 - p).abs() < 1e-12 * q as f64 && p > 0.0
    })
}

/// Eigenvalue statistics for the two-level piecewise-constant symbol equal to
/// e^{2 pi gamma} on [theta1, theta2) and 1 elsewhere. `epsilon` defaults to
/// 0.05 (e^{2 pi gamma} - 1).
pub fn gap_spectrum_stats(
    theta1: f64,
    theta2: f64,
    gamma: f64,
    n: usize,
    epsilon: Option<f64>,
) -> Result<GapStats> {
    if !(0.0 <= theta1 && theta1 < theta2 && theta2 < TWO_PI) {
        return input("need 0 <= theta1 < theta2 < 2 pi");
    }
    if !(gamma >= 0.0) || n == 0 {
        return input("need gamma >= 0 and n > 0");
    }
    let top = (TWO_PI * gamma).exp();
    let eps = epsilon.unwrap_or(0.05 * (top - 1.0));
    let s = CircleSymbol::gap(gamma, theta1, theta2)?;
    let ev = toeplitz_eigenvalues(&s, n)?.eigenvalues;
    let inside: Vec<f64> = ev.iter().copied().filter(|&l| l > 1.0 + eps && l < top - eps).collect();
    let period = rational_period((theta2 - theta1) / TWO_PI);
    let pairing_distance = match period {
        Some(q) if !inside.is_empty() => {
            let other = toeplitz_eigenvalues(&s, n + q)?.eigenvalues;
            Some(
                inside
                    .iter()
                    .map(|&l| other.iter().map(|&m| (l - m).abs()).fold(f64::INFINITY, f64::min))
                    .fold(0.0, f64::max),
            )
        }
        Some(_) => Some(0.0),
        None => None,
    };
    Ok(GapStats { gap_count: inside.len(), pairing_distance, period })
}
