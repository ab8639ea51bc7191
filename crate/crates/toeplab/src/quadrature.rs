//! Gauss-Legendre rules and adaptive integration.

use crate::error::{Error, Result};
use crate::precision::{dd, DD};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights on [-1, 1].
#[derive(Clone, Debug)]
pub struct Rule {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    // returns (P_n(x), P_n'(x))
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn compute_rule(n: usize) -> Rule {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * d * d);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    Rule { x, w }
}

/// Cached Gauss-Legendre rule with n nodes.
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut g = cache.lock().unwrap();
    g.entry(n).or_insert_with(|| Arc::new(compute_rule(n))).clone()
}

/// Gauss-Legendre rule in double-double, refined by Newton from the double rule.
pub fn gauss_legendre_dd(n: usize) -> (Vec<DD>, Vec<DD>) {
    let base = gauss_legendre(n);
    let mut xs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    let one = dd(1.0);
    for &x0 in &base.x {
        let mut z = dd(x0);
        let mut deriv = one;
        for it in 0..3 {
            let (mut p0, mut p1) = (one, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = (z * p1 * (2.0 * kf - 1.0) - p0 * (kf - 1.0)) / kf;
                p0 = p1;
                p1 = p2;
            }
            deriv = (z * p1 - p0) * (n as f64) / (z * z - one);
            if it < 2 {
                z -= p1 / deriv;
            }
        }
        xs.push(z);
        ws.push(dd(2.0) / ((one - z * z) * deriv * deriv));
    }
    (xs, ws)
}

/// Fixed Gauss-Legendre sum of f over [a, b].
pub fn gl_fixed<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, n: usize) -> f64 {
    let r = gauss_legendre(n);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    r.x.iter().zip(&r.w).map(|(&x, &w)| w * f(c + h * x)).sum::<f64>() * h
}

/// Adaptive bisection comparing a 20-point rule with the sum over halves.
/// `tol` is an absolute tolerance for the whole interval.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let whole = gl_fixed(&mut f, a, b, 20);
    let mut evals = 0usize;
    let v = recurse(&mut f, a, b, whole, tol, 0, &mut evals)?;
    Ok(v)
}

fn recurse<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    evals: &mut usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let l = gl_fixed(f, a, m, 20);
    let r = gl_fixed(f, m, b, 20);
    *evals += 40;
    let s = l + r;
    if !s.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
    }
    if (s - whole).abs() <= tol || (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
        return Ok(s);
    }
    if depth > 60 || *evals > 5_000_000 {
        return Err(Error::Quadrature(format!(
            "no convergence on [{a}, {b}] (estimate change {:.3e})",
            (s - whole).abs()
        )));
    }
    Ok(recurse(f, a, m, l, 0.5 * tol, depth + 1, evals)?
        + recurse(f, m, b, r, 0.5 * tol, depth + 1, evals)?)
}
