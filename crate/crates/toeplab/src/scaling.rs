//! Double-scaling objects: the Painleve III scaling functions of the Ising
//! correlations, the sigma form of Painleve V, sine-kernel gap
//! probabilities and the constant of the large-gap expansion.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::exactdet::{toeplitz_det, DetOptions};
use crate::linalg::{log_det, LogDet, Mat};
use crate::ode::{integrate, OdeOptions};
use crate::precision::{dd, dd_pi, dd_sin, DD};
use crate::quadrature::gauss_legendre_dd;
use crate::specialfn::{bessel_k0, bessel_k1, ZETA_PRIME_NEG1};
use crate::symbols::CircleSymbol;

/// Starting abscissa of the Painleve III integration.
pub const P3_THETA_MAX: f64 = 12.0;
/// Smallest resolved theta = r / 2.
pub const P3_THETA_MIN: f64 = 1e-7;
/// Starting abscissa of the Painleve V integration.
pub const P5_X_MAX: f64 = 40.0;
pub const P5_X_MIN: f64 = 1e-7;

fn ode_opts() -> OdeOptions {
    OdeOptions { rtol: 1e-11, atol: 1e-13, ..Default::default() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PainleveKind {
    P3Eta,
    P5Sigma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingSign {
    Plus,
    Minus,
}

impl std::str::FromStr for ScalingSign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(ScalingSign::Plus),
            "minus" | "-" => Ok(ScalingSign::Minus),
            _ => input(format!("sign must be plus or minus, got '{s}'")),
        }
    }
}

/// Values of a Painleve solution on an ascending grid.
#[derive(Clone, Debug, Serialize)]
pub struct PainleveSolution {
    pub kind: PainleveKind,
    pub parameter: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    /// Second derivatives (kept for the third-order sigma system).
    pub second: Vec<f64>,
    /// For eta: the tail integral from theta to infinity of the scaling
    /// exponent; for sigma: the integral from x to infinity of sigma / x.
    pub tail: Vec<f64>,
    pub start_point: f64,
    pub start_tolerance: f64,
}

fn check_grid(grid: &[f64], lo: f64, hi: f64) -> Result<()> {
    if grid.is_empty() {
        return input("empty grid");
    }
    for w in grid.windows(2) {
        if !(w[0] < w[1]) {
            return input("grid must be strictly ascending");
        }
    }
    if grid[0] < lo {
        return input(format!("abscissa {} is below the resolved range (minimum {lo})", grid[0]));
    }
    if *grid.last().unwrap() > hi {
        return input(format!("abscissa {} exceeds the start point {hi}", grid.last().unwrap()));
    }
    Ok(())
}

/// Right-hand side of the Painleve III equation for eta.
pub fn p3_rhs(theta: f64, eta: f64, d: f64) -> f64 {
    d * d / eta - d / theta + eta * eta * eta - 1.0 / eta
}

/// The solution with eta ~ 1 - 2 lambda K0(2 theta) at infinity, on an
/// ascending grid of theta values in [P3_THETA_MIN, P3_THETA_MAX].
pub fn p3_solution(lambda: f64, grid: &[f64]) -> Result<PainleveSolution> {
    if !(lambda > 0.0 && lambda <= 1.0 / PI + 1e-15) {
        return input("lambda must lie in (0, 1/pi]");
    }
    check_grid(grid, P3_THETA_MIN, P3_THETA_MAX)?;
    let t0 = P3_THETA_MAX;
    let k0 = bessel_k0(2.0 * t0)?;
    let k1 = bessel_k1(2.0 * t0)?;
    let eta0 = 1.0 - 2.0 * lambda * k0;
    let d0 = 4.0 * lambda * k1;
    // tail of the exponent integral beyond the start, in linearised form:
    // the integral of u (K0^2 - K1^2) has antiderivative u^2 (K0^2 - K1^2) + u K0 K1
    let u = 2.0 * t0;
    let tail0 = -lambda * lambda * (u * u * (k0 * k0 - k1 * k1) + u * k0 * k1);
    let f = |t: f64, y: &[f64], dy: &mut [f64]| {
        let (e, d) = (y[0], y[1]);
        dy[0] = d;
        dy[1] = p3_rhs(t, e, d);
        dy[2] = -t * ((1.0 - e * e).powi(2) - d * d) / (e * e);
    };
    let check = |t: f64, y: &[f64]| -> Option<String> {
        (!(y[0] > 0.0 && y[0] < 1e12)).then(|| format!("eta = {} at theta = {t}", y[0]))
    };
    let targets: Vec<f64> = grid.iter().rev().copied().collect();
    let traj = integrate(f, t0, &[eta0, d0, tail0], &targets, &ode_opts(), check)?;
    let mut sol = PainleveSolution {
        kind: PainleveKind::P3Eta,
        parameter: lambda,
        grid: grid.to_vec(),
        values: vec![],
        derivs: vec![],
        second: vec![],
        tail: vec![],
        start_point: t0,
        start_tolerance: (2.0 * lambda * k0).powi(2),
    };
    for (t, y) in targets.iter().zip(&traj.at_targets).rev() {
        sol.values.push(y[0]);
        sol.derivs.push(y[1]);
        sol.second.push(p3_rhs(*t, y[0], y[1]));
        sol.tail.push(y[2]);
    }
    Ok(sol)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct P3Scaling {
    pub eta_at_half_r: f64,
    #[serde(rename = "G")]
    pub g: f64,
}

fn scaling_from_eta(eta: f64, tail: f64, sign: ScalingSign) -> f64 {
    let num = match sign {
        ScalingSign::Plus => 1.0 - eta,
        ScalingSign::Minus => 1.0 + eta,
    };
    num / (2.0 * eta.sqrt()) * (0.25 * tail).exp()
}

/// eta(r/2) and the scaling function G_plus or G_minus at r.
pub fn p3_scaling(r: f64, lambda: f64, sign: ScalingSign) -> Result<P3Scaling> {
    if !(r > 0.0 && r <= 2.0 * P3_THETA_MAX) {
        return input(format!("r must lie in (0, {}]", 2.0 * P3_THETA_MAX));
    }
    let s = p3_solution(lambda, &[0.5 * r])?;
    Ok(P3Scaling { eta_at_half_r: s.values[0], g: scaling_from_eta(s.values[0], s.tail[0], sign) })
}

/// G_plus or G_minus on an ascending r grid, from one trajectory.
pub fn p3_scaling_curve(rs: &[f64], lambda: f64, sign: ScalingSign) -> Result<Vec<P3Scaling>> {
    let grid: Vec<f64> = rs.iter().map(|r| 0.5 * r).collect();
    let s = p3_solution(lambda, &grid)?;
    Ok(s.values
        .iter()
        .zip(&s.tail)
        .map(|(&e, &t)| P3Scaling { eta_at_half_r: e, g: scaling_from_eta(e, t, sign) })
        .collect())
}

/// Small-r law for lambda < 1/pi: eta(r/2) ~ B r^sigma (1 - r^{2-2 sigma} / (16 B^2 (1-sigma)^2)).
pub fn p3_small_r(r: f64, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0 && lambda < 1.0 / PI) {
        return input("the power law needs 0 <= lambda < 1/pi");
    }
    let sigma = 2.0 / PI * (PI * lambda).asin();
    let lg = |x: f64| crate::specialfn::log_gamma(crate::C64::new(x, 0.0)).map(|z| z.re);
    let b = (-3.0 * sigma * 2f64.ln() + lg(0.5 * (1.0 - sigma))? - lg(0.5 * (1.0 + sigma))?).exp();
    Ok(b * r.powf(sigma) * (1.0 - r.powf(2.0 - 2.0 * sigma) / (16.0 * b * b * (1.0 - sigma).powi(2))))
}

/// Small-r law at lambda = 1/pi: eta(r/2) ~ -(r/2)(log(r/8) + Euler gamma).
pub fn p3_small_r_critical(r: f64) -> f64 {
    -0.5 * r * ((r / 8.0).ln() + crate::specialfn::EULER_GAMMA)
}

// ---------------------------------------------------------------------------
// Painleve V, sigma form

/// Large-x behaviour of the sigma function, from the linearised problem:
/// (g, g', g'', g''') at r = x / 2 with sigma = g / pi^2.
fn sigma_linear(r: f64) -> Result<[f64; 4]> {
    let k0 = bessel_k0(r)?;
    let k1 = bessel_k1(r)?;
    let d = k1 * k1 - k0 * k0;
    Ok([r * r * d - r * k0 * k1, r * d, -k1 * k1 - k0 * k0, 4.0 * k0 * k1 + 2.0 * k1 * k1 / r])
}

/// Third-order equation obtained by differentiating the sigma form.
fn p5_third(x: f64, s: f64, d1: f64, d2: f64) -> f64 {
    let q = s - x * d1 + 2.0 * d1 * d1;
    (q * (4.0 * d1 - x) - 8.0 * d1 * d1 * d1 + d1 - x * d2) / (x * x)
}

/// Residual of the sigma form, (x s'')^2 - (s - x s' + 2 s'^2)^2 + 4 s'^2 (s'^2 - 1/4).
pub fn p5_residual(x: f64, s: f64, d1: f64, d2: f64) -> f64 {
    let q = s - x * d1 + 2.0 * d1 * d1;
    (x * d2).powi(2) - q * q + 4.0 * d1 * d1 * (d1 * d1 - 0.25)
}

/// Sign in front of the linearised solution g / pi^2, which behaves like
/// -(1/2 pi) e^{-x} / x. The opposite sign, +(1/2 pi) e^{-x} / x, runs into
/// a pole near x = 0.01 and never reaches the -1/4 limit; the sign kept here
/// reaches it and matches the Painleve III route to G_minus.
pub const P5_AMPLITUDE_SIGN: f64 = 1.0;

/// sigma on an ascending grid in [P5_X_MIN, P5_X_MAX], integrated inward.
pub fn p5_solution(grid: &[f64]) -> Result<PainleveSolution> {
    p5_solution_signed(grid, P5_AMPLITUDE_SIGN)
}

pub fn p5_solution_signed(grid: &[f64], amp: f64) -> Result<PainleveSolution> {
    check_grid(grid, P5_X_MIN, P5_X_MAX)?;
    let x0 = P5_X_MAX;
    let g = sigma_linear(0.5 * x0)?;
    let c = amp / (PI * PI);
    let y0 = [c * g[0], c * g[1] / 2.0, c * g[2] / 4.0];
    // the integral of g(r)/r from r to infinity is -g(r) - K0(r)^2 / 2
    let k0 = bessel_k0(0.5 * x0)?;
    let tail0 = c * (-g[0] - 0.5 * k0 * k0);
    let f = |x: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = p5_third(x, y[0], y[1], y[2]);
        dy[3] = -y[0] / x;
    };
    let check = |x: f64, y: &[f64]| -> Option<String> {
        (!(y[0].abs() < 1e6)).then(|| format!("sigma = {} at x = {x} (pole)", y[0]))
    };
    let targets: Vec<f64> = grid.iter().rev().copied().collect();
    let opts = OdeOptions { atol: 1e-30, ..ode_opts() };
    let traj = integrate(f, x0, &[y0[0], y0[1], y0[2], tail0], &targets, &opts, check)?;
    let mut sol = PainleveSolution {
        kind: PainleveKind::P5Sigma,
        parameter: 0.0,
        grid: grid.to_vec(),
        values: vec![],
        derivs: vec![],
        second: vec![],
        tail: vec![],
        start_point: x0,
        start_tolerance: (-x0).exp() * y0[0].abs(),
    };
    for y in traj.at_targets.iter().rev() {
        sol.values.push(y[0]);
        sol.derivs.push(y[1]);
        sol.second.push(y[2]);
        sol.tail.push(y[3]);
    }
    Ok(sol)
}

pub fn p5_sigma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return input("x must be positive");
    }
    Ok(p5_solution(&[x])?.values[0])
}

/// G_minus(r) = exp(-int_{2r}^infinity sigma(x)/x dx).
pub fn g_minus_p5(rs: &[f64]) -> Result<Vec<f64>> {
    let grid: Vec<f64> = rs.iter().map(|r| 2.0 * r).collect();
    let s = p5_solution(&grid)?;
    Ok(s.tail.iter().map(|t| (-t).exp()).collect())
}

// ---------------------------------------------------------------------------
// Sine-kernel gap probability

#[derive(Clone, Debug, Serialize)]
pub struct FredholmGap {
    pub s: f64,
    pub nodes: usize,
    pub p_s: LogDet,
    pub d_plus: LogDet,
    pub d_minus: LogDet,
}

fn dd_sqrt(x: DD) -> DD {
    if x.hi() <= 0.0 {
        return dd(0.0);
    }
    let s = dd(x.hi().sqrt());
    s + (x - s * s) / (s * 2.0)
}

/// det(I - W^{1/2} K W^{1/2}) for a kernel on the nodes, in double-double.
fn nystrom<F: Fn(DD, DD) -> DD>(x: &[DD], w: &[DD], kernel: F) -> LogDet {
    let n = x.len();
    let sw: Vec<DD> = w.iter().map(|&v| dd_sqrt(v)).collect();
    let m = Mat::from_fn(n, |i, j| {
        let k = sw[i] * kernel(x[i], x[j]) * sw[j];
        if i == j {
            dd(1.0) - k
        } else {
            -k
        }
    });
    log_det(m)
}

fn sinc_over_pi(d: DD) -> DD {
    if d.hi() == 0.0 {
        return dd(1.0) / dd_pi();
    }
    dd_sin(d) / (d * dd_pi())
}

fn gap_dets(s: f64, nodes: usize) -> (LogDet, LogDet, LogDet) {
    let (t, wt) = gauss_legendre_dd(nodes);
    let sd = dd(s);
    // (-s, s) for the full kernel
    let x: Vec<DD> = t.iter().map(|&u| sd * u).collect();
    let w: Vec<DD> = wt.iter().map(|&v| sd * v).collect();
    let p = nystrom(&x, &w, |a, b| sinc_over_pi(a - b));
    // (0, s) for the even and odd parts
    let half = sd * 0.5;
    let xh: Vec<DD> = t.iter().map(|&u| half * (u + dd(1.0))).collect();
    let wh: Vec<DD> = wt.iter().map(|&v| half * v).collect();
    let dp = nystrom(&xh, &wh, |a, b| sinc_over_pi(a - b) + sinc_over_pi(a + b));
    let dm = nystrom(&xh, &wh, |a, b| sinc_over_pi(a - b) - sinc_over_pi(a + b));
    (p, dp, dm)
}

/// Default Nystrom order for a given half-length.
pub fn default_gap_nodes(s: f64) -> usize {
    (2.0 * s).ceil() as usize + 40
}

/// Gap probability of the sine kernel on (-s, s) and its even/odd factors.
/// The node count is validated against a doubled rule.
pub fn sine_gap(s: f64, nodes: usize) -> Result<FredholmGap> {
    if !(s > 0.0 && s.is_finite()) {
        return input("s must be positive");
    }
    if nodes < 32 {
        return input("at least 32 nodes are required");
    }
    let (p, dp, dm) = gap_dets(s, nodes);
    let (p2, _, _) = gap_dets(s, 2 * nodes);
    let diff = (p.log_modulus - p2.log_modulus).abs();
    if !(diff <= 1e-9) {
        return Err(Error::Quadrature(format!(
            "{nodes} nodes are not enough at s = {s}: doubling changes log P by {diff:.2e}"
        )));
    }
    Ok(FredholmGap { s, nodes, p_s: p, d_plus: dp, d_minus: dm })
}

/// The constant (1/12) log 2 + 3 zeta'(-1).
pub fn widom_dyson_constant() -> f64 {
    2f64.ln() / 12.0 + 3.0 * ZETA_PRIME_NEG1
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DysonEstimate {
    pub a0_estimate: f64,
    pub c0: f64,
}

/// Extrapolates log P_s + s^2/2 + (1/4) log s to s = infinity by fitting
/// a polynomial in 1/s through all grid points.
pub fn dyson_asymptote(s_grid: &[f64]) -> Result<DysonEstimate> {
    if s_grid.len() < 3 {
        return input("need at least three abscissae");
    }
    for w in s_grid.windows(2) {
        if !(w[0] < w[1]) {
            return input("s grid must be increasing");
        }
    }
    if *s_grid.last().unwrap() < 8.0 {
        return input("the largest abscissa must be at least 8");
    }
    let mut vals = vec![];
    for &s in s_grid {
        let g = sine_gap(s, default_gap_nodes(s))?;
        vals.push(g.p_s.log_modulus + 0.5 * s * s + 0.25 * s.ln());
    }
    let us: Vec<f64> = s_grid.iter().map(|s| 1.0 / s).collect();
    let full = extrapolate_to_zero(&us, &vals);
    let reduced = extrapolate_to_zero(&us[1..], &vals[1..]);
    if (full - reduced).abs() > 1e-2 {
        return Err(Error::Numerical(format!(
            "extrapolation unstable: {full} with all points, {reduced} without the first"
        )));
    }
    Ok(DysonEstimate { a0_estimate: full, c0: widom_dyson_constant() })
}

/// Value at u = 0 of the interpolating polynomial (Neville).
fn extrapolate_to_zero(u: &[f64], v: &[f64]) -> f64 {
    let mut p = v.to_vec();
    let n = u.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (u[i + k] * p[i] - u[i] * p[i + 1]) / (u[i + k] - u[i]);
        }
    }
    p[0]
}

/// log D_n(phi_mu) - n^2 log cos(mu/2) + (1/4) log(n sin(mu/2)), in extended
/// precision; tends to the Widom-Dyson constant.
pub fn widom_route(mu: f64, n: usize) -> Result<f64> {
    let s = CircleSymbol::char_interval(mu)?;
    let d = toeplitz_det(&s, n, &DetOptions::extended())?;
    let nf = n as f64;
    Ok(d.log_modulus - nf * nf * (0.5 * mu).cos().ln() + 0.25 * (nf * (0.5 * mu).sin()).ln())
}

/// D_n(phi_{2s/n}) in extended precision, which tends to P_s.
pub fn sine_gap_toeplitz(s: f64, n: usize) -> Result<LogDet> {
    let sym = CircleSymbol::char_interval(2.0 * s / n as f64)?;
    toeplitz_det(&sym, n, &DetOptions::extended())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neville_recovers_constant_term() {
        let u = [0.5, 0.25, 0.125];
        let v: Vec<f64> = u.iter().map(|x| 3.0 + 2.0 * x - x * x).collect();
        assert!((extrapolate_to_zero(&u, &v) - 3.0).abs() < 1e-14);
    }
}
