//! Exact finite-n determinants and identities: Toeplitz, Hankel and
//! Toeplitz+Hankel determinants, orthogonal polynomials on the circle, the
//! multiple-integral oracle and the Fredholm-type right-hand side.

use crate::error::{input, Error, Result};
use crate::linalg::{hermitian_eigenvalues, log_det, solve_full_pivot, LogDet, Mat};
use crate::precision::{Precision, C64, CDD, DD};
use crate::symbols::{graded_offsets, uniform_panels, CircleSymbol, FhSingularity, QNode, SmoothPart};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DetOptions {
    pub precision: Precision,
}

impl DetOptions {
    pub fn extended() -> Self {
        DetOptions { precision: Precision::Extended }
    }
}

fn all_real(v: &[C64]) -> bool {
    v.iter().all(|z| z.im == 0.0)
}

/// det(phi_{j-k}) for a coefficient slice with `coeffs[k + n - 1] = phi_k`.
pub fn toeplitz_det_coeffs(coeffs: &[C64], n: usize, precision: Precision) -> LogDet {
    if n == 0 {
        return LogDet::one();
    }
    assert_eq!(coeffs.len(), 2 * n - 1);
    let off = n as isize - 1;
    let at = |j: usize, k: usize| coeffs[(j as isize - k as isize + off) as usize];
    match (precision, all_real(coeffs)) {
        (Precision::Double, true) => log_det(Mat::from_fn(n, |j, k| at(j, k).re)),
        (Precision::Double, false) => log_det(Mat::from_fn(n, at)),
        (Precision::Extended, true) => log_det(Mat::from_fn(n, |j, k| DD::from(at(j, k).re))),
        (Precision::Extended, false) => log_det(Mat::from_fn(n, |j, k| {
            let z = at(j, k);
            CDD::new(DD::from(z.re), DD::from(z.im))
        })),
    }
}

fn dd_toeplitz(coeffs: &[CDD], n: usize) -> LogDet {
    let off = n as isize - 1;
    let at = |j: usize, k: usize| coeffs[(j as isize - k as isize + off) as usize];
    if coeffs.iter().all(|z| z.im.hi() == 0.0) {
        log_det(Mat::from_fn(n, |j, k| at(j, k).re))
    } else {
        log_det(Mat::from_fn(n, at))
    }
}

/// D_n(s) = det(s_{j-k})_{j,k<n}.
pub fn toeplitz_det(s: &CircleSymbol, n: usize, opts: &DetOptions) -> Result<LogDet> {
    if n == 0 {
        return Ok(LogDet::one());
    }
    let m = n as i64 - 1;
    let out = match opts.precision {
        Precision::Double => {
            let c = s.fourier_coeffs(-m, m)?;
            toeplitz_det_coeffs(&c, n, Precision::Double)
        }
        Precision::Extended => dd_toeplitz(&s.fourier_coeffs_dd(-m, m)?, n),
    };
    if out.log_modulus.is_nan() {
        return Err(Error::Numerical("non-finite entries in the Toeplitz matrix".into()));
    }
    Ok(out)
}

/// det(I - T_n(1 - s)), which reduces to D_n(s).
pub fn integrable_operator_det(s: &CircleSymbol, n: usize) -> Result<LogDet> {
    if n == 0 {
        return Ok(LogDet::one());
    }
    let m = n as i64 - 1;
    let c = s.fourier_coeffs(-m, m)?;
    let one_minus: Vec<C64> = (-m..=m)
        .zip(&c)
        .map(|(k, v)| if k == 0 { 1.0 - v } else { -v })
        .collect();
    let off = m as isize;
    let mat = Mat::from_fn(n, |j, k| {
        let d = if j == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        d - one_minus[(j as isize - k as isize + off) as usize]
    });
    Ok(log_det(mat))
}

// ---------------------------------------------------------------------------
// Hankel and Toeplitz+Hankel determinants

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructuredKind {
    Hankel,
    ThPlus0,
    ThMinus2,
    ThPlus1,
    ThMinus1,
}

impl std::str::FromStr for StructuredKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hankel" => StructuredKind::Hankel,
            "th_plus_0" => StructuredKind::ThPlus0,
            "th_minus_2" => StructuredKind::ThMinus2,
            "th_plus_1" => StructuredKind::ThPlus1,
            "th_minus_1" => StructuredKind::ThMinus1,
            _ => return input(format!("unknown structured kind '{s}'")),
        })
    }
}

/// An interior singularity of a weight on [-1, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteriorPoint {
    pub lambda: f64,
    pub alpha: C64,
    pub beta: C64,
}

/// w(x) = e^{U(x)} (1-x)^{2 a_right} (1+x)^{2 a_left} prod |x - l_j|^{2 a_j} w_j(x),
/// with w_j = e^{i pi b_j} for x <= l_j and e^{-i pi b_j} for x > l_j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiWeight {
    /// Power-series coefficients of U in x.
    pub u: Vec<C64>,
    pub alpha_right: C64,
    pub alpha_left: C64,
    /// Sorted by decreasing lambda.
    pub interior: Vec<InteriorPoint>,
}

impl JacobiWeight {
    pub fn new(
        u: Vec<C64>,
        alpha_right: C64,
        alpha_left: C64,
        mut interior: Vec<InteriorPoint>,
    ) -> Result<Self> {
        if alpha_right.re <= -0.5 || alpha_left.re <= -0.5 {
            return input("endpoint exponents need Re alpha > -1/2");
        }
        for p in &interior {
            if !(p.lambda > -1.0 && p.lambda < 1.0) || p.alpha.re <= -0.5 {
                return input("interior points need -1 < lambda < 1 and Re alpha > -1/2");
            }
            if !(p.beta.re > -0.5 && p.beta.re <= 0.5) {
                return input("interior jumps need Re beta in (-1/2, 1/2]");
            }
        }
        interior.sort_by(|a, b| b.lambda.partial_cmp(&a.lambda).unwrap());
        Ok(JacobiWeight { u, alpha_right, alpha_left, interior })
    }

    /// (1-x)^a (1+x)^b.
    pub fn jacobi(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![], C64::new(0.5 * a, 0.0), C64::new(0.5 * b, 0.0), vec![])
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.eval_near(x, None)
    }

    fn eval_near(&self, x: f64, near: Option<(BreakKind, f64)>) -> C64 {
        let mut l = C64::new(0.0, 0.0);
        let mut xp = 1.0;
        for c in &self.u {
            l += c * xp;
            xp *= x;
        }
        let (mut right, mut left) = (1.0 - x, 1.0 + x);
        match near {
            Some((BreakKind::Right, off)) => right = -off,
            Some((BreakKind::Left, off)) => left = off,
            _ => {}
        }
        l += 2.0 * self.alpha_right * right.ln() + 2.0 * self.alpha_left * left.ln();
        for (i, p) in self.interior.iter().enumerate() {
            let d = match near {
                Some((BreakKind::Interior(k), off)) if k == i => off,
                _ => x - p.lambda,
            };
            l += 2.0 * p.alpha * d.abs().ln();
            let s = if d <= 0.0 { 1.0 } else { -1.0 };
            l += C64::new(0.0, s * PI) * p.beta;
        }
        l.exp()
    }

    /// The even circle symbol w(cos t)|sin t|, written in root/jump form.
    pub fn to_circle_symbol(&self) -> Result<CircleSymbol> {
        let mut sings = vec![
            FhSingularity { theta: 0.0, alpha: 2.0 * self.alpha_right + 0.5, beta: C64::new(0.0, 0.0) },
            FhSingularity { theta: PI, alpha: 2.0 * self.alpha_left + 0.5, beta: C64::new(0.0, 0.0) },
        ];
        let mut sum_alpha = self.alpha_right + self.alpha_left;
        let mut phase = C64::new(0.0, 0.0);
        for p in &self.interior {
            let th = p.lambda.acos();
            sings.push(FhSingularity { theta: th, alpha: p.alpha, beta: -p.beta });
            sings.push(FhSingularity { theta: 2.0 * PI - th, alpha: p.alpha, beta: p.beta });
            sum_alpha += p.alpha;
            phase += 2.0 * C64::i() * p.beta * p.lambda.asin();
        }
        let pref = (-(2.0 * sum_alpha + 1.0) * 2f64.ln() + phase).exp();
        CircleSymbol::new(cos_power_series(&self.u), sings, pref)
    }

    fn breakpoints(&self) -> Vec<(f64, C64, BreakKind)> {
        let mut b = vec![(1.0, self.alpha_right, BreakKind::Right)];
        for (i, p) in self.interior.iter().enumerate() {
            b.push((p.lambda, p.alpha, BreakKind::Interior(i)));
        }
        b.push((-1.0, self.alpha_left, BreakKind::Left));
        b
    }
}

/// Trigonometric coefficients of U(cos t) for a polynomial U.
fn cos_power_series(u: &[C64]) -> SmoothPart {
    let mut terms: Vec<(i64, C64)> = vec![];
    for (p, c) in u.iter().enumerate() {
        // cos^p t = 2^{-p} sum_k binom(p, k) e^{i(p-2k)t}
        let mut binom = 1.0;
        for k in 0..=p {
            terms.push(((p as i64) - 2 * k as i64, c * binom / 2f64.powi(p as i32)));
            binom = binom * (p - k) as f64 / (k + 1) as f64;
        }
    }
    SmoothPart::from_poly(&terms)
}

/// A weight on [-1, 1]: either of root/jump form, or derived from an even
/// circle symbol f as f(e^{i arccos x}) / sqrt(1 - x^2).
#[derive(Clone, Debug)]
pub enum Weight {
    Jacobi(JacobiWeight),
    FromCircle(CircleSymbol),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum BreakKind {
    Right,
    Left,
    Interior(usize),
}

/// Node on [-1, 1]; `near` carries the signed offset x - point from a
/// singular point so that tiny distances survive rounding.
#[derive(Clone, Copy, Debug)]
pub(crate) struct XNode {
    x: f64,
    near: Option<(BreakKind, f64)>,
    w: f64,
}

/// d with cos(t0 + d) - cos(t0) = off, computed without cancellation.
fn angle_offset(t0: f64, off: f64) -> f64 {
    let (s0, c0) = t0.sin_cos();
    if off.abs() > 1e-3 {
        return (c0 + off).clamp(-1.0, 1.0).acos() - t0;
    }
    let mut d = -off / s0;
    for _ in 0..6 {
        let h = (0.5 * d).sin();
        let g = -2.0 * c0 * h * h - s0 * d.sin() - off;
        let dg = -c0 * d.sin() - s0 * d.cos();
        let step = g / dg;
        d -= step;
        if step.abs() <= 1e-17 * d.abs() {
            break;
        }
    }
    d
}

impl Weight {
    pub fn eval(&self, x: f64) -> Result<C64> {
        self.eval_node(&XNode { x, near: None, w: 0.0 })
    }

    fn eval_node(&self, n: &XNode) -> Result<C64> {
        match self {
            Weight::Jacobi(w) => Ok(w.eval_near(n.x, n.near)),
            Weight::FromCircle(s) => {
                let (theta, near, root) = match n.near {
                    Some((BreakKind::Right, off)) => {
                        let d = -off;
                        let t = 2.0 * (0.5 * d).sqrt().asin();
                        (t, s.singularities.iter().position(|q| q.theta == 0.0).map(|i| (i, t)), (d * (2.0 - d)).sqrt())
                    }
                    Some((BreakKind::Left, off)) => {
                        let t = 2.0 * (0.5 * off).sqrt().asin();
                        (PI - t, s.singularities.iter().position(|q| q.theta == PI).map(|i| (i, -t)), (off * (2.0 - off)).sqrt())
                    }
                    Some((BreakKind::Interior(i), off)) => {
                        let t0 = s.singularities[i].theta;
                        let d = angle_offset(t0, off);
                        (t0 + d, Some((i, d)), (1.0 - n.x * n.x).sqrt())
                    }
                    None => (n.x.acos(), None, (1.0 - n.x * n.x).sqrt()),
                };
                let node = QNode { theta, near, w: 0.0 };
                Ok(s.evaluate_node(&node)? / root)
            }
        }
    }

    /// (point, effective alpha, kind) with |x - point|^{2 alpha} local
    /// behaviour, ordered from x = 1 down to x = -1.
    fn breakpoints(&self) -> Vec<(f64, C64, BreakKind)> {
        match self {
            Weight::Jacobi(w) => w.breakpoints(),
            Weight::FromCircle(s) => {
                let alpha_at = |t: f64| {
                    s.singularities
                        .iter()
                        .find(|q| (q.theta - t).abs() < 1e-14)
                        .map(|q| q.alpha)
                        .unwrap_or_default()
                };
                let mut b = vec![(1.0, 0.5 * (alpha_at(0.0) - 0.5), BreakKind::Right)];
                let mut inner: Vec<_> = s
                    .singularities
                    .iter()
                    .enumerate()
                    .filter(|(_, q)| q.theta > 0.0 && q.theta < PI)
                    .map(|(i, q)| (q.theta.cos(), q.alpha, BreakKind::Interior(i)))
                    .collect();
                inner.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
                b.extend(inner);
                b.push((-1.0, 0.5 * (alpha_at(PI) - 0.5), BreakKind::Left));
                b
            }
        }
    }

    /// Quadrature nodes on [-1, 1] adapted to the singular points.
    pub(crate) fn nodes(&self) -> Vec<XNode> {
        let bps = self.breakpoints();
        let grade = |a: C64| {
            let e = 2.0 * a;
            (!(e.im == 0.0 && e.re >= 0.0 && e.re.fract() == 0.0)).then_some(a)
        };
        let mut out = vec![];
        let wmax = 0.25;
        let graded_to = |out: &mut Vec<XNode>, at: f64, kind: BreakKind, a: C64, len: f64, dir: f64| {
            for (off, w) in graded_offsets(a, len, 1e-17, wmax, 40) {
                out.push(XNode { x: at + dir * off, near: Some((kind, dir * off)), w });
            }
        };
        for w in bps.windows(2) {
            let (hi, ah, kh) = w[0];
            let (lo, al, kl) = w[1];
            match (grade(al), grade(ah)) {
                (None, None) => {
                    let mut tmp = vec![];
                    uniform_panels(&mut tmp, lo, hi, wmax, 40);
                    out.extend(tmp.into_iter().map(|(x, w)| XNode { x, near: None, w }));
                }
                (Some(a), None) => graded_to(&mut out, lo, kl, a, hi - lo, 1.0),
                (None, Some(a)) => graded_to(&mut out, hi, kh, a, hi - lo, -1.0),
                (Some(a), Some(b)) => {
                    let h = 0.5 * (hi - lo);
                    graded_to(&mut out, lo, kl, a, h, 1.0);
                    graded_to(&mut out, hi, kh, b, h, -1.0);
                }
            }
        }
        out
    }
}

/// Hankel determinant det(int x^{j+k} w dx). Evaluated through the Gram
/// matrix of monic Chebyshev polynomials, which has the same determinant
/// and is far better conditioned than raw moments.
pub fn hankel_det(w: &Weight, n: usize) -> Result<LogDet> {
    if n == 0 {
        return Ok(LogDet::one());
    }
    let nodes = w.nodes();
    let mut g = vec![C64::new(0.0, 0.0); n * n];
    let mut p = vec![0.0; n];
    for node in &nodes {
        let (x, wt) = (node.x, node.w);
        let f = w.eval_node(node)? * wt;
        if !f.re.is_finite() || !f.im.is_finite() {
            return Err(Error::Quadrature(format!("non-finite weight at x = {x}")));
        }
        p[0] = 1.0;
        if n > 1 {
            p[1] = x;
        }
        for j in 2..n {
            let c = if j == 2 { 0.5 } else { 0.25 };
            p[j] = x * p[j - 1] - c * p[j - 2];
        }
        for j in 0..n {
            let fj = f * p[j];
            for k in 0..=j {
                g[j * n + k] += fj * p[k];
            }
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            g[j * n + k] = g[k * n + j];
        }
    }
    Ok(log_det(Mat { n, data: g }))
}

/// Fourier coefficients 0..=m of an even symbol; refuses non-even input.
fn even_coeffs(s: &CircleSymbol, m: i64) -> Result<Vec<C64>> {
    let c = s.fourier_coeffs(-m, m)?;
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    for k in 1..=m as usize {
        let (a, b) = (c[m as usize + k], c[m as usize - k]);
        if (a - b).norm() > 1e-9 * scale {
            return input(format!("symbol is not even: coefficients at +-{k} differ"));
        }
    }
    Ok(c[m as usize..].to_vec())
}

/// The four Toeplitz+Hankel determinants of an even symbol.
pub fn toeplitz_hankel_det(kind: StructuredKind, s: &CircleSymbol, n: usize) -> Result<LogDet> {
    if n == 0 {
        return Ok(LogDet::one());
    }
    let f = even_coeffs(s, 2 * n as i64 + 1)?;
    let fk = |k: i64| f[k.unsigned_abs() as usize];
    let entry = |j: usize, k: usize| -> C64 {
        let (j, k) = (j as i64, k as i64);
        match kind {
            StructuredKind::ThPlus0 => fk(j - k) + fk(j + k),
            StructuredKind::ThMinus2 => fk(j - k) - fk(j + k + 2),
            StructuredKind::ThPlus1 => fk(j - k) + fk(j + k + 1),
            StructuredKind::ThMinus1 => fk(j - k) - fk(j + k + 1),
            StructuredKind::Hankel => unreachable!(),
        }
    };
    let all_re = (0..f.len()).all(|k| f[k].im == 0.0);
    Ok(if all_re {
        log_det(Mat::from_fn(n, |j, k| entry(j, k).re))
    } else {
        log_det(Mat::from_fn(n, entry))
    })
}

/// Input to [`structured_det`].
#[derive(Clone, Debug)]
pub enum StructuredInput {
    Weight(Weight),
    Symbol(CircleSymbol),
}

pub fn structured_det(kind: StructuredKind, inp: &StructuredInput, n: usize) -> Result<LogDet> {
    match (kind, inp) {
        (StructuredKind::Hankel, StructuredInput::Weight(w)) => hankel_det(w, n),
        (StructuredKind::Hankel, StructuredInput::Symbol(s)) => {
            hankel_det(&Weight::FromCircle(s.clone()), n)
        }
        (_, StructuredInput::Symbol(s)) => toeplitz_hankel_det(kind, s, n),
        (_, StructuredInput::Weight(_)) => {
            input("Toeplitz+Hankel determinants take an even circle symbol")
        }
    }
}

/// Right-hand side of the squared-Hankel identity:
/// pi^{2n} 4^{-(n-1)^2} (p(0)+1)^2 / (p(1) p(-1)) D_{2n}(f), with p the monic
/// degree-2n orthogonal polynomial of f = w(cos t)|sin t|.
pub fn hankel_squared_via_toeplitz(w: &JacobiWeight, n: usize) -> Result<LogDet> {
    let f = w.to_circle_symbol()?;
    let d2n = toeplitz_det(&f, 2 * n, &DetOptions::default())?;
    let pts = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
    let ov = opuc_at_points(&f, 2 * n, &pts, false)?;
    let (p0, p1, pm1) = (ov.values[0].1, ov.values[1].1, ov.values[2].1);
    let nf = n as f64;
    let logc = 2.0 * nf * PI.ln() - (nf - 1.0).powi(2) * 4f64.ln();
    let ratio = (p0 + 1.0).powi(2) / (p1 * pm1);
    Ok(LogDet::from_log(C64::new(logc, 0.0))
        .mul(LogDet::from_value(ratio))
        .mul(d2n))
}

/// (2^{n^2-2n+2}/pi^n) D_n^H(v) with v = f(e^{i arccos x})/sqrt(1-x^2).
pub fn th_plus0_via_hankel(s: &CircleSymbol, n: usize) -> Result<LogDet> {
    let h = hankel_det(&Weight::FromCircle(s.clone()), n)?;
    let nf = n as f64;
    let l = (nf * nf - 2.0 * nf + 2.0) * 2f64.ln() - nf * PI.ln();
    Ok(h.mul(LogDet::from_log(C64::new(l, 0.0))))
}

// ---------------------------------------------------------------------------
// Orthogonal polynomials on the unit circle

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerblunskyData {
    pub xi: Vec<C64>,
    /// chi_0..chi_n, leading coefficients of the orthonormal polynomials.
    pub chi: Vec<f64>,
}

impl VerblunskyData {
    /// D_{k+1}/D_k = chi_k^{-2}.
    pub fn ratio(&self, k: usize) -> f64 {
        self.chi[k].powi(-2)
    }

    /// log D_n = sum_{k<n} log chi_k^{-2}.
    pub fn log_det(&self, n: usize) -> f64 {
        (0..n).map(|k| -2.0 * self.chi[k].ln()).sum()
    }
}

/// Szegő recursion on the moments of a positive symbol.
pub fn verblunsky(s: &CircleSymbol, n: usize) -> Result<VerblunskyData> {
    if !s.is_positive() {
        return input("the Verblunsky recursion needs a positive symbol");
    }
    let m = n as i64 + 1;
    let c = s.fourier_coeffs(-m, m)?;
    let f = |k: i64| c[(k + m) as usize];
    let mut phi = vec![C64::new(1.0, 0.0)];
    let mut norm2 = f(0).re;
    if norm2 <= 0.0 {
        return Err(Error::Breakdown(0));
    }
    let mut xi = vec![];
    let mut chi = vec![norm2.powf(-0.5)];
    for k in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for (mi, a) in phi.iter().enumerate() {
            acc += a * f(-(mi as i64) - 1);
        }
        let r = -acc / norm2;
        if r.norm() >= 1.0 - 1e-15 {
            return Err(Error::Breakdown(k));
        }
        // Phi_{k+1} = z Phi_k + r Phi_k^*
        let deg = phi.len();
        let mut next = vec![C64::new(0.0, 0.0); deg + 1];
        for (i, a) in phi.iter().enumerate() {
            next[i + 1] += a;
            next[i] += r * phi[deg - 1 - i].conj();
        }
        phi = next;
        norm2 *= 1.0 - r.norm_sqr();
        xi.push(-r.conj());
        chi.push(norm2.powf(-0.5));
    }
    Ok(VerblunskyData { xi, chi })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpucValues {
    pub degree: usize,
    /// (point, monic polynomial value).
    pub values: Vec<(C64, C64)>,
    pub complementary: Option<Vec<(C64, C64)>>,
    /// Smallest/largest pivot of the Gram solve.
    pub pivot_ratio: f64,
    /// Largest residual of the orthogonality conditions.
    pub residual: f64,
}

fn monic_solve(c: &dyn Fn(i64) -> C64, q: usize, transpose: bool) -> Result<(Vec<C64>, f64, f64)> {
    if q == 0 {
        return Ok((vec![C64::new(1.0, 0.0)], 1.0, 0.0));
    }
    // sum_{m<q} a_m g(j, m) = -g(j, q), j < q
    let g = |j: usize, m: usize| {
        let d = j as i64 - m as i64;
        if transpose {
            c(-d)
        } else {
            c(d)
        }
    };
    let a: Vec<C64> = (0..q * q).map(|i| g(i / q, i % q)).collect();
    let b: Vec<C64> = (0..q).map(|j| -g(j, q)).collect();
    let sol = solve_full_pivot(&a, &b, q)?;
    let mut coeffs = sol.x;
    coeffs.push(C64::new(1.0, 0.0));
    let scale = (0..=q).map(|k| c(k as i64).norm()).fold(0.0, f64::max).max(1e-300);
    let mut res: f64 = 0.0;
    for j in 0..q {
        let s: C64 = (0..=q).map(|m| coeffs[m] * g(j, m)).sum();
        res = res.max(s.norm() / scale);
    }
    Ok((coeffs, sol.pivot_ratio, res))
}

fn horner(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * z + a)
}

/// Monic orthogonal polynomials (and optionally the complementary family)
/// evaluated at the given points.
pub fn opuc_at_points(
    s: &CircleSymbol,
    degree: usize,
    points: &[C64],
    complementary: bool,
) -> Result<OpucValues> {
    let m = degree as i64;
    let coeffs = s.fourier_coeffs(-m, m)?;
    let c = |k: i64| coeffs[(k + m) as usize];
    let (a, piv, res) = monic_solve(&c, degree, false)?;
    let values = points.iter().map(|&z| (z, horner(&a, z))).collect();
    let (comp, piv, res) = if complementary {
        let (b, p2, r2) = monic_solve(&c, degree, true)?;
        (Some(points.iter().map(|&z| (z, horner(&b, z))).collect()), piv.min(p2), res.max(r2))
    } else {
        (None, piv, res)
    };
    Ok(OpucValues { degree, values, complementary: comp, pivot_ratio: piv, residual: res })
}

// ---------------------------------------------------------------------------
// Multiple-integral oracle

/// Tensor-product node budget for the three-fold integral.
pub const HEINE_NODE_CAP: f64 = 2.0e6;

fn heine_nodes(s: &CircleSymbol, n: usize) -> Vec<QNode> {
    if !s.has_singularities() {
        let m = if n == 3 { 96 } else { 160 };
        return (0..m)
            .map(|j| QNode { theta: 2.0 * PI * j as f64 / m as f64, near: None, w: 1.0 / m as f64 })
            .collect();
    }
    let (tol, gl) = if n == 3 { (1e-10f64, 10) } else { (1e-14f64, 20) };
    let mut out = s.panel_nodes(tol, 1.6, gl, gl);
    for o in out.iter_mut() {
        o.w /= 2.0 * PI;
    }
    out
}

/// (1/n!) times the n-fold integral of prod |e^{it_j} - e^{it_k}|^2 prod s(e^{it_j}),
/// for n <= 3.
pub fn heine_oracle(s: &CircleSymbol, n: usize) -> Result<C64> {
    if n > 3 {
        return input("the multiple-integral oracle is limited to n <= 3");
    }
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let nodes = heine_nodes(s, n);
    let m = nodes.len();
    if n == 3 && (m as f64).powi(3) / 6.0 > HEINE_NODE_CAP * 10.0 {
        return Err(Error::Quadrature(format!("{m} nodes per dimension exceed the budget")));
    }
    let mut fv = Vec::with_capacity(m);
    for node in &nodes {
        fv.push(s.evaluate_node(node)? * node.w);
    }
    if n == 1 {
        return Ok(fv.iter().sum());
    }
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let gap = match (nodes[i].near, nodes[j].near) {
                (Some((a, da)), Some((b, db))) if a == b => da - db,
                _ => nodes[i].theta - nodes[j].theta,
            };
            let x = 2.0 * (0.5 * gap).sin();
            d[i * m + j] = x * x;
        }
    }
    // the integrand is symmetric and vanishes on diagonals, so the ordered
    // sum over i < j < k equals (1/n!) times the full tensor sum
    let mut total = C64::new(0.0, 0.0);
    if n == 2 {
        for i in 0..m {
            for j in i + 1..m {
                total += fv[i] * fv[j] * d[i * m + j];
            }
        }
    } else {
        for i in 0..m {
            for j in i + 1..m {
                let fij = fv[i] * fv[j] * d[i * m + j];
                let (di, dj) = (&d[i * m..(i + 1) * m], &d[j * m..(j + 1) * m]);
                let mut inner = C64::new(0.0, 0.0);
                for k in j + 1..m {
                    inner += fv[k] * (di[k] * dj[k]);
                }
                total += fij * inner;
            }
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Fredholm-type right-hand side

/// Truncated coefficient tail of the Hankel kernels must stay below this.
pub const BO_TAIL_TOL: f64 = 1e-10;

/// exp(n (log s)_0 + E(s)) det(1 - Q_n H(b) H(c~) Q_n), with both Hankel
/// operators truncated to `truncation` rows and columns.
pub fn bo_rhs(s: &CircleSymbol, n: usize, truncation: usize) -> Result<C64> {
    let (pre, corr) = bo_rhs_parts(s, n, truncation)?;
    Ok(pre.mul(corr).value())
}

/// (prefactor, operator determinant) of [`bo_rhs`].
pub fn bo_rhs_parts(s: &CircleSymbol, n: usize, truncation: usize) -> Result<(LogDet, LogDet)> {
    if n == 0 || truncation == 0 {
        return input("n and truncation must be positive");
    }
    s.log_coeffs(0, 0)?;
    let l0 = s.smooth.v0() + s.prefactor.ln();
    let e = s.smooth.sslt_constant();
    let pre = LogDet::from_log(n as f64 * l0 + e);
    let t = truncation;
    let kmax = n + 2 * t + 1;
    // coefficients of b = phi_-/phi_+ and c = phi_+/phi_- by trapezoid sums
    let mgrid = (4 * kmax).next_power_of_two().max(1024);
    let mut bvals = Vec::with_capacity(mgrid);
    let mut cvals = Vec::with_capacity(mgrid);
    for j in 0..mgrid {
        let th = 2.0 * PI * j as f64 / mgrid as f64;
        let z = C64::from_polar(1.0, th);
        let lp = s.smooth.half_sum(z, 1);
        let lm = s.smooth.half_sum(z, -1);
        bvals.push((lm - lp).exp());
        cvals.push((lp - lm).exp());
    }
    let coeff = |vals: &[C64], k: i64| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let step = C64::from_polar(1.0, -2.0 * PI * k as f64 / mgrid as f64);
        let mut e = C64::new(1.0, 0.0);
        for v in vals {
            acc += v * e;
            e *= step;
        }
        acc / mgrid as f64
    };
    let b: Vec<C64> = (0..=kmax as i64).map(|k| coeff(&bvals, k)).collect();
    let c: Vec<C64> = (0..=kmax as i64).map(|k| coeff(&cvals, -k)).collect();
    let tail = b[kmax - 10..]
        .iter()
        .chain(&c[kmax - 10..])
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if tail > BO_TAIL_TOL {
        return Err(Error::Numerical(format!(
            "truncation {t} too small: coefficient tail {tail:.2e}"
        )));
    }
    // K_{ij} = sum_l b_{n+i+l+1} c_{-(l+n+j+1)}, i, j < t
    let mat = Mat::from_fn(t, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for l in 0..t {
            acc += b[n + i + l + 1] * c[n + j + l + 1];
        }
        let d = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        d - acc
    });
    Ok((pre, log_det(mat)))
}

/// Positivity of the Hermitian matrix with 2 Re c_0 on the diagonal and c_{k-j}
/// above it.
pub fn caratheodory_psd(c: &[C64]) -> bool {
    let n = c.len();
    if n == 0 {
        return true;
    }
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            a[j * n + k] = if j == k {
                C64::new(2.0 * c[0].re, 0.0)
            } else if k > j {
                c[k - j]
            } else {
                c[j - k].conj()
            };
        }
    }
    hermitian_eigenvalues(&a, n).first().map_or(true, |&m| m >= -1e-12)
}
