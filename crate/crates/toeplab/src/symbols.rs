//! Symbols on the unit circle: a smooth exponent, a list of root/jump
//! singularities and a constant prefactor.

use crate::error::{input, Error, Result};
use crate::precision::{dd, dd_pi, dd_sin, dd_to_f64, C64, CDD};
use crate::quadrature::gauss_legendre;
use crate::specialfn::log_gamma;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// `coeff * log(1 - a z^side)` with |a| < 1 and side = +1 or -1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogTerm {
    pub coeff: C64,
    pub a: C64,
    pub side: i8,
}

/// The exponent V(z): a trigonometric polynomial plus logarithmic terms, so
/// every Fourier coefficient is available in closed form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SmoothPart {
    pub poly: BTreeMap<i64, C64>,
    pub logs: Vec<LogTerm>,
}

impl SmoothPart {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_poly(coeffs: &[(i64, C64)]) -> Self {
        let mut s = Self::default();
        for &(k, v) in coeffs {
            *s.poly.entry(k).or_insert(C64::new(0.0, 0.0)) += v;
        }
        s
    }

    pub fn with_log(mut self, coeff: f64, a: f64, side: i8) -> Self {
        self.logs.push(LogTerm { coeff: C64::new(coeff, 0.0), a: C64::new(a, 0.0), side });
        self
    }

    pub fn is_zero(&self) -> bool {
        self.poly.values().all(|v| v.norm() == 0.0) && self.logs.is_empty()
    }

    /// V_k.
    pub fn coeff(&self, k: i64) -> C64 {
        let mut v = self.poly.get(&k).copied().unwrap_or_default();
        if k != 0 {
            for t in &self.logs {
                if (k > 0 && t.side > 0) || (k < 0 && t.side < 0) {
                    let m = k.unsigned_abs() as i32;
                    v -= t.coeff * t.a.powi(m) / m as f64;
                }
            }
        }
        v
    }

    pub fn v0(&self) -> C64 {
        self.coeff(0)
    }

    /// V at z = e^{i theta}.
    pub fn eval(&self, theta: f64) -> C64 {
        let z = C64::from_polar(1.0, theta);
        let mut s = C64::new(0.0, 0.0);
        for (&k, &v) in &self.poly {
            s += v * C64::from_polar(1.0, k as f64 * theta);
        }
        for t in &self.logs {
            let w = if t.side > 0 { z } else { z.conj() };
            s += t.coeff * (C64::new(1.0, 0.0) - t.a * w).ln();
        }
        s
    }

    /// sum_{k>=1} V_k z^k (side = +1) or sum_{k>=1} V_{-k} z^{-k} (side = -1).
    pub fn half_sum(&self, z: C64, side: i8) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (&k, &v) in &self.poly {
            if k != 0 && k.signum() as i8 == side {
                s += v * z.powi(k as i32);
            }
        }
        for t in &self.logs {
            if t.side == side {
                let w = if side > 0 { z } else { 1.0 / z };
                s += t.coeff * (C64::new(1.0, 0.0) - t.a * w).ln();
            }
        }
        s
    }

    /// sum_{k>=1} k V_k V_{-k}, summed exactly.
    pub fn sslt_constant(&self) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        // polynomial against everything on the other side
        for (&k, &v) in &self.poly {
            if k > 0 {
                s += k as f64 * v * self.coeff(-k);
            }
        }
        for t in self.logs.iter().filter(|t| t.side > 0) {
            for (&k, &v) in &self.poly {
                if k < 0 {
                    let m = (-k) as i32;
                    s += m as f64 * (-t.coeff * t.a.powi(m) / m as f64) * v;
                }
            }
            for u in self.logs.iter().filter(|u| u.side < 0) {
                // sum_k k (c1 a^k/k)(c2 b^k/k) = -c1 c2 log(1 - ab)
                s -= t.coeff * u.coeff * (C64::new(1.0, 0.0) - t.a * u.a).ln();
            }
        }
        s
    }
}

/// A root/jump singularity |z - z_j|^{2 alpha} with jump parameter beta at
/// z_j = e^{i theta}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FhSingularity {
    pub theta: f64,
    pub alpha: C64,
    pub beta: C64,
}

/// Builtins whose Fourier coefficients are known in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClosedForm {
    Identity,
    Monomial(i64),
    PureFh { alpha: C64, beta: C64 },
    DiagCritical,
    CharInterval { mu: f64 },
    BasorTracy,
    Lenard { t: f64 },
    Gap { gamma: f64, theta1: f64, theta2: f64 },
}

/// A symbol prefactor * e^{V} * prod |z - z_j|^{2 a_j} z^{b_j} g_j(z) z_j^{-b_j},
/// or the indicator of an arc complement (which is not of root/jump type).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleSymbol {
    pub smooth: SmoothPart,
    pub singularities: Vec<FhSingularity>,
    pub prefactor: C64,
    /// Set when the symbol is the indicator of {mu <= theta <= 2 pi - mu}.
    pub arc_gap: Option<f64>,
    pub closed: Option<ClosedForm>,
    /// Set when the symbol is given directly as a Laurent polynomial
    /// sum c_k z^k; the other fields are then unused.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laurent: Option<BTreeMap<i64, C64>>,
    pub name: String,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn norm_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

impl CircleSymbol {
    pub fn new(
        smooth: SmoothPart,
        mut singularities: Vec<FhSingularity>,
        prefactor: C64,
    ) -> Result<Self> {
        for s in &mut singularities {
            if !s.theta.is_finite() {
                return input("singularity angle must be finite");
            }
            s.theta = norm_angle(s.theta);
            if s.alpha.re <= -0.5 {
                return input(format!("Re alpha must exceed -1/2, got {}", s.alpha.re));
            }
        }
        singularities.sort_by(|a, b| a.theta.partial_cmp(&b.theta).unwrap());
        for w in singularities.windows(2) {
            if (w[1].theta - w[0].theta).abs() < 1e-14 {
                return input("singularity angles must be distinct");
            }
        }
        for t in &smooth.logs {
            if t.a.norm() >= 1.0 || (t.side != 1 && t.side != -1) {
                return input("logarithmic term needs |a| < 1 and side = +-1");
            }
        }
        Ok(CircleSymbol {
            smooth,
            singularities,
            prefactor,
            arc_gap: None,
            closed: None,
            laurent: None,
            name: "fh".into(),
        })
    }

    fn tagged(mut self, name: &str, closed: Option<ClosedForm>) -> Self {
        self.name = name.into();
        self.closed = closed;
        self
    }

    pub fn identity() -> Self {
        Self::new(SmoothPart::zero(), vec![], c(1.0))
            .unwrap()
            .tagged("identity", Some(ClosedForm::Identity))
    }

    /// z^m, written as a jump of size m at theta = 0.
    pub fn monomial(m: i64) -> Self {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let sings = if m == 0 {
            vec![]
        } else {
            vec![FhSingularity { theta: 0.0, alpha: c(0.0), beta: c(m as f64) }]
        };
        Self::new(SmoothPart::zero(), sings, c(sign))
            .unwrap()
            .tagged("monomial", Some(ClosedForm::Monomial(m)))
    }

    /// The Laurent polynomial sum c_k z^k, such as 2 - z - 1/z.
    pub fn laurent(coeffs: &[(i64, C64)]) -> Self {
        let mut map = BTreeMap::new();
        for &(k, v) in coeffs {
            *map.entry(k).or_insert(c(0.0)) += v;
        }
        let mut s = Self::identity().tagged("laurent", None);
        s.laurent = Some(map);
        s
    }

    /// Refuses symbols not written in root/jump form.
    pub fn require_root_jump_form(&self) -> Result<()> {
        if self.laurent.is_some() {
            return input("this operation needs a symbol in root/jump form, not a Laurent polynomial");
        }
        Ok(())
    }

    /// exp(t (z + 1/z)) = exp(2 t cos theta) for real t.
    pub fn exp_cos(t: C64) -> Self {
        let sm = SmoothPart::from_poly(&[(1, t), (-1, t)]);
        Self::new(sm, vec![], c(1.0)).unwrap().tagged("exp_cos", None)
    }

    /// exp(sum_k V_k z^k) for a finite list of coefficients.
    pub fn smooth(coeffs: &[(i64, C64)]) -> Self {
        Self::new(SmoothPart::from_poly(coeffs), vec![], c(1.0)).unwrap().tagged("smooth", None)
    }

    /// |1 - r z|^{-2}.
    pub fn ar1(r: f64) -> Result<Self> {
        if !(r.abs() < 1.0) {
            return input("ar1 needs |r| < 1");
        }
        let sm = SmoothPart::zero().with_log(-1.0, r, 1).with_log(-1.0, r, -1);
        Ok(Self::new(sm, vec![], c(1.0))?.tagged("ar1", None))
    }

    /// |z - 1|^{2 alpha} z^beta g(z) with the jump at theta = 0.
    pub fn pure_fh(alpha: C64, beta: C64) -> Result<Self> {
        let s = Self::new(
            SmoothPart::zero(),
            vec![FhSingularity { theta: 0.0, alpha, beta }],
            c(1.0),
        )?;
        Ok(s.tagged("pure_fh", Some(ClosedForm::PureFh { alpha, beta })))
    }

    /// ((1 - k/z)/(1 - k z))^{1/2}, positive at z = -1.
    pub fn diag(k: f64) -> Result<Self> {
        if !(k >= 0.0) || !k.is_finite() {
            return input("diag needs k_ons >= 0");
        }
        if (k - 1.0).abs() <= 1e-12 {
            let s = Self::new(
                SmoothPart::zero(),
                vec![FhSingularity { theta: 0.0, alpha: c(0.0), beta: c(-0.5) }],
                c(1.0),
            )?;
            return Ok(s.tagged("diag", Some(ClosedForm::DiagCritical)));
        }
        if k == 0.0 {
            return Ok(Self::identity().tagged("diag", Some(ClosedForm::Identity)));
        }
        if k < 1.0 {
            let sm = SmoothPart::zero().with_log(0.5, k, -1).with_log(-0.5, k, 1);
            Ok(Self::new(sm, vec![], c(1.0))?.tagged("diag", None))
        } else {
            // -z^{-1} (1 - z/k)^{1/2} (1 - 1/(k z))^{-1/2}
            let q = 1.0 / k;
            let sm = SmoothPart::zero().with_log(0.5, q, 1).with_log(-0.5, q, -1);
            let s = Self::new(
                sm,
                vec![FhSingularity { theta: 0.0, alpha: c(0.0), beta: c(-1.0) }],
                c(1.0),
            )?;
            Ok(s.tagged("diag", None))
        }
    }

    /// The row-correlation symbol built from gamma1 < gamma2, positive at z = -1.
    pub fn onsager(g1: f64, g2: f64) -> Result<Self> {
        if !(g1 > 0.0 && g1 < 1.0 && g1 < g2) {
            return input("onsager needs 0 < gamma1 < 1 and gamma1 < gamma2");
        }
        let base = SmoothPart::zero().with_log(0.5, g1, 1).with_log(-0.5, g1, -1);
        let s = if (g2 - 1.0).abs() <= 1e-12 {
            Self::new(
                base,
                vec![FhSingularity { theta: 0.0, alpha: c(0.0), beta: c(-0.5) }],
                c(1.0),
            )?
        } else if g2 < 1.0 {
            Self::new(base.with_log(0.5, g2, -1).with_log(-0.5, g2, 1), vec![], c(1.0))?
        } else {
            let q = 1.0 / g2;
            Self::new(
                base.with_log(0.5, q, 1).with_log(-0.5, q, -1),
                vec![FhSingularity { theta: 0.0, alpha: c(0.0), beta: c(-1.0) }],
                c(1.0),
            )?
        };
        Ok(s.tagged("onsager", None))
    }

    /// Zero-winding factor of the supercritical row symbol (the row symbol
    /// equals -z^{-1} times this one).
    pub fn onsager_tilde(g1: f64, g2: f64) -> Result<Self> {
        if !(g1 > 0.0 && g1 < 1.0 && g2 > 1.0) {
            return input("onsager_tilde needs 0 < gamma1 < 1 < gamma2");
        }
        let q = 1.0 / g2;
        let sm = SmoothPart::zero()
            .with_log(0.5, g1, 1)
            .with_log(-0.5, g1, -1)
            .with_log(0.5, q, 1)
            .with_log(-0.5, q, -1);
        Ok(Self::new(sm, vec![], c(1.0))?.tagged("onsager_tilde", None))
    }

    /// Indicator of the arc mu <= theta <= 2 pi - mu.
    pub fn char_interval(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < PI) {
            return input("char_interval needs 0 < mu < pi");
        }
        let mut s = Self::new(SmoothPart::zero(), vec![], c(1.0))?
            .tagged("char_interval", Some(ClosedForm::CharInterval { mu }));
        s.arc_gap = Some(mu);
        Ok(s)
    }

    /// Two half-jumps at z = 1 and z = -1: -i on the upper arc, i on the lower.
    pub fn basor_tracy() -> Self {
        Self::new(
            SmoothPart::zero(),
            vec![
                FhSingularity { theta: 0.0, alpha: c(0.0), beta: c(0.5) },
                FhSingularity { theta: PI, alpha: c(0.0), beta: c(-0.5) },
            ],
            c(1.0),
        )
        .unwrap()
        .tagged("bt", Some(ClosedForm::BasorTracy))
    }

    /// |z - e^{it/2}| |z - e^{-it/2}|.
    pub fn lenard(t: f64) -> Result<Self> {
        if !(t > 0.0 && t < TWO_PI) {
            return input("lenard needs 0 < t < 2 pi");
        }
        let s = Self::new(
            SmoothPart::zero(),
            vec![
                FhSingularity { theta: 0.5 * t, alpha: c(0.5), beta: c(0.0) },
                FhSingularity { theta: TWO_PI - 0.5 * t, alpha: c(0.5), beta: c(0.0) },
            ],
            c(1.0),
        )?;
        Ok(s.tagged("lenard", Some(ClosedForm::Lenard { t })))
    }

    /// |z - i|^lambda |z + i|^mu.
    pub fn sym_jac(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda > 0.0 && mu > 0.0) {
            return input("sym_jac needs lambda, mu > 0");
        }
        let s = Self::new(
            SmoothPart::zero(),
            vec![
                FhSingularity { theta: 0.5 * PI, alpha: c(0.5 * lambda), beta: c(0.0) },
                FhSingularity { theta: 1.5 * PI, alpha: c(0.5 * mu), beta: c(0.0) },
            ],
            c(1.0),
        )?;
        Ok(s.tagged("sym_jac", None))
    }

    /// e^{2 pi gamma} on [theta1, theta2), 1 elsewhere.
    pub fn gap(gamma: f64, theta1: f64, theta2: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !(0.0 <= theta1 && theta1 < theta2 && theta2 < TWO_PI) {
            return input("gap needs gamma >= 0 and 0 <= theta1 < theta2 < 2 pi");
        }
        if gamma == 0.0 {
            return Ok(Self::identity());
        }
        let s = Self::new(
            SmoothPart::zero(),
            vec![
                FhSingularity { theta: theta1, alpha: c(0.0), beta: C64::new(0.0, gamma) },
                FhSingularity { theta: theta2, alpha: c(0.0), beta: C64::new(0.0, -gamma) },
            ],
            c((gamma * (theta2 - theta1)).exp()),
        )?;
        Ok(s.tagged("gap", Some(ClosedForm::Gap { gamma, theta1, theta2 })))
    }

    pub fn has_singularities(&self) -> bool {
        self.laurent.is_none() && !self.singularities.is_empty() || self.arc_gap.is_some()
    }

    /// Pointwise value; the jump factor uses the left-closed convention.
    pub fn evaluate(&self, theta: f64) -> Result<C64> {
        if !theta.is_finite() {
            return input("angle must be finite");
        }
        self.eval_core(norm_angle(theta), None)
    }

    /// Value at a quadrature node. Near a singularity the node carries its
    /// offset, so the singular factor keeps full relative accuracy even when
    /// the offset is below the resolution of the absolute angle.
    pub fn evaluate_node(&self, node: &QNode) -> Result<C64> {
        self.eval_core(node.theta, node.near)
    }

    fn eval_core(&self, th: f64, near: Option<(usize, f64)>) -> Result<C64> {
        if let Some(l) = &self.laurent {
            return Ok(l.iter().map(|(&k, &v)| v * C64::from_polar(1.0, k as f64 * th)).sum());
        }
        if let Some(mu) = self.arc_gap {
            return Ok(if th < mu || th > TWO_PI - mu { c(0.0) } else { c(1.0) });
        }
        let mut logv = self.smooth.eval(th);
        for (j, s) in self.singularities.iter().enumerate() {
            let d = match near {
                Some((i, off)) if i == j => off,
                _ => {
                    let d = th - s.theta;
                    if d > PI {
                        d - TWO_PI
                    } else if d <= -PI {
                        d + TWO_PI
                    } else {
                        d
                    }
                }
            };
            if d == 0.0 {
                if s.alpha.re < 0.0 || (s.alpha.re == 0.0 && s.alpha.im != 0.0) {
                    return Err(Error::SingularPoint(s.theta));
                }
                if s.alpha.re > 0.0 {
                    return Ok(c(0.0));
                }
                // left-closed: the value at theta_j is the right-hand limit
                logv += C64::i() * s.beta * (-PI);
                continue;
            }
            if s.alpha != c(0.0) {
                let r = 2.0 * (0.5 * d).sin().abs();
                logv += 2.0 * s.alpha * r.ln();
            }
            let jump = if d > 0.0 { d - PI } else { d + PI };
            logv += C64::i() * s.beta * jump;
        }
        Ok(self.prefactor * logv.exp())
    }

    fn needs_grading(s: &FhSingularity) -> bool {
        let a2 = 2.0 * s.alpha;
        !(a2.im == 0.0 && a2.re >= 0.0 && a2.re.fract() == 0.0)
    }

    /// Quadrature nodes with weights normalised by 2 pi, suited to
    /// frequencies up to `max_freq` and a target accuracy `tol`.
    pub fn quadrature_nodes(&self, max_freq: usize, tol: f64) -> Vec<QNode> {
        let wmax = (PI / 8.0).min(40.0 / (max_freq as f64 + 1.0));
        let mut nodes = self.panel_nodes(tol, wmax, 64, 20);
        for n in nodes.iter_mut() {
            n.w /= TWO_PI;
        }
        nodes
    }

    /// Panels between consecutive breakpoints; geometric grading toward
    /// singularities whose local behaviour is not smooth.
    pub(crate) fn panel_nodes(&self, tol: f64, wmax: f64, m_regular: usize, m_graded: usize) -> Vec<QNode> {
        // (angle, singularity index if grading is needed)
        let mut breaks: Vec<(f64, Option<usize>)> = vec![];
        let zero_idx = self
            .singularities
            .iter()
            .position(|s| s.theta == 0.0)
            .filter(|&i| Self::needs_grading(&self.singularities[i]));
        breaks.push((0.0, zero_idx));
        for (i, s) in self.singularities.iter().enumerate() {
            if s.theta > 0.0 {
                breaks.push((s.theta, Self::needs_grading(s).then_some(i)));
            }
        }
        if let Some(mu) = self.arc_gap {
            breaks.push((mu, None));
            breaks.push((TWO_PI - mu, None));
            breaks.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        }
        breaks.push((TWO_PI, zero_idx));
        let mut nodes = vec![];
        let push_graded = |nodes: &mut Vec<QNode>, idx: usize, at: f64, len: f64, dir: f64| {
            let alpha = self.singularities[idx].alpha;
            for (off, w) in graded_offsets(alpha, len, tol, wmax, m_graded) {
                let th = norm_angle(at + dir * off);
                nodes.push(QNode { theta: th, near: Some((idx, dir * off)), w });
            }
        };
        for w in breaks.windows(2) {
            let (a, sa) = w[0];
            let (b, sb) = w[1];
            if b - a <= 0.0 {
                continue;
            }
            match (sa, sb) {
                (None, None) => {
                    let mut tmp = vec![];
                    uniform_panels(&mut tmp, a, b, wmax, m_regular);
                    nodes.extend(tmp.into_iter().map(|(t, w)| QNode { theta: t, near: None, w }));
                }
                (Some(i), None) => push_graded(&mut nodes, i, a, b - a, 1.0),
                (None, Some(i)) => push_graded(&mut nodes, i, b, b - a, -1.0),
                (Some(i), Some(k)) => {
                    let h = 0.5 * (b - a);
                    push_graded(&mut nodes, i, a, h, 1.0);
                    push_graded(&mut nodes, k, b, h, -1.0);
                }
            }
        }
        nodes
    }

    /// Fourier coefficients for indices lo..=hi (closed forms where known).
    pub fn fourier_coeffs(&self, lo: i64, hi: i64) -> Result<Vec<C64>> {
        if hi < lo {
            return Ok(vec![]);
        }
        if let Some(l) = &self.laurent {
            return Ok((lo..=hi).map(|k| l.get(&k).copied().unwrap_or(c(0.0))).collect());
        }
        if let Some(cf) = self.closed {
            return Ok((lo..=hi).map(|k| closed_coeff(&cf, k)).collect());
        }
        if let Some(v) = self.series_coeffs_dd(lo, hi) {
            return Ok(v.into_iter().map(|z| C64::new(dd_to_f64(z.re), dd_to_f64(z.im))).collect());
        }
        let maxf = lo.unsigned_abs().max(hi.unsigned_abs()) as usize;
        let mut out = self.quadrature_coeffs(lo, hi, maxf, 1e-17)?;
        // Quadrature leaves rounding-level imaginary parts that ill-conditioned
        // determinants (e.g. k^{-n} decay) amplify; drop them when exact.
        if self.has_real_coefficients() {
            for v in out.iter_mut() {
                v.im = 0.0;
            }
        }
        Ok(out)
    }

    /// Coefficients from the power series of the two Wiener-Hopf factors,
    /// for symbols prefactor * e^V * z^m (-1)^m whose only singularities are
    /// integer jumps at theta = 0. None when that form does not apply or the
    /// series would be too long.
    fn series_coeffs_dd(&self, lo: i64, hi: i64) -> Option<Vec<CDD>> {
        if self.laurent.is_some() || self.arc_gap.is_some() {
            return None;
        }
        let mut shift = 0i64;
        for q in &self.singularities {
            if q.theta != 0.0 || q.alpha != c(0.0) || q.beta.im != 0.0 || q.beta.re.fract() != 0.0 {
                return None;
            }
            shift += q.beta.re as i64;
        }
        let (mut plus, mut minus, mut v0) = (vec![], vec![], c(0.0));
        for (&k, &v) in &self.smooth.poly {
            match k.cmp(&0) {
                std::cmp::Ordering::Greater => plus.push((k as usize, v)),
                std::cmp::Ordering::Less => minus.push((k.unsigned_abs() as usize, v)),
                std::cmp::Ordering::Equal => v0 += v,
            }
        }
        let logs = |side: i8| -> Vec<(C64, C64)> {
            self.smooth.logs.iter().filter(|t| t.side == side).map(|t| (t.coeff, t.a)).collect()
        };
        let (lp, lm) = (logs(1), logs(-1));
        let amax = self.smooth.logs.iter().map(|t| t.a.norm()).fold(0.0, f64::max);
        // terms below e^{-80} relative are dropped
        let tail = if amax > 0.0 { (80.0 / -amax.ln()).ceil() } else { 0.0 };
        let reach = |p: &[(usize, C64)]| {
            let deg = p.iter().map(|x| x.0).max().unwrap_or(0) as f64;
            deg * p.iter().map(|&(k, v)| v.norm().powf(1.0 / k as f64)).sum::<f64>()
        };
        let len = tail + 3.0 * reach(&plus).max(reach(&minus)) + 90.0;
        if len > 50_000.0 {
            return None;
        }
        let span = (lo - shift).unsigned_abs().max((hi - shift).unsigned_abs()) as usize;
        let len = len as usize + span;
        let a = exp_series(&plus, &lp, len);
        let b = exp_series(&minus, &lm, len);
        let sign = if shift.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let scale = cdd(self.prefactor * v0.exp() * sign);
        let zero = cdd(c(0.0));
        Some(
            (lo..=hi)
                .map(|k| {
                    let j = k - shift;
                    let mut acc = zero;
                    if j >= 0 {
                        let j = j as usize;
                        for i in 0..=len - j {
                            acc = acc + a[i + j] * b[i];
                        }
                    } else {
                        let j = j.unsigned_abs() as usize;
                        for i in 0..=len - j {
                            acc = acc + a[i] * b[i + j];
                        }
                    }
                    acc * scale
                })
                .collect(),
        )
    }

    /// True when conj(s(theta)) = s(-theta), i.e. every Fourier coefficient
    /// is real. Structural pre-check on the smooth part, then a pointwise
    /// check at irregular angles.
    pub fn has_real_coefficients(&self) -> bool {
        if let Some(l) = &self.laurent {
            return l.values().all(|v| v.im == 0.0);
        }
        let smooth_real = self.smooth.poly.values().all(|v| v.im == 0.0)
            && self.smooth.logs.iter().all(|t| t.coeff.im == 0.0 && t.a.im == 0.0);
        if !smooth_real || self.prefactor.im != 0.0 {
            return false;
        }
        let mirrored = self.singularities.iter().all(|q| {
            let t = norm_angle(-q.theta);
            self.singularities.iter().any(|r| {
                (r.theta - t).abs() < 1e-14 && r.alpha == q.alpha.conj() && r.beta == q.beta.conj()
            })
        });
        if !mirrored {
            return false;
        }
        (0..16).all(|j| {
            let th = 0.3871 + 0.3719 * j as f64;
            match (self.evaluate(th), self.evaluate(TWO_PI - th)) {
                (Ok(a), Ok(b)) => (a.conj() - b).norm() <= 1e-13 * a.norm().max(1e-300),
                _ => false,
            }
        })
    }

    /// Coefficients by panel quadrature, ignoring closed forms.
    pub fn quadrature_coeffs(&self, lo: i64, hi: i64, maxf: usize, tol: f64) -> Result<Vec<C64>> {
        let nodes = self.quadrature_nodes(maxf, tol);
        let mut out = vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for node in &nodes {
            let (th, w) = (node.theta, node.w);
            let f = self.evaluate_node(node)? * w;
            if !f.re.is_finite() || !f.im.is_finite() {
                return Err(Error::Quadrature(format!("non-finite symbol value at {th}")));
            }
            let step = C64::from_polar(1.0, -th);
            let mut e = C64::from_polar(1.0, -(lo as f64) * th);
            for o in out.iter_mut() {
                *o += f * e;
                e *= step;
            }
        }
        Ok(out)
    }

    /// Coefficients in double-double. Closed forms are evaluated in extended
    /// arithmetic where that matters; others are promoted from double.
    pub fn fourier_coeffs_dd(&self, lo: i64, hi: i64) -> Result<Vec<CDD>> {
        let z = dd(0.0);
        if self.laurent.is_some() {
            return Ok(self.fourier_coeffs(lo, hi)?.into_iter().map(|v| CDD::new(dd(v.re), dd(v.im))).collect());
        }
        match self.closed {
            Some(ClosedForm::CharInterval { mu }) => Ok((lo..=hi)
                .map(|k| {
                    if k == 0 {
                        CDD::new(dd(1.0) - dd(mu) / dd_pi(), z)
                    } else {
                        let kk = dd(k as f64);
                        CDD::new(-dd_sin(kk * dd(mu)) / (dd_pi() * kk), z)
                    }
                })
                .collect()),
            Some(ClosedForm::BasorTracy) => Ok((lo..=hi)
                .map(|k| {
                    if k.rem_euclid(2) == 1 {
                        CDD::new(dd(-2.0) / (dd_pi() * dd(k as f64)), z)
                    } else {
                        CDD::new(z, z)
                    }
                })
                .collect()),
            Some(ClosedForm::DiagCritical) => Ok((lo..=hi)
                .map(|k| CDD::new(dd(2.0) / (dd_pi() * dd((2 * k + 1) as f64)), z))
                .collect()),
            None => match self.series_coeffs_dd(lo, hi) {
                Some(v) => Ok(v),
                None => Ok(self
                    .fourier_coeffs(lo, hi)?
                    .into_iter()
                    .map(|v| CDD::new(dd(v.re), dd(v.im)))
                    .collect()),
            },
            _ => Ok(self
                .fourier_coeffs(lo, hi)?
                .into_iter()
                .map(|v| CDD::new(dd(v.re), dd(v.im)))
                .collect()),
        }
    }

    /// Fourier coefficients of log(symbol); needs zero winding and no zeros.
    pub fn log_coeffs(&self, lo: i64, hi: i64) -> Result<Vec<C64>> {
        self.require_root_jump_form()?;
        if self.has_singularities() {
            return Err(Error::Winding(format!(
                "{} has root or jump singularities; log coefficients are undefined",
                self.name
            )));
        }
        let lp = self.prefactor.ln();
        Ok((lo..=hi)
            .map(|k| self.smooth.coeff(k) + if k == 0 { lp } else { c(0.0) })
            .collect())
    }

    /// Maximum imaginary part on a grid of regular points.
    pub fn max_imag_on_grid(&self, m: usize) -> Result<f64> {
        let mut mx: f64 = 0.0;
        for j in 0..m {
            let th = TWO_PI * (j as f64 + 0.5) / m as f64;
            if let Ok(v) = self.evaluate(th) {
                mx = mx.max(v.im.abs());
            }
        }
        Ok(mx)
    }

    /// True if the symbol is real and strictly positive on a regular grid.
    pub fn is_positive(&self) -> bool {
        if self.singularities.iter().any(|s| s.beta != c(0.0)) {
            return false;
        }
        (0..2048).all(|j| {
            let th = TWO_PI * (j as f64 + 0.37) / 2048.0;
            match self.evaluate(th) {
                Ok(v) => v.re > 0.0 && v.im.abs() <= 1e-12 * v.re.abs().max(1.0),
                Err(_) => false,
            }
        })
    }
}

pub(crate) fn uniform_panels(out: &mut Vec<(f64, f64)>, a: f64, b: f64, wmax: f64, m: usize) {
    let k = ((b - a) / wmax).ceil().max(1.0) as usize;
    let r = gauss_legendre(m);
    let h = (b - a) / k as f64;
    for i in 0..k {
        let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
        let (cc, hh) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, w) in r.x.iter().zip(&r.w) {
            out.push((cc + hh * x, w * hh));
        }
    }
}

/// Offsets in (0, len] with weights for a geometric grading (ratio 1/2)
/// toward a singular endpoint with local behaviour |offset|^{2 alpha}.
pub(crate) fn graded_offsets(alpha: C64, len: f64, tol: f64, wmax: f64, m: usize) -> Vec<(f64, f64)> {
    let p = 1.0 + 2.0 * alpha.re;
    let levels = ((tol.ln() / 0.5f64.ln()) / p).ceil().clamp(4.0, 200.0) as usize;
    let mut out = vec![];
    let mut outer = len;
    for _ in 0..levels {
        let inner = 0.5 * outer;
        uniform_panels(&mut out, inner, outer, wmax, m);
        outer = inner;
    }
    uniform_panels(&mut out, 0.0, outer, wmax, m);
    out
}

fn cdd(z: C64) -> CDD {
    CDD::new(dd(z.re), dd(z.im))
}

fn poly_mul(p: &[CDD], q: &[CDD]) -> Vec<CDD> {
    let mut out = vec![cdd(c(0.0)); p.len() + q.len() - 1];
    for (i, x) in p.iter().enumerate() {
        for (j, y) in q.iter().enumerate() {
            out[i + j] = out[i + j] + *x * *y;
        }
    }
    out
}

/// Taylor coefficients 0..=len of exp(P(z) + sum_i c_i log(1 - a_i z)), P
/// without constant term, from the recurrence of Q A' = R A where
/// Q = prod (1 - a_i z) and R = Q P' - sum_i c_i a_i prod_{j != i} (1 - a_j z).
fn exp_series(poly: &[(usize, C64)], logs: &[(C64, C64)], len: usize) -> Vec<CDD> {
    let zero = cdd(c(0.0));
    let one = cdd(c(1.0));
    let factor = |a: C64| [one, -cdd(a)];
    let q = logs.iter().fold(vec![one], |acc, &(_, a)| poly_mul(&acc, &factor(a)));
    let deg = poly.iter().map(|p| p.0).max().unwrap_or(1);
    let mut dp = vec![zero; deg];
    for &(k, v) in poly {
        dp[k - 1] = dp[k - 1] + cdd(v * k as f64);
    }
    let mut r = poly_mul(&q, &dp);
    for (i, &(ci, ai)) in logs.iter().enumerate() {
        let others = logs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(vec![one], |acc, (_, &(_, a))| poly_mul(&acc, &factor(a)));
        if r.len() < others.len() {
            r.resize(others.len(), zero);
        }
        let f = cdd(ci * ai);
        for (m, o) in others.iter().enumerate() {
            r[m] = r[m] - f * *o;
        }
    }
    let mut out = vec![zero; len + 1];
    out[0] = one;
    for k in 0..len {
        let mut s = zero;
        for (m, rm) in r.iter().enumerate().take(k + 1) {
            s = s + *rm * out[k - m];
        }
        for (m, qm) in q.iter().enumerate().skip(1).take(k + 1) {
            s = s - *qm * out[k + 1 - m] * dd((k + 1 - m) as f64);
        }
        out[k + 1] = s / dd((k + 1) as f64);
    }
    out
}

fn closed_coeff(cf: &ClosedForm, k: i64) -> C64 {
    let kf = k as f64;
    match *cf {
        ClosedForm::Identity => c(if k == 0 { 1.0 } else { 0.0 }),
        ClosedForm::Monomial(m) => c(if k == m { 1.0 } else { 0.0 }),
        ClosedForm::DiagCritical => c(2.0 / (PI * (2.0 * kf + 1.0))),
        ClosedForm::CharInterval { mu } => {
            if k == 0 {
                c(1.0 - mu / PI)
            } else {
                c(-(kf * mu).sin() / (PI * kf))
            }
        }
        ClosedForm::BasorTracy => {
            if k.rem_euclid(2) == 1 {
                c(-2.0 / (PI * kf))
            } else {
                c(0.0)
            }
        }
        ClosedForm::Lenard { t } => c(lenard_coeff(t, k.unsigned_abs())),
        ClosedForm::Gap { gamma, theta1, theta2 } => {
            let h = (TWO_PI * gamma).exp();
            if k == 0 {
                c(1.0 + (h - 1.0) * (theta2 - theta1) / TWO_PI)
            } else {
                let e1 = C64::from_polar(1.0, -kf * theta1);
                let e2 = C64::from_polar(1.0, -kf * theta2);
                (h - 1.0) * (e1 - e2) / (C64::new(0.0, TWO_PI * kf))
            }
        }
        ClosedForm::PureFh { alpha, beta } => pure_fh_coeff(alpha, beta, k),
    }
}

/// Fourier coefficient of 2|cos theta - cos(t/2)|.
fn lenard_coeff(t: f64, k: u64) -> f64 {
    let a = 0.5 * t;
    let cc = a.cos();
    let kf = k as f64;
    let i0a = if k == 0 {
        a.sin() - cc * a
    } else {
        let first = if k == 1 { a } else { ((kf - 1.0) * a).sin() / (kf - 1.0) };
        0.5 * first + 0.5 * ((kf + 1.0) * a).sin() / (kf + 1.0) - cc * (kf * a).sin() / kf
    };
    let i0pi = match k {
        0 => -cc * PI,
        1 => 0.5 * PI,
        _ => 0.0,
    };
    (2.0 / PI) * (2.0 * i0a - i0pi)
}

/// (-1)^k Gamma(1+2a) / (Gamma(1+a+b-k) Gamma(1+a-b+k)).
fn pure_fh_coeff(alpha: C64, beta: C64, k: i64) -> C64 {
    let num = match log_gamma(1.0 + 2.0 * alpha) {
        Ok(v) => v,
        Err(_) => return c(f64::NAN),
    };
    let za = 1.0 + alpha + beta - k as f64;
    let zb = 1.0 + alpha - beta + k as f64;
    let (la, lb) = match (log_gamma(za), log_gamma(zb)) {
        (Ok(x), Ok(y)) => (x, y),
        _ => return c(0.0), // reciprocal gamma vanishes at a pole
    };
    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * (num - la - lb).exp()
}

/// A quadrature node; `near` holds (singularity index, signed offset) when
/// the node was placed relative to a singular point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QNode {
    pub theta: f64,
    pub near: Option<(usize, f64)>,
    pub w: f64,
}

/// One root/jump description of a symbol obtained by integer shifts of the
/// jump parameters summing to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FhRepresentation {
    pub shifts: Vec<i64>,
    pub symbol: CircleSymbol,
}

/// The set of representations minimising sum (Re beta_j)^2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepresentationSet {
    pub seminorm: f64,
    pub f_beta: f64,
    pub members: Vec<FhRepresentation>,
    pub degenerate: bool,
}

/// max_{j,k} |Re b_j - Re b_k|, zero for fewer than two points.
pub fn seminorm(betas: &[C64]) -> f64 {
    let mut s: f64 = 0.0;
    for a in betas {
        for b in betas {
            s = s.max((a.re - b.re).abs());
        }
    }
    s
}

impl CircleSymbol {
    /// Apply shifts beta_j -> beta_j + n_j (sum n_j = 0); the factor
    /// prod z_j^{-n_j} is absorbed into V_0.
    pub fn shifted(&self, shifts: &[i64]) -> Result<CircleSymbol> {
        if shifts.len() != self.singularities.len() || shifts.iter().sum::<i64>() != 0 {
            return input("shifts must match the singularities and sum to zero");
        }
        let mut s = self.clone();
        let mut dv = 0.0;
        for (sg, &n) in s.singularities.iter_mut().zip(shifts) {
            sg.beta += n as f64;
            dv += n as f64 * sg.theta;
        }
        *s.smooth.poly.entry(0).or_insert(c(0.0)) += C64::new(0.0, dv);
        if shifts.iter().any(|&n| n != 0) {
            s.closed = s.closed.filter(|_| true);
        }
        Ok(s)
    }

    fn fh_degenerate(&self) -> bool {
        self.singularities.iter().any(|s| {
            [s.alpha + s.beta, s.alpha - s.beta].iter().any(|z| {
                let r = z.re.round();
                r <= -1.0 && (z.re - r).abs() <= 1e-12 && z.im.abs() <= 1e-12
            })
        })
    }

    /// Minimising representations via the shift rule, checked against a
    /// brute-force search over shifts in [-3, 3].
    pub fn fh_representations(&self) -> RepresentationSet {
        let m = self.singularities.len();
        let re: Vec<f64> = self.singularities.iter().map(|s| s.beta.re).collect();
        let cost = |n: &[i64]| -> f64 { re.iter().zip(n).map(|(b, &k)| (b + k as f64).powi(2)).sum() };
        // shift rule: move the largest real part down and the smallest up
        // while the spread exceeds one.
        let mut n0 = vec![0i64; m];
        if m >= 2 {
            loop {
                let vals: Vec<f64> = re.iter().zip(&n0).map(|(b, &k)| b + k as f64).collect();
                let (imax, vmax) = vals.iter().enumerate().fold((0, f64::MIN), |acc, (i, &v)| {
                    if v > acc.1 {
                        (i, v)
                    } else {
                        acc
                    }
                });
                let (imin, vmin) = vals.iter().enumerate().fold((0, f64::MAX), |acc, (i, &v)| {
                    if v < acc.1 {
                        (i, v)
                    } else {
                        acc
                    }
                });
                if vmax - vmin > 1.0 + 1e-12 {
                    n0[imax] -= 1;
                    n0[imin] += 1;
                } else {
                    break;
                }
            }
        }
        let fmin = cost(&n0);
        // all minimisers lie within one unit of the shift-rule point
        let mut members_shifts: Vec<Vec<i64>> = vec![];
        let mut cur = vec![0i64; m];
        enumerate_shifts(m, 1, &mut cur, 0, &mut |d| {
            let n: Vec<i64> = n0.iter().zip(d).map(|(a, b)| a + b).collect();
            if n.iter().sum::<i64>() == 0 && (cost(&n) - fmin).abs() <= 1e-12 {
                members_shifts.push(n);
            }
        });
        members_shifts.sort();
        members_shifts.dedup();
        let members: Vec<FhRepresentation> = members_shifts
            .iter()
            .map(|n| FhRepresentation { shifts: n.clone(), symbol: self.shifted(n).unwrap() })
            .collect();
        let degenerate = members.iter().any(|r| r.symbol.fh_degenerate());
        let betas: Vec<C64> = members[0].symbol.singularities.iter().map(|s| s.beta).collect();
        RepresentationSet { seminorm: seminorm(&betas), f_beta: fmin, members, degenerate }
    }

    /// Brute-force minimiser set over shifts in [-w, w] (for verification).
    pub fn brute_force_minimisers(&self, w: i64) -> (f64, Vec<Vec<i64>>) {
        let m = self.singularities.len();
        let re: Vec<f64> = self.singularities.iter().map(|s| s.beta.re).collect();
        let mut best = f64::INFINITY;
        let mut all: Vec<(f64, Vec<i64>)> = vec![];
        let mut cur = vec![0i64; m];
        enumerate_shifts(m, w, &mut cur, 0, &mut |n| {
            if n.iter().sum::<i64>() == 0 {
                let f: f64 = re.iter().zip(n).map(|(b, &k)| (b + k as f64).powi(2)).sum();
                best = best.min(f);
                all.push((f, n.to_vec()));
            }
        });
        let mut v: Vec<Vec<i64>> =
            all.into_iter().filter(|(f, _)| (f - best).abs() <= 1e-12).map(|x| x.1).collect();
        v.sort();
        (best, v)
    }
}

fn enumerate_shifts(m: usize, w: i64, cur: &mut Vec<i64>, i: usize, f: &mut impl FnMut(&[i64])) {
    if i == m {
        f(cur);
        return;
    }
    for v in -w..=w {
        cur[i] = v;
        enumerate_shifts(m, w, cur, i + 1, f);
    }
}

/// Parse `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return input("empty number");
    }
    let bad = || Error::Input(format!("cannot parse complex number '{s}'"));
    if let Some(body) = t.strip_suffix('i') {
        // find the split between real and imaginary parts: last +/- not after e/E
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let ch = bytes[idx] as char;
            if (ch == '+' || ch == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        let (re_s, im_s) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("", body),
        };
        let im = match im_s {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse::<f64>().map_err(|_| bad())?,
        };
        let re = if re_s.is_empty() { 0.0 } else { re_s.parse::<f64>().map_err(|_| bad())? };
        Ok(C64::new(re, im))
    } else {
        Ok(C64::new(t.parse::<f64>().map_err(|_| bad())?, 0.0))
    }
}

/// Named scalar parameters for builtins.
pub type Params = BTreeMap<String, C64>;

fn real_param(p: &Params, key: &str) -> Result<f64> {
    match p.get(key) {
        Some(v) if v.im == 0.0 => Ok(v.re),
        Some(_) => input(format!("parameter '{key}' must be real")),
        None => input(format!("missing parameter '{key}'")),
    }
}

fn cparam(p: &Params, key: &str, default: Option<C64>) -> Result<C64> {
    match (p.get(key), default) {
        (Some(v), _) => Ok(*v),
        (None, Some(d)) => Ok(d),
        (None, None) => input(format!("missing parameter '{key}'")),
    }
}

pub const BUILTIN_NAMES: &[&str] = &[
    "identity",
    "monomial",
    "exp_cos",
    "ar1",
    "pure_fh",
    "diag",
    "onsager",
    "onsager_tilde",
    "char_interval",
    "bt",
    "lenard",
    "sym_jac",
    "gap",
    "laurent",
];

/// Construct a builtin symbol by name.
pub fn builtin(name: &str, p: &Params) -> Result<CircleSymbol> {
    match name {
        "identity" => Ok(CircleSymbol::identity()),
        "monomial" => Ok(CircleSymbol::monomial(real_param(p, "m")?.round() as i64)),
        "exp_cos" => Ok(CircleSymbol::exp_cos(cparam(p, "t", None)?)),
        "ar1" => CircleSymbol::ar1(real_param(p, "r")?),
        "pure_fh" => CircleSymbol::pure_fh(
            cparam(p, "alpha", Some(c(0.0)))?,
            cparam(p, "beta", Some(c(0.0)))?,
        ),
        "diag" => CircleSymbol::diag(ising_k(p)?),
        "onsager" | "onsager_tilde" => {
            let (g1, g2) = if p.contains_key("gamma1") {
                (real_param(p, "gamma1")?, real_param(p, "gamma2")?)
            } else {
                let ip = crate::ising::IsingParams::new(real_param(p, "chi1")?, real_param(p, "chi2")?)?;
                (ip.gamma1, ip.gamma2)
            };
            if name == "onsager" {
                CircleSymbol::onsager(g1, g2)
            } else {
                CircleSymbol::onsager_tilde(g1, g2)
            }
        }
        "char_interval" => CircleSymbol::char_interval(real_param(p, "mu")?),
        "bt" => Ok(CircleSymbol::basor_tracy()),
        "lenard" => CircleSymbol::lenard(real_param(p, "t")?),
        "sym_jac" => CircleSymbol::sym_jac(real_param(p, "lambda")?, real_param(p, "mu")?),
        "laurent" => {
            let mut terms = vec![];
            for (k, v) in p {
                let idx = k
                    .strip_prefix("c.")
                    .and_then(|i| i.parse::<i64>().ok())
                    .ok_or_else(|| Error::Input(format!("laurent symbols take c.k keys, got '{k}'")))?;
                terms.push((idx, *v));
            }
            Ok(CircleSymbol::laurent(&terms))
        }
        "gap" => CircleSymbol::gap(
            real_param(p, "gamma")?,
            real_param(p, "theta1")?,
            real_param(p, "theta2")?,
        ),
        other => input(format!(
            "unknown builtin symbol '{other}' (known: {})",
            BUILTIN_NAMES.join(", ")
        )),
    }
}

fn ising_k(p: &Params) -> Result<f64> {
    if p.contains_key("k_ons") {
        real_param(p, "k_ons")
    } else {
        let ip = crate::ising::IsingParams::new(real_param(p, "chi1")?, real_param(p, "chi2")?)?;
        Ok(ip.k_ons)
    }
}

/// Parse a key=value symbol description. `kind=fh` builds a general symbol
/// from `prefactor`, `V.k` and `sing.j.theta|alpha|beta` keys; any builtin
/// name is accepted as `kind` with its parameters as further keys.
pub fn parse_symbol_text(text: &str) -> Result<CircleSymbol> {
    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("line {}: expected key=value", ln + 1)))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let kind = kv.remove("kind").unwrap_or_else(|| "fh".into());
    if kind != "fh" {
        let mut p = Params::new();
        for (k, v) in &kv {
            p.insert(k.clone(), parse_complex(v)?);
        }
        return builtin(&kind, &p);
    }
    let mut poly = vec![];
    let mut sings: BTreeMap<usize, [Option<C64>; 3]> = BTreeMap::new();
    let mut prefactor = c(1.0);
    for (k, v) in &kv {
        let val = parse_complex(v)?;
        if k == "prefactor" {
            prefactor = val;
        } else if let Some(idx) = k.strip_prefix("V.") {
            let i: i64 = idx.parse().map_err(|_| Error::Input(format!("bad key '{k}'")))?;
            poly.push((i, val));
        } else if let Some(rest) = k.strip_prefix("sing.") {
            let (j, field) =
                rest.split_once('.').ok_or_else(|| Error::Input(format!("bad key '{k}'")))?;
            let j: usize = j.parse().map_err(|_| Error::Input(format!("bad key '{k}'")))?;
            let slot = sings.entry(j).or_insert([None; 3]);
            match field {
                "theta" => slot[0] = Some(val),
                "alpha" => slot[1] = Some(val),
                "beta" => slot[2] = Some(val),
                _ => return input(format!("bad key '{k}'")),
            }
        } else {
            return input(format!("unknown key '{k}'"));
        }
    }
    let mut list = vec![];
    for (j, s) in sings {
        let theta = s[0].ok_or_else(|| Error::Input(format!("sing.{j}.theta missing")))?;
        if theta.im != 0.0 {
            return input("singularity angles must be real");
        }
        list.push(FhSingularity {
            theta: theta.re,
            alpha: s[1].unwrap_or(c(0.0)),
            beta: s[2].unwrap_or(c(0.0)),
        });
    }
    CircleSymbol::new(SmoothPart::from_poly(&poly), list, prefactor)
}
