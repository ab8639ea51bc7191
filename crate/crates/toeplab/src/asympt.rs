//! Large-n predictions for Toeplitz, Hankel and Toeplitz+Hankel determinants.

use crate::error::{input, Error, Result};
use crate::exactdet::{JacobiWeight, StructuredKind};
use crate::linalg::LogDet;
use crate::precision::C64;
use crate::specialfn::{log_barnes_g, log_gamma};
use crate::symbols::CircleSymbol;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One term exp(q n^2 + a n + p log n + c). `a` and `c` are `None` when the
/// corresponding constant is not known in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionTerm {
    #[serde(skip_serializing_if = "is_zero")]
    #[serde(default)]
    pub quadratic: C64,
    pub a: Option<C64>,
    pub p: C64,
    pub c: Option<C64>,
}

fn is_zero(z: &C64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub terms: Vec<PredictionTerm>,
    pub error_order: String,
    /// Names of constants that are left unevaluated.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    #[serde(default)]
    pub unknown_constants: Vec<String>,
}

impl AsymptoticPrediction {
    /// Complex logarithm of each term at n.
    pub fn term_logs(&self, n: usize) -> Result<Vec<C64>> {
        let nf = n as f64;
        self.terms
            .iter()
            .map(|t| match (t.a, t.c) {
                (Some(a), Some(c)) => Ok(t.quadratic * nf * nf + a * nf + t.p * nf.ln() + c),
                _ => Err(Error::Input(format!(
                    "prediction has unknown constants: {}",
                    self.unknown_constants.join(", ")
                ))),
            })
            .collect()
    }

    /// Sum of all terms at n.
    pub fn evaluate(&self, n: usize) -> Result<LogDet> {
        let logs = self.term_logs(n)?;
        let m = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        if !m.is_finite() {
            return Ok(LogDet::zero());
        }
        let s: C64 = logs.iter().map(|l| (l - m).exp()).sum();
        if s.norm() <= 1e-14 * logs.len() as f64 {
            return Ok(LogDet::zero());
        }
        Ok(LogDet::from_value(s).mul(LogDet::from_log(C64::new(m, 0.0))))
    }
}

const DEGENERACY_TOL: f64 = 1e-12;

fn neg_integer(z: C64) -> bool {
    let r = z.re.round();
    r <= -1.0 && (z.re - r).abs() <= DEGENERACY_TOL && z.im.abs() <= DEGENERACY_TOL
}

/// Strong Szegő / Fisher-Hartwig prediction for one root/jump representation.
pub fn szego_fh_predict(s: &CircleSymbol) -> Result<AsymptoticPrediction> {
    s.require_root_jump_form()?;
    if s.arc_gap.is_some() {
        return input("symbols vanishing on an arc are not of root/jump type");
    }
    for q in &s.singularities {
        if neg_integer(q.alpha + q.beta) || neg_integer(q.alpha - q.beta) {
            return Err(Error::Degenerate(format!(
                "alpha +- beta is a negative integer at theta = {}",
                q.theta
            )));
        }
    }
    let sm = &s.smooth;
    let a = sm.v0() + s.prefactor.ln();
    let mut p = C64::new(0.0, 0.0);
    let mut c = sm.sslt_constant();
    let sings = &s.singularities;
    for q in sings {
        let z = C64::from_polar(1.0, q.theta);
        p += q.alpha * q.alpha - q.beta * q.beta;
        c += (q.beta - q.alpha) * sm.half_sum(z, 1) + (-q.alpha - q.beta) * sm.half_sum(z, -1);
        c += log_barnes_g(1.0 + q.alpha + q.beta)? + log_barnes_g(1.0 + q.alpha - q.beta)?
            - log_barnes_g(1.0 + 2.0 * q.alpha)?;
    }
    for j in 0..sings.len() {
        for k in j + 1..sings.len() {
            let (sj, sk) = (&sings[j], &sings[k]);
            let dist = 2.0 * (0.5 * (sk.theta - sj.theta)).sin().abs();
            c += 2.0 * (sj.beta * sk.beta - sj.alpha * sk.alpha) * dist.ln();
            c += C64::i() * (sk.theta - sj.theta - PI) * (sj.alpha * sk.beta - sk.alpha * sj.beta);
        }
    }
    let semi = crate::symbols::seminorm(&sings.iter().map(|q| q.beta).collect::<Vec<_>>());
    Ok(AsymptoticPrediction {
        terms: vec![PredictionTerm { quadratic: C64::new(0.0, 0.0), a: Some(a), p, c: Some(c) }],
        error_order: if sings.is_empty() {
            "relative o(1), exponentially small for analytic symbols".into()
        } else {
            format!("relative O(n^{:.4})", semi - 1.0)
        },
        unknown_constants: vec![],
    })
}

/// Sum over all minimising representations.
pub fn bt_predict(s: &CircleSymbol) -> Result<AsymptoticPrediction> {
    s.require_root_jump_form()?;
    if s.arc_gap.is_some() {
        return input("symbols vanishing on an arc are not of root/jump type");
    }
    let set = s.fh_representations();
    if set.degenerate {
        return Err(Error::Degenerate("a minimising representation is degenerate".into()));
    }
    let mut terms = vec![];
    for m in &set.members {
        terms.extend(szego_fh_predict(&m.symbol)?.terms);
    }
    Ok(AsymptoticPrediction {
        terms,
        error_order: "relative o(1) for each term".into(),
        unknown_constants: vec![],
    })
}

/// Exact determinant for a single pure singularity at z = 1.
pub fn bs_exact(alpha: C64, beta: C64, n: usize) -> Result<LogDet> {
    if alpha.re <= -0.5 {
        return input("Re alpha must exceed -1/2");
    }
    if neg_integer(alpha + beta) || neg_integer(alpha - beta) {
        return Err(Error::BarnesZero((alpha + beta).re.min((alpha - beta).re)));
    }
    if n == 0 {
        return Ok(LogDet::one());
    }
    let g = log_barnes_g;
    let nf = n as f64;
    let l = g(1.0 + alpha + beta)? + g(1.0 + alpha - beta)? - g(1.0 + 2.0 * alpha)?
        + g(C64::new(nf + 1.0, 0.0))?
        + g(nf + 1.0 + 2.0 * alpha)?
        - g(nf + 1.0 + alpha + beta)?
        - g(nf + 1.0 + alpha - beta)?;
    Ok(LogDet::from_log(l))
}

/// The closed-form multiple integral with interaction exponent gamma.
pub fn selberg_value(n: usize, alpha: C64, beta: C64, gamma: C64) -> Result<C64> {
    if n == 0 {
        return input("n must be positive");
    }
    if alpha.re <= -0.5 {
        return input("Re alpha must exceed -1/2");
    }
    let nf = n as f64;
    let mut bound = 1.0 / nf;
    if n > 1 {
        bound = bound.min((2.0 * alpha.re + 1.0) / (nf - 1.0));
    }
    if gamma.re <= -bound {
        return input("Re gamma is below the convergence bound");
    }
    let lg = log_gamma;
    let mut l = C64::new(0.0, 0.0);
    for j in 0..n {
        let jg = gamma * j as f64;
        l += lg(1.0 + 2.0 * alpha + jg)? + lg(1.0 + gamma * (j + 1) as f64)?
            - lg(1.0 + alpha + beta + jg)?
            - lg(1.0 + alpha - beta + jg)?
            - lg(1.0 + gamma)?;
    }
    Ok(l.exp())
}

/// Input for [`hankel_th_predict`].
#[derive(Clone, Debug)]
pub enum StructuredPredictInput {
    Weight(JacobiWeight),
    Symbol(CircleSymbol),
}

/// Exponents for Hankel and Toeplitz+Hankel determinants. The multiplicative
/// constants are not available in closed form and are reported as unknown.
pub fn hankel_th_predict(
    kind: StructuredKind,
    inp: &StructuredPredictInput,
) -> Result<AsymptoticPrediction> {
    match (kind, inp) {
        (StructuredKind::Hankel, StructuredPredictInput::Weight(w)) => {
            let mut p = -0.25 + 2.0 * (w.alpha_right * w.alpha_right + w.alpha_left * w.alpha_left);
            for q in &w.interior {
                if (q.beta.re.abs() - 0.5).abs() <= DEGENERACY_TOL {
                    return input(
                        "Re beta = 1/2 gives two competing representations; \
                         use the multi-term predictor on the circle symbol",
                    );
                }
                p += q.alpha * q.alpha - q.beta * q.beta;
            }
            Ok(AsymptoticPrediction {
                terms: vec![PredictionTerm {
                    quadratic: C64::new(-(2f64.ln()), 0.0),
                    a: None,
                    p,
                    c: None,
                }],
                error_order: "relative o(1)".into(),
                unknown_constants: vec!["G_H".into(), "E_H".into()],
            })
        }
        (StructuredKind::ThPlus0, StructuredPredictInput::Symbol(s)) => {
            let coeffs = s.fourier_coeffs(-4, 4)?;
            for k in 1..=4 {
                if (coeffs[4 + k] - coeffs[4 - k]).norm() > 1e-9 * coeffs[4].norm().max(1e-300) {
                    return input("Toeplitz+Hankel prediction needs an even symbol");
                }
            }
            let at = |t: f64| {
                s.singularities
                    .iter()
                    .find(|q| (q.theta - t).abs() < 1e-14)
                    .map(|q| q.alpha)
                    .unwrap_or_default()
            };
            let (a0, a1) = (at(0.0), at(PI));
            let mut p = 0.5 * (a0 * a0 + a1 * a1 - a0 - a1);
            for q in s.singularities.iter().filter(|q| q.theta > 0.0 && q.theta < PI) {
                if (q.beta.re.abs() - 0.5).abs() <= DEGENERACY_TOL || q.beta.re.abs() > 0.5 {
                    return input("interior jumps need Re beta in (-1/2, 1/2)");
                }
                p += q.alpha * q.alpha - q.beta * q.beta;
            }
            Ok(AsymptoticPrediction {
                terms: vec![PredictionTerm { quadratic: C64::new(0.0, 0.0), a: None, p, c: None }],
                error_order: "relative o(1)".into(),
                unknown_constants: vec!["G_T+H".into(), "E_T+H".into()],
            })
        }
        (StructuredKind::Hankel, StructuredPredictInput::Symbol(_)) => {
            input("Hankel predictions take a weight on [-1, 1]")
        }
        (StructuredKind::ThPlus0, StructuredPredictInput::Weight(_)) => {
            input("Toeplitz+Hankel predictions take an even circle symbol")
        }
        _ => input("only the hankel and th_plus_0 exponents are available"),
    }
}
