//! Two-dimensional Ising quantities through Toeplitz determinants.

use crate::error::{input, Result};
use crate::exactdet::{toeplitz_det, DetOptions};
use crate::linalg::LogDet;
use crate::precision::{Precision, C64};
use crate::quadrature::integrate;
use crate::specialfn::{log_gamma, GLAISHER_A};
use crate::symbols::CircleSymbol;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingParams {
    pub chi1: f64,
    pub chi2: f64,
    pub z1: f64,
    pub z2: f64,
    pub z2_star: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub k_ons: f64,
    /// Only defined for equal couplings.
    pub kappa: Option<f64>,
    pub regime: Regime,
}

impl IsingParams {
    pub fn new(chi1: f64, chi2: f64) -> Result<Self> {
        if !(chi1 > 0.0 && chi2 > 0.0) || !chi1.is_finite() || !chi2.is_finite() {
            return input("couplings must be positive and finite");
        }
        let z1 = chi1.tanh();
        let z2 = chi2.tanh();
        let z2_star = (-2.0 * chi2).exp();
        let prod = (2.0 * chi1).sinh() * (2.0 * chi2).sinh();
        let k_ons = 1.0 / prod;
        let regime = if (prod - 1.0).abs() <= BOUNDARY_TOL {
            Regime::Critical
        } else if prod > 1.0 {
            Regime::Subcritical
        } else {
            Regime::Supercritical
        };
        let kappa = (chi1 == chi2).then(|| {
            let c = (2.0 * chi1).cosh();
            2.0 * (2.0 * chi1).sinh() / (c * c)
        });
        Ok(IsingParams {
            chi1,
            chi2,
            z1,
            z2,
            z2_star,
            gamma1: z1 * z2_star,
            gamma2: z2_star / z1,
            k_ons,
            kappa,
            regime,
        })
    }

    /// Equal couplings at the critical point, sinh(2 chi) = 1.
    pub fn symmetric_critical() -> Self {
        let chi = 0.5 * 1f64.asinh();
        Self::new(chi, chi).unwrap()
    }

    /// Equal couplings with a prescribed Onsager modulus.
    pub fn symmetric_with_k(k_ons: f64) -> Result<Self> {
        if !(k_ons > 0.0) {
            return input("k_ons must be positive");
        }
        let chi = 0.5 * (1.0 / k_ons.sqrt()).asinh();
        Self::new(chi, chi)
    }

    fn row_symbol(&self) -> Result<CircleSymbol> {
        let g2 = if self.regime == Regime::Critical { 1.0 } else { self.gamma2 };
        CircleSymbol::onsager(self.gamma1, g2)
    }

    fn diag_symbol(&self) -> Result<CircleSymbol> {
        let k = if self.regime == Regime::Critical { 1.0 } else { self.k_ons };
        CircleSymbol::diag(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationKind {
    Row,
    Diag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Toeplitz,
    GammaProduct,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub n: usize,
    pub value: f64,
    pub route: Route,
    pub logdet: LogDet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeEnergyForm {
    DoubleIntegral,
    SingleIntegral,
}

/// -F/(k_B T) per spin for equal couplings.
pub fn free_energy(p: &IsingParams, form: FreeEnergyForm) -> Result<f64> {
    let kappa = match p.kappa {
        Some(k) => k,
        None => return input("free energy formula needs equal couplings"),
    };
    let base = (2.0 * (2.0 * p.chi1).cosh()).ln();
    Ok(base + free_energy_integral(kappa, form)?)
}

/// The integral term alone, as a function of kappa in [0, 1].
pub fn free_energy_integral(kappa: f64, form: FreeEnergyForm) -> Result<f64> {
    if !(0.0..=1.0).contains(&kappa) {
        return input("kappa must lie in [0, 1]");
    }
    if kappa == 0.0 {
        return Ok(0.0);
    }
    match form {
        FreeEnergyForm::SingleIntegral => {
            let f = |phi: f64| {
                let s = phi.sin();
                (0.5 * (1.0 + (1.0 - kappa * kappa * s * s).max(0.0).sqrt())).ln()
            };
            let total = integrate(f, 0.0, 0.5 * PI, 1e-14)? + integrate(f, 0.5 * PI, PI, 1e-14)?;
            Ok(total / (2.0 * PI))
        }
        FreeEnergyForm::DoubleIntegral => {
            let mut err = None;
            let outer = integrate(
                |p1: f64| {
                    let c1 = p1.cos();
                    let inner = integrate(
                        |p2: f64| (1.0 - 0.5 * kappa * (c1 + p2.cos())).ln(),
                        0.0,
                        PI,
                        1e-14,
                    );
                    match inner {
                        Ok(v) => v,
                        Err(e) => {
                            err = Some(e);
                            0.0
                        }
                    }
                },
                0.0,
                PI,
                1e-13,
            )?;
            if let Some(e) = err {
                return Err(e);
            }
            Ok(outer / (2.0 * PI * PI))
        }
    }
}

/// Spin-spin correlation at distance n along a row or the diagonal.
pub fn correlation(
    p: &IsingParams,
    kind: CorrelationKind,
    n: usize,
    route: Route,
) -> Result<CorrelationResult> {
    if n == 0 {
        return input("n must be positive");
    }
    if route == Route::GammaProduct {
        if kind != CorrelationKind::Diag || p.regime != Regime::Critical {
            return input("the gamma-product route is only available on the critical diagonal");
        }
        let ld = critical_diag_product(n);
        return Ok(CorrelationResult { n, value: ld.value().re, route, logdet: ld });
    }
    let sym = match kind {
        CorrelationKind::Row => p.row_symbol()?,
        CorrelationKind::Diag => p.diag_symbol()?,
    };
    let mut ld = toeplitz_det(&sym, n, &DetOptions::default())?;
    // Small determinants of O(1) matrices come from cancellation; redo them
    // in double-double.
    if ld.log_modulus.abs() > 600.0 || ld.log_modulus < -20.0 {
        ld = toeplitz_det(&sym, n, &DetOptions { precision: Precision::Extended })?;
    }
    Ok(CorrelationResult { n, value: ld.value().re, route, logdet: ld })
}

/// (2/pi) prod_{q=1}^{n-1} Gamma(q+1)^2 / (Gamma(q+1/2) Gamma(q+3/2)).
pub fn critical_diag_product(n: usize) -> LogDet {
    let lg = |x: f64| log_gamma(x.into()).unwrap().re;
    let mut s = (2.0 / PI).ln();
    for q in 1..n {
        let q = q as f64;
        s += 2.0 * lg(q + 1.0) - lg(q + 0.5) - lg(q + 1.5);
    }
    LogDet::from_log(C64::new(s, 0.0))
}

/// (2/(3 pi)) prod_{q=1}^{n-1} Gamma(q+1)^2 / (Gamma(q-1/2) Gamma(q+5/2)).
pub fn critical_diag_product_tilde(n: usize) -> LogDet {
    let lg = |x: f64| log_gamma(x.into()).unwrap().re;
    let mut s = (2.0 / (3.0 * PI)).ln();
    for q in 1..n {
        let q = q as f64;
        // Gamma(q - 1/2) is negative at q = 0 only; here q >= 1
        s += 2.0 * lg(q + 1.0) - lg(q - 0.5) - lg(q + 2.5);
    }
    LogDet::from_log(C64::new(s, 0.0))
}

pub fn magnetization(p: &IsingParams) -> f64 {
    if p.regime == Regime::Subcritical && p.k_ons < 1.0 {
        (1.0 - p.k_ons * p.k_ons).powf(0.125)
    } else {
        0.0
    }
}

/// e^{1/4} 2^{1/12} A^{-3}.
pub fn critical_amplitude() -> f64 {
    0.25f64.exp() * 2f64.powf(1.0 / 12.0) * GLAISHER_A.powi(-3)
}

/// Leading large-n behaviour of the correlation.
pub fn wu_leading(p: &IsingParams, kind: CorrelationKind, n: usize) -> Result<f64> {
    if n == 0 {
        return input("n must be positive");
    }
    let nf = n as f64;
    let (g1, g2, k) = (p.gamma1, p.gamma2, p.k_ons);
    Ok(match (kind, p.regime) {
        (CorrelationKind::Row, Regime::Subcritical) => {
            let corr = g2.powf(2.0 * nf) / (2.0 * PI * nf * nf * (1.0 / g2 - g2).powi(2));
            (1.0 - k * k).powf(0.25) * (1.0 + corr)
        }
        (CorrelationKind::Row, Regime::Critical) => {
            critical_amplitude() * nf.powf(-0.25) * ((1.0 + g1) / (1.0 - g1)).powf(0.25)
        }
        (CorrelationKind::Row, Regime::Supercritical) => {
            (PI * nf).powf(-0.5)
                * g2.powf(-nf)
                * (1.0 - g1 * g1).powf(0.25)
                * (1.0 - g2.powi(-2)).powf(-0.25)
                * (1.0 - g1 * g2).abs().powf(-0.5)
        }
        (CorrelationKind::Diag, Regime::Subcritical) => (1.0 - k * k).powf(0.25),
        (CorrelationKind::Diag, Regime::Critical) => critical_amplitude() * nf.powf(-0.25),
        (CorrelationKind::Diag, Regime::Supercritical) => {
            (PI * nf).powf(-0.5) * k.powf(-nf) * (1.0 - k.powi(-2)).powf(-0.25)
        }
    })
}

/// The sub-leading critical diagonal law n^{-1/4} (1 - 1/(64 n^2)).
pub fn critical_diag_corrected(n: usize) -> f64 {
    let nf = n as f64;
    critical_amplitude() * nf.powf(-0.25) * (1.0 - 1.0 / (64.0 * nf * nf))
}
