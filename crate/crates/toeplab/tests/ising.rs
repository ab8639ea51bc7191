use proptest::prelude::*;
use std::f64::consts::PI;
use toeplab::exactdet::{toeplitz_det, DetOptions};
use toeplab::ising::*;
use toeplab::specialfn::GLAISHER_A;
use toeplab::CircleSymbol;

fn corr(p: &IsingParams, kind: CorrelationKind, n: usize) -> CorrelationResult {
    correlation(p, kind, n, Route::Toeplitz).unwrap()
}

#[test]
fn parameter_examples() {
    let chi = 0.5 * 1f64.asinh();
    let p = IsingParams::new(chi, chi).unwrap();
    assert_eq!(p.regime, Regime::Critical);
    assert!((p.gamma1 - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-14);
    assert_eq!(IsingParams::symmetric_critical(), p);

    let cold = IsingParams::new(1.5, 1.5).unwrap();
    assert!(cold.k_ons < 1.0);
    assert_eq!(cold.regime, Regime::Subcritical);
    let hot = IsingParams::new(0.2, 0.3).unwrap();
    assert_eq!(hot.regime, Regime::Supercritical);
    assert!(hot.kappa.is_none());

    assert!(IsingParams::new(0.0, 1.0).is_err());
    assert!(IsingParams::new(-1.0, 1.0).is_err());
    assert!(IsingParams::new(f64::INFINITY, 1.0).is_err());
}

#[test]
fn prescribed_modulus() {
    for k in [0.3, 1.0, 2.0] {
        let p = IsingParams::symmetric_with_k(k).unwrap();
        assert!((p.k_ons - k).abs() < 1e-12);
    }
}

#[test]
fn free_energy_forms_agree() {
    for kappa in [0.5, 0.9] {
        let a = free_energy_integral(kappa, FreeEnergyForm::SingleIntegral).unwrap();
        let b = free_energy_integral(kappa, FreeEnergyForm::DoubleIntegral).unwrap();
        assert!((a - b).abs() < 1e-10, "kappa = {kappa}: {a} vs {b}");
    }
    assert_eq!(free_energy_integral(0.0, FreeEnergyForm::SingleIntegral).unwrap(), 0.0);
    assert_eq!(free_energy_integral(0.0, FreeEnergyForm::DoubleIntegral).unwrap(), 0.0);
    let crit = free_energy_integral(1.0, FreeEnergyForm::SingleIntegral).unwrap();
    assert!(crit.is_finite());
    assert!(free_energy_integral(1.5, FreeEnergyForm::SingleIntegral).is_err());

    let p = IsingParams::new(0.4, 0.4).unwrap();
    let f = free_energy(&p, FreeEnergyForm::SingleIntegral).unwrap();
    let base = (2.0 * 0.8f64.cosh()).ln();
    let want = base + free_energy_integral(p.kappa.unwrap(), FreeEnergyForm::SingleIntegral).unwrap();
    assert!((f - want).abs() < 1e-15);
    assert!(free_energy(&IsingParams::new(0.4, 0.5).unwrap(), FreeEnergyForm::SingleIntegral).is_err());
}

#[test]
fn trivial_diag_symbol() {
    let s = CircleSymbol::diag(0.0).unwrap();
    for n in [1, 10, 50] {
        let d = toeplitz_det(&s, n, &DetOptions::default()).unwrap();
        assert!((d.value().re - 1.0).abs() < 1e-15);
    }
}

#[test]
fn critical_diag_gamma_product() {
    let p = IsingParams::symmetric_critical();
    let a = correlation(&p, CorrelationKind::Diag, 20, Route::GammaProduct).unwrap();
    let b = corr(&p, CorrelationKind::Diag, 20);
    assert!(a.logdet.rel_diff(&b.logdet) < 1e-9);
    // the companion product is finite and positive
    assert!(critical_diag_product_tilde(20).value().re > 0.0);
    let hot = IsingParams::symmetric_with_k(2.0).unwrap();
    assert!(correlation(&hot, CorrelationKind::Diag, 5, Route::GammaProduct).is_err());
    assert!(correlation(&p, CorrelationKind::Row, 5, Route::GammaProduct).is_err());
    assert!(correlation(&p, CorrelationKind::Row, 0, Route::Toeplitz).is_err());
}

#[test]
fn subcritical_diag_limit() {
    let p = IsingParams::symmetric_with_k(0.5).unwrap();
    let v = corr(&p, CorrelationKind::Diag, 40).value;
    assert!((v - 0.75f64.powf(0.25)).abs() < 1e-6);
}

#[test]
fn magnetization_examples() {
    let p = IsingParams::symmetric_with_k(0.6).unwrap();
    assert!((magnetization(&p) - 0.64f64.powf(0.125)).abs() < 1e-12);
    for k in [1.0, 1.5] {
        assert_eq!(magnetization(&IsingParams::symmetric_with_k(k).unwrap()), 0.0);
    }
    let frozen = IsingParams::new(20.0, 20.0).unwrap();
    assert!((magnetization(&frozen) - 1.0).abs() < 1e-15);
}

#[test]
fn leading_order_formulas() {
    let p = IsingParams::symmetric_critical();
    for n in [4, 25] {
        let want = 0.25f64.exp() * 2f64.powf(5.0 / 24.0) * GLAISHER_A.powi(-3) * (n as f64).powf(-0.25);
        assert!((wu_leading(&p, CorrelationKind::Row, n).unwrap() / want - 1.0).abs() < 1e-13);
    }
    let sub = IsingParams::symmetric_with_k(0.7).unwrap();
    let n = 6;
    let g2 = sub.gamma2;
    let m2 = magnetization(&sub).powi(2);
    let want = m2 * (1.0 + g2.powi(2 * n as i32) / (2.0 * PI * (n * n) as f64 * (1.0 / g2 - g2).powi(2)));
    assert!((wu_leading(&sub, CorrelationKind::Row, n).unwrap() / want - 1.0).abs() < 1e-13);
    assert!(wu_leading(&sub, CorrelationKind::Row, 0).is_err());
}

#[test]
fn supercritical_diag_against_leading_order() {
    let p = IsingParams::symmetric_with_k(2.0).unwrap();
    let exact = corr(&p, CorrelationKind::Diag, 30).value;
    let lead = wu_leading(&p, CorrelationKind::Diag, 30).unwrap();
    assert!((exact / lead - 1.0).abs() < 0.05, "{exact} vs {lead}");
}

#[test]
fn supercritical_row_against_leading_order() {
    let p = IsingParams::new(0.3, 0.25).unwrap();
    let ratio = |n: usize| corr(&p, CorrelationKind::Row, n).value / wu_leading(&p, CorrelationKind::Row, n).unwrap();
    let (r10, r40) = (ratio(10), ratio(40));
    assert!((r40 - 1.0).abs() < (r10 - 1.0).abs());
    assert!((r40 - 1.0).abs() < 0.05, "ratio {r40}");
}

#[test]
fn row_correlation_approaches_squared_magnetization() {
    let p = IsingParams::symmetric_with_k(0.8).unwrap();
    let m2 = magnetization(&p).powi(2);
    let mut prev = f64::INFINITY;
    for n in (10..=60).step_by(10) {
        let gap = (corr(&p, CorrelationKind::Row, n).value - m2).abs();
        assert!(gap < prev || gap < 1e-13, "n = {n}");
        prev = gap;
    }
    assert!(prev < 1e-8);
}

#[test]
fn onsager_szego_constant_closed_form() {
    let p = IsingParams::symmetric_with_k(0.6).unwrap();
    let s = CircleSymbol::onsager(p.gamma1, p.gamma2).unwrap();
    let (g1, g2) = (p.gamma1, p.gamma2);
    let want = 0.25 * ((1.0 - g1 * g1) * (1.0 - g2 * g2) / (1.0 - g1 * g2).powi(2)).ln();
    let e = s.smooth.sslt_constant();
    assert!((e.re - want).abs() < 1e-10 && e.im.abs() < 1e-14);
}

#[test]
fn critical_diag_decay_and_correction() {
    let p = IsingParams::symmetric_critical();
    for n in [8usize, 16, 32] {
        let v = corr(&p, CorrelationKind::Diag, n).value;
        let lead = critical_amplitude() * (n as f64).powf(-0.25);
        let corrected = critical_diag_corrected(n);
        let first = 1.0 / (64.0 * (n * n) as f64);
        assert!((v / lead - 1.0 + first).abs() < 0.1 * first, "n = {n}");
        assert!((v - corrected).abs() < (v - lead).abs());
    }
    assert!((critical_amplitude() - 0.6450024485095770847).abs() < 1e-14);
}

#[test]
fn correlations_are_real() {
    let params = [
        IsingParams::symmetric_with_k(0.6).unwrap(),
        IsingParams::symmetric_critical(),
        IsingParams::new(0.3, 0.25).unwrap(),
        IsingParams::new(0.7, 0.4).unwrap(),
    ];
    for p in &params {
        for kind in [CorrelationKind::Row, CorrelationKind::Diag] {
            for n in [3, 12, 30] {
                let r = corr(p, kind, n);
                let ph = r.logdet.phase.abs();
                assert!(ph < 1e-10 || (ph - PI).abs() < 1e-10, "{kind:?} n = {n}: {ph}");
                assert_eq!(r.n, n);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn regime_dichotomy(chi1 in 0.01f64..3.0, chi2 in 0.01f64..3.0) {
        let p = IsingParams::new(chi1, chi2).unwrap();
        prop_assert!(p.gamma1 > 0.0 && p.gamma1 < 1.0);
        prop_assert!(p.gamma1 < p.gamma2);
        match p.regime {
            Regime::Subcritical => prop_assert!(p.gamma2 < 1.0 && p.k_ons < 1.0),
            Regime::Supercritical => prop_assert!(p.gamma2 > 1.0 && p.k_ons > 1.0),
            Regime::Critical => prop_assert!((p.gamma2 - 1.0).abs() < 1e-10),
        }
    }
}
