use std::f64::consts::PI;
use toeplab::eigen::*;
use toeplab::{CircleSymbol, C64};

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// 2 - 2 cos theta
fn laplacian() -> CircleSymbol {
    CircleSymbol::laurent(&[(0, r(2.0)), (1, r(-1.0)), (-1, r(-1.0))])
}

/// 2 - 2 cos theta + 2 c cos 2 theta
fn with_second_harmonic(c: f64) -> CircleSymbol {
    CircleSymbol::laurent(&[(0, r(2.0)), (1, r(-1.0)), (-1, r(-1.0)), (2, r(c)), (-2, r(c))])
}

#[test]
fn laplacian_spectrum_is_classical() {
    for n in [10, 37] {
        let ev = toeplitz_eigenvalues(&laplacian(), n).unwrap().eigenvalues;
        for (k, l) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((l - want).abs() < 1e-12);
        }
    }
}

#[test]
fn constant_symbol() {
    let s = CircleSymbol::laurent(&[(0, r(3.0))]);
    let ev = toeplitz_eigenvalues(&s, 12).unwrap().eigenvalues;
    assert!(ev.iter().all(|l| (l - 3.0).abs() < 1e-14));
}

#[test]
fn characteristic_interval_spectrum() {
    let s = CircleSymbol::char_interval(1.0).unwrap();
    let n = 120;
    let rep = toeplitz_eigenvalues(&s, n).unwrap();
    assert!(rep.eigenvalues.iter().all(|&l| l > -1e-10 && l < 1.0 + 1e-10));
    let near_ends = rep.eigenvalues.iter().filter(|&&l| !(0.05..=0.95).contains(&l)).count();
    assert!(near_ends as f64 > 0.8 * n as f64, "{near_ends}");
    assert_eq!(rep.symbol_range, (0.0, 1.0));
}

#[test]
fn complex_symbols_are_refused() {
    assert!(toeplitz_eigenvalues(&CircleSymbol::basor_tracy(), 8).is_err());
    assert!(toeplitz_eigenvalues(&CircleSymbol::exp_cos(C64::new(0.0, 0.3)), 8).is_err());
    assert!(toeplitz_eigenvalues(&laplacian(), 0).is_err());
}

#[test]
fn bulk_location_for_the_laplacian() {
    let b = bulk_prediction(&laplacian(), 0.5, 100).unwrap();
    assert!((b.lambda_x - 2.0).abs() < 1e-10);
    for x in [0.1, 0.3, 0.77] {
        let b = bulk_prediction(&laplacian(), x, 100).unwrap();
        // psi(lambda) = arccos(1 - lambda / 2)
        assert!(((1.0 - b.lambda_x / 2.0).acos() - PI * x).abs() < 1e-9);
    }
    // k/(n+1) = x exactly: the prediction is the eigenvalue itself
    let (n, k) = (9, 3);
    let ev = toeplitz_eigenvalues(&laplacian(), n).unwrap().eigenvalues;
    let b = bulk_prediction(&laplacian(), k as f64 / (n + 1) as f64, n).unwrap();
    assert!((ev[k - 1] - b.lambda_x).abs() < 1e-10);
}

#[test]
fn bulk_location_for_a_unimodal_symbol() {
    let s = with_second_harmonic(0.125);
    let x = 0.3;
    let mut prev = f64::INFINITY;
    for n in [64, 128, 256] {
        let ev = toeplitz_eigenvalues(&s, n).unwrap().eigenvalues;
        let b = bulk_prediction(&s, x, n).unwrap();
        let k = (x * n as f64).floor() as usize;
        let err = (ev[k - 1] - b.lambda_x).abs();
        assert!(err <= 5e-2 && err < prev, "n = {n}: {err}");
        prev = err;
    }
}

#[test]
fn non_unimodal_symbols_are_refused() {
    assert!(bulk_prediction(&with_second_harmonic(0.25), 0.3, 100).is_err());
    assert!(bulk_prediction(&laplacian(), 0.0, 100).is_err());
    assert!(bulk_prediction(&laplacian(), 1.0, 100).is_err());
}

#[test]
fn spacing_law_for_the_laplacian() {
    let n = 400;
    let ev = toeplitz_eigenvalues(&laplacian(), n).unwrap().eigenvalues;
    for k in [80, 200, 310] {
        let x = k as f64 / (n + 1) as f64;
        let b = bulk_prediction(&laplacian(), x, n).unwrap();
        let ratio = (ev[k] - ev[k - 1]) * (n + 1) as f64 * b.psi_derivative / PI;
        assert!((ratio - 1.0).abs() < 1e-2, "k = {k}: {ratio}");
        assert!(((ev[k] - ev[k - 1]) / b.spacing - 1.0).abs() < 1e-2);
    }
}

#[test]
fn equidistribution_of_squares() {
    let n = 256;
    let ev = toeplitz_eigenvalues(&laplacian(), n).unwrap().eigenvalues;
    let mean = ev.iter().map(|l| l * l).sum::<f64>() / n as f64;
    // (1/2pi) int (2 - 2 cos t)^2 dt = 6
    assert!((mean - 6.0).abs() < 1e-2);
}

#[test]
fn bounds_and_trace() {
    let syms = [
        laplacian(),
        with_second_harmonic(0.125),
        CircleSymbol::exp_cos(r(0.8)),
        CircleSymbol::lenard(2.0).unwrap(),
        CircleSymbol::gap(0.2, 0.5, 2.0).unwrap(),
        CircleSymbol::pure_fh(r(-0.2), r(0.0)).unwrap(),
    ];
    for s in &syms {
        for n in [7, 50] {
            let rep = toeplitz_eigenvalues(s, n).unwrap();
            let (lo, hi) = rep.symbol_range;
            assert!(rep.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            assert!(rep.eigenvalues[0] >= lo - 1e-10 && rep.eigenvalues[n - 1] <= hi + 1e-10, "{}", s.name);
            let phi0 = s.fourier_coeffs(0, 0).unwrap()[0].re;
            let tr: f64 = rep.eigenvalues.iter().sum();
            assert!((tr / (n as f64 * phi0) - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn gap_window_grows_logarithmically() {
    let arc = 2.0 * PI / 3.0;
    let counts: Vec<usize> = [64, 128, 256]
        .iter()
        .map(|&n| gap_spectrum_stats(0.0, arc, 0.2, n, Some(0.05)).unwrap().gap_count)
        .collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    assert!(counts[2] > counts[0]);
    let per_log: Vec<f64> = counts.iter().zip([64f64, 128.0, 256.0]).map(|(&c, n)| c as f64 / n.ln()).collect();
    let (mn, mx) = per_log.iter().fold((f64::INFINITY, 0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(mx / mn <= 2.0);
}

#[test]
fn flat_symbol_has_no_gap_eigenvalues() {
    let g = gap_spectrum_stats(0.0, 1.0, 0.0, 40, None).unwrap();
    assert_eq!(g.gap_count, 0);
    assert!(gap_spectrum_stats(2.0, 1.0, 0.2, 40, None).is_err());
}

#[test]
fn near_periodicity_of_the_gap_spectrum() {
    let arc = 2.0 * PI / 3.0;
    let mut consts = vec![];
    for n in [60, 120, 180, 240] {
        let g = gap_spectrum_stats(0.0, arc, 0.2, n, None).unwrap();
        assert_eq!(g.period, Some(3));
        let d = g.pairing_distance.unwrap();
        consts.push(d * n as f64 * (n as f64).ln());
    }
    let (mn, mx) = consts.iter().fold((f64::INFINITY, 0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(mx / mn < 1.5, "{consts:?}");
    let irrational = gap_spectrum_stats(0.0, 2.0, 0.2, 60, None).unwrap();
    assert!(irrational.pairing_distance.is_none());
}
