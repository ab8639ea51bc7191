//! Acceptance harness: one PASS/FAIL line per criterion, with timings.
//!
//! Criteria listed in `KNOWN_RED` are mathematically out of reach with the
//! stated tolerance; their checks run unchanged, print FAIL, and the harness
//! asserts that they are still failing so the list cannot go stale.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{rngs::StdRng, Rng, SeedableRng};
use toeplab::applications::{condensate_constant, condensate_fraction, lis_check};
use toeplab::asympt::{bs_exact, bt_predict, selberg_value, szego_fh_predict};
use toeplab::eigen::{bulk_prediction, gap_spectrum_stats, toeplitz_eigenvalues};
use toeplab::exactdet::*;
use toeplab::ising::*;
use toeplab::scaling::*;
use toeplab::specialfn::{log_barnes_g, GLAISHER_A};
use toeplab::symbols::{FhSingularity, SmoothPart};
use toeplab::{CircleSymbol, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// r^{1/4} G_-(r) at r = 0.02 sits 5.4% above its r -> 0 limit; the gap
/// equals the first small-r correction 1 - (r/2)(log(r/8) + gamma_E).
const KNOWN_RED: &[usize] = &[10];

fn c1_bs() -> Outcome {
    let o = DetOptions::default();
    let mut worst: f64 = 0.0;
    for (a, b) in [(r(0.3), c(0.1, 0.2)), (r(0.5), r(0.0)), (r(-0.25), r(0.4))] {
        let s = CircleSymbol::pure_fh(a, b).unwrap();
        for n in 1..=20 {
            let d = toeplitz_det(&s, n, &o).unwrap();
            worst = worst.max(d.rel_diff(&bs_exact(a, b, n).unwrap()));
        }
    }
    outcome(worst <= 1e-9, format!("worst relative error {worst:.2e}"))
}

fn c2_sslt() -> Outcome {
    let s = CircleSymbol::exp_cos(r(1.0));
    let d = toeplitz_det(&s, 30, &DetOptions::default()).unwrap();
    let err = (d.value().re / 1f64.exp() - 1.0).abs();
    outcome(err <= 1e-6, format!("|D_30 / e - 1| = {err:.2e}"))
}

fn c3_magnetization() -> Outcome {
    let s = CircleSymbol::diag(0.5).unwrap();
    let d = toeplitz_det(&s, 50, &DetOptions::default()).unwrap();
    let err = (d.value().re - 0.75f64.powf(0.25)).abs();
    outcome(err <= 1e-6, format!("|D_50 - 0.75^(1/4)| = {err:.2e}"))
}

fn c4_critical_diag() -> Outcome {
    let lead = 0.25f64.exp() * GLAISHER_A.powi(-3) * 2f64.powf(1.0 / 12.0);
    let p = IsingParams::symmetric_critical();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for n in 16..=128 {
        let v = correlation(&p, CorrelationKind::Diag, n, Route::GammaProduct).unwrap().value.abs();
        let res = ((n as f64).powf(0.25) * v - lead).abs();
        let bound = 3.0 / (64.0 * (n * n) as f64) * lead;
        ok &= res <= bound;
        worst = worst.max(res / bound);
    }
    outcome(ok, format!("max residual / bound = {worst:.3}"))
}

fn c5_basor_tracy() -> Outcome {
    let s = CircleSymbol::basor_tracy();
    let o = DetOptions::default();
    let g = |x: f64| log_barnes_g(r(x)).unwrap().re.exp();
    let k = g(0.5).powi(2) * g(1.5).powi(2);
    let d: Vec<f64> = (31..=129).map(|n| toeplitz_det(&s, n, &o).unwrap().value().re).collect();
    let at = |n: usize| d[n - 31];
    let (mut lo, mut hi, mut odd_worst) = (f64::INFINITY, 0f64, 0f64);
    for n in 32..=128 {
        if n % 2 == 0 {
            let v = at(n) * (n as f64 / 2.0).sqrt() / k;
            lo = lo.min(v);
            hi = hi.max(v);
        } else {
            let nb = at(n - 1).abs().min(at(n + 1).abs());
            odd_worst = odd_worst.max(at(n).abs() / nb);
        }
    }
    let pass = lo >= 0.9 && hi <= 1.1 && odd_worst <= 0.05;
    outcome(pass, format!("even ratio in [{lo:.4}, {hi:.4}], odd/even max {odd_worst:.2e}"))
}

fn c6_borodin_okounkov() -> Outcome {
    let s = CircleSymbol::exp_cos(r(0.7));
    let mut worst: f64 = 0.0;
    for n in 4..=16 {
        let d = toeplitz_det(&s, n, &DetOptions::default()).unwrap().value();
        let b = bo_rhs(&s, n, 60).unwrap();
        worst = worst.max((d - b).norm() / d.norm());
    }
    outcome(worst <= 1e-8, format!("worst relative error {worst:.2e}"))
}

fn c7_widom_dyson() -> Outcome {
    let c0 = widom_dyson_constant();
    let d = dyson_asymptote(&[6.0, 8.0, 10.0, 12.0]).unwrap();
    let w = widom_route(0.6, 96).unwrap();
    let (e1, e2) = ((d.a0_estimate - c0).abs(), (w - c0).abs());
    outcome(e1 <= 1e-3 && e2 <= 1e-2, format!("|a0 - c0| = {e1:.2e}, |widom - c0| = {e2:.2e}"))
}

fn c8_sine_kernel() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in [0.5, 2.0, 5.0] {
        let g = sine_gap(s, default_gap_nodes(s)).unwrap();
        let p = g.p_s.value().re;
        let q = g.d_plus.value().re * g.d_minus.value().re;
        worst = worst.max((p - q).abs());
    }
    let p2 = sine_gap(2.0, default_gap_nodes(2.0)).unwrap().p_s.value().re;
    let t = sine_gap_toeplitz(2.0, 512).unwrap().value().re;
    let lim = (t - p2).abs();
    outcome(worst <= 1e-8 && lim <= 1e-4, format!("|P - D+D-| = {worst:.2e}, |D_512 - P_2| = {lim:.2e}"))
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(",")
}

fn c9_eigen() -> Outcome {
    let lap = CircleSymbol::laurent(&[(0, r(2.0)), (1, r(-1.0)), (-1, r(-1.0))]);
    let n = 64;
    let ev = toeplitz_eigenvalues(&lap, n).unwrap().eigenvalues;
    let tri = ev
        .iter()
        .enumerate()
        .map(|(k, v)| (v - (2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos())).abs())
        .fold(0.0, f64::max);

    let s = CircleSymbol::laurent(&[(0, r(2.0)), (1, r(-1.0)), (-1, r(-1.0)), (2, r(0.125)), (-2, r(0.125))]);
    let x = 0.3;
    let (mut r118, mut r119) = (vec![], vec![]);
    for n in [64usize, 128, 256] {
        let ev = toeplitz_eigenvalues(&s, n).unwrap().eigenvalues;
        let k = (x * n as f64).floor() as usize;
        let bp = bulk_prediction(&s, x, n).unwrap();
        let sp = bulk_prediction(&s, k as f64 / (n as f64 + 1.0), n).unwrap();
        r118.push((ev[k - 1] - bp.lambda_x).abs());
        r119.push(((ev[k] - ev[k - 1]) / sp.spacing - 1.0).abs());
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);

    let arc = 2.0 * PI / 3.0;
    let ratios: Vec<f64> = [64usize, 128, 256]
        .iter()
        .map(|&n| gap_spectrum_stats(0.0, arc, 0.2, n, None).unwrap().gap_count as f64 / (n as f64).ln())
        .collect();
    let band = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let pairs: Vec<f64> = [60usize, 120, 180, 240]
        .iter()
        .map(|&n| {
            let d = gap_spectrum_stats(0.0, arc, 0.2, n, None).unwrap().pairing_distance.unwrap();
            d * n as f64 * (n as f64).ln()
        })
        .collect();
    let pmax = pairs.iter().cloned().fold(0.0, f64::max);
    let pmin = pairs.iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = tri <= 1e-10
        && decreasing(&r118)
        && decreasing(&r119)
        && ratios.iter().all(|&q| q > 0.0)
        && band <= 2.0
        && pmin > 0.0
        && pmax / pmin <= 2.0;
    outcome(
        pass,
        format!(
            "tridiagonal {tri:.1e}; bulk residuals {} / {}; gap band {band:.2}; pairing n log n in [{pmin:.3}, {pmax:.3}]",
            fmt_list(&r118),
            fmt_list(&r119)
        ),
    )
}

fn c10_painleve() -> Outcome {
    let crit = 1.0 / PI;
    let mut w4: f64 = 0.0;
    for r in [1e-3, 3e-3, 1e-2] {
        let p = p3_scaling(r, crit, ScalingSign::Minus).unwrap();
        w4 = w4.max((p.eta_at_half_r / p3_small_r_critical(r) - 1.0).abs());
    }
    let mut w2: f64 = 0.0;
    for r in [1e-4, 1e-3, 1e-2] {
        let p = p3_scaling(r, 0.2, ScalingSign::Minus).unwrap();
        w2 = w2.max((p.eta_at_half_r / p3_small_r(r, 0.2).unwrap() - 1.0).abs());
    }
    let target = 0.25f64.exp() * GLAISHER_A.powi(-3) * 2f64.powf(-1.0 / 6.0);
    let g = p3_scaling(0.02, crit, ScalingSign::Minus).unwrap().g;
    let amp = (0.02f64.powf(0.25) * g / target - 1.0).abs();
    let rs = [0.5, 1.0, 2.0];
    let g3 = p3_scaling_curve(&rs, crit, ScalingSign::Minus).unwrap();
    let g5 = g_minus_p5(&rs).unwrap();
    let cross = g3.iter().zip(&g5).map(|(a, b)| (a.g / b - 1.0).abs()).fold(0.0, f64::max);
    let pass = w4 <= 0.02 && w2 <= 0.01 && amp <= 0.02 && cross <= 0.01;
    outcome(
        pass,
        format!(
            "critical small-r {w4:.2e}; lambda=0.2 small-r {w2:.2e}; r^(1/4) G_-(0.02) off by {amp:.3e} (limit 2e-2); PIII/PV {cross:.2e}"
        ),
    )
}

fn c11_gessel() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for n in 1..=5 {
        let k = lis_check(n, 1.0, 7).unwrap();
        let d = (k.lhs - k.rhs_truncated).abs();
        ok &= d <= k.tail_bound;
        worst = worst.max(d / k.tail_bound);
    }
    outcome(ok, format!("max |lhs - rhs| / tail = {worst:.3}"))
}

fn c12_condensate() -> Outcome {
    let cst = condensate_constant();
    let e48 = condensate_fraction(48).unwrap();
    let rel = (e48.value * 48f64.sqrt() / cst - 1.0).abs();
    let a = condensate_fraction(16).unwrap().value;
    let b = condensate_fraction(64).unwrap().value;
    let slope = (b / a).ln() / 4f64.ln();
    outcome(rel <= 0.1 && (slope + 0.5).abs() <= 0.1, format!("N=48 off by {rel:.3}; slope {slope:.3}"))
}

fn c13_properties() -> Outcome {
    let o = DetOptions::default();
    let mut fails = vec![];

    // representation equality
    let s = CircleSymbol::new(
        SmoothPart::from_poly(&[(1, r(0.2)), (-1, r(0.1))]),
        vec![
            FhSingularity { theta: 0.7, alpha: r(0.2), beta: c(0.5, 0.3) },
            FhSingularity { theta: 3.9, alpha: r(0.1), beta: c(-0.5, -0.3) },
        ],
        r(1.0),
    )
    .unwrap();
    let set = s.fh_representations();
    let mut rep: f64 = 0.0;
    for m in &set.members {
        for k in 0..64 {
            let th = (k as f64 + 0.37) * 2.0 * PI / 64.0;
            rep = rep.max((m.symbol.evaluate(th).unwrap() - s.evaluate(th).unwrap()).norm());
        }
    }
    if rep > 1e-12 || set.members.len() != 2 {
        fails.push(format!("representation equality {rep:.1e}"));
    }

    // ratio law
    let e = CircleSymbol::exp_cos(r(0.5));
    let v = verblunsky(&e, 12).unwrap();
    let mut ratio: f64 = 0.0;
    for n in 1..12 {
        let q = toeplitz_det(&e, n + 1, &o).unwrap().value().re / toeplitz_det(&e, n, &o).unwrap().value().re;
        ratio = ratio.max((q / v.ratio(n) - 1.0).abs());
    }
    if ratio > 1e-9 {
        fails.push(format!("ratio law {ratio:.1e}"));
    }

    // squared Hankel and Toeplitz+Hankel mappings
    let w = JacobiWeight::new(
        vec![r(0.0), r(0.3)],
        r(0.2),
        r(0.35),
        vec![InteriorPoint { lambda: 0.3, alpha: r(0.25), beta: r(0.2) }],
    )
    .unwrap();
    for n in [2usize, 4] {
        let h = hankel_det(&Weight::Jacobi(w.clone()), n).unwrap().powi(2);
        let t = hankel_squared_via_toeplitz(&w, n).unwrap();
        if h.rel_diff(&t) > 1e-8 {
            fails.push(format!("squared Hankel n={n} {:.1e}", h.rel_diff(&t)));
        }
    }
    let f = CircleSymbol::exp_cos(r(0.4));
    for n in [4usize, 6] {
        let a = toeplitz_hankel_det(StructuredKind::ThPlus0, &f, n).unwrap();
        let b = th_plus0_via_hankel(&f, n).unwrap();
        if a.rel_diff(&b) > 1e-10 {
            fails.push(format!("T+H mapping n={n} {:.1e}", a.rel_diff(&b)));
        }
    }

    // free-energy forms
    for kappa in [0.5, 0.9] {
        let a = free_energy_integral(kappa, FreeEnergyForm::DoubleIntegral).unwrap();
        let b = free_energy_integral(kappa, FreeEnergyForm::SingleIntegral).unwrap();
        if (a - b).abs() > 1e-10 {
            fails.push(format!("free energy at kappa={kappa}: {:.1e}", (a - b).abs()));
        }
    }

    // regime dichotomy
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let p = IsingParams::new(rng.gen_range(0.05..2.0), rng.gen_range(0.05..2.0)).unwrap();
        let consistent = match p.regime {
            Regime::Subcritical => p.gamma2 < 1.0 && p.k_ons < 1.0,
            Regime::Supercritical => p.gamma2 > 1.0 && p.k_ons > 1.0,
            Regime::Critical => (p.gamma2 - 1.0).abs() < 1e-9,
        };
        if !consistent || !(0.0 < p.gamma1 && p.gamma1 < 1.0 && p.gamma1 < p.gamma2) {
            fails.push(format!("regime dichotomy at chi = ({}, {})", p.chi1, p.chi2));
            break;
        }
    }

    // central-limit corollary: e^{i t cos theta} with t = 1
    let clt = CircleSymbol::exp_cos(c(0.0, 0.5));
    let d = toeplitz_det(&clt, 64, &o).unwrap().value();
    if (d - r((-0.25f64).exp())).norm() > 1e-4 {
        fails.push(format!("CLT corollary {:.1e}", (d - r((-0.25f64).exp())).norm()));
    }

    // oracle triangle
    let pf = CircleSymbol::pure_fh(r(0.25), r(0.0)).unwrap();
    let mut fact = 1.0;
    for n in 1..=3 {
        fact *= n as f64;
        let h = heine_oracle(&pf, n).unwrap();
        let t = toeplitz_det(&pf, n, &o).unwrap().value();
        let sel = selberg_value(n, r(0.25), r(0.0), r(1.0)).unwrap() / fact;
        if (h - t).norm() > 1e-7 || (sel - t).norm() > 1e-7 {
            fails.push(format!("oracle triangle n={n}"));
        }
        let hs = heine_oracle(&e, n).unwrap();
        if (hs - toeplitz_det(&e, n, &o).unwrap().value()).norm() > 1e-7 {
            fails.push(format!("Heine vs LU n={n}"));
        }
    }

    // single-member sets reduce to the plain prediction
    let single = CircleSymbol::pure_fh(r(0.3), c(0.1, 0.2)).unwrap();
    let (a, b) = (bt_predict(&single).unwrap(), szego_fh_predict(&single).unwrap());
    if a.terms != b.terms {
        fails.push("single-member Basor-Tracy reduction".into());
    }

    outcome(fails.is_empty(), if fails.is_empty() { "all property checks hold".into() } else { fails.join("; ") })
}

#[test]
fn acceptance() {
    type Check = fn() -> Outcome;
    let criteria: [(usize, &str, Check, u64); 13] = [
        (1, "pure-singularity exactness", c1_bs, 2),
        (2, "strong Szego convergence", c2_sslt, 1),
        (3, "spontaneous magnetization", c3_magnetization, 1),
        (4, "critical diagonal decay", c4_critical_diag, 1),
        (5, "two-term law", c5_basor_tracy, 5),
        (6, "Borodin-Okounkov identity", c6_borodin_okounkov, 2),
        (7, "Dyson constant", c7_widom_dyson, 30),
        (8, "sine-kernel factorization and limit", c8_sine_kernel, 60),
        (9, "eigenvalue laws", c9_eigen, 60),
        (10, "Painleve scaling", c10_painleve, 60),
        (11, "Gessel identity", c11_gessel, 30),
        (12, "condensate decay", c12_condensate, 120),
        (13, "property suites", c13_properties, 120),
    ];
    let mut unexpected = vec![];
    for (id, name, check, limit) in criteria {
        let t = Instant::now();
        let o = check();
        let el = t.elapsed();
        let pass = o.pass && el <= Duration::from_secs(limit);
        println!(
            "criterion {id:>2} {}: {name}: {} [{:.2} s, limit {limit} s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            el.as_secs_f64()
        );
        if pass == KNOWN_RED.contains(&id) {
            unexpected.push(id);
        }
    }
    assert!(unexpected.is_empty(), "criteria with unexpected status: {unexpected:?}");
}
