//! Impenetrable bosons (one-body density and condensate fraction) and the
//! Poissonized longest-increasing-subsequence identity.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use itertools::Itertools;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::exactdet::{toeplitz_det, DetOptions};
use crate::quadrature::integrate;
use crate::symbols::CircleSymbol;
use crate::C64;

/// Smallest angle at which the density is computed.
pub const BOSON_T_MIN: f64 = 0.05;

#[derive(Clone, Debug, Serialize)]
pub struct BosonDensityCurve {
    #[serde(rename = "N")]
    pub n_particles: usize,
    pub samples: Vec<(f64, f64)>,
}

/// |e N / sin(t/2)|^{1/2}.
pub fn szego_envelope(n_particles: usize, t: f64) -> f64 {
    (std::f64::consts::E * n_particles as f64 / (0.5 * t).sin()).abs().sqrt()
}

/// R_N(t) = D_{N-1} of |z - e^{it/2}| |z - e^{-it/2}|.
pub fn boson_r(n_particles: usize, t: f64) -> Result<f64> {
    if n_particles < 2 {
        return input("N must be at least 2");
    }
    if !(t >= BOSON_T_MIN && t <= 2.0 * PI - BOSON_T_MIN) {
        return input(format!("t = {t} is outside [{BOSON_T_MIN}, 2 pi - {BOSON_T_MIN}]"));
    }
    let s = CircleSymbol::lenard(t)?;
    let d = toeplitz_det(&s, n_particles - 1, &DetOptions::default())?;
    let v = d.value();
    if !(v.re > 0.0) || v.im.abs() > 1e-10 * v.re {
        return Err(Error::Numerical(format!("density at t = {t} is not positive: {v}")));
    }
    Ok(v.re)
}

pub fn boson_density(n_particles: usize, t_grid: &[f64]) -> Result<BosonDensityCurve> {
    if t_grid.iter().any(|&t| !(t > 0.0 && t <= PI)) {
        return input("t must lie in (0, pi]");
    }
    let samples = t_grid
        .iter()
        .map(|&t| Ok((t, boson_r(n_particles, t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BosonDensityCurve { n_particles, samples })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CondensateEstimate {
    pub value: f64,
    pub error_bar: f64,
}

/// lambda_max / N = (1 / pi N) int_0^pi R_N(t) dt. The integral over
/// [t_min, pi] is done by adaptive quadrature; the window [0, t_min] is
/// bounded by the Szego envelope capped at R_N(0) = N (the density is a
/// positive-definite function of t), and half of that bound is added to the
/// estimate with the other half as the error bar.
pub fn condensate_fraction(n_particles: usize) -> Result<CondensateEstimate> {
    if n_particles < 4 {
        return input("N must be at least 4");
    }
    let nf = n_particles as f64;
    let mut failure = None;
    let main = integrate(
        |t| match boson_r(n_particles, t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        BOSON_T_MIN,
        PI,
        1e-8 * nf,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let window = integrate(|t| szego_envelope(n_particles, t).min(nf), 1e-300, BOSON_T_MIN, 1e-10)?;
    let scale = 1.0 / (PI * nf);
    let value = scale * (main + 0.5 * window);
    let error_bar = scale * 0.5 * window;
    if error_bar > 0.1 * value {
        return Err(Error::Numerical(format!(
            "window error bar {error_bar:.3e} exceeds 10% of the estimate {value:.3e}"
        )));
    }
    Ok(CondensateEstimate { value, error_bar })
}

/// (e/pi)^{1/2} 2^{-5/6} A^{-6} Gamma(1/4)^2.
pub fn condensate_constant() -> f64 {
    let g = crate::specialfn::log_gamma(C64::new(0.25, 0.0)).map(|z| z.re.exp()).unwrap_or(f64::NAN);
    (std::f64::consts::E / PI).sqrt()
        * 2f64.powf(-5.0 / 6.0)
        * crate::specialfn::GLAISHER_A.powi(-6)
        * g
        * g
}

// ---------------------------------------------------------------------------
// Longest increasing subsequences

/// Length of the longest increasing subsequence (patience sorting).
pub fn lis_length(p: &[usize]) -> usize {
    let mut piles: Vec<usize> = vec![];
    for &x in p {
        match piles.binary_search(&x) {
            Ok(_) => {}
            Err(i) if i == piles.len() => piles.push(x),
            Err(i) => piles[i] = x,
        }
    }
    piles.len()
}

#[derive(Clone, Debug, Serialize)]
pub struct LisTable {
    pub n_max: usize,
    /// p[(N, n)] = Prob(longest increasing subsequence <= n) for size N.
    #[serde(serialize_with = "ser_table")]
    pub p: BTreeMap<(usize, usize), Rational64>,
}

fn ser_table<S: serde::Serializer>(m: &BTreeMap<(usize, usize), Rational64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for ((big, small), v) in m {
        map.serialize_entry(&format!("{big},{small}"), &v.to_string())?;
    }
    map.end()
}

impl LisTable {
    /// Exhaustive enumeration of all permutations of size 0..=n_max.
    pub fn enumerate(n_max: usize) -> Result<Self> {
        if n_max > 8 {
            return input("exhaustive enumeration is limited to N <= 8");
        }
        let mut p = BTreeMap::new();
        for big in 0..=n_max {
            let mut counts = vec![0i64; big + 1];
            let mut total = 0i64;
            for perm in (0..big).permutations(big) {
                counts[lis_length(&perm)] += 1;
                total += 1;
            }
            let mut acc = 0i64;
            for (small, c) in counts.iter().enumerate() {
                acc += c;
                p.insert((big, small), Rational64::new(acc, total));
            }
        }
        Ok(LisTable { n_max, p })
    }

    /// p_N(n), equal to 1 once n >= N.
    pub fn get(&self, big: usize, small: usize) -> Option<Rational64> {
        if big > self.n_max {
            return None;
        }
        Some(self.p.get(&(big, small.min(big))).copied().unwrap_or(Rational64::from_integer(1)))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LisCheck {
    pub lhs: f64,
    pub rhs_truncated: f64,
    pub tail_bound: f64,
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Compares e^{-lambda} D_n(e^{2 sqrt(lambda) cos theta}) with the truncated
/// Poisson mixture of the enumerated distribution.
pub fn lis_check(n: usize, lambda: f64, n_max: usize) -> Result<LisCheck> {
    if n == 0 || !(lambda > 0.0) {
        return input("need n >= 1 and lambda > 0");
    }
    let table = LisTable::enumerate(n_max)?;
    let mut weight = (-lambda).exp();
    let mut rhs = 0.0;
    let mut mass = 0.0;
    for big in 0..=n_max {
        if big > 0 {
            weight *= lambda / big as f64;
        }
        mass += weight;
        rhs += weight * to_f64(table.get(big, n).unwrap());
    }
    let tail_bound = (1.0 - mass).max(0.0);
    if tail_bound >= 1e-3 {
        return input(format!("N_max = {n_max} leaves a Poisson tail of {tail_bound:.2e}"));
    }
    let s = CircleSymbol::exp_cos(C64::new(lambda.sqrt(), 0.0));
    let d = toeplitz_det(&s, n, &DetOptions::default())?;
    let lhs = (-lambda).exp() * d.value().re;
    Ok(LisCheck { lhs, rhs_truncated: rhs, tail_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patience_sorting() {
        assert_eq!(lis_length(&[2, 0, 3, 1, 4]), 3);
        assert_eq!(lis_length(&[3, 2, 1, 0]), 1);
        assert_eq!(lis_length(&[]), 0);
    }
}
