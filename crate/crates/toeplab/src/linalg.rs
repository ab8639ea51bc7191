//! Log-domain determinants and small dense solvers.

use crate::error::{Error, Result};
use crate::precision::{Field, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A determinant stored as exp(log_modulus + i phase), or exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogDet {
    pub log_modulus: f64,
    pub phase: f64,
    pub exact_zero: bool,
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

impl LogDet {
    pub fn one() -> Self {
        LogDet { log_modulus: 0.0, phase: 0.0, exact_zero: false }
    }

    pub fn zero() -> Self {
        LogDet { log_modulus: f64::NEG_INFINITY, phase: 0.0, exact_zero: true }
    }

    /// From the complex logarithm of the value.
    pub fn from_log(l: C64) -> Self {
        LogDet { log_modulus: l.re, phase: wrap_phase(l.im), exact_zero: false }
    }

    pub fn from_value(z: C64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::zero()
        } else {
            LogDet { log_modulus: z.norm().ln(), phase: z.arg(), exact_zero: false }
        }
    }

    pub fn mul(self, o: LogDet) -> LogDet {
        if self.exact_zero || o.exact_zero {
            return Self::zero();
        }
        LogDet {
            log_modulus: self.log_modulus + o.log_modulus,
            phase: wrap_phase(self.phase + o.phase),
            exact_zero: false,
        }
    }

    pub fn div(self, o: LogDet) -> Result<LogDet> {
        if o.exact_zero {
            return Err(Error::Numerical("division by a zero determinant".into()));
        }
        if self.exact_zero {
            return Ok(Self::zero());
        }
        Ok(LogDet {
            log_modulus: self.log_modulus - o.log_modulus,
            phase: wrap_phase(self.phase - o.phase),
            exact_zero: false,
        })
    }

    pub fn powi(self, k: i32) -> LogDet {
        if self.exact_zero {
            return if k == 0 { Self::one() } else { Self::zero() };
        }
        LogDet {
            log_modulus: self.log_modulus * k as f64,
            phase: wrap_phase(self.phase * k as f64),
            exact_zero: false,
        }
    }

    /// Complex logarithm (principal phase); None when zero.
    pub fn ln(&self) -> Option<C64> {
        if self.exact_zero {
            None
        } else {
            Some(C64::new(self.log_modulus, self.phase))
        }
    }

    /// The value itself; may overflow or underflow.
    pub fn value(&self) -> C64 {
        if self.exact_zero {
            C64::new(0.0, 0.0)
        } else {
            C64::from_polar(self.log_modulus.exp(), self.phase)
        }
    }

    /// |self/other - 1| computed in the log domain.
    pub fn rel_diff(&self, other: &LogDet) -> f64 {
        match (self.exact_zero, other.exact_zero) {
            (true, true) => 0.0,
            (true, false) | (false, true) => 1.0,
            _ => {
                let d = C64::new(
                    self.log_modulus - other.log_modulus,
                    wrap_phase(self.phase - other.phase),
                );
                (d.exp() - 1.0).norm()
            }
        }
    }
}

/// Row-major square matrix.
#[derive(Clone, Debug)]
pub struct Mat<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Field> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: vec![T::zero(); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Mat { n, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Determinant by LU with partial pivoting, accumulated in the log domain.
/// A pivot column whose largest entry is below n * eps * ||A|| is declared an
/// exact zero.
pub fn log_det<T: Field>(mut a: Mat<T>) -> LogDet {
    let n = a.n;
    if n == 0 {
        return LogDet::one();
    }
    let norm = a.norm_inf();
    if norm == 0.0 {
        return LogDet::zero();
    }
    let thresh = n as f64 * T::EPS * norm;
    let mut logmod = 0.0;
    let mut phase = 0.0;
    for k in 0..n {
        let mut p = k;
        let mut best = a.get(k, k).modulus();
        for i in k + 1..n {
            let m = a.get(i, k).modulus();
            if m > best {
                best = m;
                p = i;
            }
        }
        if best <= thresh || !best.is_finite() {
            if !best.is_finite() {
                return LogDet { log_modulus: f64::NAN, phase: f64::NAN, exact_zero: false };
            }
            return LogDet::zero();
        }
        if p != k {
            for j in 0..n {
                a.data.swap(k * n + j, p * n + j);
            }
            phase += PI;
        }
        let piv = a.get(k, k);
        let (lm, ph) = piv.log_polar();
        logmod += lm;
        phase += ph;
        let (top, rest) = a.data.split_at_mut((k + 1) * n);
        let prow = &top[k * n..(k + 1) * n];
        for i in 0..n - k - 1 {
            let row = &mut rest[i * n..(i + 1) * n];
            let f = row[k] / piv;
            if f.modulus() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                row[j] = row[j] - f * prow[j];
            }
        }
    }
    LogDet { log_modulus: logmod, phase: wrap_phase(phase), exact_zero: false }
}

/// Solution of a complex linear system by full-pivot elimination together
/// with the ratio of smallest to largest pivot as a conditioning indicator.
pub struct Solve {
    pub x: Vec<C64>,
    pub pivot_ratio: f64,
}

pub fn solve_full_pivot(a: &[C64], b: &[C64], n: usize) -> Result<Solve> {
    let mut m: Vec<C64> = a.to_vec();
    let mut rhs = b.to_vec();
    let mut colperm: Vec<usize> = (0..n).collect();
    let mut maxp: f64 = 0.0;
    let mut minp = f64::INFINITY;
    for k in 0..n {
        let (mut pi, mut pj, mut best) = (k, k, -1.0);
        for i in k..n {
            for j in k..n {
                let v = m[i * n + j].norm();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        maxp = maxp.max(best);
        minp = minp.min(best);
        if best == 0.0 || best < 1e-14 * maxp {
            return Err(Error::Singular(format!(
                "pivot {best:.3e} at step {k} of {n} (largest {maxp:.3e})"
            )));
        }
        if pi != k {
            for j in 0..n {
                m.swap(k * n + j, pi * n + j);
            }
            rhs.swap(k, pi);
        }
        if pj != k {
            for i in 0..n {
                m.swap(i * n + k, i * n + pj);
            }
            colperm.swap(k, pj);
        }
        let piv = m[k * n + k];
        for i in k + 1..n {
            let f = m[i * n + k] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for j in k..n {
                let t = m[k * n + j];
                m[i * n + j] -= f * t;
            }
            let t = rhs[k];
            rhs[i] -= f * t;
        }
    }
    let mut y = vec![C64::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for j in k + 1..n {
            s -= m[k * n + j] * y[j];
        }
        y[k] = s / m[k * n + k];
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        x[colperm[k]] = y[k];
    }
    Ok(Solve { x, pivot_ratio: if n == 0 { 1.0 } else { minp / maxp } })
}

/// Eigenvalues of a Hermitian matrix (row-major), ascending.
pub fn hermitian_eigenvalues(a: &[C64], n: usize) -> Vec<f64> {
    let m = nalgebra::DMatrix::<C64>::from_fn(n, n, |i, j| a[i * n + j]);
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Eigenvalues of a real symmetric matrix (row-major), ascending.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let m = nalgebra::DMatrix::<f64>::from_fn(n, n, |i, j| a[i * n + j]);
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}
