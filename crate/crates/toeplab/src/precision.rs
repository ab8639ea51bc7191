//! Arithmetic backends. Determinants are generic over [`Field`], which is
//! implemented for `f64`, [`DD`] (double-double) and their complex versions.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use twofloat::TwoFloat;

/// Double-double number. Wraps [`TwoFloat`] for storage and most arithmetic,
/// but divides with an exact residual correction: the upstream DD/DD quotient
/// loses the low word.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct DD(TwoFloat);

impl DD {
    pub fn hi(self) -> f64 {
        self.0.hi()
    }
    pub fn lo(self) -> f64 {
        self.0.lo()
    }
    pub fn abs(self) -> DD {
        if self.0.hi() < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl From<f64> for DD {
    fn from(x: f64) -> Self {
        DD(TwoFloat::from(x))
    }
}

impl From<TwoFloat> for DD {
    fn from(x: TwoFloat) -> Self {
        DD(x)
    }
}

macro_rules! dd_binop {
    ($tr:ident, $f:ident, $atr:ident, $af:ident) => {
        impl std::ops::$tr for DD {
            type Output = DD;
            fn $f(self, o: DD) -> DD {
                DD(std::ops::$tr::$f(self.0, o.0))
            }
        }
        impl std::ops::$tr<f64> for DD {
            type Output = DD;
            fn $f(self, o: f64) -> DD {
                DD(std::ops::$tr::$f(self.0, o))
            }
        }
        impl std::ops::$atr for DD {
            fn $af(&mut self, o: DD) {
                *self = std::ops::$tr::$f(*self, o);
            }
        }
        impl std::ops::$atr<f64> for DD {
            fn $af(&mut self, o: f64) {
                *self = std::ops::$tr::$f(*self, o);
            }
        }
    };
}
dd_binop!(Add, add, AddAssign, add_assign);
dd_binop!(Sub, sub, SubAssign, sub_assign);
dd_binop!(Mul, mul, MulAssign, mul_assign);

impl std::ops::Div for DD {
    type Output = DD;
    fn div(self, o: DD) -> DD {
        // three quotient digits, each from an exact residual
        let q1 = self.0.hi() / o.0.hi();
        let r = self.0 - o.0 * q1;
        let q2 = r.hi() / o.0.hi();
        let r = r - o.0 * q2;
        let q3 = r.hi() / o.0.hi();
        DD(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl std::ops::Div<f64> for DD {
    type Output = DD;
    fn div(self, o: f64) -> DD {
        DD(self.0 / o)
    }
}

impl std::ops::DivAssign for DD {
    fn div_assign(&mut self, o: DD) {
        *self = *self / o;
    }
}

impl std::ops::Rem for DD {
    type Output = DD;
    fn rem(self, o: DD) -> DD {
        let q = (self / o).0.trunc();
        DD(self.0 - q * o.0)
    }
}

impl std::ops::Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD(-self.0)
    }
}

impl num_traits::Zero for DD {
    fn zero() -> Self {
        DD::from(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0.hi() == 0.0 && self.0.lo() == 0.0
    }
}

impl num_traits::One for DD {
    fn one() -> Self {
        DD::from(1.0)
    }
}

impl num_traits::Num for DD {
    type FromStrRadixErr = ();
    fn from_str_radix(s: &str, radix: u32) -> std::result::Result<Self, ()> {
        if radix != 10 {
            return Err(());
        }
        s.parse::<f64>().map(DD::from).map_err(|_| ())
    }
}

pub type C64 = Complex<f64>;
pub type CDD = Complex<DD>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl std::str::FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            _ => Err(format!("unknown precision '{s}'")),
        }
    }
}

/// Scalar field used by the log-domain LU.
pub trait Field:
    Copy
    + Send
    + Sync
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Unit roundoff of the backend.
    const EPS: f64;
    fn zero() -> Self;
    fn one() -> Self;
    /// Real backends drop the imaginary part.
    fn from_c64(z: C64) -> Self;
    fn to_c64(self) -> C64;
    /// Modulus rounded to double, used for pivoting and thresholds.
    fn modulus(self) -> f64;
    /// (log |x|, arg x) with the logarithm accurate to double precision.
    fn log_polar(self) -> (f64, f64);
}

impl Field for f64 {
    const EPS: f64 = f64::EPSILON;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_c64(z: C64) -> Self {
        z.re
    }
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn log_polar(self) -> (f64, f64) {
        (self.abs().ln(), if self < 0.0 { std::f64::consts::PI } else { 0.0 })
    }
}

impl Field for C64 {
    const EPS: f64 = f64::EPSILON;
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_c64(z: C64) -> Self {
        z
    }
    fn to_c64(self) -> C64 {
        self
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn log_polar(self) -> (f64, f64) {
        (self.norm().ln(), self.arg())
    }
}

/// Two doubles give roughly 106 bits.
const DD_EPS: f64 = 1.2e-32;

fn dd_ln_abs(x: DD) -> f64 {
    let (h, l) = (x.hi(), x.lo());
    (h.abs()).ln() + l / h
}

impl Field for DD {
    const EPS: f64 = DD_EPS;
    fn zero() -> Self {
        DD::from(0.0)
    }
    fn one() -> Self {
        DD::from(1.0)
    }
    fn from_c64(z: C64) -> Self {
        DD::from(z.re)
    }
    fn to_c64(self) -> C64 {
        C64::new(self.hi() + self.lo(), 0.0)
    }
    fn modulus(self) -> f64 {
        self.hi().abs()
    }
    fn log_polar(self) -> (f64, f64) {
        (dd_ln_abs(self), if self.hi() < 0.0 { std::f64::consts::PI } else { 0.0 })
    }
}

impl Field for CDD {
    const EPS: f64 = DD_EPS;
    fn zero() -> Self {
        CDD::new(DD::from(0.0), DD::from(0.0))
    }
    fn one() -> Self {
        CDD::new(DD::from(1.0), DD::from(0.0))
    }
    fn from_c64(z: C64) -> Self {
        CDD::new(DD::from(z.re), DD::from(z.im))
    }
    fn to_c64(self) -> C64 {
        C64::new(self.re.hi() + self.re.lo(), self.im.hi() + self.im.lo())
    }
    fn modulus(self) -> f64 {
        self.re.hi().hypot(self.im.hi())
    }
    fn log_polar(self) -> (f64, f64) {
        let m2 = self.re * self.re + self.im * self.im;
        (0.5 * dd_ln_abs(m2), self.im.hi().atan2(self.re.hi()))
    }
}

pub fn dd(x: f64) -> DD {
    DD::from(x)
}

pub fn dd_to_f64(x: DD) -> f64 {
    x.hi() + x.lo()
}

pub fn dd_pi() -> DD {
    DD(twofloat::consts::PI)
}

/// sin and cos in double-double. Reduction by multiples of pi/2 followed by
/// a Taylor series on |r| <= pi/4; fine for |x| up to about 1e6.
pub fn dd_sin_cos(x: DD) -> (DD, DD) {
    let half_pi = DD(twofloat::consts::FRAC_PI_2);
    let q = (x.hi() / std::f64::consts::FRAC_PI_2).round();
    let r = x - half_pi * q;
    let r2 = r * r;
    // sin r
    let mut term = r;
    let mut s = r;
    let mut k = 1.0;
    loop {
        term = -(term * r2) / ((k + 1.0) * (k + 2.0));
        s += term;
        k += 2.0;
        if term.hi().abs() < 1e-35 || k > 60.0 {
            break;
        }
    }
    // cos r
    let mut term = dd(1.0);
    let mut c = dd(1.0);
    let mut k = 0.0;
    loop {
        term = -(term * r2) / ((k + 1.0) * (k + 2.0));
        c += term;
        k += 2.0;
        if term.hi().abs() < 1e-35 || k > 60.0 {
            break;
        }
    }
    match (q as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

pub fn dd_sin(x: DD) -> DD {
    dd_sin_cos(x).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_sine_of_sixth_of_pi_is_half() {
        let s = dd_sin(dd_pi() / 6.0);
        assert!((s - dd(0.5)).hi().abs() < 1e-31);
        let (s, c) = dd_sin_cos(dd_pi() * 7.0 / 4.0);
        assert!((s + c).hi().abs() < 1e-30);
    }

    #[test]
    fn dd_division_keeps_the_low_word() {
        let a = dd(2.0) / dd(11.0);
        assert!((a * 11.0 - dd(2.0)).hi().abs() < 1e-31);
        let x = dd(1.0) / dd(3.0);
        assert!((x * x * x - dd(1.0) / dd(27.0)).hi().abs() < 1e-32);
    }

    #[test]
    fn dd_pythagoras_holds() {
        for &x in &[0.3, 2.0, 7.7, 58.0, 300.25] {
            let (s, c) = dd_sin_cos(dd(x));
            let e = (s * s + c * c - dd(1.0)).hi().abs();
            assert!(e < 1e-30, "x={x} e={e}");
            assert!((s.hi() - x.sin()).abs() < 1e-15);
        }
    }
}
