//! Floating-point plumbing shared by the numerical modules.
//!
//! Everything numeric is written against [`Real`], implemented for `f64`
//! (the default) and for the double-double [`Hp`] type used by slow
//! cross-checks (about 31 significant digits).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::arith::Rational;

pub type C64 = Complex<f64>;
pub type Hp = TwoFloat;

/// Working precision for numerical routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FloatMode {
    #[default]
    Double,
    HighPrecision,
}

pub trait Real: Float + FloatConst + Debug + Send + Sync + 'static {
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Relative unit roundoff.
    fn unit_roundoff() -> f64;

    fn from_bigint(n: &BigInt) -> Self {
        let hi = n.to_f64().unwrap_or(f64::NAN);
        match BigInt::from_f64(hi) {
            Some(h) => Self::from_f64(hi) + Self::from_f64((n - h).to_f64().unwrap_or(0.0)),
            None => Self::from_f64(hi),
        }
    }

    fn from_rational(r: &Rational) -> Self {
        Self::from_bigint(r.numer()) / Self::from_bigint(r.denom())
    }

    /// Exponential at full working precision.
    fn exp_full(self) -> Self {
        self.exp()
    }

    /// `(sin x, cos x)` at full working precision.
    fn sin_cos_full(self) -> (Self, Self) {
        self.sin_cos()
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn unit_roundoff() -> f64 {
        f64::EPSILON
    }
}

impl Real for TwoFloat {
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn to_f64(self) -> f64 {
        f64::from(self)
    }
    fn unit_roundoff() -> f64 {
        1e-31
    }

    // The crate's own exp/sin/cos stop near 1e-18; these reach ~1e-30.
    fn exp_full(self) -> Self {
        if self.hi() > 709.0 {
            return TwoFloat::from(f64::INFINITY);
        }
        if self.hi() < -745.0 {
            return TwoFloat::from(0.0);
        }
        let ln2 = twofloat::consts::LN_2;
        let k = (self.hi() / std::f64::consts::LN_2).round();
        let r = (self - ln2 * k) / 32.0;
        let mut term = TwoFloat::from(1.0);
        let mut sum = TwoFloat::from(1.0);
        for n in 1..30 {
            term = term * r / n as f64;
            sum += term;
            if term.hi().abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..5 {
            sum = sum * sum;
        }
        sum * 2f64.powi(k as i32)
    }

    fn sin_cos_full(self) -> (Self, Self) {
        let half_pi = twofloat::consts::FRAC_PI_2;
        let k = (self.hi() / std::f64::consts::FRAC_PI_2).round();
        let r = self - half_pi * k;
        let r2 = r * r;
        let (mut s, mut c) = (r, TwoFloat::from(1.0));
        let (mut ts, mut tc) = (r, TwoFloat::from(1.0));
        let mut n = 1.0;
        while ts.hi().abs() > 1e-36 || tc.hi().abs() > 1e-36 {
            tc = -tc * r2 / (n * (n + 1.0));
            ts = -ts * r2 / ((n + 1.0) * (n + 2.0));
            c += tc;
            s += ts;
            n += 2.0;
        }
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from_f64(re), T::from_f64(im))
}

pub fn to_c64<T: Real>(z: Complex<T>) -> C64 {
    C64::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64<T: Real>(z: C64) -> Complex<T> {
    c(z.re, z.im)
}

/// `2 pi i` in the requested precision.
pub fn two_pi_i<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::TAU())
}

/// Complex exponential built on [`Real::exp_full`] and [`Real::sin_cos_full`].
pub fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    let m = z.re.exp_full();
    let (s, c) = z.im.sin_cos_full();
    Complex::new(m * c, m * s)
}

/// Principal square root using only real square roots, so it keeps the
/// working precision of `T`.
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let zero = T::zero();
    if z.re == zero && z.im == zero {
        return z;
    }
    let two = T::from_f64(2.0);
    let r = (z.re * z.re + z.im * z.im).sqrt();
    let w = ((r + z.re.abs()) / two).sqrt();
    if z.re >= zero {
        Complex::new(w, z.im / (two * w))
    } else {
        let im = if z.im < zero { -w } else { w };
        Complex::new(z.im.abs() / (two * w), im)
    }
}

/// `q = exp(2 pi i z)`.
pub fn nome<T: Real>(z: Complex<T>) -> Complex<T> {
    cexp(two_pi_i::<T>() * z)
}

/// Square root on the branch closest to `reference`.
pub fn sqrt_near<T: Real>(z: Complex<T>, reference: Complex<T>) -> Complex<T> {
    let s = csqrt(z);
    if (s - reference).norm() <= (-s - reference).norm() {
        s
    } else {
        -s
    }
}

pub fn max_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn bigint_conversion_keeps_low_bits_in_double_double() {
        let n = BigInt::from(2u64).pow(60) + BigInt::one();
        let x = Hp::from_bigint(&n);
        let back = x - Hp::from_f64(2f64.powi(60));
        assert_eq!(back.to_f64(), 1.0);
    }

    #[test]
    fn nome_at_i_is_exp_minus_two_pi() {
        let q = nome::<f64>(C64::new(0.0, 1.0));
        assert!((q.re - (-std::f64::consts::TAU).exp()).abs() < 1e-18);
        assert!(q.im.abs() < 1e-18);
    }

    #[test]
    fn double_double_exp_round_trips() {
        let z: Complex<Hp> = c(0.3, 1.1);
        let w = cexp(two_pi_i::<Hp>() * z) * cexp(-(two_pi_i::<Hp>() * z));
        let err = (w - Complex::<Hp>::one()).norm().to_f64();
        assert!(err < 1e-28, "err = {err:e}");
    }

    #[test]
    fn double_double_e_matches_tabulated_value() {
        let e = Hp::from_f64(1.0).exp_full();
        assert_eq!(e.hi(), std::f64::consts::E);
        assert!(
            (e.lo() - 1.445646891729250158e-16).abs() < 1e-30,
            "lo = {:e}",
            e.lo()
        );
    }

    #[test]
    fn double_double_trig_is_pythagorean() {
        for x in [0.1, 1.1, -2.7, 5.0, 40.0] {
            let (s, c) = Hp::from_f64(x).sin_cos_full();
            let err = (s * s + c * c - Hp::from_f64(1.0)).abs().to_f64();
            assert!(err < 1e-30, "x = {x}: {err:e}");
            assert!((s.to_f64() - x.sin()).abs() < 1e-15);
            assert!((c.to_f64() - x.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn complex_sqrt_principal_branch() {
        for z in [
            C64::new(-4.0, 0.0),
            C64::new(3.0, -4.0),
            C64::new(-1.0, -1e-3),
            C64::new(0.0, 2.0),
        ] {
            let s = csqrt(z);
            assert!((s - z.sqrt()).norm() < 1e-15, "{z}");
        }
        let z: Complex<Hp> = c(2.0, 0.0);
        let s = csqrt(z);
        assert!((s * s - z).norm().to_f64() < 1e-30);
    }
}
