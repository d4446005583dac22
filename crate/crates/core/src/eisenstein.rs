//! Eisenstein series E2, E4, E6, the normalized discriminant and j as exact
//! q-series, and the complex frame constants `a_k` with `g_k = a_k E_{2k}`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::arith::{int, rat, QSeries, Rational};
use crate::numeric::{Real, C64};
use crate::{Error, Result};

/// Default number of known coefficients for working series.
pub const DEFAULT_ORDER: i64 = 64;

/// Smallest admissible imaginary part for numerical evaluation through q-expansions.
pub const IM_FLOOR: f64 = 0.25;

/// Divisor power sum `sigma_e(n)`.
pub fn sigma(e: u32, n: u64) -> BigInt {
    assert!(n >= 1, "sigma is defined for n >= 1");
    let mut acc = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(e);
            let other = n / d;
            if other != d {
                acc += BigInt::from(other).pow(e);
            }
        }
        d += 1;
    }
    acc
}

/// Bernoulli numbers in the old indexing `B_1 = 1/6, B_2 = 1/30, B_3 = 1/42`.
pub fn bernoulli(k: u32) -> Rational {
    match k {
        1 => rat(1, 6),
        2 => rat(1, 30),
        3 => rat(1, 42),
        _ => panic!("Bernoulli number B_{k} is not tabulated"),
    }
}

/// `E_{2k}` with constant term 1 and integer coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedEisenstein {
    pub k: u32,
    pub series: QSeries,
}

/// `E_{2k} = 1 + (-1)^k (4k / B_k) sum sigma_{2k-1}(n) q^n`, known to `O(q^order)`.
pub fn eisenstein_series(k: u32, order: i64) -> NormalizedEisenstein {
    assert!((1..=3).contains(&k), "only k = 1, 2, 3 are supported");
    assert!(order >= 1);
    let sign = if k % 2 == 0 { int(1) } else { int(-1) };
    let factor = sign * int(4 * k as i64) / bernoulli(k);
    let series = QSeries::from_fn(0, order, |n| {
        if n == 0 {
            Rational::one()
        } else {
            &factor * Rational::from_integer(sigma(2 * k - 1, n as u64))
        }
    });
    NormalizedEisenstein { k, series }
}

/// The three normalized generators `(E2, E4, E6)` to a common order.
pub fn generators(order: i64) -> [QSeries; 3] {
    [1, 2, 3].map(|k| eisenstein_series(k, order).series)
}

/// `(E4^3 - E6^2) / 1728 = q - 24 q^2 + 252 q^3 + ...`, known to `O(q^order)`.
pub fn discriminant_series(order: i64) -> QSeries {
    let [_, e4, e6] = generators(order);
    let e4_cubed = &(&e4 * &e4) * &e4;
    (&e4_cubed - &(&e6 * &e6)).scale(&rat(1, 1728))
}

/// `j = E4^3 / Delta = q^-1 + 744 + 196884 q + ...`, known to `O(q^order)`.
pub fn j_series(order: i64) -> QSeries {
    assert!(order >= 0);
    let inner = order + 2;
    let [_, e4, _] = generators(inner);
    let e4_cubed = &(&e4 * &e4) * &e4;
    let delta = discriminant_series(inner);
    let j = &e4_cubed * &delta.inv().expect("discriminant has leading coefficient 1");
    j.truncate(order)
}

/// `u^h` with `u = 2 pi i / 12`, the frame factor of an element of weight `2h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConstant {
    pub half_weight: i64,
    pub value: C64,
}

/// `u = 2 pi i / 12` in the requested precision (principal branch of `2 pi i`).
pub fn frame_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::TAU() / T::from_f64(12.0))
}

pub fn frame_value(weight: i64) -> Result<FrameConstant> {
    if weight % 2 != 0 {
        return Err(Error::OddWeight(weight));
    }
    let h = weight / 2;
    Ok(FrameConstant {
        half_weight: h,
        value: frame_unit::<f64>().powi(h as i32),
    })
}

impl FrameConstant {
    /// Frame constants multiply by adding half-weights.
    pub fn times(&self, other: &FrameConstant) -> FrameConstant {
        FrameConstant {
            half_weight: self.half_weight + other.half_weight,
            value: self.value * other.value,
        }
    }
}

/// Rational multipliers `(1, 12, 8)` with `a_k = c_k u^k`.
pub const FRAME_RATIOS: [i64; 3] = [1, 12, 8];

/// `(a1, a2, a3) = (u, 12 u^2, 8 u^3)`, which is also the limit point `p_inf` of `g`.
pub fn g_constants<T: Real>() -> [Complex<T>; 3] {
    let u = frame_unit::<T>();
    [1, 2, 3].map(|k| u.powi(k) * T::from_f64(FRAME_RATIOS[k as usize - 1] as f64))
}

/// Guard for evaluating q-expansions at `z`.
pub fn check_im<T: Real>(z: Complex<T>, floor: f64) -> Result<()> {
    let im = z.im.to_f64();
    if !(im >= floor) {
        return Err(Error::LowImaginaryPart { im, floor });
    }
    Ok(())
}

/// Numerical values `(E2(z), E4(z), E6(z))` from q-expansions of the given order.
pub fn normalized_values<T: Real>(z: Complex<T>, order: i64) -> Result<[Complex<T>; 3]> {
    check_im(z, IM_FLOOR)?;
    let q = crate::numeric::nome(z);
    Ok(generators(order).map(|s| s.evaluate(q)))
}

/// `g(z) = (a1 E2(z), a2 E4(z), a3 E6(z))`.
pub fn g_values<T: Real>(z: Complex<T>, order: i64) -> Result<[Complex<T>; 3]> {
    let e = normalized_values(z, order)?;
    let a = g_constants::<T>();
    Ok([a[0] * e[0], a[1] * e[1], a[2] * e[2]])
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Divisor sums by brute force over every candidate divisor.
    fn sigma_oracle(e: u32, n: u64) -> BigInt {
        (1..=n)
            .filter(|d| n % d == 0)
            .map(|d| BigInt::from(d).pow(e))
            .sum()
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(1, 1), BigInt::from(1));
        assert_eq!(sigma(1, 6), BigInt::from(12));
        assert_eq!(sigma(3, 2), BigInt::from(9));
        for n in 1..120 {
            assert_eq!(sigma(5, n), sigma_oracle(5, n));
        }
    }

    #[test]
    fn first_coefficients() {
        assert_eq!(eisenstein_series(1, 3).series.coeff(1), int(-24));
        assert_eq!(eisenstein_series(2, 3).series.coeff(1), int(240));
        assert_eq!(eisenstein_series(3, 3).series.coeff(1), int(-504));
        assert_eq!(eisenstein_series(1, 3).series.coeff(2), int(-72));
    }

    #[test]
    fn coefficients_are_integers() {
        for s in generators(50) {
            assert!(s.coeffs().iter().all(|c| c.is_integer()));
        }
    }

    #[test]
    fn discriminant_head() {
        let d = discriminant_series(10);
        assert_eq!(d.coeff(0), int(0));
        assert_eq!(
            [d.coeff(1), d.coeff(2), d.coeff(3)],
            [int(1), int(-24), int(252)]
        );
        assert_eq!(d.order(), 10);
    }

    #[test]
    fn j_head() {
        let j = j_series(5);
        assert_eq!(j.order(), 5);
        assert_eq!(j.leading_exponent(), Some(-1));
        assert_eq!(
            [j.coeff(-1), j.coeff(0), j.coeff(1)],
            [int(1), int(744), int(196884)]
        );
        assert_eq!(j.coeff(2), int(21493760));
    }

    #[test]
    fn j_times_delta_is_e4_cubed() {
        let n = 40;
        let [_, e4, _] = generators(n);
        let lhs = &j_series(n) * &discriminant_series(n);
        let rhs = (&(&e4 * &e4) * &e4).truncate(lhs.order());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn frame_constants() {
        assert_eq!(frame_value(0).unwrap().value, C64::new(1.0, 0.0));
        assert_eq!(frame_value(3).unwrap_err(), Error::OddWeight(3));
        let [a1, a2, a3] = g_constants::<f64>();
        assert!((a2 / (a1 * a1) - 12.0).norm() < 1e-14);
        assert!((a3 / (a1 * a1 * a1) - 8.0).norm() < 1e-14);
        assert!((a1 - C64::new(0.0, 0.5235987755982988)).norm() < 1e-16);
        let prod = frame_value(2).unwrap().times(&frame_value(4).unwrap());
        assert_eq!(prod.half_weight, 3);
        assert!((prod.value - frame_value(6).unwrap().value).norm() < 1e-15);
    }

    #[test]
    fn frame_constants_match_zeta_values() {
        use std::f64::consts::PI;
        let tpi = C64::new(0.0, 2.0 * PI);
        let a1 = 2.0 * (PI * PI / 6.0) * (-1.0) / tpi;
        let a2 = 2.0 * PI.powi(4) / 90.0 * 60.0 / (tpi * tpi);
        let a3 = 2.0 * PI.powi(6) / 945.0 * (-140.0) / (tpi * tpi * tpi);
        let g = g_constants::<f64>();
        assert!((g[0] - a1).norm() < 1e-14);
        assert!((g[1] - a2).norm() < 1e-13);
        assert!((g[2] - a3).norm() < 1e-13);
    }

    #[test]
    fn e6_vanishes_at_i() {
        let e = normalized_values(C64::new(0.0, 1.0), DEFAULT_ORDER).unwrap();
        assert!(e[2].norm() < 1e-12, "E6(i) = {}", e[2]);
    }

    #[test]
    fn low_imaginary_part_is_refused() {
        assert!(matches!(
            normalized_values(C64::new(0.0, 0.1), DEFAULT_ORDER),
            Err(Error::LowImaginaryPart { .. })
        ));
    }
}
