use num_complex::Complex;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::DmfElement;
use crate::arith::binomial;
use crate::eisenstein::{check_im, g_values, IM_FLOOR};
use crate::numeric::{Real, C64};
use crate::{Error, Result};

/// Real 2x2 matrix `(a b; c d)` acting on the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2R {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Matrix2R {
    pub const IDENTITY: Matrix2R = Matrix2R {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Matrix2R { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_integer(&self) -> bool {
        [self.a, self.b, self.c, self.d]
            .iter()
            .all(|x| x.fract() == 0.0)
    }

    pub fn mul(&self, o: &Matrix2R) -> Matrix2R {
        Matrix2R::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// Automorphy factor `j(A, z) = c z + d`.
    pub fn j<T: Real>(&self, z: Complex<T>) -> Complex<T> {
        z * T::from_f64(self.c) + T::from_f64(self.d)
    }

    /// Moebius action `(a z + b) / (c z + d)`.
    pub fn apply<T: Real>(&self, z: Complex<T>) -> Complex<T> {
        (z * T::from_f64(self.a) + T::from_f64(self.b)) / self.j(z)
    }
}

/// `f ||_m A (z) = det^(m-n-1) sum_i C(n,i) c_{A^-1}^i j(A,z)^(i-m) f_i(A z)`
/// evaluated through q-expansions of `order` terms, with `g_k = a_k E_{2k}`.
pub fn slash_eval(f: &DmfElement, a: &Matrix2R, z: C64, order: i64) -> Result<C64> {
    slash_eval_with_floor(f, a, z, order, IM_FLOOR)
}

pub fn slash_eval_with_floor(
    f: &DmfElement,
    a: &Matrix2R,
    z: C64,
    order: i64,
    floor: f64,
) -> Result<C64> {
    let (m, n) = f.grade()?;
    let det = a.det();
    if det <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "slash needs det A > 0, got {det}"
        )));
    }
    check_im(z, floor)?;
    let w = a.apply(z);
    check_im(w, floor)?;
    let g = g_values(w, order)?;
    let jz = a.j(z);
    let c_inv = -a.c / det;
    let mut acc = C64::new(0.0, 0.0);
    for (i, fi) in f.associated_functions().iter().enumerate() {
        let bin = binomial(n, i as u32)
            .to_f64()
            .expect("binomial fits in f64");
        acc += fi.evaluate(&g) * bin * c_inv.powi(i as i32) * jz.powi(i as i32 - m as i32);
    }
    Ok(acc * det.powi((m - n as i64 - 1) as i32))
}
