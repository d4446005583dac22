//! Period map of `y^2 = 4 (x - t1)^3 - t2 (x - t1) - t3` (the `t0 = 1` slice).
//!
//! For a symplectic basis `(delta1, delta2)` of H_1 the period matrix is
//! `x = c (int_d1 dx/y, int_d1 x dx/y; int_d2 dx/y, int_d2 x dx/y)` with
//! `c = 1 / sqrt(-2 pi i)`, which makes `det x = 1` through the Legendre relation.
//! Periods come from the complex AGM on the roots of `4X^3 - t2 X - t3`.

mod checks;
mod reduce;

pub use checks::{
    b_transformation_check, eisenstein_point, j_invariant, roundtrip_check, second_kind_ratio,
    second_kind_ratio_hp, BTransformationReport, RoundtripReport,
};
pub use reduce::{reduce_tau, reduced_distance, Sl2z};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::numeric::{csqrt, from_c64, to_c64, Real, C64};
use crate::{Error, Result};

/// Parameters `(t1, t2, t3)` with `t0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t1: C64,
    pub t2: C64,
    pub t3: C64,
}

impl CurvePoint {
    pub fn new(t1: C64, t2: C64, t3: C64) -> Self {
        CurvePoint { t1, t2, t3 }
    }

    pub fn from_array(t: [C64; 3]) -> Self {
        CurvePoint {
            t1: t[0],
            t2: t[1],
            t3: t[2],
        }
    }

    pub fn to_array(&self) -> [C64; 3] {
        [self.t1, self.t2, self.t3]
    }

    /// `(1, t1, t2, t3)`.
    pub fn t4(&self) -> [C64; 4] {
        [C64::new(1.0, 0.0), self.t1, self.t2, self.t3]
    }

    /// `27 t3^2 - t2^3`.
    pub fn discriminant(&self) -> C64 {
        27.0 * self.t3 * self.t3 - self.t2 * self.t2 * self.t2
    }
}

/// `x = (x1 x2; x3 x4)`: rows are cycles, columns are `dx/y` and `x dx/y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodMatrix {
    pub x: [C64; 4],
}

/// `B1 = Im(x1 conj x3)`, `B2 = Im(x2 conj x4)`, `B3 = x1 conj x4 - conj x2 x3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BValues {
    pub b1: f64,
    pub b2: f64,
    pub b3: C64,
}

impl PeriodMatrix {
    pub fn new(x1: C64, x2: C64, x3: C64, x4: C64) -> Self {
        PeriodMatrix {
            x: [x1, x2, x3, x4],
        }
    }

    pub fn det(&self) -> C64 {
        self.x[0] * self.x[3] - self.x[1] * self.x[2]
    }

    /// `x1 / x3`, a point of the upper half plane.
    pub fn tau(&self) -> C64 {
        self.x[0] / self.x[2]
    }

    pub fn b_values(&self) -> BValues {
        let [x1, x2, x3, x4] = self.x;
        BValues {
            b1: (x1 * x3.conj()).im,
            b2: (x2 * x4.conj()).im,
            b3: x1 * x4.conj() - x2.conj() * x3,
        }
    }

    /// `x * (a b; c d)`.
    pub fn mul_right(&self, m: [[C64; 2]; 2]) -> PeriodMatrix {
        let [x1, x2, x3, x4] = self.x;
        PeriodMatrix::new(
            x1 * m[0][0] + x2 * m[1][0],
            x1 * m[0][1] + x2 * m[1][1],
            x3 * m[0][0] + x4 * m[1][0],
            x3 * m[0][1] + x4 * m[1][1],
        )
    }

    /// `gamma * x` for an integer matrix `gamma`.
    pub fn mul_left(&self, g: &Sl2z) -> PeriodMatrix {
        let [x1, x2, x3, x4] = self.x;
        let [a, b, cc, d] = g.0.map(|v| v as f64);
        PeriodMatrix::new(
            a * x1 + b * x3,
            a * x2 + b * x4,
            cc * x1 + d * x3,
            cc * x2 + d * x4,
        )
    }

    pub fn inverse(&self) -> PeriodMatrix {
        let d = self.det();
        let [x1, x2, x3, x4] = self.x;
        PeriodMatrix::new(x4 / d, -x2 / d, -x3 / d, x1 / d)
    }

    pub fn mul(&self, o: &PeriodMatrix) -> PeriodMatrix {
        self.mul_right([[o.x[0], o.x[1]], [o.x[2], o.x[3]]])
    }

    pub fn max_abs_diff(&self, o: &PeriodMatrix) -> f64 {
        (0..4)
            .map(|i| (self.x[i] - o.x[i]).norm())
            .fold(0.0, f64::max)
    }

    /// Left `SL(2, Z)` translate of `self` closest to `reference`:
    /// returns `(gamma * self, gamma, distance of self's ratio to an integer matrix)`.
    pub fn align_to(&self, reference: &PeriodMatrix) -> (PeriodMatrix, Sl2z, f64) {
        let m = reference.mul(&self.inverse());
        let r: [f64; 4] = m.x.map(|z| z.re.round());
        let off = (0..4)
            .map(|i| (m.x[i] - C64::new(r[i], 0.0)).norm())
            .fold(0.0, f64::max);
        let g = Sl2z(r.map(|v| v as i64));
        (self.mul_left(&g), g, off)
    }
}

/// Roots of `4X^3 - t2 X - t3`, sorted by real part then imaginary part,
/// polished by Newton iteration in the working precision.
pub fn weierstrass_roots<T: Real>(t2: Complex<T>, t3: Complex<T>) -> Result<[Complex<T>; 3]> {
    let (p2, p3) = (to_c64(t2), to_c64(t3));
    // depressed cubic X^3 + p X + q with p = -t2/4, q = -t3/4
    let p = -p2 / 4.0;
    let q = -p3 / 4.0;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let mut u3 = -q / 2.0 + disc;
    if u3.norm() < (-q / 2.0 - disc).norm() {
        u3 = -q / 2.0 - disc;
    }
    let mut roots64 = [C64::new(0.0, 0.0); 3];
    if u3.norm() == 0.0 {
        // p = q = 0: triple root at the origin
    } else {
        let u = u3.powf(1.0 / 3.0);
        let w = C64::new(-0.5, 3f64.sqrt() / 2.0);
        let mut uk = u;
        for r in roots64.iter_mut() {
            *r = uk - p / (3.0 * uk);
            uk *= w;
        }
    }
    let four = T::from_f64(4.0);
    let mut roots: [Complex<T>; 3] = roots64.map(from_c64);
    for r in roots.iter_mut() {
        for _ in 0..60 {
            let f = *r * *r * *r * four - t2 * *r - t3;
            let df = *r * *r * T::from_f64(12.0) - t2;
            if df.norm() == T::zero() {
                break;
            }
            let step = f / df;
            *r = *r - step;
            if step.norm().to_f64() <= T::unit_roundoff() * (1.0 + r.norm().to_f64()) {
                break;
            }
        }
    }
    let scale = roots
        .iter()
        .map(|z| z.norm().to_f64())
        .fold(1e-300, f64::max);
    // real parts equal up to rounding count as ties
    let before = |a: &Complex<T>, b: &Complex<T>| {
        let (ra, rb) = (a.re.to_f64(), b.re.to_f64());
        if (ra - rb).abs() <= 1e-12 * scale {
            a.im.to_f64() < b.im.to_f64()
        } else {
            ra < rb
        }
    };
    for i in 1..3 {
        let mut j = i;
        while j > 0 && before(&roots[j], &roots[j - 1]) {
            roots.swap(j, j - 1);
            j -= 1;
        }
    }
    let gap = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| (roots[i] - roots[j]).norm().to_f64())
        .fold(f64::INFINITY, f64::min);
    if gap < 1e-7 * scale || roots.iter().any(|r| !r.norm().to_f64().is_finite()) {
        return Err(Error::RootSeparationFailure(gap));
    }
    Ok(roots)
}

/// Complex AGM with the optimal branch choice at every step; also returns
/// `S = sum_{n >= 0} 2^(n-1) c_n^2` with `c_0^2 = a_0^2 - b_0^2`, `c_{n+1} = (a_n - b_n) / 2`.
pub fn agm_with_sum<T: Real>(a0: Complex<T>, b0: Complex<T>) -> (Complex<T>, Complex<T>) {
    let half = T::from_f64(0.5);
    let (mut a, mut b) = (a0, b0);
    let mut sum = (a * a - b * b) * half;
    let mut pow = T::one();
    // convergence is quadratic: one more step after |a - b| ~ sqrt(eps) |a| reaches full precision
    let tol = T::from_f64(T::unit_roundoff().sqrt());
    for _ in 0..200 {
        let last = (a - b).norm() <= tol * a.norm();
        let an = (a + b) * half;
        let mut bn = csqrt(a * b);
        if (an - bn).norm() > (an + bn).norm() {
            bn = -bn;
        }
        let cn = (a - b) * half;
        sum = sum + cn * cn * pow;
        pow = pow * T::from_f64(2.0);
        a = an;
        b = bn;
        if last {
            break;
        }
    }
    (a, sum)
}

/// For the apex root `e_a`: the period `w = int dX/y` and `v = int X dX/y` over the
/// cycle around the other two roots (Weierstrass coordinates).
fn apex_periods<T: Real>(
    ea: Complex<T>,
    eb: Complex<T>,
    ec: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let a0 = csqrt(ea - ec);
    let mut b0 = csqrt(ea - eb);
    if (a0 - b0).norm() > (a0 + b0).norm() {
        b0 = -b0;
    }
    let (m, s) = agm_with_sum(a0, b0);
    let w = Complex::new(T::PI(), T::zero()) / m;
    let v = w * (ec + s);
    (w, v)
}

/// `1 / sqrt(-2 pi i) = (1 + i) / (2 sqrt(pi))`.
pub fn normalization<T: Real>() -> Complex<T> {
    let k = T::one() / (T::from_f64(2.0) * T::PI().sqrt());
    Complex::new(k, k)
}

/// Relative size of `27 t3^2 - t2^3` below which the fiber counts as singular.
pub const DISCRIMINANT_REL_EPS: f64 = 1e-13;

/// Period matrix in any working precision.
pub fn period_matrix_generic<T: Real>(t: [Complex<T>; 3]) -> Result<[Complex<T>; 4]> {
    let [t1, t2, t3] = t;
    let disc = t3 * t3 * T::from_f64(27.0) - t2 * t2 * t2;
    let size = 27.0 * t3.norm_sqr().to_f64() + t2.norm().to_f64().powi(3);
    if !(disc.norm().to_f64() > DISCRIMINANT_REL_EPS * size) {
        return Err(Error::OnDiscriminant(disc.norm().to_f64()));
    }
    let e = weierstrass_roots(t2, t3)?;
    let cand = [
        apex_periods(e[0], e[1], e[2]),
        apex_periods(e[1], e[2], e[0]),
        apex_periods(e[2], e[0], e[1]),
    ];
    // two of the three cycles form a basis exactly when their Legendre determinant
    // is +-1; take the first such pair in a fixed order and orient it to +1
    let n = normalization::<T>();
    let n2 = n * n;
    let mut chosen = None;
    let mut worst = f64::INFINITY;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let d = n2 * (cand[i].0 * cand[j].1 - cand[i].1 * cand[j].0);
        let err = (d.norm() - T::one()).abs().to_f64();
        worst = worst.min(err);
        if err < 1e-6 {
            chosen = Some((i, j));
            break;
        }
    }
    let (i, j) = chosen.ok_or(Error::RootSeparationFailure(worst))?;
    let (mut p, q) = (cand[i], cand[j]);
    if (n2 * (p.0 * q.1 - p.1 * q.0)).re < T::zero() {
        p = (-p.0, -p.1);
    }
    // undo the shift x = X + t1 in the second column
    Ok([n * p.0, n * (p.1 + t1 * p.0), n * q.0, n * (q.1 + t1 * q.0)])
}

/// Normalized period matrix at `t` (double precision).
pub fn period_matrix(t: &CurvePoint) -> Result<PeriodMatrix> {
    let x = period_matrix_generic::<f64>(t.to_array())?;
    Ok(PeriodMatrix { x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_solve_the_cubic() {
        let (t2, t3) = (C64::new(1.5, -0.3), C64::new(0.2, 2.0));
        let r = weierstrass_roots(t2, t3).unwrap();
        for x in r {
            assert!((4.0 * x * x * x - t2 * x - t3).norm() < 1e-13);
        }
        assert!((r[0] + r[1] + r[2]).norm() < 1e-14);
        assert!(r[0].re <= r[1].re && r[1].re <= r[2].re);
    }

    #[test]
    fn double_root_is_refused() {
        // 4X^3 - 3X + 1 = (X + 1)(2X - 1)^2
        let r = weierstrass_roots(C64::new(3.0, 0.0), C64::new(-1.0, 0.0));
        assert!(matches!(r, Err(Error::RootSeparationFailure(_))));
        let pm = period_matrix(&CurvePoint::new(
            C64::new(0.0, 0.0),
            C64::new(3.0, 0.0),
            C64::new(-1.0, 0.0),
        ));
        assert!(matches!(pm, Err(Error::OnDiscriminant(_))));
    }

    #[test]
    fn agm_of_real_numbers() {
        // AGM(1, sqrt 2) = 1.1981402347355922...
        let (m, _) = agm_with_sum(C64::new(1.0, 0.0), C64::new(2f64.sqrt(), 0.0));
        assert!((m.re - 1.1981402347355922).abs() < 1e-15);
    }

    #[test]
    fn normalization_squares_to_inverse_of_minus_two_pi_i() {
        let n = normalization::<f64>();
        let prod = n * n * C64::new(0.0, -std::f64::consts::TAU);
        assert!((prod - 1.0).norm() < 1e-15);
    }

    #[test]
    fn period_matrix_has_unit_determinant_and_orientation() {
        for t in [[0.3, 2.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 4.0, -0.5]] {
            let p = CurvePoint::new(
                C64::new(t[0], 0.1),
                C64::new(t[1], -0.2),
                C64::new(t[2], 0.3),
            );
            let pm = period_matrix(&p).unwrap();
            assert!((pm.det() - 1.0).norm() < 1e-12, "det = {}", pm.det());
            assert!(pm.b_values().b1 > 0.0);
        }
    }

    #[test]
    fn left_action_preserves_b_values() {
        let p = CurvePoint::new(C64::new(0.2, 0.4), C64::new(1.0, 1.0), C64::new(-0.3, 0.2));
        let pm = period_matrix(&p).unwrap();
        let g = Sl2z([2, 1, 3, 2]);
        let (a, b) = (pm.b_values(), pm.mul_left(&g).b_values());
        assert!(
            (a.b1 - b.b1).abs() < 1e-12
                && (a.b2 - b.b2).abs() < 1e-12
                && (a.b3 - b.b3).norm() < 1e-12
        );
    }

    #[test]
    fn alignment_recovers_integer_matrix() {
        let p = CurvePoint::new(C64::new(0.2, 0.4), C64::new(1.0, 1.0), C64::new(-0.3, 0.2));
        let pm = period_matrix(&p).unwrap();
        let g = Sl2z([1, -2, 1, -1]);
        let moved = pm.mul_left(&g);
        let (back, h, off) = moved.align_to(&pm);
        assert!(off < 1e-12);
        assert!(back.max_abs_diff(&pm) < 1e-12);
        assert_eq!(h.det(), 1);
    }
}
