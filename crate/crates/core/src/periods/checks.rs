use num_complex::Complex;
use serde::Serialize;

use super::{
    period_matrix, period_matrix_generic, reduce_tau, reduced_distance, BValues, CurvePoint,
};
use crate::eisenstein::g_values;
use crate::numeric::{from_c64, Hp, C64};
use crate::Result;

/// `g(z)` as a point of the `t0 = 1` slice.
pub fn eisenstein_point(z: C64, order: i64) -> Result<CurvePoint> {
    Ok(CurvePoint::from_array(g_values(z, order)?))
}

/// `t2^3 / (27 t3^2 - t2^3)`; equals `-j(z) / 1728` at `g(z)`.
pub fn j_invariant(t: &CurvePoint) -> C64 {
    t.t2 * t.t2 * t.t2 / t.discriminant()
}

impl CurvePoint {
    /// Right action of `(k k'; 0 k^-1)`: `(t1 k^-2 + k' k^-1, t2 k^-4, t3 k^-6)`.
    pub fn act(&self, k: C64, kp: C64) -> CurvePoint {
        let ki = 1.0 / k;
        CurvePoint::new(
            self.t1 * ki * ki + kp * ki,
            self.t2 * ki.powi(4),
            self.t3 * ki.powi(6),
        )
    }
}

/// `I(t) = x2 / x1`, the ratio of second- to first-kind periods along `delta1`.
pub fn second_kind_ratio(t: &CurvePoint) -> Result<C64> {
    let pm = period_matrix(t)?;
    Ok(pm.x[1] / pm.x[0])
}

/// Same ratio computed in double-double arithmetic.
pub fn second_kind_ratio_hp(t: &CurvePoint) -> Result<Complex<Hp>> {
    let x = period_matrix_generic::<Hp>(t.to_array().map(from_c64))?;
    Ok(x[1] / x[0])
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripReport {
    pub z: C64,
    pub tau: C64,
    pub reduced_z: C64,
    pub reduced_tau: C64,
    pub distance: f64,
    pub det_error: f64,
}

impl RoundtripReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.distance < tol
    }
}

/// Compares `x1 / x3` of the periods of `g(z)` with `z`, both reduced mod `SL(2, Z)`.
pub fn roundtrip_check(z: C64, order: i64) -> Result<RoundtripReport> {
    let t = eisenstein_point(z, order)?;
    let pm = period_matrix(&t)?;
    let tau = pm.tau();
    let (rz, _) = reduce_tau(z);
    let (rt, _) = reduce_tau(tau);
    Ok(RoundtripReport {
        z,
        tau,
        reduced_z: rz,
        reduced_tau: rt,
        distance: reduced_distance(rz, rt),
        det_error: (pm.det() - 1.0).norm(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BTransformationReport {
    pub before: BValues,
    pub after: BValues,
    pub predicted: BValues,
    pub b1_error: f64,
    pub b2_error: f64,
    pub b3_error: f64,
    /// Distance of `pm(t.g) (pm(t) g)^-1` from an integer matrix.
    pub equivariance_error: f64,
}

impl BTransformationReport {
    pub fn max_error(&self) -> f64 {
        self.b1_error
            .max(self.b2_error)
            .max(self.b3_error)
            .max(self.equivariance_error)
    }
}

/// Predicted B-values at `t.g` for `g = (k k'; 0 k^-1)`.
pub fn transformed_b(b: &BValues, k: C64, kp: C64) -> BValues {
    let ki = 1.0 / k;
    BValues {
        b1: b.b1 * k.norm_sqr(),
        b2: b.b1 * kp.norm_sqr() + b.b2 * ki.norm_sqr() + (b.b3 * kp * ki.conj()).im,
        b3: b.b3 * k * ki.conj() + 2.0 * C64::i() * k * kp.conj() * b.b1,
    }
}

/// Recomputes periods at `t.g` and checks the transformation laws of `B1, B2, B3`
/// together with `pm(t.g) = pm(t) g` up to left `SL(2, Z)`.
pub fn b_transformation_check(t: &CurvePoint, k: C64, kp: C64) -> Result<BTransformationReport> {
    let pm = period_matrix(t)?;
    let moved = t.act(k, kp);
    let pm2 = period_matrix(&moved)?;
    let before = pm.b_values();
    let after = pm2.b_values();
    let predicted = transformed_b(&before, k, kp);
    let expected = pm.mul_right([[k, kp], [C64::new(0.0, 0.0), 1.0 / k]]);
    let (_, _, off) = pm2.align_to(&expected);
    let scale = 1.0 + after.b1.abs() + after.b2.abs() + after.b3.norm();
    Ok(BTransformationReport {
        before,
        after,
        predicted,
        b1_error: (after.b1 - predicted.b1).abs() / scale,
        b2_error: (after.b2 - predicted.b2).abs() / scale,
        b3_error: (after.b3 - predicted.b3).norm() / scale,
        equivariance_error: off,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::{g_constants, j_series};
    use crate::numeric::{nome, to_c64};

    #[test]
    fn eisenstein_point_is_periodic_and_limits_to_p_inf() {
        let a = eisenstein_point(C64::new(0.3, 1.1), 64).unwrap();
        let b = eisenstein_point(C64::new(1.3, 1.1), 64).unwrap();
        assert!((a.t1 - b.t1).norm() + (a.t2 - b.t2).norm() + (a.t3 - b.t3).norm() < 1e-11);
        let far = eisenstein_point(C64::new(0.0, 30.0), 16).unwrap();
        let p = g_constants::<f64>();
        for (x, y) in far.to_array().iter().zip(p) {
            assert!((x - y).norm() < 1e-12);
        }
        let i = eisenstein_point(C64::new(0.0, 1.0), 64).unwrap();
        assert!(i.t3.norm() < 1e-12);
    }

    #[test]
    fn b_values_on_the_eisenstein_locus() {
        for z in [
            C64::new(0.0, 2.0),
            C64::new(0.3, 1.2),
            C64::new(-0.45, 0.95),
        ] {
            let pm = period_matrix(&eisenstein_point(z, 80).unwrap()).unwrap();
            let b = pm.b_values();
            assert!((b.b1 - z.im).abs() < 1e-9, "B1 = {} at {z}", b.b1);
            assert!(b.b2.abs() < 1e-9);
            assert!((b.b3 - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn periods_of_eisenstein_point_are_the_embedding() {
        let z = C64::new(0.1, 1.5);
        let pm = period_matrix(&eisenstein_point(z, 80).unwrap()).unwrap();
        let target = super::super::PeriodMatrix::new(
            z,
            C64::new(-1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        );
        let (aligned, _, off) = pm.align_to(&target);
        assert!(off < 1e-9);
        assert!(aligned.max_abs_diff(&target) < 1e-9);
    }

    #[test]
    fn j_matches_series() {
        let z = C64::new(0.2, 1.3);
        let t = eisenstein_point(z, 80).unwrap();
        let j = j_series(80).evaluate(nome(z));
        let got = j_invariant(&t);
        assert!((got + j / 1728.0).norm() < 1e-8 * (1.0 + j.norm() / 1728.0));
    }

    #[test]
    fn roundtrip_samples() {
        for (z, tol) in [
            (C64::new(0.0, 2.0), 1e-8),
            (C64::new(0.5, 2.0), 1e-8),
            (C64::new(0.5, 0.9), 1e-7),
        ] {
            let r = roundtrip_check(z, 80).unwrap();
            assert!(r.passes(tol), "{r:?}");
        }
    }

    #[test]
    fn b_transformation_laws() {
        let t = CurvePoint::new(C64::new(0.2, -0.1), C64::new(1.3, 0.4), C64::new(-0.2, 0.7));
        for (k, kp) in [
            (C64::new(2.0, 0.0), C64::new(0.0, 0.0)),
            (C64::new(0.7, 0.3), C64::new(0.4, -1.1)),
            (C64::new(1.0, 0.0), C64::new(0.0, 2.0)),
        ] {
            let r = b_transformation_check(&t, k, kp).unwrap();
            assert!(r.max_error() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn b3_has_unit_modulus_on_b2_zero() {
        // from g(z) the shift k' = -i / Im z keeps B2 = 0 while moving off the Eisenstein locus
        let z = C64::new(0.15, 1.4);
        let t = eisenstein_point(z, 80).unwrap();
        for k in [C64::new(1.0, 0.0), C64::new(0.6, 0.8), C64::new(1.7, -0.4)] {
            // choose k' with |k'|^2 Im z + Im(k' conj(k^-1)) = 0
            let ki = 1.0 / k;
            let dir = C64::i() * ki;
            let w = -(dir * ki.conj()).im / (dir.norm_sqr() * z.im);
            let kp = dir * w;
            let pm = period_matrix(&t.act(k, kp)).unwrap();
            let b = pm.b_values();
            assert!(b.b2.abs() < 1e-9, "B2 = {}", b.b2);
            assert!((b.b3.norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn precision_doubling_agrees() {
        let t = eisenstein_point(C64::new(0.0, 2.0), 80).unwrap();
        let lo = second_kind_ratio(&t).unwrap();
        let hi = to_c64(second_kind_ratio_hp(&t).unwrap());
        assert!((lo - hi).norm() < 1e-9 * (1.0 + hi.norm()));
        let t2 = eisenstein_point(C64::new(1.0, 2.0), 80).unwrap();
        assert!((second_kind_ratio(&t2).unwrap() - lo).norm() < 1e-9);
    }
}
