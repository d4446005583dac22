//! Period matrices checked against contour quadrature and against the
//! Gauss-Manin connection.

use num_complex::Complex64 as C;
use ramanujan_core::gaussmanin::{connection_eval, BasisTag};
use ramanujan_core::periods::{eisenstein_point, period_matrix, CurvePoint, PeriodMatrix};

/// Trapezoidal rule on an ellipse with foci `a`, `b` that excludes `other`;
/// returns `(oint dx/y, oint x dx/y)` on `y^2 = 4 (x - t1)^3 - t2 (x - t1) - t3`
/// with `y` continued along the contour.
fn contour(t: &CurvePoint, a: C, b: C, other: C, n: usize) -> Option<(C, C)> {
    let c = (a + b) / 2.0;
    let h = (b - a) / 2.0;
    // elliptic radius of the third root, halved
    let rho = ((other - c) / h).acosh().re.abs() / 2.0;
    if rho < 0.02 {
        // third root sits on the focal segment
        return None;
    }
    let f = |x: C| {
        let s = x - t.t1;
        4.0 * s * s * s - t.t2 * s - t.t3
    };
    let mut prev: Option<C> = None;
    let (mut w, mut v) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for k in 0..n {
        let th = std::f64::consts::TAU * k as f64 / n as f64;
        let z = C::new(rho, th);
        let x = c + h * z.cosh();
        let dx = h * z.sinh() * C::new(0.0, std::f64::consts::TAU / n as f64);
        let mut y = f(x).sqrt();
        if let Some(p) = prev {
            if (y - p).norm() > (y + p).norm() {
                y = -y;
            }
        }
        prev = Some(y);
        w += dx / y;
        v += x * dx / y;
    }
    Some((w, v))
}

fn roots(t: &CurvePoint) -> [C; 3] {
    // shifted Weierstrass roots by Durand-Kerner, independent of the library's solver
    let p = |x: C| 4.0 * x * x * x - t.t2 * x - t.t3;
    let mut r = [
        C::new(0.4, 0.9),
        C::new(0.4, 0.9).powi(2),
        C::new(0.4, 0.9).powi(3),
    ];
    for _ in 0..500 {
        for i in 0..3 {
            let mut den = C::new(4.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            r[i] -= p(r[i]) / den;
        }
    }
    r.map(|x| x + t.t1)
}

fn norm2() -> C {
    1.0 / C::new(0.0, -std::f64::consts::TAU)
}

/// Quadrature period rows for the three root pairs.
fn quadrature_rows(t: &CurvePoint) -> Vec<(C, C)> {
    let e = roots(t);
    let k = norm2().sqrt();
    [(0, 1, 2), (1, 2, 0), (0, 2, 1)]
        .iter()
        .filter_map(|&(i, j, l)| contour(t, e[i], e[j], e[l], 8000).map(|(w, v)| (k * w, k * v)))
        .collect()
}

/// Expresses each quadrature row in the AGM basis; all coefficients must be integers.
fn integrality(pm: &PeriodMatrix, rows: &[(C, C)]) -> f64 {
    let inv = pm.inverse();
    let mut worst: f64 = 0.0;
    for &(w, v) in rows {
        let m = w * inv.x[0] + v * inv.x[2];
        let n = w * inv.x[1] + v * inv.x[3];
        for z in [m, n] {
            worst = worst.max((z - C::new(z.re.round(), 0.0)).norm());
        }
    }
    worst
}

#[test]
fn legendre_determinant_by_quadrature_at_g_2i() {
    let t = eisenstein_point(C::new(0.0, 2.0), 80).unwrap();
    let rows = quadrature_rows(&t);
    assert!(rows.len() >= 2);
    // any two of the three cycles form a basis: det = +-1
    let d = rows[0].0 * rows[1].1 - rows[0].1 * rows[1].0;
    assert!((d.norm() - 1.0).abs() < 1e-10, "quadrature det = {d}");
    let pm = period_matrix(&t).unwrap();
    assert!((pm.det() - 1.0).norm() < 1e-10);
    assert!(integrality(&pm, &rows) < 1e-9);
}

#[test]
fn agm_periods_agree_with_quadrature_on_random_points() {
    let mut state = 0x2545f4914f6cdd1du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    let mut done = 0;
    while done < 20 {
        let t = CurvePoint::new(
            C::new(5.0 * next(), 5.0 * next()) / 2.0f64.sqrt(),
            C::new(5.0 * next(), 5.0 * next()) / 2.0f64.sqrt(),
            C::new(5.0 * next(), 5.0 * next()) / 2.0f64.sqrt(),
        );
        if t.discriminant().norm() <= 0.1 {
            continue;
        }
        let pm = period_matrix(&t).unwrap();
        assert!((pm.det() - 1.0).norm() < 1e-9, "det {} at {t:?}", pm.det());
        assert!(pm.b_values().b1 > 0.0);
        let rows = quadrature_rows(&t);
        assert!(rows.len() >= 2);
        assert!(integrality(&pm, &rows) < 1e-7, "at {t:?}");
        done += 1;
    }
}

#[test]
fn rectangular_lattice_for_three_real_roots() {
    // 27 t3^2 - t2^3 < 0
    for (t2, t3) in [(3.0, 0.5), (5.0, -1.0), (1.0, 0.0)] {
        let t = CurvePoint::new(C::new(0.7, 0.0), C::new(t2, 0.0), C::new(t3, 0.0));
        let (tau, _) = ramanujan_core::periods::reduce_tau(period_matrix(&t).unwrap().tau());
        assert!(tau.re.abs() < 1e-10, "tau = {tau}");
    }
}

#[test]
fn connection_matches_finite_differences() {
    let t = CurvePoint::new(C::new(0.3, -0.2), C::new(1.4, 0.6), C::new(-0.5, 0.8));
    let pm = period_matrix(&t).unwrap();
    let a = connection_eval(&t.t4(), BasisTag::Classical).unwrap();
    let h = 1e-5;
    for i in 1..4 {
        let mut plus = t.to_array();
        let mut minus = t.to_array();
        plus[i - 1] += h;
        minus[i - 1] -= h;
        let (pp, pmn) = (
            period_matrix(&CurvePoint::from_array(plus)).unwrap(),
            period_matrix(&CurvePoint::from_array(minus)).unwrap(),
        );
        let (pp, _, _) = pp.align_to(&pm);
        let (pmn, _, _) = pmn.align_to(&pm);
        let fd: Vec<C> = (0..4).map(|k| (pp.x[k] - pmn.x[k]) / (2.0 * h)).collect();
        // pm A_i^T / Delta
        let m = a[i];
        let want = [
            pm.x[0] * m[0][0] + pm.x[1] * m[0][1],
            pm.x[0] * m[1][0] + pm.x[1] * m[1][1],
            pm.x[2] * m[0][0] + pm.x[3] * m[0][1],
            pm.x[2] * m[1][0] + pm.x[3] * m[1][1],
        ];
        let scale = want.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for k in 0..4 {
            assert!(
                (fd[k] - want[k]).norm() < 1e-5 * scale,
                "t{i} entry {k}: {} vs {}",
                fd[k],
                want[k]
            );
        }
    }
}
