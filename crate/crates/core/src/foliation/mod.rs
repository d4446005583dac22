//! The Ramanujan vector field
//! `Ra = (t1^2 - t2/12, 4 t1 t2 - 6 t3, 6 t1 t3 - t2^2/3)` on the `t0 = 1` slice,
//! its defining 1-forms, the `G0` action, leaves through Eisenstein points and
//! the monitors used along flows.

mod flow;

pub use flow::{flow, FlowOptions, FlowSample, FlowTrajectory};

use serde::Serialize;

use crate::arith::{int, rat, t_vars, MPoly};
use crate::eisenstein::g_values;
use crate::numeric::C64;
use crate::periods::{period_matrix, CurvePoint, PeriodMatrix};
use crate::{Error, Result};

/// `Ra` as polynomials in `t0..t3` (independent of `t0`).
pub fn ra_polys() -> [MPoly; 3] {
    let (t1, t2, t3) = (MPoly::t(1), MPoly::t(2), MPoly::t(3));
    [
        &(&t1 * &t1) - &t2.scale(&rat(1, 12)),
        &(&t1 * &t2).scale(&int(4)) - &t3.scale(&int(6)),
        &(&t1 * &t3).scale(&int(6)) - &(&t2 * &t2).scale(&rat(1, 3)),
    ]
}

pub fn ra_eval(t: &[C64; 3]) -> [C64; 3] {
    let [t1, t2, t3] = *t;
    [
        t1 * t1 - t2 / 12.0,
        4.0 * t1 * t2 - 6.0 * t3,
        6.0 * t1 * t3 - t2 * t2 / 3.0,
    ]
}

/// Coefficients of `eta_1, eta_2, eta_3` on `(dt1, dt2, dt3)`:
/// `eta_1 = Ra_1 dt2 - Ra_2 dt1`, `eta_2 = Ra_2 dt3 - Ra_3 dt2`, `eta_3 = Ra_1 dt3 - Ra_3 dt1`.
pub fn eta_polys() -> [[MPoly; 3]; 3] {
    let [r1, r2, r3] = ra_polys();
    let z = MPoly::zero(t_vars());
    [
        [-&r2, r1.clone(), z.clone()],
        [z.clone(), -&r3, r2.clone()],
        [-&r3, z, r1],
    ]
}

pub fn eta_eval(t: &[C64; 3]) -> [[C64; 3]; 3] {
    let [r1, r2, r3] = ra_eval(t);
    let z = C64::new(0.0, 0.0);
    [[-r2, r1, z], [z, -r3, r2], [-r3, z, r1]]
}

/// `eta_i(Ra)` for each form, as polynomials (all zero).
pub fn eta_contractions() -> [MPoly; 3] {
    let ra = ra_polys();
    eta_polys().map(|eta| {
        let mut acc = MPoly::zero(t_vars());
        for (c, r) in eta.iter().zip(&ra) {
            acc = &acc + &(c * r);
        }
        acc
    })
}

/// Point of the singular curve `(a, 12 a^2, 8 a^3)`.
pub fn singular_point(a: C64) -> [C64; 3] {
    [a, 12.0 * a * a, 8.0 * a * a * a]
}

fn dist2(t: &[C64; 3], a: C64) -> f64 {
    let p = singular_point(a);
    (0..3).map(|i| (t[i] - p[i]).norm_sqr()).sum()
}

/// Euclidean distance from `t` to `Sing(Ra)`, minimized over complex `a` by
/// Gauss-Newton from several seeds (`t1`, square roots of `t2/12`, cube roots of `t3/8`).
pub fn dist_to_sing(t: &[C64; 3]) -> f64 {
    let mut seeds = vec![t[0], C64::new(0.0, 0.0)];
    let s2 = (t[1] / 12.0).sqrt();
    seeds.extend([s2, -s2]);
    let c3 = (t[2] / 8.0).powf(1.0 / 3.0);
    let w = C64::new(-0.5, 3f64.sqrt() / 2.0);
    seeds.extend([c3, c3 * w, c3 * w * w]);
    let mut best = f64::INFINITY;
    for mut a in seeds {
        let mut f = dist2(t, a);
        for _ in 0..100 {
            let p = singular_point(a);
            let dp = [C64::new(1.0, 0.0), 24.0 * a, 24.0 * a * a];
            let num: C64 = (0..3).map(|i| dp[i].conj() * (t[i] - p[i])).sum();
            let den: f64 = dp.iter().map(|d| d.norm_sqr()).sum();
            let step = num / den;
            let mut lambda = 1.0;
            let mut improved = false;
            while lambda > 1e-12 {
                let cand = a + step * lambda;
                let fc = dist2(t, cand);
                if fc <= f {
                    a = cand;
                    improved = fc < f;
                    f = fc;
                    break;
                }
                lambda *= 0.5;
            }
            if !improved || step.norm() < 1e-16 * (1.0 + a.norm()) {
                break;
            }
        }
        best = best.min(f);
    }
    best.sqrt()
}

/// `t . (k k'; 0 k^-1) = (t1 k^-2 + k' k^-1, t2 k^-4, t3 k^-6)`.
pub fn g0_action(t: &[C64; 3], k: C64, kp: C64) -> Result<[C64; 3]> {
    if k.norm() == 0.0 || !k.norm().is_finite() {
        return Err(Error::ZeroScale);
    }
    Ok(CurvePoint::from_array(*t).act(k, kp).to_array())
}

/// Product of `(k1 k1'; 0 k1^-1)` and `(k2 k2'; 0 k2^-1)` as a `(k, k')` pair.
pub fn g0_compose(g: (C64, C64), h: (C64, C64)) -> (C64, C64) {
    (g.0 * h.0, g.0 * h.1 + g.1 / h.0)
}

/// `u(z, c2, c4) = g(z) . ((c4 z - c2)^-1, c4; 0, c4 z - c2)`.
pub fn leaf_uniformization(z: C64, c2: C64, c4: C64, order: i64) -> Result<[C64; 3]> {
    let w = c4 * z - c2;
    if w.norm() < 1e-300 {
        return Err(Error::DegenerateScale);
    }
    let g = g_values(z, order)?;
    Ok([g[0] * w * w + c4 * w, g[1] * w.powi(4), g[2] * w.powi(6)])
}

#[derive(Debug, Clone, Serialize)]
pub struct TangencyReport {
    pub derivative: [C64; 3],
    pub field: [C64; 3],
    /// `|du/dz - lambda Ra(u)| / |du/dz|` for the best complex `lambda`.
    pub relative_deviation: f64,
    pub lambda: C64,
}

/// Central-difference `du/dz` compared with `Ra(u)` up to a complex multiple.
pub fn tangency_check(z: C64, c2: C64, c4: C64, order: i64) -> Result<TangencyReport> {
    let h = 1e-5;
    let up = leaf_uniformization(z + h, c2, c4, order)?;
    let um = leaf_uniformization(z - h, c2, c4, order)?;
    let u = leaf_uniformization(z, c2, c4, order)?;
    let d: [C64; 3] = std::array::from_fn(|i| (up[i] - um[i]) / (2.0 * h));
    let f = ra_eval(&u);
    let ff: f64 = f.iter().map(|x| x.norm_sqr()).sum();
    if ff == 0.0 {
        return Err(Error::SingularApproach(0.0));
    }
    let lambda: C64 = (0..3).map(|i| f[i].conj() * d[i]).sum::<C64>() / ff;
    let dn: f64 = d.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let res: f64 = (0..3)
        .map(|i| (d[i] - lambda * f[i]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(TangencyReport {
        derivative: d,
        field: f,
        relative_deviation: res / dn.max(1e-300),
        lambda,
    })
}

/// `alpha(t) = (12 t1, -12 t1^2 + t2, 4 t1^3 - t2 t1 + t3)`.
pub fn alt_chart(t: &[C64; 3]) -> [C64; 3] {
    let [t1, t2, t3] = *t;
    [
        12.0 * t1,
        -12.0 * t1 * t1 + t2,
        4.0 * t1 * t1 * t1 - t2 * t1 + t3,
    ]
}

pub fn alt_chart_polys() -> [MPoly; 3] {
    let (t1, t2, t3) = (MPoly::t(1), MPoly::t(2), MPoly::t(3));
    let t1sq = &t1 * &t1;
    [
        t1.scale(&int(12)),
        &t2 - &t1sq.scale(&int(12)),
        &(&(&t1sq * &t1).scale(&int(4)) - &(&t2 * &t1)) + &t3,
    ]
}

/// The field in the alternate chart: `(-t2, -6 t3, t1 t3 - t2^2 / 4)`.
pub fn ra_alt_polys() -> [MPoly; 3] {
    let (t1, t2, t3) = (MPoly::t(1), MPoly::t(2), MPoly::t(3));
    [
        -&t2,
        t3.scale(&int(-6)),
        &(&t1 * &t3) - &(&t2 * &t2).scale(&rat(1, 4)),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct AltFieldReport {
    pub holds: bool,
    /// Rendered `Jac(alpha) Ra - Ra_alt(alpha)` per component.
    pub residuals: Vec<String>,
}

/// Exact check that `alpha` pushes `Ra` forward to the alternate field.
pub fn alt_field_check() -> AltFieldReport {
    let alpha = alt_chart_polys();
    let ra = ra_polys();
    let subst = [
        MPoly::t(0),
        alpha[0].clone(),
        alpha[1].clone(),
        alpha[2].clone(),
    ];
    let target = ra_alt_polys().map(|p| p.compose(&subst));
    let residuals: Vec<MPoly> = (0..3)
        .map(|i| {
            let mut push = MPoly::zero(t_vars());
            for j in 0..3 {
                push = &push + &(&alpha[i].partial(j + 1) * &ra[j]);
            }
            &push - &target[i]
        })
        .collect();
    AltFieldReport {
        holds: residuals.iter().all(MPoly::is_zero),
        residuals: residuals.iter().map(|r| r.to_string()).collect(),
    }
}

/// Integer pair `(m, n)` with `m x2 + n x4 ~ 0`, i.e. a cycle on which `x dx / y`
/// nearly integrates to zero. Screened by continued fractions of `-x4 / x2`.
pub fn k_proximity(pm: &PeriodMatrix, tol: f64, max_den: i64) -> Option<(i64, i64)> {
    let (x2, x4) = (pm.x[1], pm.x[3]);
    let scale = x2.norm().max(x4.norm());
    if scale == 0.0 {
        return Some((1, 0));
    }
    if x2.norm() <= tol * scale {
        return Some((1, 0));
    }
    let r = -x4 / x2;
    if r.im.abs() > tol * (1.0 + r.norm()) {
        return None;
    }
    // m/n close to r.re
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut x = r.re;
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a.checked_mul(h1)? + h0, a.checked_mul(k1)? + k0);
        if k2.abs() > max_den {
            break;
        }
        if (h2 as f64 / k2 as f64 - r.re).abs() <= tol * (1.0 + r.re.abs()) {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a as f64;
        if frac == 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Monitors {
    pub b2: f64,
    pub b3_abs: f64,
    pub dist_to_sing: f64,
    pub delta: C64,
}

pub fn invariant_monitors(t: &[C64; 3]) -> Result<Monitors> {
    let p = CurvePoint::from_array(*t);
    let b = period_matrix(&p)?.b_values();
    Ok(Monitors {
        b2: b.b2,
        b3_abs: b.b3.norm(),
        dist_to_sing: dist_to_sing(t),
        delta: p.discriminant(),
    })
}
