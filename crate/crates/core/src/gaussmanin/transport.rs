use serde::{Deserialize, Serialize};

use super::{BasisTag, CompiledConnection};
use crate::numeric::C64;
use crate::ode::{integrate, OdeOptions, OdeStats};
use crate::periods::{period_matrix, CurvePoint, PeriodMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportOptions {
    pub ode: OdeOptions,
    pub basis: BasisTag,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions {
            ode: OdeOptions::default(),
            basis: BasisTag::Classical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportResult {
    pub pm: PeriodMatrix,
    /// Smallest `|Delta|` seen at an accepted step.
    pub min_abs_delta: f64,
    pub stats: OdeStats,
}

/// Solves `d pm / ds = pm (sum_i A_i(t) t_i'(s) / Delta(t))^T` along `path(s) = (t, t')`
/// for `s` from `s0` to `s1`.
pub fn transport_along<P>(
    pm0: &PeriodMatrix,
    path: P,
    s0: f64,
    s1: f64,
    opts: &TransportOptions,
) -> Result<TransportResult>
where
    P: Fn(f64) -> ([C64; 4], [C64; 4]),
{
    let conn = CompiledConnection::<f64>::new(opts.basis);
    let rhs = |s: f64, y: &[C64]| -> Result<Vec<C64>> {
        let (t, dt) = path(s);
        let a = conn.eval(&t)?;
        let mut m = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..4 {
            for r in 0..2 {
                for c in 0..2 {
                    m[r][c] += a[i][r][c] * dt[i];
                }
            }
        }
        // (pm M^T)_{rc} = sum_k pm_{rk} M_{ck}
        Ok(vec![
            y[0] * m[0][0] + y[1] * m[0][1],
            y[0] * m[1][0] + y[1] * m[1][1],
            y[2] * m[0][0] + y[3] * m[0][1],
            y[2] * m[1][0] + y[3] * m[1][1],
        ])
    };
    let mut min_delta = conn.delta(&path(s0).0).norm();
    let on_step = |s: f64, _: &[C64]| -> Result<()> {
        let d = conn.delta(&path(s).0).norm();
        min_delta = min_delta.min(d);
        Ok(())
    };
    if s0 == s1 {
        return Ok(TransportResult {
            pm: *pm0,
            min_abs_delta: min_delta,
            stats: OdeStats::default(),
        });
    }
    let (ys, stats) = integrate(rhs, s0, &pm0.x, &[s1], &opts.ode, on_step)?;
    let y = ys
        .last()
        .ok_or_else(|| Error::InvalidArgument("empty transport output".into()))?;
    Ok(TransportResult {
        pm: PeriodMatrix {
            x: [y[0], y[1], y[2], y[3]],
        },
        min_abs_delta: min_delta,
        stats,
    })
}

/// Transport along the polyline through `waypoints` (each a full `(t0, t1, t2, t3)`).
pub fn picard_fuchs_transport(
    pm0: &PeriodMatrix,
    waypoints: &[[C64; 4]],
    opts: &TransportOptions,
) -> Result<TransportResult> {
    if waypoints.is_empty() {
        return Err(Error::InvalidArgument(
            "transport path needs at least one waypoint".into(),
        ));
    }
    let mut pm = *pm0;
    let conn = CompiledConnection::<f64>::new(opts.basis);
    let mut min_delta = conn.delta(&waypoints[0]).norm();
    let mut stats = OdeStats::default();
    for w in waypoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let path = move |s: f64| {
            let mut t = [C64::new(0.0, 0.0); 4];
            let mut d = [C64::new(0.0, 0.0); 4];
            for i in 0..4 {
                t[i] = a[i] + (b[i] - a[i]) * s;
                d[i] = b[i] - a[i];
            }
            (t, d)
        };
        let r = transport_along(&pm, path, 0.0, 1.0, opts)?;
        pm = r.pm;
        min_delta = min_delta.min(r.min_abs_delta);
        stats.accepted += r.stats.accepted;
        stats.rejected += r.stats.rejected;
        stats.evaluations += r.stats.evaluations;
    }
    Ok(TransportResult {
        pm,
        min_abs_delta: min_delta,
        stats,
    })
}

/// Transport once around the circle `t_coord = center + (base_coord - center) e^(2 pi i s)`,
/// other coordinates fixed at `base`.
pub fn transport_circle(
    pm0: &PeriodMatrix,
    base: [C64; 4],
    coord: usize,
    center: C64,
    opts: &TransportOptions,
) -> Result<TransportResult> {
    if coord > 3 {
        return Err(Error::InvalidArgument(format!(
            "coordinate index {coord} out of range"
        )));
    }
    let r0 = base[coord] - center;
    let path = move |s: f64| {
        let e = C64::new(0.0, std::f64::consts::TAU * s).exp();
        let mut t = base;
        let mut d = [C64::new(0.0, 0.0); 4];
        t[coord] = center + r0 * e;
        d[coord] = r0 * e * C64::new(0.0, std::f64::consts::TAU);
        (t, d)
    };
    transport_along(pm0, path, 0.0, 1.0, opts)
}

/// Central differences of the period map against `pm A_i^T / Delta` on the `t0 = 1` slice;
/// returns the worst relative deviation over `i = 1, 2, 3`.
pub fn connection_fd_check(t: &CurvePoint, h: f64) -> Result<f64> {
    let pm = period_matrix(t)?;
    let a = CompiledConnection::<f64>::new(BasisTag::Classical).eval(&t.t4())?;
    let mut worst: f64 = 0.0;
    for i in 1..4 {
        let mut plus = t.to_array();
        let mut minus = t.to_array();
        plus[i - 1] += h;
        minus[i - 1] -= h;
        let (pp, _, _) = period_matrix(&CurvePoint::from_array(plus))?.align_to(&pm);
        let (pn, _, _) = period_matrix(&CurvePoint::from_array(minus))?.align_to(&pm);
        let m = a[i];
        let want = pm.mul_right([[m[0][0], m[1][0]], [m[0][1], m[1][1]]]);
        let scale = want
            .x
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        for k in 0..4 {
            let fd = (pp.x[k] - pn.x[k]) / (2.0 * h);
            worst = worst.max((fd - want.x[k]).norm() / scale);
        }
    }
    Ok(worst)
}

/// Monodromy of the period matrix around the root `t3 = sqrt(t2^3 / 27)` of the
/// discriminant, on a circle of the given radius in the `t3`-plane (`t1 = 0`).
/// Returns the matrix `pm_end pm_start^-1` and its distance to the nearest integer matrix.
pub fn discriminant_monodromy(
    t2: C64,
    radius: f64,
    opts: &TransportOptions,
) -> Result<([f64; 4], f64)> {
    let root = (t2 * t2 * t2 / 27.0).sqrt();
    let base = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), t2, root + radius];
    let pm = period_matrix(&CurvePoint::new(base[1], base[2], base[3]))?;
    let r = transport_circle(&pm, base, 3, root, opts)?;
    let m = r.pm.mul(&pm.inverse());
    let ints = m.x.map(|z| z.re.round() + 0.0);
    let off = (0..4)
        .map(|k| (m.x[k] - C64::new(ints[k], 0.0)).norm())
        .fold(0.0, f64::max);
    Ok((ints, off))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tight() -> TransportOptions {
        let mut o = TransportOptions::default();
        o.ode.rtol = 1e-12;
        o.ode.atol = 1e-14;
        o
    }

    fn start() -> ([C64; 4], PeriodMatrix) {
        let t = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        (
            t,
            period_matrix(&CurvePoint::new(t[1], t[2], t[3])).unwrap(),
        )
    }

    #[test]
    fn constant_path() {
        let (t, pm) = start();
        let r = picard_fuchs_transport(&pm, &[t, t], &tight()).unwrap();
        assert!(r.pm.max_abs_diff(&pm) < 1e-14);
    }

    #[test]
    fn segment_matches_agm() {
        let (t, pm) = start();
        let mut t2 = t;
        t2[3] = c(2.0, 0.0);
        let r = picard_fuchs_transport(&pm, &[t, t2], &tight()).unwrap();
        let direct = period_matrix(&CurvePoint::new(t2[1], t2[2], t2[3])).unwrap();
        let (aligned, _, off) = r.pm.align_to(&direct);
        assert!(off < 1e-6, "off = {off}");
        assert!(aligned.max_abs_diff(&direct) < 1e-6);
    }

    #[test]
    fn contractible_loop_is_trivial() {
        let (t, _) = start();
        // circle in t2 of radius 0.3 around 0; Delta = 27 - t2^3 has no zero inside
        let base = [t[0], t[1], c(0.3, 0.0), t[3]];
        let pm_base = period_matrix(&CurvePoint::new(base[1], base[2], base[3])).unwrap();
        let r = transport_circle(&pm_base, base, 2, c(0.0, 0.0), &tight()).unwrap();
        assert!(r.pm.max_abs_diff(&pm_base) < 1e-8);
    }

    #[test]
    fn finite_difference_helper() {
        let t = CurvePoint::new(c(0.3, -0.2), c(1.4, 0.6), c(-0.5, 0.8));
        assert!(connection_fd_check(&t, 1e-5).unwrap() < 1e-5);
        let (m, off) = discriminant_monodromy(c(2.0, 0.5), 0.4, &tight()).unwrap();
        assert!(off < 1e-6);
        assert_eq!(m[0] * m[3] - m[1] * m[2], 1.0);
    }

    #[test]
    fn monodromy_is_in_sl2z() {
        // loop in t3 around the root t3 = sqrt(t2^3 / 27) of the discriminant
        let t2 = c(3.0, 0.0);
        let root = (t2 * t2 * t2 / 27.0).sqrt();
        let base = [c(1.0, 0.0), c(0.0, 0.0), t2, root + 0.5];
        let pm = period_matrix(&CurvePoint::new(base[1], base[2], base[3])).unwrap();
        let r = transport_circle(&pm, base, 3, root, &tight()).unwrap();
        let m = r.pm.mul(&pm.inverse());
        let ints: Vec<f64> = m.x.iter().map(|z| z.re.round()).collect();
        for (z, n) in m.x.iter().zip(&ints) {
            assert!((z - n).norm() < 1e-6, "{m:?}");
        }
        assert_eq!(ints[0] * ints[3] - ints[1] * ints[2], 1.0);
        assert!(
            ints != vec![1.0, 0.0, 0.0, 1.0],
            "loop around the discriminant is nontrivial"
        );
    }
}
