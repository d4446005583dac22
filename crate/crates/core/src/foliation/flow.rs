use serde::{Deserialize, Serialize};

use super::{dist_to_sing, k_proximity, ra_eval};
use crate::numeric::C64;
use crate::ode::{integrate, OdeOptions, OdeStats};
use crate::periods::{period_matrix, CurvePoint};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowOptions {
    pub ode: OdeOptions,
    /// Number of equal output intervals on `[0, length]`.
    pub samples: usize,
    /// Halt when `|Delta| < floor (1 + |t|^6)`; `None` disables the check.
    pub discriminant_floor: Option<f64>,
    /// Halt when `|Ra(t)|` drops below this.
    pub singular_floor: f64,
    /// Compute period-based monitors (B2, |B3|, K-proximity) at each sample.
    pub period_monitors: bool,
    /// Tolerance and maximal denominator for the K-proximity screen.
    pub k_tol: f64,
    pub k_max_den: i64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            ode: OdeOptions::default(),
            samples: 20,
            discriminant_floor: Some(1e-8),
            singular_floor: 1e-12,
            period_monitors: true,
            k_tol: 1e-8,
            k_max_den: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowSample {
    pub s: f64,
    pub t: [C64; 3],
    pub delta: C64,
    /// `int_0^s 12 t1`, which equals `log Delta(s) - log Delta(0)` along the flow.
    pub log_delta_integral: C64,
    pub b2: Option<f64>,
    pub b3_abs: Option<f64>,
    pub dist_to_sing: f64,
    pub k_flag: Option<(i64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowTrajectory {
    pub samples: Vec<FlowSample>,
    pub stats: OdeStats,
}

fn norm6(t: &[C64]) -> f64 {
    let m: f64 = t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    1.0 + m.powi(6)
}

fn delta_of(t: &[C64]) -> C64 {
    27.0 * t[2] * t[2] - t[1] * t[1] * t[1]
}

/// Integrates `dt/ds = Ra(t)` for real `s` in `[0, length]` with complex state.
pub fn flow(start: [C64; 3], length: f64, opts: &FlowOptions) -> Result<FlowTrajectory> {
    if !length.is_finite() {
        return Err(Error::InvalidArgument("flow length must be finite".into()));
    }
    let guard = |s: f64, y: &[C64]| -> Result<()> {
        let f = ra_eval(&[y[0], y[1], y[2]]);
        let fnorm = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if fnorm < opts.singular_floor {
            return Err(Error::SingularApproach(fnorm));
        }
        if let Some(floor) = opts.discriminant_floor {
            let d = delta_of(y).norm();
            if d < floor * norm6(&y[..3]) {
                return Err(Error::DiscriminantApproach { s, delta: d });
            }
        }
        Ok(())
    };
    let y0 = vec![start[0], start[1], start[2], C64::new(0.0, 0.0)];
    guard(0.0, &y0)?;
    let n = opts.samples.max(1);
    let points: Vec<f64> = (1..=n).map(|i| length * i as f64 / n as f64).collect();
    let rhs = |_: f64, y: &[C64]| -> Result<Vec<C64>> {
        let f = ra_eval(&[y[0], y[1], y[2]]);
        Ok(vec![f[0], f[1], f[2], 12.0 * y[0]])
    };
    let (ys, stats) = if length == 0.0 {
        (vec![], OdeStats::default())
    } else {
        integrate(rhs, 0.0, &y0, &points, &opts.ode, guard)?
    };
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(sample(0.0, &y0, opts));
    for (s, y) in points.iter().zip(&ys) {
        samples.push(sample(*s, y, opts));
    }
    Ok(FlowTrajectory { samples, stats })
}

fn sample(s: f64, y: &[C64], opts: &FlowOptions) -> FlowSample {
    let t = [y[0], y[1], y[2]];
    let (mut b2, mut b3_abs, mut k_flag) = (None, None, None);
    if opts.period_monitors {
        if let Ok(pm) = period_matrix(&CurvePoint::from_array(t)) {
            let b = pm.b_values();
            b2 = Some(b.b2);
            b3_abs = Some(b.b3.norm());
            if b.b2.abs() <= opts.k_tol * (1.0 + b.b1.abs()) {
                k_flag = k_proximity(&pm, opts.k_tol, opts.k_max_den);
            }
        }
    }
    FlowSample {
        s,
        t,
        delta: delta_of(&t),
        log_delta_integral: y[3],
        b2,
        b3_abs,
        dist_to_sing: dist_to_sing(&t),
        k_flag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::g_values;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn unit_flow_from_eisenstein_point_is_closed() {
        let start = g_values(c(0.0, 2.0), 80).unwrap();
        let tr = flow(start, 1.0, &FlowOptions::default()).unwrap();
        let end = tr.samples.last().unwrap().t;
        for i in 0..3 {
            assert!(
                (end[i] - start[i]).norm() < 1e-7,
                "{:?} vs {:?}",
                end,
                start
            );
        }
    }

    #[test]
    fn flow_follows_eisenstein_translates() {
        let z0 = c(0.1, 1.2);
        let mut o = FlowOptions::default();
        o.samples = 10;
        let tr = flow(g_values(z0, 80).unwrap(), 1.0, &o).unwrap();
        for smp in &tr.samples {
            let g = g_values(z0 + smp.s, 80).unwrap();
            for i in 0..3 {
                assert!((smp.t[i] - g[i]).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn log_delta_cocycle() {
        let tr = flow(
            [c(0.3, 0.2), c(1.0, -0.5), c(0.4, 0.3)],
            0.5,
            &FlowOptions::default(),
        )
        .unwrap();
        let d0 = tr.samples[0].delta;
        for smp in &tr.samples {
            let lhs = (smp.delta / d0).norm().ln();
            assert!((lhs - smp.log_delta_integral.re).abs() < 1e-6 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn algebraic_leaf_is_invariant() {
        let mut o = FlowOptions::default();
        o.discriminant_floor = None;
        o.period_monitors = false;
        let tr = flow([c(0.5, 0.1), c(0.0, 0.0), c(0.0, 0.0)], 0.5, &o).unwrap();
        for smp in &tr.samples {
            assert_eq!(smp.t[1], c(0.0, 0.0));
            assert_eq!(smp.t[2], c(0.0, 0.0));
        }
    }

    #[test]
    fn b2_constant_along_flow() {
        let start =
            crate::foliation::leaf_uniformization(c(0.0, 1.3), c(0.4, 0.2), c(1.0, 0.5), 80)
                .unwrap();
        let tr = flow(start, 1.0, &FlowOptions::default()).unwrap();
        let b0 = tr.samples[0].b2.unwrap();
        for smp in &tr.samples {
            assert!((smp.b2.unwrap() - b0).abs() < 1e-6);
        }
    }

    #[test]
    fn guards() {
        let r = flow(
            [c(1.0, 0.0), c(12.0, 0.0), c(8.0, 0.0)],
            1.0,
            &FlowOptions::default(),
        );
        assert!(matches!(r, Err(Error::SingularApproach(_))));
        // 27 t3^2 - t2^3 = 0 at (0, 3, 1)
        let r = flow(
            [c(0.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)],
            1.0,
            &FlowOptions::default(),
        );
        assert!(matches!(r, Err(Error::DiscriminantApproach { .. })));
    }
}
