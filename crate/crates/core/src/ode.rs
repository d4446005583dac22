//! Dormand-Prince 5(4) integrator for complex-valued systems along a real parameter.

use serde::{Deserialize, Serialize};

use crate::numeric::C64;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; `None` picks `(span) / 100`.
    pub h_init: Option<f64>,
    /// Steps below this size abort with [`Error::StepFailure`].
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_min: 1e-13,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights are the last row of A; E = b5 - b4
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn axpy(y: &[C64], h: f64, terms: &[(f64, &Vec<C64>)]) -> Vec<C64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        if *c == 0.0 {
            continue;
        }
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += ki * (h * c);
        }
    }
    out
}

/// Integrates `y' = f(s, y)` from `s0`, returning the state at each of the
/// increasing `points` (all `>= s0`). Steps are clipped to land on every point.
/// `on_step(s, y)` runs after every accepted step and may abort with an error.
pub fn integrate<F, G>(
    mut f: F,
    s0: f64,
    y0: &[C64],
    points: &[f64],
    opts: &OdeOptions,
    mut on_step: G,
) -> Result<(Vec<Vec<C64>>, OdeStats)>
where
    F: FnMut(f64, &[C64]) -> Result<Vec<C64>>,
    G: FnMut(f64, &[C64]) -> Result<()>,
{
    let mut stats = OdeStats::default();
    let mut out = Vec::with_capacity(points.len());
    let Some(&last) = points.last() else {
        return Ok((out, stats));
    };
    assert!(
        points.windows(2).all(|w| w[0] <= w[1]) && points[0] >= s0,
        "sample points must be increasing"
    );
    let span = last - s0;
    let mut s = s0;
    let mut y = y0.to_vec();
    let mut h = opts.h_init.unwrap_or(span / 100.0).max(opts.h_min);
    let mut k1 = f(s, &y)?;
    stats.evaluations += 1;
    for &target in points {
        while s < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::StepFailure { s, step: h });
            }
            let remaining = target - s;
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            let mut k: Vec<Vec<C64>> = vec![k1.clone()];
            for stage in 1..7 {
                let terms: Vec<(f64, &Vec<C64>)> =
                    (0..stage).map(|j| (A[stage][j], &k[j])).collect();
                let ys = axpy(&y, step, &terms);
                k.push(f(s + C[stage] * step, &ys)?);
                stats.evaluations += 1;
            }
            let y_new = axpy(
                &y,
                step,
                &(0..6).map(|j| (A[6][j], &k[j])).collect::<Vec<_>>(),
            );
            let mut err = 0.0f64;
            for i in 0..y.len() {
                let e: C64 = (0..7).map(|j| k[j][i] * E[j]).sum::<C64>() * step;
                let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                let ratio = e.norm() / sc;
                // f64::max would silently drop a NaN
                err = if ratio.is_finite() && y_new[i].norm().is_finite() {
                    err.max(ratio)
                } else {
                    f64::INFINITY
                };
            }
            if err <= 1.0 {
                s = if clipped { target } else { s + step };
                y = y_new;
                k1 = k.pop().expect("seven stages");
                stats.accepted += 1;
                on_step(s, &y)?;
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !clipped || step * grow > h {
                    h = step * grow;
                }
            } else {
                stats.rejected += 1;
                let shrink = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    0.1
                };
                h = step * shrink;
                if h < opts.h_min {
                    return Err(Error::StepFailure { s, step: h });
                }
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let (ys, stats) = integrate(
            |_, y| Ok(vec![y[0]]),
            0.0,
            &[C64::new(1.0, 0.0)],
            &[0.5, 1.0],
            &OdeOptions::default(),
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((ys[0][0].re - 0.5f64.exp()).abs() < 1e-9);
        assert!((ys[1][0].re - 1f64.exp()).abs() < 1e-9);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn rotation_conserves_modulus() {
        // y' = i y keeps |y| = 1
        let (ys, _) = integrate(
            |_, y| Ok(vec![y[0] * C64::new(0.0, 1.0)]),
            0.0,
            &[C64::new(1.0, 0.0)],
            &[std::f64::consts::TAU],
            &OdeOptions {
                rtol: 1e-12,
                atol: 1e-14,
                ..Default::default()
            },
            |_, y| {
                assert!((y[0].norm() - 1.0).abs() < 1e-9);
                Ok(())
            },
        )
        .unwrap();
        assert!((ys[0][0] - C64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn blow_up_reports_step_failure() {
        // y' = y^2 from y(0) = 1 blows up at s = 1
        let r = integrate(
            |_, y| Ok(vec![y[0] * y[0]]),
            0.0,
            &[C64::new(1.0, 0.0)],
            &[2.0],
            &OdeOptions::default(),
            |_, _| Ok(()),
        );
        assert!(matches!(r, Err(Error::StepFailure { .. })));
    }

    #[test]
    fn observer_can_abort() {
        let r = integrate(
            |_, _| Ok(vec![C64::new(1.0, 0.0)]),
            0.0,
            &[C64::new(0.0, 0.0)],
            &[1.0],
            &OdeOptions::default(),
            |s, _| {
                if s > 0.5 {
                    Err(Error::SingularApproach(s))
                } else {
                    Ok(())
                }
            },
        );
        assert!(matches!(r, Err(Error::SingularApproach(_))));
    }
}
