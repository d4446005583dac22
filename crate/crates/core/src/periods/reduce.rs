use serde::{Deserialize, Serialize};

use crate::numeric::C64;

/// Integer matrix `(a b; c d)` stored row-major, acting by `(a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sl2z(pub [i64; 4]);

impl Sl2z {
    pub const IDENTITY: Sl2z = Sl2z([1, 0, 0, 1]);
    pub const T: Sl2z = Sl2z([1, 1, 0, 1]);
    pub const T_INV: Sl2z = Sl2z([1, -1, 0, 1]);
    pub const S: Sl2z = Sl2z([0, -1, 1, 0]);

    pub fn det(&self) -> i64 {
        let [a, b, c, d] = self.0;
        a * d - b * c
    }

    pub fn mul(&self, o: &Sl2z) -> Sl2z {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        Sl2z([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn apply(&self, z: C64) -> C64 {
        let [a, b, c, d] = self.0.map(|v| v as f64);
        (a * z + b) / (c * z + d)
    }

    /// Same Mobius map (sign normalized so the first nonzero of `(c, d)` is positive).
    pub fn projective(&self) -> Sl2z {
        let [a, b, c, d] = self.0;
        if c < 0 || (c == 0 && d < 0) {
            Sl2z([-a, -b, -c, -d])
        } else {
            *self
        }
    }
}

const BOUNDARY_EPS: f64 = 1e-12;

/// Moves `tau` into `-1/2 <= Re < 1/2`, `|tau| >= 1` (with `Re <= 0` on the unit arc).
/// Returns the reduced point and `A` with `A tau = tau*`.
pub fn reduce_tau(tau: C64) -> (C64, Sl2z) {
    assert!(tau.im > 0.0, "reduce_tau needs Im tau > 0");
    let mut z = tau;
    let mut a = Sl2z::IDENTITY;
    for _ in 0..10_000 {
        let n = (z.re + 0.5 + BOUNDARY_EPS).floor();
        if n != 0.0 {
            z.re -= n;
            a = Sl2z([1, -(n as i64), 0, 1]).mul(&a);
        }
        if z.norm_sqr() < 1.0 - BOUNDARY_EPS {
            z = -1.0 / z;
            a = Sl2z::S.mul(&a);
        } else {
            break;
        }
    }
    if (z.norm_sqr() - 1.0).abs() <= BOUNDARY_EPS && z.re > BOUNDARY_EPS {
        z = -1.0 / z;
        a = Sl2z::S.mul(&a);
    }
    (z, a.projective())
}

/// Distance between two reduced points, identifying the edges of the
/// fundamental domain.
pub fn reduced_distance(a: C64, b: C64) -> f64 {
    let moves = [
        Sl2z::IDENTITY,
        Sl2z::T,
        Sl2z::T_INV,
        Sl2z::S,
        Sl2z::T.mul(&Sl2z::S),
        Sl2z::T_INV.mul(&Sl2z::S),
        Sl2z::S.mul(&Sl2z::T),
        Sl2z::S.mul(&Sl2z::T_INV),
    ];
    moves
        .iter()
        .map(|g| (g.apply(b) - a).norm())
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn already_reduced() {
        let (z, a) = reduce_tau(C64::new(0.0, 2.0));
        assert!(close(z, C64::new(0.0, 2.0)));
        assert_eq!(a, Sl2z::IDENTITY);
    }

    #[test]
    fn translation() {
        let (z, a) = reduce_tau(C64::new(1.0, 2.0));
        assert!(close(z, C64::new(0.0, 2.0)));
        assert_eq!(a, Sl2z::T_INV);
    }

    #[test]
    fn inversion() {
        let (z, a) = reduce_tau(C64::new(0.0, 0.5));
        assert!(close(z, C64::new(0.0, 2.0)));
        assert_eq!(a, Sl2z::S.projective());
    }

    #[test]
    fn boundary_is_canonical() {
        let (z, _) = reduce_tau(C64::new(0.5, 0.9));
        assert!(close(z, C64::new(-0.5, 0.9)));
        let rho = C64::new(0.5, 3f64.sqrt() / 2.0);
        let (z, _) = reduce_tau(rho);
        assert!(close(z, C64::new(-0.5, 3f64.sqrt() / 2.0)));
    }

    #[test]
    fn edge_identification() {
        let a = C64::new(0.5 - 1e-14, 0.9);
        let b = C64::new(-0.5, 0.9);
        assert!(reduced_distance(a, b) < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn lands_in_domain_and_matches_matrix(x in -50.0f64..50.0, y in 0.01f64..5.0) {
                let tau = C64::new(x, y);
                let (z, a) = reduce_tau(tau);
                prop_assert!(z.re >= -0.5 - 1e-9 && z.re < 0.5 + 1e-9);
                prop_assert!(z.norm() >= 1.0 - 1e-9);
                prop_assert_eq!(a.det(), 1);
                prop_assert!((a.apply(tau) - z).norm() < 1e-8 * (1.0 + z.norm()));
            }
        }
    }
}
