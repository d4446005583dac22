//! Gauss-Manin connection of `y^2 = 4 t0 (x - t1)^3 - t2 (x - t1) - t3`.
//!
//! The connection form is `(1 / Delta) sum_i A_i dt_i` with
//! `Delta = t0 (27 t0 t3^2 - t2^3)`, given in two bases of the de Rham
//! cohomology: the canonical one built from `2x dy - 3y dx`, and the classical
//! one `(dx/y, x dx/y)`.

mod identities;
mod transport;

pub use identities::{
    verify_basis_change, verify_det_identities, verify_ra_discriminant, IdentityCheck,
    IdentityReport,
};
pub use transport::{
    connection_fd_check, discriminant_monodromy, picard_fuchs_transport, transport_along,
    transport_circle, TransportOptions, TransportResult,
};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arith::{t_vars, MPoly, PolyMatrix};
use crate::numeric::Real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisTag {
    Canonical,
    Classical,
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisTag::Canonical => "canonical",
            BasisTag::Classical => "classical",
        })
    }
}

impl FromStr for BasisTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(BasisTag::Canonical),
            "classical" => Ok(BasisTag::Classical),
            _ => Err(Error::InvalidArgument(format!(
                "unknown basis {s:?} (canonical | classical)"
            ))),
        }
    }
}

/// Entries `[a, b, c, d]` of `A_0 .. A_3`, row-major, in packed graded-lex form.
pub const CANONICAL_TABLE: [[&str; 4]; 4] = [
    [
        "21/2t0t1t2t3-9t0t3^2+3/4t2^3",
        "-21/2t0t2t3",
        "21/2t0t1^2t2t3+9t0t1t3^2-1/2t1t2^3-5/8t2^2t3",
        "-21/2t0t1t2t3-18t0t3^2+5/4t2^3",
    ],
    ["0", "0", "27t0^2t3^2-t0t2^3", "0"],
    [
        "-63/2t0^2t1t3-5/4t0t2^2",
        "63/2t0^2t3",
        "-63/2t0^2t1^2t3+1/2t0t1t2^2+15/8t0t2t3",
        "63/2t0^2t1t3-7/4t0t2^2",
    ],
    [
        "21t0^2t1t2+45/2t0^2t3",
        "-21t0^2t2",
        "21t0^2t1^2t2-9t0^2t1t3-5/4t0t2^2",
        "-21t0^2t1t2+63/2t0^2t3",
    ],
];

/// Same layout for the classical basis `(dx/y, x dx/y)`.
pub const CLASSICAL_TABLE: [[&str; 4]; 4] = [
    [
        "3/2t0t1t2t3-9t0t3^2+1/4t2^3",
        "-3/2t0t2t3",
        "3/2t0t1^2t2t3+9t0t1t3^2-1/2t1t2^3+1/8t2^2t3",
        "-3/2t0t1t2t3-18t0t3^2+3/4t2^3",
    ],
    ["0", "0", "27t0^2t3^2-t0t2^3", "0"],
    [
        "-9/2t0^2t1t3+1/4t0t2^2",
        "9/2t0^2t3",
        "-9/2t0^2t1^2t3+1/2t0t1t2^2-3/8t0t2t3",
        "9/2t0^2t1t3-1/4t0t2^2",
    ],
    [
        "3t0^2t1t2-9/2t0^2t3",
        "-3t0^2t2",
        "3t0^2t1^2t2-9t0^2t1t3+1/4t0t2^2",
        "-3t0^2t1t2+9/2t0^2t3",
    ],
];

pub const DISCRIMINANT: &str = "27t0^2t3^2-t0t2^3";

/// `Delta = t0 (27 t0 t3^2 - t2^3)` in `Q[t0..t3]`.
pub fn discriminant() -> MPoly {
    MPoly::parse_compact(t_vars(), DISCRIMINANT).expect("discriminant literal parses")
}

/// Numerators `A_0 .. A_3` and the common denominator `Delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrices {
    pub basis: BasisTag,
    pub a: [PolyMatrix; 4],
    pub discriminant: MPoly,
}

pub fn table(basis: BasisTag) -> &'static [[&'static str; 4]; 4] {
    match basis {
        BasisTag::Canonical => &CANONICAL_TABLE,
        BasisTag::Classical => &CLASSICAL_TABLE,
    }
}

pub fn matrices(basis: BasisTag) -> ConnectionMatrices {
    let parse = |s: &str| MPoly::parse_compact(t_vars(), s).expect("connection table entry parses");
    let a =
        table(basis).map(|[a, b, c, d]| PolyMatrix::new(parse(a), parse(b), parse(c), parse(d)));
    ConnectionMatrices {
        basis,
        a,
        discriminant: discriminant(),
    }
}

pub type Mat2<T> = [[Complex<T>; 2]; 2];

/// Polynomial flattened to `(coefficient, exponents)` pairs for repeated numerical evaluation.
#[derive(Debug, Clone)]
pub struct CompiledPoly<T> {
    terms: Vec<(T, [u32; 4])>,
}

impl<T: Real> CompiledPoly<T> {
    pub fn new(p: &MPoly) -> Self {
        assert_eq!(p.nvars(), 4);
        let terms = p
            .terms()
            .map(|(m, c)| (T::from_rational(c), [m.0[0], m.0[1], m.0[2], m.0[3]]))
            .collect();
        CompiledPoly { terms }
    }

    pub fn eval(&self, t: &[Complex<T>; 4]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (c, e) in &self.terms {
            let mut v = Complex::new(*c, T::zero());
            for i in 0..4 {
                if e[i] > 0 {
                    v = v * t[i].powu(e[i]);
                }
            }
            acc = acc + v;
        }
        acc
    }
}

/// Connection data ready for numerical evaluation.
#[derive(Debug, Clone)]
pub struct CompiledConnection<T> {
    pub basis: BasisTag,
    a: Vec<[[CompiledPoly<T>; 2]; 2]>,
    delta: CompiledPoly<T>,
}

/// Relative threshold below which `Delta(t)` counts as zero.
pub const DISCRIMINANT_EPS: f64 = 1e-12;

/// Scale used with [`DISCRIMINANT_EPS`]: `(1 + max |t_i|)^4`.
pub fn discriminant_scale<T: Real>(t: &[Complex<T>; 4]) -> f64 {
    let m = t.iter().map(|z| z.norm().to_f64()).fold(0.0, f64::max);
    (1.0 + m).powi(4)
}

impl<T: Real> CompiledConnection<T> {
    pub fn new(basis: BasisTag) -> Self {
        let cm = matrices(basis);
        let a =
            cm.a.iter()
                .map(|m| {
                    [
                        [
                            CompiledPoly::new(m.entry(0, 0)),
                            CompiledPoly::new(m.entry(0, 1)),
                        ],
                        [
                            CompiledPoly::new(m.entry(1, 0)),
                            CompiledPoly::new(m.entry(1, 1)),
                        ],
                    ]
                })
                .collect();
        CompiledConnection {
            basis,
            a,
            delta: CompiledPoly::new(&cm.discriminant),
        }
    }

    pub fn delta(&self, t: &[Complex<T>; 4]) -> Complex<T> {
        self.delta.eval(t)
    }

    /// `A_i(t) / Delta(t)` for `i = 0..3`.
    pub fn eval(&self, t: &[Complex<T>; 4]) -> Result<[Mat2<T>; 4]> {
        let d = self.delta(t);
        let dn = d.norm().to_f64();
        if !(dn >= DISCRIMINANT_EPS * discriminant_scale(t)) {
            return Err(Error::OnDiscriminant(dn));
        }
        let inv = Complex::new(T::one(), T::zero()) / d;
        let mut out = [[[Complex::new(T::zero(), T::zero()); 2]; 2]; 4];
        for (i, m) in self.a.iter().enumerate() {
            for r in 0..2 {
                for c in 0..2 {
                    out[i][r][c] = m[r][c].eval(t) * inv;
                }
            }
        }
        Ok(out)
    }
}

/// `A_i(t) / Delta(t)`, `i = 0..3`; fails with [`Error::OnDiscriminant`] near `Delta = 0`.
pub fn connection_eval<T: Real>(t: &[Complex<T>; 4], basis: BasisTag) -> Result<[Mat2<T>; 4]> {
    CompiledConnection::new(basis).eval(t)
}

/// Serializable view of [`ConnectionMatrices`] in packed polynomial form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionJson {
    pub basis: BasisTag,
    pub discriminant: String,
    pub matrices: Vec<[[String; 2]; 2]>,
}

impl ConnectionMatrices {
    pub fn to_json(&self) -> ConnectionJson {
        let row = |m: &PolyMatrix, r: usize| {
            [
                m.entry(r, 0).render_compact(),
                m.entry(r, 1).render_compact(),
            ]
        };
        ConnectionJson {
            basis: self.basis,
            discriminant: self.discriminant.render_compact(),
            matrices: self.a.iter().map(|m| [row(m, 0), row(m, 1)]).collect(),
        }
    }
}
