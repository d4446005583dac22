//! Exact and numerical machinery for differential modular forms and the
//! Ramanujan foliation.
//!
//! - [`arith`]: rationals, truncated q-series, multivariate polynomials and
//!   exact linear solving.
//! - [`eisenstein`]: the Eisenstein generators E2, E4, E6, the discriminant
//!   and j as exact q-series, plus the complex frame constants.
//! - [`dmf`]: the bigraded algebra Q[g1, g2, g3] with its derivation,
//!   associated functions, slash evaluation and Hecke operators.
//! - [`gaussmanin`]: connection matrices of y^2 = 4 t0 (x - t1)^3 - t2 (x - t1) - t3,
//!   their symbolic identities and Picard-Fuchs transport.
//! - [`periods`]: AGM period matrices, B-invariants and SL(2, Z) reduction.
//! - [`foliation`]: the Ramanujan vector field, its flow and invariant monitors.

pub mod arith;
pub mod dmf;
pub mod eisenstein;
pub mod error;
pub mod foliation;
pub mod gaussmanin;
pub mod numeric;
pub mod ode;
pub mod periods;
pub mod verify;

pub use error::{Error, Result};
