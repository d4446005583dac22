use serde::Serialize;

use super::{matrices, BasisTag};
use crate::arith::{det_laplace, int, rat, t_vars, MPoly, PolyMatrix};
use crate::foliation::ra_polys;

/// One symbolic identity and whether it held exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    fn push(&mut self, name: impl Into<String>, lhs: &MPoly, rhs: &MPoly) {
        let holds = lhs == rhs;
        let detail = if holds {
            format!("{} terms", lhs.num_terms())
        } else {
            format!("difference {}", lhs - rhs)
        };
        self.checks.push(IdentityCheck {
            name: name.into(),
            holds,
            detail,
        });
    }
}

fn matrix_eq(a: &PolyMatrix, b: &PolyMatrix) -> Option<String> {
    for r in 0..2 {
        for c in 0..2 {
            if a.entry(r, c) != b.entry(r, c) {
                return Some(format!(
                    "entry ({r},{c}) differs by {}",
                    a.entry(r, c) - b.entry(r, c)
                ));
            }
        }
    }
    None
}

/// `det B = (3/4) t0 Delta^3` where row `i` of `B` is `A_i` (classical) flattened,
/// `det A_3 = (105/4) t0^2 Delta` (canonical) and `det A_1 = 0` (classical).
pub fn verify_det_identities() -> IdentityReport {
    let cla = matrices(BasisTag::Classical);
    let can = matrices(BasisTag::Canonical);
    let delta = &cla.discriminant;
    let t0 = MPoly::t(0);
    let mut report = IdentityReport::default();

    let rows: Vec<Vec<MPoly>> = cla
        .a
        .iter()
        .map(|m| {
            vec![
                m.entry(0, 0).clone(),
                m.entry(0, 1).clone(),
                m.entry(1, 0).clone(),
                m.entry(1, 1).clone(),
            ]
        })
        .collect();
    let expected = (&t0 * &delta.pow(3)).scale(&rat(3, 4));
    report.push("det(B) = 3/4 t0 Delta^3", &det_laplace(&rows), &expected);

    let expected = (&t0.pow(2) * delta).scale(&rat(105, 4));
    report.push(
        "det(A3 canonical) = 105/4 t0^2 Delta",
        &can.a[3].det(),
        &expected,
    );

    report.push(
        "det(A1 classical) = 0",
        &cla.a[1].det(),
        &MPoly::zero(t_vars()),
    );
    report
}

/// With `S = A_3(canonical) / Delta`, checks
/// `Atilde_i / Delta = dS/dt_i S^-1 + S (A_i / Delta) S^-1` for the classical `Atilde_i`.
///
/// Writing `A = A_3(canonical)` and `d = det A`, both sides are multiplied by
/// `Delta d`, leaving the polynomial identity
/// `d Atilde_i = (Delta dA - dDelta A) adj A + A A_i adj A`.
/// The scalar trace of that identity is checked before the full matrices.
pub fn verify_basis_change() -> IdentityReport {
    let cla = matrices(BasisTag::Classical);
    let can = matrices(BasisTag::Canonical);
    let delta = &can.discriminant;
    let a = &can.a[3];
    let adj = a.adjugate();
    let d = a.det();
    let mut report = IdentityReport::default();

    let a_adj = a * &adj;
    let scalar_d = PolyMatrix::identity(t_vars()).scale_poly(&d);
    let holds = matrix_eq(&a_adj, &scalar_d);
    report.checks.push(IdentityCheck {
        name: "S S^-1 = I".into(),
        holds: holds.is_none(),
        detail: holds.unwrap_or_else(|| "A adj(A) = det(A) I".into()),
    });

    for i in 0..4 {
        let lhs = cla.a[i].scale_poly(&d);
        let d_a = &a.partial(i).scale_poly(delta) - &a.scale_poly(&delta.partial(i));
        let rhs = &(&d_a * &adj) + &(&(a * &can.a[i]) * &adj);
        report.push(format!("trace, i = {i}"), &lhs.trace(), &rhs.trace());
        let diff = matrix_eq(&lhs, &rhs);
        report.checks.push(IdentityCheck {
            name: format!("basis change, i = {i}"),
            holds: diff.is_none(),
            detail: diff.unwrap_or_else(|| "all four entries agree".into()),
        });
    }
    report
}

/// `sum_i (dDelta/dt_i) Ra_i = 12 t1 Delta` on the slice `t0 = 1`.
pub fn verify_ra_discriminant() -> IdentityReport {
    let one = MPoly::t_const(int(1));
    let delta = super::discriminant().compose(&[one, MPoly::t(1), MPoly::t(2), MPoly::t(3)]);
    let ra = ra_polys();
    let mut lhs = MPoly::zero(t_vars());
    for (i, r) in ra.iter().enumerate() {
        lhs = &lhs + &(&delta.partial(i + 1) * r);
    }
    let rhs = (&MPoly::t(1) * &delta).scale(&int(12));
    let mut report = IdentityReport::default();
    report.push("dDelta(Ra) = 12 t1 Delta", &lhs, &rhs);
    report
}
