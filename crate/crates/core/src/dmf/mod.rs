//! The algebra `Q[g1, g2, g3]` of differential modular forms.
//!
//! Elements live in the rational frame: the q-expansion of `g1, g2, g3` is
//! `E2, 12 E4, 8 E6`, which is the complex frame `g_k = a_k E_{2k}` with the
//! common factor `u^(m/2)`, `u = 2 pi i / 12`, divided out. In that frame the
//! derivation `d/dz` becomes `12 q d/dq`.

mod hecke;
mod slash;

pub use hecke::{hecke, hecke_composition_check, hecke_series, CompositionReport};
pub use slash::{slash_eval, slash_eval_with_floor, Matrix2R};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, int, rank, rat, render_sum, solve_linear_exact, QSeries, Rational};
use crate::eisenstein::generators;
use crate::numeric::Real;
use crate::{Error, Result};

/// Exponents `(a, b, c)` of `g1^a g2^b g3^c`.
pub type Exps = [u32; 3];

pub fn monomial_weight(e: &Exps) -> i64 {
    2 * e[0] as i64 + 4 * e[1] as i64 + 6 * e[2] as i64
}

/// Polynomial in `g1, g2, g3` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DmfElement {
    terms: BTreeMap<Exps, Rational>,
}

impl DmfElement {
    pub fn zero() -> Self {
        DmfElement::default()
    }

    pub fn constant(c: Rational) -> Self {
        DmfElement::monomial([0, 0, 0], c)
    }

    pub fn one() -> Self {
        DmfElement::constant(Rational::one())
    }

    pub fn monomial(e: Exps, c: Rational) -> Self {
        let mut f = DmfElement::zero();
        f.add_term(e, c);
        f
    }

    /// Generator `g_k`, `k` in `1..=3`.
    pub fn g(k: usize) -> Self {
        let mut e = [0; 3];
        e[k - 1] = 1;
        DmfElement::monomial(e, Rational::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exps, Rational)>) -> Self {
        let mut f = DmfElement::zero();
        for (e, c) in terms {
            f.add_term(e, c);
        }
        f
    }

    fn add_term(&mut self, e: Exps, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending lexicographic order of `(a, b, c)`.
    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, e: &Exps) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        DmfElement::from_terms(self.terms.iter().map(|(e, a)| (*e, a * c)))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(DmfElement::one(), |acc, _| &acc * self)
    }

    /// `(weight, depth)`; depth is the exact `g1`-degree. The zero element grades as `(0, 0)`.
    pub fn grade(&self) -> Result<(i64, u32)> {
        let mut weights = self.terms.keys().map(monomial_weight);
        let Some(m) = weights.next() else {
            return Ok((0, 0));
        };
        if weights.any(|w| w != m) {
            return Err(Error::Inhomogeneous);
        }
        Ok((m, self.depth()))
    }

    pub fn depth(&self) -> u32 {
        self.terms.keys().map(|e| e[0]).max().unwrap_or(0)
    }

    /// Partial derivative with respect to `g_k`.
    pub fn partial(&self, k: usize) -> Self {
        let i = k - 1;
        DmfElement::from_terms(self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
            let mut e2 = *e;
            e2[i] -= 1;
            (e2, c * int(e[i] as i64))
        }))
    }

    /// The derivation `d/dz`, fixed on generators by
    /// `D g1 = g1^2 - g2/12`, `D g2 = 4 g1 g2 - 6 g3`, `D g3 = 6 g1 g3 - g2^2/3`.
    pub fn diff_op(&self) -> Self {
        let images = generator_derivatives();
        let mut out = DmfElement::zero();
        for (k, image) in images.iter().enumerate() {
            let p = self.partial(k + 1);
            if !p.is_zero() {
                out = &out + &(&p * image);
            }
        }
        out
    }

    /// `f_i = (1 / (i! C(n, i))) d^i f / d g1^i` for `i = 0..=n`, `n` the depth.
    pub fn associated_functions(&self) -> Vec<DmfElement> {
        let n = self.depth();
        let mut out = Vec::with_capacity(n as usize + 1);
        let mut deriv = self.clone();
        let mut fact = BigInt::one();
        for i in 0..=n {
            if i > 0 {
                deriv = deriv.partial(1);
                fact *= BigInt::from(i);
            }
            let denom = Rational::from_integer(&fact * binomial(n, i));
            out.push(deriv.scale(&denom.recip()));
        }
        out
    }

    /// q-expansion with `g1, g2, g3` replaced by `E2, 12 E4, 8 E6`.
    pub fn to_qseries(&self, order: i64) -> QSeries {
        let [e2, e4, e6] = generators(order);
        let gens = [e2, e4.scale(&int(12)), e6.scale(&int(8))];
        let mut powers: [Vec<QSeries>; 3] = Default::default();
        for (k, g) in gens.iter().enumerate() {
            let top = self.terms.keys().map(|e| e[k]).max().unwrap_or(0);
            powers[k].push(QSeries::one(order));
            for j in 1..=top as usize {
                let next = &powers[k][j - 1] * g;
                powers[k].push(next);
            }
        }
        let mut acc = QSeries::zero(order);
        for (e, c) in &self.terms {
            let mono = &(&powers[0][e[0] as usize] * &powers[1][e[1] as usize])
                * &powers[2][e[2] as usize];
            acc = &acc + &mono.scale(c);
        }
        acc
    }

    /// Value at numerical generator values `(g1, g2, g3)`.
    pub fn evaluate<T: Real>(&self, g: &[Complex<T>; 3]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (e, c) in &self.terms {
            let mut t = Complex::new(T::from_rational(c), T::zero());
            for k in 0..3 {
                if e[k] > 0 {
                    t = t * g[k].powu(e[k]);
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn to_json(&self) -> DmfJson {
        DmfJson {
            terms: self
                .terms()
                .map(|(e, c)| DmfTermJson {
                    exponents: *e,
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }
}

fn generator_derivatives() -> [DmfElement; 3] {
    let g = |k| DmfElement::g(k);
    [
        &g(1).pow(2) - &g(2).scale(&rat(1, 12)),
        &(&g(1) * &g(2)).scale(&int(4)) - &g(3).scale(&int(6)),
        &(&g(1) * &g(3)).scale(&int(6)) - &g(2).pow(2).scale(&rat(1, 3)),
    ]
}

impl fmt::Display for DmfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mono = |e: &Exps| {
            (0..3)
                .filter(|&k| e[k] > 0)
                .map(|k| {
                    if e[k] == 1 {
                        format!("g{}", k + 1)
                    } else {
                        format!("g{}^{}", k + 1, e[k])
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        f.write_str(&render_sum(self.terms().map(|(e, c)| (c.clone(), mono(e)))))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DmfTermJson {
    pub exponents: Exps,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DmfJson {
    pub terms: Vec<DmfTermJson>,
}

impl Add<&DmfElement> for &DmfElement {
    type Output = DmfElement;
    fn add(self, rhs: &DmfElement) -> DmfElement {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub<&DmfElement> for &DmfElement {
    type Output = DmfElement;
    fn sub(self, rhs: &DmfElement) -> DmfElement {
        self + &-rhs
    }
}

impl Mul<&DmfElement> for &DmfElement {
    type Output = DmfElement;
    fn mul(self, rhs: &DmfElement) -> DmfElement {
        let mut out = DmfElement::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term([a[0] + b[0], a[1] + b[1], a[2] + b[2]], ca * cb);
            }
        }
        out
    }
}

impl Neg for &DmfElement {
    type Output = DmfElement;
    fn neg(self) -> DmfElement {
        self.scale(&-Rational::one())
    }
}

impl Add for DmfElement {
    type Output = DmfElement;
    fn add(self, rhs: DmfElement) -> DmfElement {
        &self + &rhs
    }
}

impl Sub for DmfElement {
    type Output = DmfElement;
    fn sub(self, rhs: DmfElement) -> DmfElement {
        &self - &rhs
    }
}

impl Mul for DmfElement {
    type Output = DmfElement;
    fn mul(self, rhs: DmfElement) -> DmfElement {
        &self * &rhs
    }
}

impl Neg for DmfElement {
    type Output = DmfElement;
    fn neg(self) -> DmfElement {
        -&self
    }
}

/// Monomials `g1^a g2^b g3^c` of weight `m` with `a <= n`, in descending order.
pub fn basis(n: u32, m: i64) -> Result<Vec<Exps>> {
    if m % 2 != 0 {
        return Err(Error::OddWeight(m));
    }
    let mut out = Vec::new();
    if m < 0 {
        return Ok(out);
    }
    for a in (0..=n.min((m / 2) as u32)).rev() {
        let rest = m - 2 * a as i64;
        for b in (0..=(rest / 4) as u32).rev() {
            let r = rest - 4 * b as i64;
            if r % 6 == 0 {
                out.push([a, b, (r / 6) as u32]);
            }
        }
    }
    Ok(out)
}

/// Outcome of expressing a q-series in a monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub element: DmfElement,
    /// Number of leading coefficients needed before the system reached full rank.
    pub rows_for_rank: usize,
    /// Extra coefficients checked beyond `rows_for_rank`.
    pub surplus_checked: usize,
}

/// Surplus coefficients verified beyond the first full-rank prefix.
pub const SURPLUS: usize = 8;

/// Writes `target` (rational frame, weight `m`) as a combination of the depth-`<= n`
/// monomials of weight `m`. Returns `Ok(None)` when the series is too short to
/// reach full rank plus [`SURPLUS`] checked coefficients.
pub fn try_reconstruct(target: &QSeries, n: u32, m: i64) -> Result<Option<Reconstruction>> {
    let mono = basis(n, m)?;
    if mono.is_empty() {
        if target.is_zero() {
            return Ok(Some(Reconstruction {
                element: DmfElement::zero(),
                rows_for_rank: 0,
                surplus_checked: 0,
            }));
        }
        return Err(Error::ReconstructionFailed(format!(
            "M^{n}_{m} is zero but the series is not"
        )));
    }
    let order = target.order();
    if order <= 0 {
        return Ok(None);
    }
    let cols: Vec<QSeries> = mono
        .iter()
        .map(|e| DmfElement::monomial(*e, Rational::one()).to_qseries(order))
        .collect();
    let row = |k: i64| -> Vec<Rational> { cols.iter().map(|s| s.coeff(k)).collect() };
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut full = None;
    for k in 0..order {
        rows.push(row(k));
        if rows.len() >= mono.len() && rank(&rows) == mono.len() {
            full = Some(rows.len());
            break;
        }
    }
    let Some(r0) = full else { return Ok(None) };
    let total = r0 + SURPLUS;
    if total as i64 > order {
        return Ok(None);
    }
    let a: Vec<Vec<Rational>> = (0..total as i64).map(row).collect();
    let b: Vec<Rational> = (0..total as i64).map(|k| target.coeff(k)).collect();
    let x = match solve_linear_exact(&a, &b) {
        Ok(x) => x,
        Err(Error::Inconsistent) => {
            return Err(Error::ReconstructionFailed(format!(
                "surplus coefficients disagree for M^{n}_{m} within the first {total} terms"
            )))
        }
        Err(e) => return Err(e),
    };
    let element = DmfElement::from_terms(mono.iter().copied().zip(x));
    Ok(Some(Reconstruction {
        element,
        rows_for_rank: r0,
        surplus_checked: SURPLUS,
    }))
}

/// [`try_reconstruct`] from a series generated on demand at increasing orders.
pub fn reconstruct_with(
    n: u32,
    m: i64,
    series_at: impl Fn(i64) -> QSeries,
) -> Result<Reconstruction> {
    let dim = basis(n, m)?.len() as i64;
    let mut order = 2 * dim + SURPLUS as i64 + 4;
    loop {
        if let Some(r) = try_reconstruct(&series_at(order), n, m)? {
            return Ok(r);
        }
        if order > 4096 {
            return Err(Error::ReconstructionFailed(format!(
                "no full-rank prefix for M^{n}_{m} below order {order}"
            )));
        }
        order *= 2;
    }
}
