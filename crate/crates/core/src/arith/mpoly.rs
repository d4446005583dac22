use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{render_sum, Rational};
use crate::numeric::Real;
use crate::{Error, Result};

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, Rational>,
}

/// `t0, t1, t2, t3`, the parameter names of the elliptic family.
pub fn t_vars() -> Arc<[String]> {
    (0..4).map(|i| format!("t{i}")).collect::<Vec<_>>().into()
}

impl MPoly {
    pub fn zero(vars: Arc<[String]>) -> Self {
        MPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Arc<[String]>, c: Rational) -> Self {
        let n = vars.len();
        MPoly::zero(vars).with_term(Monomial::one(n), c)
    }

    pub fn var(vars: Arc<[String]>, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        MPoly::zero(vars).with_term(Monomial(e), Rational::one())
    }

    /// Variable `t_i` in the ring `Q[t0..t3]`.
    pub fn t(i: usize) -> Self {
        MPoly::var(t_vars(), i)
    }

    pub fn t_const(c: Rational) -> Self {
        MPoly::constant(t_vars(), c)
    }

    fn with_term(mut self, m: Monomial, c: Rational) -> Self {
        self.add_term(m, c);
        self
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn from_terms(
        vars: Arc<[String]>,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Self {
        let mut p = MPoly::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len());
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    fn check_vars(&self, other: &MPoly) {
        assert!(
            self.vars == other.vars,
            "variable sets differ: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.vars.clone());
        }
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::constant(self.vars.clone(), Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn partial(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let k = m.0[i];
            if k == 0 {
                continue;
            }
            let mut e = m.0.clone();
            e[i] -= 1;
            out.add_term(Monomial(e), c * Rational::from_integer(BigInt::from(k)));
        }
        out
    }

    pub fn evaluate_rational(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars());
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(&m.0) {
                for _ in 0..k {
                    term *= x;
                }
            }
            acc += term;
        }
        acc
    }

    pub fn evaluate<T: Real>(&self, point: &[Complex<T>]) -> Complex<T> {
        assert_eq!(point.len(), self.nvars());
        let mut acc = Complex::new(T::zero(), T::zero());
        for (m, c) in &self.terms {
            let mut term = Complex::new(T::from_rational(c), T::zero());
            for (x, &k) in point.iter().zip(&m.0) {
                if k > 0 {
                    term = term * x.powu(k);
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Substitutes `subs[i]` for variable `i`; the result lives in the ring of the substitutes.
    pub fn compose(&self, subs: &[MPoly]) -> MPoly {
        assert_eq!(subs.len(), self.nvars());
        let target = subs[0].vars.clone();
        let mut out = MPoly::zero(target.clone());
        for (m, c) in &self.terms {
            let mut term = MPoly::constant(target.clone(), c.clone());
            for (s, &k) in subs.iter().zip(&m.0) {
                if k > 0 {
                    term = &term * &s.pow(k);
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Positive rational `c` such that `self / c` has coprime integer coefficients.
    pub fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            Rational::one()
        } else {
            Rational::new(num, den)
        }
    }

    /// Parses the packed form used for the connection tables, e.g.
    /// `21/2t0t1t2t3-9t0t3^2+3/4t2^3`. Variable names are matched greedily.
    pub fn parse_compact(vars: Arc<[String]>, s: &str) -> Result<MPoly> {
        let bytes: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |pos: usize, what: &str| {
            Error::InvalidArgument(format!("polynomial {s:?}: {what} at {pos}"))
        };
        let mut out = MPoly::zero(vars.clone());
        let mut i = 0;
        if bytes.is_empty() {
            return Err(err(0, "empty input"));
        }
        if bytes == ['0'] {
            return Ok(out);
        }
        let read_int = |i: &mut usize| -> Option<BigInt> {
            let start = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            (start < *i).then(|| {
                bytes[start..*i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .expect("digits")
            })
        };
        while i < bytes.len() {
            let mut sign = BigInt::one();
            if bytes[i] == '+' || bytes[i] == '-' {
                if bytes[i] == '-' {
                    sign = -sign;
                }
                i += 1;
            } else if i > 0 {
                return Err(err(i, "expected sign"));
            }
            let mut coeff = Rational::from_integer(sign);
            let mut explicit = false;
            if let Some(n) = read_int(&mut i) {
                explicit = true;
                coeff *= Rational::from_integer(n);
                if i < bytes.len() && bytes[i] == '/' {
                    i += 1;
                    let d = read_int(&mut i).ok_or_else(|| err(i, "expected denominator"))?;
                    if d.is_zero() {
                        return Err(err(i, "zero denominator"));
                    }
                    coeff /= Rational::from_integer(d);
                }
            }
            let mut exps = vec![0u32; vars.len()];
            let mut any_var = false;
            loop {
                let rest: String = bytes[i..].iter().collect();
                let hit = vars
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| rest.starts_with(v.as_str()))
                    .max_by_key(|(_, v)| v.len());
                let Some((vi, name)) = hit else { break };
                i += name.chars().count();
                let mut k = 1u32;
                if i < bytes.len() && bytes[i] == '^' {
                    i += 1;
                    k = read_int(&mut i)
                        .and_then(|n| u32::try_from(n).ok())
                        .ok_or_else(|| err(i, "expected exponent"))?;
                }
                exps[vi] += k;
                any_var = true;
            }
            if !explicit && !any_var {
                return Err(err(i, "expected term"));
            }
            out.add_term(Monomial(exps), coeff);
        }
        Ok(out)
    }

    fn monomial_text(&self, m: &Monomial, sep: &str) -> String {
        m.0.iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| {
                if k == 1 {
                    self.vars[i].clone()
                } else {
                    format!("{}^{k}", self.vars[i])
                }
            })
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Packed rendering, inverse of [`MPoly::parse_compact`].
    pub fn render_compact(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (m, c) in self.terms() {
            let mono = self.monomial_text(m, "");
            if c.is_negative() {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let mag = c.abs();
            if mono.is_empty() || !mag.is_one() {
                out.push_str(&mag.to_string());
            }
            out.push_str(&mono);
        }
        out
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_sum(
            self.terms()
                .map(|(m, c)| (c.clone(), self.monomial_text(m, " "))),
        ))
    }
}

impl Add<&MPoly> for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub<&MPoly> for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul<&MPoly> for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.check_vars(rhs);
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *acc.entry(ma.times(mb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        MPoly {
            vars: self.vars.clone(),
            terms: acc,
        }
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-Rational::one())
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_ops!(MPoly);

/// 2x2 matrix of polynomials, row-major `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix(pub [[MPoly; 2]; 2]);

impl PolyMatrix {
    pub fn new(a: MPoly, b: MPoly, c: MPoly, d: MPoly) -> Self {
        PolyMatrix([[a, b], [c, d]])
    }

    pub fn zero(vars: Arc<[String]>) -> Self {
        let z = MPoly::zero(vars);
        PolyMatrix::new(z.clone(), z.clone(), z.clone(), z)
    }

    pub fn identity(vars: Arc<[String]>) -> Self {
        let z = MPoly::zero(vars.clone());
        let o = MPoly::constant(vars, Rational::one());
        PolyMatrix::new(o.clone(), z.clone(), z, o)
    }

    pub fn entry(&self, i: usize, j: usize) -> &MPoly {
        &self.0[i][j]
    }

    pub fn det(&self) -> MPoly {
        let m = &self.0;
        &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
    }

    pub fn trace(&self) -> MPoly {
        &self.0[0][0] + &self.0[1][1]
    }

    /// Classical adjugate: `A * adj(A) = det(A) I`.
    pub fn adjugate(&self) -> PolyMatrix {
        let m = &self.0;
        PolyMatrix::new(m[1][1].clone(), -&m[0][1], -&m[1][0], m[0][0].clone())
    }

    pub fn transpose(&self) -> PolyMatrix {
        let m = &self.0;
        PolyMatrix::new(
            m[0][0].clone(),
            m[1][0].clone(),
            m[0][1].clone(),
            m[1][1].clone(),
        )
    }

    pub fn map(&self, f: impl Fn(&MPoly) -> MPoly) -> PolyMatrix {
        let m = &self.0;
        PolyMatrix::new(f(&m[0][0]), f(&m[0][1]), f(&m[1][0]), f(&m[1][1]))
    }

    pub fn scale_poly(&self, p: &MPoly) -> PolyMatrix {
        self.map(|e| e * p)
    }

    pub fn partial(&self, i: usize) -> PolyMatrix {
        self.map(|e| e.partial(i))
    }

    pub fn evaluate<T: Real>(&self, point: &[Complex<T>]) -> [[Complex<T>; 2]; 2] {
        let m = &self.0;
        [
            [m[0][0].evaluate(point), m[0][1].evaluate(point)],
            [m[1][0].evaluate(point), m[1][1].evaluate(point)],
        ]
    }
}

/// Determinant of a square polynomial matrix by cofactor expansion along the first row.
pub fn det_laplace(m: &[Vec<MPoly>]) -> MPoly {
    let n = m.len();
    assert!(
        n > 0 && m.iter().all(|r| r.len() == n),
        "square matrix expected"
    );
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MPoly::zero(m[0][0].vars.clone());
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MPoly>> = m[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * &det_laplace(&minor);
        acc = if j % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

impl Mul<&PolyMatrix> for &PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        let (a, b) = (&self.0, &rhs.0);
        let e = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        PolyMatrix::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

impl Add<&PolyMatrix> for &PolyMatrix {
    type Output = PolyMatrix;
    fn add(self, rhs: &PolyMatrix) -> PolyMatrix {
        let (a, b) = (&self.0, &rhs.0);
        PolyMatrix::new(
            &a[0][0] + &b[0][0],
            &a[0][1] + &b[0][1],
            &a[1][0] + &b[1][0],
            &a[1][1] + &b[1][1],
        )
    }
}

impl Sub<&PolyMatrix> for &PolyMatrix {
    type Output = PolyMatrix;
    fn sub(self, rhs: &PolyMatrix) -> PolyMatrix {
        let (a, b) = (&self.0, &rhs.0);
        PolyMatrix::new(
            &a[0][0] - &b[0][0],
            &a[0][1] - &b[0][1],
            &a[1][0] - &b[1][0],
            &a[1][1] - &b[1][1],
        )
    }
}
