use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{render_sum, Rational};
use crate::numeric::Real;
use crate::{Error, Result};

/// Truncated Laurent series in `q` with exact rational coefficients.
///
/// `coeffs[i]` is the coefficient of `q^(valuation + i)`; coefficients are
/// known for every exponent below `order`. The stored valuation is nominal:
/// leading entries may be zero.
#[derive(Clone, Debug)]
pub struct QSeries {
    valuation: i64,
    coeffs: Vec<Rational>,
    order: i64,
}

impl QSeries {
    pub fn new(valuation: i64, mut coeffs: Vec<Rational>, order: i64) -> Self {
        assert!(
            order > valuation,
            "truncation order {order} must exceed valuation {valuation}"
        );
        coeffs.resize((order - valuation) as usize, Rational::zero());
        QSeries {
            valuation,
            coeffs,
            order,
        }
    }

    pub fn from_fn(valuation: i64, order: i64, f: impl Fn(i64) -> Rational) -> Self {
        assert!(order > valuation);
        let coeffs = (valuation..order).map(f).collect();
        QSeries {
            valuation,
            coeffs,
            order,
        }
    }

    /// The zero series known to `O(q^order)`.
    pub fn zero(order: i64) -> Self {
        QSeries::new(order - 1, vec![], order)
    }

    pub fn one(order: i64) -> Self {
        QSeries::monomial(Rational::one(), 0, order)
    }

    pub fn monomial(c: Rational, exponent: i64, order: i64) -> Self {
        QSeries::new(exponent, vec![c], order)
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `q^n`. Panics when `n >= order`.
    pub fn coeff(&self, n: i64) -> Rational {
        assert!(
            n < self.order,
            "coefficient q^{n} is beyond truncation order {}",
            self.order
        );
        if n < self.valuation {
            Rational::zero()
        } else {
            self.coeffs[(n - self.valuation) as usize].clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Exponent of the first nonzero coefficient.
    pub fn leading_exponent(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.valuation + i as i64)
    }

    fn effective_valuation(&self) -> i64 {
        self.leading_exponent().unwrap_or(self.order)
    }

    /// Drops leading zero coefficients.
    pub fn normalized(&self) -> Self {
        match self.leading_exponent() {
            Some(v) if v > self.valuation => QSeries {
                valuation: v,
                coeffs: self.coeffs[(v - self.valuation) as usize..].to_vec(),
                order: self.order,
            },
            _ => self.clone(),
        }
    }

    /// Forgets coefficients at and beyond `order`.
    pub fn truncate(&self, order: i64) -> Self {
        let order = order.min(self.order);
        if order <= self.valuation {
            return QSeries::zero(order);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate((order - self.valuation) as usize);
        QSeries {
            valuation: self.valuation,
            coeffs,
            order,
        }
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        QSeries {
            valuation: self.valuation + k,
            coeffs: self.coeffs.clone(),
            order: self.order + k,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            order: self.order,
        }
    }

    /// `theta = q d/dq`: the coefficient of `q^n` is multiplied by `n`.
    pub fn theta(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * Rational::from_integer(BigInt::from(self.valuation + i as i64)))
            .collect();
        QSeries {
            valuation: self.valuation,
            coeffs,
            order: self.order,
        }
    }

    fn add_impl(&self, other: &QSeries, sign: i32) -> QSeries {
        let order = self.order.min(other.order);
        let valuation = self.valuation.min(other.valuation);
        let coeffs = (valuation..order)
            .map(|n| {
                let b = other.coeff(n);
                if sign < 0 {
                    self.coeff(n) - b
                } else {
                    self.coeff(n) + b
                }
            })
            .collect();
        QSeries {
            valuation,
            coeffs,
            order,
        }
    }

    fn mul_impl(&self, other: &QSeries) -> QSeries {
        let va = self.effective_valuation();
        let vb = other.effective_valuation();
        let order = (va + other.order).min(vb + self.order);
        let valuation = va + vb;
        if valuation >= order {
            return QSeries::zero(order);
        }
        let len = (order - valuation) as usize;
        let a = &self.coeffs[((va - self.valuation) as usize).min(self.coeffs.len())..];
        let b = &other.coeffs[((vb - other.valuation) as usize).min(other.coeffs.len())..];
        let mut coeffs = vec![Rational::zero(); len];
        for (i, ai) in a.iter().enumerate().take(len) {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate().take(len - i) {
                if !bj.is_zero() {
                    coeffs[i + j] += ai * bj;
                }
            }
        }
        QSeries {
            valuation,
            coeffs,
            order,
        }
    }

    /// Multiplicative inverse. The result is valid to `order - 2 v` where `v`
    /// is the true valuation.
    pub fn inv(&self) -> Result<QSeries> {
        let v = self.leading_exponent().ok_or(Error::LeadingZero)?;
        let a = &self.coeffs[(v - self.valuation) as usize..];
        let lead_inv = a[0].recip();
        let prec = a.len();
        let mut d: Vec<Rational> = Vec::with_capacity(prec);
        d.push(lead_inv.clone());
        for k in 1..prec {
            let mut acc = Rational::zero();
            for i in 1..=k {
                if !a[i].is_zero() {
                    acc += &a[i] * &d[k - i];
                }
            }
            d.push(-acc * &lead_inv);
        }
        Ok(QSeries {
            valuation: -v,
            coeffs: d,
            order: -v + prec as i64,
        })
    }

    /// Integer power; negative exponents go through [`QSeries::inv`].
    pub fn pow(&self, e: i64) -> Result<QSeries> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        if e == 0 {
            let prec = match self.leading_exponent() {
                Some(v) => self.order - v,
                None => self.order.max(1),
            };
            return Ok(QSeries::one(prec));
        }
        let mut base = self.normalized();
        let mut acc: Option<QSeries> = None;
        let mut e = e as u64;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = &base * &base;
        }
        Ok(acc.expect("positive exponent"))
    }

    /// Numerical value at nome `q`.
    pub fn evaluate<T: Real>(&self, q: Complex<T>) -> Complex<T> {
        let mut acc = Complex::<T>::new(T::zero(), T::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc * q + Complex::new(T::from_rational(c), T::zero());
        }
        acc * q.powi(self.valuation as i32)
    }

    /// Renders the terms with exponent at most `max_exponent`.
    pub fn render_upto(&self, max_exponent: i64) -> String {
        render_sum(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (self.valuation + i as i64, c))
                .filter(|(n, _)| *n <= max_exponent)
                .map(|(n, c)| (c.clone(), q_power(n))),
        )
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
            order: self.order,
        }
    }
}

fn q_power(n: i64) -> String {
    match n {
        0 => String::new(),
        1 => "q".to_string(),
        _ => format!("q^{n}"),
    }
}

/// Coefficients agree wherever both are known and the truncation orders match.
impl PartialEq for QSeries {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && (self.valuation.min(other.valuation)..self.order)
                .all(|n| self.coeff(n) == other.coeff(n))
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_upto(self.order - 1))
    }
}

/// JSON shape `{"valuation": v, "coeffs": ["p/q", ...], "order": N}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub valuation: i64,
    pub coeffs: Vec<String>,
    pub order: i64,
}

impl TryFrom<SeriesJson> for QSeries {
    type Error = Error;

    fn try_from(j: SeriesJson) -> Result<Self> {
        if j.order <= j.valuation {
            return Err(Error::InvalidArgument("order must exceed valuation".into()));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| {
                super::parse_rational(s)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad rational {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(QSeries::new(j.valuation, coeffs, j.order))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&QSeries> for &QSeries {
            type Output = QSeries;
            fn $method(self, rhs: &QSeries) -> QSeries {
                $body(self, rhs)
            }
        }
        impl $trait<QSeries> for QSeries {
            type Output = QSeries;
            fn $method(self, rhs: QSeries) -> QSeries {
                $body(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &QSeries, b: &QSeries| a.add_impl(b, 1));
forward_binop!(Sub, sub, |a: &QSeries, b: &QSeries| a.add_impl(b, -1));
forward_binop!(Mul, mul, |a: &QSeries, b: &QSeries| a.mul_impl(b));

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.scale(&-Rational::one())
    }
}

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        -&self
    }
}
