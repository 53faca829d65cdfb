//! Exact truncated power series and polynomials over the integers.
//!
//! Every division is checked: a quotient that would leave the integers is an
//! error, never a rounding.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A polynomial with integer coefficients, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Polynomial {
    #[serde(with = "big_list")]
    coeffs: Vec<BigInt>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::from_i64s(&[1])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Polynomial::from_i64s(&[0, 1])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Polynomial::one(), |acc, _| &acc * self)
    }

    pub fn to_series(&self, order: usize) -> PowerSeries {
        PowerSeries::new(self.coeffs.clone(), order)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{mag}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{mag}x^{i}")?,
            }
        }
        Ok(())
    }
}

fn zip_with(a: &[BigInt], b: &[BigInt], op: impl Fn(&BigInt, &BigInt) -> BigInt) -> Vec<BigInt> {
    let zero = BigInt::zero();
    (0..a.len().max(b.len()))
        .map(|i| op(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect()
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::new(zip_with(&self.coeffs, &rhs.coeffs, |a, b| a + b))
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::new(zip_with(&self.coeffs, &rhs.coeffs, |a, b| a - b))
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

/// A power series known exactly through `x^order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSeries {
    #[serde(with = "big_list")]
    coeffs: Vec<BigInt>,
}

impl PowerSeries {
    /// Truncates or zero-pads `coeffs` to `order + 1` entries.
    pub fn new(mut coeffs: Vec<BigInt>, order: usize) -> Self {
        coeffs.resize(order + 1, BigInt::zero());
        PowerSeries { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64], order: usize) -> Self {
        PowerSeries::new(coeffs.iter().map(|&c| BigInt::from(c)).collect(), order)
    }

    pub fn one(order: usize) -> Self {
        PowerSeries::from_i64s(&[1], order)
    }

    /// `x` as a series.
    pub fn x(order: usize) -> Self {
        PowerSeries::from_i64s(&[0, 1], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated series");
        PowerSeries { coeffs: self.coeffs[..=order].to_vec() }
    }

    fn common_order(&self, other: &Self) -> usize {
        self.order().min(other.order())
    }

    fn common_len(&self, other: &Self) -> usize {
        self.coeffs.len().min(other.coeffs.len())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Divides every coefficient by `d`, failing unless each division is exact.
    pub fn div_exact_scalar(&self, d: &BigInt) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| exact_div(a, d).ok_or_else(|| Error::InexactDivision(format!("coefficient {i} ({a}) by {d}"))))
            .collect::<Result<_>>()?;
        Ok(PowerSeries { coeffs })
    }

    /// Multiplies by `x^k`; the order grows by `k`.
    pub fn mul_x(&self, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        PowerSeries { coeffs }
    }

    /// Divides by `x^k`; the low `k` coefficients must vanish. The order drops by `k`.
    pub fn div_x(&self, k: usize) -> Result<Self> {
        if let Some(i) = self.coeffs.iter().take(k).position(|c| !c.is_zero()) {
            return Err(Error::InexactDivision(format!("coefficient of x^{i} is nonzero, cannot divide by x^{k}")));
        }
        if k > self.order() {
            return Err(Error::InvalidArgument(format!("order {} too small to divide by x^{k}", self.order())));
        }
        Ok(PowerSeries { coeffs: self.coeffs[k..].to_vec() })
    }

    /// Multiplicative inverse; the constant term must divide every intermediate quotient.
    pub fn inverse(&self) -> Result<Self> {
        PowerSeries::one(self.order()).div(self)
    }

    /// `self / den`, computed by the usual coefficient recurrence.
    pub fn div(&self, den: &Self) -> Result<Self> {
        let order = self.common_order(den);
        let d0 = &den.coeffs[0];
        if d0.is_zero() {
            return Err(Error::InexactDivision("divisor has zero constant term".into()));
        }
        let mut q: Vec<BigInt> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = self.coeffs[n].clone();
            for i in 1..=n {
                acc -= &den.coeffs[i] * &q[n - i];
            }
            let c = exact_div(&acc, d0)
                .ok_or_else(|| Error::InexactDivision(format!("coefficient {n}: {acc} / {d0}")))?;
            q.push(c);
        }
        Ok(PowerSeries { coeffs: q })
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(PowerSeries::one(self.order()), |acc, _| &acc * self)
    }

    /// Square root with constant term 1, by Newton iteration
    /// `s ← (s + f/s) / 2` doubling the precision each round.
    pub fn sqrt(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::InexactDivision(format!(
                "square root needs constant term 1, found {}",
                self.coeffs[0]
            )));
        }
        let two = BigInt::from(2);
        let mut s = PowerSeries::one(0);
        let mut prec = 1;
        while prec <= self.order() {
            prec = (2 * prec).min(self.order() + 1);
            let f = self.truncate(prec - 1);
            let s_ext = PowerSeries::new(s.coeffs, prec - 1);
            let sum = &s_ext + &f.div(&s_ext)?;
            s = sum.div_exact_scalar(&two)?;
        }
        Ok(s)
    }
}

fn exact_div(a: &BigInt, d: &BigInt) -> Option<BigInt> {
    let (q, r) = a.div_rem(d);
    r.is_zero().then_some(q)
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.common_len(rhs);
        PowerSeries { coeffs: zip_with(&self.coeffs[..n], &rhs.coeffs[..n], |a, b| a + b) }
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.common_len(rhs);
        PowerSeries { coeffs: zip_with(&self.coeffs[..n], &rhs.coeffs[..n], |a, b| a - b) }
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let order = self.common_order(rhs);
        let mut out = vec![BigInt::zero(); order + 1];
        for (i, a) in self.coeffs.iter().take(order + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(order + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        PowerSeries { coeffs: out }
    }
}

/// Expands `numerator / denominator` through `x^order`.
pub fn expand_rational(numerator: &Polynomial, denominator: &Polynomial, order: usize) -> Result<PowerSeries> {
    if denominator.coeff(0).is_zero() {
        return Err(Error::InexactDivision("denominator has zero constant term".into()));
    }
    numerator.to_series(order).div(&denominator.to_series(order))
}

/// Integers as JSON numbers when they fit in 64 bits, as decimal strings otherwise.
pub(crate) mod big_list {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            match i64::try_from(v) {
                Ok(x) => seq.serialize_element(&x)?,
                Err(_) => seq.serialize_element(&v.to_string())?,
            }
        }
        seq.end()
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Item {
        Int(i64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigInt>, D::Error> {
        Vec::<Item>::deserialize(d)?
            .into_iter()
            .map(|it| match it {
                Item::Int(x) => Ok(BigInt::from(x)),
                Item::Str(s) => s.parse().map_err(serde::de::Error::custom),
            })
            .collect()
    }
}
