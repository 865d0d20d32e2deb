//! Dense univariate polynomials with exact coefficients.
//!
//! [`QPoly`] (rational coefficients) carries the division, gcd and resultant
//! machinery used for number-field norms and the 3-division polynomial work;
//! [`ZPoly`] (integer coefficients) is the interchange format for the modular
//! factorization routines.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial over ℚ, dense ascending coefficients, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly(Vec<BigRational>);

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly(coeffs)
    }

    pub fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn lead(&self) -> BigRational {
        self.0.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, rhs: &QPoly) -> QPoly {
        let n = self.0.len().max(rhs.0.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        QPoly::new(out)
    }

    pub fn sub(&self, rhs: &QPoly) -> QPoly {
        let n = self.0.len().max(rhs.0.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        QPoly::new(out)
    }

    pub fn neg(&self) -> QPoly {
        QPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, rhs: &QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> QPoly {
        if c.is_zero() {
            return QPoly::zero();
        }
        QPoly(self.0.iter().map(|a| a * c).collect())
    }

    /// Euclidean division: self = q·rhs + r with deg r < deg rhs.
    pub fn divrem(&self, rhs: &QPoly) -> (QPoly, QPoly) {
        assert!(!rhs.is_zero(), "division by zero polynomial");
        let dr = rhs.degree().unwrap();
        let mut rem = self.0.clone();
        if rem.len() <= dr {
            return (QPoly::zero(), self.clone());
        }
        let lead_inv = rhs.lead().recip();
        let mut quot = vec![BigRational::zero(); rem.len() - dr];
        for i in (dr..rem.len()).rev() {
            let c = &rem[i] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            quot[i - dr] = c.clone();
            for j in 0..=dr {
                let t = &rhs.0[j] * &c;
                rem[i - dr + j] -= t;
            }
        }
        (QPoly::new(quot), QPoly::new(rem))
    }

    pub fn rem(&self, rhs: &QPoly) -> QPoly {
        self.divrem(rhs).1
    }

    /// Monic gcd.
    pub fn gcd(&self, rhs: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let li = a.lead().recip();
            a.scale(&li)
        }
    }

    pub fn derivative(&self) -> QPoly {
        if self.0.len() <= 1 {
            return QPoly::zero();
        }
        QPoly::new(
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigRational::from_integer((i as i64 + 1).into()))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Resultant Res(self, rhs) over ℚ by the Euclidean recurrence.
    pub fn resultant(&self, rhs: &QPoly) -> BigRational {
        let f = self.clone();
        let g = rhs.clone();
        resultant_rec(f, g)
    }

    /// Clears denominators and content, returning a primitive integer
    /// polynomial and the (positive) rational factor taken out:
    /// self = factor · primitive.
    pub fn to_primitive(&self) -> (ZPoly, BigRational) {
        if self.is_zero() {
            return (ZPoly::zero(), BigRational::one());
        }
        let mut den = BigInt::one();
        for c in &self.0 {
            den = num_integer::lcm(den, c.denom().clone());
        }
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for c in &ints {
            content = num_integer::gcd(content, c.clone());
        }
        if content.is_zero() {
            content = BigInt::one();
        }
        let prim: Vec<BigInt> = ints.iter().map(|c| c / &content).collect();
        (ZPoly::new(prim), BigRational::new(content, den))
    }
}

fn resultant_rec(f: QPoly, g: QPoly) -> BigRational {
    let df = match f.degree() {
        None => return BigRational::zero(),
        Some(d) => d,
    };
    let dg = match g.degree() {
        None => return BigRational::zero(),
        Some(d) => d,
    };
    if dg == 0 {
        return pow_rat(&g.lead(), df as u32);
    }
    if df == 0 {
        return pow_rat(&f.lead(), dg as u32);
    }
    let r = f.rem(&g);
    match r.degree() {
        None => BigRational::zero(),
        Some(dr) => {
            let sign = if (df * dg) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
            sign * pow_rat(&g.lead(), (df - dr) as u32) * resultant_rec(g, r)
        }
    }
}

fn pow_rat(b: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= b;
    }
    acc
}

/// Polynomial over ℤ, dense ascending coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPoly(Vec<BigInt>);

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly(coeffs)
    }

    pub fn zero() -> Self {
        ZPoly(Vec::new())
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn lead(&self) -> BigInt {
        self.0.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(self.0.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    /// Largest absolute coefficient value.
    pub fn height(&self) -> BigInt {
        self.0.iter().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero)
    }
}
