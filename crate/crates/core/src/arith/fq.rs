//! The residue fields 𝔽_ℓ and 𝔽_{ℓ²}.
//!
//! Degree-2 fields are 𝔽_ℓ(t) with t² = c₁·t + c₀. For odd ℓ the defining
//! relation is t² = s with s the smallest quadratic non-residue (fixed for
//! determinism; point counts do not depend on the choice), and for ℓ = 2 it is
//! t² = t + 1. Elements are Copy and carry their context, so arithmetic needs
//! no external state.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Field descriptor: 𝔽_p (degree 1) or 𝔽_{p²} = 𝔽_p[t]/(t² − c₁t − c₀).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FqCtx {
    p: u64,
    degree: u8,
    c1: u64,
    c0: u64,
}

impl FqCtx {
    /// The prime field 𝔽_p.
    pub fn prime(p: u64) -> Self {
        debug_assert!(super::int::is_prime_u64(p));
        FqCtx { p, degree: 1, c1: 0, c0: 0 }
    }

    /// The quadratic extension 𝔽_{p²}.
    pub fn quadratic(p: u64) -> Self {
        debug_assert!(super::int::is_prime_u64(p));
        if p == 2 {
            return FqCtx { p, degree: 2, c1: 1, c0: 1 };
        }
        let mut s = 2;
        while super::int::kronecker_i64(s as i64, p as i64) != -1 {
            s += 1;
        }
        FqCtx { p, degree: 2, c1: 0, c0: s }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    /// Constant term of the defining relation t² = c₁t + c₀.
    pub fn c0(&self) -> u64 {
        self.c0
    }

    pub fn c1(&self) -> u64 {
        self.c1
    }

    /// Field size q = p^degree.
    pub fn q(&self) -> u64 {
        if self.degree == 1 {
            self.p
        } else {
            self.p * self.p
        }
    }

    pub fn zero(&self) -> FqElem {
        FqElem { ctx: *self, a: 0, b: 0 }
    }

    pub fn one(&self) -> FqElem {
        FqElem { ctx: *self, a: 1 % self.p, b: 0 }
    }

    pub fn from_u64(&self, n: u64) -> FqElem {
        FqElem { ctx: *self, a: n % self.p, b: 0 }
    }

    pub fn from_i64(&self, n: i64) -> FqElem {
        let p = self.p as i64;
        FqElem { ctx: *self, a: (n.rem_euclid(p)) as u64, b: 0 }
    }

    pub fn from_bigint(&self, n: &BigInt) -> FqElem {
        let r = n.mod_floor(&BigInt::from(self.p));
        FqElem { ctx: *self, a: r.to_u64().unwrap(), b: 0 }
    }

    /// Element with coordinates (a, b) meaning a + b·t (b ignored in degree 1).
    pub fn elem(&self, a: u64, b: u64) -> FqElem {
        FqElem { ctx: *self, a: a % self.p, b: if self.degree == 2 { b % self.p } else { 0 } }
    }

    /// The i-th element in the enumeration order used by point counting.
    pub fn nth(&self, i: u64) -> FqElem {
        debug_assert!(i < self.q());
        FqElem { ctx: *self, a: i % self.p, b: i / self.p }
    }

    /// Iterate over all field elements.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.q()).map(move |i| self.nth(i))
    }
}

/// An element of 𝔽_p or 𝔽_{p²}, written a + b·t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FqElem {
    ctx: FqCtx,
    a: u64,
    b: u64,
}

pub(crate) fn new_elem(ctx: FqCtx, a: u64, b: u64) -> FqElem {
    FqElem { ctx, a: a % ctx.p, b: if ctx.degree == 2 { b % ctx.p } else { 0 } }
}

impl FqElem {
    pub fn new(ctx: FqCtx, a: u64, b: u64) -> Self {
        new_elem(ctx, a, b)
    }

    pub fn ctx(&self) -> FqCtx {
        self.ctx
    }

    pub fn coords(&self) -> (u64, u64) {
        (self.a, self.b)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Index of this element in the counting enumeration.
    pub fn index(&self) -> u64 {
        self.a + self.b * self.ctx.p
    }

    pub fn neg_elem(&self) -> FqElem {
        let p = self.ctx.p;
        FqElem { ctx: self.ctx, a: (p - self.a) % p, b: (p - self.b) % p }
    }

    pub fn pow(&self, mut e: u64) -> FqElem {
        let mut base = *self;
        let mut acc = self.ctx.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; None for zero.
    pub fn inv(&self) -> Option<FqElem> {
        if self.is_zero() {
            return None;
        }
        Some(self.pow(self.ctx.q() - 2))
    }

    /// Quadratic character: 0 on zero, 1 on nonzero squares, −1 otherwise.
    /// In characteristic 2 every element is a square.
    pub fn chi(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if self.ctx.p == 2 {
            return 1;
        }
        let e = self.pow((self.ctx.q() - 1) / 2);
        if e == self.ctx.one() {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.degree == 1 || self.b == 0 {
            write!(f, "{}", self.a)
        } else if self.a == 0 {
            write!(f, "{}*t", self.b)
        } else {
            write!(f, "{} + {}*t", self.a, self.b)
        }
    }
}

fn mul64(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl Add for &FqElem {
    type Output = FqElem;
    fn add(self, rhs: &FqElem) -> FqElem {
        debug_assert_eq!(self.ctx, rhs.ctx);
        let p = self.ctx.p;
        FqElem { ctx: self.ctx, a: (self.a + rhs.a) % p, b: (self.b + rhs.b) % p }
    }
}

impl Sub for &FqElem {
    type Output = FqElem;
    fn sub(self, rhs: &FqElem) -> FqElem {
        self + &rhs.neg_elem()
    }
}

impl Neg for &FqElem {
    type Output = FqElem;
    fn neg(self) -> FqElem {
        self.neg_elem()
    }
}

impl Mul for &FqElem {
    type Output = FqElem;
    fn mul(self, rhs: &FqElem) -> FqElem {
        debug_assert_eq!(self.ctx, rhs.ctx);
        let p = self.ctx.p;
        if self.ctx.degree == 1 {
            return FqElem { ctx: self.ctx, a: mul64(self.a, rhs.a, p), b: 0 };
        }
        // (a + bt)(c + et) = ac + (ae + bc)t + be·t², t² = c₁t + c₀.
        let ac = mul64(self.a, rhs.a, p);
        let cross = (mul64(self.a, rhs.b, p) + mul64(self.b, rhs.a, p)) % p;
        let be = mul64(self.b, rhs.b, p);
        FqElem {
            ctx: self.ctx,
            a: (ac + mul64(be, self.ctx.c0, p)) % p,
            b: (cross + mul64(be, self.ctx.c1, p)) % p,
        }
    }
}
