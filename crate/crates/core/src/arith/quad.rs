//! The imaginary quadratic field K = ℚ(√−d): elements, prime splitting and
//! reduction into residue fields.
//!
//! Elements store plain rational coordinates; maximal-order elements with
//! half-integer coordinates (d ≡ 3 mod 4) are ordinary rationals with
//! denominator 2, and integrality is an explicit predicate rather than a
//! separate basis type.

use super::fq::{FqCtx, FqElem};
use super::int::sqrt_mod_p;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An element x + y·√−d of K = ℚ(√−d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadElem {
    pub x: BigRational,
    pub y: BigRational,
    pub d: u64,
}

impl QuadElem {
    pub fn new(x: BigRational, y: BigRational, d: u64) -> Self {
        debug_assert!(is_squarefree(d), "d = {d} must be square-free");
        QuadElem { x, y, d }
    }

    pub fn from_ints(x: i64, y: i64, d: u64) -> Self {
        Self::new(BigRational::from_integer(x.into()), BigRational::from_integer(y.into()), d)
    }

    pub fn from_bigints(x: BigInt, y: BigInt, d: u64) -> Self {
        Self::new(BigRational::from_integer(x), BigRational::from_integer(y), d)
    }

    /// The rational r as an element of K.
    pub fn from_rational(r: BigRational, d: u64) -> Self {
        Self::new(r, BigRational::zero(), d)
    }

    /// √−d itself.
    pub fn sqrt_minus_d(d: u64) -> Self {
        Self::from_ints(0, 1, d)
    }

    pub fn zero(d: u64) -> Self {
        Self::from_ints(0, 0, d)
    }

    pub fn one(d: u64) -> Self {
        Self::from_ints(1, 0, d)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    /// Galois conjugate x − y√−d.
    pub fn conj(&self) -> Self {
        QuadElem { x: self.x.clone(), y: -self.y.clone(), d: self.d }
    }

    /// Norm to ℚ: x² + d·y² = z·conj(z); non-negative, zero iff z = 0.
    pub fn norm(&self) -> BigRational {
        &self.x * &self.x + BigRational::from_integer(self.d.into()) * &self.y * &self.y
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        QuadElem { x: &self.x * r, y: &self.y * r, d: self.d }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(self.conj().scale(&n.recip()))
    }

    /// Integrality in the maximal order O_K: for d ≡ 3 (mod 4) this admits
    /// half-integers x, y with x − y ∈ ℤ; otherwise both must be integers.
    pub fn is_integral(&self) -> bool {
        let two = BigInt::from(2);
        if self.d % 4 == 3 {
            let tx = &self.x * BigRational::from_integer(two.clone());
            let ty = &self.y * BigRational::from_integer(two);
            tx.is_integer()
                && ty.is_integer()
                && (tx.to_integer() - ty.to_integer()).is_even()
        } else {
            self.x.is_integer() && self.y.is_integer()
        }
    }

    /// Square root within K, if one exists.
    pub fn sqrt(&self) -> Option<QuadElem> {
        let d = self.d;
        if self.is_zero() {
            return Some(Self::zero(d));
        }
        if self.y.is_zero() {
            // √u is rational, or a pure multiple of √−d when u < 0.
            if self.x.is_positive() {
                return rational_sqrt(&self.x)
                    .map(|r| QuadElem::new(r, BigRational::zero(), d));
            }
            let m = -&self.x / BigRational::from_integer(d.into());
            return rational_sqrt(&m).map(|s| QuadElem::new(BigRational::zero(), s, d));
        }
        // (r + s√−d)² = r² − d·s² + 2rs√−d: solve r² = (u ± √(u²+dv²))/2.
        let n = self.norm();
        let sqrt_n = rational_sqrt(&n)?;
        let two = BigRational::from_integer(2.into());
        for sign in [1i64, -1] {
            let r2 = (&self.x + BigRational::from_integer(sign.into()) * &sqrt_n) / &two;
            if r2.is_positive() {
                if let Some(r) = rational_sqrt(&r2) {
                    let s = &self.y / (&two * &r);
                    let cand = QuadElem::new(r, s, d);
                    if &cand * &cand == *self {
                        return Some(cand);
                    }
                }
            }
        }
        None
    }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

pub(crate) fn is_squarefree(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut m = d;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        if self.x.is_zero() {
            return write!(f, "{}*sqrt(-{})", self.y, self.d);
        }
        if self.y.is_negative() {
            write!(f, "{} - {}*sqrt(-{})", self.x, -&self.y, self.d)
        } else {
            write!(f, "{} + {}*sqrt(-{})", self.x, self.y, self.d)
        }
    }
}

impl Add for &QuadElem {
    type Output = QuadElem;
    fn add(self, rhs: &QuadElem) -> QuadElem {
        debug_assert_eq!(self.d, rhs.d);
        QuadElem { x: &self.x + &rhs.x, y: &self.y + &rhs.y, d: self.d }
    }
}

impl Sub for &QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: &QuadElem) -> QuadElem {
        debug_assert_eq!(self.d, rhs.d);
        QuadElem { x: &self.x - &rhs.x, y: &self.y - &rhs.y, d: self.d }
    }
}

impl Mul for &QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: &QuadElem) -> QuadElem {
        debug_assert_eq!(self.d, rhs.d);
        let d = BigRational::from_integer(self.d.into());
        QuadElem {
            x: &self.x * &rhs.x - d * &self.y * &rhs.y,
            y: &self.x * &rhs.y + &self.y * &rhs.x,
            d: self.d,
        }
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem { x: -&self.x, y: -&self.y, d: self.d }
    }
}

/// How a rational prime ℓ behaves in K = ℚ(√−d).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    /// ℓ = 𝔩·𝔩̄ with 𝔩 ≠ 𝔩̄; `root` is the canonical square root of −d mod ℓ
    /// (see [`PrimeSplitting::root`] for the labeling convention).
    Split { root: u64 },
    /// ℓ stays prime; the residue field is 𝔽_{ℓ²}.
    Inert,
    /// ℓ | disc(K); `root` is the image of √−d in 𝔽_ℓ.
    Ramified { root: u64 },
}

/// Splitting data for one rational prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeSplitting {
    pub ell: u64,
    pub d: u64,
    pub kind: SplitKind,
}

impl PrimeSplitting {
    /// 1 for split and ramified primes, 2 for inert ones.
    pub fn residue_degree(&self) -> u8 {
        match self.kind {
            SplitKind::Inert => 2,
            _ => 1,
        }
    }

    /// Norm of a prime above ℓ: ℓ or ℓ².
    pub fn ideal_norm(&self) -> u64 {
        match self.kind {
            SplitKind::Inert => self.ell * self.ell,
            _ => self.ell,
        }
    }

    /// The square root of −d mod ℓ labeling the "first" ideal, when split or
    /// ramified. For odd split ℓ this is the root u with 0 < u < ℓ/2; the
    /// conjugate ideal uses ℓ − u. For ℓ = 2 the two split ideals are told
    /// apart by the image of ω = (1 + √−d)/2 (0 for the first, 1 for the
    /// conjugate), and `root` is 1.
    pub fn root(&self) -> Option<u64> {
        match self.kind {
            SplitKind::Split { root } | SplitKind::Ramified { root } => Some(root),
            SplitKind::Inert => None,
        }
    }

    pub fn is_split(&self) -> bool {
        matches!(self.kind, SplitKind::Split { .. })
    }

    pub fn is_ramified(&self) -> bool {
        matches!(self.kind, SplitKind::Ramified { .. })
    }

    /// Residue-field context for primes above ℓ.
    pub fn residue_field(&self) -> FqCtx {
        match self.kind {
            SplitKind::Inert => FqCtx::quadratic(self.ell),
            _ => FqCtx::prime(self.ell),
        }
    }
}

/// Splitting of ℓ in ℚ(√−d): ramified iff ℓ | disc(K) (−4d for d ≡ 1, 2 mod 4,
/// −d for d ≡ 3 mod 4), split iff −d is a nonzero square mod ℓ, else inert.
pub fn splitting_type(ell: u64, d: u64) -> PrimeSplitting {
    assert!(is_squarefree(d), "d = {d} must be square-free");
    assert!(ell >= 2, "ell must be prime");
    let kind = if ell == 2 {
        match d % 8 {
            // disc = −4d is even for d ≡ 1, 2 (mod 4).
            1 | 5 | 2 | 6 => SplitKind::Ramified { root: if d % 2 == 0 { 0 } else { 1 } },
            7 => SplitKind::Split { root: 1 },
            3 => SplitKind::Inert,
            _ => unreachable!("d square-free"),
        }
    } else if d % ell == 0 {
        SplitKind::Ramified { root: 0 }
    } else {
        let md = (ell - d % ell) % ell;
        match sqrt_mod_p(md, ell) {
            Some(r) => SplitKind::Split { root: r.min(ell - r) },
            None => SplitKind::Inert,
        }
    };
    PrimeSplitting { ell, d, kind }
}

/// Reduces z ∈ K at a prime above ℓ. `conjugate_choice` selects the conjugate
/// ideal when ℓ splits (it is ignored otherwise: the inert reduction is
/// canonical up to Frobenius, which never changes point counts).
///
/// This is a ring homomorphism O_K → 𝔽_{N𝔩} sending √−d to a square root of
/// −d in the residue field.
pub fn reduce_quad(
    z: &QuadElem,
    p: &PrimeSplitting,
    conjugate_choice: bool,
) -> Result<FqElem> {
    debug_assert_eq!(z.d, p.d);
    let ell = p.ell;
    if ell == 2 && p.d % 4 == 3 {
        // Maximal order ℤ[ω], ω = (1+√−d)/2: rewrite z = a + bω.
        let b = &z.y * BigRational::from_integer(2.into());
        let a = &z.x - &z.y;
        let a = reduce_rational(&a, 2)?;
        let b = reduce_rational(&b, 2)?;
        return match p.kind {
            SplitKind::Split { .. } => {
                // d ≡ 7 (mod 8): ω² − ω + (1+d)/4 ≡ ω² − ω (mod 2), so ω
                // reduces to 0 at the first ideal and 1 at the conjugate.
                let w = if conjugate_choice { 1 } else { 0 };
                Ok(FqElem::new(FqCtx::prime(2), (a + b * w) % 2, 0))
            }
            SplitKind::Inert => {
                // d ≡ 3 (mod 8): ω² + ω + 1 ≡ 0 (mod 2), so ω ↦ t in 𝔽₄.
                Ok(FqElem::new(FqCtx::quadratic(2), a % 2, b % 2))
            }
            SplitKind::Ramified { .. } => unreachable!("2 unramified when d ≡ 3 mod 4"),
        };
    }
    let x = reduce_rational(&z.x, ell)?;
    let y = reduce_rational(&z.y, ell)?;
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % ell as u128) as u64;
    match p.kind {
        SplitKind::Split { root } => {
            let r = if conjugate_choice { (ell - root) % ell } else { root };
            Ok(FqElem::new(FqCtx::prime(ell), (x + mulm(y, r)) % ell, 0))
        }
        SplitKind::Ramified { root } => {
            Ok(FqElem::new(FqCtx::prime(ell), (x + mulm(y, root)) % ell, 0))
        }
        SplitKind::Inert => {
            // 𝔽_{ℓ²} = 𝔽_ℓ(t), t² = s with s the least non-residue; √−d maps
            // to y₀·t where y₀² = −d/s (a residue exactly when −d is not).
            let ctx = FqCtx::quadratic(ell);
            let s = ctx.c0();
            let md = (ell - p.d % ell) % ell;
            let s_inv = mod_inverse(s, ell).expect("s invertible");
            let y0 = sqrt_mod_p(mulm(md, s_inv), ell)
                .expect("−d/s must be a residue at an inert prime");
            Ok(FqElem::new(ctx, x, mulm(y, y0)))
        }
    }
}

/// Rational number mod ℓ; error when the denominator is divisible by ℓ.
fn reduce_rational(r: &BigRational, ell: u64) -> Result<u64> {
    let l = BigInt::from(ell);
    let den = r.denom().mod_floor(&l);
    let den_u = to_u64(&den);
    let inv = mod_inverse(den_u, ell).ok_or(Error::NonIntegralReduction { ell })?;
    let num = to_u64(&r.numer().mod_floor(&l));
    Ok(((num as u128 * inv as u128) % ell as u128) as u64)
}

fn to_u64(n: &BigInt) -> u64 {
    use num_traits::ToPrimitive;
    n.to_u64().expect("reduced residue fits in u64")
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let a = (a % m) as i128;
    let m_i = m as i128;
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m_i, a);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(((t % m_i + m_i) % m_i) as u64)
}

/// Splitting check used by sieve configuration: ℓ is unramified in K.
pub fn is_unramified(ell: u64, d: u64) -> bool {
    !splitting_type(ell, d).is_ramified()
}

/// ℓ-adic valuation of a nonzero integer.
fn big_padic_val(n: &BigInt, ell: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let l = BigInt::from(ell);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&l);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Inverse of a mod m (gcd must be 1, which the callers guarantee).
fn big_inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd == BigInt::from(1u8), "inverse of non-unit");
    e.x.mod_floor(m)
}

/// Lifts the labeled square root of −d to ℤ/ℓ^prec by Newton iteration, for ℓ
/// split in ℚ(√−d). The branch matches the ideal labels of [`reduce_quad`]:
/// for odd ℓ the lift is congruent to the canonical root of
/// [`splitting_type`], and for ℓ = 2 it is 2ω − 1 on the branch ω ≡ 0 (mod 2).
fn lift_split_root(d: u64, ell: u64, prec: u64) -> BigInt {
    let modulus = BigInt::from(ell).pow(u32::try_from(prec).expect("precision fits u32"));
    let dd = BigInt::from(d);
    let two = BigInt::from(2u8);
    if ell == 2 {
        // d ≡ 7 (mod 8): lift a root of w² − w + (1+d)/4, starting from w = 0.
        // The derivative 2w − 1 is odd, so the iteration converges and each
        // correction is even, keeping the branch.
        debug_assert_eq!(d % 8, 7);
        let quarter = (BigInt::from(1u8) + &dd) / BigInt::from(4u8);
        let mut w = BigInt::zero();
        for _ in 0..64 {
            let g = (&w * &w - &w + &quarter).mod_floor(&modulus);
            if g.is_zero() {
                break;
            }
            let gp = (&two * &w - BigInt::from(1u8)).mod_floor(&modulus);
            w = (&w - g * big_inv_mod(&gp, &modulus)).mod_floor(&modulus);
        }
        debug_assert!((&w * &w - &w + &quarter).mod_floor(&modulus).is_zero());
        (two * w - BigInt::from(1u8)).mod_floor(&modulus)
    } else {
        let root = match splitting_type(ell, d).kind {
            SplitKind::Split { root } => root,
            _ => unreachable!("caller checked that ℓ splits"),
        };
        let mut s = BigInt::from(root);
        for _ in 0..64 {
            let f = (&s * &s + &dd).mod_floor(&modulus);
            if f.is_zero() {
                break;
            }
            let fp = (&two * &s).mod_floor(&modulus);
            s = (&s - f * big_inv_mod(&fp, &modulus)).mod_floor(&modulus);
        }
        debug_assert!((&s * &s + &dd).mod_floor(&modulus).is_zero());
        s
    }
}

/// Valuations of a nonzero integral z at the two prime ideals above a split
/// rational prime ℓ, as (first, conjugate) with the same ideal labels as
/// [`reduce_quad`]: the first ideal sends √−d to the canonical root for odd ℓ
/// and ω = (1+√−d)/2 to 0 for ℓ = 2.
///
/// Computed ℓ-adically: the completion at either prime is ℚ_ℓ, and √−d is
/// lifted to one more digit of precision than the valuation of the norm, so
/// the answer is exact. Errors when ℓ is not split or z is zero or
/// non-integral.
pub fn split_valuations(z: &QuadElem, ell: u64) -> Result<(u64, u64)> {
    let p = splitting_type(ell, z.d);
    if !p.is_split() {
        return Err(Error::HypothesisViolated(format!(
            "valuation pairs need a split prime, and {ell} does not split in ℚ(√−{})",
            z.d
        )));
    }
    if z.is_zero() {
        return Err(Error::HypothesisViolated("the zero element has no finite valuation".into()));
    }
    if !z.is_integral() {
        return Err(Error::HypothesisViolated(format!("{z} is not an algebraic integer")));
    }
    // Clear the denominator (at most 2, from the half-integer basis when
    // d ≡ 3 mod 4); this shifts both valuations by v_ℓ of the factor.
    let c = z.x.denom().lcm(z.y.denom());
    let cr = BigRational::from_integer(c.clone());
    let xx = (&z.x * &cr).to_integer();
    let yy = (&z.y * &cr).to_integer();
    let norm = &xx * &xx + BigInt::from(z.d) * &yy * &yy;
    let shift = big_padic_val(&c, ell);
    let prec = big_padic_val(&norm, ell) + 2;
    let modulus = BigInt::from(ell).pow(u32::try_from(prec).expect("precision fits u32"));
    let s = lift_split_root(z.d, ell, prec);
    let mut vals = [0u64; 2];
    for (slot, img) in [(&xx + &yy * &s), (&xx - &yy * &s)].iter().enumerate() {
        let img = img.mod_floor(&modulus);
        if img.is_zero() {
            return Err(Error::InvariantViolation {
                context: "split_valuations".into(),
                msg: "valuation exceeded the working precision".into(),
            });
        }
        let raw = big_padic_val(&img, ell);
        vals[slot] = raw.checked_sub(shift).ok_or(Error::InvariantViolation {
            context: "split_valuations".into(),
            msg: "negative valuation for an integral element".into(),
        })?;
    }
    // The two valuations must account for the full norm.
    if vals[0] + vals[1] + 2 * shift != big_padic_val(&norm, ell) {
        return Err(Error::InvariantViolation {
            context: "split_valuations".into(),
            msg: "valuation pair does not add up to the norm valuation".into(),
        });
    }
    Ok((vals[0], vals[1]))
}
