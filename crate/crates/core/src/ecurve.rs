//! Weierstrass models over a generic coefficient domain: invariants,
//! singularity tests, naive point counting, 3-torsion search, twists.
//!
//! The same model type serves three domains: ℚ (rational reference curves),
//! K = ℚ(√−d) (Frey curves), and 𝔽_q (reductions fed to the sieve). Point
//! counting is deliberately naive; the auxiliary primes involved are small
//! and determinism matters more than speed.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{
    monic_quadratic_factors, rational_roots, rational_sqrt, FqElem, QPoly, QuadElem,
};
use crate::error::{Error, Result};

/// Coefficient domains a Weierstrass model can live over.
///
/// The `_like` constructors take `self` as a witness so context-carrying
/// domains (finite fields, quadratic fields) can produce constants of the
/// right field; the witness value itself is ignored.
pub trait CurveCoeff: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse; `None` exactly for zero divisors and zero.
    fn inv(&self) -> Option<Self>;
}

impl CurveCoeff for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }

    fn one_like(&self) -> Self {
        BigRational::one()
    }

    fn from_i64_like(&self, n: i64) -> Self {
        BigRational::from_integer(n.into())
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl CurveCoeff for QuadElem {
    fn zero_like(&self) -> Self {
        QuadElem::zero(self.d)
    }

    fn one_like(&self) -> Self {
        QuadElem::one(self.d)
    }

    fn from_i64_like(&self, n: i64) -> Self {
        QuadElem::from_ints(n, 0, self.d)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn is_zero(&self) -> bool {
        QuadElem::is_zero(self)
    }

    fn inv(&self) -> Option<Self> {
        QuadElem::inv(self)
    }
}

impl CurveCoeff for FqElem {
    fn zero_like(&self) -> Self {
        self.ctx().zero()
    }

    fn one_like(&self) -> Self {
        self.ctx().one()
    }

    fn from_i64_like(&self, n: i64) -> Self {
        self.ctx().from_i64(n)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        self.neg_elem()
    }

    fn is_zero(&self) -> bool {
        FqElem::is_zero(self)
    }

    fn inv(&self) -> Option<Self> {
        FqElem::inv(self)
    }
}

/// A (long) Weierstrass model y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassModel<F: CurveCoeff> {
    pub a1: F,
    pub a2: F,
    pub a3: F,
    pub a4: F,
    pub a6: F,
}

/// The b-, c-invariants and discriminant; `j` is present iff Δ ≠ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveInvariants<F: CurveCoeff> {
    pub b2: F,
    pub b4: F,
    pub b6: F,
    pub b8: F,
    pub c4: F,
    pub c6: F,
    pub disc: F,
    pub j: Option<F>,
}

impl<F: CurveCoeff> WeierstrassModel<F> {
    pub fn new(a1: F, a2: F, a3: F, a4: F, a6: F) -> Self {
        WeierstrassModel { a1, a2, a3, a4, a6 }
    }

    /// Short model y² = x³ + a4·x + a6.
    pub fn short(a4: F, a6: F) -> Self {
        let zero = a4.zero_like();
        WeierstrassModel { a1: zero.clone(), a2: zero.clone(), a3: zero, a4, a6 }
    }

    pub fn invariants(&self) -> CurveInvariants<F> {
        let c = |n: i64| self.a1.from_i64_like(n);
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let b2 = a1.mul(a1).add(&c(4).mul(a2));
        let b4 = c(2).mul(a4).add(&a1.mul(a3));
        let b6 = a3.mul(a3).add(&c(4).mul(a6));
        let b8 = a1
            .mul(a1)
            .mul(a6)
            .add(&c(4).mul(a2).mul(a6))
            .sub(&a1.mul(a3).mul(a4))
            .add(&a2.mul(a3).mul(a3))
            .sub(&a4.mul(a4));
        let c4 = b2.mul(&b2).sub(&c(24).mul(&b4));
        let c6 = b2
            .mul(&b2)
            .mul(&b2)
            .neg()
            .add(&c(36).mul(&b2).mul(&b4))
            .sub(&c(216).mul(&b6));
        let disc = b2
            .mul(&b2)
            .mul(&b8)
            .neg()
            .sub(&c(8).mul(&b4).mul(&b4).mul(&b4))
            .sub(&c(27).mul(&b6).mul(&b6))
            .add(&c(9).mul(&b2).mul(&b4).mul(&b6));
        let j = disc.inv().map(|dinv| c4.mul(&c4).mul(&c4).mul(&dinv));
        CurveInvariants { b2, b4, b6, b8, c4, c6, disc, j }
    }

    pub fn discriminant(&self) -> F {
        self.invariants().disc
    }

    pub fn is_singular(&self) -> bool {
        self.discriminant().is_zero()
    }

    /// x³ + a2·x² + a4·x + a6.
    fn rhs_at(&self, x: &F) -> F {
        x.add(&self.a2).mul(x).add(&self.a4).mul(x).add(&self.a6)
    }

    pub fn is_on_curve(&self, p: &(F, F)) -> bool {
        let (x, y) = p;
        let lhs = y.add(&self.a1.mul(x)).add(&self.a3).mul(y);
        lhs == self.rhs_at(x)
    }

    /// −P = (x, −y − a1·x − a3).
    pub fn negate_point(&self, p: &(F, F)) -> (F, F) {
        let (x, y) = p;
        (x.clone(), y.add(&self.a1.mul(x)).add(&self.a3).neg())
    }

    /// 2P under the group law; `None` means 2P is the point at infinity.
    pub fn double_point(&self, p: &(F, F)) -> Option<(F, F)> {
        let (x, y) = p;
        let c = |n: i64| self.a1.from_i64_like(n);
        let den = c(2).mul(y).add(&self.a1.mul(x)).add(&self.a3);
        let den_inv = den.inv()?;
        let num = c(3)
            .mul(x)
            .mul(x)
            .add(&c(2).mul(&self.a2).mul(x))
            .add(&self.a4)
            .sub(&self.a1.mul(y));
        let lambda = num.mul(&den_inv);
        let x2 = lambda
            .mul(&lambda)
            .add(&self.a1.mul(&lambda))
            .sub(&self.a2)
            .sub(&c(2).mul(x));
        let y2 = lambda
            .mul(&x.sub(&x2))
            .sub(y)
            .sub(&self.a1.mul(&x2))
            .sub(&self.a3);
        Some((x2, y2))
    }

    /// Certifies that P is an affine point of order exactly 3: on the curve
    /// and 2P = −P (a 2-torsion point fails because 2P = O there).
    pub fn has_order_three(&self, p: &(F, F)) -> bool {
        self.is_on_curve(p)
            && self.double_point(p).map_or(false, |dp| dp == self.negate_point(p))
    }

    /// Coefficients of the 3-division polynomial
    /// ψ₃ = 3x⁴ + b2·x³ + 3b4·x² + 3b6·x + b8, ascending.
    fn psi3_coeffs(&self) -> [F; 5] {
        let inv = self.invariants();
        let c = |n: i64| self.a1.from_i64_like(n);
        [
            inv.b8,
            c(3).mul(&inv.b6),
            c(3).mul(&inv.b4),
            inv.b2,
            c(3),
        ]
    }

    /// The quadratic twist by δ ≠ 0 (coefficient domain must have 2
    /// invertible). The model is first completed to y² = x³ + (b2/4)x² +
    /// (b4/2)x + (b6/4), then coefficients are scaled by δ, δ², δ³.
    pub fn quadratic_twist(&self, delta: &F) -> WeierstrassModel<F> {
        assert!(!delta.is_zero(), "twist parameter must be non-zero");
        let half = self
            .a1
            .from_i64_like(2)
            .inv()
            .expect("quadratic_twist requires 2 invertible in the coefficient domain");
        let quarter = half.mul(&half);
        let inv = self.invariants();
        let d2 = delta.mul(delta);
        let d3 = d2.mul(delta);
        WeierstrassModel::short_with_a2(
            delta.mul(&inv.b2).mul(&quarter),
            d2.mul(&inv.b4).mul(&half),
            d3.mul(&inv.b6).mul(&quarter),
        )
    }

    fn short_with_a2(a2: F, a4: F, a6: F) -> Self {
        let zero = a2.zero_like();
        WeierstrassModel { a1: zero.clone(), a2, a3: zero, a4, a6 }
    }
}

/// Default ceiling on the residue field size for naive point counting.
pub const DEFAULT_FIELD_CAP: u64 = 1_000_000;

/// a_q = q + 1 − #E(𝔽_q) with the default field-size cap.
pub fn count_points(e: &WeierstrassModel<FqElem>) -> Result<i64> {
    count_points_capped(e, DEFAULT_FIELD_CAP)
}

/// a_q by naive enumeration: for odd q, one character sum over x using a
/// precomputed square table; for q ∈ {2, 4}, direct enumeration of (x, y).
pub fn count_points_capped(e: &WeierstrassModel<FqElem>, cap: u64) -> Result<i64> {
    let ctx = e.a1.ctx();
    let q = ctx.q();
    if q > cap {
        return Err(Error::FieldTooLarge { q, cap });
    }
    if e.is_singular() {
        return Err(Error::SingularModel);
    }
    if ctx.p() == 2 {
        let mut affine = 0i64;
        for x in ctx.elements() {
            for y in ctx.elements() {
                let lhs = &(&y + &(&e.a1 * &x)) + &e.a3;
                if (&lhs * &y) == e.rhs_at(&x) {
                    affine += 1;
                }
            }
        }
        return Ok(q as i64 + 1 - (affine + 1));
    }
    // Complete the square: (2y + a1x + a3)² = 4x³ + b2x² + 2b4x + b6, so the
    // number of points over x is 1 + χ(g(x)).
    let inv = e.invariants();
    let mut square = vec![false; q as usize];
    for v in ctx.elements() {
        if !v.is_zero() {
            square[(&v * &v).index() as usize] = true;
        }
    }
    let four = ctx.from_u64(4);
    let two_b4 = &ctx.from_u64(2) * &inv.b4;
    let mut sum = 0i64;
    for x in ctx.elements() {
        let g = &(&(&(&(&four * &x) + &inv.b2) * &x) + &two_b4) * &x;
        let g = &g + &inv.b6;
        if !g.is_zero() {
            sum += if square[g.index() as usize] { 1 } else { -1 };
        }
    }
    Ok(-sum)
}

/// Where to look for 3-torsion coordinates: ℚ only, or all of K = ℚ(√−d).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchField {
    Rational,
    QuadraticField,
}

/// Searches for a point of order 3 on a model over K = ℚ(√−d).
///
/// The x-coordinates of 3-torsion points are the roots of ψ₃. Writing
/// ψ₃ = A(x) + B(x)·√−d with A, B ∈ ℚ[x], the roots in ℚ are the common
/// rational roots of A and B, and the roots in K∖ℚ have a ℚ-minimal
/// polynomial dividing the norm form A² + d·B², quadratic with discriminant
/// −d·(rational)². Candidates from both sources are verified exactly in K,
/// the y-coordinate is solved from the curve equation, and any returned
/// point is certified to have order 3 under the group law.
pub fn has_3_torsion(
    e: &WeierstrassModel<QuadElem>,
    search_field: SearchField,
) -> Option<(QuadElem, QuadElem)> {
    if e.is_singular() {
        return None;
    }
    let d = e.a1.d;
    let psi3 = e.psi3_coeffs();
    let a_part = QPoly::new(psi3.iter().map(|c| c.x.clone()).collect());
    let b_part = QPoly::new(psi3.iter().map(|c| c.y.clone()).collect());

    let mut candidates: Vec<QuadElem> = Vec::new();
    let rational_xs = if b_part.is_zero() {
        rational_roots(&a_part.to_primitive().0)
    } else {
        let common = a_part.gcd(&b_part);
        if common.degree().map_or(true, |deg| deg == 0) {
            Vec::new()
        } else {
            rational_roots(&common.to_primitive().0)
        }
    };
    for x in rational_xs {
        candidates.push(QuadElem::from_rational(x, d));
    }

    if search_field == SearchField::QuadraticField {
        // Norm form: its quadratic factors over ℚ with discriminant −d·s²
        // are the minimal polynomials of the x-coordinates in K∖ℚ.
        let d_rat = BigRational::from_integer(d.into());
        let norm_form = a_part.mul(&a_part).add(&b_part.mul(&b_part).scale(&d_rat));
        let half = BigRational::new(1.into(), 2.into());
        for (t, n) in monic_quadratic_factors(&norm_form.to_primitive().0) {
            let disc = &t * &t - BigRational::from_integer(4.into()) * &n;
            if disc.is_positive() || Zero::is_zero(&disc) {
                continue;
            }
            if let Some(s) = rational_sqrt(&(-&disc / &d_rat)) {
                let re = -&t * &half;
                let im = &s * &half;
                for sign in [1i64, -1] {
                    let x = QuadElem::new(
                        re.clone(),
                        &im * BigRational::from_integer(sign.into()),
                        d,
                    );
                    if eval_quad_poly(&psi3, &x).is_zero() {
                        candidates.push(x);
                    }
                }
            }
        }
    }

    for x in candidates {
        // y² + (a1x + a3)y = rhs(x): solve the quadratic in y over K.
        let lin = &(&e.a1 * &x) + &e.a3;
        let disc_y = &(&lin * &lin) + &e.rhs_at(&x).scale(&BigRational::from_integer(4.into()));
        let root = match disc_y.sqrt() {
            Some(r) => r,
            None => continue,
        };
        let half = BigRational::new(1.into(), 2.into());
        for sign in [1i64, -1] {
            let y = (&root.scale(&BigRational::from_integer(sign.into())) - &lin).scale(&half);
            if search_field == SearchField::Rational
                && !(x.is_rational() && y.is_rational())
            {
                continue;
            }
            let p = (x.clone(), y);
            if e.has_order_three(&p) {
                return Some(p);
            }
        }
    }
    None
}

/// 3-torsion with coordinates in ℚ, for models defined over ℚ.
pub fn has_3_torsion_rational(
    e: &WeierstrassModel<BigRational>,
) -> Option<(BigRational, BigRational)> {
    if e.is_singular() {
        return None;
    }
    let psi3 = QPoly::new(e.psi3_coeffs().to_vec());
    let half = BigRational::new(1.into(), 2.into());
    for x in rational_roots(&psi3.to_primitive().0) {
        let lin = &e.a1 * &x + &e.a3;
        let disc_y = &lin * &lin + BigRational::from_integer(4.into()) * e.rhs_at(&x);
        let root = match rational_sqrt(&disc_y) {
            Some(r) => r,
            None => continue,
        };
        for sign in [1i64, -1] {
            let y = (&root * BigRational::from_integer(sign.into()) - &lin) * &half;
            let p = (x.clone(), y);
            if e.has_order_three(&p) {
                return Some(p);
            }
        }
    }
    None
}

fn eval_quad_poly(coeffs: &[QuadElem; 5], x: &QuadElem) -> QuadElem {
    let mut acc = QuadElem::zero(x.d);
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}
