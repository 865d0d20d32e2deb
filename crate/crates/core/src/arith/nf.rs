//! Elements of a number field ℚ[x]/(φ), φ monic over ℤ.
//!
//! Hecke eigenvalues and nebentypus values of the newforms we sieve against
//! live in extensions of ℚ of degree up to 8. All arithmetic here is exact;
//! the only numerical routine is [`NumberFieldElem::complex_embeddings`],
//! which is used for sanity bounds (Hecke bound checks), never for decisions.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::poly::{QPoly, ZPoly};
use crate::error::{Error, Result};

/// An element of ℚ[x]/(φ), stored as the representative of degree < deg φ.
///
/// Each element carries its defining polynomial; mixing elements of
/// different fields in arithmetic is a programming error and panics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberFieldElem {
    phi: ZPoly,
    rep: QPoly,
}

impl NumberFieldElem {
    /// Builds the element Σ coords[i]·xⁱ in ℚ[x]/(φ). Coordinate vectors
    /// longer than deg φ are reduced; shorter ones are zero-padded.
    pub fn new(phi: ZPoly, coords: Vec<BigRational>) -> Result<Self> {
        if phi.degree().unwrap_or(0) == 0 {
            return Err(Error::InvariantViolation {
                context: "NumberFieldElem".into(),
                msg: "defining polynomial must have degree >= 1".into(),
            });
        }
        if !phi.is_monic() {
            return Err(Error::InvariantViolation {
                context: "NumberFieldElem".into(),
                msg: format!("defining polynomial {:?} is not monic", phi.coeffs()),
            });
        }
        let rep = QPoly::new(coords).rem(&phi.to_qpoly());
        Ok(NumberFieldElem { phi, rep })
    }

    pub fn from_rational(phi: ZPoly, r: BigRational) -> Result<Self> {
        Self::new(phi, vec![r])
    }

    pub fn from_integer(phi: ZPoly, n: i64) -> Result<Self> {
        Self::from_rational(phi, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero(phi: ZPoly) -> Result<Self> {
        Self::new(phi, Vec::new())
    }

    pub fn one(phi: ZPoly) -> Result<Self> {
        Self::from_rational(phi, BigRational::one())
    }

    pub fn field_poly(&self) -> &ZPoly {
        &self.phi
    }

    pub fn field_degree(&self) -> usize {
        self.phi.degree().expect("validated at construction")
    }

    /// Coordinates with respect to the power basis 1, x, …, x^{deg φ − 1},
    /// zero-padded to exactly deg φ entries.
    pub fn coords(&self) -> Vec<BigRational> {
        let n = self.field_degree();
        let mut out = self.rep.coeffs().to_vec();
        out.resize(n, BigRational::zero());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    /// True when the element lies in ℚ ⊆ ℚ[x]/(φ).
    pub fn is_rational(&self) -> bool {
        self.rep.degree().unwrap_or(0) == 0
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.rep.coeff(0))
        } else {
            None
        }
    }

    fn check_same_field(&self, rhs: &Self) {
        assert_eq!(
            self.phi, rhs.phi,
            "number field mismatch: operands have different defining polynomials"
        );
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.check_same_field(rhs);
        NumberFieldElem {
            phi: self.phi.clone(),
            rep: self.rep.add(&rhs.rep),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.check_same_field(rhs);
        NumberFieldElem {
            phi: self.phi.clone(),
            rep: self.rep.sub(&rhs.rep),
        }
    }

    pub fn neg(&self) -> Self {
        NumberFieldElem {
            phi: self.phi.clone(),
            rep: self.rep.neg(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.check_same_field(rhs);
        NumberFieldElem {
            phi: self.phi.clone(),
            rep: self.rep.mul(&rhs.rep).rem(&self.phi.to_qpoly()),
        }
    }

    /// Subtracts a rational scalar (common case: eigenvalue minus an
    /// integer trace of Frobenius).
    pub fn sub_rational(&self, r: &BigRational) -> Self {
        NumberFieldElem {
            phi: self.phi.clone(),
            rep: self.rep.sub(&QPoly::constant(r.clone())),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        NumberFieldElem {
            phi: self.phi.clone(),
            rep: self.rep.scale(r),
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = NumberFieldElem {
            phi: self.phi.clone(),
            rep: QPoly::constant(BigRational::one()),
        };
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The images of the element under all complex embeddings of the field,
    /// in the order of the (numerically computed) roots of φ. Accuracy is
    /// limited by f64; intended for tolerance checks, not exact logic.
    pub fn complex_embeddings(&self) -> Vec<Complex64> {
        let roots = complex_roots(&self.phi);
        roots.iter().map(|z| eval_complex(&self.rep, *z)).collect()
    }
}

/// The norm from ℚ[x]/(φ) down to ℚ: the product of all conjugates of α,
/// computed exactly as the resultant Res(φ, g) where g represents α
/// (φ is monic, so no leading-coefficient correction is needed).
pub fn nf_norm(alpha: &NumberFieldElem) -> BigRational {
    if alpha.is_zero() {
        return BigRational::zero();
    }
    alpha.phi.to_qpoly().resultant(&alpha.rep)
}

/// All roots of a monic integer polynomial in ℂ by the Durand–Kerner
/// iteration. Adequate for the small defining polynomials we meet
/// (degree ≤ 8, moderate height).
fn complex_roots(phi: &ZPoly) -> Vec<Complex64> {
    let n = phi.degree().expect("nonzero polynomial");
    let coeffs: Vec<Complex64> = phi
        .coeffs()
        .iter()
        .map(|c| Complex64::new(c.to_f64().unwrap_or(f64::MAX), 0.0))
        .collect();
    let eval = |z: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    // Non-real, non-root-of-unity seed spreads the iterates asymmetrically.
    let seed = Complex64::new(0.4, 0.9);
    let mut zs: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32 + 1)).collect();
    for _ in 0..500 {
        let mut moved = 0.0_f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= zs[i] - zs[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let delta = eval(zs[i]) / denom;
            zs[i] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved < 1e-13 {
            break;
        }
    }
    zs
}

fn eval_complex(g: &QPoly, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in g.coeffs().iter().rev() {
        acc = acc * z + Complex64::new(c.to_f64().unwrap_or(f64::MAX), 0.0);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Signed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn norm_of_sqrt3_is_minus_3() {
        let phi = ZPoly::from_ints(&[-3, 0, 1]);
        let alpha = NumberFieldElem::new(phi, vec![int(0), int(1)]).unwrap();
        assert_eq!(nf_norm(&alpha), int(-3));
    }

    #[test]
    fn norm_of_rational_is_power_of_degree() {
        let phi = ZPoly::from_ints(&[-3, 0, 1]);
        let two = NumberFieldElem::from_integer(phi.clone(), 2).unwrap();
        assert_eq!(nf_norm(&two), int(4));
        // Degree 4: same scalar, fourth power.
        let phi4 = ZPoly::from_ints(&[11, 1, 0, 0, 1]);
        let two4 = NumberFieldElem::from_integer(phi4, 2).unwrap();
        assert_eq!(nf_norm(&two4), int(16));
    }

    #[test]
    fn norm_of_zero_is_zero() {
        let phi = ZPoly::from_ints(&[5, -1, 1]);
        let z = NumberFieldElem::zero(phi).unwrap();
        assert_eq!(nf_norm(&z), int(0));
    }

    #[test]
    fn construction_rejects_non_monic_and_constant() {
        assert!(NumberFieldElem::zero(ZPoly::from_ints(&[-1, 2])).is_err());
        assert!(NumberFieldElem::zero(ZPoly::from_ints(&[7])).is_err());
    }

    #[test]
    fn coords_are_reduced_and_padded() {
        let phi = ZPoly::from_ints(&[-3, 0, 1]);
        // x² reduces to 3.
        let a = NumberFieldElem::new(phi.clone(), vec![int(0), int(0), int(1)]).unwrap();
        assert_eq!(a.coords(), vec![int(3), int(0)]);
        assert!(a.is_rational());
        assert_eq!(a.as_rational().unwrap(), int(3));
        let b = NumberFieldElem::from_integer(phi, 9).unwrap();
        assert_eq!(b.coords().len(), 2);
    }

    #[test]
    fn norm_is_multiplicative_on_random_samples() {
        let fields = [
            ZPoly::from_ints(&[-3, 0, 1]),
            ZPoly::from_ints(&[5, -1, 1]),
            ZPoly::from_ints(&[11, 1, 0, 0, 1]),
            ZPoly::from_ints(&[3, 0, -2, 0, 0, 0, 0, 0, 1]),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for phi in &fields {
            let deg = phi.degree().unwrap();
            for _ in 0..50 {
                let coords_a: Vec<BigRational> =
                    (0..deg).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
                let coords_b: Vec<BigRational> =
                    (0..deg).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
                let a = NumberFieldElem::new(phi.clone(), coords_a).unwrap();
                let b = NumberFieldElem::new(phi.clone(), coords_b).unwrap();
                assert_eq!(nf_norm(&a.mul(&b)), nf_norm(&a) * nf_norm(&b));
            }
        }
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let phi = ZPoly::from_ints(&[11, 1, 0, 0, 1]);
        let a = NumberFieldElem::new(
            phi.clone(),
            vec![int(1), rat(1, 2), int(-2), int(0)],
        )
        .unwrap();
        let mut acc = NumberFieldElem::one(phi).unwrap();
        for e in 0..7 {
            assert_eq!(a.pow(e), acc);
            acc = acc.mul(&a);
        }
    }

    #[test]
    fn cube_root_of_unity_has_order_three() {
        let phi = ZPoly::from_ints(&[1, 1, 1]);
        let omega = NumberFieldElem::new(phi.clone(), vec![int(0), int(1)]).unwrap();
        let one = NumberFieldElem::one(phi).unwrap();
        assert_ne!(omega.pow(1), one);
        assert_ne!(omega.pow(2), one);
        assert_eq!(omega.pow(3), one);
        assert_eq!(nf_norm(&omega), int(1));
    }

    /// High-precision square root of a non-negative rational: floor of
    /// √(x·10^{2·digits}) over 10^{digits}. Relative error ≤ 10^{-digits}
    /// on the values used here.
    fn sqrt_rational_approx(x: &BigRational, digits: u32) -> BigRational {
        assert!(!x.is_negative());
        let scale = BigInt::from(10).pow(digits);
        let scaled = (x.numer() * &scale * &scale) / x.denom();
        BigRational::new(scaled.sqrt(), scale)
    }

    #[test]
    fn quadratic_norm_matches_embedding_product_to_20_digits() {
        // For φ = x² + bx + c the embeddings of u + v·x are u + v·θ± with
        // θ± = (−b ± √(b²−4c))/2. The product is evaluated with 40-digit
        // square roots, far below the 10⁻²⁰ relative tolerance.
        let cases = [(0i64, -3i64), (1, 5), (-1, 5), (0, 7)];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for (b, c) in cases {
            let phi = ZPoly::from_ints(&[c, b, 1]);
            let disc = int(b * b - 4 * c);
            for _ in 0..25 {
                let u = rat(rng.gen_range(-99..=99), rng.gen_range(1..=7));
                let v = rat(rng.gen_range(-99..=99).max(1), rng.gen_range(1..=7));
                let alpha =
                    NumberFieldElem::new(phi.clone(), vec![u.clone(), v.clone()]).unwrap();
                let exact = nf_norm(&alpha);
                let half = rat(1, 2);
                let numeric = if disc >= int(0) {
                    let s = sqrt_rational_approx(&disc, 40);
                    let th1 = (&s - int(b)) * &half;
                    let th2 = (-&s - int(b)) * &half;
                    (&u + &v * th1) * (&u + &v * th2)
                } else {
                    // Conjugate pair: |u + vθ|² = (u − vb/2)² + v²·|disc|/4.
                    let re = &u - &v * int(b) * &half;
                    let im = &v * sqrt_rational_approx(&(-&disc), 40) * &half;
                    &re * &re + &im * &im
                };
                let err = (&numeric - &exact).abs();
                let tol = exact.abs() * rat(1, 10).pow(20);
                assert!(err <= tol, "norm {} vs numeric {} (b={}, c={})", exact, numeric, b, c);
            }
        }
    }

    #[test]
    fn complex_embeddings_multiply_to_the_norm() {
        // Degree 8 with two real and six complex roots; the product of all
        // embeddings must come back to the exact norm within f64 accuracy.
        let phi = ZPoly::from_ints(&[-1, -1, 0, 0, 0, 0, 0, 0, 1]);
        let alpha = NumberFieldElem::new(
            phi,
            vec![int(2), int(-1), int(0), int(1), int(0), int(0), int(0), int(0)],
        )
        .unwrap();
        let exact = nf_norm(&alpha).to_f64().unwrap();
        let mut prod = Complex64::new(1.0, 0.0);
        for z in alpha.complex_embeddings() {
            prod *= z;
        }
        assert!(prod.im.abs() < 1e-6 * (1.0 + prod.re.abs()));
        assert!((prod.re - exact).abs() < 1e-6 * (1.0 + exact.abs()));
    }

    #[test]
    fn sqrt3_embeddings_are_plus_minus_sqrt3() {
        let phi = ZPoly::from_ints(&[-3, 0, 1]);
        let alpha = NumberFieldElem::new(phi, vec![int(0), int(1)]).unwrap();
        let mut vals: Vec<f64> = alpha.complex_embeddings().iter().map(|z| z.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] + 3f64.sqrt()).abs() < 1e-9);
        assert!((vals[1] - 3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    #[should_panic(expected = "number field mismatch")]
    fn mixing_fields_panics() {
        let a = NumberFieldElem::one(ZPoly::from_ints(&[-3, 0, 1])).unwrap();
        let b = NumberFieldElem::one(ZPoly::from_ints(&[5, -1, 1])).unwrap();
        let _ = a.add(&b);
    }
}
