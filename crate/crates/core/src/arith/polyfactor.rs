//! Rational roots and monic quadratic divisors of integer polynomials.
//!
//! Divisor-enumeration root finding breaks down once the constant or leading
//! coefficient stops being factorable, so both searches here run p-adically:
//! factor the square-free part modulo a good small prime (Cantor-Zassenhaus),
//! Hensel-lift to a modulus dominating the coefficient bounds, then read off
//! degree ≤ 2 candidates by rational reconstruction. Every candidate is
//! verified by exact division, so unlucky reconstructions are harmless.

use super::poly::{QPoly, ZPoly};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// All rational roots of f ≠ 0 (without multiplicity).
pub fn rational_roots(f: &ZPoly) -> Vec<BigRational> {
    let sf = match squarefree_part(f) {
        Some(sf) => sf,
        None => return Vec::new(),
    };
    if sf.degree() == Some(0) {
        return Vec::new();
    }
    let lifted = lift_factors(&sf);
    let lc = BigRational::from_integer(lifted.lc.clone());
    let mut roots = Vec::new();
    for fac in lifted.factors.iter().filter(|g| g.coeffs().len() == 2) {
        // Monic x + c mod p^K over the monicized polynomial: its root −c
        // corresponds to −c/lc on f itself.
        let c = fac.coeff(0);
        let r = (-c).mod_floor(&lifted.modulus);
        if let Some(scaled) = rational_reconstruct(&r, &lifted.modulus) {
            let cand = scaled / &lc;
            if sf.eval(&cand).is_zero() && !roots.contains(&cand) {
                roots.push(cand);
            }
        }
    }
    roots.sort();
    roots
}

/// All monic quadratic divisors x² + t·x + n of f over ℚ, as (t, n) pairs.
/// Reducible divisors (products of two rational roots) are included.
pub fn monic_quadratic_factors(f: &ZPoly) -> Vec<(BigRational, BigRational)> {
    let sf = match squarefree_part(f) {
        Some(sf) => sf,
        None => return Vec::new(),
    };
    if sf.degree().map_or(true, |d| d < 2) {
        return Vec::new();
    }
    let lifted = lift_factors(&sf);
    let m = &lifted.modulus;
    let lc = BigRational::from_integer(lifted.lc.clone());
    let lc2 = &lc * &lc;
    let mut candidates: Vec<(BigInt, BigInt)> = Vec::new();
    let linears: Vec<&ZPoly> = lifted.factors.iter().filter(|g| g.coeffs().len() == 2).collect();
    for fac in lifted.factors.iter().filter(|g| g.coeffs().len() == 3) {
        candidates.push((fac.coeff(1), fac.coeff(0)));
    }
    for i in 0..linears.len() {
        for j in (i + 1)..linears.len() {
            let (c1, c2) = (linears[i].coeff(0), linears[j].coeff(0));
            candidates.push(((&c1 + &c2).mod_floor(m), (&c1 * &c2).mod_floor(m)));
        }
    }
    let fq = sf.to_qpoly();
    let mut out: Vec<(BigRational, BigRational)> = Vec::new();
    for (t_res, n_res) in candidates {
        // x² + t*·x + n* divides the monicized polynomial; dividing the roots
        // by lc turns it into x² + (t*/lc)·x + n*/lc² on f itself.
        let (t, n) = match (
            rational_reconstruct(&t_res.mod_floor(m), m),
            rational_reconstruct(&n_res.mod_floor(m), m),
        ) {
            (Some(t), Some(n)) => (t / &lc, n / &lc2),
            _ => continue,
        };
        let quad = QPoly::new(vec![n.clone(), t.clone(), BigRational::one()]);
        if fq.rem(&quad).is_zero() && !out.contains(&(t.clone(), n.clone())) {
            out.push((t, n));
        }
    }
    out.sort();
    out
}

/// Primitive square-free part of f, or None when f = 0.
fn squarefree_part(f: &ZPoly) -> Option<ZPoly> {
    if f.is_zero() {
        return None;
    }
    let fq = f.to_qpoly();
    let g = fq.gcd(&fq.derivative());
    let sf = if g.degree() == Some(0) { fq } else { fq.divrem(&g).0 };
    Some(sf.to_primitive().0)
}

struct LiftedFactorization {
    /// Monic factors of the monicized f, with coefficients mod p^K.
    factors: Vec<ZPoly>,
    modulus: BigInt,
    /// Leading coefficient of f: roots of the monicized polynomial are lc
    /// times roots of f.
    lc: BigInt,
}

/// Factors the primitive square-free f modulo a good prime and lifts to a
/// modulus large enough for degree ≤ 2 rational reconstruction.
///
/// Works with the monic polynomial f*(x) = lcⁿ⁻¹·f(x/lc), whose degree ≤ 2
/// factors biject with those of f; callers undo the substitution after
/// reconstruction and verify against f itself.
fn lift_factors(f: &ZPoly) -> LiftedFactorization {
    debug_assert!(f.degree().map_or(false, |d| d >= 1));
    let monic = monicize(f);
    let p = pick_prime(&monic);
    let modp = FpPoly::from_zpoly(&monic, p);
    let irreducibles = factor_modp(&modp);
    // Bound for reconstruction: the classical Mignotte-style bound
    // 2^(deg+2)·height dominates the coefficients of every degree ≤ 2 monic
    // divisor of the monicized polynomial.
    let height = monic.height().max(BigInt::one());
    let bound: BigInt = (BigInt::one() << (monic.degree().unwrap() as u32 + 2)) * &height;
    let target: BigInt = &bound * &bound * 2 + 1;
    let mut modulus = BigInt::from(p);
    while modulus < target {
        modulus = &modulus * &modulus;
    }
    let factors = hensel_lift_tree(&monic, &irreducibles, p, &modulus);
    LiftedFactorization { factors, modulus, lc: f.lead() }
}

/// lcⁿ⁻¹·f(x/lc): monic with integer coefficients, same splitting behavior.
fn monicize(f: &ZPoly) -> ZPoly {
    let lc = f.lead();
    if lc.is_one() {
        return f.clone();
    }
    let n = f.degree().unwrap();
    let mut coeffs = Vec::with_capacity(n + 1);
    // coefficient of x^i in f* is a_i · lc^{n−1−i}
    let mut pow = BigInt::one();
    let mut pows = vec![BigInt::one()];
    for _ in 0..n {
        pow *= &lc;
        pows.push(pow.clone());
    }
    for i in 0..=n {
        coeffs.push(f.coeff(i) * &pows[n - 1 - i.min(n - 1)]);
    }
    // The leading coefficient picked up lc^{-1}·lc^{n}·...: fix it to 1.
    coeffs[n] = BigInt::one();
    ZPoly::new(coeffs)
}

fn pick_prime(f: &ZPoly) -> u64 {
    let mut p = 101u64;
    loop {
        if f.lead().mod_floor(&BigInt::from(p)) != BigInt::zero() {
            let fp = FpPoly::from_zpoly(f, p);
            let deriv = fp.derivative();
            if !deriv.is_zero() && fp.gcd(&deriv).degree() == Some(0) {
                return p;
            }
        }
        p = super::int::next_prime(p);
    }
}

/// Rational reconstruction: the unique a/b with a ≡ r·b (mod m) and
/// |a|, |b| ≤ √(m/2), when it exists.
fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let mut r0 = m.clone();
    let mut r1 = r.mod_floor(m);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if t1.is_negative() {
        r1 = -r1;
        t1 = -t1;
    }
    if r1.gcd(&t1) != BigInt::one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

// ---- arithmetic in F_p[x] ----

#[derive(Debug, Clone, PartialEq, Eq)]
struct FpPoly {
    c: Vec<u64>,
    p: u64,
}

impl FpPoly {
    fn new(mut c: Vec<u64>, p: u64) -> Self {
        for v in &mut c {
            *v %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { c, p }
    }

    fn zero(p: u64) -> Self {
        FpPoly { c: Vec::new(), p }
    }

    fn one(p: u64) -> Self {
        FpPoly { c: vec![1], p }
    }

    fn x(p: u64) -> Self {
        FpPoly { c: vec![0, 1], p }
    }

    fn from_zpoly(f: &ZPoly, p: u64) -> Self {
        let pb = BigInt::from(p);
        FpPoly::new(
            f.coeffs().iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect(),
            p,
        )
    }

    fn to_zpoly(&self) -> ZPoly {
        ZPoly::new(self.c.iter().map(|&v| BigInt::from(v)).collect())
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    fn lead(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    fn coeff(&self, i: usize) -> u64 {
        *self.c.get(i).unwrap_or(&0)
    }

    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn sub(&self, rhs: &FpPoly) -> FpPoly {
        let n = self.c.len().max(rhs.c.len());
        FpPoly::new(
            (0..n).map(|i| self.coeff(i) + self.p - rhs.coeff(i) % self.p).collect(),
            self.p,
        )
    }

    fn mul(&self, rhs: &FpPoly) -> FpPoly {
        if self.is_zero() || rhs.is_zero() {
            return FpPoly::zero(self.p);
        }
        let mut out = vec![0u64; self.c.len() + rhs.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.c.iter().enumerate() {
                out[i + j] = (out[i + j] + self.mulmod(a, b)) % self.p;
            }
        }
        FpPoly::new(out, self.p)
    }

    fn scale(&self, k: u64) -> FpPoly {
        FpPoly::new(self.c.iter().map(|&a| self.mulmod(a, k)).collect(), self.p)
    }

    fn monic(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lead(), self.p))
    }

    fn divrem(&self, rhs: &FpPoly) -> (FpPoly, FpPoly) {
        let dr = rhs.degree().expect("division by zero");
        if self.degree().map_or(true, |d| d < dr) {
            return (FpPoly::zero(self.p), self.clone());
        }
        let mut rem = self.c.clone();
        let mut quot = vec![0u64; rem.len() - dr];
        let linv = inv_mod(rhs.lead(), self.p);
        for i in (dr..rem.len()).rev() {
            let c = self.mulmod(rem[i], linv);
            if c == 0 {
                continue;
            }
            quot[i - dr] = c;
            for j in 0..=dr {
                let t = self.mulmod(rhs.c[j], c);
                rem[i - dr + j] = (rem[i - dr + j] + self.p - t) % self.p;
            }
        }
        (FpPoly::new(quot, self.p), FpPoly::new(rem, self.p))
    }

    fn rem(&self, rhs: &FpPoly) -> FpPoly {
        self.divrem(rhs).1
    }

    fn gcd(&self, rhs: &FpPoly) -> FpPoly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    fn derivative(&self) -> FpPoly {
        if self.c.len() <= 1 {
            return FpPoly::zero(self.p);
        }
        FpPoly::new(
            self.c[1..]
                .iter()
                .enumerate()
                .map(|(i, &a)| self.mulmod(a, (i as u64 + 1) % self.p))
                .collect(),
            self.p,
        )
    }

    /// self^e mod m, with a big-integer exponent.
    fn pow_mod(&self, e: &BigUint, m: &FpPoly) -> FpPoly {
        let mut acc = FpPoly::one(self.p);
        let mut base = self.rem(m);
        for i in 0..e.bits() {
            if e.bit(i) {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
        }
        acc
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a ≠ 0 mod p.
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Irreducible factors of a square-free monic polynomial mod p
/// (distinct-degree splitting followed by Cantor-Zassenhaus).
fn factor_modp(f: &FpPoly) -> Vec<FpPoly> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.monic();
    let mut h = FpPoly::x(p);
    let mut d = 0usize;
    while rest.degree().map_or(false, |deg| deg >= 1) {
        d += 1;
        if rest.degree().unwrap() < 2 * d {
            out.push(rest.monic());
            break;
        }
        h = h.pow_mod(&BigUint::from(p), &rest);
        let g = h.sub(&FpPoly::x(p)).gcd(&rest);
        if g.degree().map_or(false, |deg| deg >= 1) {
            equal_degree_split(&g, d, &mut out);
            rest = rest.divrem(&g).0;
            h = h.rem(&rest);
        }
    }
    out.sort_by(|a, b| (a.degree(), &a.c).cmp(&(b.degree(), &b.c)));
    out
}

/// Splits a product of distinct degree-d irreducibles into its factors.
fn equal_degree_split(g: &FpPoly, d: usize, out: &mut Vec<FpPoly>) {
    let deg = g.degree().unwrap();
    if deg == d {
        out.push(g.monic());
        return;
    }
    let p = g.p;
    debug_assert!(p % 2 == 1, "factoring prime is chosen odd");
    let exp = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9 ^ (deg as u64) << 16 ^ d as u64);
    loop {
        let a = FpPoly::new((0..deg).map(|_| rng.gen_range(0..p)).collect(), p);
        if a.degree().map_or(true, |da| da < 1) {
            continue;
        }
        let b = a.pow_mod(&exp, g);
        let cand = b.sub(&FpPoly::one(p)).gcd(g);
        if let Some(dc) = cand.degree() {
            if dc >= 1 && dc < deg {
                equal_degree_split(&cand, d, out);
                equal_degree_split(&g.divrem(&cand).0, d, out);
                return;
            }
        }
    }
}

// ---- Hensel lifting ----

/// Polynomials over ℤ/m viewed as ZPoly with coefficients in [0, m).
fn zmod_mul(a: &ZPoly, b: &ZPoly, m: &BigInt) -> ZPoly {
    if a.is_zero() || b.is_zero() {
        return ZPoly::zero();
    }
    let mut out = vec![BigInt::zero(); a.coeffs().len() + b.coeffs().len() - 1];
    for (i, ca) in a.coeffs().iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.coeffs().iter().enumerate() {
            out[i + j] = (&out[i + j] + ca * cb).mod_floor(m);
        }
    }
    ZPoly::new(out)
}

fn zmod_sub(a: &ZPoly, b: &ZPoly, m: &BigInt) -> ZPoly {
    let n = a.coeffs().len().max(b.coeffs().len());
    ZPoly::new((0..n).map(|i| (a.coeff(i) - b.coeff(i)).mod_floor(m)).collect())
}

fn zmod_add(a: &ZPoly, b: &ZPoly, m: &BigInt) -> ZPoly {
    let n = a.coeffs().len().max(b.coeffs().len());
    ZPoly::new((0..n).map(|i| (a.coeff(i) + b.coeff(i)).mod_floor(m)).collect())
}

fn zmod_reduce(a: &ZPoly, m: &BigInt) -> ZPoly {
    ZPoly::new(a.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

/// Division by a monic polynomial over ℤ/m.
fn zmod_divrem_monic(a: &ZPoly, g: &ZPoly, m: &BigInt) -> (ZPoly, ZPoly) {
    let dg = g.degree().expect("monic divisor");
    debug_assert!(g.lead().is_one());
    let mut rem: Vec<BigInt> = a.coeffs().to_vec();
    if rem.len() <= dg {
        return (ZPoly::zero(), a.clone());
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dg];
    for i in (dg..rem.len()).rev() {
        let c = rem[i].mod_floor(m);
        if c.is_zero() {
            continue;
        }
        quot[i - dg] = c.clone();
        for j in 0..=dg {
            rem[i - dg + j] = (&rem[i - dg + j] - g.coeff(j) * &c).mod_floor(m);
        }
    }
    (ZPoly::new(quot), ZPoly::new(rem))
}

/// One quadratic Hensel step: from f ≡ g·h and s·g + t·h ≡ 1 (mod m) to the
/// same congruences mod m² with g monic.
#[allow(clippy::too_many_arguments)]
fn hensel_step(
    f: &ZPoly,
    g: &ZPoly,
    h: &ZPoly,
    s: &ZPoly,
    t: &ZPoly,
    m: &BigInt,
) -> (ZPoly, ZPoly, ZPoly, ZPoly) {
    let m2 = m * m;
    let e = zmod_sub(f, &zmod_mul(g, h, &m2), &m2);
    // Since s·g + t·h ≡ 1 (mod m) and e ≡ 0 (mod m), multiplying through by
    // e gives e ≡ (e·t)·h + (e·s)·g (mod m²). Reducing e·t modulo the monic
    // g keeps the g-correction below deg g; the quotient moves over to h.
    let (q, r) = zmod_divrem_monic(&zmod_mul(t, &e, &m2), g, &m2);
    let g1 = zmod_add(g, &r, &m2);
    let h1 = zmod_add(h, &zmod_add(&zmod_mul(s, &e, &m2), &zmod_mul(&q, h, &m2), &m2), &m2);
    // Same decomposition refreshes the Bezout pair: b ≡ (b·t)·h1 + (b·s)·g1.
    let b = zmod_sub(
        &zmod_add(&zmod_mul(s, &g1, &m2), &zmod_mul(t, &h1, &m2), &m2),
        &ZPoly::from_ints(&[1]),
        &m2,
    );
    let (c, d) = zmod_divrem_monic(&zmod_mul(t, &b, &m2), &g1, &m2);
    let t1 = zmod_sub(t, &d, &m2);
    let s1 = zmod_sub(
        s,
        &zmod_add(&zmod_mul(s, &b, &m2), &zmod_mul(&c, &h1, &m2), &m2),
        &m2,
    );
    (g1, h1, s1, t1)
}

/// Extended Euclid over F_p[x]: s·a + t·b = 1 for coprime a, b.
fn fp_bezout(a: &FpPoly, b: &FpPoly) -> (FpPoly, FpPoly) {
    let p = a.p;
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (FpPoly::one(p), FpPoly::zero(p));
    let (mut t0, mut t1) = (FpPoly::zero(p), FpPoly::one(p));
    while !r1.is_zero() {
        let (q, r2) = r0.divrem(&r1);
        let s2 = s0.sub(&q.mul(&s1));
        let t2 = t0.sub(&q.mul(&t1));
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    debug_assert_eq!(r0.degree(), Some(0), "inputs must be coprime");
    let inv = inv_mod(r0.lead(), p);
    (s0.scale(inv), t0.scale(inv))
}

/// Lifts the factorization f ≡ lc·∏ irreducibles (mod p) to monic factors
/// modulo `target` (a power p^(2^k)), recursively splitting the factor list.
fn hensel_lift_tree(f: &ZPoly, factors: &[FpPoly], p: u64, target: &BigInt) -> Vec<ZPoly> {
    if factors.len() == 1 {
        // f is (a constant times) the single factor; return its monic version.
        let lc = f.lead().mod_floor(target);
        let inv = mod_inverse_big(&lc, target).expect("lc invertible");
        return vec![ZPoly::new(
            f.coeffs().iter().map(|c| (c * &inv).mod_floor(target)).collect(),
        )];
    }
    let mid = factors.len() / 2;
    let (left, right) = factors.split_at(mid);
    let p_big = BigInt::from(p);
    let mut g0 = FpPoly::one(p);
    for fac in left {
        g0 = g0.mul(fac);
    }
    let mut h0 = FpPoly::one(p);
    for fac in right {
        h0 = h0.mul(fac);
    }
    // Match f's leading coefficient on the h side (g stays monic).
    let lc = f.lead().mod_floor(&p_big).to_u64().unwrap();
    h0 = h0.scale(lc);
    let (s0, t0) = fp_bezout(&g0, &h0);
    let mut g = g0.to_zpoly();
    let mut h = h0.to_zpoly();
    let mut s = s0.to_zpoly();
    let mut t = t0.to_zpoly();
    let mut m = BigInt::from(p);
    while &m < target {
        let m2 = &m * &m;
        let f_red = zmod_reduce(f, &m2);
        let (g1, h1, s1, t1) = hensel_step(&f_red, &g, &h, &s, &t, &m);
        g = g1;
        h = h1;
        s = s1;
        t = t1;
        m = m2;
    }
    let mut out = hensel_lift_tree(&zmod_reduce(&g, target), left, p, target);
    out.extend(hensel_lift_tree(&zmod_reduce(&h, target), right, p, target));
    out
}

fn mod_inverse_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn roots_of_small_polys() {
        // (x − 2)(x + 3)(2x − 1) = 2x³ + 3x² − 11x + ... expand: (x−2)(x+3) = x²+x−6; ×(2x−1): 2x³+2x²−12x −x²−x+6 = 2x³+x²−13x+6
        let f = ZPoly::from_ints(&[6, -13, 1, 2]);
        let roots = rational_roots(&f);
        assert_eq!(roots, vec![q(-3, 1), q(1, 2), q(2, 1)]);
        // No rational roots.
        assert!(rational_roots(&ZPoly::from_ints(&[1, 0, 1])).is_empty());
        assert!(rational_roots(&ZPoly::from_ints(&[-2, 0, 0, 1])).is_empty());
        // Repeated roots reported once.
        let g = ZPoly::from_ints(&[1, 2, 1]); // (x+1)²
        assert_eq!(rational_roots(&g), vec![q(-1, 1)]);
    }

    #[test]
    fn roots_with_large_coefficients() {
        // (x − 10^15)(x + 1): constant term too big for divisor enumeration
        // to be attractive; the p-adic route finds it immediately.
        let big: i64 = 1_000_000_000_000_000;
        let f = ZPoly::new(vec![
            BigInt::from(-big),
            BigInt::from(1 - big),
            BigInt::from(1),
        ]);
        assert_eq!(rational_roots(&f), vec![q(-1, 1), q(big, 1)]);
    }

    #[test]
    fn quadratic_factors_found() {
        // (x² + 1)(x² − x + 3)
        let f = ZPoly::from_ints(&[3, -1, 4, -1, 1]);
        let found = monic_quadratic_factors(&f);
        assert!(found.contains(&(q(0, 1), q(1, 1))));
        assert!(found.contains(&(q(-1, 1), q(3, 1))));
        // The product of the two linear factors of (x−1)(x−4)(x²+x+1) is
        // x² − 5x + 4, built from two lifted linear factors.
        let g = ZPoly::from_ints(&[4, -1, 0, -4, 1]);
        let gf = monic_quadratic_factors(&g);
        assert!(gf.contains(&(q(-5, 1), q(4, 1))));
        assert!(gf.contains(&(q(1, 1), q(1, 1))));
    }

    #[test]
    fn quadratic_factors_with_denominators() {
        // 4x² − 1 has the monic factor... as a quadratic divisor of degree-2:
        // x² − 1/4 (t = 0, n = −1/4).
        let f = ZPoly::from_ints(&[-1, 0, 4]);
        let found = monic_quadratic_factors(&f);
        assert_eq!(found, vec![(q(0, 1), q(-1, 4))]);
        // Primitive part with non-trivial lc: (2x² + x + 3)(x − 5) has the
        // monic quadratic divisor x² + x/2 + 3/2.
        let g = ZPoly::from_ints(&[-15, -2, -9, 2]);
        let gf = monic_quadratic_factors(&g);
        assert!(gf.contains(&(q(1, 2), q(3, 2))));
    }

    #[test]
    fn division_polynomial_shaped_input() {
        // ψ₃ for y² = x³ + 2 is 3x⁴ + 24x = 3x(x³ + 8): roots 0 and −2.
        let f = ZPoly::from_ints(&[0, 24, 0, 0, 3]);
        assert_eq!(rational_roots(&f), vec![q(-2, 1), q(0, 1)]);
        // Its quadratic divisors: x² + 2x (from roots 0, −2) and x² − 2x + 4.
        let found = monic_quadratic_factors(&f);
        assert!(found.contains(&(q(2, 1), q(0, 1))));
        assert!(found.contains(&(q(-2, 1), q(4, 1))));
    }

    #[test]
    fn degree_eight_norm_form() {
        // A degree-8 product like the 3-division norm polynomials met in the
        // torsion search: (x² − x + 5)(x² + 7)(x⁴ + x + 11).
        let a = ZPoly::from_ints(&[5, -1, 1]);
        let b = ZPoly::from_ints(&[7, 0, 1]);
        let c = ZPoly::from_ints(&[11, 1, 0, 0, 1]);
        let prod = mul_z(&mul_z(&a, &b), &c);
        let found = monic_quadratic_factors(&prod);
        assert!(found.contains(&(q(-1, 1), q(5, 1))));
        assert!(found.contains(&(q(0, 1), q(7, 1))));
        assert_eq!(found.len(), 2);
        assert!(rational_roots(&prod).is_empty());
    }

    fn mul_z(a: &ZPoly, b: &ZPoly) -> ZPoly {
        let mut out = vec![BigInt::zero(); a.coeffs().len() + b.coeffs().len() - 1];
        for (i, ca) in a.coeffs().iter().enumerate() {
            for (j, cb) in b.coeffs().iter().enumerate() {
                out[i + j] += ca * cb;
            }
        }
        ZPoly::new(out)
    }
}
