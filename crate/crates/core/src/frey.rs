//! Frey curve constructions attached to candidate solutions.
//!
//! A putative solution (A, B, C) of A² + d·B⁶ = Cⁿ gets two curves: a
//! ℚ-curve over K = ℚ(√−d) whose discriminant isolates A + B³√−d, and a
//! rational companion Y² = X³ + 3dB²X + 2dA. This module holds the
//! constructors, a solution verifier, the CM classifier, the Granville
//! family of non-primitive solutions, and the conductor bookkeeping that
//! drives the curve-table search in the case z = 2ᵃ3ᵇ.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{factor, QuadElem};
use crate::ecurve::WeierstrassModel;
use crate::error::{Error, Result};

/// A verified instance of A² + d·B⁶ = Cⁿ with its classification flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: u64,
    pub n: u32,
    /// gcd(A, B, C) = 1.
    pub primitive: bool,
    /// A·B·C ≠ 0.
    pub nontrivial: bool,
}

/// Checks A² + d·B⁶ = Cⁿ and records primitivity and non-triviality.
///
/// `d` must be square-free and positive, `n` at least 2.
pub fn verify_solution(a: &BigInt, b: &BigInt, c: &BigInt, d: u64, n: u32) -> Result<Solution> {
    assert!(d >= 1 && is_squarefree(d), "d must be a square-free positive integer");
    assert!(n >= 2, "the exponent must be at least 2");
    let lhs = a * a + BigInt::from(d) * b.pow(6);
    if lhs != c.pow(n) {
        return Err(Error::NotASolution {
            a: a.clone(),
            b: b.clone(),
            c: c.clone(),
            d,
            n,
        });
    }
    let g = a.gcd(b).gcd(c);
    Ok(Solution {
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
        d,
        n,
        primitive: g.is_one(),
        nontrivial: !a.is_zero() && !b.is_zero() && !c.is_zero(),
    })
}

/// The ℚ-curve attached to (A, B): y² + 6B√−d·xy − 4d(A + B³√−d)y = x³.
///
/// Its discriminant is −2⁸3³d⁴·(A² + dB⁶)·(A + B³√−d)². Requires
/// (A, B) ≠ (0, 0), which would make the model singular.
pub fn frey_curve(a: &BigInt, b: &BigInt, d: u64) -> WeierstrassModel<QuadElem> {
    assert!(!(a.is_zero() && b.is_zero()), "(A, B) = (0, 0) gives a singular model");
    let a1 = QuadElem::from_bigints(BigInt::zero(), BigInt::from(6) * b, d);
    let m4d = BigInt::from(-4) * BigInt::from(d);
    let a3 = QuadElem::from_bigints(&m4d * a, &m4d * b.pow(3), d);
    WeierstrassModel::new(a1, QuadElem::zero(d), a3, QuadElem::zero(d), QuadElem::zero(d))
}

/// The rational companion curve Y² = X³ + 3dB²X + 2dA.
///
/// Its invariants are c4 = −2⁴3²dB², c6 = −2⁶3³dA and
/// Δ = −1728·d²·(A² + dB⁶).
pub fn multifrey_curve(a: &BigInt, b: &BigInt, d: u64) -> WeierstrassModel<BigRational> {
    let d_big = BigInt::from(d);
    let a4 = BigRational::from_integer(BigInt::from(3) * &d_big * b * b);
    let a6 = BigRational::from_integer(BigInt::from(2) * &d_big * a);
    WeierstrassModel::short(a4, a6)
}

/// Coefficient of √−d in j of the ℚ-curve, as an exact rational:
/// 864·A·B³·(2A² − 25dB⁶)(16A² − 11dB⁶) / (A² + dB⁶)³.
pub fn j_imaginary_coefficient(a: &BigInt, b: &BigInt, d: u64) -> BigRational {
    assert!(!(a.is_zero() && b.is_zero()), "(A, B) = (0, 0) has no j-invariant");
    let d_big = BigInt::from(d);
    let b6 = b.pow(6);
    let f1 = BigInt::from(2) * a * a - BigInt::from(25) * &d_big * &b6;
    let f2 = BigInt::from(16) * a * a - BigInt::from(11) * &d_big * &b6;
    let num = BigInt::from(864) * a * b.pow(3) * f1 * f2;
    let den = (a * a + &d_big * &b6).pow(3);
    BigRational::new(num, den)
}

/// CM classification of the ℚ-curve, read off the √−d part of j.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmClass {
    /// A = 0 or B = 0: the curve of a trivial or degenerate solution,
    /// rational with CM.
    TrivialCm,
    /// (d, |A|, |B|) = (2, 5, 1), the lone sporadic CM solution
    /// 5² + 2·1⁶ = 3³.
    SpecialD2Cm,
    /// j has a nonzero √−d part, so the curve has no CM.
    NoCm,
}

/// Classifies CM by evaluating the vanishing locus of the √−d part of j.
///
/// `(a, b)` must be a coprime pair (a primitive solution guarantees this);
/// under that hypothesis the factors 2A² − 25dB⁶ and 16A² − 11dB⁶ vanish
/// only at the sporadic d = 2 point.
pub fn cm_check(a: &BigInt, b: &BigInt, d: u64) -> CmClass {
    if a.is_zero() || b.is_zero() {
        return CmClass::TrivialCm;
    }
    let d_big = BigInt::from(d);
    let b6 = b.pow(6);
    let f1 = BigInt::from(2) * a * a - BigInt::from(25) * &d_big * &b6;
    let f2 = BigInt::from(16) * a * a - BigInt::from(11) * &d_big * &b6;
    if f1.is_zero() || f2.is_zero() {
        assert!(
            d == 2 && a.abs() == BigInt::from(5) && b.abs().is_one(),
            "a CM factor vanished away from (d, |A|, |B|) = (2, 5, 1); (A, B) not coprime?"
        );
        CmClass::SpecialD2Cm
    } else {
        CmClass::NoCm
    }
}

/// A member of the Granville family of non-primitive solutions.
///
/// With r = u² + d·v⁶ and a prime p > 3, scaling (u, v) by powers of r
/// lands on the surface with exponent p: (u·r^{(p−1)/2}, v·r^{(p−1)/6}, r)
/// when p ≡ 1 (mod 6) and (u·r^{(5p−1)/2}, v·r^{(5p−1)/6}, r⁵) when
/// p ≡ 5 (mod 6). r divides every entry, so the output is never primitive.
pub fn granville_family(u: &BigInt, v: &BigInt, d: u64, p: u64) -> Result<Solution> {
    assert!(p > 3 && crate::arith::is_prime_u64(p), "the family needs a prime exponent p > 3");
    let r = u * u + BigInt::from(d) * v.pow(6);
    if r.abs() <= BigInt::one() {
        return Err(Error::DegenerateRadical { r });
    }
    let (ea, eb, c) = if p % 6 == 1 {
        ((p - 1) / 2, (p - 1) / 6, r.clone())
    } else {
        ((5 * p - 1) / 2, (5 * p - 1) / 6, r.pow(5))
    };
    let a = u * r.pow(u32::try_from(ea).expect("exponent fits u32"));
    let b = v * r.pow(u32::try_from(eb).expect("exponent fits u32"));
    verify_solution(&a, &b, &c, d, u32::try_from(p).expect("p fits u32"))
}

/// Admissible conductor valuations of the rational companion curve when
/// C = 2ᵃ3ᵇ, for a 6-th-power-free d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConductorProfile {
    /// Possible values of v₂(N).
    pub v2_options: BTreeSet<u32>,
    /// Possible values of v₃(N).
    pub v3_options: BTreeSet<u32>,
    /// Primes ℓ > 3 dividing d; reduction there is additive and each
    /// contributes ℓ² to the conductor.
    pub additive_primes: BTreeSet<u64>,
    /// Minimality notes for the primes 2 and 3 (the model is minimal at
    /// every prime ℓ ≥ 3, and at 2 except in the flagged cases).
    pub minimality: Vec<(u64, String)>,
}

impl ConductorProfile {
    /// Every conductor 2^α·3^β·∏ℓ² consistent with the profile.
    pub fn admissible_conductors(&self) -> BTreeSet<u64> {
        let tail: u64 = self.additive_primes.iter().map(|l| l * l).product();
        let mut out = BTreeSet::new();
        for &v2 in &self.v2_options {
            for &v3 in &self.v3_options {
                out.insert(2u64.pow(v2) * 3u64.pow(v3) * tail);
            }
        }
        out
    }
}

/// Conductor valuation sets for the companion curve of a solution of
/// x² + d·y⁶ = (2ᵃ3ᵇ)ᵖ, transcribed case by case from the local
/// classification of the model at 2 and 3.
///
/// `v2d` and `v3d` name the case (they must equal v₂(d) and v₃(d));
/// inputs outside the classified list return `UnhandledCase`.
pub fn conductor_profile(d: u64, a: u32, b: u32, v2d: u32, v3d: u32) -> Result<ConductorProfile> {
    let unhandled = || Error::UnhandledCase { d, v2: v2d, v3: v3d };
    if d == 0 || !is_sixth_power_free(d) {
        return Err(unhandled());
    }
    let (actual_v2, rest) = split_valuation(d, 2);
    let (actual_v3, rest) = split_valuation(rest, 3);
    if actual_v2 != v2d || actual_v3 != v3d {
        return Err(unhandled());
    }

    let mut minimality = Vec::new();
    let v2_options: BTreeSet<u32> = match v2d {
        0 => {
            // Minimal model: v₂(N) ∈ {2,…,6}. Once a ≥ 1 the discriminant
            // −2^{6+ap}3^{3+bp}d² can absorb 2¹², giving a non-minimal
            // model whose reduction (c4, c6) ↦ (c4/2⁴, c6/2⁶) has
            // v₂(N) ∈ {0, 1}.
            if a >= 1 {
                minimality.push((2, "non-minimal once ap >= 6; rescaled model has v2(N) in {0,1}".into()));
                [0, 1, 2, 3, 4, 5, 6].into_iter().collect()
            } else {
                minimality.push((2, "minimal".into()));
                [2, 3, 4, 5, 6].into_iter().collect()
            }
        }
        1 => {
            minimality.push((2, "minimal".into()));
            [2, 3, 4, 7].into_iter().collect()
        }
        2 => {
            minimality.push((2, "minimal".into()));
            [6].into_iter().collect()
        }
        3 => {
            // Either minimal with v₂(N) ∈ {4, 5}, or (when 2 | B)
            // non-minimal with the rescaled model having 2 ∤ N.
            minimality.push((2, "non-minimal when 2 | B; rescaled model has 2 coprime to N".into()));
            [0, 4, 5].into_iter().collect()
        }
        4 => {
            minimality.push((2, "minimal".into()));
            [6].into_iter().collect()
        }
        5 => {
            minimality.push((2, "never minimal; rescaled model has v2(N) in {2,3,4}".into()));
            [2, 3, 4].into_iter().collect()
        }
        _ => return Err(unhandled()),
    };

    let v3_options: BTreeSet<u32> = match v3d {
        0 => {
            minimality.push((3, "minimal".into()));
            // v₃(N) = 3 needs b = 0 or (b, p) = (1, 2); only b ≥ 2
            // rules it out without knowing p.
            if b >= 2 {
                [2].into_iter().collect()
            } else {
                [2, 3].into_iter().collect()
            }
        }
        1 | 2 | 4 | 5 => {
            minimality.push((3, "minimal".into()));
            [5].into_iter().collect()
        }
        3 => {
            minimality.push((3, "minimal".into()));
            [2, 3].into_iter().collect()
        }
        _ => return Err(unhandled()),
    };

    let additive_primes: BTreeSet<u64> = factor(&BigInt::from(rest))
        .expect("trial division factors a u64")
        .into_iter()
        .map(|(p, _)| u64::try_from(p).expect("factor of a u64 fits u64"))
        .collect();

    Ok(ConductorProfile {
        v2_options,
        v3_options,
        additive_primes,
        minimality,
    })
}

/// Congruence shortcut for x² + d·y⁶ = (2ᵃ3ᵇ)ᵖ: when d ≢ 7 (mod 8) and
/// d ≢ 2 (mod 3), neither 2 nor 3 splits in ℚ(√−d), no prime above them
/// can divide C, and the equation has no solution with C > 1. Values of
/// d that fail the test still need the curve-table search.
pub fn multiplicative_prime_impossible(d: u64) -> bool {
    d % 8 != 7 && d % 3 != 2
}

/// One row of an ingested elliptic-curve table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveRecord {
    pub label: String,
    pub conductor: u64,
    /// [a1, a2, a3, a4, a6].
    pub ainvs: [BigInt; 5],
}

impl CurveRecord {
    /// The curve as a model over ℚ.
    pub fn model(&self) -> WeierstrassModel<BigRational> {
        let [a1, a2, a3, a4, a6] = &self.ainvs;
        WeierstrassModel::new(
            BigRational::from_integer(a1.clone()),
            BigRational::from_integer(a2.clone()),
            BigRational::from_integer(a3.clone()),
            BigRational::from_integer(a4.clone()),
            BigRational::from_integer(a6.clone()),
        )
    }
}

/// A curve table together with the set of conductors it claims to
/// enumerate completely.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CurveTable {
    pub records: Vec<CurveRecord>,
    pub coverage: BTreeSet<u64>,
}

/// A table curve whose invariants recover a candidate solution of
/// x² + d·y⁶ = 2ˢ3ᵗ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultifreyHit {
    pub label: String,
    /// Recovered solution, canonicalized to x > 0, y > 0.
    pub x: BigInt,
    pub y: BigInt,
    /// Primes dividing every nonzero exponent of m = x² + d·y⁶ = 2ˢ3ᵗ.
    pub admissible_p: BTreeSet<u64>,
}

/// Searches a curve table for companion curves of primitive solutions of
/// x² + d·y⁶ = (2ᵃ3ᵇ)ᵖ.
///
/// Filters by admissible conductor, then matches invariants against
/// c4 = −2⁴3²d·y², c6 = −2⁶3³d·x, and (where a non-minimal model is
/// possible) against the rescaled pattern c4 = −3²d·y², c6 = −3³d·x.
/// An empty result is the "impossible" verdict: no curve supports a
/// solution with z inside {2, 3}.
///
/// The table must cover every admissible conductor; a gap is an
/// `IncompleteTable` error, since silence would otherwise be read as a
/// proof of non-existence.
pub fn multifrey_search(d: u64, curves: &CurveTable) -> Result<Vec<MultifreyHit>> {
    let (v2d, rest) = split_valuation(d, 2);
    let (v3d, _) = split_valuation(rest, 3);

    let mut admissible: BTreeSet<u64> = BTreeSet::new();
    for a_flag in 0..=1 {
        for b_flag in 0..=2 {
            admissible.extend(conductor_profile(d, a_flag, b_flag, v2d, v3d)?.admissible_conductors());
        }
    }
    if let Some(&missing) = admissible.iter().find(|n| !curves.coverage.contains(n)) {
        return Err(Error::IncompleteTable { missing });
    }

    // The rescaled pattern only arises where the classification allows a
    // non-minimal model at 2.
    let rescaled_possible = v2d == 0 || v2d == 3 || v2d == 5;

    use rayon::prelude::*;
    let mut hits: Vec<MultifreyHit> = curves
        .records
        .par_iter()
        .filter(|rec| admissible.contains(&rec.conductor))
        .filter_map(|rec| match_record(rec, d, v2d, rescaled_possible))
        .collect();
    hits.sort_by(|lhs, rhs| lhs.label.cmp(&rhs.label));
    Ok(hits)
}

/// The Table-1 style bound: the largest admissible p over all hits, or
/// `None` when no prime is admissible at all (the "impossible" dash).
pub fn multifrey_bound(hits: &[MultifreyHit]) -> Option<u64> {
    hits.iter().flat_map(|h| h.admissible_p.iter().copied()).max()
}

fn match_record(rec: &CurveRecord, d: u64, v2d: u32, rescaled_possible: bool) -> Option<MultifreyHit> {
    let inv = rec.model().invariants();
    let c4 = rational_to_integer(&inv.c4);
    let c6 = rational_to_integer(&inv.c6);

    // Exact pattern first. Its candidate, if integral, shadows the
    // rescaled pattern's candidate for the same curve (scaled by 2⁶ and
    // 2²), so there is no double counting.
    if let Some(hit) = recover(rec, d, &c4, &c6, 4, 6, 0, false) {
        return Some(hit);
    }
    if rescaled_possible {
        // A non-minimal curve over an odd d forces ap ≥ 6, so the
        // recovered m = 2^{ap}3^{bp} must have v₂ ≥ 6. At v₂(d) = 3
        // non-minimality happens only with 2 | B.
        let min_s = if v2d == 0 { 6 } else { 0 };
        let need_even_y = v2d == 3;
        if let Some(hit) = recover(rec, d, &c4, &c6, 0, 0, min_s, need_even_y) {
            return Some(hit);
        }
    }
    None
}

/// Tries to express (c4, c6) = (−2^{e4}·3²·d·y², −2^{e6}·3³·d·x) with
/// x, y > 0 integers, gcd(x, y) = 1 and x² + d·y⁶ = 2ˢ3ᵗ > 1.
fn recover(
    rec: &CurveRecord,
    d: u64,
    c4: &BigInt,
    c6: &BigInt,
    e4: u32,
    e6: u32,
    min_s: u32,
    need_even_y: bool,
) -> Option<MultifreyHit> {
    // c4 < 0 rejects y = 0 (a trivial solution); c6 < 0 fixes the x > 0
    // representative of the x ↦ −x symmetry.
    if !c4.is_negative() || !c6.is_negative() {
        return None;
    }
    let div4 = BigInt::from(2).pow(e4) * BigInt::from(9) * BigInt::from(d);
    let div6 = BigInt::from(2).pow(e6) * BigInt::from(27) * BigInt::from(d);
    let (y2, r4) = (-c4).div_rem(&div4);
    let (x, r6) = (-c6).div_rem(&div6);
    if !r4.is_zero() || !r6.is_zero() || x.is_zero() {
        return None;
    }
    let y = y2.sqrt();
    if &y * &y != y2 {
        return None;
    }
    if need_even_y && y.is_odd() {
        return None;
    }
    // A common factor of x and y divides m = C^p, hence C; such a
    // solution is never primitive.
    if !x.gcd(&y).is_one() {
        return None;
    }
    let m = &x * &x + BigInt::from(d) * y.pow(6);
    let (s, m) = strip_factor(m, 2);
    let (t, m) = strip_factor(m, 3);
    if !m.is_one() || (s == 0 && t == 0) || s < min_s {
        return None;
    }
    let mut admissible_p = BTreeSet::new();
    for exp in [s, t] {
        if exp == 0 {
            continue;
        }
        if admissible_p.is_empty() {
            admissible_p = prime_divisors(exp as u64);
        } else {
            admissible_p.retain(|p| exp as u64 % p == 0);
        }
    }
    Some(MultifreyHit {
        label: rec.label.clone(),
        x,
        y,
        admissible_p,
    })
}

fn rational_to_integer(r: &BigRational) -> BigInt {
    assert!(r.is_integer(), "c-invariants of an integral model are integers");
    r.to_integer()
}

fn strip_factor(mut n: BigInt, q: u32) -> (u32, BigInt) {
    let q_big = BigInt::from(q);
    let mut e = 0;
    while !n.is_zero() {
        let (quo, rem) = n.div_rem(&q_big);
        if !rem.is_zero() {
            break;
        }
        n = quo;
        e += 1;
    }
    (e, n)
}

fn prime_divisors(mut n: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            out.insert(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.insert(n);
    }
    out
}

fn split_valuation(n: u64, q: u64) -> (u32, u64) {
    let mut n = n;
    let mut e = 0;
    while n % q == 0 {
        n /= q;
        e += 1;
    }
    (e, n)
}

fn is_squarefree(d: u64) -> bool {
    factor(&BigInt::from(d))
        .map(|fac| fac.iter().all(|(_, e)| *e == 1))
        .unwrap_or(false)
}

fn is_sixth_power_free(d: u64) -> bool {
    factor(&BigInt::from(d))
        .map(|fac| fac.iter().all(|(_, e)| *e < 6))
        .unwrap_or(false)
}
