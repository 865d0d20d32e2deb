//! The Mazur's-trick engine: enumerate local solutions at an auxiliary
//! prime ℓ, compare the reduced Frey curve's traces with a newform's
//! eigenvalues through the base-change rule, and collect the exponents p
//! that survive elimination.
//!
//! For each prime 𝔩 of K above ℓ and each local datum (Ã, B̃), the good
//! case contributes the norm of a_𝔩(f^BC)^{n_χ} − a_𝔩(E_{Ã,B̃})^{n_χ}
//! (raising to the order n_χ of the descent twist removes the unknown
//! twist value), and a bad fibre contributes the norm of
//! ε(ℓ)·a_ℓ(f)² − (ℓ+1)² once. A vanishing factor means the congruence
//! holds identically: every p passes at that ℓ, so zero factors are
//! tracked separately instead of zeroing the product.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::{
    factor, is_unramified, nf_norm, reduce_quad, splitting_type, FqElem, NumberFieldElem,
    PrimeSplitting, QuadElem, ZPoly,
};
use crate::ecurve::{count_points, WeierstrassModel};
use crate::error::{Error, Result};

/// Hecke data of a weight-2 newform with nebentypus, as ingested from a
/// data file. The artifact never computes modular symbols; this is
/// external input.
#[derive(Debug, Clone, PartialEq)]
pub struct NewformData {
    pub label: String,
    pub level: u64,
    /// Order of the nebentypus ε.
    pub char_order: u32,
    /// Monic defining polynomial of the Hecke eigenvalue field; degree 1
    /// (the polynomial x) for rational forms.
    pub field_poly: ZPoly,
    /// Eigenvalues a_ℓ by prime.
    pub a_map: BTreeMap<u64, NumberFieldElem>,
    /// Nebentypus values ε(ℓ) by prime.
    pub eps_map: BTreeMap<u64, NumberFieldElem>,
    /// CM discriminant when the form has complex multiplication.
    pub cm: Option<i64>,
}

impl NewformData {
    pub fn eigenvalue(&self, ell: u64) -> Result<&NumberFieldElem> {
        self.a_map.get(&ell).ok_or_else(|| Error::MissingEigenvalue {
            label: self.label.clone(),
            ell,
        })
    }

    pub fn eps_value(&self, ell: u64) -> Result<&NumberFieldElem> {
        self.eps_map.get(&ell).ok_or_else(|| Error::MissingEigenvalue {
            label: self.label.clone(),
            ell,
        })
    }

    /// Data sanity checks: every ε value is a root of unity of order
    /// dividing `char_order`, and every eigenvalue satisfies the Hecke
    /// bound |σ(a_ℓ)| ≤ 2√ℓ in each complex embedding (tolerance 10⁻⁶).
    pub fn validate(&self) -> Result<()> {
        let violation = |msg: String| Error::InvariantViolation {
            context: format!("newform {}", self.label),
            msg,
        };
        for (ell, eps) in &self.eps_map {
            let power = eps.pow(u64::from(self.char_order));
            if !power.sub_rational(&BigRational::one()).is_zero() {
                return Err(violation(format!(
                    "eps({ell}) is not a root of unity of order dividing {}",
                    self.char_order
                )));
            }
        }
        for (ell, a) in &self.a_map {
            let bound = 2.0 * (*ell as f64).sqrt() + 1e-6;
            for sigma in a.complex_embeddings() {
                if sigma.norm() > bound {
                    return Err(violation(format!(
                        "a_{ell} violates the Hecke bound: |{sigma}| > 2*sqrt({ell})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Configuration of one sieve run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveConfig {
    pub d: u64,
    /// Order n_χ of the descent-twist character.
    pub chi_order: u32,
    pub ell_list: Vec<u64>,
    /// Elimination threshold: the verdict is "eliminated" when every
    /// survivor is at most this bound.
    pub p_min: u64,
}

impl SieveConfig {
    /// Checks that every ℓ is prime, unramified in ℚ(√−d), and coprime
    /// to 6·d and to the form's level.
    pub fn validate_for(&self, f: &NewformData) -> Result<()> {
        let fail = |msg: String| Error::HypothesisViolated(msg);
        if self.ell_list.is_empty() {
            return Err(fail("empty auxiliary prime list".into()));
        }
        for &ell in &self.ell_list {
            if !crate::arith::is_prime_u64(ell) {
                return Err(fail(format!("auxiliary ell = {ell} is not prime")));
            }
            if ell <= 3 || self.d % ell == 0 {
                return Err(fail(format!("ell = {ell} divides 6d")));
            }
            if !is_unramified(ell, self.d) {
                return Err(fail(format!("ell = {ell} ramifies in Q(sqrt(-{}))", self.d)));
            }
            if f.level % ell == 0 {
                return Err(fail(format!("ell = {ell} divides the level {}", f.level)));
            }
        }
        Ok(())
    }
}

/// Eigenvalue of the base change of f at a prime above ℓ: a_ℓ(f) when 𝔩
/// has norm ℓ, and a_ℓ(f)² − 2ℓ·ε(ℓ) when 𝔩 has norm ℓ².
pub fn base_change_coeff(f: &NewformData, p: &PrimeSplitting) -> Result<NumberFieldElem> {
    assert!(!p.is_ramified(), "base change needs an unramified prime");
    let a = f.eigenvalue(p.ell)?;
    if p.is_split() {
        Ok(a.clone())
    } else {
        let eps = f.eps_value(p.ell)?;
        let two_ell = BigRational::from_integer(BigInt::from(2 * p.ell));
        Ok(a.mul(a).sub(&eps.scale(&two_ell)))
    }
}

/// All local data (Ã, B̃, C̃) over the residue field of `p`, excluding
/// (Ã, B̃) = (0, 0), with C̃ = Ã² + d·B̃⁶. The list has N𝔩² − 1 entries.
pub fn enumerate_local_solutions(d: u64, p: &PrimeSplitting) -> Vec<(FqElem, FqElem, FqElem)> {
    assert!(p.ell > 3 && d % p.ell != 0, "need ell coprime to 6d");
    let ctx = p.residue_field();
    let dq = ctx.from_u64(d);
    let mut out = Vec::with_capacity((ctx.q() * ctx.q() - 1) as usize);
    for a in ctx.elements() {
        for b in ctx.elements() {
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let b2 = &b * &b;
            let b6 = &(&b2 * &b2) * &b2;
            let c = &(&a * &a) + &(&dq * &b6);
            out.push((a, b, c));
        }
    }
    out
}

/// The Frey curve of a local datum, with √−d replaced by its image `s`
/// in the residue field.
fn reduced_frey(a: &FqElem, b: &FqElem, s: &FqElem, d: u64) -> WeierstrassModel<FqElem> {
    let ctx = a.ctx();
    let a1 = &(&ctx.from_u64(6) * b) * s;
    let b3 = &(b * b) * b;
    let m4d = &ctx.from_i64(-4) * &ctx.from_u64(d);
    let a3 = &m4d * &(a + &(&b3 * s));
    WeierstrassModel::new(a1, ctx.zero(), a3, ctx.zero(), ctx.zero())
}

/// Per-ℓ sieve outcome: the constant B_ℓ(f) plus the bookkeeping needed
/// for sound survivor extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveLocal {
    pub ell: u64,
    /// ℓ times the product of the distinct nonzero factor norms, or 0
    /// when every factor vanished.
    pub constant: BigInt,
    /// Local data whose factor vanished. Any such datum means the
    /// congruence can hold identically, so every p passes at this ℓ.
    pub zero_factors: usize,
    /// Distinct nonzero factor values entering the product.
    pub distinct_factors: usize,
}

impl SieveLocal {
    /// True when this ℓ constrains nothing.
    pub fn passes_all(&self) -> bool {
        self.zero_factors > 0
    }
}

/// B_ℓ(f): the integer whose prime divisors (beyond factors that vanish
/// identically) are the only p this ℓ cannot eliminate.
pub fn sieve_constant(f: &NewformData, cfg: &SieveConfig, ell: u64) -> Result<BigInt> {
    Ok(sieve_local(f, cfg, ell)?.constant)
}

/// Full per-ℓ computation behind [`sieve_constant`].
pub fn sieve_local(f: &NewformData, cfg: &SieveConfig, ell: u64) -> Result<SieveLocal> {
    assert!(cfg.ell_list.contains(&ell), "ell must come from the configured list");
    let p = splitting_type(ell, cfg.d);
    let a_bc = base_change_coeff(f, &p)?;
    let abc_pow = a_bc.pow(u64::from(cfg.chi_order));

    let mut zero_factors = 0usize;
    let mut factors: BTreeSet<BigInt> = BTreeSet::new();
    let mut bad_fibre_seen = false;

    // For split ℓ both primes above it are sieved; conjugating the ideal
    // amounts to B̃ ↦ −B̃ on the data, so the factor sets agree, but the
    // loop keeps the definition literal.
    let conjugates: &[bool] = if p.is_split() { &[false, true] } else { &[false] };
    for &conj in conjugates {
        let (histogram, saw_bad) = trace_histogram(cfg.d, &p, conj)?;
        bad_fibre_seen |= saw_bad;
        for (trace, count) in histogram {
            let t_pow = BigInt::from(trace).pow(cfg.chi_order);
            let t_elem = NumberFieldElem::from_rational(
                f.field_poly.clone(),
                BigRational::from_integer(t_pow),
            )
            .expect("field polynomial already validated");
            let norm = integral_norm(&abc_pow.sub(&t_elem), &f.label)?;
            if norm.is_zero() {
                zero_factors += count;
            } else {
                factors.insert(norm.abs());
            }
        }
    }

    if bad_fibre_seen {
        // ε(ℓ)·a_ℓ(f)² − (ℓ + 1)², contributed once per ℓ.
        let a = f.eigenvalue(ell)?;
        let eps = f.eps_value(ell)?;
        let square = BigRational::from_integer(BigInt::from((ell + 1) * (ell + 1)));
        let norm = integral_norm(&eps.mul(&a.mul(a)).sub_rational(&square), &f.label)?;
        if norm.is_zero() {
            zero_factors += 1;
        } else {
            factors.insert(norm.abs());
        }
    }

    let constant = if factors.is_empty() {
        BigInt::zero()
    } else {
        factors.iter().fold(BigInt::from(ell), |acc, v| acc * v)
    };
    Ok(SieveLocal {
        ell,
        constant,
        zero_factors,
        distinct_factors: factors.len(),
    })
}

/// Counts, for one prime above ℓ, how many local data realize each Frey
/// trace; the boolean reports whether a bad fibre (C̃ = 0) occurred.
fn trace_histogram(
    d: u64,
    p: &PrimeSplitting,
    conj: bool,
) -> Result<(BTreeMap<i64, usize>, bool)> {
    let s = reduce_quad(&QuadElem::sqrt_minus_d(d), p, conj)?;
    let data = enumerate_local_solutions(d, p);
    let traces: Vec<Option<i64>> = data
        .par_iter()
        .map(|(a, b, c)| {
            if c.is_zero() {
                Ok(None)
            } else {
                count_points(&reduced_frey(a, b, &s, d)).map(Some)
            }
        })
        .collect::<Result<_>>()?;
    let mut histogram = BTreeMap::new();
    let mut saw_bad = false;
    for t in traces {
        match t {
            Some(t) => *histogram.entry(t).or_insert(0) += 1,
            None => saw_bad = true,
        }
    }
    Ok((histogram, saw_bad))
}

fn integral_norm(alpha: &NumberFieldElem, label: &str) -> Result<BigInt> {
    let norm = nf_norm(alpha);
    if !norm.is_integer() {
        return Err(Error::InvariantViolation {
            context: format!("newform {label}"),
            msg: format!("non-integral factor norm {norm}; eigenvalue not an algebraic integer?"),
        });
    }
    Ok(norm.to_integer())
}

/// The primes passing every ℓ in a sieve run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Survivors {
    /// Every prime passes: no ℓ in the list constrains anything.
    All,
    /// The finite set of primes dividing every constraining constant.
    Finite(BTreeSet<BigInt>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SieveVerdict {
    /// Every survivor is at most the configured threshold, so the form
    /// is discarded for all larger p.
    Eliminated,
    /// Some prime above the threshold passes, or the form has CM and is
    /// left to the dedicated arguments.
    Survives,
    /// Every constraining constant resisted factorization; survivors
    /// above the reported residual bound are unknown.
    Unresolved,
}

/// Outcome of a full sieve run on one form.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveOutcome {
    pub label: String,
    pub cm_flagged: bool,
    pub locals: Vec<SieveLocal>,
    pub survivors: Survivors,
    /// (ℓ, stuck cofactor) for constants that did not fully factor.
    pub unresolved: Vec<(u64, BigInt)>,
    pub verdict: SieveVerdict,
}

/// Runs the sieve at every configured ℓ and intersects the per-ℓ
/// survivor sets. A prime survives iff at every ℓ either some factor
/// vanished identically or it divides B_ℓ(f).
pub fn sieve_survivors(f: &NewformData, cfg: &SieveConfig) -> Result<SieveOutcome> {
    cfg.validate_for(f)?;
    let locals: Vec<SieveLocal> = cfg
        .ell_list
        .iter()
        .map(|&ell| sieve_local(f, cfg, ell))
        .collect::<Result<_>>()?;
    let (survivors, unresolved, verdict) = resolve_survivors(&locals, cfg.p_min, f.cm.is_some());
    Ok(SieveOutcome {
        label: f.label.clone(),
        cm_flagged: f.cm.is_some(),
        locals,
        survivors,
        unresolved,
        verdict,
    })
}

/// Survivor intersection. Factors the first constraining constant that
/// yields, then filters its primes by direct divisibility against every
/// other constant, which stays exact even where factorization fails.
fn resolve_survivors(
    locals: &[SieveLocal],
    p_min: u64,
    cm: bool,
) -> (Survivors, Vec<(u64, BigInt)>, SieveVerdict) {
    let constraining: Vec<&SieveLocal> = locals.iter().filter(|loc| !loc.passes_all()).collect();
    if constraining.is_empty() {
        return (Survivors::All, Vec::new(), SieveVerdict::Survives);
    }

    let mut ordered = constraining.clone();
    ordered.sort_by_key(|loc| loc.constant.bits());
    let mut unresolved = Vec::new();
    let mut base: Option<BTreeSet<BigInt>> = None;
    for loc in &ordered {
        match factor(&loc.constant) {
            Ok(fac) => {
                base = Some(fac.into_iter().map(|(p, _)| p).collect());
                break;
            }
            Err(Error::FactorizationIncomplete { residual, partial, .. }) => {
                // The known prime factors alone do not bound the survivor
                // set, so this ℓ cannot serve as the base.
                let _ = partial;
                unresolved.push((loc.ell, residual));
            }
            Err(_) => unreachable!("factor only fails with FactorizationIncomplete"),
        }
    }

    let Some(base_primes) = base else {
        return (
            Survivors::Finite(BTreeSet::new()),
            unresolved,
            SieveVerdict::Unresolved,
        );
    };

    let survivors: BTreeSet<BigInt> = base_primes
        .into_iter()
        .filter(|p| {
            constraining
                .iter()
                .all(|loc| (&loc.constant % p).is_zero())
        })
        .collect();
    let verdict = if cm {
        SieveVerdict::Survives
    } else if survivors.iter().all(|p| *p <= BigInt::from(p_min)) {
        SieveVerdict::Eliminated
    } else {
        SieveVerdict::Survives
    };
    (Survivors::Finite(survivors), unresolved, verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::FqCtx;

    fn rational_field() -> ZPoly {
        ZPoly::from_ints(&[0, 1])
    }

    fn rat_elem(phi: &ZPoly, n: i64) -> NumberFieldElem {
        NumberFieldElem::from_integer(phi.clone(), n).unwrap()
    }

    /// A rational form (φ = x) with trivial nebentypus at the given primes.
    fn rational_form(label: &str, level: u64, a_values: &[(u64, i64)]) -> NewformData {
        let phi = rational_field();
        let mut a_map = BTreeMap::new();
        let mut eps_map = BTreeMap::new();
        for &(ell, a) in a_values {
            a_map.insert(ell, rat_elem(&phi, a));
            eps_map.insert(ell, rat_elem(&phi, 1));
        }
        NewformData {
            label: label.into(),
            level,
            char_order: 1,
            field_poly: phi,
            a_map,
            eps_map,
            cm: None,
        }
    }

    #[test]
    fn base_change_split_passthrough() {
        let f = rational_form("t.split", 11, &[(5, 3)]);
        let p = splitting_type(5, 1);
        assert!(p.is_split());
        let bc = base_change_coeff(&f, &p).unwrap();
        assert_eq!(bc.as_rational(), Some(BigRational::from_integer(3.into())));
    }

    #[test]
    fn base_change_inert_formula() {
        // a₅ = 0, ε(5) = 1 over an inert prime: 0² − 2·5·1 = −10.
        let f = rational_form("t.inert", 11, &[(5, 0)]);
        let p = splitting_type(5, 2);
        assert!(!p.is_split() && !p.is_ramified());
        let bc = base_change_coeff(&f, &p).unwrap();
        assert_eq!(bc.as_rational(), Some(BigRational::from_integer((-10).into())));
    }

    #[test]
    fn base_change_inert_in_quadratic_field() {
        // a₇ = √3 in ℚ[x]/(x² − 3), ε(7) = −1: (√3)² − 14·(−1) = 17.
        let phi = ZPoly::from_ints(&[-3, 0, 1]);
        let sqrt3 = NumberFieldElem::new(
            phi.clone(),
            vec![BigRational::zero(), BigRational::one()],
        )
        .unwrap();
        let mut a_map = BTreeMap::new();
        let mut eps_map = BTreeMap::new();
        a_map.insert(7, sqrt3);
        eps_map.insert(7, NumberFieldElem::from_integer(phi.clone(), -1).unwrap());
        let f = NewformData {
            label: "t.quad".into(),
            level: 20,
            char_order: 2,
            field_poly: phi,
            a_map,
            eps_map,
            cm: None,
        };
        let p = splitting_type(7, 1);
        assert!(!p.is_split() && !p.is_ramified());
        let bc = base_change_coeff(&f, &p).unwrap();
        assert_eq!(bc.as_rational(), Some(BigRational::from_integer(17.into())));
    }

    #[test]
    fn base_change_missing_data() {
        let f = rational_form("t.empty", 11, &[]);
        let p = splitting_type(5, 1);
        assert!(matches!(
            base_change_coeff(&f, &p).unwrap_err(),
            Error::MissingEigenvalue { ell: 5, .. }
        ));
    }

    #[test]
    fn newform_validation() {
        let f = rational_form("t.ok", 11, &[(5, 3), (7, -4)]);
        f.validate().unwrap();

        // ε(5) = 2 is not a root of unity.
        let mut bad = rational_form("t.bad_eps", 11, &[(5, 3)]);
        bad.eps_map.insert(5, rat_elem(&rational_field(), 2));
        assert!(matches!(
            bad.validate().unwrap_err(),
            Error::InvariantViolation { .. }
        ));

        // a₅ = 100 violates the Hecke bound 2√5.
        let bad = rational_form("t.bad_a", 11, &[(5, 100)]);
        assert!(matches!(
            bad.validate().unwrap_err(),
            Error::InvariantViolation { .. }
        ));

        // i has order 4 in ℚ[x]/(x² + 1): passes with char_order 4.
        let phi = ZPoly::from_ints(&[1, 0, 1]);
        let i_elem =
            NumberFieldElem::new(phi.clone(), vec![BigRational::zero(), BigRational::one()])
                .unwrap();
        let mut eps_map = BTreeMap::new();
        eps_map.insert(5, i_elem.clone());
        let mut f = NewformData {
            label: "t.quartic".into(),
            level: 50,
            char_order: 4,
            field_poly: phi,
            a_map: BTreeMap::new(),
            eps_map,
            cm: None,
        };
        f.validate().unwrap();
        f.char_order = 2;
        assert!(f.validate().is_err());
    }

    #[test]
    fn enumeration_size_and_bad_fibres() {
        // d = 1, ℓ = 5 split: N𝔩 = 5, so 24 triples.
        let p = splitting_type(5, 1);
        let sols = enumerate_local_solutions(1, &p);
        assert_eq!(sols.len(), 24);

        // Ã = 0, B̃ ≠ 0 forces C̃ = d·B̃⁶ ≠ 0.
        for (a, b, c) in &sols {
            if a.is_zero() && !b.is_zero() {
                assert!(!c.is_zero());
            }
        }

        // Bad-fibre count agrees with direct enumeration of Ã² = −dB̃⁶.
        for (d, ell) in [(1u64, 5u64), (2, 7), (19, 5), (3, 11)] {
            let p = splitting_type(ell, d);
            if p.is_ramified() {
                continue;
            }
            let sols = enumerate_local_solutions(d, &p);
            let q = p.residue_field().q();
            assert_eq!(sols.len() as u64, q * q - 1);
            let bad = sols.iter().filter(|(_, _, c)| c.is_zero()).count();
            let ctx = p.residue_field();
            let md = ctx.from_i64(-(d as i64));
            let mut direct = 0usize;
            for a in ctx.elements() {
                for b in ctx.elements() {
                    if a.is_zero() && b.is_zero() {
                        continue;
                    }
                    let b2 = &b * &b;
                    let b6 = &(&b2 * &b2) * &b2;
                    if &a * &a == &md * &b6 {
                        direct += 1;
                    }
                }
            }
            assert_eq!(bad, direct, "d = {d}, ell = {ell}");
        }
    }

    /// Independent brute-force Kraus constant for a rational form with
    /// trivial character and n_χ = 1, written against the bare modular
    /// arithmetic rather than the library types.
    fn brute_force_constant(d: u64, ell: u64, a_f: i64) -> BigInt {
        let q = ell as i64;
        let md = |v: i64| v.rem_euclid(q);
        // Square roots of −d mod ℓ by scanning.
        let target = md(-(d as i64));
        let roots: Vec<i64> = (0..q).filter(|u| md(u * u) == target).collect();
        assert_eq!(roots.len(), 2, "test expects a split prime");
        let mut factors: BTreeSet<BigInt> = BTreeSet::new();
        let mut saw_bad = false;
        for &u in &roots {
            for at in 0..q {
                for bt in 0..q {
                    if at == 0 && bt == 0 {
                        continue;
                    }
                    let c = md(at * at + (d as i64) * bt.pow(6));
                    if c == 0 {
                        saw_bad = true;
                        continue;
                    }
                    // y² + a1·xy + a3·y = x³ with a1 = 6B̃u, a3 = −4d(Ã + B̃³u).
                    let a1 = md(6 * bt * u);
                    let a3 = md(-4 * (d as i64) * (at + bt.pow(3) * u));
                    let mut n_points = 1i64;
                    for x in 0..q {
                        for y in 0..q {
                            if md(y * y + a1 * x * y + a3 * y - x * x * x) == 0 {
                                n_points += 1;
                            }
                        }
                    }
                    let trace = q + 1 - n_points;
                    let f = a_f - trace;
                    if f != 0 {
                        factors.insert(BigInt::from(f.abs()));
                    }
                }
            }
        }
        if saw_bad {
            let bad = a_f * a_f - (q + 1) * (q + 1);
            if bad != 0 {
                factors.insert(BigInt::from(bad.abs()));
            }
        }
        if factors.is_empty() {
            BigInt::zero()
        } else {
            factors.iter().fold(BigInt::from(ell), |acc, v| acc * v)
        }
    }

    #[test]
    fn kraus_constant_matches_brute_force() {
        // d = 19, ℓ = 5 (split: −19 ≡ 1 mod 5), rational form, n_χ = 1.
        let cfg = SieveConfig { d: 19, chi_order: 1, ell_list: vec![5], p_min: 2 };
        for a_f in [-3i64, -1, 0, 1, 2, 4] {
            let f = rational_form("t.kraus", 11, &[(5, a_f)]);
            let got = sieve_constant(&f, &cfg, 5).unwrap();
            let expected = brute_force_constant(19, 5, a_f);
            assert_eq!(got, expected, "a_f = {a_f}");
        }
    }

    #[test]
    fn split_conjugate_symmetry() {
        // Swapping the conjugate ideal permutes the data (B̃ ↦ −B̃) and
        // leaves the trace histogram unchanged.
        for (d, ell) in [(19u64, 5u64), (7, 11), (1, 13)] {
            let p = splitting_type(ell, d);
            assert!(p.is_split());
            let (h0, bad0) = trace_histogram(d, &p, false).unwrap();
            let (h1, bad1) = trace_histogram(d, &p, true).unwrap();
            assert_eq!(h0, h1, "d = {d}, ell = {ell}");
            assert_eq!(bad0, bad1);
        }
    }

    /// Form data manufactured from the reductions of a fixed Frey curve at
    /// split primes, optionally shifted to fake a mismatch.
    fn planted_form(a0: i64, b0: i64, d: u64, ells: &[u64], shift: i64) -> NewformData {
        let phi = rational_field();
        let mut a_map = BTreeMap::new();
        let mut eps_map = BTreeMap::new();
        for &ell in ells {
            let p = splitting_type(ell, d);
            assert!(p.is_split(), "planted fixture uses split primes");
            let s = reduce_quad(&QuadElem::sqrt_minus_d(d), &p, false).unwrap();
            let ctx = p.residue_field();
            let model = reduced_frey(&ctx.from_i64(a0), &ctx.from_i64(b0), &s, d);
            let trace = count_points(&model).unwrap();
            a_map.insert(ell, rat_elem(&phi, trace + shift));
            eps_map.insert(ell, rat_elem(&phi, 1));
        }
        NewformData {
            label: "t.planted".into(),
            level: 2,
            char_order: 1,
            field_poly: phi,
            a_map,
            eps_map,
            cm: None,
        }
    }

    #[test]
    fn planted_congruence_is_never_eliminated() {
        // The curve of 181² + 7·1⁶ = 2¹⁵ reduced at split primes of
        // ℚ(√−7). Its own trace data must produce a vanishing factor at
        // every ℓ, so no prime is ever eliminated.
        let ells = vec![11u64, 23, 29];
        let f = planted_form(181, 1, 7, &ells, 0);
        let cfg = SieveConfig { d: 7, chi_order: 1, ell_list: ells, p_min: 2 };
        let outcome = sieve_survivors(&f, &cfg).unwrap();
        for loc in &outcome.locals {
            assert!(loc.zero_factors > 0, "ell = {}", loc.ell);
        }
        assert_eq!(outcome.survivors, Survivors::All);
        assert_eq!(outcome.verdict, SieveVerdict::Survives);
    }

    #[test]
    fn mismatched_fixture_survivors_are_exact() {
        // Shifting every planted eigenvalue by 1 breaks the congruences;
        // survivors must then be exactly the primes dividing every B_ℓ.
        let ells = vec![11u64, 23];
        let f = planted_form(181, 1, 7, &ells, 1);
        let cfg = SieveConfig { d: 7, chi_order: 1, ell_list: ells.clone(), p_min: 2 };
        let outcome = sieve_survivors(&f, &cfg).unwrap();
        let Survivors::Finite(survivors) = &outcome.survivors else {
            panic!("shifted data cannot pass everywhere");
        };
        // Cross-check by factoring each constant independently.
        let mut expected: Option<BTreeSet<BigInt>> = None;
        for loc in &outcome.locals {
            assert!(!loc.passes_all(), "shift must kill every zero factor");
            let primes: BTreeSet<BigInt> =
                factor(&loc.constant).unwrap().into_iter().map(|(p, _)| p).collect();
            expected = Some(match expected {
                None => primes,
                Some(acc) => acc.intersection(&primes).cloned().collect(),
            });
        }
        assert_eq!(survivors, &expected.unwrap());
        assert!(outcome.unresolved.is_empty());
    }

    #[test]
    fn survivor_set_arithmetic() {
        // Planted constants: B₅ = 30 = 2·3·5, B₇ = 21 = 3·7 → {3}.
        let locals = vec![
            SieveLocal { ell: 5, constant: BigInt::from(30), zero_factors: 0, distinct_factors: 2 },
            SieveLocal { ell: 7, constant: BigInt::from(21), zero_factors: 0, distinct_factors: 2 },
        ];
        let (survivors, unresolved, verdict) = resolve_survivors(&locals, 2, false);
        assert_eq!(
            survivors,
            Survivors::Finite([BigInt::from(3)].into_iter().collect())
        );
        assert!(unresolved.is_empty());
        // 3 > p_min = 2, so the form survives.
        assert_eq!(verdict, SieveVerdict::Survives);

        // Raising the threshold to 3 eliminates it.
        let (_, _, verdict) = resolve_survivors(&locals, 3, false);
        assert_eq!(verdict, SieveVerdict::Eliminated);

        // A passing ℓ (zero factor present) constrains nothing.
        let locals = vec![
            SieveLocal { ell: 5, constant: BigInt::from(30), zero_factors: 3, distinct_factors: 2 },
            SieveLocal { ell: 7, constant: BigInt::zero(), zero_factors: 24, distinct_factors: 0 },
        ];
        let (survivors, _, verdict) = resolve_survivors(&locals, 2, false);
        assert_eq!(survivors, Survivors::All);
        assert_eq!(verdict, SieveVerdict::Survives);
    }

    #[test]
    fn cm_forms_are_never_claimed_eliminated() {
        let locals = vec![SieveLocal {
            ell: 5,
            constant: BigInt::from(10),
            zero_factors: 0,
            distinct_factors: 1,
        }];
        let (survivors, _, verdict) = resolve_survivors(&locals, 5, true);
        assert_eq!(
            survivors,
            Survivors::Finite([BigInt::from(2), BigInt::from(5)].into_iter().collect())
        );
        assert_eq!(verdict, SieveVerdict::Survives);
    }

    #[test]
    fn config_validation() {
        let f = rational_form("t.val", 26, &[(5, 1)]);
        let ok = SieveConfig { d: 19, chi_order: 1, ell_list: vec![5], p_min: 2 };
        ok.validate_for(&f).unwrap();

        // ℓ = 19 ramifies in ℚ(√−19).
        let bad = SieveConfig { d: 19, chi_order: 1, ell_list: vec![19], p_min: 2 };
        assert!(matches!(bad.validate_for(&f).unwrap_err(), Error::HypothesisViolated(_)));

        // ℓ = 13 divides the level 26.
        let bad = SieveConfig { d: 19, chi_order: 1, ell_list: vec![13], p_min: 2 };
        assert!(bad.validate_for(&f).is_err());

        // ℓ = 3 divides 6.
        let bad = SieveConfig { d: 19, chi_order: 1, ell_list: vec![3], p_min: 2 };
        assert!(bad.validate_for(&f).is_err());

        // ℓ = 25 is not prime.
        let bad = SieveConfig { d: 19, chi_order: 1, ell_list: vec![25], p_min: 2 };
        assert!(bad.validate_for(&f).is_err());
    }

    #[test]
    fn determinism_across_runs() {
        let cfg = SieveConfig { d: 19, chi_order: 1, ell_list: vec![5, 7], p_min: 2 };
        let f = rational_form("t.det", 11, &[(5, 2), (7, -1)]);
        let first = sieve_survivors(&f, &cfg).unwrap();
        let second = sieve_survivors(&f, &cfg).unwrap();
        assert_eq!(first.locals, second.locals);
        assert_eq!(first.survivors, second.survivors);
    }

    #[test]
    fn chi_power_trick_squares_the_congruence() {
        // With n_χ = 2 the factor compares squares: a datum whose trace
        // is −a_f must produce a vanishing factor.
        let d = 19u64;
        let ell = 5u64;
        let p = splitting_type(ell, d);
        let (histogram, _) = trace_histogram(d, &p, false).unwrap();
        let some_trace = *histogram.keys().find(|t| **t != 0).unwrap();
        let f = rational_form("t.chi", 11, &[(ell, -some_trace)]);
        let cfg = SieveConfig { d, chi_order: 2, ell_list: vec![ell], p_min: 2 };
        let local = sieve_local(&f, &cfg, ell).unwrap();
        assert!(local.zero_factors > 0);

        // With n_χ = 1 a factor vanishes only when −some_trace itself
        // occurs among the traces.
        let cfg1 = SieveConfig { d, chi_order: 1, ell_list: vec![ell], p_min: 2 };
        let local1 = sieve_local(&f, &cfg1, ell).unwrap();
        assert_eq!(local1.zero_factors > 0, histogram.contains_key(&-some_trace));
    }

    #[test]
    fn inert_prime_full_run() {
        // ℓ = 11 is inert in ℚ(√−5): the sieve works over 𝔽₁₂₁ and the
        // base change uses a₁₁² − 22·ε(11).
        let cfg = SieveConfig { d: 5, chi_order: 4, ell_list: vec![11], p_min: 2 };
        let f = rational_form("t.inert11", 7, &[(11, 2)]);
        let p = splitting_type(11, 5);
        assert!(!p.is_split() && !p.is_ramified());
        let local = sieve_local(&f, &cfg, 11).unwrap();
        // 𝔽₁₂₁ carries 121² − 1 data; every factor norm is an integer and
        // the constant is nonnegative by construction.
        assert!(local.constant >= BigInt::zero());
        assert!(local.distinct_factors > 0 || local.zero_factors > 0);
        assert_eq!(local.ell, 11);
        let ctx = FqCtx::quadratic(11);
        assert_eq!(ctx.q(), 121);
    }
}
