//! The per-case batch pipeline: CM flag, trace sieve, and the curve-side
//! filters (3-torsion trace test, symplectic conditions, local types),
//! aggregated into a reproducible report.
//!
//! One form failing never aborts the run; its report entry carries the
//! failure and the case conclusion simply loses completeness.

use crate::arith::{split_valuations, splitting_type, QuadElem};
use crate::discard::{
    combine_conditions, local_type_compatible, symplectic_multiplicative, LocalType,
    SymplecticCondition, Torsion3Outcome, ValuationExpr,
};
use crate::ecurve::{has_3_torsion, SearchField, WeierstrassModel};
use crate::ellenberg::{find_bound, BoundParams, TermImpls};
use crate::error::{Error, Result};
use crate::io::config::CaseConfig;
use crate::io::newforms::{NewformPack, NewformRecord};
use crate::io::report::{
    Conclusion, FilterKind, FilterWitness, FormReport, FormVerdict, ReportBody, ReportMeta,
    SieveReport, SpaceReport,
};
use crate::sieve::{sieve_survivors, SieveConfig, Survivors};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Knobs for one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Ideal-norm ceiling of the 3-torsion trace scan.
    pub torsion_norm_limit: u64,
    /// Run the irreducibility bound search and fold it into the conclusion.
    pub compute_bound: bool,
    /// Decimal digits for the bound search.
    pub bound_precision: u32,
    /// Known inertial types of the solution curve at specific primes; the
    /// local-type filter fires only where both sides declare a type.
    pub family_types: BTreeMap<u64, LocalType>,
    /// Digests of the inputs, stamped into the report body.
    pub input_digests: BTreeMap<String, String>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            torsion_norm_limit: 200,
            compute_bound: true,
            bound_precision: 38,
            family_types: BTreeMap::new(),
            input_digests: BTreeMap::new(),
        }
    }
}

/// Symplectic conditions a conditional form contributes to the case-level
/// combination, alongside its report entry.
struct FormOutcome {
    report: FormReport,
    conditions: Vec<SymplecticCondition>,
}

/// Runs the whole case: every configured level, every form at that level.
///
/// Cases marked unfeasible refuse to run; their configuration exists to
/// record scope, not to pretend the spaces are tractable.
pub fn run_pipeline(
    case: &CaseConfig,
    packs: &[NewformPack],
    opts: &PipelineOptions,
) -> Result<SieveReport> {
    case.validate()?;
    if case.unfeasible {
        return Err(Error::HypothesisViolated(format!(
            "case d = {} is marked unfeasible; its spaces are out of computational reach",
            case.d
        )));
    }
    for pack in packs {
        if pack.d != case.d {
            return Err(Error::HypothesisViolated(format!(
                "newform pack for d = {} supplied to the d = {} case",
                pack.d, case.d
            )));
        }
    }

    let mut spaces = Vec::new();
    let mut groups: Vec<Vec<SymplecticCondition>> = Vec::new();
    let mut complete = true;
    let mut mazur_floor = 0u64;

    for &level in &case.levels {
        let records: Vec<&NewformRecord> =
            packs.iter().flat_map(|p| p.at_level(level)).collect();
        if records.is_empty() {
            complete = false;
            spaces.push(SpaceReport { level, forms: Vec::new() });
            continue;
        }
        let outcomes: Vec<FormOutcome> =
            records.par_iter().map(|rec| process_form(case, opts, rec)).collect();
        let mut forms = Vec::new();
        for outcome in outcomes {
            match &outcome.report.verdict {
                FormVerdict::Cm => {}
                FormVerdict::Eliminated { beyond } => mazur_floor = mazur_floor.max(*beyond),
                FormVerdict::Conditional { .. } => groups.push(outcome.conditions),
                FormVerdict::Unresolved | FormVerdict::Failed => complete = false,
            }
            forms.push(outcome.report);
        }
        spaces.push(SpaceReport { level, forms });
    }

    let exclusion = if groups.is_empty() { None } else { Some(combine_conditions(&groups)) };
    if let Some(ex) = &exclusion {
        if ex.excluded_classes.is_empty() {
            // Conditional forms whose conditions exclude nothing leave the
            // case open.
            complete = false;
        }
    }

    let bound = if complete && opts.compute_bound {
        let q = if case.d % 4 == 3 { case.d } else { 4 * case.d };
        let params = BoundParams::new(q, opts.bound_precision, TermImpls::reference())?;
        let report = find_bound(q, &params)?;
        Some(report.first_positive_prime.max(mazur_floor + 1))
    } else {
        None
    };

    let conclusion = build_conclusion(complete, bound, exclusion.as_ref());
    let body = ReportBody {
        d: case.d,
        chi_order: case.chi_order,
        ell_list: case.ell_list.clone(),
        input_digests: opts.input_digests.clone(),
        spaces,
        conclusion,
    };
    let report = SieveReport { meta: ReportMeta::default(), body };
    report.validate()?;
    Ok(report)
}

fn build_conclusion(
    complete: bool,
    bound: Option<u64>,
    exclusion: Option<&crate::discard::ExclusionResult>,
) -> Conclusion {
    let (modulus, classes) = match exclusion {
        Some(ex) if !ex.excluded_classes.is_empty() => {
            (Some(ex.modulus), ex.excluded_classes.iter().copied().collect::<Vec<u64>>())
        }
        _ => (None, Vec::new()),
    };
    let statement = if !complete {
        "incomplete analysis: no unconditional statement".to_string()
    } else {
        let congruence = match (modulus, classes.is_empty()) {
            (Some(m), false) => {
                let list: Vec<String> = classes.iter().map(|c| c.to_string()).collect();
                format!(", p ≡ {} (mod {m})", list.join(", "))
            }
            _ => String::new(),
        };
        match bound {
            Some(b) => format!("no non-trivial solutions for p ≥ {b}{congruence}"),
            None => format!("no non-trivial solutions for p beyond the Mazur floor{congruence}"),
        }
    };
    Conclusion { bound, modulus, classes, complete, statement }
}

/// One form, start to finish. Errors become a Failed verdict; panics are
/// not used for control flow anywhere below.
fn process_form(case: &CaseConfig, opts: &PipelineOptions, rec: &NewformRecord) -> FormOutcome {
    match try_process_form(case, opts, rec) {
        Ok(outcome) => outcome,
        Err(e) => FormOutcome {
            report: FormReport {
                label: rec.form.label.clone(),
                orbit: rec.orbit,
                verdict: FormVerdict::Failed,
                witnesses: vec![FilterWitness { filter: FilterKind::Mazur, detail: e.to_string() }],
                surviving_primes: Vec::new(),
            },
            conditions: Vec::new(),
        },
    }
}

fn try_process_form(
    case: &CaseConfig,
    opts: &PipelineOptions,
    rec: &NewformRecord,
) -> Result<FormOutcome> {
    let label = rec.form.label.clone();
    let mut witnesses = Vec::new();
    let done = |verdict: FormVerdict, witnesses: Vec<FilterWitness>, survivors: Vec<String>| {
        Ok(FormOutcome {
            report: FormReport {
                label: label.clone(),
                orbit: rec.orbit,
                verdict,
                witnesses,
                surviving_primes: survivors,
            },
            conditions: Vec::new(),
        })
    };

    if let Some(cm) = rec.form.cm {
        witnesses.push(FilterWitness {
            filter: FilterKind::Cm,
            detail: format!("CM by discriminant {cm}; handled by the CM classification"),
        });
        return done(FormVerdict::Cm, witnesses, Vec::new());
    }

    // Local-type filter: fires when the record and the options both declare
    // a type at the same prime and the types cannot be congruent mod p.
    for (&ell, &declared) in &rec.local_types {
        if let Some(&family) = opts.family_types.get(&ell) {
            if !local_type_compatible(family, declared, 5) {
                witnesses.push(FilterWitness {
                    filter: FilterKind::LocalType,
                    detail: format!(
                        "inertial type at {ell} is {declared}, the solution curve's is {family}"
                    ),
                });
                return done(FormVerdict::Eliminated { beyond: 3 }, witnesses, Vec::new());
            }
        }
    }

    // Trace sieve at the usable auxiliary primes.
    let ells: Vec<u64> = case
        .ell_list
        .iter()
        .copied()
        .filter(|&ell| rec.form.level % ell != 0 && rec.form.a_map.contains_key(&ell))
        .collect();
    if ells.is_empty() {
        witnesses.push(FilterWitness {
            filter: FilterKind::Mazur,
            detail: "no auxiliary prime is coprime to the level with eigenvalue data".into(),
        });
        return done(FormVerdict::Unresolved, witnesses, Vec::new());
    }
    let cfg = SieveConfig { d: case.d, chi_order: case.chi_order, ell_list: ells.clone(), p_min: 0 };
    let outcome = sieve_survivors(&rec.form, &cfg)?;
    match &outcome.survivors {
        Survivors::Finite(set) => {
            let beyond = set
                .iter()
                .map(|p| p.to_u64().unwrap_or(u64::MAX))
                .max()
                .unwrap_or(0);
            if !outcome.unresolved.is_empty() {
                witnesses.push(FilterWitness {
                    filter: FilterKind::Mazur,
                    detail: format!(
                        "sieve constants resisted factoring at ℓ = {:?}",
                        outcome.unresolved.iter().map(|(l, _)| *l).collect::<Vec<_>>()
                    ),
                });
                return done(FormVerdict::Unresolved, witnesses, Vec::new());
            }
            witnesses.push(FilterWitness {
                filter: FilterKind::Mazur,
                detail: format!("trace congruences at ℓ = {ells:?} eliminate every p > {beyond}"),
            });
            let survivors: Vec<String> = set.iter().map(|p| p.to_string()).collect();
            return done(FormVerdict::Eliminated { beyond }, witnesses, survivors);
        }
        Survivors::All => {
            witnesses.push(FilterWitness {
                filter: FilterKind::Mazur,
                detail: format!("every prime passes the trace sieve at ℓ = {ells:?}"),
            });
        }
    }

    // Sieve-transparent form: curve-side filters.
    let curve = match &rec.curve {
        Some(curve) => curve,
        None => {
            witnesses.push(FilterWitness {
                filter: FilterKind::Mazur,
                detail: "no curve model supplied for the surviving form".into(),
            });
            return done(FormVerdict::Unresolved, witnesses, Vec::new());
        }
    };

    if has_3_torsion(curve, SearchField::QuadraticField).is_none() {
        return torsion3_verdict(opts, curve, rec, witnesses, &label);
    }

    // The curve shares 3-torsion with the solution family: symplectic stage.
    let conditions = symplectic_conditions(case, curve, &mut witnesses)?;
    if conditions.is_empty() {
        witnesses.push(FilterWitness {
            filter: FilterKind::Symplectic,
            detail: "curve has a 3-torsion point and no usable symplectic place".into(),
        });
        return done(FormVerdict::Unresolved, witnesses, Vec::new());
    }
    let exclusion = combine_conditions(std::slice::from_ref(&conditions));
    if exclusion.excluded_classes.is_empty() {
        witnesses.push(FilterWitness {
            filter: FilterKind::Symplectic,
            detail: "symplectic conditions impose no congruence restriction".into(),
        });
        return done(FormVerdict::Unresolved, witnesses, Vec::new());
    }
    let classes: Vec<u64> = exclusion.excluded_classes.iter().copied().collect();
    witnesses.push(FilterWitness {
        filter: FilterKind::Symplectic,
        detail: format!(
            "conditions [{}] exclude p ≡ {:?} (mod {})",
            conditions.iter().map(|c| c.source().to_string()).collect::<Vec<_>>().join("; "),
            classes,
            exclusion.modulus
        ),
    });
    Ok(FormOutcome {
        report: FormReport {
            label,
            orbit: rec.orbit,
            verdict: FormVerdict::Conditional { modulus: exclusion.modulus, classes },
            witnesses,
            surviving_primes: Vec::new(),
        },
        conditions,
    })
}

fn torsion3_verdict(
    opts: &PipelineOptions,
    curve: &WeierstrassModel<QuadElem>,
    rec: &NewformRecord,
    mut witnesses: Vec<FilterWitness>,
    label: &str,
) -> Result<FormOutcome> {
    let outcome = crate::discard::torsion3_test(curve, opts.torsion_norm_limit)?;
    let (verdict, witness) = match outcome {
        Torsion3Outcome::Witness { ideal, a_q, bound } => (
            FormVerdict::Eliminated { beyond: bound.floor() as u64 },
            FilterWitness {
                filter: FilterKind::Torsion3,
                detail: format!(
                    "no 3-torsion; a_q = {a_q} at the ideal of norm {} over {} breaks the \
                     trace congruence, so p ≤ 4√{} ≈ {bound:.2}",
                    ideal.norm, ideal.ell, ideal.norm
                ),
            },
        ),
        Torsion3Outcome::Inconclusive { scanned } => (
            FormVerdict::Unresolved,
            FilterWitness {
                filter: FilterKind::Torsion3,
                detail: format!("no violating ideal among the {scanned} scanned"),
            },
        ),
    };
    witnesses.push(witness);
    Ok(FormOutcome {
        report: FormReport {
            label: label.to_string(),
            orbit: rec.orbit,
            verdict,
            witnesses,
            surviving_primes: Vec::new(),
        },
        conditions: Vec::new(),
    })
}

/// Classical symplectic conditions at the configured places. Only split
/// places with multiplicative reduction of the table curve contribute; the
/// solution curve's valuation residue is case data.
fn symplectic_conditions(
    case: &CaseConfig,
    curve: &WeierstrassModel<QuadElem>,
    witnesses: &mut Vec<FilterWitness>,
) -> Result<Vec<SymplecticCondition>> {
    let inv = curve.invariants();
    let mut conditions = Vec::new();
    for fv in &case.frey_valuations {
        let sp = splitting_type(fv.ell, case.d);
        if !sp.is_split() {
            witnesses.push(FilterWitness {
                filter: FilterKind::Symplectic,
                detail: format!("place over {} is not split; no classical condition", fv.ell),
            });
            continue;
        }
        let disc_vals = split_valuations(&inv.disc, fv.ell)?;
        let c4_vals = split_valuations(&inv.c4, fv.ell)?;
        for (which, v_disc, v_c4) in
            [("first", disc_vals.0, c4_vals.0), ("conjugate", disc_vals.1, c4_vals.1)]
        {
            if v_c4 != 0 {
                // Not multiplicative at this place; the classical theorem
                // does not apply there.
                witnesses.push(FilterWitness {
                    filter: FilterKind::Symplectic,
                    detail: format!(
                        "reduction at the {which} prime over {} is not multiplicative",
                        fv.ell
                    ),
                });
                continue;
            }
            let source = format!("{which} prime over {}", fv.ell);
            let cond = symplectic_multiplicative(
                ValuationExpr::constant(fv.residue),
                ValuationExpr::constant(i64::try_from(v_disc).expect("valuation fits i64")),
                fv.ell,
                source,
            )?;
            conditions.push(cond);
        }
    }
    Ok(conditions)
}
