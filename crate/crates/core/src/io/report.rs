//! Persisted sieve reports: JSON documents that make a pipeline run
//! auditable and reproducible.
//!
//! The body is fully deterministic (sorted maps, no wall-clock data) so two
//! runs over identical inputs serialize to identical bytes; timestamps and
//! tool metadata live in a detachable envelope that comparison and digest
//! functions ignore.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

/// Hex SHA-256 of a byte string; the digest used for inputs and payloads.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in out {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

/// Which filter produced a piece of evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterKind {
    Cm,
    Mazur,
    Torsion3,
    Symplectic,
    LocalType,
    Unfeasible,
}

/// One piece of evidence for a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterWitness {
    pub filter: FilterKind,
    pub detail: String,
}

/// Final status of one form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FormVerdict {
    /// CM form: handled by the CM classification, not the sieve.
    Cm,
    /// Ruled out for every prime above the bound.
    Eliminated { beyond: u64 },
    /// Not eliminated outright, but impossible outside the listed classes.
    Conditional { modulus: u64, classes: Vec<u64> },
    /// Nothing conclusive.
    Unresolved,
    /// The form's run failed; the witness records why.
    Failed,
}

/// Report entry for one form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormReport {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit: Option<u32>,
    pub verdict: FormVerdict,
    pub witnesses: Vec<FilterWitness>,
    /// Surviving primes at most the Mazur threshold, decimal strings.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub surviving_primes: Vec<String>,
}

/// All forms of one space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceReport {
    pub level: u64,
    pub forms: Vec<FormReport>,
}

/// What the whole case amounts to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conclusion {
    /// Lower bound on the exponent for the statement to hold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    /// Congruence part: the statement holds for p in these classes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<u64>,
    /// Whether every non-CM form was eliminated or constrained.
    pub complete: bool,
    /// Human-readable statement assembled from the fields above.
    pub statement: String,
}

/// Deterministic body of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportBody {
    pub d: u64,
    pub chi_order: u32,
    pub ell_list: Vec<u64>,
    /// SHA-256 of every input file/payload, keyed by role.
    pub input_digests: BTreeMap<String, String>,
    pub spaces: Vec<SpaceReport>,
    pub conclusion: Conclusion,
}

/// Detachable envelope: everything that may differ between reruns.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tool: Option<String>,
}

/// A full report document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveReport {
    pub meta: ReportMeta,
    pub body: ReportBody,
}

impl SieveReport {
    /// Canonical JSON of the body alone; two runs over the same inputs
    /// produce identical bytes here whatever the envelope says.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report body serializes")
    }

    /// Digest of the canonical body.
    pub fn body_digest(&self) -> String {
        sha256_hex(self.body_json().as_bytes())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: SieveReport =
            serde_json::from_str(text).map_err(|e| Error::SchemaMismatch(format!("report: {e}")))?;
        report.validate()?;
        Ok(report)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Every verdict must cite at least one witness.
    pub fn validate(&self) -> Result<()> {
        for space in &self.body.spaces {
            for form in &space.forms {
                if form.witnesses.is_empty() {
                    return Err(Error::InvariantViolation {
                        context: "SieveReport".into(),
                        msg: format!(
                            "form {} (level {}) has a verdict but no filter witness",
                            form.label, space.level
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SieveReport {
        SieveReport {
            meta: ReportMeta { created: Some("2024-01-01T00:00:00Z".into()), tool: None },
            body: ReportBody {
                d: 7,
                chi_order: 4,
                ell_list: vec![11, 23],
                input_digests: [("newforms/d7".to_string(), sha256_hex(b"x"))].into_iter().collect(),
                spaces: vec![SpaceReport {
                    level: 294,
                    forms: vec![FormReport {
                        label: "294.a".into(),
                        orbit: Some(1),
                        verdict: FormVerdict::Conditional { modulus: 12, classes: vec![5, 7] },
                        witnesses: vec![FilterWitness {
                            filter: FilterKind::Symplectic,
                            detail: "excluded when (3|p) = -1".into(),
                        }],
                        surviving_primes: vec![],
                    }],
                }],
                conclusion: Conclusion {
                    bound: Some(337),
                    modulus: Some(12),
                    classes: vec![5, 7],
                    complete: true,
                    statement: "no non-trivial solutions for p >= 337, p = 5, 7 (mod 12)".into(),
                },
            },
        }
    }

    #[test]
    fn json_roundtrip_is_identity() {
        let report = sample();
        let text = report.to_json();
        let back = SieveReport::from_json(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn body_digest_ignores_the_envelope() {
        let a = sample();
        let mut b = sample();
        b.meta.created = Some("2030-12-31T23:59:59Z".into());
        b.meta.tool = Some("other build".into());
        assert_eq!(a.body_digest(), b.body_digest());
        assert_eq!(a.body_json(), b.body_json());
        let mut c = sample();
        c.body.conclusion.bound = Some(338);
        assert_ne!(a.body_digest(), c.body_digest());
    }

    #[test]
    fn witnessless_verdicts_rejected() {
        let mut report = sample();
        report.body.spaces[0].forms[0].witnesses.clear();
        assert!(report.validate().is_err());
        let text = report.to_json();
        assert!(SieveReport::from_json(&text).is_err());
    }

    #[test]
    fn write_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let report = sample();
        report.write(&path).unwrap();
        assert_eq!(SieveReport::load(&path).unwrap(), report);
    }

    #[test]
    fn sha256_known_answer() {
        // Standard test vector: sha256("abc").
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
