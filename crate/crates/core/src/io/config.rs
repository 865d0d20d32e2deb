//! Per-case TOML configuration: which spaces to sieve for a given d, with
//! the character data and auxiliary primes that go with them.

use crate::arith::{is_prime_u64, is_unramified};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Nebentypus of the newform spaces for one case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nebentypus {
    pub order: u32,
    pub conductor: u64,
}

/// Known discriminant-valuation residue of the solution curve at the primes
/// above one rational prime: v(Δ_min) ≡ residue (mod p) there. Case data,
/// consumed by the symplectic filter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreyValuation {
    pub ell: u64,
    pub residue: i64,
}

/// One value of d: the newform spaces to examine and the sieve parameters
/// to use on them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseConfig {
    pub d: u64,
    /// Levels of the spaces carrying the possible conductors.
    pub levels: Vec<u64>,
    pub nebentypus: Nebentypus,
    /// Order of the descent-twist character; the sieve raises traces to
    /// this power.
    pub chi_order: u32,
    /// Auxiliary primes for the congruence sieve. May be empty for cases
    /// marked unfeasible.
    #[serde(default)]
    pub ell_list: Vec<u64>,
    /// Spaces too large to compute: configuration is recorded but the
    /// pipeline refuses to run.
    #[serde(default)]
    pub unfeasible: bool,
    #[serde(default)]
    pub frey_valuations: Vec<FreyValuation>,
    /// Free-text provenance for conclusions imported from elsewhere.
    #[serde(default)]
    pub known_conclusions: Vec<String>,
}

impl CaseConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Error::HypothesisViolated(msg);
        if self.d == 0 {
            return Err(fail("d must be positive".into()));
        }
        if self.levels.is_empty() {
            return Err(fail(format!("d = {}: no levels configured", self.d)));
        }
        if self.nebentypus.order == 0 || self.nebentypus.conductor == 0 {
            return Err(fail(format!("d = {}: nebentypus order and conductor must be positive", self.d)));
        }
        if self.chi_order == 0 {
            return Err(fail(format!("d = {}: chi_order must be positive", self.d)));
        }
        for &level in &self.levels {
            if level == 0 {
                return Err(fail(format!("d = {}: level 0 is not a level", self.d)));
            }
            if level % self.nebentypus.conductor != 0 {
                return Err(fail(format!(
                    "d = {}: nebentypus conductor {} does not divide the level {}",
                    self.d, self.nebentypus.conductor, level
                )));
            }
        }
        if self.ell_list.is_empty() && !self.unfeasible {
            return Err(fail(format!("d = {}: feasible case needs auxiliary primes", self.d)));
        }
        for &ell in &self.ell_list {
            if !is_prime_u64(ell) {
                return Err(fail(format!("d = {}: auxiliary ell = {ell} is not prime", self.d)));
            }
            if ell <= 3 || self.d % ell == 0 {
                return Err(fail(format!("d = {}: auxiliary ell = {ell} divides 6d", self.d)));
            }
            if !is_unramified(ell, self.d) {
                return Err(fail(format!("d = {}: auxiliary ell = {ell} ramifies", self.d)));
            }
        }
        for fv in &self.frey_valuations {
            if !is_prime_u64(fv.ell) {
                return Err(fail(format!("d = {}: frey valuation at non-prime {}", self.d, fv.ell)));
            }
            if fv.residue == 0 {
                return Err(fail(format!(
                    "d = {}: frey valuation residue at {} must be nonzero mod p",
                    self.d, fv.ell
                )));
            }
        }
        Ok(())
    }

    /// The configured residue of v(Δ_min) at primes over ell, if any.
    pub fn frey_residue(&self, ell: u64) -> Option<i64> {
        self.frey_valuations.iter().find(|fv| fv.ell == ell).map(|fv| fv.residue)
    }
}

/// Loads and validates a case configuration from a TOML file.
pub fn load_case_config(path: impl AsRef<Path>) -> Result<CaseConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let cfg: CaseConfig = toml::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: e.span().map_or(0, |s| text[..s.start].lines().count()),
        msg: e.message().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}
