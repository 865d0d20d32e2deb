//! Elliptic-curve tables: CSV on disk and JSON payloads from the curve
//! database service.
//!
//! The a-invariants are the source of truth. Stored c4/c6/Δ columns are
//! cross-checked against recomputation (and against 1728Δ = c4³ − c6²), so
//! a table edited by hand cannot smuggle in inconsistent invariants.

use crate::error::{Error, Result};
use crate::frey::{CurveRecord, CurveTable};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

/// A curve table plus its recorded origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedCurveTable {
    pub table: CurveTable,
    pub source: String,
}

const CSV_HEADER: &str = "label,conductor,a1,a2,a3,a4,a6,c4,c6,disc";

/// Reads a curve table from a CSV file.
pub fn load_curve_table(path: impl AsRef<Path>) -> Result<LoadedCurveTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_curve_table(&text, &path.display().to_string())
}

/// Parses the CSV format. Leading comment lines declare metadata:
/// `# coverage: 36 72 ...` lists the completely enumerated conductors and
/// `# source: ...` names the origin.
pub fn parse_curve_table(text: &str, origin: &str) -> Result<LoadedCurveTable> {
    let perr = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
    let mut coverage: BTreeSet<u64> = BTreeSet::new();
    let mut source = String::new();
    let mut records: Vec<CurveRecord> = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(list) = comment.strip_prefix("coverage:") {
                for word in list.split_whitespace() {
                    let n: u64 = word
                        .parse()
                        .map_err(|_| perr(line_no, format!("bad coverage conductor {word:?}")))?;
                    coverage.insert(n);
                }
            } else if let Some(tag) = comment.strip_prefix("source:") {
                source = tag.trim().to_string();
            }
            continue;
        }
        if !seen_header {
            if line != CSV_HEADER {
                return Err(perr(line_no, format!("expected header {CSV_HEADER:?}, got {line:?}")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 10 {
            return Err(perr(line_no, format!("expected 10 columns, got {}", fields.len())));
        }
        let label = fields[0].to_string();
        let conductor: u64 = fields[1]
            .parse()
            .map_err(|_| perr(line_no, format!("bad conductor {:?}", fields[1])))?;
        let mut ints = fields[2..].iter().map(|w| {
            BigInt::from_str(w).map_err(|_| perr(line_no, format!("bad integer {w:?}")))
        });
        let mut next = || ints.next().unwrap();
        let ainvs = [next()?, next()?, next()?, next()?, next()?];
        let (c4, c6, disc) = (next()?, next()?, next()?);
        let record = CurveRecord { label, conductor, ainvs };
        check_invariants(&record, &c4, &c6, &disc)
            .map_err(|msg| Error::SchemaMismatch(format!("{origin}:{line_no}: {msg}")))?;
        records.push(record);
    }
    if !seen_header {
        return Err(perr(1, "missing curve table header".into()));
    }
    Ok(LoadedCurveTable { table: CurveTable { records, coverage }, source })
}

/// The stored invariant columns must match recomputation from the
/// a-invariants, and satisfy the Weierstrass relation.
fn check_invariants(
    record: &CurveRecord,
    c4: &BigInt,
    c6: &BigInt,
    disc: &BigInt,
) -> std::result::Result<(), String> {
    let inv = record.model().invariants();
    let claim = |name: &str, stored: &BigInt, computed: &num_rational::BigRational| {
        let stored_r = num_rational::BigRational::from_integer(stored.clone());
        if &stored_r == computed {
            Ok(())
        } else {
            Err(format!("curve {}: stored {name} = {stored} but a-invariants give {computed}", record.label))
        }
    };
    claim("c4", c4, &inv.c4)?;
    claim("c6", c6, &inv.c6)?;
    claim("disc", disc, &inv.disc)?;
    let lhs = BigInt::from(1728) * disc;
    let rhs = c4.pow(3) - c6.pow(2);
    if lhs != rhs {
        return Err(format!("curve {}: 1728Δ = c4³ − c6² fails", record.label));
    }
    if disc.is_zero() {
        return Err(format!("curve {}: singular (Δ = 0)", record.label));
    }
    Ok(())
}

/// Serializes a table in the format `parse_curve_table` reads back.
pub fn write_curve_table(loaded: &LoadedCurveTable) -> String {
    let mut out = String::new();
    if !loaded.source.is_empty() {
        let _ = writeln!(out, "# source: {}", loaded.source);
    }
    if !loaded.table.coverage.is_empty() {
        let list: Vec<String> = loaded.table.coverage.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "# coverage: {}", list.join(" "));
    }
    let _ = writeln!(out, "{CSV_HEADER}");
    for rec in &loaded.table.records {
        let inv = rec.model().invariants();
        let [a1, a2, a3, a4, a6] = &rec.ainvs;
        let _ = writeln!(
            out,
            "{},{},{a1},{a2},{a3},{a4},{a6},{},{},{}",
            rec.label,
            rec.conductor,
            inv.c4.to_integer(),
            inv.c6.to_integer(),
            inv.disc.to_integer(),
        );
    }
    out
}

/// Restricts a table to conductors inside [min, max]; coverage shrinks the
/// same way so completeness claims stay truthful.
pub fn filter_conductors(table: &CurveTable, min: u64, max: u64) -> CurveTable {
    CurveTable {
        records: table
            .records
            .iter()
            .filter(|r| (min..=max).contains(&r.conductor))
            .cloned()
            .collect(),
        coverage: table.coverage.iter().copied().filter(|c| (min..=max).contains(c)).collect(),
    }
}

/// Wire format of the curve-database service: one JSON document listing
/// curves and the conductor set the response completely enumerates.
#[derive(Debug, Serialize, Deserialize)]
pub struct CurvePayload {
    pub coverage: Vec<u64>,
    pub curves: Vec<CurvePayloadRow>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CurvePayloadRow {
    pub label: String,
    pub conductor: u64,
    /// [a1, a2, a3, a4, a6] as decimal strings.
    pub ainvs: [String; 5],
}

/// Decodes a service payload into a table, with the same invariant checks
/// as the CSV path.
pub fn parse_curve_payload(bytes: &[u8], origin: &str) -> Result<CurveTable> {
    let payload: CurvePayload = serde_json::from_slice(bytes)
        .map_err(|e| Error::SchemaMismatch(format!("{origin}: {e}")))?;
    let mut records = Vec::new();
    for row in payload.curves {
        let mut ainvs: Vec<BigInt> = Vec::with_capacity(5);
        for text in &row.ainvs {
            let n = BigInt::from_str(text).map_err(|_| {
                Error::SchemaMismatch(format!("{origin}: curve {}: bad integer {text:?}", row.label))
            })?;
            ainvs.push(n);
        }
        let record = CurveRecord {
            label: row.label,
            conductor: row.conductor,
            ainvs: ainvs.try_into().expect("length checked"),
        };
        let inv = record.model().invariants();
        if inv.disc.is_zero() {
            return Err(Error::SchemaMismatch(format!(
                "{origin}: curve {} is singular",
                record.label
            )));
        }
        records.push(record);
    }
    Ok(CurveTable { records, coverage: payload.coverage.into_iter().collect() })
}

/// Encodes a table as a service payload (used by tests and the fixture
/// generator to fabricate wire responses).
pub fn encode_curve_payload(table: &CurveTable) -> Vec<u8> {
    let payload = CurvePayload {
        coverage: table.coverage.iter().copied().collect(),
        curves: table
            .records
            .iter()
            .map(|r| CurvePayloadRow {
                label: r.label.clone(),
                conductor: r.conductor,
                ainvs: [
                    r.ainvs[0].to_string(),
                    r.ainvs[1].to_string(),
                    r.ainvs[2].to_string(),
                    r.ainvs[3].to_string(),
                    r.ainvs[4].to_string(),
                ],
            })
            .collect(),
    };
    serde_json::to_vec_pretty(&payload).expect("payload serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_1152() -> String {
        // y² = x³ + 6x + 20: c4 = −288, c6 = −17280, Δ = −186624.
        "\
# source: unit fixture
# coverage: 1152 3456
label,conductor,a1,a2,a3,a4,a6,c4,c6,disc
1152.r2,1152,0,0,0,6,20,-288,-17280,-186624
"
        .to_string()
    }

    #[test]
    fn csv_roundtrip_and_invariants() {
        let loaded = parse_curve_table(&table_1152(), "inline").unwrap();
        assert_eq!(loaded.source, "unit fixture");
        assert_eq!(loaded.table.records.len(), 1);
        let rec = &loaded.table.records[0];
        assert_eq!(rec.label, "1152.r2");
        let inv = rec.model().invariants();
        assert_eq!(inv.c4.to_integer(), BigInt::from(-288));
        let written = write_curve_table(&loaded);
        let back = parse_curve_table(&written, "rewritten").unwrap();
        assert_eq!(back, loaded);
        assert_eq!(write_curve_table(&back), written);
    }

    #[test]
    fn corrupted_invariants_rejected() {
        // c4 tampered with: recomputation disagrees.
        let bad = table_1152().replace("-288", "-289");
        match parse_curve_table(&bad, "inline") {
            Err(Error::SchemaMismatch(msg)) => assert!(msg.contains("c4"), "msg: {msg}"),
            other => panic!("expected SchemaMismatch, got {other:?}"),
        }
        // All three derived columns tampered consistently with each other
        // still fail against the a-invariants.
        let bad2 = table_1152()
            .replace("-288", "-576")
            .replace("-17280", "-138240")
            .replace("-186624", "-1492992");
        assert!(parse_curve_table(&bad2, "inline").is_err());
    }

    #[test]
    fn conductor_filter_subsets() {
        let loaded = parse_curve_table(&table_1152(), "inline").unwrap();
        let sub = filter_conductors(&loaded.table, 1000, 2000);
        assert_eq!(sub.records.len(), 1);
        assert_eq!(sub.coverage, [1152].into_iter().collect());
        let none = filter_conductors(&loaded.table, 1, 100);
        assert!(none.records.is_empty());
        assert!(none.coverage.is_empty());
    }

    #[test]
    fn json_payload_roundtrip() {
        let loaded = parse_curve_table(&table_1152(), "inline").unwrap();
        let bytes = encode_curve_payload(&loaded.table);
        let back = parse_curve_payload(&bytes, "wire").unwrap();
        assert_eq!(back, loaded.table);
        assert!(parse_curve_payload(b"{\"nope\":1}", "wire").is_err());
    }

    #[test]
    fn missing_header_rejected() {
        assert!(parse_curve_table("1152.r2,1152,0,0,0,6,20,-288,-17280,-186624\n", "inline").is_err());
    }
}
