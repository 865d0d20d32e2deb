//! Newform eigenvalue packs: a line-oriented text format carrying, per form,
//! the defining polynomial of the eigenvalue field and exact rational
//! coordinate vectors for a_ℓ and ε(ℓ) keyed by prime.
//!
//! One file holds the forms one case feeds to the sieve. Records may embed
//! an elliptic-curve model over ℚ(√−d) (for forms known to correspond to a
//! curve), declared local inertial types, and the level of a known twist;
//! the pipeline's later filters consume those.

use crate::arith::{NumberFieldElem, QuadElem, ZPoly};
use crate::discard::LocalType;
use crate::ecurve::WeierstrassModel;
use crate::error::{Error, Result};
use crate::sieve::NewformData;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

/// One form in a pack: the sieve data plus optional curve-side extras.
#[derive(Debug, Clone, PartialEq)]
pub struct NewformRecord {
    pub form: NewformData,
    /// Position of the Galois orbit in the source ordering, 1-based.
    pub orbit: Option<u32>,
    /// Elliptic curve over ℚ(√−d) attached to the form, when known.
    pub curve: Option<WeierstrassModel<QuadElem>>,
    /// Level of a form this one is a quadratic twist of, when known.
    pub twist_level: Option<u64>,
    /// Declared inertial types at specific primes.
    pub local_types: BTreeMap<u64, LocalType>,
}

/// All forms bundled for one case, with ordering provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct NewformPack {
    pub d: u64,
    /// Where the orbit numbering comes from (free text).
    pub ordering: Option<String>,
    pub records: Vec<NewformRecord>,
}

impl NewformPack {
    /// Records belonging to one space.
    pub fn at_level(&self, level: u64) -> Vec<&NewformRecord> {
        self.records.iter().filter(|r| r.form.level == level).collect()
    }
}

/// Reads and validates a pack from disk.
pub fn load_newforms(path: impl AsRef<Path>) -> Result<NewformPack> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_newforms(&text, &path.display().to_string())
}

struct LineError {
    line: usize,
    msg: String,
}

fn fail(line: usize, msg: impl Into<String>) -> LineError {
    LineError { line, msg: msg.into() }
}

/// Parses the pack format; `origin` names the source in diagnostics.
pub fn parse_newforms(text: &str, origin: &str) -> Result<NewformPack> {
    parse_inner(text).map_err(|e| Error::Parse { path: origin.to_string(), line: e.line, msg: e.msg })
}

struct RecordBuilder {
    label: String,
    start_line: usize,
    level: Option<u64>,
    char_order: Option<u32>,
    field: Option<ZPoly>,
    cm: Option<i64>,
    orbit: Option<u32>,
    twist_level: Option<u64>,
    curve: Option<Vec<(BigRational, BigRational)>>,
    locals: BTreeMap<u64, LocalType>,
    a_rows: BTreeMap<u64, Vec<BigRational>>,
    eps_rows: BTreeMap<u64, Vec<BigRational>>,
}

impl RecordBuilder {
    fn new(label: String, start_line: usize) -> Self {
        RecordBuilder {
            label,
            start_line,
            level: None,
            char_order: None,
            field: None,
            cm: None,
            orbit: None,
            twist_level: None,
            curve: None,
            locals: BTreeMap::new(),
            a_rows: BTreeMap::new(),
            eps_rows: BTreeMap::new(),
        }
    }

    fn finish(self, d: u64) -> std::result::Result<NewformRecord, LineError> {
        let at = self.start_line;
        let level = self.level.ok_or_else(|| fail(at, format!("form {}: missing level", self.label)))?;
        let char_order =
            self.char_order.ok_or_else(|| fail(at, format!("form {}: missing char_order", self.label)))?;
        let field = self.field.ok_or_else(|| fail(at, format!("form {}: missing field", self.label)))?;
        let degree = field.degree().unwrap_or(0);
        let build_map = |rows: BTreeMap<u64, Vec<BigRational>>,
                         what: &str|
         -> std::result::Result<BTreeMap<u64, NumberFieldElem>, LineError> {
            let mut out = BTreeMap::new();
            for (ell, coords) in rows {
                if coords.len() != degree {
                    return Err(fail(
                        at,
                        format!(
                            "form {}: {what} {ell} has {} coordinates, field degree is {degree}",
                            self.label,
                            coords.len()
                        ),
                    ));
                }
                let elem = NumberFieldElem::new(field.clone(), coords)
                    .map_err(|e| fail(at, format!("form {}: {what} {ell}: {e}", self.label)))?;
                out.insert(ell, elem);
            }
            Ok(out)
        };
        let a_map = build_map(self.a_rows, "a")?;
        let mut eps_map = build_map(self.eps_rows, "eps")?;
        if char_order == 1 && eps_map.is_empty() {
            // Trivial nebentypus: synthesize ε ≡ 1 at the listed primes.
            for &ell in a_map.keys() {
                let one = NumberFieldElem::one(field.clone())
                    .map_err(|e| fail(at, format!("form {}: {e}", self.label)))?;
                eps_map.insert(ell, one);
            }
        }
        for &ell in a_map.keys() {
            if !eps_map.contains_key(&ell) {
                return Err(fail(at, format!("form {}: a {ell} has no matching eps value", self.label)));
            }
        }
        let curve = match self.curve {
            None => None,
            Some(pairs) => {
                let mut ai = pairs.into_iter().map(|(x, y)| QuadElem::new(x, y, d));
                let model = WeierstrassModel::new(
                    ai.next().unwrap(),
                    ai.next().unwrap(),
                    ai.next().unwrap(),
                    ai.next().unwrap(),
                    ai.next().unwrap(),
                );
                if model.is_singular() {
                    return Err(fail(at, format!("form {}: embedded curve is singular", self.label)));
                }
                Some(model)
            }
        };
        let form = NewformData {
            label: self.label.clone(),
            level,
            char_order,
            field_poly: field,
            a_map,
            eps_map,
            cm: self.cm,
        };
        form.validate().map_err(|e| fail(at, format!("form {}: {e}", self.label)))?;
        Ok(NewformRecord {
            form,
            orbit: self.orbit,
            curve,
            twist_level: self.twist_level,
            local_types: self.locals,
        })
    }
}

fn parse_inner(text: &str) -> std::result::Result<NewformPack, LineError> {
    let mut d: Option<u64> = None;
    let mut ordering: Option<String> = None;
    let mut version: Option<u32> = None;
    let mut records: Vec<NewformRecord> = Vec::new();
    let mut current: Option<RecordBuilder> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let inner = rest
                .strip_suffix(']')
                .ok_or_else(|| fail(line_no, "unterminated section header"))?
                .trim();
            let label = inner
                .strip_prefix("form")
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .ok_or_else(|| fail(line_no, format!("expected [form <label>], got [{inner}]")))?;
            if let Some(builder) = current.take() {
                let dd = d.ok_or_else(|| fail(line_no, "d must be declared before the first form"))?;
                records.push(builder.finish(dd)?);
            }
            if records.iter().any(|r| r.form.label == label) {
                return Err(fail(line_no, format!("duplicate form label {label}")));
            }
            current = Some(RecordBuilder::new(label.to_string(), line_no));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| fail(line_no, format!("expected key = value, got {line:?}")))?;
        if value.is_empty() {
            return Err(fail(line_no, format!("empty value for {key}")));
        }
        match &mut current {
            None => match key {
                "version" => version = Some(parse_num(value, line_no, "version")?),
                "d" => d = Some(parse_num(value, line_no, "d")?),
                "ordering" => ordering = Some(value.to_string()),
                _ => return Err(fail(line_no, format!("unknown header key {key}"))),
            },
            Some(builder) => {
                let mut keyed = key.split_whitespace();
                let head = keyed.next().unwrap_or_default();
                let arg = keyed.next();
                if keyed.next().is_some() {
                    return Err(fail(line_no, format!("too many words in key {key:?}")));
                }
                match (head, arg) {
                    ("level", None) => builder.level = Some(parse_num(value, line_no, "level")?),
                    ("char_order", None) => {
                        builder.char_order = Some(parse_num(value, line_no, "char_order")?)
                    }
                    ("orbit", None) => builder.orbit = Some(parse_num(value, line_no, "orbit")?),
                    ("twist_level", None) => {
                        builder.twist_level = Some(parse_num(value, line_no, "twist_level")?)
                    }
                    ("cm", None) => builder.cm = Some(parse_num(value, line_no, "cm")?),
                    ("field", None) => {
                        let coeffs: Vec<BigInt> = value
                            .split_whitespace()
                            .map(|w| parse_num::<BigInt>(w, line_no, "field coefficient"))
                            .collect::<std::result::Result<_, _>>()?;
                        let poly = ZPoly::new(coeffs);
                        if poly.degree().unwrap_or(0) == 0 {
                            return Err(fail(line_no, "field polynomial must have degree >= 1"));
                        }
                        if !poly.is_monic() {
                            return Err(fail(line_no, "field polynomial must be monic"));
                        }
                        builder.field = Some(poly);
                    }
                    ("curve", None) => {
                        let pairs = parse_pairs(value, line_no)?;
                        if pairs.len() != 5 {
                            return Err(fail(
                                line_no,
                                format!("curve needs 5 coefficient pairs, got {}", pairs.len()),
                            ));
                        }
                        builder.curve = Some(pairs);
                    }
                    ("local", Some(p)) => {
                        let ell = parse_num(p, line_no, "local prime")?;
                        let t = LocalType::parse(value).map_err(|e| fail(line_no, e.to_string()))?;
                        if builder.locals.insert(ell, t).is_some() {
                            return Err(fail(line_no, format!("duplicate local type at {ell}")));
                        }
                    }
                    ("a", Some(p)) | ("eps", Some(p)) => {
                        let ell = parse_num(p, line_no, "prime")?;
                        let coords: Vec<BigRational> = value
                            .split_whitespace()
                            .map(|w| parse_num::<BigRational>(w, line_no, "coordinate"))
                            .collect::<std::result::Result<_, _>>()?;
                        let rows = if head == "a" { &mut builder.a_rows } else { &mut builder.eps_rows };
                        if rows.insert(ell, coords).is_some() {
                            return Err(fail(line_no, format!("duplicate {head} row at {ell}")));
                        }
                    }
                    _ => return Err(fail(line_no, format!("unknown record key {key:?}"))),
                }
            }
        }
    }
    if let Some(builder) = current.take() {
        let dd = d.ok_or_else(|| fail(builder.start_line, "d must be declared before the first form"))?;
        records.push(builder.finish(dd)?);
    }
    if version != Some(1) {
        return Err(fail(1, "missing or unsupported version (expected version = 1)"));
    }
    let d = d.ok_or_else(|| fail(1, "missing d"))?;
    Ok(NewformPack { d, ordering, records })
}

fn parse_num<T: FromStr>(text: &str, line: usize, what: &str) -> std::result::Result<T, LineError> {
    text.parse::<T>().map_err(|_| fail(line, format!("bad {what}: {text:?}")))
}

/// Parses "(x, y) (x, y) ..." with rational entries.
fn parse_pairs(text: &str, line: usize) -> std::result::Result<Vec<(BigRational, BigRational)>, LineError> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| fail(line, format!("expected '(' in coefficient list at {rest:?}")))?;
        let (inner, tail) =
            body.split_once(')').ok_or_else(|| fail(line, "unterminated coefficient pair"))?;
        let (x, y) = inner
            .split_once(',')
            .ok_or_else(|| fail(line, format!("coefficient pair {inner:?} needs a comma")))?;
        out.push((
            parse_num::<BigRational>(x.trim(), line, "coefficient")?,
            parse_num::<BigRational>(y.trim(), line, "coefficient")?,
        ));
        rest = tail.trim_start();
    }
    Ok(out)
}

/// Serializes a pack in the canonical layout `parse_newforms` reads back.
pub fn write_newforms(pack: &NewformPack) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "version = 1");
    let _ = writeln!(out, "d = {}", pack.d);
    if let Some(ordering) = &pack.ordering {
        let _ = writeln!(out, "ordering = {ordering}");
    }
    for rec in &pack.records {
        let _ = writeln!(out);
        let _ = writeln!(out, "[form {}]", rec.form.label);
        let _ = writeln!(out, "level = {}", rec.form.level);
        let _ = writeln!(out, "char_order = {}", rec.form.char_order);
        let coeffs: Vec<String> = rec.form.field_poly.coeffs().iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "field = {}", coeffs.join(" "));
        if let Some(orbit) = rec.orbit {
            let _ = writeln!(out, "orbit = {orbit}");
        }
        if let Some(cm) = rec.form.cm {
            let _ = writeln!(out, "cm = {cm}");
        }
        if let Some(twist) = rec.twist_level {
            let _ = writeln!(out, "twist_level = {twist}");
        }
        if let Some(curve) = &rec.curve {
            let pairs: Vec<String> = [&curve.a1, &curve.a2, &curve.a3, &curve.a4, &curve.a6]
                .iter()
                .map(|c| format!("({}, {})", c.x, c.y))
                .collect();
            let _ = writeln!(out, "curve = {}", pairs.join(" "));
        }
        for (ell, t) in &rec.local_types {
            let _ = writeln!(out, "local {ell} = {t}");
        }
        for (ell, a) in &rec.form.a_map {
            let _ = writeln!(out, "a {ell} = {}", coord_row(a));
        }
        for (ell, e) in &rec.form.eps_map {
            let _ = writeln!(out, "eps {ell} = {}", coord_row(e));
        }
    }
    out
}

fn coord_row(elem: &NumberFieldElem) -> String {
    let coords: Vec<String> = elem.coords().iter().map(|c| c.to_string()).collect();
    coords.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
version = 1
d = 7
ordering = fixture order

[form 294.x.a]  # trailing comment
level = 294
char_order = 1
field = 0 1
orbit = 1
a 11 = 4
a 13 = -2
";

    #[test]
    fn minimal_rational_form_loads() {
        let pack = parse_newforms(MINIMAL, "inline").unwrap();
        assert_eq!(pack.d, 7);
        assert_eq!(pack.ordering.as_deref(), Some("fixture order"));
        assert_eq!(pack.records.len(), 1);
        let rec = &pack.records[0];
        assert_eq!(rec.form.level, 294);
        assert_eq!(rec.orbit, Some(1));
        // Trivial nebentypus was synthesized at both primes.
        assert_eq!(rec.form.eps_map.len(), 2);
        assert!(rec.form.eps_value(11).unwrap().as_rational().unwrap().eq(&BigRational::from_integer(1.into())));
    }

    #[test]
    fn quadratic_field_coordinates_roundtrip() {
        let text = "\
version = 1
d = 7

[form 2646.q.c]
level = 2646
char_order = 2
field = -2 0 1
orbit = 3
curve = (1, 0) (-1, 0) (-1/2, 1/2) (-91/2, -53/2) (-59/2, -201/2)
local 3 = steinberg
a 11 = 1/2 3/2
a 13 = 0 -1
eps 11 = -1 0
eps 13 = 1 0
";
        let pack = parse_newforms(text, "inline").unwrap();
        let rec = &pack.records[0];
        assert_eq!(rec.form.field_poly, ZPoly::from_ints(&[-2, 0, 1]));
        assert!(rec.curve.is_some());
        assert_eq!(rec.local_types[&3], LocalType::Steinberg);
        let written = write_newforms(&pack);
        let back = parse_newforms(&written, "rewritten").unwrap();
        assert_eq!(back, pack);
        // The canonical writer is a fixed point.
        assert_eq!(write_newforms(&back), written);
    }

    #[test]
    fn eps_violating_declared_order_rejected() {
        // ε(11) = 2 is not a root of unity of order dividing 2.
        let text = "\
version = 1
d = 7

[form 294.bad]
level = 294
char_order = 2
field = 0 1
a 11 = 4
eps 11 = 2
";
        match parse_newforms(text, "inline") {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("294.bad"), "msg: {msg}"),
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let text = "version = 1\nd = 7\n\n[form a]\nlevel = 294\nchar_order = 1\nfield = 0 1\na 11 = 1 2\n";
        match parse_newforms(text, "inline") {
            // a 11 has 2 coordinates but the field has degree 1; reported at
            // the record header line.
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("coordinates"), "msg: {msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad_key = "version = 1\nd = 7\n\n[form a]\nlevel = 294\nwhat = 3\n";
        match parse_newforms(bad_key, "inline") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_rows_and_labels_rejected() {
        let dup_row = "version = 1\nd = 7\n\n[form a]\nlevel = 294\nchar_order = 1\nfield = 0 1\na 11 = 1\na 11 = 2\n";
        assert!(parse_newforms(dup_row, "inline").is_err());
        let dup_label = format!("{MINIMAL}\n[form 294.x.a]\nlevel = 294\nchar_order = 1\nfield = 0 1\na 11 = 4\n");
        assert!(parse_newforms(&dup_label, "inline").is_err());
    }

    #[test]
    fn missing_version_or_d_rejected() {
        assert!(parse_newforms("d = 7\n", "inline").is_err());
        assert!(parse_newforms("version = 1\n", "inline").is_err());
        // Hecke bound: |a_11| must be at most 2√11, so 7 is invalid.
        let bad_hecke = "version = 1\nd = 7\n\n[form a]\nlevel = 294\nchar_order = 1\nfield = 0 1\na 11 = 7\n";
        assert!(parse_newforms(bad_hecke, "inline").is_err());
    }

    #[test]
    fn singular_embedded_curve_rejected() {
        let text = "\
version = 1
d = 7

[form sing]
level = 294
char_order = 1
field = 0 1
curve = (0, 0) (0, 0) (0, 0) (0, 0) (0, 0)
a 11 = 4
";
        match parse_newforms(text, "inline") {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("singular"), "msg: {msg}"),
            other => panic!("expected singular-curve rejection, got {other:?}"),
        }
    }

    #[test]
    fn load_newforms_reads_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pack.nf");
        std::fs::write(&path, MINIMAL).unwrap();
        let pack = load_newforms(&path).unwrap();
        assert_eq!(pack.records.len(), 1);
        assert_eq!(pack.at_level(294).len(), 1);
        assert!(pack.at_level(588).is_empty());
    }
}
