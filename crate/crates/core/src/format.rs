//! Spec and certificate files.
//!
//! Both are JSON documents. A pattern is a list of `[cell, symbol]` pairs, where a
//! cell is a coordinate list (a word such as `"aB"` on free groups) and a symbol
//! is a name from the alphabet. Writers put one pattern per line.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::value::RawValue;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::avofactors::LocalMap;
use crate::certificates::{verify_equivalence, verify_uniform, Certificate, Equivalence, Family, UniformVerdict};
use crate::error::{Error, Result};
use crate::group::{format_word, parse_word, Group, Point};
use crate::oracles::Budget;
use crate::patterns::{Pattern, SftSpec, Symbol};

pub const CERTIFICATE_FORMAT: &str = "avoshift-certificate/1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecDocument {
    pub spec: SftSpec,
    pub local_map: Option<LocalMap>,
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
struct RawSpec<'a> {
    group: String,
    alphabet: Vec<Value>,
    #[serde(borrow)]
    forbidden: Vec<&'a RawValue>,
    #[serde(borrow, default)]
    local_map: Option<&'a RawValue>,
}

#[derive(Deserialize)]
struct RawMap<'a> {
    #[serde(borrow)]
    neighborhood: Vec<&'a RawValue>,
    rule: Vec<(Vec<Value>, Value)>,
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn err_at(text: &str, raw: &RawValue, message: impl Into<String>) -> Error {
    let offset = (raw.get().as_ptr() as usize).saturating_sub(text.as_ptr() as usize);
    let (line, column) = position(text, offset);
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn symbol_name(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn parse_cell(group: &Group, v: &Value) -> std::result::Result<Point, String> {
    let p = match v {
        Value::String(w) if group.is_free() => parse_word(w).map_err(|e| e.to_string())?,
        Value::Array(xs) => Point(
            xs.iter()
                .map(|x| x.as_i64().ok_or_else(|| format!("coordinate {x} is not an integer")))
                .collect::<std::result::Result<_, _>>()?,
        ),
        other => return Err(format!("cell {other} is neither a coordinate list nor a word")),
    };
    group.validate(&p).map_err(|e| e.to_string())?;
    Ok(p)
}

fn parse_pattern(group: &Group, names: &[String], v: &Value) -> std::result::Result<Pattern, String> {
    let Value::Array(pairs) = v else {
        return Err("a pattern is a list of [cell, symbol] pairs".into());
    };
    let mut out = Pattern::new();
    for pair in pairs {
        let Some([cell, sym]) = pair.as_array().map(|a| a.as_slice()).and_then(|a| <&[Value; 2]>::try_from(a).ok()) else {
            return Err(format!("expected [cell, symbol], found {pair}"));
        };
        let cell = parse_cell(group, cell)?;
        let name = symbol_name(sym).ok_or_else(|| format!("symbol {sym} is not a name"))?;
        let a = names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| format!("symbol '{name}' is not in the alphabet"))?;
        if out.cells.insert(cell.clone(), a as Symbol).is_some() {
            return Err(format!("cell {} appears twice", group.format_point(&cell)));
        }
    }
    Ok(out)
}

pub fn parse_spec_document(text: &str) -> Result<SpecDocument> {
    let raw: RawSpec = serde_json::from_str(text).map_err(json_err)?;
    let group = Group::from_key(&raw.group).map_err(|e| Error::Parse {
        line: 1,
        column: 1,
        message: e.to_string(),
    })?;
    let mut alphabet = Vec::new();
    for v in &raw.alphabet {
        let name = symbol_name(v).ok_or_else(|| Error::Usage(format!("alphabet entry {v} is not a name")))?;
        if alphabet.contains(&name) {
            return Err(Error::Usage(format!("symbol '{name}' declared twice")));
        }
        alphabet.push(name);
    }
    let mut forbidden: Vec<Pattern> = Vec::new();
    let mut warnings = Vec::new();
    for r in &raw.forbidden {
        let v: Value = serde_json::from_str(r.get()).map_err(json_err)?;
        let p = parse_pattern(&group, &alphabet, &v).map_err(|m| err_at(text, r, m))?;
        let c = p.canonical(&group);
        if forbidden.iter().any(|q| q.canonical(&group) == c) {
            let (line, _) = position(text, r.get().as_ptr() as usize - text.as_ptr() as usize);
            warnings.push(format!("line {line}: duplicate forbidden pattern dropped"));
            continue;
        }
        forbidden.push(p);
    }
    let local_map = match raw.local_map {
        None => None,
        Some(r) => Some(parse_local_map(text, r, &group, &alphabet)?),
    };
    let spec = SftSpec::new(group, alphabet, forbidden)?;
    Ok(SpecDocument {
        spec,
        local_map,
        warnings,
    })
}

fn parse_local_map(text: &str, r: &RawValue, group: &Group, names: &[String]) -> Result<LocalMap> {
    let m: RawMap = serde_json::from_str(r.get()).map_err(|e| err_at(text, r, e.to_string()))?;
    let mut neighborhood = Vec::new();
    for c in &m.neighborhood {
        let v: Value = serde_json::from_str(c.get()).map_err(json_err)?;
        neighborhood.push(parse_cell(group, &v).map_err(|e| err_at(text, c, e))?);
    }
    let index = |v: &Value| -> Result<Symbol> {
        let name = symbol_name(v).ok_or_else(|| err_at(text, r, format!("symbol {v} is not a name")))?;
        names
            .iter()
            .position(|n| *n == name)
            .map(|i| i as Symbol)
            .ok_or_else(|| err_at(text, r, format!("symbol '{name}' is not in the alphabet")))
    };
    let mut rule = BTreeMap::new();
    for (word, out) in &m.rule {
        let w = word.iter().map(index).collect::<Result<Vec<_>>>()?;
        rule.insert(w, index(out)?);
    }
    LocalMap::new(neighborhood, rule, names.len()).map_err(|e| err_at(text, r, e.to_string()))
}

/// A shape given as a JSON list of cells, e.g. `[[0,0],[1,0]]` or `["e","a"]`.
pub fn parse_shape(group: &Group, text: &str) -> Result<crate::shapes::Shape> {
    let v: Value = serde_json::from_str(text).map_err(json_err)?;
    let Value::Array(cells) = v else {
        return Err(Error::Usage("a shape is a list of cells".into()));
    };
    cells.iter().map(|c| parse_cell(group, c).map_err(Error::Usage)).collect()
}

pub fn format_pattern(group: &Group, names: &[String], p: &Pattern) -> String {
    pattern_json(group, names, p)
}

pub fn parse_sft_spec(text: &str) -> Result<SftSpec> {
    Ok(parse_spec_document(text)?.spec)
}

fn name_list(names: &[&String]) -> String {
    let q: Vec<String> = names.iter().map(|n| serde_json::to_string(n).unwrap()).collect();
    format!("[{}]", q.join(", "))
}

fn cell_json(group: &Group, p: &Point) -> String {
    if group.is_free() {
        serde_json::to_string(&format_word(&p.0)).unwrap()
    } else {
        let xs: Vec<String> = p.0.iter().map(|x| x.to_string()).collect();
        format!("[{}]", xs.join(", "))
    }
}

fn pattern_json(group: &Group, names: &[String], p: &Pattern) -> String {
    let pairs: Vec<String> = p
        .cells
        .iter()
        .map(|(c, a)| format!("[{}, {}]", cell_json(group, c), serde_json::to_string(&names[*a as usize]).unwrap()))
        .collect();
    format!("[{}]", pairs.join(", "))
}

fn list_block(items: &[String], indent: &str) -> String {
    if items.is_empty() {
        return "[]".into();
    }
    format!("[\n{indent}  {}\n{indent}]", items.join(&format!(",\n{indent}  ")))
}

fn spec_body(spec: &SftSpec, map: Option<&LocalMap>, indent: &str) -> String {
    let g = &spec.group;
    let names = &spec.alphabet;
    let forb: Vec<String> = spec.forbidden.iter().map(|p| pattern_json(g, names, p)).collect();
    let mut out = format!(
        "{{\n{indent}  \"group\": {},\n{indent}  \"alphabet\": {},\n{indent}  \"forbidden\": {}",
        serde_json::to_string(&g.key()).unwrap(),
        name_list(&names.iter().collect::<Vec<_>>()),
        list_block(&forb, &format!("{indent}  "))
    );
    if let Some(m) = map {
        let nb: Vec<String> = m.neighborhood.iter().map(|c| cell_json(g, c)).collect();
        let rows: Vec<String> = m
            .rule
            .iter()
            .map(|(w, o)| {
                let w: Vec<&String> = w.iter().map(|a| &names[*a as usize]).collect();
                format!(
                    "[{}, {}]",
                    name_list(&w),
                    serde_json::to_string(&names[*o as usize]).unwrap()
                )
            })
            .collect();
        out.push_str(&format!(
            ",\n{indent}  \"local_map\": {{\n{indent}    \"neighborhood\": [{}],\n{indent}    \"rule\": {}\n{indent}  }}",
            nb.join(", "),
            list_block(&rows, &format!("{indent}    "))
        ));
    }
    out.push_str(&format!("\n{indent}}}"));
    out
}

pub fn serialize_spec(spec: &SftSpec, map: Option<&LocalMap>) -> String {
    spec_body(spec, map, "") + "\n"
}

/// SHA-256 over the canonical text of every field stored in a certificate file.
pub fn certificate_digest(cert: &Certificate) -> String {
    let counts: Vec<usize> = cert.transcript.iter().map(|t| t.patterns).collect();
    digest_fields(&cert.source, cert.family, cert.radius, &cert.q, &counts, cert.p_in_q, cert.q_in_p)
}

fn digest_fields(
    source: &SftSpec,
    family: Family,
    radius: u32,
    q: &SftSpec,
    counts: &[usize],
    p_in_q: u32,
    q_in_p: u32,
) -> String {
    let mut h = Sha256::new();
    h.update(CERTIFICATE_FORMAT);
    h.update(serialize_spec(source, None));
    h.update(format!("family={} radius={}\n", family.key(), radius));
    for p in &q.forbidden {
        h.update(pattern_json(&q.group, &q.alphabet, p));
        h.update("\n");
    }
    let counts: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
    h.update(format!("transcript={}\n", counts.join(",")));
    h.update(format!("p_in_q={p_in_q} q_in_p={q_in_p}\n"));
    hex::encode(h.finalize())
}

pub fn serialize_certificate(cert: &Certificate) -> String {
    let g = &cert.q.group;
    let q: Vec<String> = cert.q.forbidden.iter().map(|p| pattern_json(g, &cert.q.alphabet, p)).collect();
    let counts: Vec<String> = cert.transcript.iter().map(|t| t.patterns.to_string()).collect();
    format!(
        "{{\n  \"format\": \"{CERTIFICATE_FORMAT}\",\n  \"source\": {},\n  \"family\": \"{}\",\n  \"radius\": {},\n  \"q\": {},\n  \"transcript\": [{}],\n  \"p_in_q\": {},\n  \"q_in_p\": {},\n  \"digest\": \"{}\"\n}}\n",
        spec_body(&cert.source, None, "  "),
        cert.family.key(),
        cert.radius,
        list_block(&q, "  "),
        counts.join(", "),
        cert.p_in_q,
        cert.q_in_p,
        certificate_digest(cert)
    )
}

#[derive(Deserialize)]
struct RawCertificate<'a> {
    format: String,
    #[serde(borrow)]
    source: &'a RawValue,
    family: String,
    radius: u32,
    #[serde(borrow)]
    q: Vec<&'a RawValue>,
    transcript: Vec<usize>,
    p_in_q: u32,
    q_in_p: u32,
    digest: String,
}

/// Parses a certificate and re-verifies it from scratch. The digest must match
/// the file, the extension check is rerun and its counts must match the
/// transcript, and `Q` must be shown equivalent to the source.
pub fn load_certificate(text: &str, budget: &Budget) -> Result<Certificate> {
    let raw: RawCertificate = serde_json::from_str(text).map_err(json_err)?;
    if raw.format != CERTIFICATE_FORMAT {
        return Err(err_at(text, raw.source, format!("unsupported format '{}'", raw.format)));
    }
    let source = parse_sft_spec(raw.source.get()).map_err(|e| err_at(text, raw.source, e.to_string()))?;
    let family = Family::from_key(&raw.family)?;
    let mut forbidden = Vec::new();
    for r in &raw.q {
        let v: Value = serde_json::from_str(r.get()).map_err(json_err)?;
        forbidden.push(parse_pattern(&source.group, &source.alphabet, &v).map_err(|m| err_at(text, r, m))?);
    }
    let q = source.with_forbidden(forbidden)?;
    if q.forbidden.len() != raw.q.len() {
        return Err(Error::CertificateViolation("Q is not in canonical form".into()));
    }
    let digest = digest_fields(&source, family, raw.radius, &q, &raw.transcript, raw.p_in_q, raw.q_in_p);
    if digest != raw.digest {
        return Err(Error::CertificateViolation("digest mismatch".into()));
    }
    let transcript = match verify_uniform(&q, family, raw.radius, budget)? {
        UniformVerdict::Verified(t) => t,
        UniformVerdict::FailsAt { prefix, .. } => {
            return Err(Error::CertificateViolation(format!(
                "extension fails on a prefix of {} cells",
                prefix.shape.len()
            )))
        }
        UniformVerdict::Unknown { reason, .. } => {
            return Err(Error::CertificateViolation(format!("could not re-verify: {reason}")))
        }
    };
    let counts: Vec<usize> = transcript.iter().map(|t| t.patterns).collect();
    if counts != raw.transcript {
        return Err(Error::CertificateViolation("transcript does not match a fresh run".into()));
    }
    match verify_equivalence(&source, &q, budget)? {
        Equivalence::Equivalent { .. } => {}
        other => {
            return Err(Error::CertificateViolation(format!(
                "forbidden sets not shown equivalent: {other:?}"
            )))
        }
    }
    Ok(Certificate {
        source,
        q,
        family,
        radius: raw.radius,
        transcript,
        p_in_q: raw.p_in_q,
        q_in_p: raw.q_in_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{find_certificate, CertificateSearch};

    const GOLDEN: &str = r#"{
  "group": "Z",
  "alphabet": ["0", "1"],
  "forbidden": [
    [[[0], "1"], [[1], "1"]]
  ]
}
"#;

    #[test]
    fn golden_mean_round_trip() {
        let s = parse_sft_spec(GOLDEN).unwrap();
        assert_eq!(s.window(), 1);
        assert_eq!(serialize_spec(&s, None), GOLDEN);
        assert_eq!(parse_sft_spec(&serialize_spec(&s, None)).unwrap(), s);
    }

    #[test]
    fn positioned_errors() {
        let bad = "{\n  \"group\": \"Z^2\",\n  \"alphabet\": [\"0\"],\n  \"forbidden\": [\n    [[[0, 0, 1], \"0\"]]\n  ]\n}";
        match parse_sft_spec(bad) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (5, 5)),
            other => panic!("{other:?}"),
        }
        let undeclared = GOLDEN.replace("[[1], \"1\"]", "[[1], \"7\"]");
        assert!(matches!(parse_sft_spec(&undeclared), Err(Error::Parse { line: 5, .. })));
        assert!(matches!(parse_sft_spec("{\"group\": "), Err(Error::Parse { .. })));
        assert!(parse_sft_spec(&GOLDEN.replace("\"Z\"", "\"Q7\"")).is_err());
    }

    #[test]
    fn duplicates_warn() {
        let dup = GOLDEN.replace(
            "[[[0], \"1\"], [[1], \"1\"]]",
            "[[[0], \"1\"], [[1], \"1\"]],\n    [[[3], \"1\"], [[4], \"1\"]]",
        );
        let d = parse_spec_document(&dup).unwrap();
        assert_eq!(d.spec.forbidden.len(), 1);
        assert_eq!(d.warnings.len(), 1);
    }

    #[test]
    fn words_and_local_maps() {
        let text = r#"{
  "group": "F2",
  "alphabet": ["0", "1"],
  "forbidden": [
    [["e", "1"], ["a", "1"]],
    [["e", "1"], ["b", "1"]]
  ],
  "local_map": {
    "neighborhood": ["e", "a"],
    "rule": [
      [["0", "0"], "0"],
      [["0", "1"], "1"],
      [["1", "0"], "1"],
      [["1", "1"], "0"]
    ]
  }
}
"#;
        let d = parse_spec_document(text).unwrap();
        assert_eq!(d.local_map.as_ref().unwrap().neighborhood.len(), 2);
        assert_eq!(serialize_spec(&d.spec, d.local_map.as_ref()), text);
    }

    #[test]
    fn certificates_round_trip_and_detect_tampering() {
        let b = Budget::small();
        let s = parse_sft_spec(GOLDEN).unwrap();
        let CertificateSearch::Found(c) = find_certificate(&s, Family::InductiveIntervals, &b).unwrap() else {
            panic!()
        };
        let text = serialize_certificate(&c);
        assert_eq!(load_certificate(&text, &b).unwrap(), c);
        let t1 = text.replace("\"transcript\": [1, 2, 2]", "\"transcript\": [1, 2, 3]");
        assert_ne!(t1, text);
        assert!(matches!(load_certificate(&t1, &b), Err(Error::CertificateViolation(_))));
        let t2 = text.replace("[[[0], \"1\"], [[1], \"1\"]]\n  ]", "[[[0], \"1\"], [[2], \"1\"]]\n  ]");
        assert_ne!(t2, text);
        assert!(load_certificate(&t2, &b).is_err());
    }
}
