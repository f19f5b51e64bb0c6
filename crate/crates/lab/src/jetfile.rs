//! JSON interchange for jet tables.
//!
//! Schema (indices 1-based, matching the usual tensor notation):
//!
//! ```json
//! {
//!   "m": 2,
//!   "max_order": 2,
//!   "entries": [ { "A": [1, 2], "B": [1, 1], "re": 0.25, "im": -0.5 } ]
//! }
//! ```
//!
//! The loader enforces the table invariants — index ranges, conjugate
//! symmetry of explicitly supplied mirror pairs, positive definiteness of
//! the order-0 block — and rejects violations naming the offending entry.

use kforge_core::jets::JetTable;
use kforge_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JetEntryDto {
    #[serde(rename = "A")]
    pub a: Vec<u8>,
    #[serde(rename = "B")]
    pub b: Vec<u8>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JetFileDto {
    pub m: usize,
    pub max_order: usize,
    pub entries: Vec<JetEntryDto>,
}

/// Parse and validate a jet file.
pub fn parse_jet_file(text: &str) -> Result<JetTable, LabError> {
    let dto: JetFileDto = serde_json::from_str(text)
        .map_err(|e| LabError::JetFile(format!("syntax: {e}")))?;
    if dto.m == 0 || dto.max_order < 2 {
        return Err(LabError::JetFile("need m >= 1 and max_order >= 2".into()));
    }
    let mut values = Vec::with_capacity(dto.entries.len());
    for (i, e) in dto.entries.iter().enumerate() {
        let badness = |what: &str| {
            LabError::JetFile(format!(
                "entry #{} (A={:?}, B={:?}): {what}",
                i + 1,
                e.a,
                e.b
            ))
        };
        if e.a.is_empty() || e.b.is_empty() {
            return Err(badness("A and B must be nonempty"));
        }
        if e.a.len() > dto.max_order || e.b.len() > dto.max_order {
            return Err(badness("multi-index larger than max_order"));
        }
        if e.a.iter().chain(e.b.iter()).any(|&x| x == 0 || x as usize > dto.m) {
            return Err(badness("index out of range 1..=m"));
        }
        let a0: Vec<u8> = e.a.iter().map(|x| x - 1).collect();
        let b0: Vec<u8> = e.b.iter().map(|x| x - 1).collect();
        values.push((a0, b0, Complex64::new(e.re, e.im)));
    }
    JetTable::prescribe(dto.m, dto.max_order, &values).map_err(|err| {
        // locate the first entry participating in the violation for the message
        LabError::JetFile(format!("invariant violation: {err}"))
    })
}

/// Serialize a table (1-based indices, canonical entry order).
pub fn to_jet_file(j: &JetTable) -> String {
    let entries: Vec<JetEntryDto> = j
        .iter()
        .map(|((a, b), v)| JetEntryDto {
            a: a.iter().map(|x| x + 1).collect(),
            b: b.iter().map(|x| x + 1).collect(),
            re: v.re,
            im: v.im,
        })
        .collect();
    let dto = JetFileDto { m: j.m(), max_order: j.max_order(), entries };
    serde_json::to_string_pretty(&dto).expect("jet file serializes")
}

/// JSON interchange for invariant polynomials: partition-indexed trace
/// monomial coefficients.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyTermDto {
    pub partition: Vec<u8>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyDto {
    pub k: usize,
    pub terms: Vec<PolyTermDto>,
}

/// Parse a partition/coefficient polynomial for the given matrix size.
pub fn parse_poly(text: &str, m: usize) -> Result<kforge_core::ring::InvariantPolynomial, LabError> {
    let dto: PolyDto = serde_json::from_str(text).map_err(|e| LabError::JetFile(format!("syntax: {e}")))?;
    let mut poly = kforge_core::ring::InvariantPolynomial::zero(m, dto.k);
    for (i, t) in dto.terms.iter().enumerate() {
        let deg: usize = t.partition.iter().map(|&x| x as usize).sum();
        if deg != dto.k {
            return Err(LabError::JetFile(format!(
                "term #{}: partition {:?} has degree {deg}, polynomial declares k={}",
                i + 1,
                t.partition,
                dto.k
            )));
        }
        if t.partition.iter().any(|&x| x == 0 || x as usize > m) {
            return Err(LabError::JetFile(format!(
                "term #{}: partition {:?} has a part outside 1..={m}",
                i + 1,
                t.partition
            )));
        }
        let mono = kforge_core::ring::InvariantPolynomial::monomial(m, &t.partition)
            .scale(Complex64::new(t.re, t.im));
        poly = poly.add(&mono);
    }
    Ok(poly)
}

pub fn to_poly_file(p: &kforge_core::ring::InvariantPolynomial) -> String {
    let terms: Vec<PolyTermDto> = p
        .iter()
        .map(|(part, v)| PolyTermDto { partition: part.clone(), re: v.re, im: v.im })
        .collect();
    serde_json::to_string_pretty(&PolyDto { k: p.k, terms }).expect("poly serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_roundtrip_and_validation() {
        let p = kforge_core::ring::InvariantPolynomial::monomial(3, &[2])
            .add(&kforge_core::ring::InvariantPolynomial::monomial(3, &[1, 1]).scale(Complex64::new(-0.5, 0.25)));
        let text = to_poly_file(&p);
        let back = parse_poly(&text, 3).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"k":2,"terms":[{"partition":[3],"re":1.0,"im":0.0}]}"#;
        assert!(parse_poly(bad, 2).is_err());
        let bad_deg = r#"{"k":2,"terms":[{"partition":[1],"re":1.0,"im":0.0}]}"#;
        assert!(parse_poly(bad_deg, 2).is_err());
    }

    #[test]
    fn roundtrip() {
        let t = JetTable::random(2, 2, 5, 0.4);
        let text = to_jet_file(&t);
        let back = parse_jet_file(&text).unwrap();
        for ((a, b), v) in t.iter() {
            assert!((back.entry(a, b) - v).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_indices() {
        let text = r#"{"m":2,"max_order":2,"entries":[{"A":[3,1],"B":[1,1],"re":1.0,"im":0.0}]}"#;
        let err = parse_jet_file(text).unwrap_err();
        assert!(format!("{err}").contains("entry #1"), "{err}");
    }

    #[test]
    fn rejects_conjugate_violation() {
        let text = r#"{"m":1,"max_order":2,"entries":[
            {"A":[1,1],"B":[1],"re":1.0,"im":0.5},
            {"A":[1],"B":[1,1],"re":1.0,"im":0.5}
        ]}"#;
        let err = parse_jet_file(text).unwrap_err();
        assert!(format!("{err}").contains("conjugate"), "{err}");
    }
}
