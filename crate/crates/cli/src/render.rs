//! Deterministic rendering of algebra elements for the JSON output.
//!
//! Terms are ordered level-descending, then lexicographically by the index
//! word, with the scalar term last.

use std::cmp::Ordering;

use bosonext::bosonic::{HatElem, HatWord};
use serde_json::{json, Value as Json};

/// Output ordering on normal monomials.
fn word_cmp(a: &HatWord, b: &HatWord) -> Ordering {
    for (la, lb) in a.iter().zip(b.iter()) {
        match lb.level.cmp(&la.level) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    match b.len().cmp(&a.len()) {
        Ordering::Equal => {}
        other => return other,
    }
    for (la, lb) in a.iter().zip(b.iter()) {
        match la.index.cmp(&lb.index) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    Ordering::Equal
}

/// Sorted (coefficient, monomial) pairs with 1-based generator indices.
pub fn sorted_terms(x: &HatElem) -> Vec<(String, Vec<[i64; 2]>)> {
    let mut terms: Vec<(&HatWord, String)> =
        x.terms().iter().map(|(w, c)| (w, c.to_string())).collect();
    terms.sort_by(|a, b| word_cmp(a.0, b.0));
    terms
        .into_iter()
        .map(|(w, c)| {
            (c, w.iter().map(|l| [l.index as i64 + 1, l.level as i64]).collect())
        })
        .collect()
}

pub fn elem_json(x: &HatElem) -> Json {
    Json::Array(
        sorted_terms(x)
            .into_iter()
            .map(|(coeff, monomial)| json!({ "coeff": coeff, "monomial": monomial }))
            .collect(),
    )
}

pub fn elem_text(x: &HatElem) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    sorted_terms(x)
        .into_iter()
        .map(|(coeff, monomial)| {
            if monomial.is_empty() {
                format!("({coeff})")
            } else {
                let word = monomial
                    .iter()
                    .map(|[i, m]| format!("f({i},{m})"))
                    .collect::<Vec<_>>()
                    .join("*");
                format!("({coeff})*{word}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}
