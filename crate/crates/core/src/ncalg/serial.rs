//! JSON text form. Words are arrays of `["t", i]` (1-based) and `["b", k]` tags and
//! coefficients are `[re, im]` rational strings, so round trips are bit-exact.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::sync::Arc;

use super::coeff;
use super::kernel::KernelMatrix;
use super::poly::NCPoly;
use super::system::GeneratorSystem;
use super::tensor::TensorPoly;
use super::word::{Letter, Word};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct LetterTag(String, usize);

#[derive(Debug, Serialize, Deserialize)]
struct PolyTerm {
    word: Vec<LetterTag>,
    coeff: [String; 2],
}

#[derive(Debug, Serialize, Deserialize)]
struct TensorTerm {
    left: Vec<LetterTag>,
    right: Vec<LetterTag>,
    coeff: [String; 2],
}

#[derive(Debug, Serialize, Deserialize)]
struct KernelJson {
    size: usize,
    entries: Vec<Vec<TensorTerm>>,
}

fn word_tags(w: &Word) -> Vec<LetterTag> {
    w.letters()
        .iter()
        .map(|l| match *l {
            Letter::T(i) => LetterTag("t".into(), i + 1),
            Letter::B(k) => LetterTag("b".into(), k),
        })
        .collect()
}

fn tags_word(tags: &[LetterTag]) -> Result<Word> {
    let letters = tags
        .iter()
        .map(|LetterTag(kind, idx)| match (kind.as_str(), *idx) {
            ("t", 0) => Err(Error::UnknownLetter("t0".into())),
            ("t", i) => Ok(Letter::T(i - 1)),
            ("b", k) => Ok(Letter::B(k)),
            (other, _) => Err(Error::UnknownLetter(other.to_string())),
        })
        .collect::<Result<Vec<_>>>()?;
    // Validation of canonical form happens when the word enters a polynomial.
    Ok(Word::from_canonical_unchecked(letters))
}

pub fn poly_to_value(p: &NCPoly) -> Value {
    let terms: Vec<PolyTerm> = p
        .terms()
        .map(|(w, c)| PolyTerm {
            word: word_tags(w),
            coeff: coeff::to_pair(c),
        })
        .collect();
    serde_json::to_value(terms).expect("polynomial terms serialize")
}

pub fn poly_from_value(v: &Value, sys: &Arc<GeneratorSystem>) -> Result<NCPoly> {
    let terms: Vec<PolyTerm> = serde_json::from_value(v.clone())?;
    let pairs = terms
        .iter()
        .map(|t| Ok((tags_word(&t.word)?, coeff::from_pair(&t.coeff[0], &t.coeff[1])?)))
        .collect::<Result<Vec<_>>>()?;
    NCPoly::from_terms(sys, pairs)
}

pub fn tuple_to_value(p: &[NCPoly]) -> Value {
    Value::Array(p.iter().map(poly_to_value).collect())
}

pub fn tuple_from_value(v: &Value, sys: &Arc<GeneratorSystem>) -> Result<Vec<NCPoly>> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::spec("tuple", "expected an array of polynomials"))?;
    items.iter().map(|x| poly_from_value(x, sys)).collect()
}

fn tensor_terms(t: &TensorPoly) -> Vec<TensorTerm> {
    t.terms()
        .map(|(u, v, c)| TensorTerm {
            left: word_tags(u),
            right: word_tags(v),
            coeff: coeff::to_pair(c),
        })
        .collect()
}

fn tensor_from_terms(terms: &[TensorTerm], sys: &Arc<GeneratorSystem>) -> Result<TensorPoly> {
    let triples = terms
        .iter()
        .map(|t| {
            Ok((
                tags_word(&t.left)?,
                tags_word(&t.right)?,
                coeff::from_pair(&t.coeff[0], &t.coeff[1])?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    TensorPoly::from_terms(sys, triples)
}

pub fn tensor_to_value(t: &TensorPoly) -> Value {
    serde_json::to_value(tensor_terms(t)).expect("tensor terms serialize")
}

pub fn tensor_from_value(v: &Value, sys: &Arc<GeneratorSystem>) -> Result<TensorPoly> {
    let terms: Vec<TensorTerm> = serde_json::from_value(v.clone())?;
    tensor_from_terms(&terms, sys)
}

pub fn kernel_to_value(k: &KernelMatrix) -> Value {
    serde_json::to_value(KernelJson {
        size: k.size(),
        entries: k.entries().iter().map(tensor_terms).collect(),
    })
    .expect("kernel serializes")
}

pub fn kernel_from_value(v: &Value, sys: &Arc<GeneratorSystem>) -> Result<KernelMatrix> {
    let k: KernelJson = serde_json::from_value(v.clone())?;
    let entries = k
        .entries
        .iter()
        .map(|e| tensor_from_terms(e, sys))
        .collect::<Result<Vec<_>>>()?;
    KernelMatrix::from_entries(k.size, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::{calculus, parse};

    #[test]
    fn polynomial_round_trip_is_exact() {
        let s = Arc::new(GeneratorSystem::self_adjoint(2));
        let p = parse::parse_poly("1/3 t1*t2 - 0.1i t2^3 + 7", &s).unwrap();
        let text = serde_json::to_string(&poly_to_value(&p)).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(poly_from_value(&back, &s).unwrap(), p);
        assert!(text.contains(r#"["t",1]"#));
    }

    #[test]
    fn kernel_round_trip_is_exact() {
        let s = Arc::new(GeneratorSystem::self_adjoint(2));
        let g = NCPoly::generators(&s);
        let a = calculus::mai_kernel(&[g[1].clone(), g[0].clone()], &g).unwrap();
        let v = kernel_to_value(&a);
        assert_eq!(kernel_from_value(&v, &s).unwrap(), a);
        let t = a.get(0, 1).clone();
        assert_eq!(tensor_from_value(&tensor_to_value(&t), &s).unwrap(), t);
    }

    #[test]
    fn unknown_tags_are_rejected() {
        let s = Arc::new(GeneratorSystem::self_adjoint(1));
        let v: Value = serde_json::from_str(r#"[{"word": [["t", 2]], "coeff": ["1", "0"]}]"#).unwrap();
        assert!(matches!(poly_from_value(&v, &s), Err(Error::UnknownLetter(_))));
        let v: Value = serde_json::from_str(r#"[{"word": [["x", 1]], "coeff": ["1", "0"]}]"#).unwrap();
        assert!(poly_from_value(&v, &s).is_err());
    }
}
