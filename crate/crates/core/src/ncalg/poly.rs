use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::coeff::{self, Coeff};
use super::system::{ensure_same, GeneratorSystem};
use super::word::{mul_words, Letter, Word};
use crate::error::{Error, Result};

/// An element of B<T>: a finite combination of canonical words with nonzero coefficients.
#[derive(Debug, Clone)]
pub struct NCPoly {
    sys: Arc<GeneratorSystem>,
    terms: BTreeMap<Word, Coeff>,
}

impl PartialEq for NCPoly {
    fn eq(&self, other: &Self) -> bool {
        self.sys.compatible(&other.sys) && self.terms == other.terms
    }
}

pub(crate) fn accumulate<K: Ord>(map: &mut BTreeMap<K, Coeff>, key: K, c: Coeff) {
    if coeff::is_zero(&c) {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if coeff::is_zero(e.get()) {
                e.remove();
            }
        }
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

pub(crate) fn validate_word(sys: &GeneratorSystem, w: &Word) -> Result<()> {
    for l in w.letters() {
        match *l {
            Letter::T(i) if i >= sys.n() => {
                return Err(Error::UnknownLetter(format!("t{}", i + 1)));
            }
            Letter::B(k) => match sys.b() {
                Some(b) if k < b.dim() && k != b.unit() => {}
                _ => return Err(Error::UnknownLetter(format!("b{k}"))),
            },
            _ => {}
        }
    }
    if w
        .letters()
        .windows(2)
        .any(|p| matches!(p, [Letter::B(_), Letter::B(_)]))
    {
        return Err(Error::Structural(format!("word {w} is not canonical")));
    }
    sys.check_degree(w.degree())
}

impl NCPoly {
    pub fn zero(sys: &Arc<GeneratorSystem>) -> Self {
        NCPoly {
            sys: Arc::clone(sys),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(sys: &Arc<GeneratorSystem>, c: Coeff) -> Self {
        let mut p = NCPoly::zero(sys);
        accumulate(&mut p.terms, Word::empty(), c);
        p
    }

    pub fn one(sys: &Arc<GeneratorSystem>) -> Self {
        NCPoly::scalar(sys, Coeff::one())
    }

    /// The indeterminate `t_{i+1}` (zero-based index).
    pub fn t(sys: &Arc<GeneratorSystem>, i: usize) -> Result<Self> {
        NCPoly::monomial(sys, Word::t(i), Coeff::one())
    }

    /// The B basis element `b_k`; the unit index gives the polynomial 1.
    pub fn b(sys: &Arc<GeneratorSystem>, k: usize) -> Result<Self> {
        match sys.b() {
            Some(alg) if k == alg.unit() => Ok(NCPoly::one(sys)),
            Some(alg) if k < alg.dim() => Ok(NCPoly::from_raw(
                sys,
                [(Word::from_canonical(vec![Letter::B(k)]), Coeff::one())],
            )),
            None if k == 0 => Ok(NCPoly::one(sys)),
            _ => Err(Error::UnknownLetter(format!("b{k}"))),
        }
    }

    pub fn monomial(sys: &Arc<GeneratorSystem>, w: Word, c: Coeff) -> Result<Self> {
        validate_word(sys, &w)?;
        Ok(NCPoly::from_raw(sys, [(w, c)]))
    }

    pub fn from_terms(
        sys: &Arc<GeneratorSystem>,
        terms: impl IntoIterator<Item = (Word, Coeff)>,
    ) -> Result<Self> {
        let mut p = NCPoly::zero(sys);
        for (w, c) in terms {
            validate_word(sys, &w)?;
            accumulate(&mut p.terms, w, c);
        }
        Ok(p)
    }

    pub(crate) fn from_raw(
        sys: &Arc<GeneratorSystem>,
        terms: impl IntoIterator<Item = (Word, Coeff)>,
    ) -> Self {
        let mut p = NCPoly::zero(sys);
        for (w, c) in terms {
            accumulate(&mut p.terms, w, c);
        }
        p
    }

    /// The tuple `(t_1, ..., t_n)`.
    pub fn generators(sys: &Arc<GeneratorSystem>) -> Vec<NCPoly> {
        (0..sys.n())
            .map(|i| NCPoly::from_raw(sys, [(Word::t(i), Coeff::one())]))
            .collect()
    }

    pub fn system(&self) -> &Arc<GeneratorSystem> {
        &self.sys
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Coeff {
        self.terms.get(w).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest degree among the terms; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub fn add(&self, other: &NCPoly) -> Result<NCPoly> {
        ensure_same(&self.sys, &other.sys)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &NCPoly) -> Result<NCPoly> {
        ensure_same(&self.sys, &other.sys)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn mul(&self, other: &NCPoly) -> Result<NCPoly> {
        ensure_same(&self.sys, &other.sys)?;
        self.sys.check_degree(self.degree() + other.degree())?;
        Ok(self.mul_unchecked(other))
    }

    pub fn scale(&self, c: &Coeff) -> NCPoly {
        NCPoly::from_raw(&self.sys, self.terms.iter().map(|(w, a)| (w.clone(), a * c)))
    }

    pub fn neg(&self) -> NCPoly {
        NCPoly {
            sys: Arc::clone(&self.sys),
            terms: self.terms.iter().map(|(w, a)| (w.clone(), -a.clone())).collect(),
        }
    }

    pub(crate) fn add_unchecked(&self, other: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            accumulate(&mut out.terms, w.clone(), c.clone());
        }
        out
    }

    pub(crate) fn mul_unchecked(&self, other: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero(&self.sys);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let ab = a * b;
                for (w, c) in mul_words(&self.sys, u, v) {
                    accumulate(&mut out.terms, w, &ab * c);
                }
            }
        }
        out
    }

    pub(crate) fn add_term(&mut self, w: Word, c: Coeff) {
        accumulate(&mut self.terms, w, c);
    }

    /// Conjugate-linear anti-automorphism: reverse words, star letters, conjugate coefficients.
    pub fn adjoint(&self) -> NCPoly {
        let mut out = NCPoly::zero(&self.sys);
        for (w, c) in &self.terms {
            let mut acc = NCPoly::scalar(&self.sys, c.conj());
            for l in w.letters().iter().rev() {
                acc = acc.mul_unchecked(&self.letter_adjoint(*l));
            }
            for (u, a) in acc.terms {
                accumulate(&mut out.terms, u, a);
            }
        }
        out
    }

    fn letter_adjoint(&self, l: Letter) -> NCPoly {
        match l {
            Letter::T(i) => NCPoly::from_raw(&self.sys, [(Word::t(self.sys.star(i)), Coeff::one())]),
            Letter::B(k) => {
                let alg = self.sys.b().expect("B-letter without a coefficient algebra");
                NCPoly::from_raw(
                    &self.sys,
                    alg.star_of(k).iter().map(|(m, c)| {
                        let w = if *m == alg.unit() {
                            Word::empty()
                        } else {
                            Word::from_canonical(vec![Letter::B(*m)])
                        };
                        (w, c.clone())
                    }),
                )
            }
        }
    }

    /// Drops the constant term; used to center candidate conjugate systems when B = C.
    pub fn without_constant(&self) -> NCPoly {
        let mut out = self.clone();
        out.terms.remove(&Word::empty());
        out
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let [re, im] = coeff::to_pair(c);
            write!(f, "({re}{}{im}i)", if im.starts_with('-') { "" } else { "+" })?;
            if !w.is_empty() {
                write!(f, "*{w}")?;
            }
        }
        Ok(())
    }
}
