use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

use super::coeff::Coeff;
use super::poly::{accumulate, validate_word, NCPoly};
use super::system::{ensure_same, GeneratorSystem};
use super::word::{mul_words, Word};
use crate::error::Result;

/// An element of B<T> ⊗ B<T>°, stored as a combination of pairs `(left, right)`.
#[derive(Debug, Clone)]
pub struct TensorPoly {
    sys: Arc<GeneratorSystem>,
    terms: BTreeMap<(Word, Word), Coeff>,
}

impl PartialEq for TensorPoly {
    fn eq(&self, other: &Self) -> bool {
        self.sys.compatible(&other.sys) && self.terms == other.terms
    }
}

impl TensorPoly {
    pub fn zero(sys: &Arc<GeneratorSystem>) -> Self {
        TensorPoly {
            sys: Arc::clone(sys),
            terms: BTreeMap::new(),
        }
    }

    /// `1 ⊗ 1`.
    pub fn unit(sys: &Arc<GeneratorSystem>) -> Self {
        let mut t = TensorPoly::zero(sys);
        t.add_term(Word::empty(), Word::empty(), Coeff::one());
        t
    }

    /// The elementary tensor `p ⊗ q`.
    pub fn elementary(p: &NCPoly, q: &NCPoly) -> Result<Self> {
        ensure_same(p.system(), q.system())?;
        let mut t = TensorPoly::zero(p.system());
        for (u, a) in p.terms() {
            for (v, b) in q.terms() {
                t.add_term(u.clone(), v.clone(), a * b);
            }
        }
        Ok(t)
    }

    pub fn from_terms(
        sys: &Arc<GeneratorSystem>,
        terms: impl IntoIterator<Item = (Word, Word, Coeff)>,
    ) -> Result<Self> {
        let mut t = TensorPoly::zero(sys);
        for (u, v, c) in terms {
            validate_word(sys, &u)?;
            validate_word(sys, &v)?;
            t.add_term(u, v, c);
        }
        Ok(t)
    }

    pub(crate) fn add_term(&mut self, left: Word, right: Word, c: Coeff) {
        accumulate(&mut self.terms, (left, right), c);
    }

    pub fn system(&self) -> &Arc<GeneratorSystem> {
        &self.sys
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Word, &Coeff)> {
        self.terms.iter().map(|((u, v), c)| (u, v, c))
    }

    pub fn coeff(&self, left: &Word, right: &Word) -> Coeff {
        self.terms
            .get(&(left.clone(), right.clone()))
            .cloned()
            .unwrap_or_else(Coeff::zero)
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

    pub fn add(&self, other: &TensorPoly) -> Result<TensorPoly> {
        ensure_same(&self.sys, &other.sys)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &TensorPoly) -> Result<TensorPoly> {
        ensure_same(&self.sys, &other.sys)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn scale(&self, c: &Coeff) -> TensorPoly {
        let mut out = TensorPoly::zero(&self.sys);
        for ((u, v), a) in &self.terms {
            out.add_term(u.clone(), v.clone(), a * c);
        }
        out
    }

    pub fn neg(&self) -> TensorPoly {
        TensorPoly {
            sys: Arc::clone(&self.sys),
            terms: self.terms.iter().map(|(k, a)| (k.clone(), -a.clone())).collect(),
        }
    }

    pub(crate) fn add_unchecked(&self, other: &TensorPoly) -> TensorPoly {
        let mut out = self.clone();
        for ((u, v), c) in &other.terms {
            out.add_term(u.clone(), v.clone(), c.clone());
        }
        out
    }

    /// `(a ⊗ b) # c = a c b`.
    pub fn sharp_poly(&self, c: &NCPoly) -> Result<NCPoly> {
        ensure_same(&self.sys, c.system())?;
        let max_left = self.terms.keys().map(|(u, _)| u.degree()).max().unwrap_or(0);
        let max_right = self.terms.keys().map(|(_, v)| v.degree()).max().unwrap_or(0);
        self.sys.check_degree(max_left + c.degree() + max_right)?;
        Ok(self.sharp_poly_unchecked(c))
    }

    pub(crate) fn sharp_poly_unchecked(&self, c: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero(&self.sys);
        for ((a, b), k) in &self.terms {
            for (w, cw) in c.terms() {
                let kc = k * cw;
                for (aw, c1) in mul_words(&self.sys, a, w) {
                    for (awb, c2) in mul_words(&self.sys, &aw, b) {
                        out.add_term(awb, &kc * &c1 * c2);
                    }
                }
            }
        }
        out
    }

    /// `(a ⊗ b) # (c ⊗ d) = ac ⊗ db`, the multiplication of B<T> ⊗ B<T>°.
    pub fn sharp(&self, other: &TensorPoly) -> Result<TensorPoly> {
        ensure_same(&self.sys, &other.sys)?;
        let out = self.sharp_unchecked(other);
        for (u, v) in out.terms.keys() {
            self.sys.check_degree(u.degree().max(v.degree()))?;
        }
        Ok(out)
    }

    pub(crate) fn sharp_unchecked(&self, other: &TensorPoly) -> TensorPoly {
        let mut out = TensorPoly::zero(&self.sys);
        for ((a, b), k) in &self.terms {
            for ((c, d), l) in &other.terms {
                let kl = k * l;
                for (ac, c1) in mul_words(&self.sys, a, c) {
                    for (db, c2) in mul_words(&self.sys, d, b) {
                        out.add_term(ac.clone(), db, &kl * &c1 * c2);
                    }
                }
            }
        }
        out
    }

    /// Bimodule action `p · (a ⊗ b) · q = pa ⊗ bq`, which equals `(p ⊗ q) # (a ⊗ b)`.
    pub fn act(&self, p: &NCPoly, q: &NCPoly) -> Result<TensorPoly> {
        TensorPoly::elementary(p, q)?.sharp(self)
    }

    /// `(a ⊗ b)^* = a^* ⊗ b^*`, the involution of B<T> ⊗ B<T>°.
    pub fn adjoint(&self) -> TensorPoly {
        self.map_legs(|a, b| (a, b))
    }

    /// `(a ⊗ b)^† = b^* ⊗ a^*`, the leg-swapped adjoint; `∂_i(p^*) = ∂_{i*}(p)^†`.
    pub fn flip_adjoint(&self) -> TensorPoly {
        self.map_legs(|a, b| (b, a))
    }

    fn map_legs(&self, arrange: impl Fn(NCPoly, NCPoly) -> (NCPoly, NCPoly)) -> TensorPoly {
        let mut out = TensorPoly::zero(&self.sys);
        for ((a, b), k) in &self.terms {
            let pa = NCPoly::from_raw(&self.sys, [(a.clone(), Coeff::one())]).adjoint();
            let pb = NCPoly::from_raw(&self.sys, [(b.clone(), Coeff::one())]).adjoint();
            let (l, r) = arrange(pa, pb);
            let kc = k.conj();
            for (u, cu) in l.terms() {
                for (v, cv) in r.terms() {
                    out.add_term(u.clone(), v.clone(), &kc * cu * cv);
                }
            }
        }
        out
    }

    /// Largest left-leg plus right-leg degree.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|(u, v)| u.degree() + v.degree())
            .max()
            .unwrap_or(0)
    }
}
