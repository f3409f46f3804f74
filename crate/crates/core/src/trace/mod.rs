//! Tracial states on concrete generators and the inner products they induce.

pub mod free_product;
pub mod matrix;
pub mod measure;
pub mod registry;
pub mod semicircular;

use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt::Debug;
use std::sync::Arc;

use parking_lot::RwLock;

use crate::error::{Error, Result};
use crate::ncalg::coeff;
use crate::ncalg::word::mul_words;
use crate::ncalg::{GeneratorSystem, KernelMatrix, Letter, NCPoly, TensorPoly, Word};

pub use free_product::FreeProductModel;
pub use matrix::{Block, MatrixModel};
pub use measure::{Density, MeasureModel};
pub use registry::{load_model, load_model_file, ModelLoader, ModelRegistry};
pub use semicircular::SemicircularModel;

pub type C64 = Complex64;

/// An evaluated tracial state on the words of a generator system.
pub trait TraceModel: Send + Sync + Debug {
    /// The registry name of the model family.
    fn kind(&self) -> &'static str;

    fn system(&self) -> &Arc<GeneratorSystem>;

    /// τ(w) for a canonical word. Implementations validate letters and the degree limit.
    fn trace_word(&self, w: &Word) -> Result<C64>;

    /// Largest word degree `trace_word` accepts.
    fn degree_limit(&self) -> usize {
        2 * self.system().cap()
    }

    fn as_matrix(&self) -> Option<&MatrixModel> {
        None
    }

    fn as_measure(&self) -> Option<&MeasureModel> {
        None
    }

    fn as_free_product(&self) -> Option<&FreeProductModel> {
        None
    }
}

/// Checks that every letter of `w` exists in `sys` and that the degree is within `limit`.
pub(crate) fn check_word(sys: &GeneratorSystem, w: &Word, limit: usize) -> Result<()> {
    for l in w.letters() {
        match *l {
            Letter::T(i) if i >= sys.n() => return Err(Error::UnknownLetter(format!("t{}", i + 1))),
            Letter::B(k) if k >= sys.b_dim() => return Err(Error::UnknownLetter(format!("b{k}"))),
            _ => {}
        }
    }
    let d = w.degree();
    if d > limit {
        return Err(Error::DegreeCap {
            degree: d,
            cap: limit,
        });
    }
    Ok(())
}

/// Append-only memo table shared across threads.
#[derive(Debug, Default)]
pub(crate) struct TraceCache {
    map: RwLock<HashMap<Word, C64>>,
}

impl TraceCache {
    pub fn get_or_try(&self, w: &Word, eval: impl FnOnce() -> Result<C64>) -> Result<C64> {
        if let Some(v) = self.map.read().get(w) {
            return Ok(*v);
        }
        let v = eval()?;
        self.map.write().insert(w.clone(), v);
        Ok(v)
    }
}

/// Numeric expansion of `w^*` as a combination of canonical words.
pub fn word_adjoint(sys: &Arc<GeneratorSystem>, w: &Word) -> Vec<(Word, C64)> {
    if sys.b().is_none() {
        let letters: Vec<usize> = w.indices().collect();
        let rev: Vec<usize> = letters.iter().rev().map(|&i| sys.star(i)).collect();
        return vec![(Word::from_indices(&rev), C64::new(1.0, 0.0))];
    }
    let p = NCPoly::monomial(sys, w.clone(), num_traits::One::one())
        .unwrap_or_else(|_| NCPoly::zero(sys))
        .adjoint();
    p.terms().map(|(u, c)| (u.clone(), coeff::to_c64(c))).collect()
}

/// `τ(c^* a)`, the L² pairing of two words.
pub fn pair_trace(m: &dyn TraceModel, a: &Word, c: &Word) -> Result<C64> {
    let sys = m.system();
    let mut acc = C64::new(0.0, 0.0);
    for (cs, gamma) in word_adjoint(sys, c) {
        for (w, delta) in mul_words(sys, &cs, a) {
            acc += gamma * coeff::to_c64(&delta) * m.trace_word(&w)?;
        }
    }
    Ok(acc)
}

/// τ applied linearly to a polynomial.
pub fn trace_poly(m: &dyn TraceModel, p: &NCPoly) -> Result<C64> {
    p.terms()
        .map(|(w, c)| Ok(coeff::to_c64(c) * m.trace_word(w)?))
        .sum()
}

/// `⟨p, q⟩ = τ(q^* p)`.
pub fn inner_l2(m: &dyn TraceModel, p: &NCPoly, q: &NCPoly) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for (a, ca) in p.terms() {
        for (c, cc) in q.terms() {
            acc += coeff::to_c64(ca) * coeff::to_c64(cc).conj() * pair_trace(m, a, c)?;
        }
    }
    Ok(acc)
}

/// `⟨a ⊗ b, c ⊗ d⟩ = τ(c^* a) τ(b d^*)`, extended sesquilinearly.
pub fn inner_tensor(m: &dyn TraceModel, u: &TensorPoly, v: &TensorPoly) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for (a, b, cu) in u.terms() {
        for (c, d, cv) in v.terms() {
            let left = pair_trace(m, a, c)?;
            if left == C64::new(0.0, 0.0) {
                continue;
            }
            acc += coeff::to_c64(cu) * coeff::to_c64(cv).conj() * left * pair_trace(m, b, d)?;
        }
    }
    Ok(acc)
}

/// `⟨A, B⟩_HS = Σ_jk ⟨A_jk, B_jk⟩`.
pub fn inner_hs(m: &dyn TraceModel, a: &KernelMatrix, b: &KernelMatrix) -> Result<C64> {
    if a.size() != b.size() {
        return Err(Error::Structural(format!(
            "kernel sizes differ: {} vs {}",
            a.size(),
            b.size()
        )));
    }
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| inner_tensor(m, x, y))
        .sum()
}
