use nalgebra::{DMatrix, DVector};
use num_traits::One;
use rayon::prelude::*;
use std::sync::Arc;

use super::{DegreeScheme, Pairing};
use crate::error::Result;
use crate::linalg::Projector;
use crate::ncalg::calculus::diff_word;
use crate::ncalg::coeff::{self, Coeff};
use crate::ncalg::{diff_quotient, GeneratorSystem, KernelMatrix, Letter, NCPoly, Word};
use crate::trace::{TraceModel, C64};

/// Monomials with indeterminate degree in `lo..=hi`. Over a nontrivial B every gap between
/// indeterminates (and both ends) carries either nothing or one non-unit basis element of B.
pub fn monomials(sys: &GeneratorSystem, lo: usize, hi: usize) -> Vec<Word> {
    let skeletons = Word::all_up_to(sys.n(), lo, hi);
    let Some(b) = sys.b() else {
        return skeletons;
    };
    let fillers: Vec<Option<usize>> = std::iter::once(None)
        .chain((0..b.dim()).filter(|&k| k != b.unit()).map(Some))
        .collect();
    let mut out = Vec::new();
    for sk in skeletons {
        let idx: Vec<usize> = sk.indices().collect();
        let slots = idx.len() + 1;
        let mut choice = vec![0usize; slots];
        loop {
            let mut letters = Vec::with_capacity(2 * slots);
            for (s, c) in choice.iter().enumerate() {
                if let Some(k) = fillers[*c] {
                    letters.push(Letter::B(k));
                }
                if s < idx.len() {
                    letters.push(Letter::T(idx[s]));
                }
            }
            out.push(Word::from_canonical(letters));
            let mut pos = 0;
            while pos < slots {
                choice[pos] += 1;
                if choice[pos] < fillers.len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos == slots {
                break;
            }
        }
    }
    out.sort();
    out
}

/// The Jacobian of the tuple carrying `poly` in `slot` and zero elsewhere. `poly` is `word`
/// itself, or `word` evaluated at shifted generators when the basis is centered.
#[derive(Debug, Clone)]
pub struct BasisElement {
    pub slot: usize,
    pub word: Word,
    pub poly: NCPoly,
    pub kernel: KernelMatrix,
}

/// One element per (slot, monomial of degree 1..=d_proj). Degree-0 monomials have zero
/// Jacobian and are left out.
pub fn jacobian_basis(m: &dyn TraceModel, scheme: &DegreeScheme) -> Result<Vec<BasisElement>> {
    let sys = m.system();
    scheme.validate(sys)?;
    Ok(basis_up_to(sys, scheme.d_proj))
}

pub(crate) fn basis_up_to(sys: &Arc<GeneratorSystem>, d_proj: usize) -> Vec<BasisElement> {
    let n = sys.n();
    let words = monomials(sys, 1, d_proj);
    let mut out = Vec::with_capacity(n * words.len());
    for slot in 0..n {
        for w in &words {
            let mut k = KernelMatrix::zero(sys, n);
            for j in 0..n {
                k.set(slot, j, diff_word(j, w, sys));
            }
            out.push(BasisElement {
                slot,
                word: w.clone(),
                poly: NCPoly::monomial(sys, w.clone(), Coeff::one()).expect("word fits the system"),
                kernel: k,
            });
        }
    }
    out
}

/// Like [`jacobian_basis`], but in the generators shifted by (a dyadic rounding of) their
/// means. The span is the same; the Gram is far better conditioned when the spectrum sits
/// away from the origin. Systems carrying a nontrivial B keep the plain basis.
pub fn centered_basis(m: &dyn TraceModel, scheme: &DegreeScheme) -> Result<Vec<BasisElement>> {
    let sys = m.system();
    scheme.validate(sys)?;
    if sys.b().is_some() {
        return Ok(basis_up_to(sys, scheme.d_proj));
    }
    let pairing = Pairing::new(m);
    let n = sys.n();
    let mut shifts = Vec::with_capacity(n);
    for i in 0..n {
        let mean = pairing.pair(&Word::t(i), &Word::empty())?;
        let round = |x: f64| (x * 1024.0).round() / 1024.0;
        shifts.push(C64::new(round(mean.re), round(mean.im)));
    }
    if shifts.iter().all(|c| c.norm() == 0.0) {
        return Ok(basis_up_to(sys, scheme.d_proj));
    }
    let shifted: Vec<NCPoly> = NCPoly::generators(sys)
        .into_iter()
        .zip(&shifts)
        .map(|(x, c)| x.sub(&NCPoly::scalar(sys, coeff::from_c64(*c)?)))
        .collect::<Result<_>>()?;
    let words = monomials(sys, 1, scheme.d_proj);
    let polys = words
        .par_iter()
        .map(|w| {
            w.indices()
                .try_fold(NCPoly::one(sys), |acc, i| acc.mul(&shifted[i]))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(n * words.len());
    for slot in 0..n {
        for (w, p) in words.iter().zip(&polys) {
            let mut k = KernelMatrix::zero(sys, n);
            for j in 0..n {
                k.set(slot, j, diff_quotient(j, p)?);
            }
            out.push(BasisElement {
                slot,
                word: w.clone(),
                poly: p.clone(),
                kernel: k,
            });
        }
    }
    Ok(out)
}

/// The truncated projection Π onto the span of a Jacobian basis.
pub struct GramSystem<'m> {
    pairing: Pairing<'m>,
    basis: Vec<BasisElement>,
    gram: DMatrix<C64>,
    projector: Projector,
}

impl<'m> GramSystem<'m> {
    pub fn new(m: &'m dyn TraceModel, scheme: &DegreeScheme) -> Result<Self> {
        let basis = centered_basis(m, scheme)?;
        Self::from_basis(Pairing::new(m), basis)
    }

    pub fn from_basis(pairing: Pairing<'m>, basis: Vec<BasisElement>) -> Result<Self> {
        let gram = hermitian_gram(&pairing, &basis)?;
        let projector = Projector::new(&gram);
        Ok(GramSystem {
            pairing,
            basis,
            gram,
            projector,
        })
    }

    pub fn pairing(&self) -> &Pairing<'m> {
        &self.pairing
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    /// `r_a = ⟨Y, J_a⟩_HS`.
    pub fn rhs(&self, target: &KernelMatrix) -> Result<DVector<C64>> {
        let vals = self
            .basis
            .par_iter()
            .map(|b| self.pairing.hs(target, &b.kernel))
            .collect::<Result<Vec<_>>>()?;
        Ok(DVector::from_vec(vals))
    }

    /// Orthonormal coordinates of `Π(target)`.
    pub fn coords(&self, target: &KernelMatrix) -> Result<DVector<C64>> {
        Ok(self.projector.coords(&self.rhs(target)?))
    }

    /// `‖Π(target)‖²_HS`.
    pub fn projected_norm_sqr(&self, target: &KernelMatrix) -> Result<f64> {
        Ok(self.coords(target)?.norm_squared())
    }
}

/// Upper triangle computed in parallel (one task per row), then mirrored.
fn hermitian_gram(p: &Pairing<'_>, basis: &[BasisElement]) -> Result<DMatrix<C64>> {
    let n = basis.len();
    let rows = (0..n)
        .into_par_iter()
        .map(|a| {
            (a..n)
                .map(|b| {
                    if basis[a].slot != basis[b].slot {
                        Ok(C64::new(0.0, 0.0))
                    } else {
                        p.hs(&basis[a].kernel, &basis[b].kernel)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut g = DMatrix::<C64>::zeros(n, n);
    for (a, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let b = a + off;
            g[(b, a)] = v;
            g[(a, b)] = v.conj();
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::SemicircularModel;

    #[test]
    fn basis_counts_and_identity() {
        let m = SemicircularModel::new(2, 12);
        let b = jacobian_basis(&m, &DegreeScheme::new(0, 1)).unwrap();
        assert_eq!(b.len(), 4);
        let one = KernelMatrix::identity(m.system());
        let sum = b
            .iter()
            .filter(|e| e.word == Word::t(e.slot))
            .fold(KernelMatrix::zero(m.system(), 2), |acc, e| acc.add(&e.kernel).unwrap());
        assert_eq!(sum, one);
    }

    #[test]
    fn gram_is_hermitian_and_positive() {
        let m = SemicircularModel::new(2, 12);
        let g = GramSystem::new(&m, &DegreeScheme::new(1, 3)).unwrap();
        let gram = g.gram();
        assert!((gram - gram.adjoint()).norm() < 1e-12);
        assert!(g.projector().min_eigenvalue() >= -1e-9 * g.projector().lambda_max());
    }
}
