//! Free difference quotients, Jacobians and the kernel constructions built from them.

use num_traits::One;

use super::coeff::{self, Coeff};
use super::kernel::KernelMatrix;
use super::poly::NCPoly;
use super::system::ensure_same;
use super::tensor::TensorPoly;
use super::word::{Letter, Word};
use crate::error::{Error, Result};

/// `∂_i` for a zero-based generator index `i`: splits each word at every occurrence of `t_i`.
pub fn diff_quotient(i: usize, p: &NCPoly) -> Result<TensorPoly> {
    let sys = p.system();
    if i >= sys.n() {
        return Err(Error::UnknownLetter(format!("t{}", i + 1)));
    }
    let mut out = TensorPoly::zero(sys);
    for (w, c) in p.terms() {
        diff_word_into(i, w, c, &mut out);
    }
    Ok(out)
}

fn diff_word_into(i: usize, w: &Word, c: &Coeff, out: &mut TensorPoly) {
    let letters = w.letters();
    for (k, l) in letters.iter().enumerate() {
        if *l == Letter::T(i) {
            out.add_term(
                Word::from_canonical(letters[..k].to_vec()),
                Word::from_canonical(letters[k + 1..].to_vec()),
                c.clone(),
            );
        }
    }
}

/// `∂_i` of a single word with unit coefficient.
pub fn diff_word(i: usize, w: &Word, sys: &std::sync::Arc<super::GeneratorSystem>) -> TensorPoly {
    let mut out = TensorPoly::zero(sys);
    diff_word_into(i, w, &Coeff::one(), &mut out);
    out
}

/// `[𝒥P]_ij = ∂_j p_i`; the tuple must have one entry per generator.
pub fn jacobian(p: &[NCPoly]) -> Result<KernelMatrix> {
    let Some(first) = p.first() else {
        return Err(Error::Structural("empty tuple".into()));
    };
    let sys = first.system();
    let n = sys.n();
    if p.len() != n {
        return Err(Error::Structural(format!(
            "tuple of length {} over {n} generators",
            p.len()
        )));
    }
    let mut entries = Vec::with_capacity(n * n);
    for pi in p {
        ensure_same(sys, pi.system())?;
        for j in 0..n {
            entries.push(diff_quotient(j, pi)?);
        }
    }
    KernelMatrix::from_entries(n, entries)
}

/// `[A]_ij = ½ (ξ_i ⊗ 1 − 1 ⊗ ξ_i) # (x_j ⊗ 1 − 1 ⊗ x_j)`.
pub fn mai_kernel(xi: &[NCPoly], x: &[NCPoly]) -> Result<KernelMatrix> {
    if xi.len() != x.len() || xi.is_empty() {
        return Err(Error::Structural(format!(
            "tuples of lengths {} and {}",
            xi.len(),
            x.len()
        )));
    }
    let sys = x[0].system();
    let one = NCPoly::one(sys);
    let commutator = |p: &NCPoly| -> Result<TensorPoly> {
        TensorPoly::elementary(p, &one)?.sub(&TensorPoly::elementary(&one, p)?)
    };
    let half = coeff::half();
    let xs = x.iter().map(commutator).collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::with_capacity(x.len() * x.len());
    for xi_i in xi {
        let left = commutator(xi_i)?;
        for xj in &xs {
            entries.push(left.sharp(xj)?.scale(&half));
        }
    }
    KernelMatrix::from_entries(x.len(), entries)
}

/// `a # 𝒥(F)^*`: component `k` is `Σ_i a_i # (∂_i f_k)^*`.
pub fn transform_kernel(a: &[TensorPoly], f: &[NCPoly]) -> Result<Vec<TensorPoly>> {
    let Some(first) = a.first() else {
        return Err(Error::Structural("empty kernel row".into()));
    };
    let sys = first.system();
    if a.len() != sys.n() {
        return Err(Error::Structural(format!(
            "kernel row of length {} over {} generators",
            a.len(),
            sys.n()
        )));
    }
    f.iter()
        .map(|fk| {
            let mut acc = TensorPoly::zero(sys);
            for (i, ai) in a.iter().enumerate() {
                let d = diff_quotient(i, fk)?.adjoint();
                acc = acc.add(&ai.sharp(&d)?)?;
            }
            Ok(acc)
        })
        .collect()
}
