use std::sync::Arc;

use super::coeff::Coeff;
use super::poly::NCPoly;
use super::system::{ensure_same, GeneratorSystem};
use super::tensor::TensorPoly;
use crate::error::{Error, Result};

/// A square matrix of tensors; entry `(i, j)` sits at `entries[i * size + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    size: usize,
    entries: Vec<TensorPoly>,
}

impl KernelMatrix {
    pub fn zero(sys: &Arc<GeneratorSystem>, size: usize) -> Self {
        KernelMatrix {
            size,
            entries: vec![TensorPoly::zero(sys); size * size],
        }
    }

    /// The identity kernel with `1 ⊗ 1` on the diagonal, sized by the number of generators.
    pub fn identity(sys: &Arc<GeneratorSystem>) -> Self {
        let n = sys.n();
        let mut k = KernelMatrix::zero(sys, n);
        for i in 0..n {
            k.entries[i * n + i] = TensorPoly::unit(sys);
        }
        k
    }

    pub fn from_entries(size: usize, entries: Vec<TensorPoly>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::Structural(format!(
                "expected {} entries for a {size}x{size} kernel, got {}",
                size * size,
                entries.len()
            )));
        }
        if let Some(first) = entries.first() {
            for e in &entries[1..] {
                ensure_same(first.system(), e.system())?;
            }
        }
        Ok(KernelMatrix { size, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &TensorPoly {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, t: TensorPoly) {
        self.entries[i * self.size + j] = t;
    }

    pub fn entries(&self) -> &[TensorPoly] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[TensorPoly] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TensorPoly::is_zero)
    }

    fn check_size(&self, other: &KernelMatrix) -> Result<()> {
        if self.size != other.size {
            return Err(Error::Structural(format!(
                "kernel sizes differ: {} vs {}",
                self.size, other.size
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &KernelMatrix) -> Result<KernelMatrix> {
        self.check_size(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(KernelMatrix {
            size: self.size,
            entries,
        })
    }

    pub fn sub(&self, other: &KernelMatrix) -> Result<KernelMatrix> {
        self.add(&other.scale(&-<Coeff as num_traits::One>::one()))
    }

    pub fn scale(&self, c: &Coeff) -> KernelMatrix {
        KernelMatrix {
            size: self.size,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    /// `(A # P)_i = Σ_j A_ij # p_j`.
    pub fn sharp_tuple(&self, p: &[NCPoly]) -> Result<Vec<NCPoly>> {
        if p.len() != self.size {
            return Err(Error::Structural(format!(
                "tuple of length {} against a {}x{} kernel",
                p.len(),
                self.size,
                self.size
            )));
        }
        (0..self.size)
            .map(|i| {
                let mut acc: Option<NCPoly> = None;
                for (j, pj) in p.iter().enumerate() {
                    let term = self.get(i, j).sharp_poly(pj)?;
                    acc = Some(match acc {
                        Some(a) => a.add(&term)?,
                        None => term,
                    });
                }
                Ok(acc.unwrap_or_else(|| NCPoly::zero(p[0].system())))
            })
            .collect()
    }

    /// `(A # B)_ij = Σ_k A_ik # B_kj`.
    pub fn sharp(&self, other: &KernelMatrix) -> Result<KernelMatrix> {
        self.check_size(other)?;
        let n = self.size;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = TensorPoly::zero(self.get(i, j).system());
                for k in 0..n {
                    acc = acc.add(&self.get(i, k).sharp(other.get(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Ok(KernelMatrix { size: n, entries })
    }

    /// Matrix adjoint: transpose with the tensor involution applied entrywise.
    pub fn adjoint(&self) -> KernelMatrix {
        let n = self.size;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.get(j, i).adjoint());
            }
        }
        KernelMatrix { size: n, entries }
    }
}
