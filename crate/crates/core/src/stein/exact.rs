//! Exact free Stein dimension in finite-dimensional models.
//!
//! In a finite-dimensional M every linear functional is bounded, so a row `A_i` lies in the
//! domain of the adjoint exactly when `⟨A_i, ev ∂r⟩ = 0` for every polynomial `r` with
//! `ev r = 0`. The closure of that domain is therefore the orthogonal complement of
//! `K = span{ev ∂r : ev r = 0}` (one copy per row), and
//! `Σ*² = Σ_i ‖proj_K δ_i‖²` where `δ_i` is the i-th row of 𝟙.
//!
//! `K` is a left `M ⊗ M°`-module, because `ev ∂(u r v) = (u ⊗ v) # ev ∂r` when `ev r = 0`.
//! The level-`d` truncation spans `(u ⊗ v) # ev ∂r` over relations of degree at most `d + 1`
//! and multipliers `u, v` from the evaluated monomials of degree at most `d`; it grows with
//! `d`, so σ is nonincreasing along the trail.

use nalgebra::{DMatrix, DVector};

use super::basis::monomials;
use super::report::{SigmaMode, SigmaReport};
use crate::error::{Error, Result};
use crate::linalg::{null_space, range_basis, range_basis_with_condition};
use crate::ncalg::{Letter, Word};
use crate::trace::{MatrixModel, TraceModel, C64};

type Blocks = Vec<DMatrix<C64>>;

/// Orthonormal coordinates on `L²(M)` for `M = ⊕ M_{k_i}` with trace `Σ λ_i tr_{k_i}`:
/// entry `(p, q)` of block `i` is scaled by `sqrt(λ_i / k_i)`.
struct Coordinates<'a> {
    model: &'a MatrixModel,
    scales: Vec<f64>,
    offsets: Vec<usize>,
    dim: usize,
}

impl<'a> Coordinates<'a> {
    fn new(model: &'a MatrixModel) -> Self {
        let mut offsets = Vec::new();
        let mut dim = 0;
        let mut scales = Vec::new();
        for b in model.blocks() {
            offsets.push(dim);
            dim += b.size * b.size;
            scales.push((b.weight / b.size as f64).sqrt());
        }
        Coordinates {
            model,
            scales,
            offsets,
            dim,
        }
    }

    fn eval(&self, w: &Word) -> Blocks {
        (0..self.scales.len())
            .map(|i| self.model.word_matrix(w, i))
            .collect()
    }

    fn coords(&self, x: &[DMatrix<C64>]) -> DVector<C64> {
        let mut v = DVector::zeros(self.dim);
        for (i, m) in x.iter().enumerate() {
            let k = m.nrows();
            for p in 0..k {
                for q in 0..k {
                    v[self.offsets[i] + p * k + q] = m[(p, q)] * self.scales[i];
                }
            }
        }
        v
    }

    fn element(&self, v: &DVector<C64>) -> Blocks {
        self.model
            .blocks()
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let k = b.size;
                DMatrix::from_fn(k, k, |p, q| v[self.offsets[i] + p * k + q] / self.scales[i])
            })
            .collect()
    }
}

fn mul(a: &[DMatrix<C64>], b: &[DMatrix<C64>]) -> Blocks {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// One split of a relation word at an occurrence of `t_j`.
struct Split {
    generator: usize,
    coeff: C64,
    left: Blocks,
    right: Blocks,
}

/// `(Σ*², condition)` at truncation level `d` for a matrix model.
pub fn squared_irregularity_fd(m: &MatrixModel, d: usize) -> Result<(f64, f64)> {
    let sys = m.system();
    sys.check_degree(d + 1)?;
    let n = sys.n();
    let coords = Coordinates::new(m);
    let dim = coords.dim;
    let words = monomials(sys, 0, d + 1);
    let evals: Vec<Blocks> = words.iter().map(|w| coords.eval(w)).collect();
    let evaluation = DMatrix::from_fn(dim, words.len(), |r, c| coords.coords(&evals[c])[r]);
    let relations = null_space(&evaluation);

    let low: Vec<usize> = (0..words.len()).filter(|&k| words[k].degree() <= d).collect();
    let low_eval = DMatrix::from_fn(dim, low.len(), |r, c| evaluation[(r, low[c])]);
    let mult_basis = range_basis(&low_eval);
    let multipliers: Vec<Blocks> = (0..mult_basis.ncols())
        .map(|c| coords.element(&mult_basis.column(c).into_owned()))
        .collect();

    let row_dim = n * dim * dim;
    let mut generators: Vec<DVector<C64>> = Vec::new();
    for rel in 0..relations.ncols() {
        let col = relations.column(rel);
        let scale = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut splits = Vec::new();
        for (k, w) in words.iter().enumerate() {
            let c = col[k];
            if c.norm() <= 1e-14 * scale {
                continue;
            }
            for (pos, l) in w.letters().iter().enumerate() {
                if let Letter::T(j) = *l {
                    splits.push(Split {
                        generator: j,
                        coeff: c,
                        left: coords.eval(&w.slice(0..pos)),
                        right: coords.eval(&w.slice(pos + 1..w.len())),
                    });
                }
            }
        }
        for u in &multipliers {
            for v in &multipliers {
                let mut vec = DVector::<C64>::zeros(row_dim);
                let mut mag = 0.0;
                for s in &splits {
                    let l = coords.coords(&mul(u, &s.left));
                    let r = coords.coords(&mul(&s.right, v));
                    mag += s.coeff.norm() * l.norm() * r.norm();
                    let kron = l.kronecker(&r) * s.coeff;
                    let off = s.generator * dim * dim;
                    let mut seg = vec.rows_mut(off, dim * dim);
                    seg += kron;
                }
                // Scaling by the size of the summands (not of the sum) evens out high-degree
                // relations without inflating columns that cancel to zero.
                if mag > 0.0 {
                    vec /= C64::new(mag, 0.0);
                }
                generators.push(vec);
            }
        }
    }
    if generators.is_empty() {
        return Ok((0.0, 1.0));
    }
    let stack = DMatrix::from_columns(&generators);
    let (q, cond) = range_basis_with_condition(&stack);
    let one = coords.coords(&coords.eval(&Word::empty()));
    let unit = one.kronecker(&one);
    let mut total = 0.0;
    for i in 0..n {
        let mut delta = DVector::<C64>::zeros(row_dim);
        delta.rows_mut(i * dim * dim, dim * dim).copy_from(&unit);
        total += (q.adjoint() * delta).norm_squared();
    }
    Ok((total, cond))
}

/// Exact σ for a matrix model, with the trail over `1..=d`.
pub fn sigma_exact_fd(m: &MatrixModel, d: usize) -> Result<SigmaReport> {
    sigma_exact(m, d)
}

/// Exact σ for a matrix model or a free product of such.
///
/// For free factors the relation module of the product is generated by the factors' relation
/// modules, so its projection is block diagonal and `Σ*²` is the sum over factors.
pub fn sigma_exact(m: &dyn TraceModel, d: usize) -> Result<SigmaReport> {
    if d == 0 {
        return Err(Error::spec("d", "must be at least 1"));
    }
    let n = m.system().n();
    let mut trail = Vec::with_capacity(d);
    let mut last = (0.0, 1.0);
    for level in 1..=d {
        last = exact_sqr(m, level)?;
        trail.push((level, n as f64 - last.0));
    }
    Ok(SigmaReport {
        schema: (),
        n,
        sigma: n as f64 - last.0,
        irregularity: last.0.max(0.0).sqrt(),
        mode: SigmaMode::ExactFd,
        scheme: None,
        trail,
        gram_condition: last.1,
        gram_rank: 0,
        xi: None,
    })
}

fn exact_sqr(m: &dyn TraceModel, d: usize) -> Result<(f64, f64)> {
    if let Some(mm) = m.as_matrix() {
        return squared_irregularity_fd(mm, d);
    }
    if let Some(fp) = m.as_free_product() {
        let mut total = 0.0;
        let mut cond: f64 = 1.0;
        for f in fp.factors() {
            let (s, c) = exact_sqr(f.as_ref(), d)?;
            total += s;
            cond = cond.max(c);
        }
        return Ok((total, cond));
    }
    Err(Error::spec(
        "model",
        format!(
            "exact mode needs a matrix model or a free product of matrix models, got `{}`",
            m.kind()
        ),
    ))
}
