use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::Value;
use std::sync::Arc;

use super::registry::{field, opt_field, parse_matrix, parse_real};
use super::{check_word, TraceCache, TraceModel, C64};
use crate::error::{Error, Result};
use crate::linalg::ThinSvd;
use crate::ncalg::coeff::{self, Coeff};
use crate::ncalg::system::BCombination;
use crate::ncalg::{BAlgebra, GeneratorSystem, Letter, Word};

const ADJOINT_TOL: f64 = 1e-10;
const STRUCTURE_TOL: f64 = 1e-9;

/// One summand `(M_k(C), λ tr_k)` of a finite-dimensional algebra.
#[derive(Debug, Clone)]
pub struct Block {
    pub size: usize,
    pub weight: f64,
    /// The weight as an exact rational when it was given as one.
    pub exact_weight: Option<BigRational>,
}

/// A block-diagonal matrix algebra with trace `Σ_i λ_i/k_i Tr(block_i)`.
#[derive(Debug)]
pub struct MatrixModel {
    sys: Arc<GeneratorSystem>,
    blocks: Vec<Block>,
    gens: Vec<Vec<DMatrix<C64>>>,
    b_elems: Vec<Vec<DMatrix<C64>>>,
    cache: TraceCache,
}

fn block_diag_equal(a: &[DMatrix<C64>], b: &[DMatrix<C64>], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).iter().all(|z| z.norm() <= tol))
}

fn adjoint_all(a: &[DMatrix<C64>]) -> Vec<DMatrix<C64>> {
    a.iter().map(|m| m.adjoint()).collect()
}

impl MatrixModel {
    /// `gens[g][block]` is generator `g` in the given block. Without an explicit pairing the
    /// star structure is read off the matrices. `b`, when present, lists a basis of B in the
    /// same layout and must contain the identity.
    pub fn new(
        blocks: Vec<Block>,
        gens: Vec<Vec<DMatrix<C64>>>,
        pairing: Option<Vec<usize>>,
        b: Option<Vec<Vec<DMatrix<C64>>>>,
        cap: usize,
    ) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::spec("blocks", "at least one block is required"));
        }
        if let Some(bad) = blocks.iter().position(|b| b.size == 0 || !(b.weight > 0.0)) {
            return Err(Error::spec(
                format!("blocks[{bad}]"),
                "sizes and weights must be positive",
            ));
        }
        let total: f64 = blocks.iter().map(|b| b.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::spec("blocks", format!("weights sum to {total}, not 1")));
        }
        let check_layout = |name: &str, mats: &[Vec<DMatrix<C64>>]| -> Result<()> {
            for (g, per_block) in mats.iter().enumerate() {
                if per_block.len() != blocks.len() {
                    return Err(Error::spec(
                        format!("{name}[{g}]"),
                        format!("expected {} blocks, got {}", blocks.len(), per_block.len()),
                    ));
                }
                for (k, (m, blk)) in per_block.iter().zip(&blocks).enumerate() {
                    if m.nrows() != blk.size || m.ncols() != blk.size {
                        return Err(Error::spec(
                            format!("{name}[{g}][{k}]"),
                            format!("expected a {0}x{0} matrix", blk.size),
                        ));
                    }
                }
            }
            Ok(())
        };
        check_layout("generators", &gens)?;
        let n = gens.len();
        let pairing = match pairing {
            Some(p) => {
                if p.len() != n {
                    return Err(Error::spec("star", "one entry per generator is required"));
                }
                for (i, &j) in p.iter().enumerate() {
                    if j >= n || !block_diag_equal(&adjoint_all(&gens[i]), &gens[j], ADJOINT_TOL) {
                        return Err(Error::spec(
                            format!("star[{i}]"),
                            "matrix adjoint does not match the paired generator",
                        ));
                    }
                }
                p
            }
            None => (0..n)
                .map(|i| {
                    let adj = adjoint_all(&gens[i]);
                    std::iter::once(i)
                        .chain(0..n)
                        .find(|&j| block_diag_equal(&adj, &gens[j], ADJOINT_TOL))
                        .ok_or_else(|| {
                            Error::spec(
                                format!("generators[{i}]"),
                                "adjoint is not among the generators; supply a star pairing",
                            )
                        })
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let mut sys = GeneratorSystem::with_pairing(pairing)?.with_cap(cap);
        let b_elems = match b {
            Some(elems) if !elems.is_empty() => {
                check_layout("b", &elems)?;
                let alg = structure_constants(&blocks, &elems)?;
                sys = sys.with_b(alg);
                elems
            }
            _ => Vec::new(),
        };
        Ok(MatrixModel {
            sys: Arc::new(sys),
            blocks,
            gens,
            b_elems,
            cache: TraceCache::default(),
        })
    }

    /// Diagonal model: one 1x1 block per atom with generator values `values[g][block]`.
    pub fn diagonal(weights: &[f64], values: &[Vec<f64>], cap: usize) -> Result<Self> {
        let blocks = weights
            .iter()
            .map(|&w| Block {
                size: 1,
                weight: w,
                exact_weight: None,
            })
            .collect();
        let gens = values
            .iter()
            .map(|vals| {
                vals.iter()
                    .map(|&v| DMatrix::from_element(1, 1, C64::new(v, 0.0)))
                    .collect()
            })
            .collect();
        MatrixModel::new(blocks, gens, None, None, cap)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn generator(&self, g: usize, block: usize) -> &DMatrix<C64> {
        &self.gens[g][block]
    }

    /// Basis elements of B (empty when B = C), including the unit.
    pub fn b_elements(&self) -> &[Vec<DMatrix<C64>>] {
        &self.b_elems
    }

    /// The matrix of `w` in a block.
    pub fn word_matrix(&self, w: &Word, block: usize) -> DMatrix<C64> {
        let k = self.blocks[block].size;
        let mut acc = DMatrix::<C64>::identity(k, k);
        for l in w.letters() {
            let m = match *l {
                Letter::T(i) => &self.gens[i][block],
                Letter::B(b) => &self.b_elems[b][block],
            };
            acc = &acc * m;
        }
        acc
    }

    fn evaluate(&self, w: &Word) -> C64 {
        self.blocks
            .iter()
            .enumerate()
            .map(|(i, blk)| self.word_matrix(w, i).trace() * (blk.weight / blk.size as f64))
            .sum()
    }

    pub fn from_json(v: &Value, cap: usize) -> Result<Self> {
        let blocks_v = field(v, "blocks")?
            .as_array()
            .ok_or_else(|| Error::spec("blocks", "expected an array"))?;
        let blocks = blocks_v
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let size = field(b, "size")?
                    .as_u64()
                    .ok_or_else(|| Error::spec(format!("blocks[{i}].size"), "expected a positive integer"))?
                    as usize;
                let (weight, exact_weight) = parse_real(field(b, "weight")?, &format!("blocks[{i}].weight"))?;
                Ok(Block {
                    size,
                    weight,
                    exact_weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let parse_list = |name: &str, v: &Value| -> Result<Vec<Vec<DMatrix<C64>>>> {
            let outer = v
                .as_array()
                .ok_or_else(|| Error::spec(name, "expected an array of per-block matrix lists"))?;
            outer
                .iter()
                .enumerate()
                .map(|(g, per)| {
                    per.as_array()
                        .ok_or_else(|| Error::spec(format!("{name}[{g}]"), "expected one matrix per block"))?
                        .iter()
                        .enumerate()
                        .map(|(k, m)| parse_matrix(m, &format!("{name}[{g}][{k}]")))
                        .collect()
                })
                .collect()
        };
        let gens = parse_list("generators", field(v, "generators")?)?;
        if gens.is_empty() {
            return Err(Error::spec("generators", "at least one generator is required"));
        }
        let pairing = opt_field(v, "star")
            .map(|s| {
                s.as_array()
                    .ok_or_else(|| Error::spec("star", "expected an array of 1-based indices"))?
                    .iter()
                    .map(|x| match x.as_u64() {
                        Some(j) if j >= 1 => Ok(j as usize - 1),
                        _ => Err(Error::spec("star", "expected 1-based generator indices")),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let b = opt_field(v, "b").map(|b| parse_list("b", b)).transpose()?;
        MatrixModel::new(blocks, gens, pairing, b, cap)
    }
}

/// Derives exact structure constants of the span of `elems`, which must be a unital *-algebra.
fn structure_constants(blocks: &[Block], elems: &[Vec<DMatrix<C64>>]) -> Result<BAlgebra> {
    let dim = elems.len();
    let flat = |per: &[DMatrix<C64>]| -> Vec<C64> {
        per.iter()
            .zip(blocks)
            .flat_map(|(m, b)| {
                let s = (b.weight / b.size as f64).sqrt();
                m.iter().map(move |z| z * s).collect::<Vec<_>>()
            })
            .collect()
    };
    let basis: Vec<Vec<C64>> = elems.iter().map(|e| flat(e)).collect();
    let len = basis[0].len();
    let mat = DMatrix::from_fn(len, dim, |r, c| basis[c][r]);
    let svd = ThinSvd::new(&mat);
    let smax = svd.s.first().copied().unwrap_or(0.0);
    let smin = svd.s.last().copied().unwrap_or(0.0);
    if svd.s.len() < dim || smin <= 1e-5 * smax.max(1.0) {
        return Err(Error::spec("b", "basis elements are linearly dependent"));
    }
    let solve = |target: &[DMatrix<C64>], what: &str| -> Result<BCombination> {
        let t = flat(target);
        let rhs = nalgebra::DVector::from_vec(t.clone());
        let x = svd.solve(&mat, &rhs);
        let resid = (&mat * &x - &rhs).norm();
        if resid > STRUCTURE_TOL * rhs.norm().max(1.0) {
            return Err(Error::spec("b", format!("span is not closed under {what}")));
        }
        x.iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > STRUCTURE_TOL)
            .map(|(k, z)| {
                let re = coeff::approx_rational(z.re, 1_000_000, STRUCTURE_TOL);
                let im = coeff::approx_rational(z.im, 1_000_000, STRUCTURE_TOL);
                match (re, im) {
                    (Some(re), Some(im)) => Ok((k, Coeff::new(re, im))),
                    _ => Err(Error::spec(
                        "b",
                        "structure constants are not rational in the given basis",
                    )),
                }
            })
            .collect()
    };
    let unit = (0..dim)
        .find(|&k| {
            elems[k]
                .iter()
                .all(|m| (m - DMatrix::<C64>::identity(m.nrows(), m.ncols())).iter().all(|z| z.norm() <= ADJOINT_TOL))
        })
        .ok_or_else(|| Error::spec("b", "the identity must be one of the basis elements"))?;
    let mut mult = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for l in 0..dim {
            let prod: Vec<DMatrix<C64>> = elems[k].iter().zip(&elems[l]).map(|(a, b)| a * b).collect();
            row.push(solve(&prod, "multiplication")?);
        }
        mult.push(row);
    }
    let star = (0..dim)
        .map(|k| solve(&adjoint_all(&elems[k]), "the adjoint"))
        .collect::<Result<Vec<_>>>()?;
    BAlgebra::new(dim, unit, mult, star)
}

impl TraceModel for MatrixModel {
    fn kind(&self) -> &'static str {
        "matrix"
    }

    fn system(&self) -> &Arc<GeneratorSystem> {
        &self.sys
    }

    fn trace_word(&self, w: &Word) -> Result<C64> {
        check_word(&self.sys, w, self.degree_limit())?;
        self.cache.get_or_try(w, || Ok(self.evaluate(w)))
    }

    fn as_matrix(&self) -> Option<&MatrixModel> {
        Some(self)
    }
}

/// Weight as a float from an exact rational.
pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
