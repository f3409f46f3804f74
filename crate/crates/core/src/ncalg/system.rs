use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

use super::coeff::{self, Coeff};
use crate::error::{Error, Result};

/// Default bound on the number of indeterminate letters in any symbolic input.
pub const DEFAULT_CAP: usize = 12;

/// Environment variable that overrides [`DEFAULT_CAP`] for the command-line tool.
pub const CAP_ENV: &str = "FREE_STEIN_CAP";

pub fn cap_from_env() -> Result<usize> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| Error::spec(CAP_ENV, format!("expected a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

/// Sparse combination of B basis elements.
pub type BCombination = Vec<(usize, Coeff)>;

/// A finite-dimensional unital *-algebra presented by a basis and structure constants.
///
/// The unit must be one of the basis elements; B-letters in words never carry the unit.
#[derive(Debug, Clone, PartialEq)]
pub struct BAlgebra {
    dim: usize,
    unit: usize,
    mult: Vec<Vec<BCombination>>,
    star: Vec<BCombination>,
}

fn combine(terms: impl IntoIterator<Item = (usize, Coeff)>) -> BCombination {
    let mut acc: BTreeMap<usize, Coeff> = BTreeMap::new();
    for (k, c) in terms {
        let slot = acc.entry(k).or_insert_with(Coeff::zero);
        *slot += c;
    }
    acc.into_iter().filter(|(_, c)| !coeff::is_zero(c)).collect()
}

impl BAlgebra {
    /// `mult[k][l]` expands `b_k b_l`; `star[k]` expands `b_k^*`.
    pub fn new(
        dim: usize,
        unit: usize,
        mult: Vec<Vec<BCombination>>,
        star: Vec<BCombination>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::spec("b_algebra.dim", "must be positive"));
        }
        if unit >= dim {
            return Err(Error::spec("b_algebra.unit", "unit index out of range"));
        }
        if mult.len() != dim || mult.iter().any(|row| row.len() != dim) || star.len() != dim {
            return Err(Error::spec("b_algebra", "structure tables must be dim x dim"));
        }
        let in_range = |c: &BCombination| c.iter().all(|(k, _)| *k < dim);
        if !mult.iter().flatten().all(in_range) || !star.iter().all(in_range) {
            return Err(Error::spec("b_algebra", "basis index out of range"));
        }
        let b = BAlgebra {
            dim,
            unit,
            mult: mult.into_iter().map(|r| r.into_iter().map(combine).collect()).collect(),
            star: star.into_iter().map(combine).collect(),
        };
        b.validate()?;
        Ok(b)
    }

    /// The trivial algebra B = C.
    pub fn scalars() -> Self {
        BAlgebra {
            dim: 1,
            unit: 0,
            mult: vec![vec![vec![(0, Coeff::one())]]],
            star: vec![vec![(0, Coeff::one())]],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn product(&self, k: usize, l: usize) -> &BCombination {
        &self.mult[k][l]
    }

    pub fn star_of(&self, k: usize) -> &BCombination {
        &self.star[k]
    }

    fn mul_comb(&self, a: &BCombination, b: &BCombination) -> BCombination {
        combine(a.iter().flat_map(|(k, ca)| {
            b.iter().flat_map(move |(l, cb)| {
                self.mult[*k][*l]
                    .iter()
                    .map(move |(m, cm)| (*m, ca * cb * cm))
            })
        }))
    }

    fn star_comb(&self, a: &BCombination) -> BCombination {
        combine(
            a.iter()
                .flat_map(|(k, c)| self.star[*k].iter().map(move |(m, cm)| (*m, c.conj() * cm))),
        )
    }

    fn validate(&self) -> Result<()> {
        let basis = |k: usize| vec![(k, Coeff::one())];
        for k in 0..self.dim {
            if self.mult[self.unit][k] != basis(k) || self.mult[k][self.unit] != basis(k) {
                return Err(Error::spec("b_algebra.unit", "unit law fails"));
            }
            if self.star_comb(&self.star[k]) != basis(k) {
                return Err(Error::spec("b_algebra.star", "involution does not square to the identity"));
            }
        }
        for k in 0..self.dim {
            for l in 0..self.dim {
                let lhs = self.star_comb(&self.mult[k][l]);
                let rhs = self.mul_comb(&self.star[l], &self.star[k]);
                if lhs != rhs {
                    return Err(Error::spec("b_algebra.star", "involution is not an anti-automorphism"));
                }
                for m in 0..self.dim {
                    let left = self.mul_comb(&self.mult[k][l], &basis(m));
                    let right = self.mul_comb(&basis(k), &self.mult[l][m]);
                    if left != right {
                        return Err(Error::spec("b_algebra.mult", "multiplication is not associative"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Indeterminates `t_1..t_n`, their star pairing and the coefficient algebra B.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSystem {
    n: usize,
    star: Vec<usize>,
    b: Option<BAlgebra>,
    cap: usize,
}

impl GeneratorSystem {
    /// `n` self-adjoint indeterminates over B = C.
    pub fn self_adjoint(n: usize) -> Self {
        GeneratorSystem {
            n,
            star: (0..n).collect(),
            b: None,
            cap: DEFAULT_CAP,
        }
    }

    /// `pairing[i]` is the zero-based index of `t_i^*`.
    pub fn with_pairing(pairing: Vec<usize>) -> Result<Self> {
        let n = pairing.len();
        for (i, &j) in pairing.iter().enumerate() {
            if j >= n || pairing[j] != i {
                return Err(Error::spec("star", "pairing is not an involution on the generators"));
            }
        }
        Ok(GeneratorSystem {
            n,
            star: pairing,
            b: None,
            cap: DEFAULT_CAP,
        })
    }

    pub fn with_b(mut self, b: BAlgebra) -> Self {
        self.b = if b.dim() == 1 { None } else { Some(b) };
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn star(&self, i: usize) -> usize {
        self.star[i]
    }

    pub fn pairing(&self) -> &[usize] {
        &self.star
    }

    pub fn b(&self) -> Option<&BAlgebra> {
        self.b.as_ref()
    }

    pub fn b_dim(&self) -> usize {
        self.b.as_ref().map_or(1, BAlgebra::dim)
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn check_degree(&self, degree: usize) -> Result<()> {
        if degree > self.cap {
            Err(Error::DegreeCap {
                degree,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    /// Compatibility for arithmetic: same generators, pairing and B.
    pub fn compatible(&self, other: &GeneratorSystem) -> bool {
        self.n == other.n && self.star == other.star && self.b == other.b
    }
}

pub(crate) fn ensure_same(a: &Arc<GeneratorSystem>, b: &Arc<GeneratorSystem>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.compatible(b) {
        Ok(())
    } else {
        Err(Error::Structural(
            "operands belong to different generator systems".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag2() -> BAlgebra {
        // C^2 with basis {1, p}, p a projection.
        let one = Coeff::one();
        BAlgebra::new(
            2,
            0,
            vec![
                vec![vec![(0, one.clone())], vec![(1, one.clone())]],
                vec![vec![(1, one.clone())], vec![(1, one.clone())]],
            ],
            vec![vec![(0, one.clone())], vec![(1, one)]],
        )
        .unwrap()
    }

    #[test]
    fn projection_algebra_validates() {
        let b = diag2();
        assert_eq!(b.dim(), 2);
        assert_eq!(b.product(1, 1), &vec![(1, Coeff::one())]);
    }

    #[test]
    fn non_associative_table_is_rejected() {
        let one = Coeff::one();
        // second row of the unit column is wrong: 1*p = 1.
        let res = BAlgebra::new(
            2,
            0,
            vec![
                vec![vec![(0, one.clone())], vec![(0, one.clone())]],
                vec![vec![(1, one.clone())], vec![(1, one.clone())]],
            ],
            vec![vec![(0, one.clone())], vec![(1, one)]],
        );
        assert!(res.is_err());
    }

    #[test]
    fn pairing_must_be_involution() {
        assert!(GeneratorSystem::with_pairing(vec![1, 0]).is_ok());
        assert!(GeneratorSystem::with_pairing(vec![1, 1]).is_err());
        assert!(GeneratorSystem::with_pairing(vec![2, 0]).is_err());
    }
}
