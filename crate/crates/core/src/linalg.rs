//! Dense complex linear algebra used by the Stein solvers.

use nalgebra::{DMatrix, DVector};

use crate::trace::C64;

/// Relative eigenvalue / singular-value cutoff for every Gram solve.
pub const CUTOFF: f64 = 1e-10;

/// Eigen-decomposition of a Hermitian Gram matrix, truncated at `CUTOFF · λ_max`.
///
/// The Gram is scaled to unit diagonal first, so the cutoff and the reported spectrum refer to
/// normalized vectors; monomials at atoms away from the origin otherwise differ in norm by
/// enough to push genuine directions under the cutoff.
///
/// `whiten` maps a right-hand side `r_a = ⟨Y, J_a⟩` to the coordinates of the projection of `Y`
/// in an orthonormal basis of the span of the `J_a`.
#[derive(Debug, Clone)]
pub struct Projector {
    whiten: DMatrix<C64>,
    lambda_max: f64,
    lambda_min_kept: f64,
    rank: usize,
    min_eigenvalue: f64,
}

impl Projector {
    pub fn new(gram: &DMatrix<C64>) -> Self {
        let n = gram.nrows();
        if n == 0 {
            return Projector {
                whiten: DMatrix::zeros(0, 0),
                lambda_max: 0.0,
                lambda_min_kept: 0.0,
                rank: 0,
                min_eigenvalue: 0.0,
            };
        }
        let d: Vec<f64> = (0..n)
            .map(|a| {
                let g = gram[(a, a)].re;
                if g > 0.0 {
                    1.0 / g.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let scaled = DMatrix::from_fn(n, n, |a, b| (gram[(a, b)] + gram[(b, a)].conj()) * (0.5 * d[a] * d[b]));
        let eig = scaled.symmetric_eigen();
        let lambda_max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let keep: Vec<usize> = (0..n)
            .filter(|&m| lambda_max > 0.0 && eig.eigenvalues[m] > CUTOFF * lambda_max)
            .collect();
        let mut whiten = DMatrix::<C64>::zeros(keep.len(), n);
        for (r, &m) in keep.iter().enumerate() {
            let s = 1.0 / eig.eigenvalues[m].sqrt();
            for a in 0..n {
                whiten[(r, a)] = eig.eigenvectors[(a, m)].conj() * (s * d[a]);
            }
        }
        let lambda_min_kept = keep
            .iter()
            .map(|&m| eig.eigenvalues[m])
            .fold(f64::INFINITY, f64::min);
        Projector {
            whiten,
            lambda_max,
            lambda_min_kept,
            rank: keep.len(),
            min_eigenvalue,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `λ_max / λ_min` over the retained spectrum.
    pub fn condition(&self) -> f64 {
        if self.rank == 0 {
            1.0
        } else {
            self.lambda_max / self.lambda_min_kept
        }
    }

    /// Smallest eigenvalue of the (symmetrized, unit-diagonal) Gram, before truncation.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn coords(&self, rhs: &DVector<C64>) -> DVector<C64> {
        &self.whiten * rhs
    }

    pub fn coords_matrix(&self, rhs: &DMatrix<C64>) -> DMatrix<C64> {
        &self.whiten * rhs
    }

    /// Coefficients over the original (non-orthonormal) family for given orthonormal coordinates:
    /// the minimum-norm representation.
    pub fn combination(&self, coords: &DVector<C64>) -> DVector<C64> {
        self.whiten.adjoint() * coords
    }

    pub fn whitening(&self) -> &DMatrix<C64> {
        &self.whiten
    }
}

// nalgebra's SVD returns wrong factors on some small rank-deficient inputs (for instance a
// 3x3 orthogonal projector of rank one comes back with singular value 1.011), so every
// factorization here goes through the Hermitian eigensolver instead.

fn hermitian_eigen(g: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let sym = (g + g.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

/// Orthonormal basis (as columns) of the column space of `m`: eigenvectors of `m m^*` with
/// eigenvalue above `CUTOFF · λ_max`.
pub fn range_basis(m: &DMatrix<C64>) -> DMatrix<C64> {
    range_basis_with_condition(m).0
}

/// [`range_basis`] together with `λ_max / λ_min` over the retained eigenvalues of `m m^*`,
/// the condition number of the Gram matrix of the columns restricted to their span.
pub fn range_basis_with_condition(m: &DMatrix<C64>) -> (DMatrix<C64>, f64) {
    if m.ncols() == 0 || m.nrows() == 0 {
        return (DMatrix::zeros(m.nrows(), 0), 1.0);
    }
    let (vals, vecs) = hermitian_eigen(&(m * m.adjoint()));
    let lmax = vals.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&k| lmax > 0.0 && vals[k] > CUTOFF * lmax)
        .collect();
    let lmin = keep.iter().map(|&k| vals[k]).fold(f64::INFINITY, f64::min);
    let cond = if keep.is_empty() { 1.0 } else { lmax / lmin };
    (DMatrix::from_fn(m.nrows(), keep.len(), |r, c| vecs[(r, keep[c])]), cond)
}

/// Orthonormal basis (as columns) of the null space of `m`.
///
/// Columns are scaled to unit norm first, which keeps monomial evaluation matrices (whose
/// columns grow geometrically) from hiding genuine relations below the cutoff.
pub fn null_space(m: &DMatrix<C64>) -> DMatrix<C64> {
    let w = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(w, w);
    }
    let scale: Vec<f64> = (0..w)
        .map(|j| {
            let n = m.column(j).norm();
            if n > 0.0 {
                1.0 / n
            } else {
                1.0
            }
        })
        .collect();
    let b = DMatrix::from_fn(m.nrows(), w, |r, c| m[(r, c)] * scale[c]);
    let (vals, vecs) = hermitian_eigen(&(b.adjoint() * &b));
    let lmax = vals.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..w).filter(|&k| vals[k] <= CUTOFF * lmax).collect();
    let x = DMatrix::from_fn(w, keep.len(), |r, c| vecs[(r, keep[c])] * scale[r]);
    range_basis(&x)
}

/// `a = U S V^*` restricted to singular values with `s² > CUTOFF · s_max²`; only `S` and `V`
/// are stored since `U = a V S^{-1}`.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub s: Vec<f64>,
    pub v: DMatrix<C64>,
}

impl ThinSvd {
    pub fn new(a: &DMatrix<C64>) -> Self {
        if a.ncols() == 0 || a.nrows() == 0 {
            return ThinSvd {
                s: Vec::new(),
                v: DMatrix::zeros(a.ncols(), 0),
            };
        }
        let (vals, vecs) = hermitian_eigen(&(a.adjoint() * a));
        let lmax = vals.iter().copied().fold(0.0, f64::max);
        let mut keep: Vec<usize> = (0..vals.len())
            .filter(|&k| lmax > 0.0 && vals[k] > CUTOFF * lmax)
            .collect();
        keep.sort_by(|&x, &y| vals[y].total_cmp(&vals[x]));
        ThinSvd {
            s: keep.iter().map(|&k| vals[k].sqrt()).collect(),
            v: DMatrix::from_fn(a.ncols(), keep.len(), |r, c| vecs[(r, keep[c])]),
        }
    }

    /// `U^* e`, computed as `S^{-1} V^* a^* e`.
    pub fn left_coords(&self, a: &DMatrix<C64>, e: &DVector<C64>) -> DVector<C64> {
        let mut g = self.v.adjoint() * (a.adjoint() * e);
        for (j, s) in self.s.iter().enumerate() {
            g[j] /= *s;
        }
        g
    }

    /// Minimum-norm least-squares solution of `a x = e`.
    pub fn solve(&self, a: &DMatrix<C64>, e: &DVector<C64>) -> DVector<C64> {
        let mut g = self.left_coords(a, e);
        for (j, s) in self.s.iter().enumerate() {
            g[j] /= *s;
        }
        &self.v * g
    }
}

/// Squared norm of the orthogonal projection of `v` onto the column span of an orthonormal `q`.
pub fn projected_norm_sqr(q: &DMatrix<C64>, v: &DVector<C64>) -> f64 {
    (q.adjoint() * v).norm_squared()
}
