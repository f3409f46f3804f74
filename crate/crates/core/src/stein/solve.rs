use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::basis::GramSystem;
use super::report::{DiscrepancyReport, ProjectionTerm, SigmaMode, SigmaReport};
use super::{require_scalar_b, DegreeScheme, Pairing};
use crate::error::{Error, Result};
use crate::linalg::{Projector, ThinSvd};
use crate::ncalg::{coeff, mai_kernel, KernelMatrix, NCPoly, Word};
use crate::trace::{TraceModel, C64};

/// `‖Π_{d_proj}(A_Ξ − 𝟙)‖_HS` with `A_Ξ` the Mai kernel of the centered Ξ.
///
/// Two Stein kernels for the same Ξ differ by something orthogonal to the range of `ev∘𝒥`,
/// so projecting any one of them gives the discrepancy.
pub fn discrepancy(m: &dyn TraceModel, xi: &[NCPoly], scheme: &DegreeScheme) -> Result<DiscrepancyReport> {
    let sys = m.system();
    require_scalar_b(sys, "discrepancy")?;
    scheme.validate(sys)?;
    if xi.len() != sys.n() {
        return Err(Error::spec(
            "xi",
            format!("expected {} entries, got {}", sys.n(), xi.len()),
        ));
    }
    for p in xi {
        crate::ncalg::system::ensure_same(p.system(), sys)?;
        sys.check_degree(p.degree() + 1)?;
    }
    let gs = GramSystem::new(m, scheme)?;
    let centered = xi
        .iter()
        .map(|p| center(gs.pairing(), p))
        .collect::<Result<Vec<_>>>()?;
    let a = mai_kernel(&centered, &NCPoly::generators(sys))?;
    let e = gs.coords(&KernelMatrix::identity(sys))?;
    let diff = gs.coords(&a)? - &e;
    let xi_norm = centered
        .iter()
        .map(|p| gs.pairing().l2(p, p).map(|z| z.re))
        .sum::<Result<f64>>()?
        .max(0.0)
        .sqrt();
    Ok(DiscrepancyReport {
        schema: (),
        value: diff.norm(),
        scheme: *scheme,
        gram_condition: gs.projector().condition(),
        gram_rank: gs.projector().rank(),
        radius: None,
        interior: None,
        xi_norm: Some(xi_norm),
        optimizer: projection_terms(&gs, &diff),
        xi: Some(centered),
    })
}

/// Truncated free Stein irregularity: the least-squares minimum of
/// `‖Π_{d_proj}(A_Ξ − 𝟙)‖` over Ξ with entries of degree at most `d_xi`.
/// The trail records σ for every `d_xi` from 1 up, which is nondecreasing.
pub fn irregularity_estimate(m: &dyn TraceModel, scheme: &DegreeScheme) -> Result<SigmaReport> {
    let setup = Setup::new(m, scheme)?;
    let n = m.system().n();
    let levels: Vec<usize> = if scheme.d_xi == 0 {
        vec![0]
    } else {
        (1..=scheme.d_xi).collect()
    };
    let mut trail = Vec::with_capacity(levels.len());
    let mut last = None;
    for d in levels {
        let sol = setup.solve(d, None);
        trail.push((d, n as f64 - sol.residual * sol.residual));
        last = Some(sol);
    }
    let sol = last.expect("at least one level");
    Ok(SigmaReport {
        schema: (),
        n,
        sigma: n as f64 - sol.residual * sol.residual,
        irregularity: sol.residual,
        mode: SigmaMode::Estimate,
        scheme: Some(*scheme),
        trail,
        gram_condition: setup.gs.projector().condition(),
        gram_rank: setup.gs.projector().rank(),
        xi: Some(setup.xi_tuple(&sol)?),
    })
}

/// Truncated R-bounded irregularity: as [`irregularity_estimate`] with `‖Ξ‖₂ ≤ R`.
pub fn irregularity_bounded(m: &dyn TraceModel, scheme: &DegreeScheme, radius: f64) -> Result<DiscrepancyReport> {
    Ok(radius_sweep(m, scheme, &[radius])?.remove(0))
}

/// Bounded irregularity at several radii, sharing one Gram assembly.
pub fn radius_sweep(m: &dyn TraceModel, scheme: &DegreeScheme, radii: &[f64]) -> Result<Vec<DiscrepancyReport>> {
    if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Error::spec("radii", format!("radius {r} must be finite and nonnegative")));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::spec("radii", "radii must be strictly increasing"));
    }
    let setup = Setup::new(m, scheme)?;
    radii
        .iter()
        .map(|&r| {
            let sol = setup.solve(scheme.d_xi, Some(r));
            let diff = &setup.v * &sol.c - &setup.e;
            Ok(DiscrepancyReport {
                schema: (),
                value: sol.residual,
                scheme: *scheme,
                gram_condition: setup.gs.projector().condition(),
                gram_rank: setup.gs.projector().rank(),
                radius: Some(r),
                interior: Some(sol.interior),
                xi_norm: Some(sol.xi_norm),
                optimizer: projection_terms(&setup.gs, &diff),
                xi: Some(setup.xi_tuple(&sol)?),
            })
        })
        .collect()
}

/// `ξ − τ(ξ)`: the component along the scalars removed.
fn center(p: &Pairing<'_>, xi: &NCPoly) -> Result<NCPoly> {
    let sys = xi.system();
    let one = NCPoly::one(sys);
    let tau = p.l2(xi, &one)?;
    if tau == C64::new(0.0, 0.0) {
        return Ok(xi.clone());
    }
    xi.sub(&NCPoly::scalar(sys, coeff::from_c64(tau)?))
}

fn projection_terms(gs: &GramSystem<'_>, coords: &DVector<C64>) -> Vec<ProjectionTerm> {
    let c = gs.projector().combination(coords);
    // Centered basis elements expand into several plain words; collect per (slot, word).
    let mut acc: BTreeMap<(usize, Word), C64> = BTreeMap::new();
    for (b, z) in gs.basis().iter().zip(c.iter()) {
        for (w, k) in b.poly.terms() {
            *acc.entry((b.slot, w.clone())).or_default() += z * coeff::to_c64(k);
        }
    }
    let scale = acc.values().map(|z| z.norm()).fold(0.0, f64::max);
    acc.into_iter()
        .filter(|(_, z)| z.norm() > 1e-12 * scale.max(1.0))
        .map(|((slot, w), z)| ProjectionTerm {
            slot: slot + 1,
            word: w.to_string(),
            coeff: [z.re, z.im],
        })
        .collect()
}

/// One centered candidate: `w − τ(w)` in a slot.
struct Candidate {
    slot: usize,
    word: Word,
    tau: C64,
}

/// Everything shared by the irregularity solvers at one scheme.
struct Setup<'m> {
    gs: GramSystem<'m>,
    candidates: Vec<Candidate>,
    /// Orthonormal coordinates of the candidates' Mai kernels, one column each.
    v: DMatrix<C64>,
    /// L² Gram of the centered candidates.
    h: DMatrix<C64>,
    /// Coordinates of 𝟙.
    e: DVector<C64>,
}

struct Solution {
    /// Coefficients over all candidates (zero above the level).
    c: DVector<C64>,
    residual: f64,
    xi_norm: f64,
    interior: bool,
}

impl<'m> Setup<'m> {
    fn new(m: &'m dyn TraceModel, scheme: &DegreeScheme) -> Result<Self> {
        let sys = m.system();
        require_scalar_b(sys, "irregularity")?;
        let gs = GramSystem::new(m, scheme)?;
        let x = NCPoly::generators(sys);
        let one = Word::empty();
        let mut candidates = Vec::new();
        for slot in 0..sys.n() {
            for w in Word::all_up_to(sys.n(), 1, scheme.d_xi) {
                let tau = gs.pairing().pair(&w, &one)?;
                candidates.push(Candidate { slot, word: w, tau });
            }
        }
        let cols = candidates
            .par_iter()
            .map(|c| {
                let mut xi = vec![NCPoly::zero(sys); sys.n()];
                xi[c.slot] = NCPoly::monomial(sys, c.word.clone(), num_traits::One::one())?;
                gs.coords(&mai_kernel(&xi, &x)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let r = gs.projector().rank();
        let v = DMatrix::from_fn(r, cols.len(), |i, k| cols[k][i]);
        let k = candidates.len();
        let mut h = DMatrix::<C64>::zeros(k, k);
        for a in 0..k {
            for b in 0..k {
                if candidates[a].slot == candidates[b].slot {
                    let (ca, cb) = (&candidates[a], &candidates[b]);
                    h[(a, b)] = gs.pairing().pair(&ca.word, &cb.word)? - ca.tau * cb.tau.conj();
                }
            }
        }
        let e = gs.coords(&KernelMatrix::identity(sys))?;
        Ok(Setup {
            gs,
            candidates,
            v,
            h,
            e,
        })
    }

    /// Minimizes over candidates of degree at most `level`, optionally with `‖Ξ‖₂ ≤ radius`.
    fn solve(&self, level: usize, radius: Option<f64>) -> Solution {
        let idx: Vec<usize> = (0..self.candidates.len())
            .filter(|&k| self.candidates[k].word.degree() <= level)
            .collect();
        let h = DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.h[(idx[a], idx[b])]);
        // Orthonormalize the candidates in L² so that the constraint is a Euclidean ball.
        let hp = Projector::new(&h);
        let to_c = hp.whitening().adjoint();
        let v_sub = DMatrix::from_fn(self.v.nrows(), idx.len(), |i, k| self.v[(i, idx[k])]);
        let a = &v_sub * &to_c;
        let tr = trust_region(&a, &self.e, radius);
        let c_sub = &to_c * &tr.x;
        let mut c_full = DVector::<C64>::zeros(self.candidates.len());
        for (k, &i) in idx.iter().enumerate() {
            c_full[i] = c_sub[k];
        }
        Solution {
            c: c_full,
            residual: tr.residual,
            xi_norm: tr.x.norm(),
            interior: tr.interior,
        }
    }

    fn xi_tuple(&self, sol: &Solution) -> Result<Vec<NCPoly>> {
        let sys = self.gs.pairing().model().system();
        let scale = sol.c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut xi = vec![NCPoly::zero(sys); sys.n()];
        let mut constant = vec![C64::new(0.0, 0.0); sys.n()];
        for (cand, c) in self.candidates.iter().zip(sol.c.iter()) {
            if c.norm() <= 1e-13 * scale {
                continue;
            }
            let term = NCPoly::monomial(sys, cand.word.clone(), coeff::from_c64(*c)?)?;
            xi[cand.slot] = xi[cand.slot].add(&term)?;
            constant[cand.slot] -= c * cand.tau;
        }
        for (p, k) in xi.iter_mut().zip(constant) {
            if k.norm() > 1e-15 {
                *p = p.add(&NCPoly::scalar(sys, coeff::from_c64(k)?))?;
            }
        }
        Ok(xi)
    }
}

struct TrustRegion {
    x: DVector<C64>,
    residual: f64,
    interior: bool,
}

/// `min ‖A x − e‖` subject to `‖x‖ ≤ R` (unconstrained when `radius` is `None`).
///
/// With the SVD `A = U S V^*`, the regularized solution `x(λ) = V (S² + λ)^{-1} S U^* e` has
/// norm decreasing in λ; λ = 0 gives the minimum-norm least-squares solution, and otherwise
/// λ is found by bisection so that `‖x(λ)‖ = R`.
fn trust_region(a: &DMatrix<C64>, e: &DVector<C64>, radius: Option<f64>) -> TrustRegion {
    let k = a.ncols();
    if k == 0 || a.nrows() == 0 || radius == Some(0.0) {
        return TrustRegion {
            x: DVector::zeros(k),
            residual: e.norm(),
            interior: radius != Some(0.0) || e.norm() == 0.0,
        };
    }
    let svd = ThinSvd::new(a);
    let s = &svd.s;
    let g = svd.left_coords(a, e);
    let weights = |lambda: f64| -> DVector<C64> {
        DVector::from_fn(s.len(), |j, _| g[j] * (s[j] / (s[j] * s[j] + lambda)))
    };
    let w0 = weights(0.0);
    let (w, interior) = match radius {
        Some(r) if w0.norm() > r * (1.0 + 1e-12) => {
            let mut hi = 1.0;
            while weights(hi).norm() > r && hi < 1e300 {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            let mut lambda = hi;
            for _ in 0..400 {
                let mid = 0.5 * (lo + hi);
                let nm = weights(mid).norm();
                if (nm - r).abs() <= 1e-14 * r.max(1.0) {
                    lambda = mid;
                    break;
                }
                if nm > r {
                    lo = mid;
                } else {
                    hi = mid;
                }
                lambda = hi;
                if hi - lo <= f64::EPSILON * hi {
                    break;
                }
            }
            (weights(lambda), false)
        }
        _ => (w0, true),
    };
    let x = &svd.v * w;
    let residual = (a * &x - e).norm();
    TrustRegion { x, residual, interior }
}
