use serde::Serialize;

use super::basis::monomials;
use super::Pairing;
use crate::error::{Error, Result};
use crate::ncalg::{coeff, diff_quotient, NCPoly, TensorPoly, Word};
use crate::trace::{TraceModel, C64};

#[derive(Debug, Clone, Serialize)]
pub struct ConjugateReport {
    /// `max |⟨Ξ, ev P⟩ − ⟨𝟙, ev 𝒥P⟩|` over monomial test tuples.
    pub residual: f64,
    /// `Φ* = ‖Ξ‖₂²`.
    pub fisher: f64,
    /// 1-based slot and word of the worst test tuple.
    pub worst_slot: usize,
    pub worst_word: String,
    pub tested: usize,
}

/// Tests whether Ξ is the conjugate variable, i.e. whether 𝟙 is a Stein kernel for Ξ,
/// against every monomial tuple of degree at most `d` (a single monomial in one slot).
pub fn conjugate_variable_check(m: &dyn TraceModel, xi: &[NCPoly], d: usize) -> Result<ConjugateReport> {
    let sys = m.system();
    if xi.len() != sys.n() {
        return Err(Error::spec(
            "xi",
            format!("expected {} entries, got {}", sys.n(), xi.len()),
        ));
    }
    let p = Pairing::new(m);
    let unit = TensorPoly::unit(sys);
    let mut report = ConjugateReport {
        residual: 0.0,
        fisher: 0.0,
        worst_slot: 1,
        worst_word: Word::empty().to_string(),
        tested: 0,
    };
    for (slot, xi_s) in xi.iter().enumerate() {
        report.fisher += p.l2(xi_s, xi_s)?.re;
        for w in monomials(sys, 0, d) {
            let mono = NCPoly::monomial(sys, w.clone(), num_traits::One::one())?;
            let lhs = p.l2(xi_s, &mono)?;
            let rhs = p.tensor(&unit, &diff_quotient(slot, &mono)?)?;
            let r = (lhs - rhs).norm();
            report.tested += 1;
            if r > report.residual {
                report.residual = r;
                report.worst_slot = slot + 1;
                report.worst_word = w.to_string();
            }
        }
    }
    Ok(report)
}

/// The adjoint of the free difference quotients on `(p ⊗ q) # η`, given `∂*(η)`:
///
/// `∂*((p⊗q)#η) = (p⊗q)#∂*(η) − Σ_j (1⊗τ)(p · [η_j # ∂_j(q*)*]) − (τ⊗1)([η_j # ∂_j(p*)*] · q)`
///
/// where `·` is left/right multiplication on the tensor legs and the partial traces are taken
/// in the model. The result is a polynomial whose coefficients carry the evaluated traces.
pub fn adjoint_action(
    m: &dyn TraceModel,
    eta: &[TensorPoly],
    p: &NCPoly,
    q: &NCPoly,
    eta_adj: &NCPoly,
) -> Result<NCPoly> {
    let sys = m.system();
    if eta.len() != sys.n() {
        return Err(Error::spec(
            "eta",
            format!("expected {} entries, got {}", sys.n(), eta.len()),
        ));
    }
    let one = NCPoly::one(sys);
    let mut out = TensorPoly::elementary(p, q)?.sharp_poly(eta_adj)?;
    let left_mult = TensorPoly::elementary(p, &one)?;
    let right_mult = TensorPoly::elementary(&one, q)?;
    for (j, eta_j) in eta.iter().enumerate() {
        let via_q = left_mult.sharp(&eta_j.sharp(&diff_quotient(j, &q.adjoint())?.adjoint())?)?;
        out = out.sub(&partial_trace(m, &via_q, Leg::Right)?)?;
        let via_p = right_mult.sharp(&eta_j.sharp(&diff_quotient(j, &p.adjoint())?.adjoint())?)?;
        out = out.sub(&partial_trace(m, &via_p, Leg::Left)?)?;
    }
    Ok(out)
}

enum Leg {
    Left,
    Right,
}

/// `(τ ⊗ 1)` or `(1 ⊗ τ)` applied to a tensor: the traced leg becomes a scalar factor.
fn partial_trace(m: &dyn TraceModel, t: &TensorPoly, leg: Leg) -> Result<NCPoly> {
    let sys = t.system();
    let mut out = NCPoly::zero(sys);
    for (a, b, c) in t.terms() {
        let (traced, kept) = match leg {
            Leg::Left => (a, b),
            Leg::Right => (b, a),
        };
        let tau: C64 = m.trace_word(traced)?;
        if tau == C64::new(0.0, 0.0) {
            continue;
        }
        let scalar = coeff::from_c64(tau)? * c;
        out = out.add(&NCPoly::monomial(sys, kept.clone(), scalar)?)?;
    }
    Ok(out)
}
