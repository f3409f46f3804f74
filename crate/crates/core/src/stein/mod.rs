//! Degree-truncated Gram systems for free Stein discrepancy, irregularity and dimension.
//!
//! Every infimum over kernels or conjugate-variable candidates is replaced by a least-squares
//! problem over finitely many monomials. Two knobs control the truncation:
//! `d_xi` bounds the degree of candidate Ξ entries and `d_proj` bounds the test tuples whose
//! Jacobians span the projection range. Raising `d_proj` can only increase a discrepancy
//! (a larger range is projected onto); raising `d_xi` can only decrease an irregularity.

mod alpha;
mod basis;
mod checks;
mod exact;
mod pairing;
mod report;
mod solve;

pub use alpha::{alpha_estimate, AlphaOptions, AlphaReport};
pub use basis::{centered_basis, jacobian_basis, monomials, BasisElement, GramSystem};
pub use checks::{adjoint_action, conjugate_variable_check, ConjugateReport};
pub use exact::{sigma_exact, sigma_exact_fd, squared_irregularity_fd};
pub use pairing::Pairing;
pub use report::{DiscrepancyReport, ProjectionTerm, SigmaMode, SigmaReport, SCHEMA};
pub use solve::{discrepancy, irregularity_bounded, irregularity_estimate, radius_sweep};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ncalg::GeneratorSystem;

/// Truncation degrees for Ξ candidates and for the projection range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeScheme {
    pub d_xi: usize,
    pub d_proj: usize,
}

impl DegreeScheme {
    pub fn new(d_xi: usize, d_proj: usize) -> Self {
        DegreeScheme { d_xi, d_proj }
    }

    /// `d_proj = d_xi + 2`: the Mai kernel of a degree-k entry has tensor degree k + 1,
    /// which is matched by Jacobians of degree-(k + 2) monomials.
    pub fn with_default_proj(d_xi: usize) -> Self {
        DegreeScheme {
            d_xi,
            d_proj: d_xi + 2,
        }
    }

    /// Checks both knobs against the system's cap. Traces are taken of products of two legs,
    /// so each leg must stay within the cap.
    pub fn validate(&self, sys: &GeneratorSystem) -> Result<()> {
        if self.d_proj == 0 {
            return Err(Error::spec("d_proj", "must be at least 1"));
        }
        sys.check_degree(self.d_proj)?;
        sys.check_degree(self.d_xi + 1)?;
        Ok(())
    }
}

fn require_scalar_b(sys: &GeneratorSystem, what: &str) -> Result<()> {
    if sys.b().is_some() {
        return Err(Error::spec(
            "model",
            format!("{what} is only available over B = C; use sigma-exact for matrix models with B"),
        ));
    }
    Ok(())
}
