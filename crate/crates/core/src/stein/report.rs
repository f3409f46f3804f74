use serde::{Serialize, Serializer};

use super::DegreeScheme;
use crate::ncalg::serial::tuple_to_value;
use crate::ncalg::NCPoly;

/// Schema tag carried by every serialized report.
pub const SCHEMA: &str = "free-stein/1";

fn schema<S: Serializer>(_: &(), s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(SCHEMA)
}

fn tuple<S: Serializer>(xi: &Option<Vec<NCPoly>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match xi {
        Some(t) => tuple_to_value(t).serialize(s),
        None => s.serialize_none(),
    }
}

/// One coefficient of `Π(A − 𝟙)` over the Jacobian basis (minimum-norm representation).
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionTerm {
    pub slot: usize,
    pub word: String,
    pub coeff: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyReport {
    #[serde(serialize_with = "schema")]
    pub schema: (),
    pub value: f64,
    pub scheme: DegreeScheme,
    pub gram_condition: f64,
    pub gram_rank: usize,
    /// Present for bounded irregularity.
    pub radius: Option<f64>,
    /// Whether the unconstrained optimum already satisfied the radius.
    pub interior: Option<bool>,
    pub xi_norm: Option<f64>,
    pub optimizer: Vec<ProjectionTerm>,
    #[serde(serialize_with = "tuple")]
    pub xi: Option<Vec<NCPoly>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    Estimate,
    ExactFd,
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaReport {
    #[serde(serialize_with = "schema")]
    pub schema: (),
    pub n: usize,
    pub sigma: f64,
    pub irregularity: f64,
    pub mode: SigmaMode,
    pub scheme: Option<DegreeScheme>,
    /// `(degree, σ)` pairs: over `d_xi` in estimate mode, over `d` in exact mode.
    pub trail: Vec<(usize, f64)>,
    pub gram_condition: f64,
    pub gram_rank: usize,
    #[serde(serialize_with = "tuple")]
    pub xi: Option<Vec<NCPoly>>,
}

impl DiscrepancyReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

impl SigmaReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// `Σ*²`.
    pub fn irregularity_sqr(&self) -> f64 {
        self.irregularity * self.irregularity
    }
}
