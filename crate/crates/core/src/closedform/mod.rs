//! Closed-form values, used standalone and as oracles for the numerical core.
//!
//! Each evaluator is registered by name and reads its inputs from an optional model and a
//! JSON parameter object.

mod algebraic;
mod spectral;

pub use algebraic::{
    fd_sigma, finite_group_sigma, graph_sigma, group_sigma, one_var_sigma, radulescu, Exact,
    GraphSigma, GraphSpec, OneVar, ProjectionPair, Radulescu,
};
pub use spectral::{eps_kernel, log_energy, staircase, EpsKernel, Spectrum, StaircaseLevel};

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ncalg::coeff;
use crate::stein::SCHEMA;
use crate::trace::registry::parse_real;
use crate::trace::TraceModel;

/// Inputs shared by every evaluator.
pub struct ClosedFormInput<'a> {
    pub model: Option<&'a dyn TraceModel>,
    pub params: &'a Value,
}

impl<'a> ClosedFormInput<'a> {
    fn model(&self) -> Result<&'a dyn TraceModel> {
        self.model
            .ok_or_else(|| Error::spec("model", "this closed form needs a model"))
    }

    fn param(&self, name: &str) -> Option<&'a Value> {
        self.params.get(name).filter(|v| !v.is_null())
    }

    fn real_or(&self, name: &str, default: f64) -> Result<f64> {
        match self.param(name) {
            Some(v) => Ok(parse_real(v, name)?.0),
            None => Ok(default),
        }
    }

    fn rational(&self, v: &Value, name: &str) -> Result<BigRational> {
        match parse_real(v, name)? {
            (_, Some(r)) => Ok(r),
            (x, None) => coeff::approx_rational(x, 1_000_000, 1e-12)
                .ok_or_else(|| Error::spec(name, "not representable as a rational")),
        }
    }

    fn array(&self, name: &str) -> Result<&'a Vec<Value>> {
        self.param(name)
            .ok_or_else(|| Error::spec(name, "missing required parameter"))?
            .as_array()
            .ok_or_else(|| Error::spec(name, "expected an array"))
    }

    fn uint(&self, name: &str) -> Result<u64> {
        self.param(name)
            .ok_or_else(|| Error::spec(name, "missing required parameter"))?
            .as_u64()
            .ok_or_else(|| Error::spec(name, "expected a nonnegative integer"))
    }
}

pub trait ClosedForm: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    fn evaluate(&self, input: &ClosedFormInput<'_>) -> Result<Value>;
}

/// Evaluators keyed by name.
pub struct ClosedFormRegistry {
    forms: BTreeMap<&'static str, Box<dyn ClosedForm>>,
}

impl Default for ClosedFormRegistry {
    fn default() -> Self {
        let mut r = ClosedFormRegistry {
            forms: BTreeMap::new(),
        };
        r.register(Box::new(OneVarForm));
        r.register(Box::new(FdForm));
        r.register(Box::new(GroupForm));
        r.register(Box::new(FiniteGroupForm));
        r.register(Box::new(RadulescuForm));
        r.register(Box::new(GraphForm));
        r.register(Box::new(EpsKernelForm));
        r.register(Box::new(LogEnergyForm));
        r.register(Box::new(StaircaseForm));
        r
    }
}

impl ClosedFormRegistry {
    pub fn register(&mut self, f: Box<dyn ClosedForm>) {
        self.forms.insert(f.name(), f);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.forms.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn ClosedForm> {
        self.forms.get(name).map(|b| b.as_ref())
    }

    /// Runs an evaluator and wraps its output with the schema tag and its name.
    pub fn evaluate(&self, name: &str, input: &ClosedFormInput<'_>) -> Result<Value> {
        let form = self.get(name).ok_or_else(|| {
            Error::spec(
                "which",
                format!("unknown closed form `{name}` (known: {})", self.names().join(", ")),
            )
        })?;
        let body = form.evaluate(input)?;
        let mut out = Map::new();
        out.insert("schema".into(), json!(SCHEMA));
        out.insert("which".into(), json!(name));
        if let Value::Object(fields) = body {
            out.extend(fields);
        } else {
            out.insert("result".into(), body);
        }
        Ok(Value::Object(out))
    }
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("closed-form results serialize")
}

struct OneVarForm;
struct FdForm;
struct GroupForm;
struct FiniteGroupForm;
struct RadulescuForm;
struct GraphForm;
struct EpsKernelForm;
struct LogEnergyForm;
struct StaircaseForm;

impl ClosedForm for OneVarForm {
    fn name(&self) -> &'static str {
        "one-var"
    }

    fn summary(&self) -> &'static str {
        "sum of squared atom masses of a single self-adjoint variable"
    }

    fn evaluate(&self, input: &ClosedFormInput<'_>) -> Result<Value> {
        let sp = Spectrum::of_model(input.model()?)?;
        let r = one_var_sigma(&sp.masses(), sp.exact_masses.as_deref());
        let mut v = json!({
            "sigma": r.sigma,
            "irregularity_sqr": r.irregularity_sqr,
            "atoms": sp.atoms,
        });
        if let Some((s2, s)) = &r.exact {
            v["exact"] = json!({"irregularity_sqr": coeff::format_rational(&s2.0), "sigma": coeff::format_rational(&s.0)});
        }
        Ok(v)
    }
}

impl ClosedForm for FdForm {
    fn name(&self) -> &'static str {
        "fd"
    }

    fn summary(&self) -> &'static str {
        "finite-dimensional algebra: 1 - sum of squared weights over squared block sizes"
    }

    fn evaluate(&self, input: &ClosedFormInput<'_>) -> Result<Value> {
        let blocks: Vec<(usize, BigRational)> = match (input.param("blocks"), input.model) {
            (Some(_), _) => input
                .array("blocks")?
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let size = b
                        .get("size")
                        .and_then(Value::as_u64)
                        .ok_or_else(|| Error::spec(format!("blocks[{i}].size"), "expected a positive integer"))?;
                    let w = b
                        .get("weight")
                        .ok_or_else(|| Error::spec(format!("blocks[{i}].weight"), "missing"))?;
                    Ok((size as usize, input.rational(w, &format!("blocks[{i}].weight"))?))
                })
                .collect::<Result<_>>()?,
            (None, Some(m)) => {
                let mm = m
                    .as_matrix()
                    .ok_or_else(|| Error::spec("model", "fd needs a matrix model or a `blocks` parameter"))?;
                mm.blocks()
                    .iter()
                    .map(|b| {
                        let w = match &b.exact_weight {
                            Some(w) => w.clone(),
                            None => coeff::approx_rational(b.weight, 1_000_000, 1e-12)
                                .ok_or_else(|| Error::spec("blocks", "weight is not rational"))?,
                        };
                        Ok((b.size, w))
                    })
                    .collect::<Result<_>>()?
            }
            (None, None) => return Err(Error::spec("blocks", "missing required parameter")),
        };
        let s = fd_sigma(&blocks)?;
        Ok(json!({"sigma": Exact(s.clone()).value(), "exact": {"sigma": coeff::format_rational(&s)}}))
    }
}

impl ClosedForm for GroupForm {
    fn name(&self) -> &'static str {
        "group"
    }

    fn summary(&self) -> &'static str {
        "group algebra from l2-Betti numbers: beta1 - beta0 + 1"
    }

    fn evaluate(&self, input: &ClosedFormInput<'_>) -> Result<Value> {
        let b0 = input.real_or("beta0", f64::NAN)?;
        let b1 = input.real_or("beta1", f64::NAN)?;
        Ok(json!({"sigma": group_sigma(b0, b1)?, "beta0": b0, "beta1": b1}))
    }
}

impl ClosedForm for FiniteGroupForm {
    fn name(&self) -> &'static str {
        "finite-group"
    }

    fn summary(&self) -> &'static str {
        "finite group: 1 - 1/|G|"
    }

    fn evaluate(&self, input: &ClosedFormInput<'_>) -> Result<Value> {
        let order = input.uint("order")?;
        let s = finite_group_sigma(order)?;
        Ok(json!({"sigma": Exact(s.clone()).value(), "exact": {"sigma": coeff::format_rational(&s)}, "order": order}))
    }
}

impl ClosedForm for RadulescuForm {
    fn name(&self) -> &'static str {
        "radulescu"
    }

    fn summary(&self) -> &'static str {
        "projection-compressed semicircular generators relative to W*(s0)"
    }

    fn evaluate(&self, input: &ClosedFormInput<'_>) -> Result<Value> {
        let pairs = input
            .array("pairs")?
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let get = |k: &str| {
                    p.get(k)
                        .ok_or_else(|| Error::spec(format!("pairs[{i}].{k}"), "missing"))
                };
                Ok(ProjectionPair {
                    tau_e: input.rational(get("tau_e")?, &format!("pairs[{i}].tau_e"))?,
                    tau_f: input.rational(get("tau_f")?, &format!("pairs[{i}].tau_f"))?,
                    equal: get("equal")?
                        .as_bool()
                        .ok_or_else(|| Error::spec(format!("pairs[{i}].equal"), "expected a boolean"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let r = radulescu(&pairs)?;
        let mut v = to_value(&r);
        v["sigma_value"] = json!(r.sigma.value());
        Ok(v)
    }
}

impl ClosedForm for GraphForm {
    fn name(&self) -> &'static str {
        "graph"
    }

    fn summary(&self) -> &'static str {
        "free graph algebra relative to its vertex projections"
    }

    fn evaluate(&self, input: &ClosedFormInput<'_>) -> Result<Value> {
        let weights = input
            .array("vertices")?
            .iter()
            .enumerate()
            .map(|(i, w)| input.rational(w, &format!("vertices[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let edges = input
            .array("edges")?
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let name = format!("edges[{i}]");
                let parts = e
                    .as_array()
                    .filter(|a| a.len() == 2 || a.len() == 3)
                    .ok_or_else(|| Error::spec(&name, "expected [v, w] or [v, w, multiplicity]"))?;
                let idx = |k: usize| {
                    parts[k]
                        .as_u64()
                        .filter(|&x| x >= 1)
                        .ok_or_else(|| Error::spec(&name, "vertices are 1-based integers"))
                };
                let m = if parts.len() == 3 {
                    parts[2]
                        .as_u64()
                        .ok_or_else(|| Error::spec(&name, "multiplicity must be an integer"))?
                } else {
                    1
                };
                Ok((idx(0)? as usize - 1, idx(1)? as usize - 1, m))
            })
            .collect::<Result<Vec<_>>>()?;
        let r = graph_sigma(&GraphSpec { weights, edges })?;
        Ok(to_value(&r))
    }
}

impl ClosedForm for EpsKernelForm {
    fn name(&self) -> &'static str {
        "eps-kernel"
    }

    fn summary(&self) -> &'static str {
        "distance of the smoothed kernel A_eps to the identity, and the norm of g_eps"
    }

    fn evaluate(&self, input: &ClosedFormInput<'_>) -> Result<Value> {
        let sp = Spectrum::of_model(input.model()?)?;
        let eps = input.real_or("eps", 1e-3)?;
        let tol = input.real_or("tol", 1e-10)?;
        let grid = input.param("grid").and_then(Value::as_u64).unwrap_or(21) as usize;
        Ok(to_value(eps_kernel(&sp, eps, grid, tol)?))
    }
}

impl ClosedForm for LogEnergyForm {
    fn name(&self) -> &'static str {
        "log-energy"
    }

    fn summary(&self) -> &'static str {
        "double integral of log|x - y|; minus infinity when the measure has atoms"
    }

    fn evaluate(&self, input: &ClosedFormInput<'_>) -> Result<Value> {
        let sp = Spectrum::of_model(input.model()?)?;
        let tol = input.real_or("tol", 1e-10)?;
        Ok(match log_energy(&sp, tol)? {
            Some(v) => json!({"value": v, "minus_infinity": false}),
            None => json!({"value": Value::Null, "minus_infinity": true}),
        })
    }
}

impl ClosedForm for StaircaseForm {
    fn name(&self) -> &'static str {
        "staircase"
    }

    fn summary(&self) -> &'static str {
        "partial log-energies of an atomless density with infinite log-energy"
    }

    fn evaluate(&self, input: &ClosedFormInput<'_>) -> Result<Value> {
        let level = input.param("level").and_then(Value::as_u64).unwrap_or(6);
        let levels = staircase(u32::try_from(level).map_err(|_| Error::spec("level", "too large"))?)?;
        let last = levels.last().expect("at least one level").partial_sum;
        Ok(json!({"levels": levels, "value": last}))
    }
}
