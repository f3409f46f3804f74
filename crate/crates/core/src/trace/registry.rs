//! Model-spec loading: each model family registers a loader under its JSON `"type"` name.

use nalgebra::DMatrix;
use num_rational::BigRational;
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use super::{FreeProductModel, MatrixModel, MeasureModel, SemicircularModel, TraceModel, C64};
use crate::error::{Error, Result};
use crate::ncalg::coeff;

/// Builds a model from its JSON spec.
pub trait ModelLoader: Send + Sync {
    fn name(&self) -> &'static str;

    fn load(&self, spec: &Value, registry: &ModelRegistry, cap: usize) -> Result<Arc<dyn TraceModel>>;
}

/// Loaders keyed by the `"type"` field of a model spec.
pub struct ModelRegistry {
    loaders: BTreeMap<&'static str, Box<dyn ModelLoader>>,
}

impl Default for ModelRegistry {
    fn default() -> Self {
        let mut r = ModelRegistry::empty();
        r.register(Box::new(MatrixLoader));
        r.register(Box::new(SemicircularLoader));
        r.register(Box::new(MeasureLoader));
        r.register(Box::new(FreeProductLoader));
        r
    }
}

impl ModelRegistry {
    pub fn empty() -> Self {
        ModelRegistry {
            loaders: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, loader: Box<dyn ModelLoader>) {
        self.loaders.insert(loader.name(), loader);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.loaders.keys().copied().collect()
    }

    pub fn load(&self, spec: &Value, cap: usize) -> Result<Arc<dyn TraceModel>> {
        let kind = field(spec, "type")?
            .as_str()
            .ok_or_else(|| Error::spec("type", "expected a string"))?;
        let loader = self.loaders.get(kind).ok_or_else(|| {
            Error::spec(
                "type",
                format!("unknown model type `{kind}` (known: {})", self.names().join(", ")),
            )
        })?;
        loader.load(spec, self, cap)
    }
}

/// Loads with the default registry.
pub fn load_model(spec: &Value, cap: usize) -> Result<Arc<dyn TraceModel>> {
    ModelRegistry::default().load(spec, cap)
}

pub fn load_model_file(path: impl AsRef<Path>, cap: usize) -> Result<Arc<dyn TraceModel>> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    load_model(&v, cap)
}

struct MatrixLoader;
struct SemicircularLoader;
struct MeasureLoader;
struct FreeProductLoader;

impl ModelLoader for MatrixLoader {
    fn name(&self) -> &'static str {
        "matrix"
    }

    fn load(&self, spec: &Value, _: &ModelRegistry, cap: usize) -> Result<Arc<dyn TraceModel>> {
        Ok(Arc::new(MatrixModel::from_json(spec, cap)?))
    }
}

impl ModelLoader for SemicircularLoader {
    fn name(&self) -> &'static str {
        "semicircular"
    }

    fn load(&self, spec: &Value, _: &ModelRegistry, cap: usize) -> Result<Arc<dyn TraceModel>> {
        let n = match opt_field(spec, "n") {
            Some(v) => v
                .as_u64()
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::spec("n", "expected a positive integer"))? as usize,
            None => 1,
        };
        Ok(Arc::new(SemicircularModel::new(n, cap)))
    }
}

impl ModelLoader for MeasureLoader {
    fn name(&self) -> &'static str {
        "measure"
    }

    fn load(&self, spec: &Value, _: &ModelRegistry, cap: usize) -> Result<Arc<dyn TraceModel>> {
        Ok(Arc::new(MeasureModel::from_json(spec, cap)?))
    }
}

impl ModelLoader for FreeProductLoader {
    fn name(&self) -> &'static str {
        "free_product"
    }

    fn load(&self, spec: &Value, registry: &ModelRegistry, cap: usize) -> Result<Arc<dyn TraceModel>> {
        let factors = field(spec, "factors")?
            .as_array()
            .ok_or_else(|| Error::spec("factors", "expected an array of model specs"))?
            .iter()
            .enumerate()
            .map(|(i, f)| {
                registry.load(f, cap).map_err(|e| match e {
                    Error::Spec { field, message } => Error::Spec {
                        field: format!("factors[{i}].{field}"),
                        message,
                    },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(FreeProductModel::new(factors, cap)?))
    }
}

pub(crate) fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name)
        .ok_or_else(|| Error::spec(name, "missing required field"))
}

pub(crate) fn opt_field<'a>(v: &'a Value, name: &str) -> Option<&'a Value> {
    v.get(name).filter(|x| !x.is_null())
}

/// A real number given as a JSON number or a rational string such as `"2/3"`.
/// Returns the float value and, when the input was a string, the exact rational.
pub(crate) fn parse_real(v: &Value, name: &str) -> Result<(f64, Option<BigRational>)> {
    match v {
        Value::Number(n) => {
            let x = n
                .as_f64()
                .ok_or_else(|| Error::spec(name, "number out of range"))?;
            let exact = coeff::parse_rational(&n.to_string());
            Ok((x, exact))
        }
        Value::String(s) => {
            let r = coeff::parse_rational(s)
                .ok_or_else(|| Error::spec(name, format!("not a rational number: {s:?}")))?;
            Ok((super::matrix::rational_to_f64(&r), Some(r)))
        }
        _ => Err(Error::spec(name, "expected a number or a rational string")),
    }
}

fn parse_entry(v: &Value, name: &str) -> Result<C64> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            Ok(C64::new(parse_real(&pair[0], name)?.0, parse_real(&pair[1], name)?.0))
        }
        Value::Number(_) | Value::String(_) => Ok(C64::new(parse_real(v, name)?.0, 0.0)),
        _ => Err(Error::spec(name, "matrix entries are [re, im] pairs")),
    }
}

/// A square matrix as an array of rows of `[re, im]` entries.
pub(crate) fn parse_matrix(v: &Value, name: &str) -> Result<DMatrix<C64>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::spec(name, "expected an array of rows"))?;
    let k = rows.len();
    let mut m = DMatrix::<C64>::zeros(k, k);
    for (r, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .filter(|x| x.len() == k)
            .ok_or_else(|| Error::spec(name, format!("row {r} must have {k} entries")))?;
        for (c, e) in row.iter().enumerate() {
            m[(r, c)] = parse_entry(e, name)?;
        }
    }
    Ok(m)
}
