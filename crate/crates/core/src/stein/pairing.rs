use parking_lot::RwLock;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ncalg::{coeff, KernelMatrix, NCPoly, TensorPoly, Word};
use crate::trace::{pair_trace, TraceModel, C64};

/// Memoized word pairings `τ(c^* a)` for one model, shared across Gram workers.
///
/// Cached values depend only on their key, so results do not depend on evaluation order.
pub struct Pairing<'m> {
    model: &'m dyn TraceModel,
    cache: RwLock<HashMap<(Word, Word), C64>>,
}

impl<'m> Pairing<'m> {
    pub fn new(model: &'m dyn TraceModel) -> Self {
        Pairing {
            model,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &'m dyn TraceModel {
        self.model
    }

    pub fn pair(&self, a: &Word, c: &Word) -> Result<C64> {
        let key = (a.clone(), c.clone());
        if let Some(v) = self.cache.read().get(&key) {
            return Ok(*v);
        }
        let v = pair_trace(self.model, a, c)?;
        self.cache.write().insert(key, v);
        Ok(v)
    }

    pub fn l2(&self, p: &NCPoly, q: &NCPoly) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (a, ca) in p.terms() {
            for (c, cc) in q.terms() {
                acc += coeff::to_c64(ca) * coeff::to_c64(cc).conj() * self.pair(a, c)?;
            }
        }
        Ok(acc)
    }

    pub fn tensor(&self, u: &TensorPoly, v: &TensorPoly) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (a, b, cu) in u.terms() {
            for (c, d, cv) in v.terms() {
                let left = self.pair(a, c)?;
                if left == C64::new(0.0, 0.0) {
                    continue;
                }
                acc += coeff::to_c64(cu) * coeff::to_c64(cv).conj() * left * self.pair(b, d)?;
            }
        }
        Ok(acc)
    }

    pub fn hs(&self, a: &KernelMatrix, b: &KernelMatrix) -> Result<C64> {
        if a.size() != b.size() {
            return Err(Error::Structural(format!(
                "kernel sizes differ: {} vs {}",
                a.size(),
                b.size()
            )));
        }
        let mut acc = C64::new(0.0, 0.0);
        for (x, y) in a.entries().iter().zip(b.entries()) {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            acc += self.tensor(x, y)?;
        }
        Ok(acc)
    }
}
