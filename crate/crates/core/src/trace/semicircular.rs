use std::sync::Arc;

use super::{check_word, TraceCache, TraceModel, C64};
use crate::error::Result;
use crate::ncalg::{GeneratorSystem, Word};

/// A free family of standard semicircular variables.
///
/// τ(s_{i_1} ⋯ s_{i_d}) counts the non-crossing pairings whose blocks join equal indices.
#[derive(Debug)]
pub struct SemicircularModel {
    sys: Arc<GeneratorSystem>,
    cache: TraceCache,
}

impl SemicircularModel {
    pub fn new(n: usize, cap: usize) -> Self {
        SemicircularModel {
            sys: Arc::new(GeneratorSystem::self_adjoint(n).with_cap(cap)),
            cache: TraceCache::default(),
        }
    }

    fn count(&self, idx: &[usize]) -> Result<f64> {
        if idx.is_empty() {
            return Ok(1.0);
        }
        if idx.len() % 2 == 1 {
            return Ok(0.0);
        }
        let w = Word::from_indices(idx);
        let v = self.cache.get_or_try(&w, || {
            // The first point pairs with some j; the inside and outside are independent.
            let mut total = 0.0;
            for j in (1..idx.len()).step_by(2) {
                if idx[j] == idx[0] {
                    let inner = self.count(&idx[1..j])?;
                    if inner != 0.0 {
                        total += inner * self.count(&idx[j + 1..])?;
                    }
                }
            }
            Ok(C64::new(total, 0.0))
        })?;
        Ok(v.re)
    }
}

impl TraceModel for SemicircularModel {
    fn kind(&self) -> &'static str {
        "semicircular"
    }

    fn system(&self) -> &Arc<GeneratorSystem> {
        &self.sys
    }

    fn trace_word(&self, w: &Word) -> Result<C64> {
        check_word(&self.sys, w, self.degree_limit())?;
        let idx: Vec<usize> = w.indices().collect();
        Ok(C64::new(self.count(&idx)?, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_and_mixed_moments() {
        let m = SemicircularModel::new(2, 12);
        let tr = |ix: &[usize]| m.trace_word(&Word::from_indices(ix)).unwrap().re;
        assert_eq!(tr(&[0, 0, 0, 0]), 2.0);
        assert_eq!(tr(&[0, 1, 0, 1]), 0.0);
        assert_eq!(tr(&[0, 0, 1, 1]), 1.0);
        assert_eq!(tr(&[0; 12]), 132.0);
        assert_eq!(tr(&[0, 1, 1, 0]), 1.0);
        assert_eq!(tr(&[0]), 0.0);
        assert!(m.trace_word(&Word::from_indices(&[2])).is_err());
    }
}
