use std::sync::Arc;

use super::{check_word, TraceCache, TraceModel, C64};
use crate::error::{Error, Result};
use crate::ncalg::{GeneratorSystem, Word};

/// Free product of tracial models; generators are the concatenation of the factors' generators.
#[derive(Debug)]
pub struct FreeProductModel {
    sys: Arc<GeneratorSystem>,
    factors: Vec<Arc<dyn TraceModel>>,
    offsets: Vec<usize>,
    owner: Vec<usize>,
    cache: TraceCache,
}

impl FreeProductModel {
    pub fn new(factors: Vec<Arc<dyn TraceModel>>, cap: usize) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::spec("factors", "at least one factor is required"));
        }
        let mut offsets = Vec::with_capacity(factors.len());
        let mut owner = Vec::new();
        let mut pairing = Vec::new();
        for (f, m) in factors.iter().enumerate() {
            let s = m.system();
            if s.b().is_some() {
                return Err(Error::spec(
                    format!("factors[{f}]"),
                    "factors with a coefficient algebra are not supported",
                ));
            }
            let off = owner.len();
            offsets.push(off);
            for i in 0..s.n() {
                owner.push(f);
                pairing.push(off + s.star(i));
            }
        }
        Ok(FreeProductModel {
            sys: Arc::new(GeneratorSystem::with_pairing(pairing)?.with_cap(cap)),
            factors,
            offsets,
            owner,
            cache: TraceCache::default(),
        })
    }

    pub fn factors(&self) -> &[Arc<dyn TraceModel>] {
        &self.factors
    }

    /// Maximal runs of letters from one factor, as (factor, global letters).
    fn runs(&self, w: &Word) -> Vec<(usize, Vec<usize>)> {
        let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
        for i in w.indices() {
            let f = self.owner[i];
            match out.last_mut() {
                Some((g, run)) if *g == f => run.push(i),
                _ => out.push((f, vec![i])),
            }
        }
        out
    }

    fn factor_trace(&self, f: usize, letters: &[usize]) -> Result<C64> {
        let local: Vec<usize> = letters.iter().map(|i| i - self.offsets[f]).collect();
        self.factors[f].trace_word(&Word::from_indices(&local))
    }

    /// Centering recursion:
    /// `τ(a_1 ⋯ a_m) = −Σ_{S ⊊ [m]} (−1)^{m−|S|} Π_{j∉S} τ(a_j) · τ(Π_{j∈S} a_j)`
    /// for alternating runs `a_j`, because the product of the centered runs has trace zero.
    fn evaluate(&self, w: &Word) -> Result<C64> {
        let runs = self.runs(w);
        match runs.len() {
            0 => return Ok(C64::new(1.0, 0.0)),
            1 => return self.factor_trace(runs[0].0, &runs[0].1),
            _ => {}
        }
        let m = runs.len();
        let taus = runs
            .iter()
            .map(|(f, r)| self.factor_trace(*f, r))
            .collect::<Result<Vec<_>>>()?;
        let mut total = C64::new(0.0, 0.0);
        for mask in 0u64..(1u64 << m) - 1 {
            let mut prod = C64::new(1.0, 0.0);
            let mut kept = Vec::new();
            for (j, (_, r)) in runs.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    kept.extend_from_slice(r);
                } else {
                    prod *= taus[j];
                }
            }
            if prod == C64::new(0.0, 0.0) {
                continue;
            }
            let sign = if (m - mask.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
            total += prod * sign * self.trace_word(&Word::from_indices(&kept))?;
        }
        Ok(-total)
    }
}

impl TraceModel for FreeProductModel {
    fn kind(&self) -> &'static str {
        "free_product"
    }

    fn system(&self) -> &Arc<GeneratorSystem> {
        &self.sys
    }

    /// The centering recursion costs 2^runs per word, so words are limited to the cap itself.
    fn degree_limit(&self) -> usize {
        self.sys.cap()
    }

    fn trace_word(&self, w: &Word) -> Result<C64> {
        check_word(&self.sys, w, self.degree_limit())?;
        self.cache.get_or_try(w, || self.evaluate(w))
    }

    fn as_free_product(&self) -> Option<&FreeProductModel> {
        Some(self)
    }
}
