#![allow(dead_code)]

use std::sync::Arc;

use free_stein::ncalg::coeff::rational;
use free_stein::ncalg::{Coeff, GeneratorSystem, NCPoly, Word};
use free_stein::trace::MatrixModel;
use num_complex::Complex;
use proptest::prelude::*;

pub const CAP: usize = 12;

/// Raw polynomial data: (letters, re, im) per term.
pub type RawPoly = Vec<(Vec<usize>, i64, i64)>;

pub fn raw_poly(n: usize, max_deg: usize) -> impl Strategy<Value = RawPoly> {
    prop::collection::vec(
        (prop::collection::vec(0..n, 0..=max_deg), -3i64..=3, -2i64..=2),
        1..=4,
    )
}

pub fn coeff(re: i64, im: i64) -> Coeff {
    Complex::new(rational(re, 1), rational(im, 1))
}

pub fn one() -> Coeff {
    coeff(1, 0)
}

pub fn build(sys: &Arc<GeneratorSystem>, raw: &RawPoly) -> NCPoly {
    NCPoly::from_terms(
        sys,
        raw.iter()
            .map(|(w, re, im)| (Word::from_indices(w), coeff(*re, *im))),
    )
    .unwrap()
}

pub fn system(n: usize) -> Arc<GeneratorSystem> {
    Arc::new(GeneratorSystem::self_adjoint(n).with_cap(CAP))
}

/// Atoms at distinct integer locations with rational masses `k_i / Σk`.
#[derive(Debug, Clone)]
pub struct Atoms {
    pub locations: Vec<f64>,
    pub counts: Vec<i64>,
}

impl Atoms {
    pub fn masses(&self) -> Vec<f64> {
        let total: i64 = self.counts.iter().sum();
        self.counts.iter().map(|&k| k as f64 / total as f64).collect()
    }

    pub fn exact_masses(&self) -> Vec<num_rational::BigRational> {
        let total: i64 = self.counts.iter().sum();
        self.counts.iter().map(|&k| rational(k, total)).collect()
    }

    pub fn matrix(&self) -> MatrixModel {
        MatrixModel::diagonal(&self.masses(), std::slice::from_ref(&self.locations), CAP).unwrap()
    }

    pub fn sum_sq(&self) -> f64 {
        self.masses().iter().map(|m| m * m).sum()
    }
}

pub fn atoms(max: usize) -> impl Strategy<Value = Atoms> {
    (2..=max)
        .prop_flat_map(|k| {
            (
                prop::sample::subsequence((-4..=4).collect::<Vec<i32>>(), k),
                prop::collection::vec(1i64..=5, k),
            )
        })
        .prop_map(|(locs, counts)| Atoms {
            locations: locs.into_iter().map(f64::from).collect(),
            counts,
        })
}
