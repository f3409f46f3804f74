mod common;

use std::sync::Arc;

use common::{atoms, CAP};
use free_stein::ncalg::{NCPoly, Word};
use free_stein::trace::{
    inner_l2, Density, FreeProductModel, MatrixModel, MeasureModel, SemicircularModel, TraceModel, C64,
};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

/// Non-crossing pairings of `2k` points, by brute force over all pairings.
fn noncrossing_pairings(k: usize) -> usize {
    fn go(free: &mut Vec<usize>, chords: &mut Vec<(usize, usize)>) -> usize {
        let Some(&a) = free.first() else {
            let crossing = chords.iter().any(|&(a, b)| {
                chords.iter().any(|&(c, d)| a < c && c < b && b < d)
            });
            return usize::from(!crossing);
        };
        let mut total = 0;
        for j in 1..free.len() {
            let b = free[j];
            let rest: Vec<usize> = free.iter().copied().filter(|&x| x != a && x != b).collect();
            let saved = std::mem::replace(free, rest);
            chords.push((a, b));
            total += go(free, chords);
            chords.pop();
            *free = saved;
        }
        total
    }
    go(&mut (0..2 * k).collect(), &mut Vec::new())
}

fn models() -> Vec<Box<dyn TraceModel>> {
    let c = |v: f64| C64::new(v, 0.0);
    let h = DMatrix::from_row_slice(2, 2, &[c(1.0), C64::new(0.5, 0.5), C64::new(0.5, -0.5), c(-1.0)]);
    let g = DMatrix::from_row_slice(2, 2, &[c(0.0), c(2.0), c(2.0), c(1.0)]);
    let blocks = vec![
        free_stein::trace::Block { size: 2, weight: 0.6, exact_weight: None },
        free_stein::trace::Block { size: 1, weight: 0.4, exact_weight: None },
    ];
    let one = |v: f64| DMatrix::from_element(1, 1, c(v));
    let matrix = MatrixModel::new(blocks, vec![vec![h, one(3.0)], vec![g, one(-1.0)]], None, None, CAP).unwrap();
    let measure = MeasureModel::new(
        vec![(1.5, 0.25)],
        Some(Density::Uniform { a: -1.0, b: 1.0 }),
        CAP,
    )
    .unwrap();
    let fp = FreeProductModel::new(
        vec![
            Arc::new(MeasureModel::new(vec![(0.0, 0.5), (2.0, 0.5)], None, CAP).unwrap()),
            Arc::new(SemicircularModel::new(1, CAP)),
        ],
        CAP,
    )
    .unwrap();
    vec![
        Box::new(matrix),
        Box::new(SemicircularModel::new(2, CAP)),
        Box::new(measure),
        Box::new(fp),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_property(u in prop::collection::vec(0usize..2, 0..=6), v in prop::collection::vec(0usize..2, 0..=6)) {
        for m in models() {
            let n = m.system().n();
            let u: Vec<usize> = u.iter().map(|i| i % n).collect();
            let v: Vec<usize> = v.iter().map(|i| i % n).collect();
            let uv = [u.clone(), v.clone()].concat();
            let vu = [v.clone(), u.clone()].concat();
            let a = m.trace_word(&Word::from_indices(&uv)).unwrap();
            let b = m.trace_word(&Word::from_indices(&vu)).unwrap();
            prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()), "{} {a} {b}", m.kind());
        }
    }

    #[test]
    fn diagonal_models_reproduce_atom_moments(a in atoms(4), k in 0usize..=8) {
        let m = a.matrix();
        let got = m.trace_word(&Word::from_indices(&vec![0; k])).unwrap().re;
        let want: f64 = a.locations.iter().zip(a.masses()).map(|(t, w)| w * t.powi(k as i32)).sum();
        prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()));
    }
}

#[test]
fn gram_of_words_is_positive() {
    for m in models() {
        let sys = m.system().clone();
        let words = Word::all_up_to(sys.n(), 0, 3);
        let polys: Vec<NCPoly> = words
            .iter()
            .map(|w| NCPoly::monomial(&sys, w.clone(), common::one()).unwrap())
            .collect();
        let k = polys.len();
        let g = DMatrix::from_fn(k, k, |a, b| inner_l2(m.as_ref(), &polys[b], &polys[a]).unwrap());
        let herm = (&g + g.adjoint()) * C64::new(0.5, 0.0);
        let min = SymmetricEigen::new(herm).eigenvalues.min();
        assert!(min >= -1e-9, "{}: {min}", m.kind());
    }
}

#[test]
fn semicircular_moments_count_noncrossing_pairings() {
    let s = SemicircularModel::new(1, CAP);
    let density = MeasureModel::new(vec![], Some(Density::Semicircle { center: 0.0, radius: 2.0 }), CAP).unwrap();
    for k in 0..=6 {
        let word = Word::from_indices(&vec![0; 2 * k]);
        let want = if k <= 5 {
            noncrossing_pairings(k) as f64
        } else {
            132.0
        };
        if k <= 5 {
            assert_eq!(s.trace_word(&word).unwrap().re, want, "k = {k}");
        }
        let got = density.trace_word(&word).unwrap().re;
        assert!((got - want).abs() <= 1e-10, "density k = {k}: {got}");
        let odd = Word::from_indices(&vec![0; 2 * k + 1]);
        assert!(density.trace_word(&odd).unwrap().norm() <= 1e-12);
    }
}

#[test]
fn free_products_keep_factor_moments_and_kill_centered_alternations() {
    let a = Arc::new(MeasureModel::new(vec![(0.0, 0.25), (1.0, 0.75)], None, CAP).unwrap());
    let b = Arc::new(SemicircularModel::new(1, CAP));
    let fp = FreeProductModel::new(vec![a.clone(), b.clone()], CAP).unwrap();
    for k in 0..=6 {
        let w = Word::from_indices(&vec![0; k]);
        assert_eq!(fp.trace_word(&w).unwrap(), a.trace_word(&w).unwrap());
        let w1 = Word::from_indices(&vec![1; k]);
        assert_eq!(fp.trace_word(&w1).unwrap(), b.trace_word(&Word::from_indices(&vec![0; k])).unwrap());
    }
    let sys = fp.system().clone();
    let centered = |i: usize, pow: usize| -> NCPoly {
        let p = NCPoly::monomial(&sys, Word::from_indices(&vec![i; pow]), common::one()).unwrap();
        let mean = free_stein::trace::trace_poly(&fp, &p).unwrap();
        let mean = free_stein::ncalg::coeff::from_c64(mean).unwrap();
        p.sub(&NCPoly::scalar(&sys, mean)).unwrap()
    };
    let seqs: [&[(usize, usize)]; 3] = [
        &[(0, 1), (1, 2)],
        &[(0, 2), (1, 1), (0, 1), (1, 2)],
        &[(1, 3), (0, 1), (1, 1), (0, 2), (1, 2)],
    ];
    for seq in seqs {
        let prod = seq
            .iter()
            .map(|&(i, p)| centered(i, p))
            .reduce(|x, y| x.mul(&y).unwrap())
            .unwrap();
        let t = free_stein::trace::trace_poly(&fp, &prod).unwrap();
        assert!(t.norm() <= 1e-10, "{seq:?}: {t}");
    }
}
