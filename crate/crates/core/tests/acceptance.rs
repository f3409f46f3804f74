//! Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.
//!
//! Oracles are computed here independently of the library wherever a value is derived
//! (Catalan moments, free moment factorization, closed-form rationals).

use std::io::Write;
use std::sync::Arc;

use free_stein::closedform::{
    eps_kernel, fd_sigma, graph_sigma, log_energy, one_var_sigma, radulescu, staircase, GraphSpec,
    ProjectionPair, Spectrum,
};
use free_stein::ncalg::coeff::{from_c64, rational, to_c64};
use free_stein::ncalg::{
    diff_quotient, jacobian, mai_kernel, Coeff, GeneratorSystem, KernelMatrix, NCPoly, TensorPoly,
    Word,
};
use free_stein::stein::{
    conjugate_variable_check, discrepancy, irregularity_estimate, radius_sweep, sigma_exact,
    sigma_exact_fd, DegreeScheme, GramSystem,
};
use free_stein::trace::{
    inner_hs, inner_l2, trace_poly, Block, Density, FreeProductModel, MatrixModel, MeasureModel,
    SemicircularModel, TraceModel, C64,
};
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: usize = 12;

/// Collects the checks of one criterion and reports them on a single line.
struct Verdict {
    id: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    fn new(id: &'static str) -> Self {
        Verdict {
            id,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn close(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.check(ok, format!("{label}: {got:.12} vs {want} (tol {tol:e})"));
    }

    /// Writes straight to stderr: the harness captures `println!`, and the verdict line should
    /// show up in a plain `cargo test` run as well.
    fn finish(self) {
        let line = if self.failures.is_empty() {
            format!("criterion {}: PASS ({} checks)", self.id, self.notes.len())
        } else {
            format!("criterion {}: FAIL [{}]", self.id, self.failures.join("; "))
        };
        let _ = writeln!(std::io::stderr(), "{line}");
        if !self.failures.is_empty() {
            panic!("criterion {} failed: {:?}", self.id, self.failures);
        }
    }
}

/// `(size, weight)` per block.
type Blocks = Vec<(usize, num_rational::BigRational)>;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn mat(rows: usize, vals: &[f64]) -> DMatrix<C64> {
    DMatrix::from_row_slice(rows, rows, &vals.iter().map(|&v| c(v)).collect::<Vec<_>>())
}

fn block(size: usize, weight: f64) -> Block {
    Block {
        size,
        weight,
        exact_weight: None,
    }
}

fn two_point_matrix() -> MatrixModel {
    MatrixModel::diagonal(&[0.5, 0.5], &[vec![-1.0, 1.0]], CAP).unwrap()
}

fn two_point_measure() -> MeasureModel {
    MeasureModel::new(vec![(-1.0, 0.5), (1.0, 0.5)], None, CAP).unwrap()
}

fn three_point_measure() -> MeasureModel {
    let third = 1.0 / 3.0;
    MeasureModel::new(vec![(-1.0, third), (0.0, third), (1.0, third)], None, CAP).unwrap()
}

fn catalan(k: usize) -> f64 {
    (0..k).fold(1.0, |c, i| c * 2.0 * (2 * i + 1) as f64 / (i + 2) as f64)
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, max_deg: usize) -> Word {
    let deg = rng.gen_range(0..=max_deg);
    let idx: Vec<usize> = (0..deg).map(|_| rng.gen_range(0..n)).collect();
    Word::from_indices(&idx)
}

fn random_poly(rng: &mut ChaCha8Rng, sys: &Arc<GeneratorSystem>, max_deg: usize) -> NCPoly {
    let terms = rng.gen_range(1..=4);
    let mut out = Vec::new();
    for _ in 0..terms {
        let w = random_word(rng, sys.n(), max_deg);
        let re = rng.gen_range(-3i64..=3);
        let im = rng.gen_range(-1i64..=1);
        out.push((w, Complex::new(rational(re, 1), rational(im, 1))));
    }
    NCPoly::from_terms(sys, out).unwrap()
}

#[test]
fn criterion_01_calculus() {
    let mut v = Verdict::new("1 Leibniz and Jacobian identities");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    for trial in 0..500 {
        let n = 1 + trial % 3;
        let sys = Arc::new(GeneratorSystem::self_adjoint(n).with_cap(CAP));
        let p = random_poly(&mut rng, &sys, 6);
        let q = random_poly(&mut rng, &sys, 6);
        let one = NCPoly::one(&sys);
        for i in 0..n {
            let lhs = diff_quotient(i, &p.mul(&q).unwrap()).unwrap();
            let rhs = diff_quotient(i, &p)
                .unwrap()
                .act(&one, &q)
                .unwrap()
                .add(&diff_quotient(i, &q).unwrap().act(&p, &one).unwrap())
                .unwrap();
            if lhs != rhs {
                mismatches += 1;
            }
        }
    }
    v.check(mismatches == 0, format!("{mismatches} Leibniz mismatches"));
    for n in 1..=3 {
        let sys = Arc::new(GeneratorSystem::self_adjoint(n).with_cap(CAP));
        let gens = NCPoly::generators(&sys);
        for (i, g) in gens.iter().enumerate() {
            for j in 0..n {
                let d = diff_quotient(j, g).unwrap();
                let want = if i == j {
                    TensorPoly::unit(&sys)
                } else {
                    TensorPoly::zero(&sys)
                };
                v.check(d == want, format!("d_{j}(t_{i}) for n = {n}"));
            }
        }
        let j = jacobian(&gens).unwrap();
        v.check(j == KernelMatrix::identity(&sys), format!("J(T) = 1 for n = {n}"));
    }
    v.finish();
}

#[test]
fn criterion_02_mai_kernel_identity() {
    let mut v = Verdict::new("2 Mai kernel is a Stein kernel");
    let m = SemicircularModel::new(2, CAP);
    let sys = m.system().clone();
    let x = NCPoly::generators(&sys);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tests = free_stein::stein::monomials(&sys, 0, 4);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        // The kernel is only a Stein kernel for centered Ξ.
        let xi: Vec<NCPoly> = (0..2)
            .map(|_| {
                let p = random_poly(&mut rng, &sys, 2);
                let mean = from_c64(trace_poly(&m, &p).unwrap()).unwrap();
                p.sub(&NCPoly::scalar(&sys, mean)).unwrap()
            })
            .collect();
        let a = mai_kernel(&xi, &x).unwrap();
        for slot in 0..2 {
            for w in &tests {
                let mut p = vec![NCPoly::zero(&sys); 2];
                p[slot] = NCPoly::monomial(&sys, w.clone(), Coeff::new(rational(1, 1), rational(0, 1))).unwrap();
                let lhs: C64 = (0..2).map(|i| inner_l2(&m, &xi[i], &p[i]).unwrap()).sum();
                let rhs = inner_hs(&m, &a, &jacobian(&p).unwrap()).unwrap();
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    v.check(worst <= 1e-8, format!("max residual {worst:e}"));
    v.finish();
}

#[test]
fn criterion_03_semicircular_exactness() {
    let mut v = Verdict::new("3 semicircular exactness");
    for n in 1..=2 {
        let m = SemicircularModel::new(n, CAP);
        let x = NCPoly::generators(m.system());
        for d_xi in 0..=2 {
            for d_proj in 1..=4 {
                let r = discrepancy(&m, &x, &DegreeScheme::new(d_xi, d_proj)).unwrap();
                v.check(
                    r.value.abs() <= 1e-8,
                    format!("n = {n} ({d_xi},{d_proj}) discrepancy {:e}", r.value),
                );
            }
        }
        let s = irregularity_estimate(&m, &DegreeScheme::with_default_proj(1)).unwrap();
        v.close(&format!("n = {n} sigma"), s.sigma, n as f64, 1e-6);
        let cv = conjugate_variable_check(&m, &x, 4).unwrap();
        v.check(cv.residual <= 1e-10, format!("n = {n} conjugate residual {:e}", cv.residual));
        v.close(&format!("n = {n} fisher"), cv.fisher, n as f64, 1e-10);
    }
    v.finish();
}

#[test]
fn criterion_04_one_variable_atoms() {
    let mut v = Verdict::new("4 one-variable atoms");
    // (a) exact closed form
    let two = one_var_sigma(&[0.5, 0.5], Some(&[rational(1, 2), rational(1, 2)]));
    let third = rational(1, 3);
    let three = one_var_sigma(&[1.0 / 3.0; 3], Some(&[third.clone(), third.clone(), third.clone()]));
    v.check(two.exact.as_ref().unwrap().0 .0 == rational(1, 2), "(a) two-point exactly 1/2");
    v.check(three.exact.as_ref().unwrap().0 .0 == rational(1, 3), "(a) three-point exactly 1/3");
    // (b) finite-dimensional exact mode
    let two_fd = sigma_exact_fd(&two_point_matrix(), 2).unwrap();
    v.close("(b) two-point", two_fd.irregularity_sqr(), 0.5, 1e-10);
    let three_m = MatrixModel::diagonal(&[1.0 / 3.0; 3], &[vec![-1.0, 0.0, 1.0]], CAP).unwrap();
    let three_fd = sigma_exact_fd(&three_m, 2).unwrap();
    v.close("(b) three-point", three_fd.irregularity_sqr(), 1.0 / 3.0, 1e-10);
    // (c) truncated estimate
    let scheme = DegreeScheme::new(2, 4);
    let two_est = irregularity_estimate(&two_point_measure(), &scheme).unwrap();
    v.close("(c) two-point at (2,4)", two_est.irregularity_sqr(), 0.5, 1e-6);
    let three_est = irregularity_estimate(&three_point_measure(), &scheme).unwrap();
    v.close("(c) three-point at (2,4)", three_est.irregularity_sqr(), 1.0 / 3.0, 1e-6);
    v.finish();
}

#[test]
fn criterion_05_finite_dimensional_formula() {
    let mut v = Verdict::new("5 finite-dimensional formula");
    let sz = mat(2, &[1.0, 0.0, 0.0, -1.0]);
    let sx = mat(2, &[0.0, 1.0, 1.0, 0.0]);
    let cases: Vec<(&str, MatrixModel, Blocks)> = vec![
        (
            "C+C (1/2,1/2)",
            two_point_matrix(),
            vec![(1, rational(1, 2)), (1, rational(1, 2))],
        ),
        (
            "M2 (1)",
            MatrixModel::new(vec![block(2, 1.0)], vec![vec![sz.clone()], vec![sx.clone()]], None, None, CAP)
                .unwrap(),
            vec![(2, rational(1, 1))],
        ),
        (
            "M2+C (2/3,1/3)",
            MatrixModel::new(
                vec![block(2, 2.0 / 3.0), block(1, 1.0 / 3.0)],
                vec![vec![sz, mat(1, &[2.0])], vec![sx, mat(1, &[0.0])]],
                None,
                None,
                CAP,
            )
            .unwrap(),
            vec![(2, rational(2, 3)), (1, rational(1, 3))],
        ),
    ];
    for (name, m, blocks) in cases {
        let want = num_traits::ToPrimitive::to_f64(&fd_sigma(&blocks).unwrap()).unwrap();
        let r = sigma_exact_fd(&m, 4).unwrap();
        let at3 = r.trail[2].1;
        v.close(&format!("{name} at d = 3"), at3, want, 1e-9);
        v.close(&format!("{name} at d = 4"), r.sigma, want, 1e-9);
        let monotone = r.trail.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-9);
        v.check(monotone, format!("{name} trail nonincreasing {:?}", r.trail));
    }
    v.finish();
}

#[test]
fn criterion_06_bounded_fisher() {
    let mut v = Verdict::new("6 R-bounded irregularity");
    let m = SemicircularModel::new(1, CAP);
    let radii: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64).collect();
    let sweep = radius_sweep(&m, &DegreeScheme::with_default_proj(1), &radii).unwrap();
    let vals: Vec<f64> = sweep.iter().map(|r| r.value).collect();
    for (r, val) in radii.iter().zip(&vals) {
        if [1.0, 1.5, 2.0].contains(r) {
            v.check(val.abs() <= 1e-8, format!("R = {r}: {val:e}"));
        }
        if *r == 0.5 {
            v.check(*val > 0.05, format!("R = 0.5: {val}"));
        }
    }
    let convex = vals.windows(3).all(|w| w[0] + w[2] - 2.0 * w[1] >= -1e-8);
    v.check(convex, format!("convex sweep {vals:?}"));
    v.finish();
}

#[test]
fn criterion_07_additivity() {
    let mut v = Verdict::new("7 additivity over free products");
    let fp = FreeProductModel::new(
        vec![Arc::new(two_point_matrix()), Arc::new(two_point_matrix())],
        CAP,
    )
    .unwrap();
    let est = irregularity_estimate(&fp, &DegreeScheme::new(2, 4)).unwrap();
    v.close("estimate at (2,4)", est.irregularity_sqr(), 1.0, 2e-3);
    let exact = sigma_exact(&fp, 2).unwrap();
    v.close("exact", exact.irregularity_sqr(), 1.0, 1e-10);
    v.finish();
}

#[test]
fn criterion_08_generator_invariance() {
    let mut v = Verdict::new("8 generator invariance");
    let w = [1.0 / 3.0; 3];
    let x = MatrixModel::diagonal(&w, &[vec![1.0, 2.0, 3.0]], CAP).unwrap();
    let xx = MatrixModel::diagonal(&w, &[vec![1.0, 2.0, 3.0], vec![1.0, 4.0, 9.0]], CAP).unwrap();
    let a = sigma_exact_fd(&x, 3).unwrap().sigma;
    let b = sigma_exact_fd(&xx, 3).unwrap().sigma;
    v.close("sigma(x) vs sigma(x, x^2)", a, b, 1e-10);
    v.close("sigma(x)", a, 2.0 / 3.0, 1e-10);
    v.finish();
}

#[test]
fn criterion_09_mai_kernel_gap() {
    let mut v = Verdict::new("9 Mai kernel does not attain the discrepancy");
    let m = SemicircularModel::new(1, CAP);
    let sys = m.system().clone();
    let x = NCPoly::generators(&sys);
    let a = mai_kernel(&x, &x).unwrap();
    let diff = a.sub(&KernelMatrix::identity(&sys)).unwrap();
    let lib = inner_hs(&m, &diff, &diff).unwrap().re;
    // Independent oracle: every word is a power of t, so τ(u* v) is a Catalan number.
    let moment = |k: usize| if k % 2 == 1 { 0.0 } else { catalan(k / 2) };
    let terms: Vec<(usize, usize, C64)> = diff
        .get(0, 0)
        .terms()
        .map(|(l, r, k)| (l.degree(), r.degree(), to_c64(k)))
        .collect();
    let mut oracle = C64::new(0.0, 0.0);
    for (a1, b1, k1) in &terms {
        for (a2, b2, k2) in &terms {
            oracle += k1 * k2.conj() * moment(a1 + a2) * moment(b1 + b2);
        }
    }
    v.close("library norm", lib, 1.5, 1e-10);
    v.close("moment oracle", oracle.re, 1.5, 1e-10);
    let d = discrepancy(&m, &x, &DegreeScheme::with_default_proj(1)).unwrap();
    v.check(d.value.abs() <= 1e-8, format!("discrepancy {:e}", d.value));
    v.finish();
}

#[test]
fn criterion_10_appendix_closed_forms() {
    let mut v = Verdict::new("10 projection and graph closed forms");
    let r = radulescu(&[ProjectionPair {
        tau_e: rational(1, 2),
        tau_f: rational(1, 2),
        equal: true,
    }])
    .unwrap();
    v.check(r.t.0 == rational(5, 4), "t = 5/4");
    v.check(r.irregularity_sqr.0 == rational(3, 4), "irregularity^2 = 3/4");
    v.check(r.sigma.0.clone() + rational(1, 1) == r.t.0, "sigma + 1 = t");
    let g = graph_sigma(&GraphSpec {
        weights: vec![rational(1, 2), rational(1, 2)],
        edges: vec![(0, 1, 1)],
    })
    .unwrap();
    v.check(g.t.0 == rational(1, 1), "graph t = 1");
    v.check(g.sigma_xb.0.clone() + g.sigma_y.0.clone() == g.t.0, "graph identity");
    v.finish();
}

#[test]
fn criterion_11_eps_kernel_plateau() {
    let mut v = Verdict::new("11 eps-kernel bound and plateau");
    let two = Spectrum::of_model(&two_point_measure()).unwrap();
    let epss = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
    let bounds: Vec<f64> = epss
        .iter()
        .map(|&e| eps_kernel(&two, e, 21, 1e-10).unwrap().bound)
        .collect();
    v.close("two-point bound at 1e-3", bounds[4], 0.5, 1e-3);
    let up = bounds.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let down = bounds.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    v.check(up || down, format!("monotone in eps {bounds:?}"));
    let mixed = MeasureModel::new(
        vec![(3.0, 0.5)],
        Some(Density::Semicircle {
            center: 0.0,
            radius: 2.0,
        }),
        CAP,
    )
    .unwrap();
    let sp = Spectrum::of_model(&mixed).unwrap();
    let k2 = eps_kernel(&sp, 1e-2, 21, 1e-10).unwrap();
    let k3 = eps_kernel(&sp, 1e-3, 21, 1e-10).unwrap();
    v.close("mixed bound at 1e-3", k3.bound, 0.25, 1e-3);
    let drift = (k2.g_norm - k3.g_norm).abs() / k3.g_norm;
    v.check(drift < 0.01, format!("g norm drift {drift:e}"));
    v.finish();
}

#[test]
fn criterion_12_log_energy() {
    let mut v = Verdict::new("12 log-energy fixtures");
    let uniform = MeasureModel::new(vec![], Some(Density::Uniform { a: 0.0, b: 1.0 }), CAP).unwrap();
    let e = log_energy(&Spectrum::of_model(&uniform).unwrap(), 1e-12).unwrap();
    match e {
        Some(e) => v.close("uniform [0,1]", e, -1.5, 1e-6),
        None => v.check(false, "uniform [0,1] flagged atomic"),
    }
    for (name, sp) in [
        ("two-point", Spectrum::of_model(&two_point_measure()).unwrap()),
        ("three-point", Spectrum::of_model(&three_point_measure()).unwrap()),
    ] {
        let e = log_energy(&sp, 1e-10).unwrap();
        v.check(e.is_none(), format!("{name} flagged as -inf"));
    }
    let stairs = staircase(6).unwrap();
    let decreasing = stairs.windows(2).all(|w| w[1].partial_sum < w[0].partial_sum);
    v.check(decreasing, "staircase partial sums decrease");
    let bounded = stairs.iter().all(|s| s.partial_sum <= s.reference + 1e-9 * s.reference.abs());
    v.check(bounded, "staircase partial sums below the reference");
    let last = stairs.last().unwrap().partial_sum;
    v.check(last < -1e6, format!("staircase level 6 partial sum {last:.3} below -1e6"));
    v.finish();
}

#[test]
fn criterion_13_trace_properties() {
    let mut v = Verdict::new("13 trace property suite");
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let h1 = mat(2, &[1.0, 0.5, 0.5, -0.3]);
    let h2 = mat(2, &[0.2, -1.0, -1.0, 0.7]);
    let matrix = MatrixModel::new(
        vec![block(2, 0.75), block(1, 0.25)],
        vec![vec![h1, mat(1, &[2.0])], vec![h2, mat(1, &[-1.0])]],
        None,
        None,
        CAP,
    )
    .unwrap();
    let semi = SemicircularModel::new(2, CAP);
    let a = MeasureModel::new(vec![(0.0, 1.0 / 3.0), (1.0, 2.0 / 3.0)], None, CAP).unwrap();
    let b = MeasureModel::new(
        vec![],
        Some(Density::Semicircle {
            center: 1.0,
            radius: 2.0,
        }),
        CAP,
    )
    .unwrap();
    let fp = FreeProductModel::new(vec![Arc::new(a), Arc::new(b)], CAP).unwrap();
    let models: [(&str, &dyn TraceModel); 3] = [("matrix", &matrix), ("semicircular", &semi), ("free product", &fp)];

    // τ(pq) = τ(qp)
    let mut worst: f64 = 0.0;
    for (_, m) in models {
        let sys = m.system().clone();
        for _ in 0..40 {
            let p = random_poly(&mut rng, &sys, 4);
            let q = random_poly(&mut rng, &sys, 4);
            let pq = trace_poly(m, &p.mul(&q).unwrap()).unwrap();
            let qp = trace_poly(m, &q.mul(&p).unwrap()).unwrap();
            worst = worst.max((pq - qp).norm() / (1.0 + pq.norm()));
        }
    }
    v.check(worst <= 1e-10, format!("trace property {worst:e}"));

    for (name, m) in models {
        let g = GramSystem::new(m, &DegreeScheme::new(1, 3)).unwrap();
        let p = g.projector();
        v.check(
            p.min_eigenvalue() >= -1e-9 * p.lambda_max(),
            format!("{name} Gram positivity {:e}", p.min_eigenvalue()),
        );
    }

    let s1 = SemicircularModel::new(1, CAP);
    let mut cat: f64 = 0.0;
    for k in 0..=CAP {
        let t = NCPoly::monomial(s1.system(), Word::from_indices(&vec![0; k]), Coeff::new(rational(1, 1), rational(0, 1))).unwrap();
        let want = if k % 2 == 1 { 0.0 } else { catalan(k / 2) };
        cat = cat.max((trace_poly(&s1, &t).unwrap().re - want).abs());
    }
    v.check(cat <= 1e-9, format!("Catalan moments {cat:e}"));

    // Freeness: τ(abab) = τ(a²)τ(b)² + τ(a)²τ(b²) − τ(a)²τ(b)², and centered alternating words vanish.
    let w = |idx: &[usize]| fp.trace_word(&Word::from_indices(idx)).unwrap().re;
    let (ta, ta2, tb, tb2) = (w(&[0]), w(&[0, 0]), w(&[1]), w(&[1, 1]));
    let want = ta2 * tb * tb + ta * ta * tb2 - ta * ta * tb * tb;
    v.close("tau(abab)", w(&[0, 1, 0, 1]), want, 1e-10);
    v.close("tau(ab)", w(&[0, 1]), ta * tb, 1e-10);
    let sys = fp.system().clone();
    let centered = |i: usize, mean: f64| {
        NCPoly::t(&sys, i)
            .unwrap()
            .sub(&NCPoly::scalar(&sys, Coeff::new(free_stein::ncalg::coeff::approx_rational(mean, 1_000_000, 1e-12).unwrap(), rational(0, 1))))
            .unwrap()
    };
    let (ca, cb) = (centered(0, ta), centered(1, tb));
    let alt = ca.mul(&cb).unwrap().mul(&ca).unwrap().mul(&cb).unwrap();
    v.close("centered alternating", trace_poly(&fp, &alt).unwrap().norm(), 0.0, 1e-10);
    v.finish();
}
