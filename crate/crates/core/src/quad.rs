//! Gauss–Legendre quadrature: fixed rules, composite doubling and adaptive bisection.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point rule on [-1, 1], computed by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The cached 20-point rule used by the composite and adaptive integrators.
fn rule20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

fn rule10() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(10))
}

fn apply(rule: &(Vec<f64>, Vec<f64>), f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (h, c) = (0.5 * (b - a), 0.5 * (b + a));
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(x, w)| w * f(c + h * x))
        .sum::<f64>()
        * h
}

/// Composite 20-point rule on `panels` equal panels.
pub fn composite(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| apply(rule20(), f, a + k as f64 * h, a + (k + 1) as f64 * h))
        .sum()
}

/// Doubles the panel count until successive estimates differ by less than `tol`
/// (relative to max(1, |I|)).
pub fn integrate_doubling(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut panels = 1;
    let mut prev = composite(f, a, b, panels);
    for _ in 0..16 {
        panels *= 2;
        let next = composite(f, a, b, panels);
        if (next - prev).abs() < tol * next.abs().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numerical(format!(
        "quadrature on [{a}, {b}] did not converge to {tol:e}"
    )))
}

/// Globally adaptive bisection: the interval with the largest 10/20-point discrepancy is split
/// until the summed discrepancy falls below `tol`.
pub fn integrate_adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 5000;
    if a == b {
        return Ok(0.0);
    }
    let estimate = |lo: f64, hi: f64| {
        let fine = apply(rule20(), f, lo, hi);
        (lo, hi, fine, (fine - apply(rule10(), f, lo, hi)).abs())
    };
    let mut parts = vec![estimate(a, b)];
    loop {
        let err: f64 = parts.iter().map(|p| p.3).sum();
        let val: f64 = parts.iter().map(|p| p.2).sum();
        if err <= tol.max(1e-15 * val.abs()) {
            return Ok(val);
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = parts[worst];
        let mid = 0.5 * (lo + hi);
        if parts.len() >= MAX_INTERVALS || mid <= lo || mid >= hi {
            return Err(Error::Numerical(format!(
                "adaptive quadrature on [{a}, {b}] stalled with error {err:e}"
            )));
        }
        parts[worst] = estimate(lo, mid);
        parts.push(estimate(mid, hi));
    }
}

/// Adaptive integration over consecutive breakpoints (sorted and clipped to [a, b]).
pub fn integrate_with_breaks(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|x| *x > a && *x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let pieces = (pts.len() - 1).max(1) as f64;
    pts.windows(2)
        .map(|w| integrate_adaptive(f, w[0], w[1], tol / pieces))
        .sum()
}
