//! Closed forms that are exact rational expressions of their inputs.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ncalg::coeff::format_rational;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn f(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A rational value together with its float rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn value(&self) -> f64 {
        f(&self.0)
    }
}

impl Serialize for Exact {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Exact", 2)?;
        st.serialize_field("value", &self.value())?;
        st.serialize_field("exact", &format_rational(&self.0))?;
        st.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OneVar {
    pub irregularity_sqr: f64,
    pub sigma: f64,
    /// Present when every atom mass is an exact rational.
    pub exact: Option<(Exact, Exact)>,
}

/// One self-adjoint variable: `Σ*² = Σ μ({t})²` over atoms and `σ = 1 − Σ*²`.
pub fn one_var_sigma(masses: &[f64], exact: Option<&[BigRational]>) -> OneVar {
    let s: f64 = masses.iter().map(|m| m * m).sum();
    let exact = exact.map(|ms| {
        let s: BigRational = ms.iter().map(|m| m * m).sum();
        (Exact(s.clone()), Exact(BigRational::one() - s))
    });
    OneVar {
        irregularity_sqr: s,
        sigma: 1.0 - s,
        exact,
    }
}

/// `1 − Σ λ_i² / k_i²` for `⊕ (M_{k_i}, λ_i tr)`.
pub fn fd_sigma(blocks: &[(usize, BigRational)]) -> Result<BigRational> {
    if blocks.is_empty() {
        return Err(Error::spec("blocks", "at least one block is required"));
    }
    if let Some(i) = blocks.iter().position(|(k, w)| *k == 0 || !w.is_positive()) {
        return Err(Error::spec(
            format!("blocks[{i}]"),
            "sizes and weights must be positive",
        ));
    }
    let total: BigRational = blocks.iter().map(|(_, w)| w.clone()).sum();
    if total != BigRational::one() {
        return Err(Error::spec(
            "blocks",
            format!("weights sum to {}, not 1", format_rational(&total)),
        ));
    }
    let s: BigRational = blocks
        .iter()
        .map(|(k, w)| {
            let k = q(*k as i64);
            w * w / (&k * &k)
        })
        .sum();
    Ok(BigRational::one() - s)
}

/// `β₁ − β₀ + 1` from user-supplied ℓ²-Betti numbers.
pub fn group_sigma(beta0: f64, beta1: f64) -> Result<f64> {
    if !(beta0 >= 0.0 && beta1 >= 0.0 && beta0.is_finite() && beta1.is_finite()) {
        return Err(Error::spec("beta", "Betti numbers must be finite and nonnegative"));
    }
    Ok(beta1 - beta0 + 1.0)
}

/// A finite group has `β₀ = 1/|Γ|` and `β₁ = 0`.
pub fn finite_group_sigma(order: u64) -> Result<BigRational> {
    if order == 0 {
        return Err(Error::spec("order", "group order must be at least 1"));
    }
    Ok(BigRational::one() - BigRational::new(1.into(), order.into()))
}

/// One pair of projections `(e_j, f_j)` free from `s₀`; `equal` means `e_j = f_j`,
/// otherwise they are orthogonal.
#[derive(Debug, Clone)]
pub struct ProjectionPair {
    pub tau_e: BigRational,
    pub tau_f: BigRational,
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Radulescu {
    pub k_total: u64,
    pub t: Exact,
    pub irregularity_sqr: Exact,
    pub sigma: Exact,
    /// `σ(X:B) + σ(s₀) = t` with `σ(s₀) = 1`.
    pub identity_holds: bool,
}

/// Generators `e_j s₀ f_j` (and their adjoints when `e_j ≠ f_j`) of a free semicircular
/// compression, relative to `B = W*(s₀)`.
pub fn radulescu(pairs: &[ProjectionPair]) -> Result<Radulescu> {
    let mut k_total = 0u64;
    let mut t = BigRational::one();
    for (j, p) in pairs.iter().enumerate() {
        for (name, v) in [("tau_e", &p.tau_e), ("tau_f", &p.tau_f)] {
            if !v.is_positive() || v > &BigRational::one() {
                return Err(Error::spec(format!("pairs[{j}].{name}"), "trace must lie in (0, 1]"));
            }
        }
        if p.equal && p.tau_e != p.tau_f {
            return Err(Error::spec(format!("pairs[{j}]"), "equal projections need equal traces"));
        }
        let k = if p.equal { 1 } else { 2 };
        k_total += k;
        t += q(k as i64) * &p.tau_e * &p.tau_f;
    }
    let kq = q(k_total as i64);
    let irr = &kq + BigRational::one() - &t;
    let sigma = &kq - &irr;
    let identity_holds = &sigma + BigRational::one() == t;
    Ok(Radulescu {
        k_total,
        t: Exact(t),
        irregularity_sqr: Exact(irr),
        sigma: Exact(sigma),
        identity_holds,
    })
}

/// A weighted graph with undirected edge multiplicities.
#[derive(Debug, Clone)]
pub struct GraphSpec {
    pub weights: Vec<BigRational>,
    /// `(v, w, multiplicity)` with zero-based vertices; `v == w` is a loop.
    pub edges: Vec<(usize, usize, u64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSigma {
    pub directed_edges: u64,
    pub t: Exact,
    pub irregularity_sqr: Exact,
    pub sigma_xb: Exact,
    pub sigma_y: Exact,
    /// `σ(X:B) + σ(Y) = t`.
    pub identity_holds: bool,
    /// Loops count once towards the directed edges and once in the weighted sum.
    pub loops_present: bool,
}

/// The free graph algebra relative to its vertex projections.
pub fn graph_sigma(g: &GraphSpec) -> Result<GraphSigma> {
    let nv = g.weights.len();
    if nv == 0 {
        return Err(Error::spec("vertices", "the graph has no vertices"));
    }
    if let Some(i) = g.weights.iter().position(|w| !w.is_positive()) {
        return Err(Error::spec(format!("vertices[{i}]"), "weights must be positive"));
    }
    let total: BigRational = g.weights.iter().cloned().sum();
    if total != BigRational::one() {
        return Err(Error::spec(
            "vertices",
            format!("weights sum to {}, not 1", format_rational(&total)),
        ));
    }
    let mut mult = vec![vec![0u64; nv]; nv];
    for (i, &(v, w, m)) in g.edges.iter().enumerate() {
        if v >= nv || w >= nv {
            return Err(Error::spec(format!("edges[{i}]"), "vertex index out of range"));
        }
        mult[v][w] += m;
        if v != w {
            mult[w][v] += m;
        }
    }
    let edge_count: u64 = (0..nv)
        .flat_map(|v| (v..nv).map(move |w| (v, w)))
        .map(|(v, w)| mult[v][w])
        .sum();
    if edge_count == 0 {
        return Err(Error::spec("edges", "the graph has no edges"));
    }
    if !connected(&mult) {
        return Err(Error::spec("edges", "the graph is not connected"));
    }
    let mut directed = 0u64;
    let mut loops = false;
    let mut weighted = BigRational::zero();
    for v in 0..nv {
        for w in 0..nv {
            let n = mult[v][w];
            if n == 0 {
                continue;
            }
            if v == w {
                loops = true;
            }
            // Each undirected non-loop edge is seen from both ends; a loop only once.
            directed += n;
            weighted += q(n as i64) * &g.weights[v] * &g.weights[w];
        }
    }
    let squares: BigRational = g.weights.iter().map(|w| w * w).sum();
    let e = q(directed as i64);
    let t = BigRational::one() - &squares + &weighted;
    let irr = &e - &weighted;
    let sigma_xb = &e - &irr;
    let sigma_y = BigRational::one() - &squares;
    let identity_holds = &sigma_xb + &sigma_y == t;
    Ok(GraphSigma {
        directed_edges: directed,
        t: Exact(t),
        irregularity_sqr: Exact(irr),
        sigma_xb: Exact(sigma_xb),
        sigma_y: Exact(sigma_y),
        identity_holds,
        loops_present: loops,
    })
}

fn connected(mult: &[Vec<u64>]) -> bool {
    let n = mult.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for w in 0..n {
            if mult[v][w] > 0 && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::coeff::rational;

    #[test]
    fn finite_dimensional_examples() {
        assert_eq!(fd_sigma(&[(1, rational(1, 2)), (1, rational(1, 2))]).unwrap(), rational(1, 2));
        assert_eq!(fd_sigma(&[(2, rational(1, 1))]).unwrap(), rational(3, 4));
        assert_eq!(fd_sigma(&[(2, rational(2, 3)), (1, rational(1, 3))]).unwrap(), rational(7, 9));
        assert!(fd_sigma(&[(1, rational(1, 3))]).is_err());
    }

    #[test]
    fn groups() {
        assert_eq!(group_sigma(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(finite_group_sigma(2).unwrap(), rational(1, 2));
        assert_eq!(finite_group_sigma(3).unwrap(), rational(2, 3));
    }

    #[test]
    fn radulescu_examples() {
        let r = radulescu(&[ProjectionPair {
            tau_e: rational(1, 2),
            tau_f: rational(1, 2),
            equal: true,
        }])
        .unwrap();
        assert_eq!(r.t.0, rational(5, 4));
        assert_eq!(r.irregularity_sqr.0, rational(3, 4));
        assert_eq!(r.sigma.0, rational(1, 4));
        assert!(r.identity_holds);
        let empty = radulescu(&[]).unwrap();
        assert_eq!(empty.t.0, rational(1, 1));
        assert!(empty.irregularity_sqr.0.is_zero() && empty.sigma.0.is_zero());
    }

    #[test]
    fn graph_examples() {
        let g = graph_sigma(&GraphSpec {
            weights: vec![rational(1, 2), rational(1, 2)],
            edges: vec![(0, 1, 1)],
        })
        .unwrap();
        assert_eq!(g.t.0, rational(1, 1));
        assert_eq!(g.irregularity_sqr.0, rational(3, 2));
        assert_eq!(g.sigma_xb.0, rational(1, 2));
        assert_eq!(g.sigma_y.0, rational(1, 2));
        assert!(g.identity_holds && !g.loops_present);
        let lp = graph_sigma(&GraphSpec {
            weights: vec![rational(1, 1)],
            edges: vec![(0, 0, 1)],
        })
        .unwrap();
        assert_eq!(lp.directed_edges, 1);
        assert_eq!(lp.t.0, rational(1, 1));
        assert!(lp.identity_holds && lp.loops_present);
        let none = GraphSpec {
            weights: vec![rational(1, 2), rational(1, 2)],
            edges: vec![],
        };
        assert!(graph_sigma(&none).is_err());
        let split = GraphSpec {
            weights: vec![rational(1, 4); 4],
            edges: vec![(0, 1, 1), (2, 3, 1)],
        };
        assert!(graph_sigma(&split).is_err());
    }
}
