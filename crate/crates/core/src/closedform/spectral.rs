//! Closed forms for one self-adjoint variable, evaluated from its spectral measure.

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad;
use crate::trace::{Density, TraceModel};

/// Atoms merge when closer than this.
const ATOM_MERGE: f64 = 1e-9;

/// The spectral measure of a single self-adjoint generator.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub atoms: Vec<(f64, f64)>,
    pub exact_masses: Option<Vec<BigRational>>,
    pub density: Option<(f64, Density)>,
}

impl Spectrum {
    /// Reads the measure off a measure model, a one-generator matrix model (eigenvalues with
    /// mass `λ_i / k_i` each) or a one-generator semicircular model.
    pub fn of_model(m: &dyn TraceModel) -> Result<Self> {
        let sys = m.system();
        if sys.n() != 1 || sys.star(0) != 0 {
            return Err(Error::spec(
                "model",
                "one-variable closed forms need a single self-adjoint generator",
            ));
        }
        if let Some(mm) = m.as_measure() {
            return Ok(Spectrum {
                atoms: mm.atoms().to_vec(),
                exact_masses: mm.exact_masses().map(|s| s.to_vec()),
                density: mm.density().map(|(w, d)| (w, d.clone())),
            });
        }
        if m.kind() == "semicircular" {
            return Ok(Spectrum {
                atoms: Vec::new(),
                exact_masses: Some(Vec::new()),
                density: Some((
                    1.0,
                    Density::Semicircle {
                        center: 0.0,
                        radius: 2.0,
                    },
                )),
            });
        }
        if let Some(mm) = m.as_matrix() {
            let mut atoms: Vec<(f64, f64, Option<BigRational>)> = Vec::new();
            for (i, blk) in mm.blocks().iter().enumerate() {
                let eig = mm.generator(0, i).clone().symmetric_eigen();
                let each = blk.weight / blk.size as f64;
                let each_exact = blk
                    .exact_weight
                    .as_ref()
                    .map(|w| w / BigRational::from_integer((blk.size as i64).into()));
                for &t in eig.eigenvalues.iter() {
                    match atoms.iter_mut().find(|a| (a.0 - t).abs() < ATOM_MERGE) {
                        Some(a) => {
                            a.1 += each;
                            a.2 = match (a.2.take(), &each_exact) {
                                (Some(x), Some(y)) => Some(x + y),
                                _ => None,
                            };
                        }
                        None => atoms.push((t, each, each_exact.clone())),
                    }
                }
            }
            atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
            let exact = atoms.iter().map(|a| a.2.clone()).collect::<Option<Vec<_>>>();
            return Ok(Spectrum {
                atoms: atoms.iter().map(|a| (a.0, a.1)).collect(),
                exact_masses: exact,
                density: None,
            });
        }
        Err(Error::spec(
            "model",
            format!("no spectral measure available for `{}`", m.kind()),
        ))
    }

    pub fn masses(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.1).collect()
    }

    /// `∫ f dμ`, with extra breakpoints for the continuous part.
    fn integrate(&self, f: &impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> Result<f64> {
        let atoms: f64 = self.atoms.iter().map(|(t, m)| m * f(*t)).sum();
        let cont = match &self.density {
            Some((w, d)) => w * d.integrate(f, breaks, tol)?,
            None => 0.0,
        };
        Ok(atoms + cont)
    }
}

/// Breakpoints `t ± kε` resolving a kernel of width ε centered at `t`.
fn scale_breaks(t: f64, eps: f64) -> Vec<f64> {
    let mut out = vec![t];
    for k in [0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0] {
        out.push(t - k * eps);
        out.push(t + k * eps);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsKernel {
    pub eps: f64,
    /// `‖A_ε − 𝟙‖² = ∬ ε⁴ / ((t−s)² + ε²)² dμ dμ`, an upper bound for `Σ*²`.
    pub bound: f64,
    /// `‖g_ε‖_{L²(μ)}`.
    pub g_norm: f64,
    /// `g_ε` at the atoms.
    pub g_atoms: Vec<(f64, f64)>,
    /// `g_ε` on a grid over the continuous support.
    pub g_grid: Vec<(f64, f64)>,
}

/// The kernel `A_ε(t, s) = (t−s)² / ((t−s)² + ε²)` is a Stein kernel for `x` relative to
/// `g_ε(t) = 2 ∫ (t−s) / ((t−s)² + ε²) dμ(s)`; this evaluates its distance to 𝟙 and `g_ε`.
pub fn eps_kernel(sp: &Spectrum, eps: f64, grid: usize, tol: f64) -> Result<EpsKernel> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::spec("eps", "must be positive"));
    }
    let kernel = |u: f64| {
        let d = u * u + eps * eps;
        eps.powi(4) / (d * d)
    };
    let atom_breaks: Vec<f64> = sp
        .atoms
        .iter()
        .flat_map(|(t, _)| scale_breaks(*t, eps))
        .collect();
    let inner_k = |t: f64| -> Result<f64> { sp.integrate(&|s| kernel(t - s), &scale_breaks(t, eps), tol) };
    let bound = integrate_fallible(sp, &inner_k, &atom_breaks, tol)?;

    let g = |t: f64| -> Result<f64> {
        sp.integrate(
            &|s| {
                let u = t - s;
                2.0 * u / (u * u + eps * eps)
            },
            &scale_breaks(t, eps),
            tol,
        )
    };
    let g_norm = integrate_fallible(sp, &|t| g(t).map(|v| v * v), &atom_breaks, tol)?
        .max(0.0)
        .sqrt();
    let g_atoms = sp
        .atoms
        .iter()
        .map(|(t, _)| Ok((*t, g(*t)?)))
        .collect::<Result<Vec<_>>>()?;
    let g_grid = match &sp.density {
        Some((_, d)) if grid > 0 => {
            let (a, b) = d.support();
            (0..grid)
                .map(|i| {
                    let t = a + (b - a) * (i as f64 + 0.5) / grid as f64;
                    Ok((t, g(t)?))
                })
                .collect::<Result<Vec<_>>>()?
        }
        _ => Vec::new(),
    };
    Ok(EpsKernel {
        eps,
        bound,
        g_norm,
        g_atoms,
        g_grid,
    })
}

/// `∫ f dμ` for an integrand that may fail; the first failure is reported.
fn integrate_fallible(
    sp: &Spectrum,
    f: &impl Fn(f64) -> Result<f64>,
    breaks: &[f64],
    tol: f64,
) -> Result<f64> {
    let err = std::cell::RefCell::new(None);
    let v = sp.integrate(
        &|t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        breaks,
        tol,
    )?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `∬ log|x − y| dμ dμ`; `None` stands for −∞ (any atom puts mass on the diagonal).
///
/// The logarithmic singularity is subtracted: the inner integral is
/// `∫ log|x−y| (ρ(y) − ρ(x)) dy + ρ(x) ∫ log|x−y| dy`, the second term in closed form.
pub fn log_energy(sp: &Spectrum, tol: f64) -> Result<Option<f64>> {
    if !sp.atoms.is_empty() {
        return Ok(None);
    }
    let Some((w, d)) = &sp.density else {
        return Err(Error::spec("model", "the measure has neither atoms nor a density"));
    };
    let (a, b) = d.support();
    let xlogx = |u: f64| if u <= 0.0 { 0.0 } else { u * u.ln() };
    let inner = |x: f64| -> Result<f64> {
        let rx = d.pdf(x);
        let smooth = quad::integrate_with_breaks(
            &|y| {
                if y == x {
                    0.0
                } else {
                    (x - y).abs().ln() * (d.pdf(y) - rx)
                }
            },
            a,
            b,
            &[x],
            tol,
        )?;
        let exact = xlogx(x - a) - (x - a) + xlogx(b - x) - (b - x);
        Ok(smooth + rx * exact)
    };
    let err = std::cell::RefCell::new(None);
    let v = d.integrate(
        &|x| match inner(x) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        &[],
        tol,
    )?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(Some(w * w * v))
}

/// One level of the staircase density: mass `2^{-k}` spread uniformly over an interval of
/// length `e^{-12^k} / 2` placed at `2^{-k}`.
#[derive(Debug, Clone, Serialize)]
pub struct StaircaseLevel {
    pub level: u32,
    /// `ln` of the interval length.
    pub log_length: f64,
    /// Partial sum of the log-energy over levels `1..=level`, cross terms included.
    pub partial_sum: f64,
    /// The matching partial sum of `−Σ 12^k 4^{-k}`.
    pub reference: f64,
}

/// Partial log-energies of the staircase density truncated at `levels` levels.
///
/// Lengths are handled in log space since `e^{-12^k}` underflows from k = 3 on. The diagonal
/// block of a uniform interval of length L contributes `4^{-k}(ln L − 3/2)`; distinct levels sit
/// at distance about `2^{-j} − 2^{-k}` and contribute `2 · 2^{-j-k} ln(2^{-j} − 2^{-k})`.
pub fn staircase(levels: u32) -> Result<Vec<StaircaseLevel>> {
    if levels == 0 || levels > 40 {
        return Err(Error::spec("level", "must lie in 1..=40"));
    }
    let mut out = Vec::new();
    let mut sum = 0.0;
    let mut reference = 0.0;
    for k in 1..=levels {
        let kf = k as f64;
        let log_length = -(12f64.powf(kf)) - std::f64::consts::LN_2;
        let mass = 0.5f64.powf(kf);
        sum += mass * mass * (log_length - 1.5);
        for j in 1..k {
            let gap = 0.5f64.powi(j as i32) - mass;
            sum += 2.0 * 0.5f64.powi(j as i32) * mass * gap.ln();
        }
        reference -= 3f64.powf(kf);
        out.push(StaircaseLevel {
            level: k,
            log_length,
            partial_sum: sum,
            reference,
        });
    }
    Ok(out)
}
