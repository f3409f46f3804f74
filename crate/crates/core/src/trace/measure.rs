use num_rational::BigRational;
use serde_json::Value;
use std::f64::consts::PI;
use std::sync::Arc;

use super::registry::{field, opt_field, parse_real};
use super::{check_word, TraceModel, C64};
use crate::error::{Error, Result};
use crate::ncalg::{GeneratorSystem, Word};
use crate::quad;

const MOMENT_TOL: f64 = 1e-12;
const MASS_TOL: f64 = 1e-12;

/// A probability density on a bounded interval.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Semicircle { center: f64, radius: f64 },
    Uniform { a: f64, b: f64 },
    /// Piecewise-linear interpolation of `(t, value)` samples, normalized to unit mass.
    Table { points: Vec<(f64, f64)>, norm: f64 },
}

impl Density {
    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::spec("density.points", "need at least two samples"));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || points.iter().any(|p| p.1 < 0.0) {
            return Err(Error::spec(
                "density.points",
                "abscissae must increase and values be nonnegative",
            ));
        }
        let norm: f64 = points
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
            .sum();
        if !(norm > 0.0) {
            return Err(Error::spec("density.points", "table has zero mass"));
        }
        Ok(Density::Table { points, norm })
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Density::Semicircle { center, radius } => (center - radius, center + radius),
            Density::Uniform { a, b } => (*a, *b),
            Density::Table { points, .. } => (points[0].0, points[points.len() - 1].0),
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        match self {
            Density::Semicircle { center, radius } => {
                let u = radius * radius - (t - center) * (t - center);
                if u <= 0.0 {
                    0.0
                } else {
                    2.0 / (PI * radius * radius) * u.sqrt()
                }
            }
            Density::Uniform { a, b } => {
                if t >= *a && t <= *b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Density::Table { points, norm } => {
                if t < points[0].0 || t > points[points.len() - 1].0 {
                    return 0.0;
                }
                let k = points.partition_point(|p| p.0 <= t).clamp(1, points.len() - 1);
                let (t0, v0) = points[k - 1];
                let (t1, v1) = points[k];
                (v0 + (v1 - v0) * (t - t0) / (t1 - t0)) / norm
            }
        }
    }

    /// `∫ f(t) ρ(t) dt`, splitting at `breaks`. The semicircle uses `t = c + r sin θ`, which
    /// removes the square-root edges.
    pub fn integrate(&self, f: &impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> Result<f64> {
        match self {
            Density::Semicircle { center, radius } => {
                let (c, r) = (*center, *radius);
                let g = |th: f64| f(c + r * th.sin()) * 2.0 / PI * th.cos().powi(2);
                let th_breaks: Vec<f64> = breaks
                    .iter()
                    .filter(|t| (**t - c).abs() < r)
                    .map(|t| ((t - c) / r).asin())
                    .collect();
                quad::integrate_with_breaks(&g, -PI / 2.0, PI / 2.0, &th_breaks, tol)
            }
            Density::Uniform { a, b } => {
                let w = 1.0 / (b - a);
                quad::integrate_with_breaks(&|t| f(t) * w, *a, *b, breaks, tol)
            }
            Density::Table { points, .. } => {
                let (lo, hi) = self.support();
                let mut all: Vec<f64> = points.iter().map(|p| p.0).collect();
                all.extend_from_slice(breaks);
                quad::integrate_with_breaks(&|t| f(t) * self.pdf(t), lo, hi, &all, tol)
            }
        }
    }

    /// Moments `∫ t^k ρ` for `k = 0..=kmax`, by composite doubling to the moment tolerance.
    fn moments(&self, kmax: usize) -> Result<Vec<f64>> {
        (0..=kmax)
            .map(|k| match self {
                Density::Semicircle { center, radius } => {
                    let (c, r) = (*center, *radius);
                    let g = |th: f64| (c + r * th.sin()).powi(k as i32) * 2.0 / PI * th.cos().powi(2);
                    quad::integrate_doubling(&g, -PI / 2.0, PI / 2.0, MOMENT_TOL)
                }
                Density::Uniform { a, b } => {
                    let w = 1.0 / (b - a);
                    quad::integrate_doubling(&|t: f64| t.powi(k as i32) * w, *a, *b, MOMENT_TOL)
                }
                Density::Table { points, .. } => points
                    .windows(2)
                    .map(|s| {
                        quad::integrate_doubling(
                            &|t: f64| t.powi(k as i32) * self.pdf(t),
                            s[0].0,
                            s[1].0,
                            MOMENT_TOL,
                        )
                    })
                    .sum(),
            })
            .collect()
    }

    fn from_json(v: &Value) -> Result<Self> {
        let kind = field(v, "kind")?
            .as_str()
            .ok_or_else(|| Error::spec("density.kind", "expected a string"))?;
        let num = |name: &str| -> Result<f64> {
            Ok(parse_real(field(v, name)?, &format!("density.{name}"))?.0)
        };
        match kind {
            "semicircle" => {
                let center = opt_field(v, "center")
                    .map(|c| parse_real(c, "density.center").map(|x| x.0))
                    .transpose()?
                    .unwrap_or(0.0);
                let radius = opt_field(v, "radius")
                    .map(|c| parse_real(c, "density.radius").map(|x| x.0))
                    .transpose()?
                    .unwrap_or(2.0);
                if !(radius > 0.0) {
                    return Err(Error::spec("density.radius", "must be positive"));
                }
                Ok(Density::Semicircle { center, radius })
            }
            "uniform" => {
                let (a, b) = (num("a")?, num("b")?);
                if !(b > a) {
                    return Err(Error::spec("density.b", "must exceed a"));
                }
                Ok(Density::Uniform { a, b })
            }
            "table" => {
                let pts = field(v, "points")?
                    .as_array()
                    .ok_or_else(|| Error::spec("density.points", "expected [[t, value], ...]"))?
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let name = format!("density.points[{i}]");
                        match p.as_array().map(Vec::as_slice) {
                            Some([t, y]) => Ok((parse_real(t, &name)?.0, parse_real(y, &name)?.0)),
                            _ => Err(Error::spec(name, "expected [t, value]")),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Density::table(pts)
            }
            other => Err(Error::spec(
                "density.kind",
                format!("unknown density `{other}` (semicircle, uniform, table)"),
            )),
        }
    }
}

/// The distribution of a single self-adjoint variable: atoms plus an optional density.
#[derive(Debug)]
pub struct MeasureModel {
    sys: Arc<GeneratorSystem>,
    atoms: Vec<(f64, f64)>,
    exact_masses: Option<Vec<BigRational>>,
    density: Option<(f64, Density)>,
    moments: Vec<f64>,
}

impl MeasureModel {
    /// `atoms` are `(location, mass)`; the density carries the remaining mass.
    pub fn new(atoms: Vec<(f64, f64)>, density: Option<Density>, cap: usize) -> Result<Self> {
        Self::build(atoms, None, density, None, cap)
    }

    fn build(
        atoms: Vec<(f64, f64)>,
        exact_masses: Option<Vec<BigRational>>,
        density: Option<Density>,
        density_mass: Option<f64>,
        cap: usize,
    ) -> Result<Self> {
        if let Some(i) = atoms.iter().position(|a| !(a.1 > 0.0) || !a.0.is_finite()) {
            return Err(Error::spec(format!("atoms[{i}]"), "masses must be positive"));
        }
        let atom_mass: f64 = atoms.iter().map(|a| a.1).sum();
        let density = match density {
            Some(d) => {
                let mass = density_mass.unwrap_or(1.0 - atom_mass);
                if !(mass > 0.0) {
                    return Err(Error::spec("density.mass", "no mass left for the density"));
                }
                Some((mass, d))
            }
            None => None,
        };
        let total = atom_mass + density.as_ref().map_or(0.0, |d| d.0);
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::spec("atoms", format!("total mass is {total}, not 1")));
        }
        let kmax = 2 * cap;
        let mut moments: Vec<f64> = (0..=kmax)
            .map(|k| atoms.iter().map(|(t, m)| m * t.powi(k as i32)).sum())
            .collect();
        if let Some((mass, d)) = &density {
            for (m, c) in moments.iter_mut().zip(d.moments(kmax)?) {
                *m += mass * c;
            }
        }
        Ok(MeasureModel {
            sys: Arc::new(GeneratorSystem::self_adjoint(1).with_cap(cap)),
            atoms,
            exact_masses,
            density,
            moments,
        })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Atom masses as exact rationals, when every mass was given exactly.
    pub fn exact_masses(&self) -> Option<&[BigRational]> {
        self.exact_masses.as_deref()
    }

    /// `(mass, density)` of the continuous part.
    pub fn density(&self) -> Option<(f64, &Density)> {
        self.density.as_ref().map(|(m, d)| (*m, d))
    }

    pub fn moment(&self, k: usize) -> Option<f64> {
        self.moments.get(k).copied()
    }

    /// `∫ f dμ` over the atoms and the continuous part.
    pub fn integrate(&self, f: &impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> Result<f64> {
        let atoms: f64 = self.atoms.iter().map(|(t, m)| m * f(*t)).sum();
        let cont = match &self.density {
            Some((mass, d)) => mass * d.integrate(f, breaks, tol)?,
            None => 0.0,
        };
        Ok(atoms + cont)
    }

    pub fn from_json(v: &Value, cap: usize) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut exact = Some(Vec::new());
        if let Some(list) = opt_field(v, "atoms") {
            let list = list
                .as_array()
                .ok_or_else(|| Error::spec("atoms", "expected [[t, mass], ...]"))?;
            for (i, a) in list.iter().enumerate() {
                let name = format!("atoms[{i}]");
                let [t, m] = a
                    .as_array()
                    .and_then(|x| <&[Value; 2]>::try_from(x.as_slice()).ok())
                    .ok_or_else(|| Error::spec(&name, "expected [t, mass]"))?;
                let t = parse_real(t, &name)?.0;
                let (m, mq) = parse_real(m, &name)?;
                atoms.push((t, m));
                match (&mut exact, mq) {
                    (Some(e), Some(q)) => e.push(q),
                    _ => exact = None,
                }
            }
        }
        let (density, density_mass) = match opt_field(v, "density") {
            Some(d) if !d.is_null() => {
                let mass = opt_field(d, "mass")
                    .map(|m| parse_real(m, "density.mass").map(|x| x.0))
                    .transpose()?;
                (Some(Density::from_json(d)?), mass)
            }
            _ => (None, None),
        };
        if atoms.is_empty() && density.is_none() {
            return Err(Error::spec("atoms", "a measure needs atoms or a density"));
        }
        Self::build(atoms, exact, density, density_mass, cap)
    }
}

impl TraceModel for MeasureModel {
    fn kind(&self) -> &'static str {
        "measure"
    }

    fn system(&self) -> &Arc<GeneratorSystem> {
        &self.sys
    }

    fn trace_word(&self, w: &Word) -> Result<C64> {
        check_word(&self.sys, w, self.degree_limit())?;
        Ok(C64::new(self.moments[w.degree()], 0.0))
    }

    fn as_measure(&self) -> Option<&MeasureModel> {
        Some(self)
    }
}
