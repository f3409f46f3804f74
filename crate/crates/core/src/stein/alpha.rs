use serde::Serialize;

use crate::error::{Error, Result};

/// Values at or below this are treated as zero and replaced by the floor.
#[derive(Debug, Clone, Copy)]
pub struct AlphaOptions {
    pub zero_tol: f64,
    pub floor: f64,
}

impl Default for AlphaOptions {
    fn default() -> Self {
        AlphaOptions {
            zero_tol: 1e-8,
            floor: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlphaReport {
    /// Slope of `ln Σ*_R` against `ln R`, clamped to `[−∞, 0]`.
    pub alpha: f64,
    /// Radii of the fitting window.
    pub window: Vec<f64>,
    /// Radii whose values were floored.
    pub floored: Vec<f64>,
}

/// Decay exponent of `R ↦ Σ*_R` from a radius sweep.
///
/// Points with `R > 0` are usable; the fit uses the upper half of them (at least three).
/// When every value in the window is at the floor the sweep has reached zero and the
/// exponent is `−∞`.
pub fn alpha_estimate(sweep: &[(f64, f64)], opts: AlphaOptions) -> Result<AlphaReport> {
    if sweep.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::spec("radii", "radii must be strictly increasing"));
    }
    if let Some((r, v)) = sweep.iter().find(|(_, v)| !(v.is_finite() && *v >= -opts.zero_tol)) {
        return Err(Error::spec("sweep", format!("value {v} at R = {r} is not a nonnegative number")));
    }
    let usable: Vec<(f64, f64)> = sweep.iter().copied().filter(|(r, _)| *r > 0.0).collect();
    if usable.len() < 3 {
        return Err(Error::spec(
            "sweep",
            format!("need at least 3 points with R > 0, got {}", usable.len()),
        ));
    }
    let take = (usable.len().div_ceil(2)).max(3);
    let window = &usable[usable.len() - take..];
    let mut floored = Vec::new();
    let pts: Vec<(f64, f64)> = window
        .iter()
        .map(|&(r, v)| {
            let v = if v <= opts.zero_tol {
                floored.push(r);
                opts.floor
            } else {
                v
            };
            (r.ln(), v.ln())
        })
        .collect();
    let alpha = if floored.len() == window.len() {
        f64::NEG_INFINITY
    } else {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxy / sxx).min(0.0)
    };
    Ok(AlphaReport {
        alpha,
        window: window.iter().map(|p| p.0).collect(),
        floored,
    })
}
