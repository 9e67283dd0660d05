//! Hub statistics for power-law degree distributions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default hub fraction: the top 0.1% of vertices by degree.
pub const DEFAULT_HUB_FRACTION: f64 = 0.001;

/// Share of all edges incident to the top `f` fraction of vertices when
/// `p(k) ∝ k^-alpha`: `f^((alpha - 2) / (alpha - 1))`.
pub fn hub_mass_fraction(alpha: f64, f: f64) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::InvalidModel(format!(
            "hub mass diverges for alpha <= 2 (got {alpha})"
        )));
    }
    check_fraction(f)?;
    Ok(f.powf((alpha - 2.0) / (alpha - 1.0)))
}

fn check_fraction(f: f64) -> Result<()> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::InvalidModel(format!(
            "hub fraction must lie in (0, 1], got {f}"
        )));
    }
    Ok(())
}

/// `ceil(f * n)`, guarding against the product landing one ulp above an integer.
pub fn hub_count(n: usize, f: f64) -> usize {
    let raw = f * n as f64;
    let nearest = raw.round();
    let count = if (raw - nearest).abs() <= 1e-9 * raw.max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    (count as usize).min(n)
}

/// Maximum-likelihood power-law exponent over the degrees `>= k_min`:
///
/// `alpha = 1 + m / sum ln(k_i / x_min)`
///
/// with `x_min = k_min - 0.5` when `discrete_correction` is set (the usual
/// continuity correction for integer data) and `x_min = k_min` otherwise.
pub fn estimate_alpha(degrees: &[u64], k_min: u64, discrete_correction: bool) -> Result<f64> {
    let x_min = if discrete_correction {
        k_min as f64 - 0.5
    } else {
        k_min as f64
    };
    if !(x_min > 0.0) {
        return Err(Error::InvalidModel(format!(
            "k_min = {k_min} leaves a nonpositive lower cutoff"
        )));
    }
    let (m, log_sum) = degrees
        .iter()
        .filter(|&&k| k >= k_min)
        .fold((0usize, 0.0f64), |(m, s), &k| {
            (m + 1, s + (k as f64 / x_min).ln())
        });
    if m < 2 {
        return Err(Error::InvalidModel(format!(
            "need at least 2 degrees >= {k_min}, found {m}"
        )));
    }
    if !(log_sum > 0.0) {
        return Err(Error::InvalidModel(
            "all tail degrees sit at the cutoff; exponent undefined".into(),
        ));
    }
    Ok(1.0 + m as f64 / log_sum)
}

/// Smallest degree that is at least 2.
pub fn default_k_min(degrees: &[u64]) -> Result<u64> {
    degrees
        .iter()
        .copied()
        .filter(|&k| k >= 2)
        .min()
        .ok_or_else(|| Error::InvalidModel("no vertex has degree >= 2".into()))
}

/// Top `ceil(f * n)` degrees: returns `(n_hub, sum of their degrees)`.
pub fn empirical_hub_mass(degrees: &[u64], f: f64) -> Result<(usize, u64)> {
    if degrees.is_empty() {
        return Err(Error::InvalidModel("empty degree list".into()));
    }
    check_fraction(f)?;
    let n_hub = hub_count(degrees.len(), f).max(1);
    let mut sorted = degrees.to_vec();
    if n_hub < sorted.len() {
        sorted.select_nth_unstable_by(n_hub - 1, |a, b| b.cmp(a));
    }
    Ok((n_hub, sorted[..n_hub].iter().sum()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HubSource {
    /// `nnz_hub = nnz * f^((alpha-2)/(alpha-1))`.
    Analytic,
    /// `nnz_hub` summed from the actual top-degree vertices.
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HubStats {
    pub f: f64,
    pub alpha: f64,
    pub n_hub: u64,
    pub nnz_hub: f64,
    pub source: HubSource,
}

pub fn analytic_hub_stats(n: usize, nnz: u64, alpha: f64, f: f64) -> Result<HubStats> {
    let mass = hub_mass_fraction(alpha, f)?;
    Ok(HubStats {
        f,
        alpha,
        n_hub: hub_count(n, f).max(1) as u64,
        nnz_hub: mass * nnz as f64,
        source: HubSource::Analytic,
    })
}

/// `alpha` is recorded for reference only; the empirical path does not use it.
pub fn empirical_hub_stats(degrees: &[u64], alpha: f64, f: f64) -> Result<HubStats> {
    let (n_hub, nnz_hub) = empirical_hub_mass(degrees, f)?;
    Ok(HubStats {
        f,
        alpha,
        n_hub: n_hub as u64,
        nnz_hub: nnz_hub as f64,
        source: HubSource::Empirical,
    })
}
