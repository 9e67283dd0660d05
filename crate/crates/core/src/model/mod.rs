//! Arithmetic-intensity models and the roofline bound.
//!
//! All traffic is counted in bytes with 8-byte values and 4-byte indices.
//! FLOPs are one multiply and one add per nonzero per dense column.

mod ai;
mod blocks;
mod hubs;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ai::{
    ai_blocked, ai_blocked_with, ai_diagonal, ai_random, ai_scale_free, BlockedParams,
    DEFAULT_BLOCKED_TRAFFIC_A_BYTES, DEFAULT_REUSE_FACTOR,
};
pub use blocks::{block_stats_from_csb, expected_nonempty_columns, BlockStats, ZMode};
pub use hubs::{
    analytic_hub_stats, default_k_min, empirical_hub_mass, empirical_hub_stats, estimate_alpha,
    hub_count, hub_mass_fraction, HubSource, HubStats, DEFAULT_HUB_FRACTION,
};

/// Sparsity regime a matrix is declared to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    Random,
    Diagonal,
    Blocked,
    ScaleFree,
}

impl Pattern {
    pub const ALL: [Pattern; 4] = [
        Pattern::Random,
        Pattern::Diagonal,
        Pattern::Blocked,
        Pattern::ScaleFree,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pattern::Random => "random",
            Pattern::Diagonal => "diagonal",
            Pattern::Blocked => "blocked",
            Pattern::ScaleFree => "scale-free",
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "random" | "uniform-random" => Ok(Pattern::Random),
            "diagonal" => Ok(Pattern::Diagonal),
            "blocked" | "blocking" => Ok(Pattern::Blocked),
            "scale-free" | "scalefree" => Ok(Pattern::ScaleFree),
            other => Err(Error::InvalidModel(format!("unknown pattern '{other}'"))),
        }
    }
}

/// Peak bandwidth (GB/s) and peak compute (GFLOP/s) of a machine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MachineProfile {
    pub beta_gbps: f64,
    pub pi_gflops: f64,
}

impl MachineProfile {
    pub fn new(beta_gbps: f64, pi_gflops: f64) -> Result<Self> {
        let p = Self {
            beta_gbps,
            pi_gflops,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta_gbps > 0.0 && self.beta_gbps.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "bandwidth must be positive and finite, got {}",
                self.beta_gbps
            )));
        }
        if !(self.pi_gflops > 0.0 && self.pi_gflops.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "peak compute must be positive and finite, got {}",
                self.pi_gflops
            )));
        }
        Ok(())
    }

    /// Arithmetic intensity at which the bandwidth and compute roofs meet.
    pub fn ridge_point(&self) -> f64 {
        self.pi_gflops / self.beta_gbps
    }
}

/// FLOPs of one SpMM: `2 * d * nnz`.
pub fn flop_count(nnz: u64, d: u64) -> u64 {
    2 * d * nnz
}

/// `min(beta * ai, pi)` in GFLOP/s.
pub fn roofline_bound(profile: &MachineProfile, ai: f64) -> f64 {
    (profile.beta_gbps * ai).min(profile.pi_gflops)
}

/// Modeled FLOPs and bytes for one sparsity pattern at one dense width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiEstimate {
    pub pattern: Pattern,
    pub d: u64,
    pub flops: f64,
    pub bytes: f64,
    /// Always exactly `flops / bytes`.
    pub ai: f64,
}

impl AiEstimate {
    pub(crate) fn new(pattern: Pattern, d: u64, flops: f64, bytes: f64) -> Self {
        Self {
            pattern,
            d,
            flops,
            bytes,
            ai: flops / bytes,
        }
    }

    pub fn bound_gflops(&self, profile: &MachineProfile) -> f64 {
        roofline_bound(profile, self.ai)
    }
}
