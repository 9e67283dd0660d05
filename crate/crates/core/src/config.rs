//! The machine-profile file: a JSON object holding the host's roofline
//! parameters, model knobs and benchmark defaults. Missing keys take defaults.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::last_level_cache_bytes;
use crate::error::Result;
use crate::matrix::fetch::DEFAULT_URL_TEMPLATE;
use crate::model::{
    BlockedParams, MachineProfile, DEFAULT_BLOCKED_TRAFFIC_A_BYTES, DEFAULT_HUB_FRACTION,
    DEFAULT_REUSE_FACTOR,
};

/// Bandwidth of the reference test node (one EPYC 7763 socket, STREAM triad).
pub const REFERENCE_BETA_GBPS: f64 = 122.6;
/// 64 cores x 2.45 GHz x 16 double-precision FLOP/cycle.
pub const REFERENCE_PI_GFLOPS: f64 = 2508.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileConfig {
    pub beta_gbps: f64,
    pub pi_gflops: f64,
    pub reuse_factor: f64,
    pub traffic_a_bytes: f64,
    pub hub_fraction: f64,
    /// Triad array length; `None` sizes the arrays to 8x the last-level cache.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stream_elements: Option<usize>,
    pub warmup_runs: usize,
    pub timed_runs: usize,
    pub suitesparse_url: String,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            beta_gbps: REFERENCE_BETA_GBPS,
            pi_gflops: REFERENCE_PI_GFLOPS,
            reuse_factor: DEFAULT_REUSE_FACTOR,
            traffic_a_bytes: DEFAULT_BLOCKED_TRAFFIC_A_BYTES,
            hub_fraction: DEFAULT_HUB_FRACTION,
            stream_elements: None,
            warmup_runs: 3,
            timed_runs: 7,
            suitesparse_url: DEFAULT_URL_TEMPLATE.to_string(),
        }
    }
}

impl ProfileConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.machine().validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn machine(&self) -> MachineProfile {
        MachineProfile {
            beta_gbps: self.beta_gbps,
            pi_gflops: self.pi_gflops,
        }
    }

    pub fn blocked_params(&self) -> BlockedParams {
        BlockedParams {
            traffic_a_bytes: self.traffic_a_bytes,
            reuse_factor: self.reuse_factor,
        }
    }

    pub fn stream_elements(&self) -> usize {
        self.stream_elements
            .unwrap_or_else(|| (8 * last_level_cache_bytes()).div_ceil(24) as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_keys_take_defaults() {
        let cfg: ProfileConfig = serde_json::from_str(r#"{"beta_gbps": 50.0}"#).unwrap();
        assert_eq!(cfg.beta_gbps, 50.0);
        assert_eq!(cfg.pi_gflops, REFERENCE_PI_GFLOPS);
        assert_eq!(cfg.reuse_factor, 0.25);
        assert_eq!(cfg.traffic_a_bytes, 8.0);
        assert_eq!(cfg.hub_fraction, 0.001);
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("profile.json");
        let cfg = ProfileConfig {
            beta_gbps: 33.5,
            stream_elements: Some(1000),
            ..Default::default()
        };
        cfg.save(&path).unwrap();
        assert_eq!(ProfileConfig::load(&path).unwrap(), cfg);
    }

    #[test]
    fn invalid_profile_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        fs::write(&path, r#"{"beta_gbps": -1}"#).unwrap();
        assert!(ProfileConfig::load(&path).is_err());
    }
}
