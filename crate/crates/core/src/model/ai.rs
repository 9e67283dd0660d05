//! Closed-form traffic models. Each returns FLOPs, modeled bytes and their ratio.

use super::{AiEstimate, Pattern};

/// Fraction of the block model's B traffic that reaches main memory.
pub const DEFAULT_REUSE_FACTOR: f64 = 0.25;

/// Bytes per nonzero charged for A in the block model's default form.
pub const DEFAULT_BLOCKED_TRAFFIC_A_BYTES: f64 = 8.0;

fn check(nnz: u64, d: u64) {
    assert!(nnz >= 1, "traffic models need nnz >= 1");
    assert!(d >= 1, "traffic models need d >= 1");
}

fn flops(nnz: u64, d: u64) -> f64 {
    2.0 * d as f64 * nnz as f64
}

/// No reuse of B: every nonzero pulls a full row of B.
///
/// bytes = (12 + 8d) nnz + 8nd
pub fn ai_random(n: u64, nnz: u64, d: u64) -> AiEstimate {
    check(nnz, d);
    let (n, z, df) = (n as f64, nnz as f64, d as f64);
    let bytes = (12.0 + 8.0 * df) * z + 8.0 * n * df;
    AiEstimate::new(Pattern::Random, d, flops(nnz, d), bytes)
}

/// Diagonal structure: B is streamed once like C.
///
/// bytes = 12 nnz + 16nd
pub fn ai_diagonal(n: u64, nnz: u64, d: u64) -> AiEstimate {
    check(nnz, d);
    let (n, z, df) = (n as f64, nnz as f64, d as f64);
    let bytes = 12.0 * z + 16.0 * n * df;
    AiEstimate::new(Pattern::Diagonal, d, flops(nnz, d), bytes)
}

/// Knobs of the block model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockedParams {
    /// Bytes charged per nonzero of A.
    pub traffic_a_bytes: f64,
    /// Scale applied to the `8dNz` B traffic.
    pub reuse_factor: f64,
}

impl Default for BlockedParams {
    fn default() -> Self {
        Self {
            traffic_a_bytes: DEFAULT_BLOCKED_TRAFFIC_A_BYTES,
            reuse_factor: DEFAULT_REUSE_FACTOR,
        }
    }
}

/// Block model with default parameters:
///
/// bytes = 8 nnz + 2dNz + 8nd
///
/// where `n_blocks` is N and `z` the average nonempty columns per block.
pub fn ai_blocked(n: u64, nnz: u64, d: u64, n_blocks: u64, z: f64) -> AiEstimate {
    ai_blocked_with(n, nnz, d, n_blocks, z, BlockedParams::default())
}

/// bytes = traffic_a * nnz + reuse * 8dNz + 8nd
pub fn ai_blocked_with(
    n: u64,
    nnz: u64,
    d: u64,
    n_blocks: u64,
    z: f64,
    params: BlockedParams,
) -> AiEstimate {
    check(nnz, d);
    let (n, nz, df, nb) = (n as f64, nnz as f64, d as f64, n_blocks as f64);
    let bytes =
        params.traffic_a_bytes * nz + params.reuse_factor * 8.0 * df * nb * z + 8.0 * n * df;
    AiEstimate::new(Pattern::Blocked, d, flops(nnz, d), bytes)
}

/// Hub rows of B stay cache-resident: nonzeros in hub columns cost nothing
/// beyond one initial load per hub row.
///
/// bytes = 12 nnz + 8d (nnz - nnz_hub) + 8d n_hub + 8nd
pub fn ai_scale_free(n: u64, nnz: u64, d: u64, nnz_hub: f64, n_hub: u64) -> AiEstimate {
    check(nnz, d);
    assert!(
        (0.0..=nnz as f64).contains(&nnz_hub),
        "nnz_hub must lie in [0, nnz]"
    );
    assert!(n_hub <= n, "n_hub must not exceed n");
    let (n, nz, df, nh) = (n as f64, nnz as f64, d as f64, n_hub as f64);
    let bytes = 12.0 * nz + 8.0 * df * (nz - nnz_hub) + 8.0 * df * nh + 8.0 * n * df;
    AiEstimate::new(Pattern::ScaleFree, d, flops(nnz, d), bytes)
}
