use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CsbMatrix;

/// How the expected count of occupied columns per block is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZMode {
    /// `t (1 - (1 - 1/t)^D)`, the exact expectation for uniform placement.
    #[default]
    Exact,
    /// `t (1 - e^(-D/t))`, the large-`t` approximation.
    Poisson,
}

impl fmt::Display for ZMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZMode::Exact => "exact",
            ZMode::Poisson => "poisson",
        })
    }
}

impl FromStr for ZMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(ZMode::Exact),
            "poisson" => Ok(ZMode::Poisson),
            other => Err(Error::InvalidModel(format!("unknown z mode '{other}'"))),
        }
    }
}

/// Expected number of distinct columns hit when `entries` nonzeros are
/// dropped uniformly into a block with `t` columns.
pub fn expected_nonempty_columns(t: f64, entries: f64, mode: ZMode) -> f64 {
    assert!(t >= 1.0, "block dimension must be at least 1");
    assert!(entries >= 0.0, "entry count must be nonnegative");
    if entries == 0.0 {
        return 0.0;
    }
    match mode {
        // (1 - 1/t)^D = exp(D ln(1 - 1/t)); expm1/ln_1p keep precision for large t.
        ZMode::Exact => -t * (entries * (-1.0 / t).ln_1p()).exp_m1(),
        ZMode::Poisson => -t * (-entries / t).exp_m1(),
    }
}

/// Measured block statistics of a CSB matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockStats {
    /// Block dimension `t`.
    pub t: usize,
    /// Nonzero block count `N`.
    pub n_blocks: u64,
    /// Average entries per nonzero block, `D = nnz / N`.
    pub avg_entries: f64,
    /// Mean number of distinct occupied columns per nonzero block, `z`.
    pub avg_nonempty_cols: f64,
}

impl BlockStats {
    /// Model value of `z` for this block size and density.
    pub fn model_z(&self, mode: ZMode) -> f64 {
        expected_nonempty_columns(self.t as f64, self.avg_entries, mode)
    }
}

pub fn block_stats_from_csb(a: &CsbMatrix) -> Result<BlockStats> {
    let n_blocks = a.n_blocks();
    if n_blocks == 0 {
        return Err(Error::EmptyMatrix);
    }
    let t = a.block_dim();
    // Stamp array: column c is counted once per block via the block's sequence number.
    let mut stamp = vec![u32::MAX; t];
    let mut occupied: u64 = 0;
    for (seq, blk) in a.blocks().iter().enumerate() {
        let tag = seq as u32;
        for e in a.block_entries(blk).0 {
            let s = &mut stamp[e.col as usize];
            if *s != tag {
                *s = tag;
                occupied += 1;
            }
        }
    }
    Ok(BlockStats {
        t,
        n_blocks: n_blocks as u64,
        avg_entries: a.nnz() as f64 / n_blocks as f64,
        avg_nonempty_cols: occupied as f64 / n_blocks as f64,
    })
}
