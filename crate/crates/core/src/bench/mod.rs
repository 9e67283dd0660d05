//! Kernel timing and bandwidth calibration.
//!
//! Only the multiply itself is timed. B is filled from a fixed seed and C is
//! allocated and touched before the clock starts; CSB conversion happens
//! outside the timed region, like file loading.

mod stream;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{spmm_csb_into, spmm_csr_into, spmm_reference, KernelId};
use crate::matrix::{default_block_dim, CsbMatrix, CsrMatrix, DenseMatrix};
use crate::model::{flop_count, Pattern};

pub use stream::{
    last_level_cache_bytes, stream_triad, stream_triad_unchecked, triad_gbps, TRIAD_SCALAR,
};

/// Matrices with at most this many rows are validated against the full reference product.
pub const FULL_VALIDATION_MAX_N: usize = 10_000;
/// Rows checked on larger matrices.
const SAMPLED_VALIDATION_ROWS: usize = 64;
/// Elementwise relative tolerance for the CSB kernel.
pub const CSB_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub warmup_runs: usize,
    pub timed_runs: usize,
    pub d_values: Vec<usize>,
    pub thread_counts: Vec<usize>,
    pub seed: u64,
    /// CSB block dimension; `None` picks [`default_block_dim`].
    pub block_dim: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            warmup_runs: 3,
            timed_runs: 7,
            d_values: vec![1, 4, 16, 64],
            thread_counts: vec![default_threads()],
            seed: 0x5eed,
            block_dim: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.warmup_runs < 1 {
            return Err(Error::BenchConfig("warmup_runs must be at least 1".into()));
        }
        if self.timed_runs < 3 {
            return Err(Error::BenchConfig("timed_runs must be at least 3".into()));
        }
        if self.d_values.is_empty() || self.d_values.contains(&0) {
            return Err(Error::BenchConfig(
                "d values must be positive and nonempty".into(),
            ));
        }
        if self.thread_counts.is_empty() || self.thread_counts.contains(&0) {
            return Err(Error::BenchConfig(
                "thread counts must be positive and nonempty".into(),
            ));
        }
        Ok(())
    }
}

/// Hardware concurrency, or 1 if it cannot be queried.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Identifies the matrix a result belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixLabel {
    pub id: String,
    pub pattern: Pattern,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub kernel: KernelId,
    pub matrix: String,
    pub pattern: Pattern,
    pub n: u64,
    pub nnz: u64,
    pub d: u64,
    pub threads: usize,
    pub median_seconds: f64,
    pub gflops: f64,
    pub run_seconds: Vec<f64>,
}

/// `2 d nnz / seconds / 1e9`.
pub fn gflops(nnz: u64, d: u64, seconds: f64) -> f64 {
    flop_count(nnz, d) as f64 / seconds / 1e9
}

/// Median of the samples; the mean of the two middle values for even counts.
pub fn median(samples: &[f64]) -> f64 {
    assert!(!samples.is_empty(), "median of an empty sample");
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

enum Operand<'a> {
    Csr(&'a CsrMatrix),
    Csb(CsbMatrix),
    Reference(&'a CsrMatrix),
}

impl Operand<'_> {
    fn run(&self, b: &DenseMatrix, c: &mut DenseMatrix, workers: usize) -> Result<()> {
        match self {
            Operand::Csr(a) => spmm_csr_into(a, b, c, workers),
            Operand::Csb(a) => spmm_csb_into(a, b, c, workers),
            Operand::Reference(a) => {
                *c = spmm_reference(a, b)?;
                Ok(())
            }
        }
    }
}

/// Times one kernel on one matrix at one dense width, using a dedicated
/// pool of `threads` workers.
pub fn time_spmm(
    kernel: KernelId,
    a: &CsrMatrix,
    label: &MatrixLabel,
    d: usize,
    threads: usize,
    cfg: &BenchConfig,
) -> Result<BenchResult> {
    cfg.validate()?;
    if d == 0 || threads == 0 {
        return Err(Error::BenchConfig("d and threads must be positive".into()));
    }
    let operand = match kernel {
        KernelId::Csr => Operand::Csr(a),
        KernelId::Csb => {
            let t = cfg.block_dim.unwrap_or_else(|| default_block_dim(a.n()));
            Operand::Csb(CsbMatrix::from_csr(a, t)?)
        }
        KernelId::Reference => Operand::Reference(a),
    };
    let b = DenseMatrix::random(a.n(), d, cfg.seed);
    let mut c = DenseMatrix::zeros(a.n(), d);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::BenchConfig(format!("thread pool: {e}")))?;

    let runs = pool.install(|| -> Result<Vec<f64>> {
        operand.run(&b, &mut c, threads)?;
        validate_output(kernel, a, &b, &c)?;
        for _ in 1..cfg.warmup_runs {
            operand.run(&b, &mut c, threads)?;
        }
        let mut runs = Vec::with_capacity(cfg.timed_runs);
        for _ in 0..cfg.timed_runs {
            let start = Instant::now();
            operand.run(&b, &mut c, threads)?;
            runs.push(start.elapsed().as_secs_f64());
        }
        Ok(runs)
    })?;

    // Clock resolution can report zero for tiny inputs.
    let median_seconds = median(&runs).max(1e-9);
    let (nnz, d) = (a.nnz() as u64, d as u64);
    Ok(BenchResult {
        kernel,
        matrix: label.id.clone(),
        pattern: label.pattern,
        n: a.n() as u64,
        nnz,
        d,
        threads,
        median_seconds,
        gflops: gflops(nnz, d, median_seconds),
        run_seconds: runs,
    })
}

/// Checks a kernel's output: against the full reference product for small
/// matrices, against serially recomputed sample rows otherwise.
pub fn validate_output(
    kernel: KernelId,
    a: &CsrMatrix,
    b: &DenseMatrix,
    c: &DenseMatrix,
) -> Result<()> {
    let tol = match kernel {
        KernelId::Csb => CSB_TOLERANCE,
        KernelId::Csr | KernelId::Reference => 0.0,
    };
    let n = a.n();
    let d = b.n_cols();
    let rows: Vec<usize> = if n <= FULL_VALIDATION_MAX_N {
        (0..n).collect()
    } else {
        let step = n / SAMPLED_VALIDATION_ROWS;
        (0..SAMPLED_VALIDATION_ROWS)
            .map(|k| k * step)
            .chain([n - 1])
            .collect()
    };
    for i in rows {
        let (cols, vals) = a.row(i);
        for j in 0..d {
            let mut expect = 0.0;
            for (&k, &v) in cols.iter().zip(vals) {
                expect += v * b.get(k as usize, j);
            }
            let got = c.get(i, j);
            let ok = if tol == 0.0 {
                got.to_bits() == expect.to_bits()
            } else {
                (got - expect).abs() <= tol * (1.0 + expect.abs())
            };
            if !ok {
                return Err(Error::Validation(format!(
                    "{kernel} kernel: C[{i}][{j}] = {got}, reference {expect}"
                )));
            }
        }
    }
    Ok(())
}
