//! Synthetic matrices for the four sparsity regimes.
//!
//! Every generator is a pure function of its parameters and seed. Entries
//! carry the value 1.0; coordinates drawn more than once collapse to a
//! single entry, so nnz can land slightly under the requested count.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CsrMatrix;
use crate::model::Pattern;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub pattern: Pattern,
    pub n: usize,
    /// Average entries per row (random, blocked) or expected degree (scale-free).
    pub avg_nnz: f64,
    /// Power-law exponent; scale-free only.
    pub alpha: Option<f64>,
    /// Tile size for the blocked pattern.
    pub block_dim: Option<usize>,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidGenerator("n must be at least 1".into()));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::IndexOverflow(self.n));
        }
        if self.pattern == Pattern::ScaleFree {
            match self.alpha {
                Some(a) if a > 2.0 => {}
                Some(a) => {
                    return Err(Error::InvalidGenerator(format!(
                        "scale-free exponent must exceed 2, got {a}"
                    )))
                }
                None => {
                    return Err(Error::InvalidGenerator(
                        "scale-free pattern requires alpha".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

pub const DEFAULT_BLOCKED_DIM: usize = 32;

pub fn generate(spec: &GenSpec) -> Result<CsrMatrix> {
    spec.validate()?;
    match spec.pattern {
        Pattern::Random => generate_erdos_renyi(spec.n, spec.avg_nnz, spec.seed),
        Pattern::Diagonal => Ok(generate_ideal_diagonal(spec.n)),
        Pattern::Blocked => generate_blocked(
            spec.n,
            spec.avg_nnz,
            spec.block_dim.unwrap_or(DEFAULT_BLOCKED_DIM),
            spec.seed,
        ),
        Pattern::ScaleFree => generate_scale_free(
            spec.n,
            spec.alpha.expect("validated above"),
            spec.avg_nnz,
            spec.seed,
        ),
    }
}

/// Uniform random placement of `round(n * avg_nnz_per_row)` unit entries.
pub fn generate_erdos_renyi(n: usize, avg_nnz_per_row: f64, seed: u64) -> Result<CsrMatrix> {
    if !(avg_nnz_per_row >= 1.0) {
        return Err(Error::InvalidGenerator(format!(
            "average nonzeros per row must be at least 1, got {avg_nnz_per_row}"
        )));
    }
    if avg_nnz_per_row >= n as f64 {
        return Err(Error::InvalidGenerator(format!(
            "average nonzeros per row ({avg_nnz_per_row}) must be below n ({n})"
        )));
    }
    let draws = (n as f64 * avg_nnz_per_row).round() as u64;
    let n32 = n as u32;
    Ok(build_pattern(n, seed, |rng, emit| {
        for _ in 0..draws {
            let r = rng.random_range(0..n32);
            let c = rng.random_range(0..n32);
            emit(r, c);
        }
    }))
}

/// The `n x n` identity pattern.
pub fn generate_ideal_diagonal(n: usize) -> CsrMatrix {
    CsrMatrix::identity(n)
}

/// Banded block structure: each entry falls in a random `block_dim`-wide
/// tile on or next to the block diagonal, at a uniform position inside it.
pub fn generate_blocked(
    n: usize,
    avg_nnz_per_row: f64,
    block_dim: usize,
    seed: u64,
) -> Result<CsrMatrix> {
    if block_dim == 0 {
        return Err(Error::InvalidGenerator(
            "block dimension must be positive".into(),
        ));
    }
    if !(avg_nnz_per_row >= 1.0) || avg_nnz_per_row >= n as f64 {
        return Err(Error::InvalidGenerator(format!(
            "average nonzeros per row must lie in [1, n), got {avg_nnz_per_row}"
        )));
    }
    let n_blocks = n.div_ceil(block_dim) as i64;
    let draws = (n as f64 * avg_nnz_per_row).round() as u64;
    Ok(build_pattern(n, seed, |rng, emit| {
        for _ in 0..draws {
            let r = rng.random_range(0..n);
            let br = (r / block_dim) as i64;
            let bc = (br + rng.random_range(-1i64..=1)).clamp(0, n_blocks - 1) as usize;
            let lo = bc * block_dim;
            let hi = (lo + block_dim).min(n);
            let c = rng.random_range(lo..hi);
            emit(r as u32, c as u32);
        }
    }))
}

/// Chung–Lu graph with expected degrees `w_i ∝ (i+1)^(-1/(alpha-1))`,
/// scaled so the expected total degree is `n * avg_degree`.
///
/// Edges are drawn by picking both endpoints proportionally to weight;
/// self loops are dropped and the adjacency matrix is symmetric. Vertex
/// labels are shuffled so hubs are not clustered in the leading rows.
pub fn generate_scale_free(n: usize, alpha: f64, avg_degree: f64, seed: u64) -> Result<CsrMatrix> {
    if !(alpha > 2.0) {
        return Err(Error::InvalidGenerator(format!(
            "scale-free exponent must exceed 2, got {alpha}"
        )));
    }
    if !(avg_degree > 0.0) || avg_degree >= n as f64 {
        return Err(Error::InvalidGenerator(format!(
            "average degree must lie in (0, n), got {avg_degree}"
        )));
    }
    let exponent = -1.0 / (alpha - 1.0);
    let mut cumulative = Vec::with_capacity(n);
    let mut total = 0.0;
    for i in 0..n {
        total += ((i + 1) as f64).powf(exponent);
        cumulative.push(total);
    }

    let mut labels: Vec<u32> = (0..n as u32).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed1a_be15_u64));

    let edges = (n as f64 * avg_degree / 2.0).round() as u64;
    let pick = move |rng: &mut ChaCha8Rng, cumulative: &[f64]| -> usize {
        let u = rng.random::<f64>() * total;
        cumulative.partition_point(|&c| c <= u).min(n - 1)
    };
    Ok(build_pattern(n, seed, |rng, emit| {
        for _ in 0..edges {
            let u = pick(rng, &cumulative);
            let v = pick(rng, &cumulative);
            if u != v {
                let (lu, lv) = (labels[u], labels[v]);
                emit(lu, lv);
                emit(lv, lu);
            }
        }
    }))
}

/// Runs `draw` twice from the same seed: once to count entries per row and
/// once to scatter columns, then sorts and deduplicates each row.
fn build_pattern<F>(n: usize, seed: u64, mut draw: F) -> CsrMatrix
where
    F: FnMut(&mut ChaCha8Rng, &mut dyn FnMut(u32, u32)),
{
    let mut counts = vec![0u64; n + 1];
    draw(&mut ChaCha8Rng::seed_from_u64(seed), &mut |r, _| {
        counts[r as usize + 1] += 1
    });
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let mut cols = vec![0u32; counts[n] as usize];
    let mut next: Vec<u64> = counts[..n].to_vec();
    draw(&mut ChaCha8Rng::seed_from_u64(seed), &mut |r, c| {
        let slot = &mut next[r as usize];
        cols[*slot as usize] = c;
        *slot += 1;
    });

    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0u32);
    let mut write = 0usize;
    for i in 0..n {
        let (lo, hi) = (counts[i] as usize, counts[i + 1] as usize);
        cols[lo..hi].sort_unstable();
        let mut prev = None;
        for k in lo..hi {
            let c = cols[k];
            if prev != Some(c) {
                cols[write] = c;
                write += 1;
                prev = Some(c);
            }
        }
        row_ptr.push(write as u32);
    }
    cols.truncate(write);
    cols.shrink_to_fit();
    let values = vec![1.0; write];
    CsrMatrix::from_parts_unchecked(n, row_ptr, cols, values)
}
