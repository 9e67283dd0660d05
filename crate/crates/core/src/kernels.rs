//! Sparse-times-dense executors: C = A * B with A sparse `n x n` and B dense `n x d`.
//!
//! Each output row is written by exactly one worker and accumulated in a
//! fixed order, so results are bit-identical across worker counts.
//! Worker counts partition the rows into contiguous, nnz-balanced ranges;
//! the ranges run as tasks on the current rayon pool.
//!
//! CSR iterates rows outermost and the `d` dimension innermost, accumulating
//! into a stack tile of width `min(d, 64)`. That performs the same sequence
//! of additions per element as [`spmm_reference`], so the two agree bit for bit.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CsbMatrix, CsrMatrix, DenseMatrix};

const TILE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelId {
    Csr,
    Csb,
    Reference,
}

impl KernelId {
    pub const ALL: [KernelId; 3] = [KernelId::Csr, KernelId::Csb, KernelId::Reference];

    pub fn as_str(self) -> &'static str {
        match self {
            KernelId::Csr => "csr",
            KernelId::Csb => "csb",
            KernelId::Reference => "reference",
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csr" => Ok(KernelId::Csr),
            "csb" => Ok(KernelId::Csb),
            "reference" | "ref" => Ok(KernelId::Reference),
            other => Err(Error::BenchConfig(format!("unknown kernel '{other}'"))),
        }
    }
}

fn check_dims(n: usize, b: &DenseMatrix, c: Option<&DenseMatrix>) -> Result<()> {
    if b.n_rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "A is {n}x{n} but B has {} rows",
            b.n_rows()
        )));
    }
    if let Some(c) = c {
        if c.n_rows() != n || c.n_cols() != b.n_cols() {
            return Err(Error::DimensionMismatch(format!(
                "C is {}x{}, expected {n}x{}",
                c.n_rows(),
                c.n_cols(),
                b.n_cols()
            )));
        }
    }
    Ok(())
}

/// Serial oracle: `C[i][j] = sum_k A[i][k] * B[k][j]`, summed in column-index order.
pub fn spmm_reference(a: &CsrMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    check_dims(a.n(), b, None)?;
    let d = b.n_cols();
    let mut c = DenseMatrix::zeros(a.n(), d);
    for i in 0..a.n() {
        let (cols, vals) = a.row(i);
        for j in 0..d {
            let mut acc = 0.0;
            for (&k, &v) in cols.iter().zip(vals) {
                acc += v * b.get(k as usize, j);
            }
            c.set(i, j, acc);
        }
    }
    Ok(c)
}

pub fn spmm_csr(a: &CsrMatrix, b: &DenseMatrix, workers: usize) -> Result<DenseMatrix> {
    let mut c = DenseMatrix::zeros(a.n(), b.n_cols());
    spmm_csr_into(a, b, &mut c, workers)?;
    Ok(c)
}

/// CSR kernel writing into a preallocated `c`; every element of `c` is overwritten.
pub fn spmm_csr_into(
    a: &CsrMatrix,
    b: &DenseMatrix,
    c: &mut DenseMatrix,
    workers: usize,
) -> Result<()> {
    check_dims(a.n(), b, Some(c))?;
    let d = b.n_cols();
    let row_ptr = a.row_ptr();
    let ranges = balanced_ranges(a.n(), workers, |i| row_ptr[i] as usize + i);
    run_on_ranges(c.data_mut(), d, &ranges, |rows, out| {
        csr_rows(a, b.data(), d, rows, out)
    });
    Ok(())
}

fn csr_rows(a: &CsrMatrix, b: &[f64], d: usize, rows: Range<usize>, out: &mut [f64]) {
    let mut tile = [0.0f64; TILE];
    let first = rows.start;
    for i in rows {
        let (cols, vals) = a.row(i);
        let c_row = &mut out[(i - first) * d..(i - first + 1) * d];
        let mut j0 = 0;
        while j0 < d {
            let w = (d - j0).min(TILE);
            let acc = &mut tile[..w];
            acc.fill(0.0);
            for (idx, (&k, &v)) in cols.iter().zip(vals).enumerate() {
                #[cfg(all(feature = "prefetch", target_arch = "x86_64"))]
                if let Some(&next) = cols.get(idx + 1) {
                    prefetch(b, next as usize * d + j0);
                }
                #[cfg(not(all(feature = "prefetch", target_arch = "x86_64")))]
                let _ = idx;
                let start = k as usize * d + j0;
                for (x, &bv) in acc.iter_mut().zip(&b[start..start + w]) {
                    *x += v * bv;
                }
            }
            c_row[j0..j0 + w].copy_from_slice(acc);
            j0 += w;
        }
    }
}

#[cfg(all(feature = "prefetch", target_arch = "x86_64"))]
#[inline(always)]
fn prefetch(b: &[f64], at: usize) {
    use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
    if at < b.len() {
        // SAFETY: prefetch is a hint; the address is in bounds.
        unsafe { _mm_prefetch(b.as_ptr().add(at) as *const i8, _MM_HINT_T0) };
    }
}

pub fn spmm_csb(a: &CsbMatrix, b: &DenseMatrix, workers: usize) -> Result<DenseMatrix> {
    let mut c = DenseMatrix::zeros(a.n(), b.n_cols());
    spmm_csb_into(a, b, &mut c, workers)?;
    Ok(c)
}

/// CSB kernel: each block row is owned by one worker, blocks are visited
/// left to right and entries in stored order.
pub fn spmm_csb_into(
    a: &CsbMatrix,
    b: &DenseMatrix,
    c: &mut DenseMatrix,
    workers: usize,
) -> Result<()> {
    check_dims(a.n(), b, Some(c))?;
    let d = b.n_cols();
    let t = a.block_dim();
    let n = a.n();
    let blocks = a.blocks();
    let block_ptr = a.block_ptr();
    let entry_offset =
        |br: usize| -> usize { blocks.get(block_ptr[br]).map_or(a.nnz(), |blk| blk.offset) };
    let block_ranges = balanced_ranges(a.n_block_rows(), workers, |br| {
        entry_offset(br) + (br * t).min(n)
    });
    let row_ranges: Vec<Range<usize>> = block_ranges
        .iter()
        .map(|r| (r.start * t).min(n)..(r.end * t).min(n))
        .collect();

    run_on_ranges(c.data_mut(), d, &row_ranges, |rows, out| {
        out.fill(0.0);
        let first_br = rows.start / t;
        let last_br = rows.end.div_ceil(t);
        for br in first_br..last_br {
            let base = (br * t - rows.start) * d;
            for blk in a.block_row(br) {
                let col_base = blk.block_col as usize * t;
                let (es, vs) = a.block_entries(blk);
                for (e, &v) in es.iter().zip(vs) {
                    let c_off = base + e.row as usize * d;
                    let b_off = (col_base + e.col as usize) * d;
                    let c_row = &mut out[c_off..c_off + d];
                    for (x, &bv) in c_row.iter_mut().zip(&b.data()[b_off..b_off + d]) {
                        *x += v * bv;
                    }
                }
            }
        }
    });
    Ok(())
}

/// Splits `0..units` into at most `parts` contiguous ranges of roughly equal
/// cumulative cost. `cost_prefix(u)` is the total cost of units before `u`
/// and must be nondecreasing.
fn balanced_ranges(
    units: usize,
    parts: usize,
    cost_prefix: impl Fn(usize) -> usize,
) -> Vec<Range<usize>> {
    let parts = parts.max(1).min(units.max(1));
    if units == 0 {
        return std::iter::once(0..0).collect();
    }
    let total = cost_prefix(units) as u128;
    let mut bounds = Vec::with_capacity(parts + 1);
    bounds.push(0usize);
    for p in 1..parts {
        let target = (total * p as u128 / parts as u128) as usize;
        let (mut lo, mut hi) = (*bounds.last().unwrap(), units);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if cost_prefix(mid) < target {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        bounds.push(lo);
    }
    bounds.push(units);
    bounds
        .windows(2)
        .filter(|w| w[0] < w[1])
        .map(|w| w[0]..w[1])
        .collect()
}

/// Hands each row range its disjoint slice of `out` and runs them on the
/// rayon pool (inline when there is a single range).
fn run_on_ranges<F>(out: &mut [f64], d: usize, ranges: &[Range<usize>], work: F)
where
    F: Fn(Range<usize>, &mut [f64]) + Sync,
{
    if ranges.len() <= 1 {
        if let Some(r) = ranges.first() {
            let (lo, hi) = (r.start * d, r.end * d);
            work(r.clone(), &mut out[lo..hi]);
        }
        return;
    }
    let mut rest = out;
    let mut consumed = 0;
    let mut slices = Vec::with_capacity(ranges.len());
    for r in ranges {
        let (_, tail) = rest.split_at_mut((r.start - consumed) * d);
        let (mine, tail) = tail.split_at_mut((r.end - r.start) * d);
        slices.push((r.clone(), mine));
        rest = tail;
        consumed = r.end;
    }
    let work = &work;
    rayon::scope(|s| {
        for (r, slice) in slices {
            s.spawn(move |_| work(r, slice));
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::CooEntries;

    fn csr(n: usize, t: &[(usize, usize, f64)]) -> CsrMatrix {
        CsrMatrix::from_coo(&CooEntries::from_triplets(n, n, t.iter().copied()).unwrap()).unwrap()
    }

    #[test]
    fn reference_hand_example() {
        let a = csr(2, &[(0, 0, 2.0), (1, 0, 1.0), (1, 1, 3.0)]);
        let b = DenseMatrix::from_vec(2, 1, vec![1.0, 2.0]).unwrap();
        let c = spmm_reference(&a, &b).unwrap();
        assert_eq!(c.data(), &[2.0, 7.0]);
    }

    #[test]
    fn identity_returns_b() {
        let b = DenseMatrix::random(4, 3, 1);
        let a = CsrMatrix::identity(4);
        assert_eq!(spmm_reference(&a, &b).unwrap(), b);
        assert_eq!(spmm_csr(&a, &b, 3).unwrap(), b);
        let csb = CsbMatrix::from_csr(&a, 2).unwrap();
        assert_eq!(spmm_csb(&csb, &b, 2).unwrap(), b);
    }

    #[test]
    fn empty_matrix_gives_zeros() {
        let a = csr(3, &[]);
        let b = DenseMatrix::random(3, 2, 7);
        let zeros = DenseMatrix::zeros(3, 2);
        assert_eq!(spmm_reference(&a, &b).unwrap(), zeros);
        assert_eq!(spmm_csr(&a, &b, 4).unwrap(), zeros);
        let csb = CsbMatrix::from_csr(&a, 2).unwrap();
        assert_eq!(spmm_csb(&csb, &b, 4).unwrap(), zeros);
    }

    #[test]
    fn dimension_mismatch() {
        let a = CsrMatrix::identity(3);
        let b = DenseMatrix::zeros(2, 2);
        assert!(matches!(
            spmm_reference(&a, &b),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            spmm_csr(&a, &b, 1),
            Err(Error::DimensionMismatch(_))
        ));
        let csb = CsbMatrix::from_csr(&a, 2).unwrap();
        assert!(matches!(
            spmm_csb(&csb, &b, 1),
            Err(Error::DimensionMismatch(_))
        ));
        let mut c = DenseMatrix::zeros(3, 1);
        let b = DenseMatrix::zeros(3, 2);
        assert!(spmm_csr_into(&a, &b, &mut c, 1).is_err());
    }

    #[test]
    fn csr_overwrites_stale_output() {
        let a = csr(2, &[(0, 1, 1.0)]);
        let b = DenseMatrix::from_vec(2, 1, vec![3.0, 4.0]).unwrap();
        let mut c = DenseMatrix::from_vec(2, 1, vec![99.0, 99.0]).unwrap();
        spmm_csr_into(&a, &b, &mut c, 2).unwrap();
        assert_eq!(c.data(), &[4.0, 0.0]);
        let csb = CsbMatrix::from_csr(&a, 1).unwrap();
        let mut c = DenseMatrix::from_vec(2, 1, vec![99.0, 99.0]).unwrap();
        spmm_csb_into(&csb, &b, &mut c, 2).unwrap();
        assert_eq!(c.data(), &[4.0, 0.0]);
    }

    #[test]
    fn wide_d_crosses_tile_boundary() {
        let a = csr(3, &[(0, 1, 2.0), (0, 2, -1.0), (2, 0, 0.5)]);
        let b = DenseMatrix::random(3, 150, 11);
        let r = spmm_reference(&a, &b).unwrap();
        assert!(spmm_csr(&a, &b, 2).unwrap().bit_eq(&r));
    }

    #[test]
    fn balanced_ranges_cover_everything() {
        let prefix = |i: usize| i * i;
        for units in [0, 1, 5, 100] {
            for parts in [1, 2, 3, 7, 200] {
                let ranges = balanced_ranges(units, parts, prefix);
                assert!(ranges.len() <= parts.max(1));
                let mut expect = 0;
                for r in &ranges {
                    assert_eq!(r.start, expect);
                    expect = r.end;
                }
                assert_eq!(expect, units);
            }
        }
    }

    #[test]
    fn kernel_id_parsing() {
        assert_eq!("CSR".parse::<KernelId>().unwrap(), KernelId::Csr);
        assert_eq!("csb".parse::<KernelId>().unwrap(), KernelId::Csb);
        assert_eq!(
            "reference".parse::<KernelId>().unwrap(),
            KernelId::Reference
        );
        assert!("mkl".parse::<KernelId>().is_err());
        for k in KernelId::ALL {
            assert_eq!(k.as_str().parse::<KernelId>().unwrap(), k);
        }
    }
}
