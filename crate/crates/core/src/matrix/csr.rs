use crate::error::{Error, Result};
use crate::matrix::CooEntries;

/// Square sparse matrix in compressed-sparse-row layout.
///
/// Values are `f64` and both index arrays are `u32`, which fixes the byte
/// costs used by the traffic models: 8 per value, 4 per column index and
/// 4 per row pointer.
///
/// Invariants, checked by every constructor:
/// `row_ptr[0] == 0`, `row_ptr` nondecreasing, `row_ptr[n] == nnz`, and
/// column indices strictly increasing within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<u32>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a CSR matrix from triplets, sorting each row and summing
    /// duplicate coordinates.
    pub fn from_coo(coo: &CooEntries) -> Result<Self> {
        if coo.n_rows() != coo.n_cols() {
            return Err(Error::NotSquare {
                rows: coo.n_rows(),
                cols: coo.n_cols(),
            });
        }
        let n = coo.n_rows();
        let entries = coo.entries();
        if entries.len() > u32::MAX as usize {
            return Err(Error::IndexOverflow(entries.len()));
        }

        // Counting sort by row, then sort + merge within each row.
        let mut counts = vec![0u32; n + 1];
        for &(r, _, _) in entries {
            counts[r as usize + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut scattered: Vec<(u32, f64)> = vec![(0, 0.0); entries.len()];
        for &(r, c, v) in entries {
            let slot = &mut next[r as usize];
            scattered[*slot as usize] = (c, v);
            *slot += 1;
        }

        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        row_ptr.push(0u32);
        for i in 0..n {
            let row = &mut scattered[counts[i] as usize..counts[i + 1] as usize];
            // Stable sort keeps insertion order among duplicates so their sum is reproducible.
            row.sort_by_key(|&(c, _)| c);
            let mut iter = row.iter().copied();
            if let Some((mut cur_c, mut cur_v)) = iter.next() {
                for (c, v) in iter {
                    if c == cur_c {
                        cur_v += v;
                    } else {
                        col_idx.push(cur_c);
                        values.push(cur_v);
                        cur_c = c;
                        cur_v = v;
                    }
                }
                col_idx.push(cur_c);
                values.push(cur_v);
            }
            row_ptr.push(col_idx.len() as u32);
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Wraps raw CSR arrays after checking every layout invariant.
    pub fn from_parts(
        n: usize,
        row_ptr: Vec<u32>,
        col_idx: Vec<u32>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::IndexOverflow(n));
        }
        if row_ptr.len() != n + 1 {
            return Err(Error::DimensionMismatch(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                n + 1
            )));
        }
        if col_idx.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} column indices but {} values",
                col_idx.len(),
                values.len()
            )));
        }
        if row_ptr[0] != 0 || row_ptr[n] as usize != col_idx.len() {
            return Err(Error::DimensionMismatch(
                "row_ptr must start at 0 and end at nnz".into(),
            ));
        }
        for i in 0..n {
            let (lo, hi) = (row_ptr[i] as usize, row_ptr[i + 1] as usize);
            if lo > hi {
                return Err(Error::DimensionMismatch(format!(
                    "row_ptr decreases at row {i}"
                )));
            }
            let cols = &col_idx[lo..hi];
            if let Some(&c) = cols.iter().find(|&&c| c as usize >= n) {
                return Err(Error::IndexOutOfRange {
                    row: i,
                    col: c as usize,
                    rows: n,
                    cols: n,
                });
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::DimensionMismatch(format!(
                    "column indices of row {i} are not strictly increasing"
                )));
            }
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Construction path for generators that already emit sorted, unique rows.
    pub(crate) fn from_parts_unchecked(
        n: usize,
        row_ptr: Vec<u32>,
        col_idx: Vec<u32>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), n + 1);
        debug_assert_eq!(*row_ptr.last().unwrap() as usize, col_idx.len());
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_ptr: (0..=n as u32).collect(),
            col_idx: (0..n as u32).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[u32] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (lo, hi) = (self.row_ptr[i] as usize, self.row_ptr[i + 1] as usize);
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        (self.row_ptr[i + 1] - self.row_ptr[i]) as usize
    }

    /// Per-row entry counts; the vertex degrees when the matrix is an adjacency matrix.
    pub fn row_degrees(&self) -> Vec<u64> {
        self.row_ptr
            .windows(2)
            .map(|w| (w[1] - w[0]) as u64)
            .collect()
    }

    /// `(row, col, value)` triplets in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter()
                .zip(vals)
                .map(move |(&c, &v)| (i, c as usize, v))
        })
    }

    pub fn to_coo(&self) -> CooEntries {
        let mut coo = CooEntries::with_capacity(self.n, self.n, self.nnz())
            .expect("CSR dimensions already fit u32");
        for (r, c, v) in self.triplets() {
            coo.push(r, c, v).expect("CSR indices are in range");
        }
        coo
    }

    /// Whether the sparsity pattern and values are symmetric.
    pub fn is_symmetric(&self) -> bool {
        self.triplets().all(|(r, c, v)| {
            let (cols, vals) = self.row(c);
            match cols.binary_search(&(r as u32)) {
                Ok(pos) => vals[pos].to_bits() == v.to_bits(),
                Err(_) => false,
            }
        })
    }
}
