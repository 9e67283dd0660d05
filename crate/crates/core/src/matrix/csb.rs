use crate::error::{Error, Result};
use crate::matrix::CsrMatrix;

/// Largest supported block dimension; local indices are stored as `u16`.
pub const MAX_BLOCK_DIM: usize = 1 << 16;

/// Local coordinates of one entry inside a `t x t` block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockEntry {
    pub row: u16,
    pub col: u16,
}

/// A nonzero block: position in the block grid and its slice of the entry arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsbBlock {
    pub block_row: u32,
    pub block_col: u32,
    pub count: u32,
    pub offset: usize,
}

/// Compressed sparse blocks: the matrix cut into `t x t` tiles, each
/// nonzero tile storing its entries with 16-bit local indices.
///
/// Blocks are ordered block-row-major (left to right within a block row)
/// and entries row-major within a block. Only nonzero blocks are stored,
/// so every block holds at least one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CsbMatrix {
    n: usize,
    t: usize,
    block_ptr: Vec<usize>,
    blocks: Vec<CsbBlock>,
    entries: Vec<BlockEntry>,
    values: Vec<f64>,
}

/// `2^ceil(log2 sqrt(n))`, clamped to `[32, 2^15]`.
pub fn default_block_dim(n: usize) -> usize {
    let root = (n as f64).sqrt();
    let exp = root.log2().ceil().max(0.0) as u32;
    let t = 1usize.checked_shl(exp).unwrap_or(1 << 15);
    t.clamp(32, 1 << 15)
}

impl CsbMatrix {
    pub fn from_csr(a: &CsrMatrix, t: usize) -> Result<Self> {
        if t == 0 || !t.is_power_of_two() {
            return Err(Error::BlockNotPowerOfTwo(t));
        }
        if t > MAX_BLOCK_DIM {
            return Err(Error::BlockTooLarge(t));
        }
        let n = a.n();
        let n_block_rows = n.div_ceil(t);
        let shift = t.trailing_zeros();
        let mask = (t - 1) as u32;

        let mut block_ptr = Vec::with_capacity(n_block_rows + 1);
        let mut blocks = Vec::new();
        let mut entries = Vec::with_capacity(a.nnz());
        let mut values = Vec::with_capacity(a.nnz());
        block_ptr.push(0);

        // (block col, local row, local col, value) for the current block row.
        let mut staged: Vec<(u32, u16, u16, f64)> = Vec::new();
        for br in 0..n_block_rows {
            staged.clear();
            let row_lo = br * t;
            let row_hi = (row_lo + t).min(n);
            for i in row_lo..row_hi {
                let (cols, vals) = a.row(i);
                let local_row = (i - row_lo) as u16;
                for (&c, &v) in cols.iter().zip(vals) {
                    staged.push((c >> shift, local_row, (c & mask) as u16, v));
                }
            }
            // Stable: rows were pushed in order and columns increase within a row,
            // so each block comes out row-major.
            staged.sort_by_key(|e| e.0);

            let mut k = 0;
            while k < staged.len() {
                let bc = staged[k].0;
                let offset = entries.len();
                while k < staged.len() && staged[k].0 == bc {
                    let (_, r, c, v) = staged[k];
                    entries.push(BlockEntry { row: r, col: c });
                    values.push(v);
                    k += 1;
                }
                blocks.push(CsbBlock {
                    block_row: br as u32,
                    block_col: bc,
                    count: (entries.len() - offset) as u32,
                    offset,
                });
            }
            block_ptr.push(blocks.len());
        }

        Ok(Self {
            n,
            t,
            block_ptr,
            blocks,
            entries,
            values,
        })
    }

    /// Reassembles the CSR form; exact inverse of [`CsbMatrix::from_csr`].
    pub fn to_csr(&self) -> CsrMatrix {
        let n = self.n;
        let mut row_ptr = vec![0u32; n + 1];
        for block in &self.blocks {
            let base = block.block_row as usize * self.t;
            for e in self.block_entries(block).0 {
                row_ptr[base + e.row as usize + 1] += 1;
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut next: Vec<u32> = row_ptr[..n].to_vec();
        let mut col_idx = vec![0u32; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // Blocks within a block row are visited left to right, so each row's
        // columns are written in increasing order.
        for block in &self.blocks {
            let row_base = block.block_row as usize * self.t;
            let col_base = block.block_col as usize * self.t;
            let (es, vs) = self.block_entries(block);
            for (e, &v) in es.iter().zip(vs) {
                let slot = &mut next[row_base + e.row as usize];
                col_idx[*slot as usize] = (col_base + e.col as usize) as u32;
                values[*slot as usize] = v;
                *slot += 1;
            }
        }
        CsrMatrix::from_parts_unchecked(n, row_ptr, col_idx, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Block dimension `t`.
    pub fn block_dim(&self) -> usize {
        self.t
    }

    pub fn n_block_rows(&self) -> usize {
        self.block_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Number of nonzero blocks, `N`.
    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Average entries per nonzero block, `D = nnz / N`.
    pub fn avg_block_entries(&self) -> Option<f64> {
        (!self.blocks.is_empty()).then(|| self.nnz() as f64 / self.n_blocks() as f64)
    }

    pub fn block_ptr(&self) -> &[usize] {
        &self.block_ptr
    }

    pub fn blocks(&self) -> &[CsbBlock] {
        &self.blocks
    }

    /// Blocks belonging to block row `br`, in left-to-right order.
    pub fn block_row(&self, br: usize) -> &[CsbBlock] {
        &self.blocks[self.block_ptr[br]..self.block_ptr[br + 1]]
    }

    pub fn block_entries(&self, block: &CsbBlock) -> (&[BlockEntry], &[f64]) {
        let range = block.offset..block.offset + block.count as usize;
        (&self.entries[range.clone()], &self.values[range])
    }

    pub fn entries(&self) -> &[BlockEntry] {
        &self.entries
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
