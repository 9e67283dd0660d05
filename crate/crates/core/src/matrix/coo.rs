use crate::error::{Error, Result};

/// Coordinate-format triplets, the staging form for file ingestion.
///
/// Entries may arrive unsorted and with repeats; [`CooEntries::push`] only
/// checks bounds. Duplicates are summed when converting to CSR.
#[derive(Debug, Clone, PartialEq)]
pub struct CooEntries {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl CooEntries {
    pub fn new(n_rows: usize, n_cols: usize) -> Result<Self> {
        for dim in [n_rows, n_cols] {
            if dim > u32::MAX as usize {
                return Err(Error::IndexOverflow(dim));
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            entries: Vec::new(),
        })
    }

    pub fn with_capacity(n_rows: usize, n_cols: usize, capacity: usize) -> Result<Self> {
        let mut coo = Self::new(n_rows, n_cols)?;
        coo.entries.reserve(capacity);
        Ok(coo)
    }

    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut coo = Self::new(n_rows, n_cols)?;
        for (r, c, v) in triplets {
            coo.push(r, c, v)?;
        }
        Ok(coo)
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) -> Result<()> {
        if row >= self.n_rows || col >= self.n_cols {
            return Err(Error::IndexOutOfRange {
                row,
                col,
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        self.entries.push((row as u32, col as u32, value));
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Raw (row, col, value) triplets in insertion order.
    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn into_entries(self) -> Vec<(u32, u32, f64)> {
        self.entries
    }
}
