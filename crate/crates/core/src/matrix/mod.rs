//! Sparse and dense matrix containers, generators and file IO.

pub mod catalog;
mod coo;
mod csb;
mod csr;
mod dense;
pub mod fetch;
pub mod generate;
pub mod mtx;

pub use coo::CooEntries;
pub use csb::{default_block_dim, BlockEntry, CsbBlock, CsbMatrix};
pub use csr::CsrMatrix;
pub use dense::DenseMatrix;
pub use fetch::{fetch_suitesparse, FetchConfig};
pub use generate::{
    generate, generate_blocked, generate_erdos_renyi, generate_ideal_diagonal, generate_scale_free,
    GenSpec,
};
pub use mtx::{load_matrix_market, read_matrix_market, write_matrix_market, MtxField, MtxSymmetry};
