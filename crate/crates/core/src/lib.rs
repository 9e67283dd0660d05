//! Sparsity-aware SpMM performance toolkit.
//!
//! The crate is split along the lines of the workflow it supports:
//!
//! - [`matrix`]: COO/CSR/CSB/dense containers, synthetic generators and
//!   Matrix Market IO (including a SuiteSparse download client).
//! - [`kernels`]: reference, CSR and CSB sparse-times-dense executors.
//! - [`model`]: FLOP/traffic accounting, the four arithmetic-intensity
//!   models, block and hub statistics, and the roofline bound.
//! - [`bench`]: kernel timing and the STREAM triad bandwidth probe.
//! - [`report`]: CSV schemas and the log-log roofline SVG emitter.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod config;
pub mod error;
pub mod kernels;
pub mod matrix;
pub mod model;
pub mod report;

pub use error::{Error, Result};
pub use kernels::{spmm_csb, spmm_csr, spmm_reference, KernelId};
pub use matrix::{CooEntries, CsbMatrix, CsrMatrix, DenseMatrix};
pub use model::{AiEstimate, MachineProfile, Pattern};
