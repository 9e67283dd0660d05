//! Merging bench results with model predictions, and the CSV/SVG emitters.
//!
//! Measured points are placed at the model-predicted intensity of the
//! matrix's declared pattern, not at a measured intensity. A point can
//! therefore sit above the bandwidth roof when the kernel gets more cache
//! reuse than the model assumes.

pub mod csv;
pub mod svg;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bench::BenchResult;
use crate::error::{Error, Result};
use crate::kernels::KernelId;
use crate::model::{roofline_bound, AiEstimate, MachineProfile, Pattern};

/// One model prediction for one matrix, pattern and dense width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRow {
    pub matrix: String,
    pub pattern: Pattern,
    pub d: u64,
    pub n: u64,
    pub nnz: u64,
    pub flops: f64,
    pub bytes: f64,
    pub ai: f64,
    pub bound_gflops: f64,
}

impl ModelRow {
    pub fn from_estimate(
        matrix: &str,
        n: u64,
        nnz: u64,
        est: &AiEstimate,
        profile: &MachineProfile,
    ) -> Self {
        Self {
            matrix: matrix.to_string(),
            pattern: est.pattern,
            d: est.d,
            n,
            nnz,
            flops: est.flops,
            bytes: est.bytes,
            ai: est.ai,
            bound_gflops: est.bound_gflops(profile),
        }
    }
}

/// A measured point joined with its model vertical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub matrix: String,
    pub pattern: Pattern,
    pub kernel: KernelId,
    pub d: u64,
    pub threads: usize,
    pub ai_model: f64,
    pub median_seconds: f64,
    pub gflops: f64,
    pub bound_gflops: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixMeta {
    pub matrix: String,
    pub pattern: Pattern,
    pub n: u64,
    pub nnz: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RooflineReport {
    pub profile: MachineProfile,
    /// Model verticals with bounds recomputed against `profile`.
    pub verticals: Vec<ModelRow>,
    pub points: Vec<ReportRow>,
    pub matrices: Vec<MatrixMeta>,
}

/// Joins bench rows to model rows on (matrix, pattern, d).
///
/// Fails if either input is empty, if the two inputs name different sets of
/// matrices, or if a bench row has no model vertical.
pub fn build_report(
    bench: &[BenchResult],
    models: &[ModelRow],
    profile: &MachineProfile,
) -> Result<RooflineReport> {
    profile.validate()?;
    if bench.is_empty() {
        return Err(Error::Report("no bench results".into()));
    }
    if models.is_empty() {
        return Err(Error::Report("no model rows".into()));
    }
    let bench_ids: BTreeSet<&str> = bench.iter().map(|b| b.matrix.as_str()).collect();
    let model_ids: BTreeSet<&str> = models.iter().map(|m| m.matrix.as_str()).collect();
    if bench_ids != model_ids {
        return Err(Error::Report(format!(
            "matrix ids differ: bench {bench_ids:?}, models {model_ids:?}"
        )));
    }

    let mut verticals: BTreeMap<(String, Pattern, u64), ModelRow> = BTreeMap::new();
    for m in models {
        let key = (m.matrix.clone(), m.pattern, m.d);
        let mut row = m.clone();
        row.bound_gflops = roofline_bound(profile, m.ai);
        if let Some(prev) = verticals.insert(key, row) {
            if prev.ai.to_bits() != m.ai.to_bits() {
                return Err(Error::Report(format!(
                    "conflicting model rows for {} {} d={}",
                    m.matrix, m.pattern, m.d
                )));
            }
        }
    }

    let mut matrices: BTreeMap<String, MatrixMeta> = BTreeMap::new();
    let mut points = Vec::with_capacity(bench.len());
    for b in bench {
        let key = (b.matrix.clone(), b.pattern, b.d);
        let v = verticals.get(&key).ok_or_else(|| {
            Error::Report(format!(
                "no model row for matrix {} pattern {} d={}",
                b.matrix, b.pattern, b.d
            ))
        })?;
        if v.n != b.n || v.nnz != b.nnz {
            return Err(Error::Report(format!(
                "matrix {} has n={} nnz={} in bench results but n={} nnz={} in models",
                b.matrix, b.n, b.nnz, v.n, v.nnz
            )));
        }
        matrices
            .entry(b.matrix.clone())
            .or_insert_with(|| MatrixMeta {
                matrix: b.matrix.clone(),
                pattern: b.pattern,
                n: b.n,
                nnz: b.nnz,
            });
        points.push(ReportRow {
            matrix: b.matrix.clone(),
            pattern: b.pattern,
            kernel: b.kernel,
            d: b.d,
            threads: b.threads,
            ai_model: v.ai,
            median_seconds: b.median_seconds,
            gflops: b.gflops,
            bound_gflops: v.bound_gflops,
        });
    }

    Ok(RooflineReport {
        profile: *profile,
        verticals: verticals.into_values().collect(),
        points,
        matrices: matrices.into_values().collect(),
    })
}
