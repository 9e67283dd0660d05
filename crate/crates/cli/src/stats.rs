//! Structural statistics of a matrix: everything the models need as input.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use spmm_roofline::matrix::{catalog, default_block_dim};
use spmm_roofline::model::{
    block_stats_from_csb, default_k_min, empirical_hub_mass, estimate_alpha, BlockStats, ZMode,
};
use spmm_roofline::{CsbMatrix, CsrMatrix};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeSummary {
    pub min: u64,
    pub max: u64,
    pub mean: f64,
    pub median: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HubSummary {
    pub f: f64,
    pub n_hub: u64,
    pub nnz_hub: u64,
    /// `nnz_hub / nnz`.
    pub mass_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixStats {
    pub matrix: String,
    pub n: u64,
    pub nnz: u64,
    pub nnz_per_row: f64,
    pub block: BlockStats,
    pub z_exact: f64,
    pub z_poisson: f64,
    pub degrees: DegreeSummary,
    /// Lower cutoff used for the exponent fit.
    pub k_min: Option<u64>,
    /// `None` when the degree tail is too thin to fit.
    pub alpha: Option<f64>,
    pub hub: HubSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub struct StatsOptions {
    pub block_dim: Option<usize>,
    pub hub_fraction: f64,
    pub k_min: Option<u64>,
}

fn degree_summary(degrees: &[u64]) -> DegreeSummary {
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let len = sorted.len();
    let median = if len % 2 == 1 {
        sorted[len / 2] as f64
    } else {
        0.5 * (sorted[len / 2 - 1] + sorted[len / 2]) as f64
    };
    DegreeSummary {
        min: sorted[0],
        max: sorted[len - 1],
        mean: sorted.iter().sum::<u64>() as f64 / len as f64,
        median,
    }
}

pub fn compute(name: &str, a: &CsrMatrix, opts: &StatsOptions) -> Result<MatrixStats> {
    if a.nnz() == 0 {
        bail!("matrix {name} has no entries");
    }
    let t = opts.block_dim.unwrap_or_else(|| default_block_dim(a.n()));
    let csb = CsbMatrix::from_csr(a, t).context("building CSB layout")?;
    let block = block_stats_from_csb(&csb)?;

    let degrees = a.row_degrees();
    let k_min = match opts.k_min {
        Some(k) => Some(k),
        None => default_k_min(&degrees).ok(),
    };
    let alpha = k_min.and_then(|k| estimate_alpha(&degrees, k, true).ok());
    let (n_hub, nnz_hub) = empirical_hub_mass(&degrees, opts.hub_fraction)?;

    let (n, nnz) = (a.n() as u64, a.nnz() as u64);
    let note = catalog::lookup(name).and_then(|e| {
        (e.n != n || e.nnz != nnz).then(|| {
            format!(
                "{name} is listed with n={} nnz={}; this file has n={n} nnz={nnz}",
                e.n, e.nnz
            )
        })
    });

    Ok(MatrixStats {
        matrix: name.to_string(),
        n,
        nnz,
        nnz_per_row: nnz as f64 / n as f64,
        z_exact: block.model_z(ZMode::Exact),
        z_poisson: block.model_z(ZMode::Poisson),
        block,
        degrees: degree_summary(&degrees),
        k_min,
        alpha,
        hub: HubSummary {
            f: opts.hub_fraction,
            n_hub: n_hub as u64,
            nnz_hub,
            mass_fraction: nnz_hub as f64 / nnz as f64,
        },
        note,
    })
}

pub fn render_text(s: &MatrixStats) -> String {
    let mut out = String::new();
    let b = &s.block;
    let _ = writeln!(out, "matrix       {}", s.matrix);
    let _ = writeln!(out, "n            {}", s.n);
    let _ = writeln!(out, "nnz          {}", s.nnz);
    let _ = writeln!(out, "nnz/row      {:.4}", s.nnz_per_row);
    let _ = writeln!(out, "block dim t  {}", b.t);
    let _ = writeln!(out, "blocks N     {}", b.n_blocks);
    let _ = writeln!(out, "D (nnz/N)    {:.4}", b.avg_entries);
    let _ = writeln!(
        out,
        "z            measured {:.4}  exact {:.4}  poisson {:.4}",
        b.avg_nonempty_cols, s.z_exact, s.z_poisson
    );
    let d = &s.degrees;
    let _ = writeln!(
        out,
        "row degree   min {}  median {}  mean {:.4}  max {}",
        d.min, d.median, d.mean, d.max
    );
    match (s.alpha, s.k_min) {
        (Some(a), Some(k)) => {
            let _ = writeln!(out, "alpha        {a:.4} (k_min {k})");
        }
        _ => {
            let _ = writeln!(out, "alpha        n/a (degree tail too thin)");
        }
    }
    let h = &s.hub;
    let _ = writeln!(
        out,
        "hub mass     f={}  n_hub {}  nnz_hub {}  fraction {:.4}",
        h.f, h.n_hub, h.nnz_hub, h.mass_fraction
    );
    if let Some(note) = &s.note {
        let _ = writeln!(out, "note         {note}");
    }
    out
}
