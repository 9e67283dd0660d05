use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use spmm_roofline::bench::{default_threads, stream_triad, time_spmm, BenchConfig, MatrixLabel};
use spmm_roofline::config::ProfileConfig;
use spmm_roofline::matrix::{
    catalog, fetch_suitesparse, load_matrix_market, write_matrix_market, FetchConfig, GenSpec,
    MtxField, MtxSymmetry,
};
use spmm_roofline::model::{
    ai_blocked_with, ai_diagonal, ai_random, ai_scale_free, analytic_hub_stats, HubSource,
    MachineProfile,
};
use spmm_roofline::report::csv::{
    append_bench_csv, load_bench_csv, load_model_csv, write_bench_csv, write_meta_csv,
    write_model_csv, write_report_csv,
};
use spmm_roofline::report::svg::render_svg;
use spmm_roofline::report::{build_report, ModelRow};
use spmm_roofline::{AiEstimate, CsrMatrix, Pattern};

use crate::stats::{self, MatrixStats, StatsOptions};
use crate::{
    BenchArgs, CalibrateArgs, FetchArgs, FieldArg, GenerateArgs, ModelArgs, ReportArgs, StatsArgs,
};

fn load_csr(path: &Path) -> Result<CsrMatrix> {
    let coo = load_matrix_market(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(CsrMatrix::from_coo(&coo)?)
}

fn file_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Explicit pattern, else the built-in list's label for `id`.
fn resolve_pattern(explicit: Option<Pattern>, id: &str) -> Result<Pattern> {
    explicit
        .or_else(|| catalog::lookup(id).map(|e| e.pattern))
        .ok_or_else(|| anyhow!("no pattern known for '{id}'; pass --pattern"))
}

fn load_profile(path: Option<&Path>) -> Result<ProfileConfig> {
    match path {
        Some(p) => {
            ProfileConfig::load(p).with_context(|| format!("loading profile {}", p.display()))
        }
        None => Ok(ProfileConfig::default()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn generate(a: GenerateArgs) -> Result<()> {
    let spec = GenSpec {
        pattern: a.pattern,
        n: a.n,
        avg_nnz: a.avg_nnz,
        alpha: a.alpha,
        block_dim: a.block_dim,
        seed: a.seed,
    };
    let m = spmm_roofline::matrix::generate(&spec)?;
    let field = match a.field {
        FieldArg::Pattern => MtxField::Pattern,
        FieldArg::Real => MtxField::Real,
        FieldArg::Integer => MtxField::Integer,
    };
    let mut w = create(&a.out)?;
    write_matrix_market(&mut w, &m, field, MtxSymmetry::General)?;
    w.flush()?;
    println!("n={} nnz={} pattern={}", m.n(), m.nnz(), a.pattern);
    Ok(())
}

pub fn fetch(a: FetchArgs) -> Result<()> {
    let group = match a.group {
        Some(g) => g,
        None => catalog::lookup(&a.name)
            .and_then(|e| e.group)
            .ok_or_else(|| anyhow!("no SuiteSparse group known for '{}'; pass --group", a.name))?
            .to_string(),
    };
    let mut cfg = FetchConfig::new(a.cache_dir);
    if let Some(p) = &a.profile {
        cfg.url_template = load_profile(Some(p))?.suitesparse_url;
    }
    if let Some(t) = a.url_template {
        cfg.url_template = t;
    }
    let path = fetch_suitesparse(&group, &a.name, &cfg)?;
    println!("{}", path.display());
    Ok(())
}

pub fn stats(a: StatsArgs) -> Result<()> {
    let m = load_csr(&a.matrix)?;
    let id = a.id.unwrap_or_else(|| file_id(&a.matrix));
    let s = stats::compute(
        &id,
        &m,
        &StatsOptions {
            block_dim: a.block_dim,
            hub_fraction: a.hub_fraction,
            k_min: a.k_min,
        },
    )?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&s)?);
    } else {
        print!("{}", stats::render_text(&s));
    }
    Ok(())
}

pub fn calibrate(a: CalibrateArgs) -> Result<()> {
    let mut cfg = if a.profile.exists() {
        load_profile(Some(&a.profile))?
    } else {
        ProfileConfig::default()
    };
    if a.elements.is_some() {
        cfg.stream_elements = a.elements;
    }
    let threads = a.threads.map_or_else(default_threads, |t| t.0);
    let elements = cfg.stream_elements();
    eprintln!(
        "triad: {elements} elements, {} repetitions, {threads} threads",
        a.reps
    );
    let beta = stream_triad(elements, a.reps, threads)?;
    cfg.beta_gbps = beta;
    cfg.save(&a.profile)?;
    println!("beta_gbps={beta:.3} written to {}", a.profile.display());
    Ok(())
}

pub fn bench(a: BenchArgs) -> Result<()> {
    if !a.profile.exists() {
        bail!(
            "machine profile {} not found; run `spmm-roofline calibrate --profile {}` first",
            a.profile.display(),
            a.profile.display()
        );
    }
    let profile = load_profile(Some(&a.profile))?;
    let id = a.id.unwrap_or_else(|| file_id(&a.matrix));
    let label = MatrixLabel {
        pattern: resolve_pattern(a.pattern, &id)?,
        id,
    };
    let threads = if a.threads.is_empty() {
        vec![default_threads()]
    } else {
        let mut seen = Vec::new();
        for t in &a.threads {
            if !seen.contains(&t.0) {
                seen.push(t.0);
            }
        }
        seen
    };
    let cfg = BenchConfig {
        warmup_runs: a.warmup.unwrap_or(profile.warmup_runs),
        timed_runs: a.timed.unwrap_or(profile.timed_runs),
        d_values: a.d,
        thread_counts: threads,
        seed: a.seed,
        block_dim: a.block_dim,
    };
    cfg.validate()?;
    let m = load_csr(&a.matrix)?;

    let mut results = Vec::new();
    for &kernel in &a.kernels {
        for &d in &cfg.d_values {
            for &t in &cfg.thread_counts {
                let r = time_spmm(kernel, &m, &label, d, t, &cfg)
                    .with_context(|| format!("{kernel} d={d} threads={t}"))?;
                eprintln!(
                    "{} {} d={} threads={} median {:.3e} s  {:.3} GFLOP/s",
                    r.matrix, r.kernel, r.d, r.threads, r.median_seconds, r.gflops
                );
                results.push(r);
            }
        }
    }
    match &a.out {
        Some(path) => append_bench_csv(path, &results)?,
        None => write_bench_csv(io::stdout().lock(), &results)?,
    }
    Ok(())
}

/// Model input: a loaded matrix (statistics computed on demand) or a stats file.
enum ModelInput {
    Matrix {
        m: CsrMatrix,
        stats: Option<MatrixStats>,
    },
    Stats(MatrixStats),
}

impl ModelInput {
    fn dims(&self) -> (u64, u64) {
        match self {
            ModelInput::Matrix { m, .. } => (m.n() as u64, m.nnz() as u64),
            ModelInput::Stats(s) => (s.n, s.nnz),
        }
    }

    fn stats(&mut self, id: &str, opts: &StatsOptions) -> Result<&MatrixStats> {
        match self {
            ModelInput::Stats(s) => Ok(s),
            ModelInput::Matrix { m, stats } => {
                if stats.is_none() {
                    *stats = Some(stats::compute(id, m, opts)?);
                }
                Ok(stats.as_ref().expect("just computed"))
            }
        }
    }
}

pub fn model(a: ModelArgs) -> Result<()> {
    let mut cfg = load_profile(a.profile.as_deref())?;
    if let Some(v) = a.traffic_a_bytes {
        cfg.traffic_a_bytes = v;
    }
    if let Some(v) = a.reuse_factor {
        cfg.reuse_factor = v;
    }
    if let Some(v) = a.hub_fraction {
        cfg.hub_fraction = v;
    }
    let machine = cfg.machine();
    machine.validate()?;
    if !(cfg.traffic_a_bytes >= 0.0 && cfg.reuse_factor >= 0.0) {
        bail!("traffic-a-bytes and reuse-factor must be nonnegative");
    }

    let (mut input, id) = match (&a.matrix, &a.stats) {
        (Some(path), _) => (
            ModelInput::Matrix {
                m: load_csr(path)?,
                stats: None,
            },
            a.id.clone().unwrap_or_else(|| file_id(path)),
        ),
        (None, Some(path)) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let s: MatrixStats = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            let id = a.id.clone().unwrap_or_else(|| s.matrix.clone());
            (ModelInput::Stats(s), id)
        }
        (None, None) => bail!("pass a matrix file or --stats"),
    };
    let pattern = resolve_pattern(a.pattern, &id)?;
    let (n, nnz) = input.dims();
    if nnz == 0 {
        bail!("matrix {id} has no entries");
    }
    let opts = StatsOptions {
        block_dim: a.block_dim,
        hub_fraction: cfg.hub_fraction,
        k_min: a.k_min,
    };

    let estimates: Vec<AiEstimate> = match pattern {
        Pattern::Random => a.d.iter().map(|&d| ai_random(n, nnz, d as u64)).collect(),
        Pattern::Diagonal => a.d.iter().map(|&d| ai_diagonal(n, nnz, d as u64)).collect(),
        Pattern::Blocked => {
            let s = input.stats(&id, &opts)?;
            if let Some(t) = a.block_dim {
                if t != s.block.t {
                    bail!("stats were computed at block dim {}, not {t}", s.block.t);
                }
            }
            let z = match a.z_source.mode() {
                Some(mode) => s.block.model_z(mode),
                None => s.block.avg_nonempty_cols,
            };
            let (nb, params) = (s.block.n_blocks, cfg.blocked_params());
            a.d.iter()
                .map(|&d| ai_blocked_with(n, nnz, d as u64, nb, z, params))
                .collect()
        }
        Pattern::ScaleFree => {
            let f = cfg.hub_fraction;
            let hub_source: HubSource = a.hub_source.into();
            let (nnz_hub, n_hub) = match hub_source {
                HubSource::Analytic => {
                    let alpha = match a.alpha {
                        Some(al) => al,
                        None => input.stats(&id, &opts)?.alpha.ok_or_else(|| {
                            anyhow!("no exponent could be fitted for {id}; pass --alpha")
                        })?,
                    };
                    let h = analytic_hub_stats(n as usize, nnz, alpha, f)?;
                    (h.nnz_hub, h.n_hub)
                }
                HubSource::Empirical => {
                    let s = input.stats(&id, &opts)?;
                    if s.hub.f != f {
                        bail!("stats hold hub mass at f={}, not f={f}", s.hub.f);
                    }
                    (s.hub.nnz_hub as f64, s.hub.n_hub)
                }
            };
            a.d.iter()
                .map(|&d| ai_scale_free(n, nnz, d as u64, nnz_hub.min(nnz as f64), n_hub))
                .collect()
        }
    };

    let rows: Vec<ModelRow> = estimates
        .iter()
        .map(|e| ModelRow::from_estimate(&id, n, nnz, e, &machine))
        .collect();
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            write_model_csv(&mut w, &rows)?;
            w.flush()?;
        }
        None => write_model_csv(io::stdout().lock(), &rows)?,
    }
    Ok(())
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn report(a: ReportArgs) -> Result<()> {
    let profile: MachineProfile = load_profile(a.profile.as_deref())?.machine();
    let bench =
        load_bench_csv(&a.results).with_context(|| format!("reading {}", a.results.display()))?;
    let models =
        load_model_csv(&a.models).with_context(|| format!("reading {}", a.models.display()))?;
    let report = build_report(&bench, &models, &profile)?;

    if let Some(path) = &a.out_csv {
        write_file(path, |w| Ok(write_report_csv(w, &report.points)?))?;
    }
    if let Some(path) = &a.out_svg {
        write_file(path, |w| Ok(w.write_all(render_svg(&report).as_bytes())?))?;
    }
    if let Some(path) = &a.out_meta {
        let stamp = a.timestamp.clone().unwrap_or_else(|| {
            chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
        });
        write_file(path, |w| {
            Ok(write_meta_csv(
                w,
                &report.matrices,
                &stamp,
                env!("CARGO_PKG_VERSION"),
            )?)
        })?;
    }
    eprintln!(
        "{} points, {} verticals, {} matrices",
        report.points.len(),
        report.verticals.len(),
        report.matrices.len()
    );
    Ok(())
}
