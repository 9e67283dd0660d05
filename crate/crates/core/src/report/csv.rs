//! Comma-separated files with a mandatory schema-version line followed by a
//! header row. Floats are written in shortest round-trip form, so reading a
//! file back reproduces every value bit for bit.

use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use crate::bench::BenchResult;
use crate::error::{Error, Result};
use crate::report::{MatrixMeta, ModelRow, ReportRow};

pub const BENCH_SCHEMA: &str = "# spmm-roofline bench v1";
pub const BENCH_HEADER: &str =
    "matrix,pattern,kernel,n,nnz,d,threads,median_seconds,gflops,run_seconds";

pub const MODEL_SCHEMA: &str = "# spmm-roofline model v1";
pub const MODEL_HEADER: &str = "matrix,pattern,d,n,nnz,flops,bytes,ai,bound_gflops";

pub const REPORT_SCHEMA: &str = "# spmm-roofline report v1";
pub const REPORT_HEADER: &str =
    "matrix,pattern,kernel,d,threads,ai_model,median_seconds,gflops,bound_gflops";

pub const META_SCHEMA: &str = "# spmm-roofline report-metadata v1";
pub const META_HEADER: &str = "matrix,pattern,n,nnz,generated_at,toolkit_version";

fn check_field(s: &str) -> Result<&str> {
    if s.contains([',', '"', '\n', '\r']) {
        return Err(Error::Csv {
            line: 0,
            msg: format!("field {s:?} contains a delimiter or quote"),
        });
    }
    Ok(s)
}

fn bench_line(b: &BenchResult) -> Result<String> {
    let runs: Vec<String> = b.run_seconds.iter().map(|r| r.to_string()).collect();
    Ok(format!(
        "{},{},{},{},{},{},{},{},{},{}",
        check_field(&b.matrix)?,
        b.pattern,
        b.kernel,
        b.n,
        b.nnz,
        b.d,
        b.threads,
        b.median_seconds,
        b.gflops,
        runs.join(";")
    ))
}

pub fn write_bench_csv<W: Write>(mut w: W, rows: &[BenchResult]) -> Result<()> {
    writeln!(w, "{BENCH_SCHEMA}")?;
    writeln!(w, "{BENCH_HEADER}")?;
    for b in rows {
        writeln!(w, "{}", bench_line(b)?)?;
    }
    Ok(())
}

/// Appends rows to a bench CSV, writing the schema and header first if the
/// file is new or empty. An existing file must carry the bench schema.
pub fn append_bench_csv(path: impl AsRef<Path>, rows: &[BenchResult]) -> Result<()> {
    let path = path.as_ref();
    let fresh = match fs::metadata(path) {
        Ok(m) => m.len() == 0,
        Err(_) => true,
    };
    if !fresh {
        let first = BufReader::new(fs::File::open(path)?)
            .lines()
            .next()
            .transpose()?
            .unwrap_or_default();
        if first != BENCH_SCHEMA {
            return Err(Error::Csv {
                line: 1,
                msg: format!("{} is not a bench results file", path.display()),
            });
        }
    }
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut buf = Vec::new();
    if fresh {
        write_bench_csv(&mut buf, rows)?;
    } else {
        for b in rows {
            writeln!(buf, "{}", bench_line(b)?)?;
        }
    }
    file.write_all(&buf)?;
    Ok(())
}

pub fn write_model_csv<W: Write>(mut w: W, rows: &[ModelRow]) -> Result<()> {
    writeln!(w, "{MODEL_SCHEMA}")?;
    writeln!(w, "{MODEL_HEADER}")?;
    for m in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            check_field(&m.matrix)?,
            m.pattern,
            m.d,
            m.n,
            m.nnz,
            m.flops,
            m.bytes,
            m.ai,
            m.bound_gflops
        )?;
    }
    Ok(())
}

pub fn write_report_csv<W: Write>(mut w: W, rows: &[ReportRow]) -> Result<()> {
    writeln!(w, "{REPORT_SCHEMA}")?;
    writeln!(w, "{REPORT_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            check_field(&r.matrix)?,
            r.pattern,
            r.kernel,
            r.d,
            r.threads,
            r.ai_model,
            r.median_seconds,
            r.gflops,
            r.bound_gflops
        )?;
    }
    Ok(())
}

pub fn write_meta_csv<W: Write>(
    mut w: W,
    matrices: &[MatrixMeta],
    generated_at: &str,
    version: &str,
) -> Result<()> {
    writeln!(w, "{META_SCHEMA}")?;
    writeln!(w, "{META_HEADER}")?;
    for m in matrices {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            check_field(&m.matrix)?,
            m.pattern,
            m.n,
            m.nnz,
            check_field(generated_at)?,
            check_field(version)?
        )?;
    }
    Ok(())
}

/// Splits a file into data rows after checking the schema and header lines.
fn data_rows<R: BufRead>(
    reader: R,
    schema: &str,
    header: &str,
) -> Result<Vec<(usize, Vec<String>)>> {
    let columns = header.split(',').count();
    let mut rows = Vec::new();
    let mut state = 0;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        match state {
            0 => {
                if line != schema {
                    return Err(Error::Csv {
                        line: lineno,
                        msg: format!("expected schema line '{schema}'"),
                    });
                }
                state = 1;
            }
            1 => {
                if line != header {
                    return Err(Error::Csv {
                        line: lineno,
                        msg: format!("expected header '{header}'"),
                    });
                }
                state = 2;
            }
            _ => {
                if line.is_empty() {
                    continue;
                }
                let fields: Vec<String> = line.split(',').map(str::to_string).collect();
                if fields.len() != columns {
                    return Err(Error::Csv {
                        line: lineno,
                        msg: format!("expected {columns} fields, found {}", fields.len()),
                    });
                }
                rows.push((lineno, fields));
            }
        }
    }
    if state < 2 {
        return Err(Error::Csv {
            line: 0,
            msg: "missing schema or header line".into(),
        });
    }
    Ok(rows)
}

fn field<T: FromStr>(fields: &[String], i: usize, line: usize, name: &str) -> Result<T> {
    fields[i].parse().map_err(|_| Error::Csv {
        line,
        msg: format!("invalid {name} '{}'", fields[i]),
    })
}

pub fn read_bench_csv<R: BufRead>(reader: R) -> Result<Vec<BenchResult>> {
    data_rows(reader, BENCH_SCHEMA, BENCH_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            let run_seconds = if f[9].is_empty() {
                Vec::new()
            } else {
                f[9].split(';')
                    .map(|s| {
                        s.parse().map_err(|_| Error::Csv {
                            line,
                            msg: format!("invalid run time '{s}'"),
                        })
                    })
                    .collect::<Result<_>>()?
            };
            Ok(BenchResult {
                matrix: f[0].clone(),
                pattern: field(&f, 1, line, "pattern")?,
                kernel: field(&f, 2, line, "kernel")?,
                n: field(&f, 3, line, "n")?,
                nnz: field(&f, 4, line, "nnz")?,
                d: field(&f, 5, line, "d")?,
                threads: field(&f, 6, line, "threads")?,
                median_seconds: field(&f, 7, line, "median_seconds")?,
                gflops: field(&f, 8, line, "gflops")?,
                run_seconds,
            })
        })
        .collect()
}

pub fn read_model_csv<R: BufRead>(reader: R) -> Result<Vec<ModelRow>> {
    data_rows(reader, MODEL_SCHEMA, MODEL_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            Ok(ModelRow {
                matrix: f[0].clone(),
                pattern: field(&f, 1, line, "pattern")?,
                d: field(&f, 2, line, "d")?,
                n: field(&f, 3, line, "n")?,
                nnz: field(&f, 4, line, "nnz")?,
                flops: field(&f, 5, line, "flops")?,
                bytes: field(&f, 6, line, "bytes")?,
                ai: field(&f, 7, line, "ai")?,
                bound_gflops: field(&f, 8, line, "bound_gflops")?,
            })
        })
        .collect()
}

pub fn read_report_csv<R: BufRead>(reader: R) -> Result<Vec<ReportRow>> {
    data_rows(reader, REPORT_SCHEMA, REPORT_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            Ok(ReportRow {
                matrix: f[0].clone(),
                pattern: field(&f, 1, line, "pattern")?,
                kernel: field(&f, 2, line, "kernel")?,
                d: field(&f, 3, line, "d")?,
                threads: field(&f, 4, line, "threads")?,
                ai_model: field(&f, 5, line, "ai_model")?,
                median_seconds: field(&f, 6, line, "median_seconds")?,
                gflops: field(&f, 7, line, "gflops")?,
                bound_gflops: field(&f, 8, line, "bound_gflops")?,
            })
        })
        .collect()
}

pub fn load_bench_csv(path: impl AsRef<Path>) -> Result<Vec<BenchResult>> {
    read_bench_csv(BufReader::new(fs::File::open(path)?))
}

pub fn load_model_csv(path: impl AsRef<Path>) -> Result<Vec<ModelRow>> {
    read_model_csv(BufReader::new(fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelId;
    use crate::model::Pattern;
    use proptest::prelude::*;

    fn sample(gflops: f64, secs: f64) -> BenchResult {
        BenchResult {
            kernel: KernelId::Csb,
            matrix: "er_12_10".into(),
            pattern: Pattern::Random,
            n: 4096,
            nnz: 40950,
            d: 16,
            threads: 4,
            median_seconds: secs,
            gflops,
            run_seconds: vec![secs, secs * 1.5, 0.1],
        }
    }

    #[test]
    fn schema_line_comes_first() {
        let mut out = Vec::new();
        write_bench_csv(&mut out, &[sample(1.0, 2.0)]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(BENCH_SCHEMA));
        assert_eq!(lines.next(), Some(BENCH_HEADER));
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }

    #[test]
    fn rejects_wrong_schema_and_ragged_rows() {
        let text = format!("{MODEL_SCHEMA}\n{BENCH_HEADER}\n");
        assert!(read_bench_csv(text.as_bytes()).is_err());
        let text = format!("{BENCH_SCHEMA}\n{BENCH_HEADER}\na,b\n");
        assert!(read_bench_csv(text.as_bytes()).is_err());
        assert!(read_bench_csv("".as_bytes()).is_err());
    }

    #[test]
    fn rejects_comma_in_matrix_id() {
        let mut b = sample(1.0, 1.0);
        b.matrix = "a,b".into();
        assert!(write_bench_csv(Vec::new(), &[b]).is_err());
    }

    #[test]
    fn append_writes_header_once() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        append_bench_csv(&path, &[sample(1.0, 1.0)]).unwrap();
        append_bench_csv(&path, &[sample(2.0, 0.5)]).unwrap();
        let rows = load_bench_csv(&path).unwrap();
        assert_eq!(rows.len(), 2);
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.matches(BENCH_SCHEMA).count(), 1);

        let other = dir.path().join("o.csv");
        fs::write(&other, "something else\n").unwrap();
        assert!(append_bench_csv(&other, &[sample(1.0, 1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn bench_rows_round_trip(gflops in 1e-6f64..1e6, secs in 1e-9f64..1e3) {
            let rows = vec![sample(gflops, secs)];
            let mut out = Vec::new();
            write_bench_csv(&mut out, &rows).unwrap();
            prop_assert_eq!(read_bench_csv(out.as_slice()).unwrap(), rows);
        }

        #[test]
        fn model_rows_round_trip(ai in 1e-6f64..1e3, bytes in 1.0f64..1e15) {
            let rows = vec![ModelRow {
                matrix: "m".into(), pattern: Pattern::ScaleFree, d: 4, n: 10, nnz: 20,
                flops: 160.0, bytes, ai, bound_gflops: ai * 122.6,
            }];
            let mut out = Vec::new();
            write_model_csv(&mut out, &rows).unwrap();
            prop_assert_eq!(read_model_csv(out.as_slice()).unwrap(), rows);
        }
    }
}
