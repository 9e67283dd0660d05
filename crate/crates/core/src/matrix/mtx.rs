//! Matrix Market coordinate format.
//!
//! Supported headers are `%%MatrixMarket matrix coordinate F S` with
//! `F` in {real, integer, pattern} and `S` in {general, symmetric}. Indices
//! in the file are 1-based. Pattern entries read as 1.0 and symmetric files
//! are expanded so both triangles are present.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{CooEntries, CsrMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtxField {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtxSymmetry {
    General,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MtxHeader {
    pub field: MtxField,
    pub symmetry: MtxSymmetry,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::MatrixMarket {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line: &str) -> Result<MtxHeader> {
    let tokens: Vec<String> = line
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(
            1,
            "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(parse_err(1, format!("unsupported object '{}'", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported format '{}'", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" => MtxField::Real,
        "integer" => MtxField::Integer,
        "pattern" => MtxField::Pattern,
        "complex" => return Err(parse_err(1, "complex values are not supported")),
        other => return Err(parse_err(1, format!("unknown field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => MtxSymmetry::General,
        "symmetric" => MtxSymmetry::Symmetric,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };
    Ok(MtxHeader { field, symmetry })
}

fn parse_index(tok: Option<&str>, bound: usize, line: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing index"))?;
    let idx: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid index '{tok}'")))?;
    if idx == 0 || idx > bound {
        return Err(parse_err(line, format!("index {idx} outside 1..={bound}")));
    }
    Ok(idx - 1)
}

/// Reads a coordinate Matrix Market stream into triplets.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<CooEntries> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => parse_header(&line?)?,
        None => return Err(parse_err(1, "empty file")),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut coo: Option<CooEntries> = None;
    let mut seen = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        match size {
            None => {
                let mut dim = || -> Result<usize> {
                    let t = toks
                        .next()
                        .ok_or_else(|| parse_err(lineno, "size line needs 'rows cols nnz'"))?;
                    t.parse()
                        .map_err(|_| parse_err(lineno, format!("invalid size '{t}'")))
                };
                let (rows, cols, nnz) = (dim()?, dim()?, dim()?);
                if toks.next().is_some() {
                    return Err(parse_err(lineno, "size line needs exactly 'rows cols nnz'"));
                }
                if header.symmetry == MtxSymmetry::Symmetric && rows != cols {
                    return Err(parse_err(lineno, "symmetric matrix must be square"));
                }
                let cap = match header.symmetry {
                    MtxSymmetry::General => nnz,
                    MtxSymmetry::Symmetric => nnz.saturating_mul(2),
                };
                coo = Some(CooEntries::with_capacity(rows, cols, cap)?);
                size = Some((rows, cols, nnz));
            }
            Some((rows, cols, nnz)) => {
                if seen == nnz {
                    return Err(parse_err(
                        lineno,
                        format!("more than the declared {nnz} entries"),
                    ));
                }
                let r = parse_index(toks.next(), rows, lineno)?;
                let c = parse_index(toks.next(), cols, lineno)?;
                let v = match header.field {
                    MtxField::Pattern => 1.0,
                    MtxField::Real | MtxField::Integer => {
                        let t = toks
                            .next()
                            .ok_or_else(|| parse_err(lineno, "missing value"))?;
                        t.parse::<f64>()
                            .map_err(|_| parse_err(lineno, format!("invalid value '{t}'")))?
                    }
                };
                if toks.next().is_some() {
                    return Err(parse_err(lineno, "trailing tokens after entry"));
                }
                let coo = coo.as_mut().expect("allocated with size line");
                coo.push(r, c, v)?;
                if header.symmetry == MtxSymmetry::Symmetric && r != c {
                    coo.push(c, r, v)?;
                }
                seen += 1;
            }
        }
    }
    match (size, coo) {
        (Some((_, _, nnz)), Some(coo)) if seen == nnz => Ok(coo),
        (Some((_, _, nnz)), _) => Err(parse_err(
            0,
            format!("expected {nnz} entries, found {seen}"),
        )),
        _ => Err(parse_err(0, "missing size line")),
    }
}

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<CooEntries> {
    let file = File::open(path.as_ref())?;
    read_matrix_market(BufReader::new(file))
}

/// Writes `a` in coordinate format.
///
/// `Symmetric` emits only the lower triangle and fails if `a` is not
/// symmetric. `Integer` requires integral values; `Pattern` drops values.
pub fn write_matrix_market<W: Write>(
    writer: W,
    a: &CsrMatrix,
    field: MtxField,
    symmetry: MtxSymmetry,
) -> Result<()> {
    if symmetry == MtxSymmetry::Symmetric && !a.is_symmetric() {
        return Err(Error::DimensionMismatch(
            "cannot write a non-symmetric matrix with symmetric storage".into(),
        ));
    }
    if field == MtxField::Integer && a.values().iter().any(|v| v.fract() != 0.0) {
        return Err(Error::DimensionMismatch(
            "integer field requires integral values".into(),
        ));
    }
    let keep = |r: usize, c: usize| symmetry == MtxSymmetry::General || r >= c;
    let count = a.triplets().filter(|&(r, c, _)| keep(r, c)).count();

    let mut w = BufWriter::new(writer);
    let field_name = match field {
        MtxField::Real => "real",
        MtxField::Integer => "integer",
        MtxField::Pattern => "pattern",
    };
    let sym_name = match symmetry {
        MtxSymmetry::General => "general",
        MtxSymmetry::Symmetric => "symmetric",
    };
    writeln!(
        w,
        "%%MatrixMarket matrix coordinate {field_name} {sym_name}"
    )?;
    writeln!(w, "{} {} {}", a.n(), a.n(), count)?;
    for (r, c, v) in a.triplets().filter(|&(r, c, _)| keep(r, c)) {
        match field {
            MtxField::Pattern => writeln!(w, "{} {}", r + 1, c + 1)?,
            MtxField::Integer => writeln!(w, "{} {} {}", r + 1, c + 1, v as i64)?,
            MtxField::Real => writeln!(w, "{} {} {:?}", r + 1, c + 1, v)?,
        }
    }
    w.flush()?;
    Ok(())
}
