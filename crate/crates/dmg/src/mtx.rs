//! Matrix Market (`.mtx`) reading and writing.
//!
//! Reads `coordinate` and `array` files with `real`, `integer`, `complex`
//! or `pattern` fields and any of the four symmetry kinds. Writes
//! `coordinate general`, choosing `real` when every entry is real.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use dmg_core::{Complex64, SparseMatrix};

use crate::error::{CliError, CliResult};

#[derive(Debug, thiserror::Error)]
pub enum MtxError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
    Hermitian,
}

impl Symmetry {
    fn reflect(self, z: Complex64) -> Complex64 {
        match self {
            Symmetry::General | Symmetry::Symmetric => z,
            Symmetry::Skew => -z,
            Symmetry::Hermitian => z.conj(),
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> MtxError {
    MtxError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line: &str, no: usize) -> Result<(Layout, Field, Symmetry), MtxError> {
    let words: Vec<String> = line
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(
            no,
            "expected '%%MatrixMarket matrix <format> <field> <symmetry>'",
        ));
    }
    let layout = match words[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_err(no, format!("unknown format '{other}'"))),
    };
    let field = match words[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        other => return Err(parse_err(no, format!("unknown field '{other}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(no, format!("unknown symmetry '{other}'"))),
    };
    if layout == Layout::Array && field == Field::Pattern {
        return Err(parse_err(no, "array files cannot use the pattern field"));
    }
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(parse_err(no, "hermitian symmetry needs complex values"));
    }
    Ok((layout, field, symmetry))
}

fn number<T: std::str::FromStr>(tok: Option<&str>, no: usize, what: &str) -> Result<T, MtxError> {
    tok.ok_or_else(|| parse_err(no, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(no, format!("invalid {what}")))
}

fn value<'a>(
    toks: &mut impl Iterator<Item = &'a str>,
    field: Field,
    no: usize,
) -> Result<Complex64, MtxError> {
    match field {
        Field::Pattern => Ok(Complex64::new(1.0, 0.0)),
        Field::Real => Ok(Complex64::new(number(toks.next(), no, "value")?, 0.0)),
        Field::Complex => Ok(Complex64::new(
            number(toks.next(), no, "real part")?,
            number(toks.next(), no, "imaginary part")?,
        )),
    }
}

pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<SparseMatrix, MtxError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (no, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let (layout, field, symmetry) = parse_header(&header?, no)?;

    let mut data = lines.filter_map(|(no, l)| match l {
        Ok(l) if l.trim().is_empty() || l.trim_start().starts_with('%') => None,
        Ok(l) => Some(Ok((no, l))),
        Err(e) => Some(Err(MtxError::from(e))),
    });
    let (no, size) = data
        .next()
        .ok_or_else(|| parse_err(no, "missing size line"))??;
    let mut toks = size.split_whitespace();
    let nrows: usize = number(toks.next(), no, "row count")?;
    let ncols: usize = number(toks.next(), no, "column count")?;
    if symmetry != Symmetry::General && nrows != ncols {
        return Err(parse_err(no, "symmetric storage needs a square matrix"));
    }

    let mut triplets = Vec::new();
    let mut push = |i: usize, j: usize, z: Complex64| {
        triplets.push((i, j, z));
        if symmetry != Symmetry::General && i != j {
            triplets.push((j, i, symmetry.reflect(z)));
        }
    };
    let mut last = no;
    match layout {
        Layout::Coordinate => {
            let nnz: usize = number(toks.next(), no, "entry count")?;
            for _ in 0..nnz {
                let (no, line) = data
                    .next()
                    .ok_or_else(|| parse_err(last, "fewer entries than declared"))??;
                last = no;
                let mut toks = line.split_whitespace();
                let i: usize = number(toks.next(), no, "row index")?;
                let j: usize = number(toks.next(), no, "column index")?;
                if i == 0 || j == 0 || i > nrows || j > ncols {
                    return Err(parse_err(
                        no,
                        format!("index ({i}, {j}) outside {nrows}x{ncols}"),
                    ));
                }
                if symmetry != Symmetry::General && j > i {
                    return Err(parse_err(
                        no,
                        "symmetric storage lists the lower triangle only",
                    ));
                }
                let z = value(&mut toks, field, no)?;
                if symmetry == Symmetry::Skew && i == j {
                    return Err(parse_err(
                        no,
                        "skew-symmetric matrices have no diagonal entries",
                    ));
                }
                push(i - 1, j - 1, z);
            }
        }
        Layout::Array => {
            let first_row = |j: usize| match symmetry {
                Symmetry::General => 0,
                Symmetry::Skew => j + 1,
                _ => j,
            };
            for j in 0..ncols {
                for i in first_row(j)..nrows {
                    let (no, line) = data
                        .next()
                        .ok_or_else(|| parse_err(last, "fewer entries than declared"))??;
                    last = no;
                    let z = value(&mut line.split_whitespace(), field, no)?;
                    if z != Complex64::new(0.0, 0.0) {
                        push(i, j, z);
                    }
                }
            }
        }
    }
    if let Some(extra) = data.next() {
        let (no, _) = extra?;
        return Err(parse_err(no, "more entries than declared"));
    }
    SparseMatrix::from_triplets(nrows, ncols, triplets).map_err(|e| parse_err(last, e.to_string()))
}

pub fn write_matrix_market<W: Write>(mut w: W, m: &SparseMatrix) -> io::Result<()> {
    let real = m.values().iter().all(|z| z.im == 0.0);
    let field = if real { "real" } else { "complex" };
    writeln!(w, "%%MatrixMarket matrix coordinate {field} general")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, z) in m.triplets() {
        if real {
            writeln!(w, "{} {} {}", i + 1, j + 1, z.re)?;
        } else {
            writeln!(w, "{} {} {} {}", i + 1, j + 1, z.re, z.im)?;
        }
    }
    w.flush()
}

pub fn load(path: &Path) -> CliResult<SparseMatrix> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_matrix_market(BufReader::new(file)).map_err(|e| match e {
        MtxError::Io(source) => CliError::io(path, source),
        MtxError::Parse { line, msg } => CliError::Format {
            path: path.to_path_buf(),
            line,
            msg,
        },
    })
}

pub fn save(path: &Path, m: &SparseMatrix) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_matrix_market(BufWriter::new(file), m).map_err(|e| CliError::io(path, e))
}
