//! CSV vectors and grid fields.
//!
//! Fields on a torus are written as `i,j,re,im`, everything else as
//! `i,re,im`, one row per node in node order.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use dmg_core::problems::Geometry;
use dmg_core::Complex64;

use crate::error::{CliError, CliResult};

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::io(path, source),
        other => CliError::Format {
            path: path.to_path_buf(),
            line,
            msg: format!("{other:?}"),
        },
    }
}

pub fn write_field_to<W: Write>(w: W, geometry: Geometry, values: &[Complex64]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    match geometry {
        Geometry::Torus { side } => {
            out.write_record(["i", "j", "re", "im"])?;
            for (a, z) in values.iter().enumerate() {
                out.write_record([
                    (a / side).to_string(),
                    (a % side).to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                ])?;
            }
        }
        _ => {
            out.write_record(["i", "re", "im"])?;
            for (a, z) in values.iter().enumerate() {
                out.write_record([a.to_string(), z.re.to_string(), z.im.to_string()])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_field(path: &Path, geometry: Geometry, values: &[Complex64]) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_field_to(file, geometry, values).map_err(|e| csv_err(path, e))
}

/// Reads a vector of length `n` from CSV with a header naming `re` and
/// optionally `im`, `i` and `j`. Without index columns, rows are taken in
/// order; with them, every node must appear exactly once.
pub fn read_vector_from<R: Read>(
    r: R,
    geometry: Geometry,
) -> Result<Vec<Complex64>, (usize, String)> {
    let n = geometry.size();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r);
    let headers = rdr.headers().map_err(|e| (1, e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let re = col("re").ok_or((1, "header must name a 're' column".to_string()))?;
    let (im, ci, cj) = (col("im"), col("i"), col("j"));
    let side = match (geometry, cj) {
        (_, None) => None,
        (Geometry::Torus { side }, Some(_)) => Some(side),
        _ => return Err((1, "a 'j' column needs a 2D problem".into())),
    };
    let mut out = vec![None; n];
    for (row, rec) in rdr.records().enumerate() {
        let line = row + 2;
        let rec = rec.map_err(|e| (line, e.to_string()))?;
        let num = |c: usize| -> Result<f64, (usize, String)> {
            let s = rec.get(c).ok_or((line, "missing column".to_string()))?;
            s.parse()
                .map_err(|_| (line, format!("invalid number '{s}'")))
        };
        let idx = |c: usize| -> Result<usize, (usize, String)> {
            let s = rec.get(c).ok_or((line, "missing column".to_string()))?;
            s.parse()
                .map_err(|_| (line, format!("invalid index '{s}'")))
        };
        let node = match (ci, cj, side) {
            (Some(ci), Some(cj), Some(side)) => {
                let (i, j) = (idx(ci)?, idx(cj)?);
                if i >= side || j >= side {
                    return Err((
                        line,
                        format!("node ({i}, {j}) outside the {side}x{side} grid"),
                    ));
                }
                i * side + j
            }
            (Some(ci), None, _) => idx(ci)?,
            _ => row,
        };
        if node >= n {
            return Err((line, format!("node {node} outside a problem of size {n}")));
        }
        if out[node].is_some() {
            return Err((line, format!("node {node} listed twice")));
        }
        let z = Complex64::new(num(re)?, im.map(num).transpose()?.unwrap_or(0.0));
        if !z.is_finite() {
            return Err((line, "non-finite value".into()));
        }
        out[node] = Some(z);
    }
    out.iter()
        .enumerate()
        .map(|(a, z)| z.ok_or((0, format!("node {a} missing ({n} values expected)"))))
        .collect()
}

pub fn read_vector(path: &Path, geometry: Geometry) -> CliResult<Vec<Complex64>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_vector_from(file, geometry).map_err(|(line, msg)| CliError::Format {
        path: path.to_path_buf(),
        line,
        msg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use dmg_core::c64;

    #[test]
    fn torus_layout_round_trips() {
        let g = Geometry::Torus { side: 2 };
        let v = vec![
            c64(1.0, 0.0),
            c64(0.1, -2.0),
            c64(-3.5, 1e-17),
            c64(0.0, 0.0),
        ];
        let mut buf = Vec::new();
        write_field_to(&mut buf, g, &v).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("i,j,re,im\n0,0,1,0\n0,1,0.1,-2\n1,0,"));
        assert_eq!(read_vector_from(&buf[..], g).unwrap(), v);
    }

    #[test]
    fn ring_layout_and_plain_columns() {
        let g = Geometry::Ring { n: 3 };
        let mut buf = Vec::new();
        write_field_to(&mut buf, g, &[c64(1.0, 2.0); 3]).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("i,re,im\n0,1,2\n"));
        assert_eq!(
            read_vector_from("re\n1\n2\n3\n".as_bytes(), g).unwrap(),
            vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0)]
        );
        assert_eq!(
            read_vector_from("i,re\n2,5\n0,1\n1,3\n".as_bytes(), g).unwrap()[2],
            c64(5.0, 0.0)
        );
    }

    #[test]
    fn bad_vectors_name_the_line() {
        let g = Geometry::Ring { n: 2 };
        assert_eq!(
            read_vector_from("re\n1\nx\n".as_bytes(), g).unwrap_err().0,
            3
        );
        assert_eq!(
            read_vector_from("i,re\n0,1\n0,2\n".as_bytes(), g)
                .unwrap_err()
                .0,
            3
        );
        assert!(read_vector_from("re\n1\n".as_bytes(), g).is_err());
        assert!(read_vector_from("value\n1\n2\n".as_bytes(), g).is_err());
        assert!(read_vector_from("re\n1\n2\n3\n".as_bytes(), g).is_err());
    }
}
