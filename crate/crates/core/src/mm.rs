//! Matrix Market coordinate-format reader and writer.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::{CooMatrix, Index, MatrixDims, Triplet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_banner(line: &str) -> Result<(Field, Symmetry)> {
    let tokens: Vec<String> = line
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(1, format!("malformed banner {line:?}")));
    }
    if tokens[1] != "matrix" {
        return Err(parse_err(1, format!("unsupported object {:?}", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported format {:?}", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(parse_err(1, format!("unsupported field {other:?}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(parse_err(1, format!("unsupported symmetry {other:?}"))),
    };
    Ok((field, symmetry))
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} {tok:?}")))
}

/// Reads a Matrix Market coordinate file. Indices become 0-based, symmetric
/// storage is expanded to both triangles and pattern entries get value 1.0.
pub fn mm_read(path: impl AsRef<Path>) -> Result<CooMatrix> {
    let file = File::open(path)?;
    mm_read_from(BufReader::with_capacity(1 << 20, file))
}

pub fn mm_read_from<R: BufRead>(reader: R) -> Result<CooMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let (field, symmetry) = parse_banner(&banner?)?;

    let mut header = None;
    for (lineno, line) in lines.by_ref() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let nrows: usize = parse_num(toks.next(), lineno, "row count")?;
        let ncols: usize = parse_num(toks.next(), lineno, "column count")?;
        let nnz: usize = parse_num(toks.next(), lineno, "entry count")?;
        if toks.next().is_some() {
            return Err(parse_err(lineno, "size line has trailing tokens"));
        }
        let dims = MatrixDims::new(nrows, ncols).map_err(|e| parse_err(lineno, e.to_string()))?;
        header = Some((dims, nnz));
        break;
    }
    let (dims, declared) = header.ok_or_else(|| parse_err(1, "missing size line"))?;

    let mirrored = symmetry != Symmetry::General;
    let mut entries = Vec::with_capacity(if mirrored { 2 * declared } else { declared });
    let mut seen = 0usize;
    let mut last_line = 1;
    for (lineno, line) in lines {
        last_line = lineno;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if seen == declared {
            return Err(parse_err(
                lineno,
                format!("more than the declared {declared} entries"),
            ));
        }
        let mut toks = trimmed.split_whitespace();
        let i: usize = parse_num(toks.next(), lineno, "row index")?;
        let j: usize = parse_num(toks.next(), lineno, "column index")?;
        if i == 0 || i > dims.nrows || j == 0 || j > dims.ncols {
            return Err(parse_err(
                lineno,
                format!("index ({i}, {j}) outside {}x{}", dims.nrows, dims.ncols),
            ));
        }
        let value = match field {
            Field::Pattern => 1.0,
            Field::Integer => parse_num::<i64>(toks.next(), lineno, "integer value")? as f64,
            Field::Real => parse_num::<f64>(toks.next(), lineno, "real value")?,
        };
        if value.is_nan() {
            return Err(parse_err(lineno, "NaN value"));
        }
        if toks.next().is_some() {
            return Err(parse_err(lineno, "entry has trailing tokens"));
        }
        let (r, c) = ((i - 1) as Index, (j - 1) as Index);
        entries.push(Triplet::new(r, c, value));
        if mirrored && r != c {
            let v = if symmetry == Symmetry::SkewSymmetric {
                -value
            } else {
                value
            };
            if c as usize >= dims.nrows || r as usize >= dims.ncols {
                return Err(parse_err(
                    lineno,
                    "symmetric entry mirrors outside the matrix",
                ));
            }
            entries.push(Triplet::new(c, r, v));
        }
        seen += 1;
    }
    if seen != declared {
        return Err(parse_err(
            last_line,
            format!("found {seen} entries, header declares {declared}"),
        ));
    }
    Ok(CooMatrix::from_parts_unchecked(dims, entries))
}

/// Writes `m` as a `real general` coordinate file. Values use Rust's
/// shortest round-trip float formatting.
pub fn mm_write(m: &CooMatrix, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    mm_write_to(m, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn mm_write_to<W: Write>(m: &CooMatrix, w: &mut W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for t in m.entries() {
        writeln!(w, "{} {} {}", t.row + 1, t.col + 1, t.value)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read_str(s: &str) -> Result<CooMatrix> {
        mm_read_from(s.as_bytes())
    }

    #[test]
    fn smallest_file() {
        let m =
            read_str("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 3.5\n").unwrap();
        assert_eq!(m.dims(), MatrixDims::new(2, 2).unwrap());
        assert_eq!(m.entries(), &[Triplet::new(0, 0, 3.5)]);
    }

    #[test]
    fn symmetric_expansion() {
        let m = read_str(
            "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 4\n2 1 7.5\n",
        )
        .unwrap();
        let mut e = m.entries().to_vec();
        e.sort_by_key(|t| (t.row, t.col));
        assert_eq!(
            e,
            vec![
                Triplet::new(0, 0, 4.0),
                Triplet::new(0, 1, 7.5),
                Triplet::new(1, 0, 7.5)
            ]
        );
    }

    #[test]
    fn pattern_and_integer_fields() {
        let m = read_str("%%MatrixMarket matrix coordinate pattern general\n3 3 1\n3 2\n").unwrap();
        assert_eq!(m.entries(), &[Triplet::new(2, 1, 1.0)]);
        let m =
            read_str("%%MatrixMarket matrix coordinate integer general\n3 3 1\n3 2 -4\n").unwrap();
        assert_eq!(m.entries(), &[Triplet::new(2, 1, -4.0)]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad_banner = read_str("%%MatrixMarket matrix\n1 1 0\n");
        assert!(matches!(bad_banner, Err(Error::Parse { line: 1, .. })));

        let complex = read_str("%%MatrixMarket matrix coordinate complex general\n1 1 0\n");
        assert!(matches!(complex, Err(Error::Parse { line: 1, .. })));

        let out_of_range =
            read_str("%%MatrixMarket matrix coordinate real general\n%c\n2 2 2\n1 1 1\n3 1 1\n");
        match out_of_range {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected parse error, got {other:?}"),
        }

        let short = read_str("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n");
        assert!(matches!(short, Err(Error::Parse { .. })));

        let missing_value = read_str("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1\n");
        assert!(matches!(missing_value, Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn empty_matrix_header() {
        let m = CooMatrix::empty(MatrixDims::new(4, 5).unwrap());
        let mut buf = Vec::new();
        mm_write_to(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "%%MatrixMarket matrix coordinate real general\n4 5 0\n"
        );
        assert_eq!(read_str(&text).unwrap(), m);
    }

    #[test]
    fn identity_round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eye.mtx");
        let m = CooMatrix::identity(5).unwrap();
        mm_write(&m, &path).unwrap();
        assert_eq!(mm_read(&path).unwrap(), m);
    }
}
