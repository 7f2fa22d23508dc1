//! Plain-text matrix and vector formats shared by the CLI tools.
//!
//! Matrix files: a header line `n p`, then n lines of p entries.
//! Vector files: a header line `len`, then one entry per line.
//! Entries are written in scientific notation with 17 significant digits,
//! which round-trips every finite f64 exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Format one entry losslessly (17 significant digits).
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn matrix_to_string(m: &Matrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row = m.row(i);
        for (j, x) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{x:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn matrix_from_str(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().enumerate();
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err("matrix", 1, "missing header line"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_err("matrix", line_no + 1, "header must be `rows cols`"));
    }
    let rows: usize = dims[0]
        .parse()
        .map_err(|_| parse_err("matrix", line_no + 1, "bad row count"))?;
    let cols: usize = dims[1]
        .parse()
        .map_err(|_| parse_err("matrix", line_no + 1, "bad column count"))?;
    let mut data = Vec::with_capacity(rows.saturating_mul(cols));
    let mut seen_rows = 0;
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        seen_rows += 1;
        let before = data.len();
        for tok in line.split_whitespace() {
            let x: f64 = tok
                .parse()
                .map_err(|_| parse_err("matrix", line_no + 1, &format!("bad entry `{tok}`")))?;
            data.push(x);
        }
        if data.len() - before != cols {
            return Err(parse_err(
                "matrix",
                line_no + 1,
                &format!("expected {cols} entries, got {}", data.len() - before),
            ));
        }
    }
    if seen_rows != rows {
        return Err(parse_err("matrix", 1, &format!("expected {rows} rows, got {seen_rows}")));
    }
    Matrix::from_vec(rows, cols, data)
}

pub fn vector_to_string(v: &Vector) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", v.len());
    for x in v.as_slice() {
        let _ = writeln!(out, "{x:.16e}");
    }
    out
}

pub fn vector_from_str(text: &str) -> Result<Vector> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| parse_err("vector", 1, "missing header line"))?;
    let len: usize = header
        .trim()
        .parse()
        .map_err(|_| parse_err("vector", 1, "header must be the length"))?;
    let mut data = Vec::with_capacity(len);
    for (line_no, line) in lines {
        let x: f64 = line
            .trim()
            .parse()
            .map_err(|_| parse_err("vector", line_no + 1, &format!("bad entry `{}`", line.trim())))?;
        data.push(x);
    }
    if data.len() != len {
        return Err(parse_err("vector", 1, &format!("expected {len} entries, got {}", data.len())));
    }
    Vector::from_vec(data)
}

pub fn write_matrix(path: &Path, m: &Matrix) -> Result<()> {
    std::fs::write(path, matrix_to_string(m))?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    matrix_from_str(&std::fs::read_to_string(path)?)
}

pub fn write_vector(path: &Path, v: &Vector) -> Result<()> {
    std::fs::write(path, vector_to_string(v))?;
    Ok(())
}

pub fn read_vector(path: &Path) -> Result<Vector> {
    vector_from_str(&std::fs::read_to_string(path)?)
}

fn parse_err(what: &'static str, line: usize, msg: &str) -> Error {
    Error::Parse { what, line, msg: msg.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_malformed_input() {
        assert!(matrix_from_str("").is_err());
        assert!(matrix_from_str("2\n1 2\n3 4\n").is_err());
        assert!(matrix_from_str("2 2\n1 2\n3\n").is_err());
        assert!(matrix_from_str("1 2\n1 nope\n").is_err());
        assert!(vector_from_str("2\n1.0\n").is_err());
    }

    proptest! {
        // Scientific 17-significant-digit text must round-trip bit-exactly.
        #[test]
        fn matrix_roundtrip_is_bit_exact(
            rows in 1usize..5,
            cols in 1usize..5,
            raw in proptest::collection::vec(-1e12f64..1e12, 1..25),
        ) {
            let need = rows * cols;
            prop_assume!(raw.len() >= need);
            let m = Matrix::from_vec(rows, cols, raw[..need].to_vec()).unwrap();
            let back = matrix_from_str(&matrix_to_string(&m)).unwrap();
            prop_assert_eq!(m.as_slice(), back.as_slice());
        }

        #[test]
        fn vector_roundtrip_is_bit_exact(raw in proptest::collection::vec(-1e300f64..1e300, 1..40)) {
            let v = Vector::from_vec(raw).unwrap();
            let back = vector_from_str(&vector_to_string(&v)).unwrap();
            prop_assert_eq!(v.as_slice(), back.as_slice());
        }
    }
}
