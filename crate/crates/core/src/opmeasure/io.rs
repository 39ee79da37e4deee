//! Plain-text matrix and measure files.
//!
//! A matrix block is a header `matrix <rows> <cols>` followed by `rows` lines
//! of whitespace-separated `re,im` entries. A measure file is a sequence of
//! `outcome <label>` lines, each followed by one or more matrix blocks (its
//! Kraus operators). Blank lines and lines starting with `#` are ignored.

use std::io::Write;

use num_complex::Complex64;

use super::{CMatrix, FiniteOperationMeasure, Realization};
use crate::error::{Error, Result};

pub fn write_matrix<W: Write>(out: &mut W, m: &CMatrix) -> std::io::Result<()> {
    writeln!(out, "matrix {} {}", m.nrows(), m.ncols())?;
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.17e},{:.17e}", m[(i, j)].re, m[(i, j)].im)).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Self { inner: it.peekable() }
    }
}

fn parse_entry(line: usize, s: &str) -> Result<Complex64> {
    let (re, im) = s.split_once(',').ok_or_else(|| Error::parse(line, format!("expected re,im but found `{s}`")))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::parse(line, format!("invalid number `{t}`")));
    Ok(Complex64::new(num(re)?, num(im)?))
}

fn parse_matrix(lines: &mut Lines<'_>) -> Result<CMatrix> {
    let (line, header) = lines.inner.next().ok_or_else(|| Error::parse(0, "unexpected end of input, expected matrix"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("matrix") {
        return Err(Error::parse(line, format!("expected `matrix <rows> <cols>`, found `{header}`")));
    }
    let dim = |p: Option<&str>| -> Result<usize> {
        p.and_then(|t| t.parse().ok()).filter(|&n| n > 0).ok_or_else(|| Error::parse(line, "matrix dimensions must be positive integers"))
    };
    let rows = dim(parts.next())?;
    let cols = dim(parts.next())?;
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (ln, text) =
            lines.inner.next().ok_or_else(|| Error::parse(line, format!("matrix ends after {r} of {rows} rows")))?;
        let row = text.split_whitespace().map(|s| parse_entry(ln, s)).collect::<Result<Vec<_>>>()?;
        if row.len() != cols {
            return Err(Error::parse(ln, format!("expected {cols} entries, found {}", row.len())));
        }
        data.extend(row);
    }
    Ok(CMatrix::from_row_slice(rows, cols, &data))
}

/// Reads a single matrix block.
pub fn read_matrix(text: &str) -> Result<CMatrix> {
    parse_matrix(&mut Lines::new(text))
}

/// Reads a measure file and validates it.
pub fn read_measure(text: &str) -> Result<FiniteOperationMeasure> {
    let mut lines = Lines::new(text);
    let mut outcomes: Vec<(String, Vec<CMatrix>)> = Vec::new();
    while let Some((line, l)) = lines.inner.next() {
        let label = l
            .strip_prefix("outcome")
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::parse(line, format!("expected `outcome <label>`, found `{l}`")))?;
        let mut ops = vec![parse_matrix(&mut lines)?];
        while lines.inner.peek().is_some_and(|(_, l)| l.starts_with("matrix")) {
            ops.push(parse_matrix(&mut lines)?);
        }
        outcomes.push((label.to_string(), ops));
    }
    let dim = outcomes.first().map(|(_, ops)| ops[0].nrows()).ok_or_else(|| Error::parse(0, "no outcomes defined"))?;
    FiniteOperationMeasure::new(dim, outcomes)
}

pub fn write_measure<W: Write>(out: &mut W, om: &FiniteOperationMeasure) -> std::io::Result<()> {
    for (label, ops) in om.outcomes().iter().zip(&om.kraus) {
        writeln!(out, "outcome {label}")?;
        for m in ops {
            write_matrix(out, m)?;
        }
    }
    Ok(())
}

/// Writes probe dimension, probe state, unitary and probe projectors.
pub fn write_realization<W: Write>(out: &mut W, r: &Realization) -> std::io::Result<()> {
    writeln!(out, "object_dim {}", r.dim())?;
    writeln!(out, "probe_dim {}", r.probe_dim())?;
    writeln!(out, "probe_state")?;
    write_matrix(out, &CMatrix::from_column_slice(r.probe_dim(), 1, r.probe_state().as_slice()))?;
    writeln!(out, "unitary")?;
    write_matrix(out, r.unitary())?;
    for (label, p) in r.labels().iter().zip(r.projectors()) {
        writeln!(out, "projector {label}")?;
        write_matrix(out, p)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn measure_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let om = FiniteOperationMeasure::random(3, 2, 2, &mut rng);
        let mut buf = Vec::new();
        write_measure(&mut buf, &om).unwrap();
        let back = read_measure(&String::from_utf8(buf).unwrap()).unwrap();
        assert_eq!(back, om);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "# comment\noutcome a\nmatrix 2 2\n1,0 0,0\n0,0 x,1\n";
        match read_measure(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        let text = "outcome a\nmatrix 2 2\n1,0 0,0\n";
        assert!(matches!(read_measure(text), Err(Error::Parse { .. })));
        let incomplete = "outcome a\nmatrix 1 1\n0.5,0\n";
        assert!(matches!(read_measure(incomplete), Err(Error::CompletenessViolation(_))));
    }

    #[test]
    fn single_matrix() {
        let m = read_matrix("matrix 1 2\n1.5,-2 0,0.25\n").unwrap();
        assert_eq!(m[(0, 0)], Complex64::new(1.5, -2.0));
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 0.25));
    }
}
