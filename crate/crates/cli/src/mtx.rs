//! Matrix Market reader and writer for Hermitian operators.
//!
//! Reads `coordinate` and `array` files with `real`, `integer` or `complex`
//! fields and `general`, `symmetric` or `hermitian` symmetry. Writes
//! `coordinate complex hermitian` (lower triangle, 17 significant digits).

use std::fmt::Write as _;

use specshift::{DMatrix, HermitianOperator, C64};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MtxError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Operator(#[from] specshift::Error),
}

fn syntax(line: usize, msg: impl Into<String>) -> MtxError {
    MtxError::Syntax {
        line,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Format {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
}

pub fn parse(text: &str) -> Result<HermitianOperator, MtxError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "empty file"))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(syntax(
            hline,
            "expected '%%MatrixMarket matrix <format> <field> <symmetry>'",
        ));
    }
    let format = match tokens[2].as_str() {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        other => return Err(syntax(hline, format!("unsupported format '{other}'"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(syntax(hline, format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(syntax(hline, format!("unsupported symmetry '{other}'"))),
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (sline, size) = body
        .next()
        .ok_or_else(|| syntax(hline, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| syntax(sline, format!("bad size token '{t}'")))
        })
        .collect::<Result<_, _>>()?;
    let (rows, cols, nnz) = match (format, dims.as_slice()) {
        (Format::Coordinate, &[r, c, n]) => (r, c, Some(n)),
        (Format::Array, &[r, c]) => (r, c, None),
        _ => return Err(syntax(sline, "malformed size line")),
    };
    if rows != cols {
        return Err(MtxError::Operator(specshift::Error::DimensionMismatch {
            expected: rows,
            found: cols,
        }));
    }
    let n = rows;
    let width = if field == Field::Complex { 2 } else { 1 };
    let value = |line: usize, toks: &[&str]| -> Result<C64, MtxError> {
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| syntax(line, format!("bad number '{t}'")))
        };
        Ok(if width == 2 {
            C64::new(num(toks[0])?, num(toks[1])?)
        } else {
            C64::new(num(toks[0])?, 0.0)
        })
    };
    let mut m = DMatrix::<C64>::zeros(n, n);
    let mut place = |i: usize, j: usize, z: C64| {
        m[(i, j)] = z;
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => m[(j, i)] = z,
                Symmetry::Hermitian => m[(j, i)] = z.conj(),
            }
        }
    };

    match format {
        Format::Coordinate => {
            let expected = nnz.unwrap_or(0);
            let mut seen = 0;
            for (line, l) in body {
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 2 + width {
                    return Err(syntax(line, format!("expected {} fields", 2 + width)));
                }
                let index = |t: &str| -> Result<usize, MtxError> {
                    let k: usize = t
                        .parse()
                        .map_err(|_| syntax(line, format!("bad index '{t}'")))?;
                    if k == 0 || k > n {
                        return Err(syntax(line, format!("index {k} out of range 1..={n}")));
                    }
                    Ok(k - 1)
                };
                let (i, j) = (index(toks[0])?, index(toks[1])?);
                if symmetry != Symmetry::General && i < j {
                    return Err(syntax(
                        line,
                        "symmetric storage must list the lower triangle",
                    ));
                }
                place(i, j, value(line, &toks[2..])?);
                seen += 1;
            }
            if seen != expected {
                return Err(syntax(
                    sline,
                    format!("declared {expected} entries, found {seen}"),
                ));
            }
        }
        Format::Array => {
            // column-major; symmetric storage holds the lower triangle only
            let mut slots = Vec::new();
            for j in 0..n {
                let start = if symmetry == Symmetry::General { 0 } else { j };
                for i in start..n {
                    slots.push((i, j));
                }
            }
            let mut slot = slots.iter();
            for (line, l) in body {
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != width {
                    return Err(syntax(line, format!("expected {width} fields")));
                }
                let &(i, j) = slot
                    .next()
                    .ok_or_else(|| syntax(line, "more values than the declared size"))?;
                place(i, j, value(line, &toks)?);
            }
            if slot.next().is_some() {
                return Err(syntax(sline, "fewer values than the declared size"));
            }
        }
    }
    Ok(HermitianOperator::new(m)?)
}

pub fn write(h: &HermitianOperator) -> String {
    let n = h.dim();
    let m = h.matrix();
    let entries: Vec<(usize, usize, C64)> = (0..n)
        .flat_map(|j| (j..n).map(move |i| (i, j)))
        .map(|(i, j)| (i, j, m[(i, j)]))
        .filter(|&(i, j, z)| i == j || z != C64::new(0.0, 0.0))
        .collect();
    let mut out = String::from("%%MatrixMarket matrix coordinate complex hermitian\n");
    let _ = writeln!(out, "{n} {n} {}", entries.len());
    for (i, j, z) in entries {
        let _ = writeln!(out, "{} {} {:.16e} {:.16e}", i + 1, j + 1, z.re, z.im);
    }
    out
}
