//! Dataset files.
//!
//! CSV: one sample per line, `d` feature columns followed by the target,
//! separated by commas. An optional header line is recognized when any of its
//! fields is not a number. Blank lines are ignored.
//!
//! svmlight: `target idx:val idx:val ...` with 1-based feature indices in any
//! order; omitted features are zero and `d` is the largest index seen. Text
//! after `#` is a comment.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::finite_sum::FiniteSumProblem;
use super::loss::Loss;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    SvmLight,
}

impl FromStr for DataFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "svmlight" | "libsvm" => Ok(Self::SvmLight),
            other => Err(Error::Config(format!("unknown data format '{other}'"))),
        }
    }
}

fn parse_number<T: Real>(field: &str, line: usize) -> Result<T> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("'{}' is not a number", field.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("non-finite value '{}'", field.trim()),
        });
    }
    Ok(T::lit(v))
}

/// Parses CSV text into `(rows, targets)`.
pub fn parse_csv<T: Real>(text: &str) -> Result<(DenseMatrix<T>, Vec<T>)> {
    let mut data = Vec::new();
    let mut targets = Vec::new();
    let mut width: Option<usize> = None;
    let mut first = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if first {
            first = false;
            if fields.iter().any(|f| f.trim().parse::<f64>().is_err()) {
                continue;
            }
        }
        if fields.len() < 2 {
            return Err(Error::Parse {
                line,
                message: "expected at least one feature and a target".into(),
            });
        }
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {w} columns, found {}", fields.len()),
                });
            }
            _ => {}
        }
        let (features, target) = fields.split_at(fields.len() - 1);
        for f in features {
            data.push(parse_number(f, line)?);
        }
        targets.push(parse_number(target[0], line)?);
    }
    let w = width.ok_or(Error::Parse {
        line: 0,
        message: "no data rows".into(),
    })?;
    Ok((
        DenseMatrix::from_row_major(targets.len(), w - 1, data),
        targets,
    ))
}

/// Parses svmlight text into `(rows, targets)`.
pub fn parse_svmlight<T: Real>(text: &str) -> Result<(DenseMatrix<T>, Vec<T>)> {
    let mut entries: Vec<Vec<(usize, T)>> = Vec::new();
    let mut targets = Vec::new();
    let mut d = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let target = parse_number(tokens.next().expect("non-empty line"), line)?;
        let mut row = Vec::new();
        for tok in tokens {
            let (i, v) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected idx:val, found '{tok}'"),
            })?;
            let i: usize = i.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid feature index '{i}'"),
            })?;
            if i == 0 {
                return Err(Error::Parse {
                    line,
                    message: "feature indices are 1-based".into(),
                });
            }
            d = d.max(i);
            row.push((i - 1, parse_number(v, line)?));
        }
        entries.push(row);
        targets.push(target);
    }
    if targets.is_empty() || d == 0 {
        return Err(Error::Parse {
            line: 0,
            message: "no data rows".into(),
        });
    }
    let mut m = DenseMatrix::zeros(targets.len(), d);
    for (r, row) in entries.into_iter().enumerate() {
        for (j, v) in row {
            m[(r, j)] = v;
        }
    }
    Ok((m, targets))
}

pub fn parse_dataset<T: Real>(
    text: &str,
    format: DataFormat,
    loss: Loss<T>,
) -> Result<FiniteSumProblem<T>> {
    let (rows, targets) = match format {
        DataFormat::Csv => parse_csv(text)?,
        DataFormat::SvmLight => parse_svmlight(text)?,
    };
    FiniteSumProblem::new(rows, targets, loss)
}

pub fn load_dataset<T: Real>(
    path: impl AsRef<Path>,
    format: DataFormat,
    loss: Loss<T>,
) -> Result<FiniteSumProblem<T>> {
    let text = std::fs::read_to_string(path)?;
    parse_dataset(&text, format, loss)
}

/// CSV rendering that [`parse_csv`] reads back exactly.
pub fn to_csv_string<T: Real>(problem: &FiniteSumProblem<T>) -> String {
    let mut out = String::new();
    for i in 0..problem.n() {
        for v in problem.rows().row(i) {
            write!(out, "{v},").expect("writing to a String");
        }
        writeln!(out, "{}", problem.targets()[i]).expect("writing to a String");
    }
    out
}

pub fn write_csv<T: Real>(problem: &FiniteSumProblem<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_csv_string(problem))?;
    Ok(())
}
