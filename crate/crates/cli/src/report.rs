//! Deterministic CSV and JSON output.
//!
//! Exact rationals are written as `"p/q"` strings and floats with 17
//! significant digits, so identical inputs give byte-identical files.

use std::path::Path;

use serde::Serialize;

use bergman_core::matrix_jet::CMat;
use bergman_core::rational::{Cq, Rat};

use crate::CliError;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn rational(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// An exact complex number with decimal renderings.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Complex {
    pub re: String,
    pub im: String,
    pub re_decimal: String,
    pub im_decimal: String,
}

impl From<&Cq> for Complex {
    fn from(c: &Cq) -> Self {
        Complex { re: rational(&c.re), im: rational(&c.im), re_decimal: float(c.re.to_f64()), im_decimal: float(c.im.to_f64()) }
    }
}

pub fn complex_vec(v: &[Cq]) -> Vec<Complex> {
    v.iter().map(Complex::from).collect()
}

pub fn complex_matrix(m: &CMat) -> Vec<Vec<Complex>> {
    m.iter().map(|row| complex_vec(row)).collect()
}

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Write `rows` under `header`; an empty row set gives a header-only file.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io(path, e))?;
    w.write_record(header).map_err(|e| io(path, e))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(row).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io(path, e))
}
