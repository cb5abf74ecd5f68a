//! Dense linear algebra: matrices, LU, eigenvalues and a small CSV format.

mod eigen;
mod lu;
mod matrix;

pub use eigen::{
    condition_number_2, eigenvalues, perron_power, spectral_radius, spectral_radius_power,
    spectral_radius_qr, symmetric_eigenvalues, Eigenvalue, PerronPair, POWER_MAX_ITER,
};
pub use lu::{inverse, lu_solve, solve_right, LuFactors, PIVOT_THRESHOLD};
pub use matrix::{DenseMatrix, DenseVector};

use crate::error::{Error, Result};

/// Parses a matrix from comma-separated rows. Blank lines and lines starting with `#` are skipped.
pub fn parse_csv_matrix(text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|field| {
                let field = field.trim();
                field.parse::<f64>().map_err(|e| Error::Parse {
                    line: idx + 1,
                    message: format!("bad number {field:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no matrix rows".into(),
        });
    }
    DenseMatrix::from_rows(&rows)
}

/// Formats a matrix as CSV with round-trippable precision.
pub fn write_csv_matrix(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
