use std::fs;
use std::path::Path;

use twostage_core::linalg::parse_csv_matrix;
use twostage_core::{DenseMatrix, DenseVector, SaiuqrParams, SimplicialCone};

use crate::error::{CliError, CliResult, EXIT_PARSE};

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> CliResult<DenseMatrix> {
    parse_csv_matrix(&read_text(path)?).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

/// A vector stored as a single CSV row or a single column.
pub fn read_vector(path: &Path) -> CliResult<DenseVector> {
    let m = read_matrix(path)?;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(CliError::parse(format!("{}: expected a single row or column", path.display())));
    }
    Ok(DenseVector::from_vec(m.as_slice().to_vec()))
}

pub fn read_params(path: &Path) -> CliResult<SaiuqrParams> {
    SaiuqrParams::parse(&read_text(path)?).map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

/// `orthant`, or a CSV file holding the generator matrix.
pub fn read_cone(spec: &str, n: usize) -> CliResult<SimplicialCone> {
    if spec == "orthant" {
        return Ok(SimplicialCone::orthant(n));
    }
    let p = read_matrix(Path::new(spec))?;
    if p.rows() != n || p.cols() != n {
        return Err(CliError::parse(format!("cone generators must be {n}x{n}")));
    }
    SimplicialCone::with_generators(p).map_err(|e| CliError::parse(format!("cone generators: {e}")))
}

pub fn vector_from(values: &[f64]) -> DenseVector {
    DenseVector::from_vec(values.to_vec())
}
