//! The 16×16 LiH Hamiltonian in the single-excitation basis of a 16-site chain.
//!
//! The entries live in `data/lih.txt` exactly as tabulated (five decimals) and
//! are parsed on every call.

use nalgebra::DMatrix;

use crate::basis::Sector;
use crate::error::{Error, Result};
use crate::operators::{HermitianOperator, Space};

/// Raw data table, whitespace separated, `#` comments.
pub const LIH_TABLE: &str = include_str!("../../data/lih.txt");

pub const LIH_DIM: usize = 16;

/// Parse a square whitespace-separated table of reals.
pub fn parse_real_table(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        let mut column = 1;
        for token in content.split_whitespace() {
            let offset = content[column - 1..].find(token).unwrap_or(0) + column;
            let value = token.parse::<f64>().map_err(|e| Error::Parse {
                line: n + 1,
                column: offset,
                message: format!("{token:?}: {e}"),
            })?;
            row.push(value);
            column = offset + token.len();
        }
        rows.push(row);
    }
    let dim = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
        return Err(Error::InvalidParameter(format!(
            "table row {} has {} entries, expected {dim}",
            i + 1,
            r.len()
        )));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

/// The LiH target on the `(L = 16, M = 1)` sector.
pub fn lih_hamiltonian() -> Result<HermitianOperator> {
    let table = parse_real_table(LIH_TABLE)?;
    if table.nrows() != LIH_DIM {
        return Err(Error::DimensionMismatch {
            expected: LIH_DIM,
            found: table.nrows(),
            context: "LiH data table",
        });
    }
    // symmetrize: the table is symmetric, so this is exact
    let symmetric = (&table + table.transpose()) * 0.5;
    HermitianOperator::from_real(Space::Sector(Sector::hardcore(LIH_DIM, 1)?), &symmetric)
}
