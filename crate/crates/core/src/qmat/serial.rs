//! Row-major nested-array form of complex matrices, with each scalar written
//! as a two-element `[re, im]` array.

use super::{c, CMatrix};
use crate::error::{Error, Result};

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

pub fn to_rows(m: &CMatrix) -> ComplexRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(Error::dims(format!("{ncols} columns"), format!("{} columns in row {i}", r.len())));
    }
    let m = CMatrix::from_fn(nrows, ncols, |i, j| c(rows[i][j][0], rows[i][j][1]));
    super::check_finite(&m)?;
    Ok(m)
}
