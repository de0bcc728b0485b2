//! Quantum averaging over the periodic flow `e^{isA}`, `A = √(−Δ + 1/4)`, at
//! the matrix level: the averaging projector `I_qu` and the corrector `σ(C)`.
//!
//! The eigenvalues of `A` are `ℓ + 1/2` with integer gaps, so both operators
//! have closed entrywise forms.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonics::degrees;

/// The diagonal operator `A` on harmonics of degree `≤ l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct AOperator {
    l_max: usize,
    values: Vec<f64>,
}

impl AOperator {
    pub fn new(l_max: usize) -> Self {
        AOperator {
            l_max,
            values: degrees(l_max).into_iter().map(|l| l as f64 + 0.5).collect(),
        }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.values))
    }
}

/// Degree labels of a square matrix in the harmonic basis.
fn basis_degrees(rows: usize, cols: usize) -> Result<Vec<usize>> {
    let l = (rows as f64).sqrt().round() as usize;
    if rows != cols || l * l != rows || rows == 0 {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix of size (L+1)², got {rows}×{cols}"
        )));
    }
    Ok(degrees(l - 1))
}

/// Keeps the entries between harmonics of equal degree; the exact value of
/// `(1/2π)∫₀^{2π} e^{−isA} C e^{isA} ds`.
pub fn i_qu(c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let deg = basis_degrees(c.nrows(), c.ncols())?;
    Ok(DMatrix::from_fn(c.nrows(), c.ncols(), |i, j| {
        if deg[i] == deg[j] {
            c[(i, j)]
        } else {
            0.0
        }
    }))
}

/// `σ(C) = −(1/2π)∫₀^{2π}∫₀^t e^{−isA} C e^{isA} ds dt` in closed form:
/// `−i·C_ij/(a_j − a_i)` across degrees and `−π·C_ij` within a degree.
pub fn sigma(c: &DMatrix<f64>) -> Result<DMatrix<Complex64>> {
    let deg = basis_degrees(c.nrows(), c.ncols())?;
    Ok(DMatrix::from_fn(c.nrows(), c.ncols(), |i, j| {
        if deg[i] == deg[j] {
            Complex64::new(-PI * c[(i, j)], 0.0)
        } else {
            let gap = deg[j] as f64 - deg[i] as f64;
            Complex64::new(0.0, -c[(i, j)] / gap)
        }
    }))
}

/// `‖[I_qu(C), Δ]‖_max`.
pub fn commutation_check(c: &DMatrix<f64>) -> Result<f64> {
    let deg = basis_degrees(c.nrows(), c.ncols())?;
    let avg = i_qu(c)?;
    let lap = |l: usize| -((l * (l + 1)) as f64);
    let mut worst = 0.0f64;
    for j in 0..c.ncols() {
        for i in 0..c.nrows() {
            worst = worst.max((avg[(i, j)] * (lap(deg[j]) - lap(deg[i]))).abs());
        }
    }
    Ok(worst)
}

/// `‖[A, σ(C)] − i(C − I_qu C)‖_max`.
pub fn sigma_identity_residual(c: &DMatrix<f64>) -> Result<f64> {
    let s = sigma(c)?;
    let avg = i_qu(c)?;
    let a = AOperator::new((c.nrows() as f64).sqrt().round() as usize - 1);
    let mut worst = 0.0f64;
    for j in 0..c.ncols() {
        for i in 0..c.nrows() {
            let commutator = s[(i, j)] * (a.values[i] - a.values[j]);
            let target = Complex64::new(0.0, c[(i, j)] - avg[(i, j)]);
            worst = worst.max((commutator - target).norm());
        }
    }
    Ok(worst)
}
