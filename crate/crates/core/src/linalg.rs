//! Dense Hermitian helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors matching `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }
}

/// Symmetrize `m` (average with its adjoint) and diagonalize.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::InvalidParameter(format!("expected a nonempty square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalBreakdown("non-finite eigenvalue in Hermitian eigensolve".into()));
    }
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    Ok(HermitianEigen { values, vectors })
}

/// Largest deviation from Hermitian symmetry, `max |m_ij - conj(m_ji)|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace_re(m: &CMatrix) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}
