//! Dense eigensolvers for the small matrices in this crate.
//!
//! Thin wrappers over nalgebra's symmetric/Hermitian QR solver that return
//! eigenpairs sorted by ascending eigenvalue and surface non-convergence as
//! an error instead of `None`.

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::qstate::C64;

/// Eigenvalues ascending, with eigenvectors as matching columns.
#[derive(Debug, Clone)]
pub struct Spectrum<T: ComplexField> {
    pub values: Vec<f64>,
    pub vectors: DMatrix<T>,
}

impl<T: ComplexField<RealField = f64>> Spectrum<T> {
    pub fn vector(&self, k: usize) -> DVector<T> {
        self.vectors.column(k).into_owned()
    }

    /// `E_1 - E_0`, or zero for a 1×1 problem.
    pub fn gap(&self) -> f64 {
        if self.values.len() < 2 {
            0.0
        } else {
            self.values[1] - self.values[0]
        }
    }

    /// Groups eigenvalue indices into levels whose spread is below `tol`.
    pub fn levels(&self, tol: f64) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (k, &e) in self.values.iter().enumerate() {
            match out.last_mut() {
                Some(level) if (e - self.values[level[0]]).abs() <= tol => level.push(k),
                _ => out.push(vec![k]),
            }
        }
        out
    }
}

const CONVERGENCE_EPS: f64 = f64::EPSILON;

fn sorted<T: ComplexField<RealField = f64>>(values: DVector<f64>, vectors: DMatrix<T>) -> Spectrum<T> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let vals = order.iter().map(|&i| values[i]).collect();
    let cols: Vec<_> = order.iter().map(|&i| vectors.column(i).into_owned()).collect();
    Spectrum { values: vals, vectors: DMatrix::from_columns(&cols) }
}

fn solve<T: ComplexField<RealField = f64>>(m: DMatrix<T>, what: &str) -> Result<Spectrum<T>> {
    let dim = m.nrows();
    if dim != m.ncols() {
        return Err(Error::Numeric(format!("{what}: matrix is {}x{}, not square", dim, m.ncols())));
    }
    let max_iter = 1000 * dim.max(1);
    match nalgebra::SymmetricEigen::try_new(m, CONVERGENCE_EPS, max_iter) {
        Some(eig) => Ok(sorted(eig.eigenvalues, eig.eigenvectors)),
        None => Err(Error::Numeric(format!(
            "{what}: eigensolver did not converge in {max_iter} iterations (dim {dim})"
        ))),
    }
}

/// Full eigendecomposition of a real symmetric matrix.
pub fn symmetric_eigen(m: DMatrix<f64>) -> Result<Spectrum<f64>> {
    solve(m, "symmetric eigensolve")
}

/// Full eigendecomposition of a complex Hermitian matrix.
pub fn hermitian_eigen(m: DMatrix<C64>) -> Result<Spectrum<C64>> {
    solve(m, "hermitian eigensolve")
}
