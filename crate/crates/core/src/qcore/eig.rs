use nalgebra::SymmetricEigen;

use super::matrix::{ComplexMatrix, C64};
use crate::{Error, Result};

/// Hermiticity tolerance accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Spectral decomposition `A = V diag(values) V†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_diagonal(&self.values);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending (stable with respect to the order the
/// solver returned them). Each eigenvector is rephased so that its
/// largest-magnitude entry (first one, on ties) is real and positive.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::dim(format!("eig_hermitian needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let defect = a.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::contract(format!("matrix is not Hermitian (defect {defect:.3e})")));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: ComplexMatrix::zeros(0, 0) });
    }

    let eig = SymmetricEigen::new(a.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let columns: Vec<Vec<C64>> = order
        .iter()
        .map(|&k| {
            let col: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
            canonical_phase(col)
        })
        .collect();
    Ok(HermitianEigen { values, vectors: ComplexMatrix::from_columns(&columns)? })
}

fn canonical_phase(mut v: Vec<C64>) -> Vec<C64> {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        // Small slack so that numerically equal magnitudes resolve to the first index.
        if z.norm() > best_mag + 1e-12 {
            best = i;
            best_mag = z.norm();
        }
    }
    if best_mag > 0.0 {
        let phase = v[best].conj() / best_mag;
        for z in &mut v {
            *z *= phase;
        }
        v[best] = C64::new(v[best].re, 0.0);
    }
    v
}
