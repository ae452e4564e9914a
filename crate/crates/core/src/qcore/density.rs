use super::eig::eig_hermitian;
use super::matrix::{norm, ComplexMatrix, C64};
use crate::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::dim(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::contract(format!("state is not Hermitian (defect {defect:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::contract(format!("state trace is {tr}, expected 1")));
        }
        let min_eig = eig_hermitian(&matrix)?.values[0];
        if min_eig < -PSD_TOL {
            return Err(Error::contract(format!("state has negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix produced by a trace-preserving, positivity-preserving
    /// operation on valid states. Only the Hermitian part is kept.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix: matrix.hermitian_part() }
    }

    /// `|ψ><ψ|` for a normalised vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = norm(psi);
        if (n - 1.0).abs() > TRACE_TOL {
            return Err(Error::contract(format!("state vector has norm {n}, expected 1")));
        }
        Ok(Self::from_trusted(ComplexMatrix::outer(psi, psi)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let dim = parts.first().ok_or_else(|| Error::arg("empty mixture"))?.1.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        let mut total = 0.0;
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::dim("mixture components of different dimension"));
            }
            if *w < 0.0 {
                return Err(Error::arg("negative mixture weight"));
            }
            acc = &acc + &rho.matrix.scale_real(*w);
            total += w;
        }
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::arg(format!("mixture weights sum to {total}")));
        }
        Ok(Self::from_trusted(acc))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).expect("square").re
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        eig_hermitian(&self.matrix).expect("density matrices are Hermitian").values
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::dim("unitary does not match state dimension"));
        }
        Ok(Self::from_trusted(self.matrix.conjugate_by(u)?))
    }
}

/// Reduced state on the first factor of a pure state on `N ⊗ N′`.
///
/// The vector index is `i·N′ + j` for system index `i` and environment index
/// `j`. The result is renormalised to unit trace.
pub fn partial_trace_b(psi: &[C64], dims: (usize, usize)) -> Result<DensityMatrix> {
    let (n, n_env) = dims;
    if n == 0 || n_env == 0 || n * n_env != psi.len() {
        return Err(Error::dim(format!("vector of length {} cannot be split as {n} x {n_env}", psi.len())));
    }
    let nrm = norm(psi);
    if (nrm - 1.0).abs() > TRACE_TOL {
        return Err(Error::contract(format!("purification has norm {nrm}, expected 1")));
    }
    let mut rho = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let row_i = &psi[i * n_env..(i + 1) * n_env];
        for k in i..n {
            let row_k = &psi[k * n_env..(k + 1) * n_env];
            let v: C64 = row_i.iter().zip(row_k).map(|(a, b)| a * b.conj()).sum();
            rho[(i, k)] = v;
            rho[(k, i)] = v.conj();
        }
    }
    let tr = rho.trace().re;
    Ok(DensityMatrix::from_trusted(rho.scale_real(1.0 / tr)))
}

/// `Tr[O ρ]`, discarding the imaginary residue.
pub fn expectation(o: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    if o.rows() != rho.dim() || o.cols() != rho.dim() {
        return Err(Error::dim(format!("observable is {}x{} but state has dimension {}", o.rows(), o.cols(), rho.dim())));
    }
    Ok(o.trace_product(rho.matrix())?.re)
}
