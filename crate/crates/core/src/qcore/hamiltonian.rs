use super::eig::{eig_hermitian, HERMITIAN_TOL};
use super::matrix::{ComplexMatrix, C64};
use super::pauli::PauliString;
use crate::{Error, Result};

/// One term `coefficient · Λ` of a Pauli-sum Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub pauli: PauliString,
}

/// A distinct eigenvalue with its degeneracy and eigenprojector.
#[derive(Clone, Debug)]
pub struct EnergyLevel {
    pub energy: f64,
    pub degeneracy: usize,
    /// Index of the first eigenvector of this level in the ascending basis.
    pub offset: usize,
    pub projector: ComplexMatrix,
}

/// Dense Hermitian Hamiltonian with cached spectral data.
///
/// Eigenvalues are ascending; eigenvectors are the columns of
/// [`HamiltonianSpec::eigenvectors`] in the same order, so column `k` is the
/// `k`-th element of the nondecreasing-energy basis. Degenerate eigenvalues
/// are grouped with absolute tolerance `1e-9·‖H‖`.
#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    levels: Vec<EnergyLevel>,
    operator_norm: f64,
    pauli_terms: Option<Vec<PauliTerm>>,
}

const PAULI_MATCH_TOL: f64 = 1e-10;

impl HamiltonianSpec {
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::dim("Hamiltonian must be a non-empty square matrix"));
        }
        if !matrix.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::contract("Hamiltonian is not Hermitian"));
        }
        let matrix = matrix.hermitian_part();
        let eig = eig_hermitian(&matrix)?;
        let n = eig.values.len();
        let operator_norm = eig.values[0].abs().max(eig.values[n - 1].abs());
        let tol = (1e-9 * operator_norm).max(f64::MIN_POSITIVE);

        let mut levels = Vec::new();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && eig.values[end] - eig.values[start] <= tol {
                end += 1;
            }
            let energy = eig.values[start..end].iter().sum::<f64>() / (end - start) as f64;
            let mut projector = ComplexMatrix::zeros(n, n);
            for k in start..end {
                let v = eig.vector(k);
                projector = &projector + &ComplexMatrix::outer(&v, &v);
            }
            levels.push(EnergyLevel { energy, degeneracy: end - start, offset: start, projector });
            start = end;
        }

        Ok(Self { matrix, eigenvalues: eig.values, eigenvectors: eig.vectors, levels, operator_norm, pauli_terms: None })
    }

    /// `Σ_j h_j Λ_j` on `n` qubits; keeps the term list for Pauli-sampling
    /// protocols.
    pub fn from_pauli_terms(n: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if n == 0 || n > 12 {
            return Err(Error::dim(format!("Pauli-sum Hamiltonians support 1..=12 qubits, got {n}")));
        }
        let dim = 1usize << n;
        let mut matrix = ComplexMatrix::zeros(dim, dim);
        for t in &terms {
            if t.pauli.num_qubits() != n {
                return Err(Error::dim(format!("term {} does not act on {n} qubits", t.pauli)));
            }
            if !t.coefficient.is_finite() {
                return Err(Error::arg("non-finite Pauli coefficient"));
            }
            for k in 0..dim as u64 {
                let (row, phase) = t.pauli.act_on_basis(k);
                matrix[(row as usize, k as usize)] += phase * t.coefficient;
            }
        }
        let mut spec = Self::from_matrix(matrix)?;
        spec.pauli_terms = Some(terms);
        debug_assert!(spec.pauli_reconstruction_error().unwrap() <= PAULI_MATCH_TOL);
        Ok(spec)
    }

    /// `‖Σ h_j Λ_j − H‖_max`, if a Pauli form is attached.
    pub fn pauli_reconstruction_error(&self) -> Option<f64> {
        let terms = self.pauli_terms.as_ref()?;
        let mut acc = ComplexMatrix::zeros(self.dim(), self.dim());
        for t in terms {
            acc = &acc + &t.pauli.to_matrix().scale_real(t.coefficient);
        }
        Some(acc.max_abs_diff(&self.matrix))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    pub fn levels(&self) -> &[EnergyLevel] {
        &self.levels
    }

    pub fn operator_norm(&self) -> f64 {
        self.operator_norm
    }

    pub fn pauli_terms(&self) -> Option<&[PauliTerm]> {
        self.pauli_terms.as_deref()
    }

    /// `h = Σ|h_j|`, if a Pauli form is attached.
    pub fn pauli_weight(&self) -> Option<f64> {
        self.pauli_terms().map(|ts| ts.iter().map(|t| t.coefficient.abs()).sum())
    }

    /// `Σ_a E_a Q_a`.
    pub fn reconstruct_from_levels(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim(), self.dim());
        for level in &self.levels {
            acc = &acc + &level.projector.scale_real(level.energy);
        }
        acc
    }
}

/// Periodic transverse-field chain
/// `H = −J Σ_j Z_j Z_{j+1} − h Σ_j X_j` with `Z_{n+1} ≡ Z_1`.
///
/// For `n = 2` the periodic sum visits the bond twice, giving `−2J Z₁Z₂`.
pub fn build_heisenberg_xxx(n: usize, coupling: f64, field: f64) -> Result<HamiltonianSpec> {
    if n < 2 {
        return Err(Error::dim(format!("chain needs at least 2 qubits, got {n}")));
    }
    let mut terms = Vec::with_capacity(2 * n);
    for j in 0..n {
        let zz = PauliString::single(n, j, 'Z')?.compose(&PauliString::single(n, (j + 1) % n, 'Z')?)?;
        terms.push(PauliTerm { coefficient: -coupling, pauli: zz });
    }
    for j in 0..n {
        terms.push(PauliTerm { coefficient: -field, pauli: PauliString::single(n, j, 'X')? });
    }
    HamiltonianSpec::from_pauli_terms(n, terms)
}

/// Excitation-number operator `Σ_j (I − Z_j)/2`.
pub fn build_number_hamiltonian(n: usize) -> Result<HamiltonianSpec> {
    if n == 0 {
        return Err(Error::dim("number Hamiltonian needs at least one qubit"));
    }
    let mut terms = vec![PauliTerm { coefficient: n as f64 / 2.0, pauli: PauliString::identity(n)? }];
    for j in 0..n {
        terms.push(PauliTerm { coefficient: -0.5, pauli: PauliString::single(n, j, 'Z')? });
    }
    HamiltonianSpec::from_pauli_terms(n, terms)
}
