//! Seeded random sources: Haar unitaries, Ginibre matrices, induced-measure
//! states and uniform Pauli strings.

mod stream;

pub use stream::{cumulative, derive_stream, mix64, SeedSpec, StreamRng};

use nalgebra::linalg::QR;

use crate::qcore::{partial_trace_b, ComplexMatrix, DensityMatrix, PauliString, C64};
use crate::{Error, Result};

/// `rows × cols` matrix of i.i.d. standard complex normals, filled row-major.
pub fn ginibre(rows: usize, cols: usize, rng: &mut StreamRng) -> ComplexMatrix {
    let entries = (0..rows * cols).map(|_| rng.complex_normal()).collect();
    ComplexMatrix::new(rows, cols, entries).expect("finite Gaussian entries")
}

/// Haar-distributed `N × N` unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary(n: usize, seed: SeedSpec) -> Result<ComplexMatrix> {
    haar_unitary_with(n, &mut seed.rng())
}

pub fn haar_unitary_with(n: usize, rng: &mut StreamRng) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::dim("Haar unitary needs N >= 1"));
    }
    let g = ginibre(n, n, rng);
    let qr = QR::new(g.to_nalgebra());
    let q = qr.q();
    let r = qr.r();
    let mut u = ComplexMatrix::from_nalgebra(&q);
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    Ok(u)
}

/// Haar-random unit vector of length `dim` (normalised complex Gaussian).
pub fn haar_pure_state(dim: usize, rng: &mut StreamRng) -> Result<Vec<C64>> {
    if dim == 0 {
        return Err(Error::dim("pure state needs dimension >= 1"));
    }
    loop {
        let v: Vec<C64> = (0..dim).map(|_| rng.complex_normal()).collect();
        let n = crate::qcore::norm(&v);
        if n > 0.0 {
            return Ok(v.into_iter().map(|z| z / n).collect());
        }
    }
}

/// Random state from the measure induced by tracing out an `N′`-dimensional
/// environment of a Haar pure state; equal in law to `GG†/Tr[GG†]` for an
/// `N × N′` Ginibre `G`.
pub fn induced_random_state(n: usize, n_env: usize, seed: SeedSpec) -> Result<DensityMatrix> {
    induced_random_state_with(n, n_env, &mut seed.rng())
}

pub fn induced_random_state_with(n: usize, n_env: usize, rng: &mut StreamRng) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::dim("induced state needs N >= 1"));
    }
    if n_env < n {
        return Err(Error::dim(format!("environment dimension {n_env} is smaller than N = {n}")));
    }
    let psi = haar_pure_state(n * n_env, rng)?;
    partial_trace_b(&psi, (n, n_env))
}

/// Uniform draw from the `4^r` unphased `r`-qubit Pauli strings.
pub fn sample_pauli(r: usize, seed: SeedSpec) -> Result<PauliString> {
    sample_pauli_with(r, &mut seed.rng())
}

pub fn sample_pauli_with(r: usize, rng: &mut StreamRng) -> Result<PauliString> {
    if r == 0 || r > 32 {
        return Err(Error::dim(format!("Pauli sampling supports 1..=32 qubits, got {r}")));
    }
    let bits = rng.next_u64();
    let mask = if r == 32 { u32::MAX as u64 } else { (1u64 << r) - 1 };
    PauliString::new(r, bits & mask, (bits >> 32) & mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        for n in [1, 2, 5, 16] {
            let u = haar_unitary(n, SeedSpec::new(3, n as u64)).unwrap();
            assert!(u.unitarity_defect() < 1e-10, "n = {n}");
        }
        assert!(haar_unitary(0, SeedSpec::new(0, 0)).is_err());
    }

    #[test]
    fn one_dimensional_haar_is_a_phase() {
        let u = haar_unitary(1, SeedSpec::new(11, 0)).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn induced_state_validity() {
        let rho = induced_random_state(4, 8, SeedSpec::new(5, 5)).unwrap();
        assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
        let scalar = induced_random_state(1, 3, SeedSpec::new(5, 6)).unwrap();
        assert!((scalar.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(matches!(induced_random_state(4, 2, SeedSpec::new(0, 0)), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn determinism() {
        let s = SeedSpec::new(77, 1);
        assert_eq!(haar_unitary(4, s).unwrap(), haar_unitary(4, s).unwrap());
        assert_eq!(sample_pauli(3, s).unwrap(), sample_pauli(3, s).unwrap());
    }

    #[test]
    fn single_qubit_twirl_depolarizes() {
        let rho = induced_random_state(2, 2, SeedSpec::new(8, 8)).unwrap();
        let mut acc = ComplexMatrix::zeros(2, 2);
        for p in PauliString::all(1) {
            acc = &acc + &rho.matrix().conjugate_by(&p.to_matrix()).unwrap();
        }
        let avg = acc.scale_real(0.25);
        assert!(avg.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-14);
    }
}
