//! Exact ergotropy, passive states, block coarse-graining and observational
//! ergotropy.

mod measurement;

pub use measurement::MeasurementSetting;

use crate::qcore::{eig_hermitian, expectation, ComplexMatrix, DensityMatrix, HamiltonianSpec};
use crate::{Error, Result};

/// Result of [`ergotropy_exact`].
#[derive(Clone, Debug)]
pub struct Ergotropy {
    pub value: f64,
    /// Optimal unitary mapping the ρ eigenbasis (descending populations) onto
    /// the H eigenbasis (ascending energies).
    pub unitary: ComplexMatrix,
    pub passive: DensityMatrix,
}

/// The global unitary used for observational ergotropy together with the
/// ordering that fixed it.
#[derive(Clone, Debug)]
pub struct GlobalUnitaryRecord {
    pub matrix: ComplexMatrix,
    /// `permutation[slot] = block`: the block mapped onto the `slot`-th group of
    /// `2^r` lowest-energy eigenvectors. Zero-based.
    pub permutation: Vec<usize>,
    pub probabilities_used: Vec<f64>,
}

fn check_dims(rho: &DensityMatrix, h: &HamiltonianSpec) -> Result<()> {
    if rho.dim() != h.dim() {
        return Err(Error::dim(format!("state dimension {} does not match Hamiltonian dimension {}", rho.dim(), h.dim())));
    }
    Ok(())
}

/// Indices sorted by value, largest first; ties keep index order.
pub(crate) fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

/// Maximal work extractable by a unitary, with the optimal unitary and the
/// resulting passive state.
pub fn ergotropy_exact(rho: &DensityMatrix, h: &HamiltonianSpec) -> Result<Ergotropy> {
    check_dims(rho, h)?;
    let eig = eig_hermitian(rho.matrix())?;
    let order = descending_order(&eig.values);
    let n = rho.dim();
    let mut v = ComplexMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let phi = h.eigenvector(k);
        let lam = eig.vector(src);
        v = &v + &ComplexMatrix::outer(&phi, &lam);
    }
    let passive = rho.conjugate_by(&v)?;
    let value = expectation(h.matrix(), rho)? - expectation(h.matrix(), &passive)?;
    Ok(Ergotropy { value, unitary: v, passive })
}

/// `Σ_k λ↓_k E↑_k`: the energy of the passive state of `rho`.
pub fn passive_energy(rho: &DensityMatrix, h: &HamiltonianSpec) -> Result<f64> {
    check_dims(rho, h)?;
    let mut lam = rho.spectrum();
    lam.reverse();
    Ok(lam.iter().zip(h.eigenvalues()).map(|(l, e)| l * e).sum())
}

/// Ergotropy value only, via `Tr[Hρ] − Σ_k λ↓_k E↑_k`.
pub fn ergotropy_value(rho: &DensityMatrix, h: &HamiltonianSpec) -> Result<f64> {
    Ok(expectation(h.matrix(), rho)? - passive_energy(rho, h)?)
}

/// `p_i = Tr[P_i ρ]`.
pub fn block_probabilities(rho: &DensityMatrix, ms: &MeasurementSetting) -> Result<Vec<f64>> {
    ms.check_dim(rho.dim())?;
    ms.projectors().iter().map(|p| expectation(p, rho)).collect()
}

/// `Σ_i P_i ρ P_i`.
pub fn block_dephase(rho: &DensityMatrix, ms: &MeasurementSetting) -> Result<DensityMatrix> {
    ms.check_dim(rho.dim())?;
    let n = rho.dim();
    let mut acc = ComplexMatrix::zeros(n, n);
    for p in ms.projectors() {
        acc = &acc + &(&(p * rho.matrix()) * p);
    }
    Ok(DensityMatrix::from_trusted(acc))
}

/// `Σ_i p_i P_i / Tr[P_i]`.
pub fn block_randomize(rho: &DensityMatrix, ms: &MeasurementSetting) -> Result<DensityMatrix> {
    let probs = block_probabilities(rho, ms)?;
    let n = rho.dim();
    let scale = 1.0 / ms.block_dim() as f64;
    let mut acc = ComplexMatrix::zeros(n, n);
    for (p, proj) in probs.iter().zip(ms.projectors()) {
        acc = &acc + &proj.scale_real(p * scale);
    }
    Ok(DensityMatrix::from_trusted(acc))
}

/// `U_gl = Σ_{i,b} |φ_{i·2^r + b}><ψ_{π(i)}^(b)|` where `π` sorts `probs`
/// nonincreasing (stable).
pub fn build_global_unitary(ms: &MeasurementSetting, h: &HamiltonianSpec, probs: &[f64]) -> Result<GlobalUnitaryRecord> {
    ms.check_dim(h.dim())?;
    if probs.len() != ms.num_blocks() {
        return Err(Error::dim(format!("{} probabilities supplied for {} blocks", probs.len(), ms.num_blocks())));
    }
    if let Some(bad) = probs.iter().find(|p| !(-1e-12..=1.0 + 1e-12).contains(*p)) {
        return Err(Error::arg(format!("probability {bad} outside [0, 1]")));
    }
    let permutation = descending_order(probs);
    let d = ms.block_dim();
    let n = h.dim();
    let mut u = ComplexMatrix::zeros(n, n);
    for (slot, &block) in permutation.iter().enumerate() {
        for (b, psi) in ms.block_basis(block).iter().enumerate() {
            let phi = h.eigenvector(slot * d + b);
            u = &u + &ComplexMatrix::outer(&phi, psi);
        }
    }
    Ok(GlobalUnitaryRecord { matrix: u, permutation, probabilities_used: probs.to_vec() })
}

/// `Tr[H(ρ − U ρ̃ U†)]` for a given global unitary.
pub fn observational_ergotropy_with_unitary(
    rho: &DensityMatrix,
    h: &HamiltonianSpec,
    ms: &MeasurementSetting,
    global: &ComplexMatrix,
) -> Result<f64> {
    check_dims(rho, h)?;
    let randomized = block_randomize(rho, ms)?;
    let rotated = randomized.conjugate_by(global)?;
    Ok(expectation(h.matrix(), rho)? - expectation(h.matrix(), &rotated)?)
}

/// Observational ergotropy with `U_gl` fixed by `probs_for_ordering`, which
/// may differ from the true block probabilities.
pub fn observational_ergotropy_with_ordering(
    rho: &DensityMatrix,
    h: &HamiltonianSpec,
    ms: &MeasurementSetting,
    probs_for_ordering: &[f64],
) -> Result<f64> {
    let record = build_global_unitary(ms, h, probs_for_ordering)?;
    observational_ergotropy_with_unitary(rho, h, ms, &record.matrix)
}

/// Observational ergotropy with `U_gl` built from the exact block
/// probabilities. Not necessarily nonnegative.
pub fn observational_ergotropy_exact(rho: &DensityMatrix, h: &HamiltonianSpec, ms: &MeasurementSetting) -> Result<f64> {
    let probs = block_probabilities(rho, ms)?;
    observational_ergotropy_with_ordering(rho, h, ms, &probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{build_number_hamiltonian, C64};

    #[test]
    fn maximally_mixed_is_passive() {
        let h = build_number_hamiltonian(3).unwrap();
        let e = ergotropy_exact(&DensityMatrix::maximally_mixed(8), &h).unwrap();
        assert!(e.value.abs() < 1e-12);
    }

    #[test]
    fn excited_qubit_gives_full_gap() {
        let h = build_number_hamiltonian(1).unwrap();
        let rho = DensityMatrix::new(ComplexMatrix::from_diagonal(&[0.0, 1.0])).unwrap();
        let e = ergotropy_exact(&rho, &h).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert!((e.passive.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((ergotropy_value(&rho, &h).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_block_randomizes_fully() {
        let ms = MeasurementSetting::new(vec![(0..4)
            .map(|k| {
                let mut v = vec![C64::new(0.0, 0.0); 4];
                v[k] = C64::new(1.0, 0.0);
                v
            })
            .collect()])
        .unwrap();
        let rho = DensityMatrix::new(ComplexMatrix::from_diagonal(&[0.7, 0.1, 0.1, 0.1])).unwrap();
        let r = block_randomize(&rho, &ms).unwrap();
        assert!(r.matrix().max_abs_diff(&DensityMatrix::maximally_mixed(4).into_matrix()) < 1e-15);
        let d = block_dephase(&rho, &ms).unwrap();
        assert!(d.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn global_unitary_ordering_conventions() {
        let h = build_number_hamiltonian(2).unwrap();
        let ms = MeasurementSetting::computational_prefix(2, 1).unwrap();
        assert_eq!(build_global_unitary(&ms, &h, &[0.5, 0.5]).unwrap().permutation, vec![0, 1]);
        assert_eq!(build_global_unitary(&ms, &h, &[0.3, 0.7]).unwrap().permutation, vec![1, 0]);
        assert!(build_global_unitary(&ms, &h, &[1.0]).is_err());
        let rec = build_global_unitary(&ms, &h, &[0.3, 0.7]).unwrap();
        assert!(rec.matrix.unitarity_defect() < 1e-10);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let h = build_number_hamiltonian(2).unwrap();
        let rho = DensityMatrix::maximally_mixed(8);
        assert!(matches!(ergotropy_exact(&rho, &h), Err(Error::InvalidDimension(_))));
    }
}
