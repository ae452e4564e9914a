//! Ergotropy statistics of induced-measure random states, the Lipschitz
//! constant of ergotropy and the tail bound for random states.

use rayon::prelude::*;

use crate::ergodyn::ergotropy_value;
use crate::qcore::{norm, partial_trace_b, HamiltonianSpec, C64};
use crate::randomness::{haar_pure_state, induced_random_state_with, SeedSpec};
use crate::{Error, Result};

/// Number of `γ` values in a report's tail table.
pub const TAIL_GRID_POINTS: usize = 20;

/// Quantile levels reported by [`ergotropy_statistics`].
pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// Perturbation sizes used by [`lipschitz_check`] alongside independent pairs.
pub const PERTURBATIONS: [f64; 2] = [1e-2, 1e-4];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailRow {
    pub gamma: f64,
    pub empirical: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationReport {
    pub n: usize,
    pub n_env: usize,
    pub samples: usize,
    pub mean_ergotropy: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    pub min_ergotropy: f64,
    /// `(level, value)` pairs for [`QUANTILE_LEVELS`].
    pub quantiles: Vec<(f64, f64)>,
    /// `γ_k = 2‖H‖·k/20` for `k = 1..=20`; empty when `H = 0`.
    pub tail_table: Vec<TailRow>,
}

impl ConcentrationReport {
    /// Rows whose empirical frequency exceeds the bound.
    pub fn violations(&self) -> Vec<TailRow> {
        self.tail_table.iter().copied().filter(|r| r.empirical > r.bound).collect()
    }
}

/// `min(1, 2 exp(−N N′ γ² / (72 π³ ln2 ‖H‖²)))`.
pub fn theorem1_bound(gamma: f64, n: usize, n_env: usize, h_norm: f64) -> Result<f64> {
    if gamma.is_nan() || gamma <= 0.0 || h_norm.is_nan() || h_norm <= 0.0 || !h_norm.is_finite() {
        return Err(Error::arg(format!("need gamma > 0 and a positive norm, got {gamma}, {h_norm}")));
    }
    if n == 0 || n_env == 0 {
        return Err(Error::dim("dimensions must be positive"));
    }
    let c = 72.0 * std::f64::consts::PI.powi(3) * std::f64::consts::LN_2;
    let exponent = (n * n_env) as f64 * gamma * gamma / (c * h_norm * h_norm);
    Ok((2.0 * (-exponent).exp()).min(1.0))
}

/// Linear interpolation between order statistics of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Ergotropies of `samples` induced random states on `H`'s space with an
/// `n_env`-dimensional environment. Sample `k` uses `derive_stream(seed, k)`.
pub fn ergotropy_samples(h: &HamiltonianSpec, n_env: usize, samples: usize, seed: SeedSpec) -> Result<Vec<f64>> {
    let n = h.dim();
    if n_env < n {
        return Err(Error::dim(format!("environment dimension {n_env} is smaller than N = {n}")));
    }
    (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let rho = induced_random_state_with(n, n_env, &mut seed.child(k).rng())?;
            ergotropy_value(&rho, h)
        })
        .collect()
}

pub fn ergotropy_statistics(h: &HamiltonianSpec, n_env: usize, samples: usize, seed: SeedSpec) -> Result<ConcentrationReport> {
    if samples == 0 {
        return Err(Error::arg("at least one sample is required"));
    }
    let n = h.dim();
    let values = ergotropy_samples(h, n_env, samples, seed)?;
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0) } else { 0.0 };
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);

    let h_norm = h.operator_norm();
    let tail_table = if h_norm > 0.0 {
        (1..=TAIL_GRID_POINTS)
            .map(|k| {
                let gamma = 2.0 * h_norm * k as f64 / TAIL_GRID_POINTS as f64;
                let above = values.iter().filter(|&&v| v > gamma).count();
                Ok(TailRow { gamma, empirical: above as f64 / count, bound: theorem1_bound(gamma, n, n_env, h_norm)? })
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    Ok(ConcentrationReport {
        n,
        n_env,
        samples,
        mean_ergotropy: mean,
        std_error: (var / count).sqrt(),
        min_ergotropy: sorted[0],
        quantiles: QUANTILE_LEVELS.iter().map(|&q| (q, quantile(&sorted, q))).collect(),
        tail_table,
    })
}

/// Largest `|Erg(Tr_B ψ) − Erg(Tr_B φ)| / ‖ψ − φ‖₂` over `pairs` purification
/// pairs. Pair `k` is independent when `k ≡ 0 (mod 3)` and otherwise
/// `φ = normalize(ψ + ε η)` with `ε` cycling through [`PERTURBATIONS`].
/// Identical pairs are skipped.
pub fn lipschitz_check(h: &HamiltonianSpec, n_env: usize, pairs: usize, seed: SeedSpec) -> Result<f64> {
    if pairs == 0 {
        return Err(Error::arg("at least one pair is required"));
    }
    let n = h.dim();
    if n_env < n {
        return Err(Error::dim(format!("environment dimension {n_env} is smaller than N = {n}")));
    }
    let dims = (n, n_env);
    let ratios: Vec<Option<f64>> = (0..pairs as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed.child(k).rng();
            let psi = haar_pure_state(n * n_env, &mut rng)?;
            let phi = match k % 3 {
                0 => haar_pure_state(n * n_env, &mut rng)?,
                kind => {
                    let eps = PERTURBATIONS[kind as usize - 1];
                    let moved: Vec<C64> = psi.iter().map(|z| z + rng.complex_normal() * eps).collect();
                    let len = norm(&moved);
                    moved.into_iter().map(|z| z / len).collect()
                }
            };
            let diff: Vec<C64> = psi.iter().zip(&phi).map(|(a, b)| a - b).collect();
            let dist = norm(&diff);
            if dist == 0.0 {
                return Ok(None);
            }
            let a = ergotropy_value(&partial_trace_b(&psi, dims)?, h)?;
            let b = ergotropy_value(&partial_trace_b(&phi, dims)?, h)?;
            Ok(Some((a - b).abs() / dist))
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().flatten().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{ComplexMatrix, PauliString, PauliTerm};

    fn pauli_z() -> HamiltonianSpec {
        HamiltonianSpec::from_pauli_terms(1, vec![PauliTerm { coefficient: 1.0, pauli: PauliString::single(1, 0, 'Z').unwrap() }])
            .unwrap()
    }

    #[test]
    fn bound_examples() {
        let b = theorem1_bound(1.0, 2, 2, 1.0).unwrap();
        assert_eq!(b, 1.0);
        let c = 72.0 * std::f64::consts::PI.powi(3) * std::f64::consts::LN_2;
        assert!((c - 1_547.417_754_764_020_6).abs() < 1e-9);
        assert!(theorem1_bound(1e3, 2, 2, 1.0).unwrap() < 1e-100);
        assert!(theorem1_bound(0.0, 2, 2, 1.0).is_err());
        assert!(theorem1_bound(30.0, 2, 64, 1.0).unwrap() < theorem1_bound(30.0, 2, 32, 1.0).unwrap());
    }

    #[test]
    fn zero_hamiltonian_has_no_ergotropy() {
        let h = HamiltonianSpec::from_matrix(ComplexMatrix::zeros(2, 2)).unwrap();
        let r = ergotropy_statistics(&h, 4, 200, SeedSpec::new(1, 0)).unwrap();
        assert_eq!(r.mean_ergotropy, 0.0);
        assert!(r.tail_table.is_empty());
    }

    #[test]
    fn report_shape() {
        let r = ergotropy_statistics(&pauli_z(), 2, 500, SeedSpec::new(2, 0)).unwrap();
        assert_eq!(r.tail_table.len(), TAIL_GRID_POINTS);
        assert!(r.tail_table.windows(2).all(|w| w[0].gamma < w[1].gamma));
        assert!(r.tail_table.iter().all(|t| (0.0..=1.0).contains(&t.empirical)));
        assert!(r.min_ergotropy >= -1e-10);
        assert!(r.violations().is_empty());
        assert!(r.quantiles.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn lipschitz_small_run() {
        let ratio = lipschitz_check(&pauli_z(), 2, 300, SeedSpec::new(3, 0)).unwrap();
        assert!(ratio > 0.0 && ratio <= 4.0 + 1e-6, "{ratio}");
        assert!(lipschitz_check(&pauli_z(), 1, 10, SeedSpec::new(3, 0)).is_err());
    }
}
