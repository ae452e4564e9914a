//! Shot-level simulation of the probability-estimation stage and of the three
//! work-extraction protocols, with closed-form sample counts.

mod engine;
mod samplers;

pub use engine::{checkpoints, MAX_SERIES_ROWS};
pub use samplers::MAX_TABLE_BRANCHES;

use std::time::Instant;

use crate::ergodyn::{block_probabilities, build_global_unitary, observational_ergotropy_with_unitary, MeasurementSetting};
use crate::qcore::{DensityMatrix, HamiltonianSpec};
use crate::randomness::{cumulative, SeedSpec};
use crate::{Error, Result};

use samplers::{Protocol1Sampler, Protocol2Sampler, Protocol3Sampler};

/// Which work-estimation protocol to simulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolVariant {
    /// Energy measurements and a Pauli twirl inside each block.
    Protocol1,
    /// Energy measurements replaced by single sampled Pauli terms.
    Protocol2,
    /// Block-random unitary realised as a single-ancilla combination of `2M` unitaries.
    Protocol3,
}

impl ProtocolVariant {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Protocol1 => "protocol1",
            Self::Protocol2 => "protocol2",
            Self::Protocol3 => "protocol3",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    /// Additive accuracy: energy units for work stages, probability units for
    /// the estimation stage.
    pub epsilon: f64,
    pub delta: f64,
    pub seed: SeedSpec,
    pub shots_override: Option<u64>,
    pub variant: ProtocolVariant,
    /// Keep every per-shot value in [`RunResult::per_shot`].
    pub record_shots: bool,
}

impl ProtocolConfig {
    pub fn new(epsilon: f64, delta: f64, seed: SeedSpec, variant: ProtocolVariant) -> Result<Self> {
        let cfg = Self { epsilon, delta, seed, shots_override: None, variant, record_shots: true };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots_override = Some(shots);
        self
    }

    pub fn with_record_shots(mut self, record: bool) -> Self {
        self.record_shots = record;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_accuracy(self.epsilon, self.delta)
    }
}

/// Outcome of one protocol run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub shots: u64,
    /// Per-shot values `μ_j` (empty when shot recording is off).
    pub per_shot: Vec<f64>,
    /// `2` for Protocols 1 and 3, `2h` for Protocol 2.
    pub scale: f64,
    /// `scale / T · Σ_j μ_j`.
    pub estimate: f64,
    /// Observational ergotropy evaluated exactly with the same `U_gl`.
    pub exact_reference: Option<f64>,
    /// `(k, estimate after k shots)` at geometrically thinned `k`.
    pub running_means: Vec<(u64, f64)>,
    /// Block permutation that fixed `U_gl`.
    pub permutation: Vec<usize>,
    pub config: ProtocolConfig,
    /// Wall-clock seconds.
    pub elapsed: f64,
}

/// Result of [`gap_epsilon`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GapEpsilon {
    /// `Δ/3` for the smallest nonzero gap `Δ`.
    Epsilon(f64),
    /// All probabilities coincide, so every ordering gives the same `U_gl`.
    OrderingFree,
}

/// Stage-1 output and stage-2 run of [`full_pipeline`].
#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub estimates: Vec<f64>,
    pub stage1_shots: u64,
    pub stage1_epsilon: f64,
    pub stage1_delta: f64,
    pub stage2_delta: f64,
    pub run: RunResult,
    /// `T̃ + T`.
    pub total_shots: u64,
}

/// Probabilities closer than this are treated as equal by [`gap_epsilon`].
pub const PROBABILITY_TIE_TOL: f64 = 1e-12;

fn check_accuracy(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::arg(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::arg(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

fn ceil_count(x: f64) -> Result<u64> {
    if !x.is_finite() || x >= u64::MAX as f64 {
        return Err(Error::arg(format!("sample count {x} is not representable")));
    }
    Ok(x.ceil() as u64)
}

/// `⌈ln(2M/δ) / (2ε²)⌉`.
pub fn shots_for_probabilities(m: usize, epsilon: f64, delta: f64) -> Result<u64> {
    check_accuracy(epsilon, delta)?;
    if m == 0 {
        return Err(Error::arg("block count must be at least 1"));
    }
    ceil_count((2.0 * m as f64 / delta).ln() / (2.0 * epsilon * epsilon))
}

/// `⌈8‖H‖² ln(2/δ) / ε²⌉`.
pub fn shots_for_work(h_norm: f64, epsilon: f64, delta: f64) -> Result<u64> {
    check_accuracy(epsilon, delta)?;
    if !(h_norm.is_finite() && h_norm > 0.0) {
        return Err(Error::arg(format!("operator norm must be positive, got {h_norm}")));
    }
    ceil_count(8.0 * h_norm * h_norm * (2.0 / delta).ln() / (epsilon * epsilon))
}

/// `⌈8h² ln(2/δ) / ε²⌉` with `h = Σ_j |h_j|`.
pub fn shots_for_pauli_work(h_weight: f64, epsilon: f64, delta: f64) -> Result<u64> {
    shots_for_work(h_weight, epsilon, delta)
}

/// `⌈8(1 + M²)² ‖H‖² ln(2/δ) / ε²⌉`.
pub fn shots_for_lcu(m: usize, h_norm: f64, epsilon: f64, delta: f64) -> Result<u64> {
    if m == 0 {
        return Err(Error::arg("block count must be at least 1"));
    }
    check_accuracy(epsilon, delta)?;
    if !(h_norm.is_finite() && h_norm > 0.0) {
        return Err(Error::arg(format!("operator norm must be positive, got {h_norm}")));
    }
    let factor = 1.0 + (m * m) as f64;
    ceil_count(8.0 * factor * factor * h_norm * h_norm * (2.0 / delta).ln() / (epsilon * epsilon))
}

/// `Δ/3` for the smallest gap `Δ` between distinct probabilities.
pub fn gap_epsilon(probs: &[f64]) -> Result<GapEpsilon> {
    if probs.is_empty() {
        return Err(Error::arg("probability list is empty"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::arg(format!("probabilities sum to {total}, not 1")));
    }
    let mut sorted = probs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let gap = sorted.windows(2).map(|w| w[1] - w[0]).filter(|&g| g > PROBABILITY_TIE_TOL).fold(f64::INFINITY, f64::min);
    Ok(if gap.is_finite() { GapEpsilon::Epsilon(gap / 3.0) } else { GapEpsilon::OrderingFree })
}

/// Empirical block frequencies from repeated measurements of fresh copies.
/// Uses `cfg.shots_override` or [`shots_for_probabilities`].
pub fn estimate_probabilities(rho: &DensityMatrix, ms: &MeasurementSetting, cfg: &ProtocolConfig) -> Result<(Vec<f64>, u64)> {
    cfg.validate()?;
    let probs = block_probabilities(rho, ms)?;
    let shots = match cfg.shots_override {
        Some(t) => t,
        None => shots_for_probabilities(ms.num_blocks(), cfg.epsilon, cfg.delta)?,
    };
    if shots == 0 {
        return Err(Error::arg("probability estimation needs at least one shot"));
    }
    let counts = engine::count_outcomes(shots, cfg.seed, &cumulative(&probs));
    Ok((counts.iter().map(|&c| c as f64 / shots as f64).collect(), shots))
}

/// Shots required by the configured variant when no override is given.
pub fn required_shots(h: &HamiltonianSpec, ms: &MeasurementSetting, cfg: &ProtocolConfig) -> Result<u64> {
    cfg.validate()?;
    if let Some(t) = cfg.shots_override {
        return Ok(t);
    }
    match cfg.variant {
        ProtocolVariant::Protocol1 => shots_for_work(h.operator_norm(), cfg.epsilon, cfg.delta),
        ProtocolVariant::Protocol2 => {
            let w = h
                .pauli_weight()
                .ok_or_else(|| Error::Configuration("Protocol 2 needs a Hamiltonian given as a Pauli sum".into()))?;
            shots_for_pauli_work(w, cfg.epsilon, cfg.delta)
        }
        ProtocolVariant::Protocol3 => shots_for_lcu(ms.num_blocks(), h.operator_norm(), cfg.epsilon, cfg.delta),
    }
}

fn run_with<F>(
    rho: &DensityMatrix,
    h: &HamiltonianSpec,
    ms: &MeasurementSetting,
    probs_for_ugl: &[f64],
    cfg: &ProtocolConfig,
    build: impl FnOnce(&crate::qcore::ComplexMatrix) -> Result<(F, f64, f64)>,
) -> Result<RunResult>
where
    F: Fn(&mut crate::randomness::StreamRng) -> f64 + Sync,
{
    let start = Instant::now();
    cfg.validate()?;
    ms.check_dim(rho.dim())?;
    ms.check_dim(h.dim())?;
    let global = build_global_unitary(ms, h, probs_for_ugl)?;
    let exact = observational_ergotropy_with_unitary(rho, h, ms, &global.matrix)?;
    let shots = required_shots(h, ms, cfg)?;
    if shots == 0 {
        return Err(Error::arg("a protocol run needs at least one shot"));
    }
    let (shot, scale, bound) = build(&global.matrix)?;
    let cps = checkpoints(shots);
    let summary = engine::run_shots(shots, cfg.seed, bound, cfg.record_shots, &cps, shot)?;
    Ok(RunResult {
        shots,
        per_shot: summary.per_shot,
        scale,
        estimate: scale * summary.sum / shots as f64,
        exact_reference: Some(exact),
        running_means: summary.prefix_sums.iter().map(|&(k, s)| (k, scale * s / k as f64)).collect(),
        permutation: global.permutation,
        config: cfg.clone(),
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// Protocol 1 with `U_gl` fixed by `probs_for_ugl`.
pub fn protocol1_run(
    rho: &DensityMatrix,
    h: &HamiltonianSpec,
    ms: &MeasurementSetting,
    probs_for_ugl: &[f64],
    cfg: &ProtocolConfig,
) -> Result<RunResult> {
    run_with(rho, h, ms, probs_for_ugl, cfg, |u| {
        let s = Protocol1Sampler::new(rho, h, ms, u)?;
        Ok((move |rng: &mut _| s.shot(rng), 2.0, h.operator_norm()))
    })
}

/// Protocol 2; `h` must carry its Pauli decomposition.
pub fn protocol2_run(
    rho: &DensityMatrix,
    h: &HamiltonianSpec,
    ms: &MeasurementSetting,
    probs_for_ugl: &[f64],
    cfg: &ProtocolConfig,
) -> Result<RunResult> {
    run_with(rho, h, ms, probs_for_ugl, cfg, |u| {
        let s = Protocol2Sampler::new(rho, h, ms, u)?;
        let scale = 2.0 * s.weight;
        Ok((move |rng: &mut _| s.shot(rng), scale, 1.0))
    })
}

/// Protocol 3 (single-ancilla linear combination of unitaries).
pub fn protocol3_run(
    rho: &DensityMatrix,
    h: &HamiltonianSpec,
    ms: &MeasurementSetting,
    probs_for_ugl: &[f64],
    cfg: &ProtocolConfig,
) -> Result<RunResult> {
    let m = ms.num_blocks() as f64;
    run_with(rho, h, ms, probs_for_ugl, cfg, |u| {
        let s = Protocol3Sampler::new(rho, h, ms, u)?;
        Ok((move |rng: &mut _| s.shot(rng), 2.0, h.operator_norm() * m.powi(2).max(1.0)))
    })
}

/// Dispatches on `cfg.variant`.
pub fn run_protocol(
    rho: &DensityMatrix,
    h: &HamiltonianSpec,
    ms: &MeasurementSetting,
    probs_for_ugl: &[f64],
    cfg: &ProtocolConfig,
) -> Result<RunResult> {
    match cfg.variant {
        ProtocolVariant::Protocol1 => protocol1_run(rho, h, ms, probs_for_ugl, cfg),
        ProtocolVariant::Protocol2 => protocol2_run(rho, h, ms, probs_for_ugl, cfg),
        ProtocolVariant::Protocol3 => protocol3_run(rho, h, ms, probs_for_ugl, cfg),
    }
}

/// Every `(value, probability)` branch of one shot of `variant`, enumerated
/// from the same tables the sampler draws from. The probabilities sum to one
/// and `scale · Σ value·probability` is the protocol's expected estimate.
pub fn shot_distribution(
    rho: &DensityMatrix,
    h: &HamiltonianSpec,
    ms: &MeasurementSetting,
    probs_for_ugl: &[f64],
    variant: ProtocolVariant,
) -> Result<Vec<(f64, f64)>> {
    ms.check_dim(rho.dim())?;
    ms.check_dim(h.dim())?;
    let global = build_global_unitary(ms, h, probs_for_ugl)?;
    let u = &global.matrix;
    Ok(match variant {
        ProtocolVariant::Protocol1 => Protocol1Sampler::new(rho, h, ms, u)?.distribution(),
        ProtocolVariant::Protocol2 => Protocol2Sampler::new(rho, h, ms, u)?.distribution(),
        ProtocolVariant::Protocol3 => Protocol3Sampler::new(rho, h, ms, u)?.distribution(),
    })
}

/// Probability estimation followed by the work stage with `U_gl` built from
/// the estimates. With `calibration` (the exact probabilities), stage 1 uses
/// `ε = Δ/3` unless the ordering is irrelevant.
pub fn full_pipeline(
    rho: &DensityMatrix,
    h: &HamiltonianSpec,
    ms: &MeasurementSetting,
    stage1: &ProtocolConfig,
    stage2: &ProtocolConfig,
    calibration: Option<&[f64]>,
) -> Result<PipelineResult> {
    let mut cfg1 = stage1.clone();
    if let Some(probs) = calibration {
        if let GapEpsilon::Epsilon(e) = gap_epsilon(probs)? {
            cfg1.epsilon = e;
        }
    }
    if cfg1.shots_override == Some(0) {
        return Err(Error::arg("stage 1 needs at least one shot"));
    }
    let (estimates, stage1_shots) = estimate_probabilities(rho, ms, &cfg1)?;
    let run = run_protocol(rho, h, ms, &estimates, stage2)?;
    Ok(PipelineResult {
        estimates,
        stage1_shots,
        stage1_epsilon: cfg1.epsilon,
        stage1_delta: cfg1.delta,
        stage2_delta: stage2.delta,
        total_shots: stage1_shots + run.shots,
        run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{build_number_hamiltonian, ComplexMatrix, HamiltonianSpec, PauliString, PauliTerm};

    fn cfg(variant: ProtocolVariant, shots: u64) -> ProtocolConfig {
        ProtocolConfig::new(0.1, 0.05, SeedSpec::new(7, 0), variant).unwrap().with_shots(shots)
    }

    #[test]
    fn sample_count_examples() {
        assert_eq!(shots_for_probabilities(4, 0.1, 0.05).unwrap(), 254);
        assert_eq!(shots_for_probabilities(1, 1.0, 1.0 - 1e-12).unwrap(), 1);
        assert!(shots_for_probabilities(0, 0.1, 0.1).is_err());
        assert!(shots_for_work(1.0, 0.0, 0.1).is_err());
        assert!(shots_for_work(1.0, 0.1, 1.0).is_err());
        assert_eq!(shots_for_work(1.0, 1.0, 2.0 / std::f64::consts::E).unwrap(), 8);
    }

    #[test]
    fn gap_epsilon_examples() {
        let d1 = [5.0 / 18.0, 5.0 / 18.0, 1.0 / 9.0, 1.0 / 3.0];
        match gap_epsilon(&d1).unwrap() {
            GapEpsilon::Epsilon(e) => assert!((e - 1.0 / 54.0).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert_eq!(gap_epsilon(&[0.25; 4]).unwrap(), GapEpsilon::OrderingFree);
        assert!(gap_epsilon(&[]).is_err());
        assert!(gap_epsilon(&[0.5, 0.6]).is_err());
    }

    #[test]
    fn single_term_protocol2_limit() {
        // H = 2Z on one qubit, ρ = |0><0|, one block: estimate -> 2.
        let h = HamiltonianSpec::from_pauli_terms(
            1,
            vec![PauliTerm { coefficient: 2.0, pauli: PauliString::single(1, 0, 'Z').unwrap() }],
        )
        .unwrap();
        let rho = DensityMatrix::new(ComplexMatrix::from_diagonal(&[1.0, 0.0])).unwrap();
        let ms_one = MeasurementSetting::from_projectors(vec![ComplexMatrix::identity(2)]).unwrap();
        let r = protocol2_run(&rho, &h, &ms_one, &[1.0], &cfg(ProtocolVariant::Protocol2, 200_000)).unwrap();
        assert!((r.exact_reference.unwrap() - 2.0).abs() < 1e-12);
        assert!((r.estimate - 2.0).abs() < 0.05, "{}", r.estimate);
    }

    #[test]
    fn eigenstate_in_trivial_blocks_gives_zero() {
        let h = build_number_hamiltonian(2).unwrap();
        let rho = DensityMatrix::new(ComplexMatrix::from_diagonal(&[0.0, 1.0, 0.0, 0.0])).unwrap();
        let ms = MeasurementSetting::computational_prefix(2, 2).unwrap();
        let r = protocol1_run(&rho, &h, &ms, &[0.0, 1.0, 0.0, 0.0], &cfg(ProtocolVariant::Protocol1, 1000)).unwrap();
        // U_gl maps |01> onto the ground state, so only the heads branch carries energy.
        assert!(r.per_shot.iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn estimate_is_scaled_sum_and_deterministic() {
        let h = build_number_hamiltonian(2).unwrap();
        let rho = DensityMatrix::new(ComplexMatrix::from_diagonal(&[0.1, 0.2, 0.3, 0.4])).unwrap();
        let ms = MeasurementSetting::computational_prefix(2, 1).unwrap();
        for v in [ProtocolVariant::Protocol1, ProtocolVariant::Protocol2, ProtocolVariant::Protocol3] {
            let c = cfg(v, 20_000);
            let a = run_protocol(&rho, &h, &ms, &[0.3, 0.7], &c).unwrap();
            let b = run_protocol(&rho, &h, &ms, &[0.3, 0.7], &c).unwrap();
            assert_eq!(a.per_shot, b.per_shot);
            let naive = a.scale * a.per_shot.iter().sum::<f64>() / a.shots as f64;
            assert!((naive - a.estimate).abs() < 1e-12 * naive.abs().max(1.0));
            assert_eq!(a.running_means.last().unwrap().0, a.shots);
        }
    }

    #[test]
    fn pipeline_rejects_zero_stage1_shots() {
        let h = build_number_hamiltonian(2).unwrap();
        let rho = DensityMatrix::maximally_mixed(4);
        let ms = MeasurementSetting::computational_prefix(2, 1).unwrap();
        let s1 = cfg(ProtocolVariant::Protocol1, 0);
        let s2 = cfg(ProtocolVariant::Protocol1, 10);
        assert!(full_pipeline(&rho, &h, &ms, &s1, &s2, None).is_err());
    }

    #[test]
    fn protocol2_requires_pauli_terms() {
        let h = HamiltonianSpec::from_matrix(ComplexMatrix::from_diagonal(&[0.0, 1.0])).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        let ms = MeasurementSetting::from_projectors(vec![ComplexMatrix::identity(2)]).unwrap();
        let err = protocol2_run(&rho, &h, &ms, &[1.0], &cfg(ProtocolVariant::Protocol2, 10)).unwrap_err();
        assert!(matches!(err, Error::Configuration(_)));
    }
}
