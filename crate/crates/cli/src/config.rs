//! Experiment documents: parsing, validation and construction of the
//! library objects they describe.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ergolab_core::ergodyn::MeasurementSetting;
use ergolab_core::protocols::ProtocolVariant;
use ergolab_core::qcore::{
    build_heisenberg_xxx, build_number_hamiltonian, ComplexMatrix, DensityMatrix, HamiltonianSpec, PauliString, PauliTerm, C64,
};
use ergolab_core::randomness::{induced_random_state, SeedSpec};

use crate::error::{invalid, CliError};
use crate::fixtures;

/// A dense complex matrix as rows of `[re, im]` pairs.
pub type InlineMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Exact,
    Probe,
    Protocol1,
    Protocol2,
    Protocol3,
    Pipeline,
    Concentration,
    Lipschitz,
}

impl ExperimentKind {
    pub fn variant(self) -> Option<ProtocolVariant> {
        match self {
            Self::Protocol1 => Some(ProtocolVariant::Protocol1),
            Self::Protocol2 => Some(ProtocolVariant::Protocol2),
            Self::Protocol3 => Some(ProtocolVariant::Protocol3),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianConfig {
    /// Periodic chain `−J Σ Z_j Z_{j+1} − h Σ X_j`.
    HeisenbergXxx {
        n: usize,
        coupling: f64,
        field: f64,
    },
    /// `Σ_j (I − Z_j)/2`.
    Number {
        n: usize,
    },
    PauliSum {
        terms: Vec<PauliTermConfig>,
    },
    Matrix {
        entries: InlineMatrix,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliTermConfig {
    pub coefficient: f64,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    Fixture {
        name: String,
    },
    Matrix {
        entries: InlineMatrix,
    },
    /// Partial trace of a Haar-random pure state on `N × n_env`, with `N`
    /// taken from the Hamiltonian.
    Induced {
        n_env: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasurementConfig {
    Fixture { name: String },
    Projectors { projectors: Vec<InlineMatrix> },
}

/// Probability-estimation stage of a pipeline run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage1Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots_override: Option<u64>,
    /// Use a third of the smallest gap of the exact probabilities as ε.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub calibrate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub hamiltonian: HamiltonianConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measurements: Vec<MeasurementConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots_override: Option<u64>,
    /// Write every shot value to `per_shot.csv`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub record_shots: bool,
    /// Work-stage protocol of a pipeline run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage1: Option<Stage1Config>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_env: Option<usize>,
    /// Random states (concentration) or random unitaries (probe).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// Stream ids under the configured seed, one per consumer.
pub mod streams {
    pub const SHOTS: u64 = 0;
    pub const STAGE1: u64 = 1;
    pub const STATE: u64 = 2;
    pub const PROBE: u64 = 3;
    pub const CONCENTRATION: u64 = 4;
    pub const LIPSCHITZ: u64 = 5;
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        match serde_path_to_error::deserialize(de) {
            Ok(cfg) => Ok(cfg),
            Err(e) => {
                let field = e.path().to_string();
                let inner = e.into_inner();
                Err(CliError::Parse { line: inner.line(), column: inner.column(), field, message: inner.to_string() })
            }
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    /// Canonical pretty-printed form; parsing it back gives an equal config.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn seed(&self, stream: u64) -> SeedSpec {
        SeedSpec::new(self.seed, stream)
    }

    /// Checks everything that can be checked without running and builds the
    /// Hamiltonian, state and measurements.
    pub fn prepare(&self) -> Result<Prepared, CliError> {
        let need =
            |ok: bool, what: &str| if ok { Ok(()) } else { Err(invalid(format!("{what} is required for kind {:?}", self.kind))) };
        let h = build_hamiltonian(&self.hamiltonian)?;
        let n = h.dim();

        let state = match &self.state {
            Some(s) => Some(build_state(s, n, self)?),
            None => None,
        };
        if let Some(rho) = &state {
            if rho.dim() != n {
                return Err(invalid(format!("state dimension {} differs from the Hamiltonian's {n}", rho.dim())));
            }
        }
        let measurements = self
            .measurements
            .iter()
            .map(|m| {
                let ms = build_measurement(m, n)?;
                if ms.dim() != n {
                    return Err(invalid(format!("measurement dimension {} differs from the Hamiltonian's {n}", ms.dim())));
                }
                Ok((measurement_label(m), ms))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if self.threads == Some(0) {
            return Err(invalid("threads must be at least 1"));
        }

        match self.kind {
            ExperimentKind::Exact => need(state.is_some(), "state")?,
            ExperimentKind::Probe => {
                need(state.is_some(), "state")?;
                need(self.samples.is_some_and(|s| s > 0), "a positive `samples`")?;
            }
            ExperimentKind::Protocol1 | ExperimentKind::Protocol2 | ExperimentKind::Protocol3 | ExperimentKind::Pipeline => {
                need(state.is_some(), "state")?;
                if measurements.len() != 1 {
                    return Err(invalid(format!("{:?} needs exactly one measurement, got {}", self.kind, measurements.len())));
                }
                let variant = self.work_variant()?;
                check_accuracy(self.epsilon, self.delta)?;
                if self.shots_override == Some(0) {
                    return Err(invalid("shots_override must be positive"));
                }
                if variant == ProtocolVariant::Protocol2 && h.pauli_terms().is_none() {
                    return Err(invalid("protocol2 needs a Hamiltonian given as a Pauli sum"));
                }
                if self.kind == ExperimentKind::Pipeline {
                    let s1 = self.stage1.as_ref().ok_or_else(|| invalid("pipeline needs a `stage1` section"))?;
                    if s1.epsilon.is_none() && !s1.calibrate {
                        return Err(invalid("stage1 needs `epsilon` unless `calibrate` is set"));
                    }
                    check_accuracy(Some(s1.epsilon.unwrap_or(0.5)), Some(s1.delta))?;
                    if s1.shots_override == Some(0) {
                        return Err(invalid("stage1.shots_override must be positive"));
                    }
                }
            }
            ExperimentKind::Concentration => {
                need(self.n_env.is_some(), "n_env")?;
                need(self.samples.is_some_and(|s| s > 0), "a positive `samples`")?;
            }
            ExperimentKind::Lipschitz => {
                need(self.n_env.is_some(), "n_env")?;
                need(self.pairs.is_some_and(|s| s > 0), "a positive `pairs`")?;
            }
        }
        if let Some(n_env) = self.n_env {
            if n_env < n {
                return Err(invalid(format!("n_env = {n_env} is smaller than the system dimension {n}")));
            }
        }
        if self.kind != ExperimentKind::Pipeline && (self.stage1.is_some() || self.variant.is_some()) {
            return Err(invalid("`stage1` and `variant` apply only to pipeline runs"));
        }
        Ok(Prepared { h, state, measurements })
    }

    /// Protocol used for the work stage.
    pub fn work_variant(&self) -> Result<ProtocolVariant, CliError> {
        match self.kind {
            ExperimentKind::Pipeline => self
                .variant
                .unwrap_or(ExperimentKind::Protocol1)
                .variant()
                .ok_or_else(|| invalid("pipeline variant must be protocol1, protocol2 or protocol3")),
            k => k.variant().ok_or_else(|| invalid(format!("{k:?} is not a protocol run"))),
        }
    }
}

/// Library objects built from a validated config.
pub struct Prepared {
    pub h: HamiltonianSpec,
    pub state: Option<DensityMatrix>,
    /// `(label, setting)` per configured measurement.
    pub measurements: Vec<(String, MeasurementSetting)>,
}

fn check_accuracy(epsilon: Option<f64>, delta: Option<f64>) -> Result<(), CliError> {
    match (epsilon, delta) {
        (Some(e), Some(d)) if e.is_finite() && e > 0.0 && d > 0.0 && d < 1.0 => Ok(()),
        (Some(_), Some(_)) => Err(invalid("need epsilon > 0 and 0 < delta < 1")),
        _ => Err(invalid("epsilon and delta are required")),
    }
}

pub fn measurement_label(m: &MeasurementConfig) -> String {
    match m {
        MeasurementConfig::Fixture { name } => name.clone(),
        MeasurementConfig::Projectors { projectors } => format!("inline({} projectors)", projectors.len()),
    }
}

/// Converts `[re, im]` rows into a square matrix.
pub fn inline_matrix(rows: &InlineMatrix) -> Result<ComplexMatrix, CliError> {
    let n = rows.len();
    if n == 0 {
        return Err(invalid("inline matrix is empty"));
    }
    let mut entries = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(invalid(format!("inline matrix row {i} has {} entries, expected {n}", row.len())));
        }
        for &[re, im] in row {
            if !re.is_finite() || !im.is_finite() {
                return Err(invalid(format!("inline matrix row {i} has a non-finite entry")));
            }
            entries.push(C64::new(re, im));
        }
    }
    ComplexMatrix::new(n, n, entries).map_err(invalid)
}

pub fn build_hamiltonian(cfg: &HamiltonianConfig) -> Result<HamiltonianSpec, CliError> {
    match cfg {
        HamiltonianConfig::HeisenbergXxx { n, coupling, field } => build_heisenberg_xxx(*n, *coupling, *field),
        HamiltonianConfig::Number { n } => build_number_hamiltonian(*n),
        HamiltonianConfig::PauliSum { terms } => {
            let first = terms.first().ok_or_else(|| invalid("pauli_sum needs at least one term"))?;
            let n = first.label.chars().count();
            let terms = terms
                .iter()
                .map(|t| {
                    let pauli: PauliString = t.label.parse().map_err(invalid)?;
                    if pauli.num_qubits() != n {
                        return Err(invalid(format!("Pauli label {:?} does not have {n} letters", t.label)));
                    }
                    Ok(PauliTerm { coefficient: t.coefficient, pauli })
                })
                .collect::<Result<Vec<_>, _>>()?;
            HamiltonianSpec::from_pauli_terms(n, terms)
        }
        HamiltonianConfig::Matrix { entries } => HamiltonianSpec::from_matrix(inline_matrix(entries)?),
    }
    .map_err(invalid)
}

fn build_state(cfg: &StateConfig, n: usize, exp: &ExperimentConfig) -> Result<DensityMatrix, CliError> {
    match cfg {
        StateConfig::Fixture { name } => {
            fixtures::state(name).ok_or_else(|| invalid(format!("unknown state fixture {name:?}")))?.map_err(invalid)
        }
        StateConfig::Matrix { entries } => DensityMatrix::new(inline_matrix(entries)?).map_err(invalid),
        StateConfig::Induced { n_env, seed } => {
            if *n_env < n {
                return Err(invalid(format!("induced state needs n_env ≥ {n}, got {n_env}")));
            }
            let seed = SeedSpec::new(seed.unwrap_or(exp.seed), streams::STATE);
            induced_random_state(n, *n_env, seed).map_err(invalid)
        }
    }
}

fn build_measurement(cfg: &MeasurementConfig, n: usize) -> Result<MeasurementSetting, CliError> {
    match cfg {
        MeasurementConfig::Fixture { name } => fixtures::measurement(name, n)
            .ok_or_else(|| invalid(format!("unknown measurement fixture {name:?}")))?
            .map_err(invalid),
        MeasurementConfig::Projectors { projectors } => {
            let mats = projectors.iter().map(inline_matrix).collect::<Result<Vec<_>, _>>()?;
            MeasurementSetting::from_projectors(mats).map_err(invalid)
        }
    }
}
