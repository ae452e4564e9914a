//! Dispatches a prepared experiment to the library and collects its
//! summary and tables.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use ergolab_core::concentration::{ergotropy_statistics, lipschitz_check};
use ergolab_core::ergodyn::{
    block_dephase, block_probabilities, build_global_unitary, ergotropy_exact, observational_ergotropy_exact, passive_energy,
};
use ergolab_core::protocols::{full_pipeline, run_protocol, ProtocolConfig, RunResult};
use ergolab_core::qcore::expectation;
use ergolab_core::randomness::haar_unitary;

use crate::config::{streams, ExperimentConfig, ExperimentKind, Prepared};
use crate::error::{runtime, CliError};
use crate::output::{self, Cell, Table};

/// What a run produced, before anything touches the disk.
#[derive(Debug)]
pub struct Report {
    pub summary: Value,
    pub tables: Vec<Table>,
}

impl Report {
    /// The result document: the effective config echoed verbatim, the
    /// summary, and the names of the accompanying tables.
    pub fn document(&self, cfg: &ExperimentConfig) -> Value {
        json!({
            "config": serde_json::to_value(cfg).expect("config serializes"),
            "summary": self.summary,
            "files": self.tables.iter().map(|t| t.file_name).collect::<Vec<_>>(),
        })
    }
}

pub const DEFAULT_OUTPUT_DIR: &str = "ergolab-output";

/// Validates, runs and writes an experiment. Returns the written paths.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let prepared = cfg.prepare()?;
    let report = with_threads(cfg.threads, || run(cfg, &prepared))?;
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    output::write_all(Path::new(&dir), &report.document(cfg), &report.tables)
}

/// Runs `f` on a dedicated pool when a thread count is given.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T, CliError> + Send) -> Result<T, CliError> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(runtime)?.install(f),
    }
}

pub fn run(cfg: &ExperimentConfig, p: &Prepared) -> Result<Report, CliError> {
    match cfg.kind {
        ExperimentKind::Exact => exact(p),
        ExperimentKind::Probe => probe(cfg, p),
        ExperimentKind::Protocol1 | ExperimentKind::Protocol2 | ExperimentKind::Protocol3 => protocol(cfg, p),
        ExperimentKind::Pipeline => pipeline(cfg, p),
        ExperimentKind::Concentration => concentration(cfg, p),
        ExperimentKind::Lipschitz => lipschitz(cfg, p),
    }
}

fn state(p: &Prepared) -> &ergolab_core::qcore::DensityMatrix {
    p.state.as_ref().expect("validated config has a state")
}

fn exact(p: &Prepared) -> Result<Report, CliError> {
    let rho = state(p);
    let erg = ergotropy_exact(rho, &p.h).map_err(runtime)?;
    let mut per_measurement = Vec::new();
    for (label, ms) in &p.measurements {
        let probs = block_probabilities(rho, ms).map_err(runtime)?;
        let global = build_global_unitary(ms, &p.h, &probs).map_err(runtime)?;
        let mut dephased = block_dephase(rho, ms).map_err(runtime)?.spectrum();
        dephased.reverse();
        per_measurement.push(json!({
            "measurement": label,
            "probabilities": probs,
            "permutation": global.permutation,
            "observational_ergotropy": observational_ergotropy_exact(rho, &p.h, ms).map_err(runtime)?,
            "dephased_spectrum": dephased,
        }));
    }
    let mut spectrum = rho.spectrum();
    spectrum.reverse();
    Ok(Report {
        summary: json!({
            "dimension": rho.dim(),
            "energy": expectation(p.h.matrix(), rho).map_err(runtime)?,
            "ergotropy": erg.value,
            "passive_energy": passive_energy(rho, &p.h).map_err(runtime)?,
            "spectrum": spectrum,
            "operator_norm": p.h.operator_norm(),
            "observational": per_measurement,
        }),
        tables: Vec::new(),
    })
}

/// Best `Tr[H(ρ − UρU†)]` over Haar-random `U`, as a lower estimate of the ergotropy.
fn probe(cfg: &ExperimentConfig, p: &Prepared) -> Result<Report, CliError> {
    let rho = state(p);
    let samples = cfg.samples.expect("validated");
    let seed = cfg.seed(streams::PROBE);
    let e0 = expectation(p.h.matrix(), rho).map_err(runtime)?;
    let best = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let u = haar_unitary(rho.dim(), seed.child(k))?;
            Ok(e0 - expectation(p.h.matrix(), &rho.conjugate_by(&u)?)?)
        })
        .collect::<ergolab_core::Result<Vec<f64>>>()
        .map_err(runtime)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let erg = ergotropy_exact(rho, &p.h).map_err(runtime)?.value;
    Ok(Report {
        summary: json!({ "samples": samples, "best_found": best, "ergotropy": erg, "shortfall": erg - best }),
        tables: Vec::new(),
    })
}

fn protocol_config(cfg: &ExperimentConfig) -> Result<ProtocolConfig, CliError> {
    let mut pc = ProtocolConfig::new(
        cfg.epsilon.expect("validated"),
        cfg.delta.expect("validated"),
        cfg.seed(streams::SHOTS),
        cfg.work_variant()?,
    )
    .map_err(runtime)?
    .with_record_shots(cfg.record_shots);
    pc.shots_override = cfg.shots_override;
    Ok(pc)
}

fn run_tables(run: &RunResult) -> Vec<Table> {
    let exact = run.exact_reference.unwrap_or(f64::NAN);
    let mut tables = vec![Table {
        file_name: "convergence.csv",
        columns: vec!["shot_index", "running_estimate", "exact_reference", "abs_error"],
        rows: run
            .running_means
            .iter()
            .map(|&(k, m)| vec![Cell::Int(k), Cell::Real(m), Cell::Real(exact), Cell::Real((m - exact).abs())])
            .collect(),
    }];
    if !run.per_shot.is_empty() {
        tables.push(Table {
            file_name: "per_shot.csv",
            columns: vec!["shot_index", "value"],
            rows: run.per_shot.iter().enumerate().map(|(j, &v)| vec![Cell::Int(j as u64), Cell::Real(v)]).collect(),
        });
    }
    tables
}

fn run_summary(run: &RunResult) -> Value {
    json!({
        "variant": run.config.variant.name(),
        "shots": run.shots,
        "estimate": run.estimate,
        "exact_reference": run.exact_reference,
        "abs_error": run.exact_reference.map(|e| (run.estimate - e).abs()),
        "scale": run.scale,
        "permutation": run.permutation,
        "epsilon": run.config.epsilon,
        "delta": run.config.delta,
        "elapsed_seconds": run.elapsed,
    })
}

fn protocol(cfg: &ExperimentConfig, p: &Prepared) -> Result<Report, CliError> {
    let rho = state(p);
    let ms = &p.measurements[0].1;
    let probs = block_probabilities(rho, ms).map_err(runtime)?;
    let run = run_protocol(rho, &p.h, ms, &probs, &protocol_config(cfg)?).map_err(runtime)?;
    let mut summary = run_summary(&run);
    summary["probabilities"] = json!(probs);
    Ok(Report { summary, tables: run_tables(&run) })
}

fn pipeline(cfg: &ExperimentConfig, p: &Prepared) -> Result<Report, CliError> {
    let rho = state(p);
    let ms = &p.measurements[0].1;
    let s1 = cfg.stage1.as_ref().expect("validated");
    let exact_probs = block_probabilities(rho, ms).map_err(runtime)?;
    let mut stage1 = ProtocolConfig::new(s1.epsilon.unwrap_or(0.5), s1.delta, cfg.seed(streams::STAGE1), cfg.work_variant()?)
        .map_err(runtime)?;
    stage1.shots_override = s1.shots_override;
    let calibration = s1.calibrate.then_some(exact_probs.as_slice());
    let out = full_pipeline(rho, &p.h, ms, &stage1, &protocol_config(cfg)?, calibration).map_err(runtime)?;
    let summary = json!({
        "stage1": {
            "epsilon": out.stage1_epsilon,
            "delta": out.stage1_delta,
            "shots": out.stage1_shots,
            "estimates": out.estimates,
            "exact_probabilities": exact_probs,
        },
        "stage2": run_summary(&out.run),
        "stage2_delta": out.stage2_delta,
        "total_shots": out.total_shots,
        "observational_ergotropy": observational_ergotropy_exact(rho, &p.h, ms).map_err(runtime)?,
    });
    Ok(Report { summary, tables: run_tables(&out.run) })
}

fn concentration(cfg: &ExperimentConfig, p: &Prepared) -> Result<Report, CliError> {
    let start = Instant::now();
    let r = ergotropy_statistics(
        &p.h,
        cfg.n_env.expect("validated"),
        cfg.samples.expect("validated"),
        cfg.seed(streams::CONCENTRATION),
    )
    .map_err(runtime)?;
    let summary = json!({
        "n": r.n,
        "n_env": r.n_env,
        "samples": r.samples,
        "mean_ergotropy": r.mean_ergotropy,
        "std_error": r.std_error,
        "min_ergotropy": r.min_ergotropy,
        "quantiles": r.quantiles.iter().map(|&(q, v)| json!({ "level": q, "value": v })).collect::<Vec<_>>(),
        "violations": r.violations().len(),
        "elapsed_seconds": start.elapsed().as_secs_f64(),
    });
    let table = Table {
        file_name: "tail.csv",
        columns: vec!["gamma", "empirical", "bound"],
        rows: r.tail_table.iter().map(|t| vec![Cell::Real(t.gamma), Cell::Real(t.empirical), Cell::Real(t.bound)]).collect(),
    };
    Ok(Report { summary, tables: vec![table] })
}

fn lipschitz(cfg: &ExperimentConfig, p: &Prepared) -> Result<Report, CliError> {
    let pairs = cfg.pairs.expect("validated");
    let ratio = lipschitz_check(&p.h, cfg.n_env.expect("validated"), pairs, cfg.seed(streams::LIPSCHITZ)).map_err(runtime)?;
    let limit = 4.0 * p.h.operator_norm();
    Ok(Report {
        summary: json!({ "pairs": pairs, "max_ratio": ratio, "limit": limit, "within_limit": ratio <= limit + 1e-6 }),
        tables: Vec::new(),
    })
}
