//! Acceptance criteria 1–8. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test -p ergolab --test acceptance -- 3 7`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ergolab::config::ExperimentConfig;
use ergolab::fixtures;
use ergolab::runner;
use ergolab_core::concentration::{ergotropy_statistics, lipschitz_check};
use ergolab_core::ergodyn::{
    block_dephase, block_probabilities, build_global_unitary, ergotropy_value, observational_ergotropy_exact, MeasurementSetting,
};
use ergolab_core::protocols::{
    estimate_probabilities, protocol1_run, required_shots, shot_distribution, shots_for_lcu, shots_for_pauli_work,
    shots_for_probabilities, shots_for_work, ProtocolConfig, ProtocolVariant,
};
use ergolab_core::qcore::{
    build_heisenberg_xxx, build_number_hamiltonian, expectation, ComplexMatrix, DensityMatrix, HamiltonianSpec,
};
use ergolab_core::randomness::SeedSpec;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn state(name: &str) -> DensityMatrix {
    fixtures::state(name).unwrap().unwrap()
}

fn measurement(name: &str, dim: usize) -> MeasurementSetting {
    fixtures::measurement(name, dim).unwrap().unwrap()
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed <= limit
}

const D1_PROBS: [f64; 4] = [5.0 / 18.0, 5.0 / 18.0, 1.0 / 9.0, 1.0 / 3.0];
/// Both orderings of the tied 5/18 blocks are optimal.
const D1_PERMUTATIONS: [[usize; 4]; 2] = [[3, 0, 1, 2], [3, 1, 0, 2]];

fn criterion1() -> Outcome {
    let start = Instant::now();
    let h = build_number_hamiltonian(3).unwrap();
    let rho = state("appendixD_rho");
    let ent = measurement("appendixD_entangled", 8);
    let prod = measurement("appendixD_product", 8);
    let s5 = 5f64.sqrt();
    let expected_bar = [(s5 + 3.0) / 18.0, 7.0 / 36.0, 7.0 / 36.0, 1.0 / 9.0, 1.0 / 12.0, 1.0 / 12.0, (3.0 - s5) / 18.0, 0.0];
    let mut bar = block_dephase(&rho, &ent).unwrap().spectrum();
    bar.reverse();
    let errors = [
        expectation(h.matrix(), &rho).unwrap() - 29.0 / 18.0,
        ergotropy_value(&rho, &h).unwrap() - 17.0 / 18.0,
        observational_ergotropy_exact(&rho, &h, &ent).unwrap() - 1.0 / 3.0,
        observational_ergotropy_exact(&rho, &h, &prod).unwrap() - 2.0 / 9.0,
        bar.iter().zip(expected_bar).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
    ];
    let worst = errors.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let elapsed = start.elapsed();
    outcome(worst < 1e-9 && within(Duration::from_secs(1), elapsed), format!("max error {worst:.1e}, {elapsed:.2?}"))
}

fn criterion2() -> Outcome {
    let start = Instant::now();
    let h3 = build_heisenberg_xxx(3, 1.0, 1.0).unwrap();
    let h4 = build_heisenberg_xxx(4, 1.0, 1.0).unwrap();
    let fig2 = state("fig2_rho");
    let eta4 = state("eta4");
    // (computed, two-decimal figure, pinned high-precision value)
    let rows = [
        (ergotropy_value(&fig2, &h3).unwrap(), 2.53, 2.532_692_070_451_106_2),
        (observational_ergotropy_exact(&fig2, &h3, &measurement("two_qubit_blocks", 8)).unwrap(), 1.37, 1.366_025_403_784_438_8),
        (ergotropy_value(&eta4, &h4).unwrap(), 2.86, 2.861_428_811_085_496_6),
        (
            observational_ergotropy_exact(&eta4, &h4, &measurement("two_qubit_blocks", 16)).unwrap(),
            0.28,
            0.277_432_923_104_560_47,
        ),
    ];
    let ok = rows.iter().all(|&(v, rounded, pinned)| (v - rounded).abs() <= 5e-3 && (v - pinned).abs() <= 1e-9);
    let elapsed = start.elapsed();
    let values: Vec<String> = rows.iter().map(|r| format!("{:.6}", r.0)).collect();
    outcome(ok && within(Duration::from_secs(1), elapsed), format!("values [{}], {elapsed:.2?}", values.join(", ")))
}

fn criterion3() -> Outcome {
    let start = Instant::now();
    let h = build_number_hamiltonian(3).unwrap();
    let rho = state("appendixD_rho");
    let ms = measurement("appendixD_entangled", 8);
    let obs = observational_ergotropy_exact(&rho, &h, &ms).unwrap();
    let weight = h.pauli_weight().unwrap();
    let mut worst = 0.0f64;
    for (variant, divisor) in
        [(ProtocolVariant::Protocol1, 2.0), (ProtocolVariant::Protocol2, 2.0 * weight), (ProtocolVariant::Protocol3, 2.0)]
    {
        let dist = shot_distribution(&rho, &h, &ms, &D1_PROBS, variant).unwrap();
        let total: f64 = dist.iter().map(|d| d.1).sum();
        let mean: f64 = dist.iter().map(|(v, p)| v * p).sum();
        worst = worst.max((mean - obs / divisor).abs()).max((mean - 1.0 / (3.0 * divisor)).abs()).max((total - 1.0).abs());
    }
    let elapsed = start.elapsed();
    outcome(worst <= 1e-12 && within(Duration::from_secs(10), elapsed), format!("max deviation {worst:.1e}, {elapsed:.2?}"))
}

fn criterion4() -> Outcome {
    let start = Instant::now();
    let h = build_heisenberg_xxx(3, 1.0, 1.0).unwrap();
    let rho = state("fig2_rho");
    let ms = measurement("two_qubit_blocks", 8);
    let probs = block_probabilities(&rho, &ms).unwrap();
    let eps = 1e-2;
    let reps = 200u64;
    let mut successes = 0;
    let mut shots = 0;
    let mut worst = 0.0f64;
    for rep in 0..reps {
        let cfg = ProtocolConfig::new(eps, 1e-4, SeedSpec::new(4_000 + rep, 0), ProtocolVariant::Protocol1)
            .unwrap()
            .with_record_shots(false);
        let r = protocol1_run(&rho, &h, &ms, &probs, &cfg).unwrap();
        shots = r.shots;
        let err = (r.estimate - r.exact_reference.unwrap()).abs();
        worst = worst.max(err);
        if err <= eps {
            successes += 1;
        }
    }
    let expected_shots = (8.0 * 16.0 * (2.0f64 / 1e-4).ln() / (eps * eps)).ceil() as u64;
    let elapsed = start.elapsed();
    outcome(
        successes >= 199 && shots == expected_shots && within(Duration::from_secs(600), elapsed),
        format!("{successes}/{reps} within ε at T = {shots}, worst error {worst:.2e}, {elapsed:.1?}"),
    )
}

fn criterion5() -> Outcome {
    let start = Instant::now();
    let h = build_number_hamiltonian(3).unwrap();
    let rho = state("appendixD_rho");
    let ms = measurement("appendixD_entangled", 8);
    let max_err = |p: &[f64]| p.iter().zip(D1_PROBS).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let reps = 500u64;
    let mut failures = 0;
    for rep in 0..reps {
        let cfg = ProtocolConfig::new(0.05, 0.1, SeedSpec::new(5_000 + rep, 1), ProtocolVariant::Protocol1).unwrap();
        let (p, _) = estimate_probabilities(&rho, &ms, &cfg).unwrap();
        if max_err(&p) > 0.05 {
            failures += 1;
        }
    }
    let rate = failures as f64 / reps as f64;
    let limit = 0.1 + 3.0 * (0.1f64 * 0.9 / reps as f64).sqrt();

    let eps = 1.0 / 54.0;
    let (mut held, mut misordered) = (0, 0);
    for rep in 0..reps {
        let cfg = ProtocolConfig::new(eps, 0.1, SeedSpec::new(6_000 + rep, 1), ProtocolVariant::Protocol1).unwrap();
        let (p, _) = estimate_probabilities(&rho, &ms, &cfg).unwrap();
        if max_err(&p) <= eps {
            held += 1;
            let perm = build_global_unitary(&ms, &h, &p).unwrap().permutation;
            if !D1_PERMUTATIONS.iter().any(|q| perm == q) {
                misordered += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        rate <= limit && misordered == 0 && held > 0,
        format!(
            "failure rate {rate:.3} (limit {limit:.3}); ordering recovered in {}/{held} ε-accurate runs, {elapsed:.1?}",
            held - misordered
        ),
    )
}

fn criterion6() -> Outcome {
    let start = Instant::now();
    let diag = |v: &[f64]| HamiltonianSpec::from_matrix(ComplexMatrix::from_diagonal(v)).unwrap();
    let h2 = diag(&[-1.0, 1.0]);
    let h3 = diag(&[0.0, 0.4, 1.0]);
    let h4 = build_number_hamiltonian(2).unwrap();

    let mut worst_ratio = 0.0f64;
    let mut lipschitz_ok = true;
    for (k, h) in [&h2, &h3, &h4].into_iter().enumerate() {
        let ratio = lipschitz_check(h, h.dim(), 10_000, SeedSpec::new(600 + k as u64, 5)).unwrap();
        let normalized = ratio / h.operator_norm();
        worst_ratio = worst_ratio.max(normalized);
        lipschitz_ok &= ratio <= 4.0 * h.operator_norm() + 1e-6;
    }

    let mut violations = 0;
    for (k, (h, n_env)) in [(&h2, 2), (&h2, 32), (&h4, 16)].into_iter().enumerate() {
        let r = ergotropy_statistics(h, n_env, 10_000, SeedSpec::new(610 + k as u64, 4)).unwrap();
        violations += r.violations().len() + (20 - r.tail_table.len());
    }

    let means: Vec<(f64, f64)> = [2usize, 8, 32, 128]
        .iter()
        .map(|&n_env| {
            let r = ergotropy_statistics(&h2, n_env, 10_000, SeedSpec::new(620, n_env as u64)).unwrap();
            (r.mean_ergotropy, r.std_error)
        })
        .collect();
    let decreasing = means.windows(2).all(|w| w[0].0 - w[1].0 > 3.0 * (w[0].1.powi(2) + w[1].1.powi(2)).sqrt());
    let elapsed = start.elapsed();
    let trend: Vec<String> = means.iter().map(|m| format!("{:.4}", m.0)).collect();
    outcome(
        lipschitz_ok && violations == 0 && decreasing && within(Duration::from_secs(300), elapsed),
        format!("max ratio {worst_ratio:.3}·‖H‖, {violations} tail violations, means [{}], {elapsed:.1?}", trend.join(", ")),
    )
}

fn criterion7() -> Outcome {
    let start = Instant::now();
    let cases = [
        (r#"{"type": "number", "n": 3}"#, "appendixD_rho", "appendixD_entangled", "protocol1"),
        (r#"{"type": "heisenberg_xxx", "n": 3, "coupling": 1.0, "field": 1.0}"#, "fig2_rho", "two_qubit_blocks", "protocol2"),
        (r#"{"type": "number", "n": 3}"#, "appendixD_rho", "appendixD_entangled", "protocol3"),
    ];
    let mut identical = 0;
    for (h, rho, ms, kind) in cases {
        let text = format!(
            r#"{{"kind": "{kind}", "hamiltonian": {h}, "state": {{"type": "fixture", "name": "{rho}"}},
                "measurements": [{{"type": "fixture", "name": "{ms}"}}], "epsilon": 0.1, "delta": 0.1,
                "seed": 77, "shots_override": 100003, "record_shots": true}}"#
        );
        let cfg = ExperimentConfig::from_json(&text).unwrap();
        let prepared = cfg.prepare().unwrap();
        let csv = |threads| {
            let report = runner::with_threads(Some(threads), || runner::run(&cfg, &prepared)).unwrap();
            let t = report.tables.iter().find(|t| t.file_name == "per_shot.csv").unwrap();
            t.to_csv().unwrap()
        };
        if csv(1) == csv(8) {
            identical += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        identical == cases.len(),
        format!("{identical}/{} per-shot CSVs identical at 1 and 8 threads, {elapsed:.1?}", cases.len()),
    )
}

fn criterion8() -> Outcome {
    let mut checked = 0;
    let mut mismatches = 0;
    for eps in [0.5, 0.1, 0.03, 1e-2, 1e-3] {
        for delta in [0.2, 0.1, 0.05, 1e-4, 1e-8] {
            let ln2 = (2.0f64 / delta).ln();
            for m in [1usize, 2, 4, 16] {
                let want = ((2.0 * m as f64 / delta).ln() / (2.0 * eps * eps)).ceil() as u64;
                mismatches += usize::from(shots_for_probabilities(m, eps, delta).unwrap() != want);
                for norm in [0.5, 1.0, 4.0, 12.5] {
                    let f = (1.0 + (m * m) as f64).powi(2);
                    let want3 = (8.0 * f * norm * norm * ln2 / (eps * eps)).ceil() as u64;
                    mismatches += usize::from(shots_for_lcu(m, norm, eps, delta).unwrap() != want3);
                    checked += 2;
                }
            }
            for norm in [0.5, 1.0, 4.0, 6.0, 10.5] {
                let want = (8.0 * norm * norm * ln2 / (eps * eps)).ceil() as u64;
                mismatches += usize::from(shots_for_work(norm, eps, delta).unwrap() != want);
                mismatches += usize::from(shots_for_pauli_work(norm, eps, delta).unwrap() != want);
                checked += 2;
            }
        }
    }
    // Through the dispatcher on the chain: ‖H‖ = 4, h = 6, M = 4.
    let h = build_heisenberg_xxx(3, 1.0, 1.0).unwrap();
    let ms = measurement("two_qubit_blocks", 8);
    let ln2 = (2.0f64 / 1e-4).ln();
    for (variant, want) in [
        (ProtocolVariant::Protocol1, (8.0 * 16.0 * ln2 / 1e-4).ceil() as u64),
        (ProtocolVariant::Protocol2, (8.0 * 36.0 * ln2 / 1e-4).ceil() as u64),
        (ProtocolVariant::Protocol3, (8.0 * 289.0 * 16.0 * ln2 / 1e-4).ceil() as u64),
    ] {
        let cfg = ProtocolConfig::new(1e-2, 1e-4, SeedSpec::new(0, 0), variant).unwrap();
        mismatches += usize::from(required_shots(&h, &ms, &cfg).unwrap() != want);
        checked += 1;
    }
    mismatches += usize::from(shots_for_work(4.0, 1e-2, 1e-4).unwrap() != 12_676_465);
    outcome(mismatches == 0, format!("{checked} grid points, {mismatches} mismatches"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("exact values, three-qubit example", criterion1),
        ("exact values, chain examples", criterion2),
        ("protocol unbiasedness by enumeration", criterion3),
        ("protocol 1 stochastic reproduction", criterion4),
        ("probability stage guarantee and ordering", criterion5),
        ("concentration suite", criterion6),
        ("determinism across thread counts", criterion7),
        ("sample-count formulas", criterion8),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let number = i + 1;
        if !selected.is_empty() && !selected.contains(&number) {
            continue;
        }
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        if !result.pass {
            failed += 1;
        }
        println!("criterion {number}: {} {name}: {}", if result.pass { "PASS" } else { "FAIL" }, result.detail);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
