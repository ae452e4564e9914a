//! Deterministic parallel shot loop.
//!
//! Shots are split into fixed-size chunks independent of the worker count.
//! Shot `j` draws only from `derive_stream(seed, j)`, chunk sums use pairwise
//! summation, and chunk sums are combined pairwise in chunk order, so results
//! are bit-identical for any number of threads.

use rayon::prelude::*;

use crate::randomness::{SeedSpec, StreamRng};
use crate::{Error, Result};

pub(crate) const CHUNK: u64 = 1 << 13;

/// Upper bound on the rows of a running-mean series.
pub const MAX_SERIES_ROWS: usize = 10_000;

pub(crate) struct ShotSummary {
    pub sum: f64,
    pub per_shot: Vec<f64>,
    /// `(k, Σ_{j<k} μ_j)` at each requested checkpoint `k` (1-based counts).
    pub prefix_sums: Vec<(u64, f64)>,
}

pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Geometrically thinned checkpoints in `1..=shots`, always including `shots`.
pub fn checkpoints(shots: u64) -> Vec<u64> {
    if shots <= MAX_SERIES_ROWS as u64 {
        return (1..=shots).collect();
    }
    let k = MAX_SERIES_ROWS - 1;
    let ln_t = (shots as f64).ln();
    let mut out: Vec<u64> = (0..k).map(|i| ((ln_t * i as f64 / (k - 1) as f64).exp().round() as u64).clamp(1, shots)).collect();
    out.push(shots);
    out.dedup();
    out
}

struct Chunk {
    sum: f64,
    max_abs: f64,
    values: Vec<f64>,
    partials: Vec<(u64, f64)>,
}

/// Runs `shots` independent shots of `shot`, rejecting any value with
/// magnitude above `bound`.
pub(crate) fn run_shots<F>(
    shots: u64,
    seed: SeedSpec,
    bound: f64,
    record: bool,
    checkpoints: &[u64],
    shot: F,
) -> Result<ShotSummary>
where
    F: Fn(&mut StreamRng) -> f64 + Sync,
{
    let n_chunks = shots.div_ceil(CHUNK);
    let chunks: Vec<Chunk> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(shots);
            let values: Vec<f64> = (start..end).map(|j| shot(&mut seed.child(j).rng())).collect();
            let lo = checkpoints.partition_point(|&k| k <= start);
            let hi = checkpoints.partition_point(|&k| k <= end);
            let mut partials = Vec::with_capacity(hi - lo);
            if hi > lo {
                let mut acc = 0.0;
                let mut next = lo;
                for (offset, v) in values.iter().enumerate() {
                    acc += v;
                    let count = start + offset as u64 + 1;
                    while next < hi && checkpoints[next] == count {
                        partials.push((count, acc));
                        next += 1;
                    }
                }
            }
            Chunk {
                sum: pairwise_sum(&values),
                max_abs: values.iter().fold(0.0f64, |m, v| m.max(v.abs())),
                values: if record { values } else { Vec::new() },
                partials,
            }
        })
        .collect();

    let max_abs = chunks.iter().fold(0.0f64, |m, c| m.max(c.max_abs));
    if max_abs > bound * (1.0 + 1e-12) {
        return Err(Error::contract(format!("shot outcome {max_abs} exceeds the range bound {bound}")));
    }

    let sums: Vec<f64> = chunks.iter().map(|c| c.sum).collect();
    let mut prefix_sums = Vec::with_capacity(checkpoints.len());
    let mut before = 0.0;
    for c in &chunks {
        prefix_sums.extend(c.partials.iter().map(|&(k, s)| (k, before + s)));
        before += c.sum;
    }
    let sum = pairwise_sum(&sums);
    // The final row reports the same total as the estimate.
    if let Some(last) = prefix_sums.last_mut().filter(|l| l.0 == shots) {
        last.1 = sum;
    }
    let per_shot = if record { chunks.into_iter().flat_map(|c| c.values).collect() } else { Vec::new() };
    Ok(ShotSummary { sum, per_shot, prefix_sums })
}

/// Per-outcome counts of `shots` categorical draws from `cumulative`.
pub(crate) fn count_outcomes(shots: u64, seed: SeedSpec, cumulative: &[f64]) -> Vec<u64> {
    let m = cumulative.len();
    let n_chunks = shots.div_ceil(CHUNK);
    let partial: Vec<Vec<u64>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; m];
            let start = c * CHUNK;
            for j in start..(start + CHUNK).min(shots) {
                counts[seed.child(j).rng().categorical(cumulative)] += 1;
            }
            counts
        })
        .collect();
    partial.into_iter().fold(vec![0u64; m], |mut acc, c| {
        acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        acc
    })
}
