//! Precomputed outcome tables for the three work-extraction protocols.
//!
//! Every branch of a shot (coin, block outcome, Pauli choice, ...) leads to a
//! fixed distribution over measurement outcomes. Tabulating those once keeps a
//! shot to a handful of random draws.

use crate::ergodyn::MeasurementSetting;
use crate::qcore::{ComplexMatrix, DensityMatrix, HamiltonianSpec, PauliString};
use crate::randomness::{cumulative, StreamRng};
use crate::{Error, Result};

/// Largest number of tabulated branches before a run is refused.
pub const MAX_TABLE_BRANCHES: usize = 1 << 18;

/// Blocks with probability below this are never collapsed onto.
const EMPTY_BLOCK: f64 = 1e-15;

/// `Re Tr[Q_a σ]` for every distinct level `a` of `h`.
pub(crate) fn level_weights(h: &HamiltonianSpec, sigma: &ComplexMatrix) -> Result<Vec<f64>> {
    h.levels().iter().map(|l| Ok(l.projector.trace_product(sigma)?.re)).collect()
}

fn pauli_count(ms: &MeasurementSetting) -> usize {
    1usize << (2 * ms.block_qubits())
}

/// `I_M ⊗ B_ℓ` for every `r`-qubit Pauli string `B_ℓ`, in enumeration order.
/// A block dimension of one has the single trivial "string".
fn block_paulis(ms: &MeasurementSetting) -> Result<Vec<ComplexMatrix>> {
    let r = ms.block_qubits();
    if r == 0 {
        return Ok(vec![ComplexMatrix::identity(ms.dim())]);
    }
    PauliString::all(r).map(|p| ms.embed_uniform(&p.to_matrix())).collect()
}

/// Collapsed states `P_i ρ P_i / p_i` (or `None` for empty blocks) and the
/// cumulative block distribution.
fn collapsed_blocks(rho: &DensityMatrix, ms: &MeasurementSetting) -> Result<(Vec<Option<ComplexMatrix>>, Vec<f64>)> {
    let mut states = Vec::with_capacity(ms.num_blocks());
    let mut weights = Vec::with_capacity(ms.num_blocks());
    for p in ms.projectors() {
        let block = &(p * rho.matrix()) * p;
        let w = block.trace().re;
        if w > EMPTY_BLOCK {
            states.push(Some(block.scale_real(1.0 / w)));
            weights.push(w);
        } else {
            states.push(None);
            weights.push(0.0);
        }
    }
    Ok((states, cumulative(&weights)))
}

/// Probabilities implied by a cumulative table as [`StreamRng::categorical`] reads it.
fn probabilities(cum: &[f64]) -> Vec<f64> {
    let total = cum.last().copied().unwrap_or(0.0);
    let mut prev = 0.0;
    cum.iter()
        .map(|&c| {
            let p = (c - prev) / total;
            prev = c;
            p
        })
        .collect()
}

fn check_branches(count: usize) -> Result<()> {
    if count > MAX_TABLE_BRANCHES {
        return Err(Error::Configuration(format!("{count} protocol branches exceed the tabulation limit {MAX_TABLE_BRANCHES}")));
    }
    Ok(())
}

/// Protocol 1: coin, energy measurement on ρ or on a twirled collapsed block.
pub(crate) struct Protocol1Sampler {
    energies: Vec<f64>,
    heads: Vec<f64>,
    blocks: Vec<f64>,
    paulis: u64,
    tails: Vec<Vec<f64>>,
}

impl Protocol1Sampler {
    pub fn new(rho: &DensityMatrix, h: &HamiltonianSpec, ms: &MeasurementSetting, u_gl: &ComplexMatrix) -> Result<Self> {
        let l = pauli_count(ms);
        check_branches(ms.num_blocks() * l)?;
        let energies = h.levels().iter().map(|l| l.energy).collect();
        let heads = cumulative(&level_weights(h, rho.matrix())?);
        let (states, blocks) = collapsed_blocks(rho, ms)?;
        let twirls: Vec<ComplexMatrix> = block_paulis(ms)?.iter().map(|b| u_gl * b).collect();
        let mut tails = Vec::with_capacity(states.len() * l);
        for state in &states {
            for x in &twirls {
                tails.push(match state {
                    Some(s) => cumulative(&level_weights(h, &s.conjugate_by(x)?)?),
                    None => Vec::new(),
                });
            }
        }
        Ok(Self { energies, heads, blocks, paulis: l as u64, tails })
    }

    #[inline]
    pub fn shot(&self, rng: &mut StreamRng) -> f64 {
        if rng.coin() {
            self.energies[rng.categorical(&self.heads)]
        } else {
            let i = rng.categorical(&self.blocks);
            let l = rng.below(self.paulis) as usize;
            let table = &self.tails[i * self.paulis as usize + l];
            -self.energies[rng.categorical(table)]
        }
    }

    pub fn distribution(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> =
            probabilities(&self.heads).into_iter().zip(&self.energies).map(|(q, &e)| (e, 0.5 * q)).collect();
        let l = self.paulis as usize;
        for (i, w) in probabilities(&self.blocks).into_iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for table in &self.tails[i * l..(i + 1) * l] {
                for (t, &e) in probabilities(table).into_iter().zip(&self.energies) {
                    out.push((-e, 0.5 * w * t / l as f64));
                }
            }
        }
        out
    }
}

/// Protocol 2: like Protocol 1, with each energy measurement replaced by a
/// single sampled Pauli term measured as `±1`.
pub(crate) struct Protocol2Sampler {
    signs: Vec<f64>,
    terms: Vec<f64>,
    heads: Vec<f64>,
    blocks: Vec<f64>,
    paulis: u64,
    /// `tails[(i·L + ℓ)·K + j] = Tr[Λ_j σ_{iℓ}]`.
    tails: Vec<f64>,
    pub weight: f64,
}

impl Protocol2Sampler {
    pub fn new(rho: &DensityMatrix, h: &HamiltonianSpec, ms: &MeasurementSetting, u_gl: &ComplexMatrix) -> Result<Self> {
        let all_terms =
            h.pauli_terms().ok_or_else(|| Error::Configuration("Protocol 2 needs a Hamiltonian given as a Pauli sum".into()))?;
        let terms: Vec<_> = all_terms.iter().filter(|t| t.coefficient != 0.0).collect();
        if terms.is_empty() {
            return Err(Error::Configuration("all Pauli coefficients are zero".into()));
        }
        let l = pauli_count(ms);
        check_branches(ms.num_blocks() * l * terms.len())?;
        let weight: f64 = terms.iter().map(|t| t.coefficient.abs()).sum();
        let lambdas: Vec<ComplexMatrix> = terms.iter().map(|t| t.pauli.to_matrix()).collect();
        let expect = |sigma: &ComplexMatrix| -> Result<Vec<f64>> {
            lambdas.iter().map(|lam| Ok(lam.trace_product(sigma)?.re.clamp(-1.0, 1.0))).collect()
        };
        let heads = expect(rho.matrix())?;
        let (states, blocks) = collapsed_blocks(rho, ms)?;
        let twirls: Vec<ComplexMatrix> = block_paulis(ms)?.iter().map(|b| u_gl * b).collect();
        let mut tails = Vec::with_capacity(states.len() * l * terms.len());
        for state in &states {
            for x in &twirls {
                match state {
                    Some(s) => tails.extend(expect(&s.conjugate_by(x)?)?),
                    None => tails.extend(std::iter::repeat(0.0).take(terms.len())),
                }
            }
        }
        Ok(Self {
            signs: terms.iter().map(|t| t.coefficient.signum()).collect(),
            terms: cumulative(&terms.iter().map(|t| t.coefficient.abs()).collect::<Vec<_>>()),
            heads,
            blocks,
            paulis: l as u64,
            tails,
            weight,
        })
    }

    #[inline]
    pub fn shot(&self, rng: &mut StreamRng) -> f64 {
        let k = self.signs.len();
        let heads = rng.coin();
        let e = if heads {
            let j = rng.categorical(&self.terms);
            (j, self.heads[j])
        } else {
            let i = rng.categorical(&self.blocks);
            let l = rng.below(self.paulis) as usize;
            let j = rng.categorical(&self.terms);
            (j, self.tails[(i * self.paulis as usize + l) * k + j])
        };
        let (j, expectation) = e;
        let outcome = if rng.uniform() < 0.5 * (1.0 + expectation) { 1.0 } else { -1.0 };
        let value = self.signs[j] * outcome;
        if heads {
            value
        } else {
            -value
        }
    }

    pub fn distribution(&self) -> Vec<(f64, f64)> {
        let k = self.signs.len();
        let l = self.paulis as usize;
        let terms = probabilities(&self.terms);
        let mut out = Vec::new();
        let mut push = |branch: f64, sign: f64, weight: f64, e: f64| {
            let up = (0.5 * (1.0 + e)).clamp(0.0, 1.0);
            out.push((branch * sign, weight * up));
            out.push((-branch * sign, weight * (1.0 - up)));
        };
        for ((&s, &t), &e) in self.signs.iter().zip(terms.iter()).zip(&self.heads) {
            push(1.0, s, 0.5 * t, e);
        }
        for (i, w) in probabilities(&self.blocks).into_iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for ell in 0..l {
                let row = &self.tails[(i * l + ell) * k..(i * l + ell + 1) * k];
                for ((&s, &t), &e) in self.signs.iter().zip(terms.iter()).zip(row) {
                    push(-1.0, s, 0.5 * w * t / l as f64, e);
                }
            }
        }
        out
    }
}

/// Protocol 3: single-ancilla implementation of the block-random unitary as a
/// uniform mixture over `2M` Pauli-built unitaries.
pub(crate) struct Protocol3Sampler {
    energies: Vec<f64>,
    heads: Vec<f64>,
    blocks: usize,
    paulis: u64,
    /// Indexed by `k₁·K + k₂`; outcome `2a` is `r = +1`, `2a + 1` is `r = −1`.
    pairs: Vec<Vec<f64>>,
    scale: f64,
}

impl Protocol3Sampler {
    pub fn new(rho: &DensityMatrix, h: &HamiltonianSpec, ms: &MeasurementSetting, u_gl: &ComplexMatrix) -> Result<Self> {
        let m = ms.num_blocks();
        let l = pauli_count(ms);
        let keys = 2 * m * l;
        check_branches(keys * keys)?;
        let energies: Vec<f64> = h.levels().iter().map(|l| l.energy).collect();
        let heads = cumulative(&level_weights(h, rho.matrix())?);

        let r = ms.block_qubits();
        let block_ops: Vec<ComplexMatrix> =
            if r == 0 { vec![ComplexMatrix::identity(1)] } else { PauliString::all(r).map(|p| p.to_matrix()).collect() };
        // X_k = U_gl W_k with k = j·L + ℓ.
        let mut xs = Vec::with_capacity(keys);
        for j in 0..2 * m {
            for op in &block_ops {
                let neg = op.scale_real(-1.0);
                let per_block: Vec<&ComplexMatrix> = (0..m).map(|b| if j < m || b + m == j { op } else { &neg }).collect();
                xs.push(u_gl * &ms.embed_blocks(&per_block)?);
            }
        }
        let ys: Vec<ComplexMatrix> = xs.iter().map(|x| x * rho.matrix()).collect();
        let xs_adj: Vec<ComplexMatrix> = xs.iter().map(|x| x.adjoint()).collect();
        let diag: Vec<Vec<f64>> = ys.iter().zip(&xs_adj).map(|(y, xa)| level_weights(h, &(y * xa))).collect::<Result<_>>()?;

        let mut pairs = vec![Vec::new(); keys * keys];
        for k1 in 0..keys {
            for k2 in k1..keys {
                let cross = level_weights(h, &(&ys[k1] * &xs_adj[k2]))?;
                let mut w = Vec::with_capacity(2 * energies.len());
                for a in 0..energies.len() {
                    let base = diag[k1][a] + diag[k2][a];
                    w.push(0.25 * (base + 2.0 * cross[a]));
                    w.push(0.25 * (base - 2.0 * cross[a]));
                }
                let cum = cumulative(&w);
                pairs[k2 * keys + k1] = cum.clone();
                pairs[k1 * keys + k2] = cum;
            }
        }
        Ok(Self { energies, heads, blocks: m, paulis: l as u64, pairs, scale: (m * m) as f64 })
    }

    #[inline]
    pub fn shot(&self, rng: &mut StreamRng) -> f64 {
        if rng.coin() {
            return self.energies[rng.categorical(&self.heads)];
        }
        let m = self.blocks;
        let l = self.paulis as usize;
        let mut chosen = [0usize; 64];
        let mut heap = Vec::new();
        let choice: &mut [usize] = if m <= 64 {
            &mut chosen[..m]
        } else {
            heap.resize(m, 0);
            &mut heap
        };
        for c in choice.iter_mut() {
            *c = rng.below(self.paulis) as usize;
        }
        let j1 = rng.below(2 * m as u64) as usize;
        let j2 = rng.below(2 * m as u64) as usize;
        let k1 = j1 * l + choice[j1 % m];
        let k2 = j2 * l + choice[j2 % m];
        let keys = 2 * m * l;
        let outcome = rng.categorical(&self.pairs[k1 * keys + k2]);
        let r = if outcome % 2 == 0 { 1.0 } else { -1.0 };
        -self.scale * r * self.energies[outcome / 2]
    }

    /// Exact outcome distribution. Both draws of a pair share the block Pauli
    /// when they address the same block index, and are independent otherwise.
    pub fn distribution(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> =
            probabilities(&self.heads).into_iter().zip(&self.energies).map(|(q, &e)| (e, 0.5 * q)).collect();
        let m = self.blocks;
        let l = self.paulis as usize;
        let keys = 2 * m * l;
        let pair_weight = 0.5 / (4 * m * m) as f64;
        let mut emit = |k1: usize, k2: usize, w: f64| {
            for (o, p) in probabilities(&self.pairs[k1 * keys + k2]).into_iter().enumerate() {
                let r = if o % 2 == 0 { 1.0 } else { -1.0 };
                out.push((-self.scale * r * self.energies[o / 2], w * p));
            }
        };
        for j1 in 0..2 * m {
            for j2 in 0..2 * m {
                if j1 % m == j2 % m {
                    for ell in 0..l {
                        emit(j1 * l + ell, j2 * l + ell, pair_weight / l as f64);
                    }
                } else {
                    for l1 in 0..l {
                        for l2 in 0..l {
                            emit(j1 * l + l1, j2 * l + l2, pair_weight / (l * l) as f64);
                        }
                    }
                }
            }
        }
        out
    }
}
