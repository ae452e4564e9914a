#![allow(dead_code)]

use ergolab_core::ergodyn::MeasurementSetting;
use ergolab_core::qcore::{ComplexMatrix, DensityMatrix, C64};

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Computational basis vector `|k>` of dimension `dim`.
pub fn ket(dim: usize, k: usize) -> Vec<C64> {
    let mut v = vec![c(0.0); dim];
    v[k] = c(1.0);
    v
}

/// `|bits>` with qubit 0 written first.
pub fn ket_bits(bits: &str) -> Vec<C64> {
    ket(1 << bits.len(), usize::from_str_radix(bits, 2).unwrap())
}

pub fn combo(terms: &[(f64, &[C64])]) -> Vec<C64> {
    let n = terms[0].1.len();
    let mut out = vec![c(0.0); n];
    for (w, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += x * *w;
        }
    }
    out
}

/// `φ_1 … φ_8` of the three-qubit example, ordered by energy.
pub fn phi8() -> Vec<Vec<C64>> {
    ["000", "001", "010", "100", "011", "101", "110", "111"].iter().map(|b| ket_bits(b)).collect()
}

/// `ρ = (ρ₁ + ρ₂ + ρ₃)/3` of the three-qubit example.
pub fn appendix_d_rho() -> DensityMatrix {
    let phi = phi8();
    let mut m = ComplexMatrix::zeros(8, 8);
    for i in 0..3 {
        for j in 0..3 {
            m = &m + &ComplexMatrix::outer(&phi[i], &phi[j]).scale_real(1.0 / 9.0);
        }
    }
    for i in 3..6 {
        for j in 3..6 {
            // One-based indices run 4..6, so the sign is (−1)^{(i+1)+(j+1)}.
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            m = &m + &ComplexMatrix::outer(&phi[i], &phi[j]).scale_real(sign / 9.0);
        }
    }
    for p in &phi[6..] {
        m = &m + &ComplexMatrix::outer(p, p).scale_real(1.0 / 6.0);
    }
    DensityMatrix::new(m).unwrap()
}

/// Bell-pair blocks `ψ_i^(b)` of the entangled-basis example.
pub fn appendix_d_entangled() -> MeasurementSetting {
    let phi = phi8();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let pair = |a: usize, b: usize, sign: f64| combo(&[(s, &phi[a]), (sign * s, &phi[b])]);
    MeasurementSetting::new(vec![
        vec![pair(0, 6, 1.0), pair(1, 7, 1.0)],
        vec![pair(0, 6, -1.0), pair(1, 7, -1.0)],
        vec![pair(2, 3, 1.0), pair(4, 5, 1.0)],
        vec![pair(2, 3, -1.0), pair(4, 5, -1.0)],
    ])
    .unwrap()
}

/// `|x><x| ⊗ I` on the leading `prefix` qubits of `n`, built from projectors.
pub fn prefix_projectors(n: usize, prefix: usize) -> MeasurementSetting {
    let dim = 1 << n;
    let block = 1 << (n - prefix);
    let projectors = (0..1 << prefix)
        .map(|x| {
            let diag: Vec<f64> = (0..dim).map(|k| if k / block == x { 1.0 } else { 0.0 }).collect();
            ComplexMatrix::from_diagonal(&diag)
        })
        .collect();
    MeasurementSetting::from_projectors(projectors).unwrap()
}

/// `|11><11| ⊗ I/4 + |ψ><ψ|/2` with `ψ = (−|011> + |100> + |101>)/√3`.
pub fn fig2_rho() -> DensityMatrix {
    let s = 1.0 / 3f64.sqrt();
    let psi = combo(&[(-s, &ket_bits("011")), (s, &ket_bits("100")), (s, &ket_bits("101"))]);
    let mut m = ComplexMatrix::outer(&psi, &psi).scale_real(0.5);
    for b in ["110", "111"] {
        let v = ket_bits(b);
        m = &m + &ComplexMatrix::outer(&v, &v).scale_real(0.25);
    }
    DensityMatrix::new(m).unwrap()
}

/// `η₄ = |0010><0010|/4 + |0111><0111|/4 + |φ₃><φ₃|/2`.
pub fn eta4() -> DensityMatrix {
    let phi3 = combo(&[(0.5, &ket_bits("0000")), (0.5, &ket_bits("0001")), (0.5, &ket_bits("1110")), (0.5, &ket_bits("1111"))]);
    let mut m = ComplexMatrix::outer(&phi3, &phi3).scale_real(0.5);
    for b in ["0010", "0111"] {
        let v = ket_bits(b);
        m = &m + &ComplexMatrix::outer(&v, &v).scale_real(0.25);
    }
    DensityMatrix::new(m).unwrap()
}

/// `Tr[Hρ]` by explicit summation.
pub fn energy(h: &ComplexMatrix, rho: &ComplexMatrix) -> f64 {
    let n = h.rows();
    let mut acc = c(0.0);
    for i in 0..n {
        for j in 0..n {
            acc += h[(i, j)] * rho[(j, i)];
        }
    }
    acc.re
}
