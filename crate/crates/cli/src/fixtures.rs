//! Named states and measurements from the worked examples.

use ergolab_core::ergodyn::MeasurementSetting;
use ergolab_core::qcore::{ComplexMatrix, DensityMatrix, C64};
use ergolab_core::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureKind {
    State,
    Measurement,
}

#[derive(Clone, Copy, Debug)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub kind: FixtureKind,
    /// Where the object appears in the worked examples.
    pub source: &'static str,
    pub summary: &'static str,
}

pub const FIXTURES: &[FixtureInfo] = &[
    FixtureInfo {
        name: "appendixD_rho",
        kind: FixtureKind::State,
        source: "Appendix D",
        summary: "three-qubit mixture (ρ₁+ρ₂+ρ₃)/3 with energy 29/18 under the excitation-number Hamiltonian",
    },
    FixtureInfo {
        name: "fig2_rho",
        kind: FixtureKind::State,
        source: "Appendix E, Fig. 2",
        summary: "three-qubit state |11><11|⊗I/4 + |ψ><ψ|/2, ψ = (−|011> + |100> + |101>)/√3",
    },
    FixtureInfo {
        name: "eta4",
        kind: FixtureKind::State,
        source: "Appendix E",
        summary: "four-qubit state η₄ = |φ₁><φ₁|/4 + |φ₂><φ₂|/4 + |φ₃><φ₃|/2",
    },
    FixtureInfo {
        name: "appendixD_entangled",
        kind: FixtureKind::Measurement,
        source: "Appendix D.1",
        summary: "four rank-2 blocks spanned by Bell-type pairs of three-qubit basis states",
    },
    FixtureInfo {
        name: "appendixD_product",
        kind: FixtureKind::Measurement,
        source: "Appendix D.2",
        summary: "|xx><xx| ⊗ I₂ on three qubits (product basis)",
    },
    FixtureInfo {
        name: "two_qubit_blocks",
        kind: FixtureKind::Measurement,
        source: "Appendix E",
        summary: "|xx><xx| ⊗ I on the leading two qubits of an n-qubit register, n ≥ 2",
    },
];

pub fn lookup(name: &str) -> Option<&'static FixtureInfo> {
    FIXTURES.iter().find(|f| f.name == name)
}

/// One line per fixture: name, kind, source and summary.
pub fn catalog() -> String {
    let mut out = String::new();
    for f in FIXTURES {
        let kind = match f.kind {
            FixtureKind::State => "state",
            FixtureKind::Measurement => "measurement",
        };
        out.push_str(&format!("{:<20} {:<12} [{}] {}\n", f.name, kind, f.source, f.summary));
    }
    out
}

fn ket(bits: &str) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 1 << bits.len()];
    v[usize::from_str_radix(bits, 2).expect("binary label")] = C64::new(1.0, 0.0);
    v
}

fn combo(terms: &[(f64, &str)]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); 1 << terms[0].1.len()];
    for (w, bits) in terms {
        for (o, x) in out.iter_mut().zip(ket(bits)) {
            *o += x * *w;
        }
    }
    out
}

fn projector_sum(parts: &[(f64, Vec<C64>)]) -> ComplexMatrix {
    let n = parts[0].1.len();
    parts.iter().fold(ComplexMatrix::zeros(n, n), |acc, (w, v)| &acc + &ComplexMatrix::outer(v, v).scale_real(*w))
}

/// Three-qubit basis in energy order: 000, 001, 010, 100, 011, 101, 110, 111.
const PHI8: [&str; 8] = ["000", "001", "010", "100", "011", "101", "110", "111"];

fn appendix_d_rho() -> Result<DensityMatrix> {
    let phi: Vec<Vec<C64>> = PHI8.iter().map(|b| ket(b)).collect();
    let mut m = ComplexMatrix::zeros(8, 8);
    for i in 0..3 {
        for j in 0..3 {
            m = &m + &ComplexMatrix::outer(&phi[i], &phi[j]).scale_real(1.0 / 9.0);
        }
    }
    for i in 3..6 {
        for j in 3..6 {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            m = &m + &ComplexMatrix::outer(&phi[i], &phi[j]).scale_real(sign / 9.0);
        }
    }
    for p in &phi[6..] {
        m = &m + &ComplexMatrix::outer(p, p).scale_real(1.0 / 6.0);
    }
    DensityMatrix::new(m)
}

fn fig2_rho() -> Result<DensityMatrix> {
    let s = 1.0 / 3f64.sqrt();
    let psi = combo(&[(-s, "011"), (s, "100"), (s, "101")]);
    DensityMatrix::new(projector_sum(&[(0.5, psi), (0.25, ket("110")), (0.25, ket("111"))]))
}

fn eta4() -> Result<DensityMatrix> {
    let phi3 = combo(&[(0.5, "0000"), (0.5, "0001"), (0.5, "1110"), (0.5, "1111")]);
    DensityMatrix::new(projector_sum(&[(0.25, ket("0010")), (0.25, ket("0111")), (0.5, phi3)]))
}

fn appendix_d_entangled() -> Result<MeasurementSetting> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let pair = |a: usize, b: usize, sign: f64| combo(&[(s, PHI8[a]), (sign * s, PHI8[b])]);
    MeasurementSetting::new(vec![
        vec![pair(0, 6, 1.0), pair(1, 7, 1.0)],
        vec![pair(0, 6, -1.0), pair(1, 7, -1.0)],
        vec![pair(2, 3, 1.0), pair(4, 5, 1.0)],
        vec![pair(2, 3, -1.0), pair(4, 5, -1.0)],
    ])
}

/// Builds a state fixture, or `None` for an unknown name.
pub fn state(name: &str) -> Option<Result<DensityMatrix>> {
    Some(match name {
        "appendixD_rho" => appendix_d_rho(),
        "fig2_rho" => fig2_rho(),
        "eta4" => eta4(),
        _ => return None,
    })
}

/// Builds a measurement fixture for a `dim`-dimensional system, or `None`
/// for an unknown name.
pub fn measurement(name: &str, dim: usize) -> Option<Result<MeasurementSetting>> {
    Some(match name {
        "appendixD_entangled" => appendix_d_entangled(),
        "appendixD_product" => MeasurementSetting::computational_prefix(3, 2),
        "two_qubit_blocks" => {
            if !dim.is_power_of_two() || dim < 4 {
                return Some(Err(ergolab_core::Error::InvalidDimension(format!(
                    "two_qubit_blocks needs at least two qubits, got dimension {dim}"
                ))));
            }
            MeasurementSetting::computational_prefix(dim.trailing_zeros() as usize, 2)
        }
        _ => return None,
    })
}

/// Natural system dimension of a fixture, if fixed.
pub fn natural_dim(name: &str) -> Option<usize> {
    match name {
        "appendixD_rho" | "fig2_rho" | "appendixD_entangled" | "appendixD_product" => Some(8),
        "eta4" => Some(16),
        _ => None,
    }
}
