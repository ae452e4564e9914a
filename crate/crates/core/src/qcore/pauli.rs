use std::fmt;
use std::str::FromStr;

use super::matrix::{ComplexMatrix, C64};
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 64;

/// Unphased n-qubit Pauli operator in symplectic form.
///
/// Qubit 0 is the leftmost tensor factor and the most significant bit of a
/// computational-basis index, so qubit `j` maps to bit `n − 1 − j` of both
/// masks. A position with both bits set is `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x_bits: u64,
    z_bits: u64,
}

impl PauliString {
    pub fn new(n: usize, x_bits: u64, z_bits: u64) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::dim(format!("Pauli strings support 1..={MAX_QUBITS} qubits, got {n}")));
        }
        let mask = low_mask(n);
        if x_bits & !mask != 0 || z_bits & !mask != 0 {
            return Err(Error::arg(format!("bitmask exceeds {n} qubits")));
        }
        Ok(Self { n, x_bits, z_bits })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0, 0)
    }

    /// The `index`-th string in the enumeration used by [`PauliString::all`]:
    /// the low `n` bits are the X mask, the next `n` bits the Z mask.
    pub fn from_index(n: usize, index: u128) -> Result<Self> {
        if n == 0 || n > 32 {
            return Err(Error::dim(format!("indexed enumeration supports 1..=32 qubits, got {n}")));
        }
        if index >> (2 * n) != 0 {
            return Err(Error::arg("Pauli index out of range"));
        }
        let mask = low_mask(n) as u128;
        Self::new(n, (index & mask) as u64, ((index >> n) & mask) as u64)
    }

    /// All `4ⁿ` unphased strings.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        assert!((1..=16).contains(&n), "enumeration is only practical for small n");
        (0..(1u128 << (2 * n))).map(move |i| Self::from_index(n, i).expect("in range"))
    }

    /// Single-qubit operator `op` (one of `I X Y Z`) at `qubit`.
    pub fn single(n: usize, qubit: usize, op: char) -> Result<Self> {
        if qubit >= n {
            return Err(Error::arg(format!("qubit {qubit} out of range for {n} qubits")));
        }
        let (x, z) = letter_bits(op)?;
        let bit = 1u64 << (n - 1 - qubit);
        Self::new(n, if x { bit } else { 0 }, if z { bit } else { 0 })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x_bits
    }

    pub fn z_bits(&self) -> u64 {
        self.z_bits
    }

    pub fn weight(&self) -> u32 {
        (self.x_bits | self.z_bits).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x_bits == 0 && self.z_bits == 0
    }

    /// Product up to phase.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::dim("Pauli strings on different qubit counts"));
        }
        Self::new(self.n, self.x_bits ^ other.x_bits, self.z_bits ^ other.z_bits)
    }

    /// Symplectic form `x·z′ + z·x′ mod 2`; zero iff the strings commute.
    pub fn symplectic_product(&self, other: &Self) -> u32 {
        ((self.x_bits & other.z_bits).count_ones() + (self.z_bits & other.x_bits).count_ones()) % 2
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.symplectic_product(other) == 0
    }

    /// Action on a basis state: `P|k> = phase · |k ⊕ x>` with
    /// `phase = i^{|x∧z|} (−1)^{|k∧z|}`.
    pub fn act_on_basis(&self, k: u64) -> (u64, C64) {
        let y_count = (self.x_bits & self.z_bits).count_ones();
        let sign = if (k & self.z_bits).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        let phase = match y_count % 4 {
            0 => C64::new(sign, 0.0),
            1 => C64::new(0.0, sign),
            2 => C64::new(-sign, 0.0),
            _ => C64::new(0.0, -sign),
        };
        (k ^ self.x_bits, phase)
    }

    /// Dense `2ⁿ × 2ⁿ` expansion (Hermitian, with `Y = [[0, −i], [i, 0]]`).
    pub fn to_matrix(&self) -> ComplexMatrix {
        assert!(self.n <= 16, "dense expansion limited to 16 qubits");
        let dim = 1usize << self.n;
        let mut m = ComplexMatrix::zeros(dim, dim);
        for k in 0..dim as u64 {
            let (row, phase) = self.act_on_basis(k);
            m[(row as usize, k as usize)] = phase;
        }
        m
    }

    /// `P v`.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != 1usize << self.n {
            return Err(Error::dim("vector length does not match Pauli string"));
        }
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (k, &a) in v.iter().enumerate() {
            let (row, phase) = self.act_on_basis(k as u64);
            out[row as usize] = phase * a;
        }
        Ok(out)
    }

    pub fn label(&self) -> String {
        (0..self.n)
            .map(|q| {
                let bit = 1u64 << (self.n - 1 - q);
                match (self.x_bits & bit != 0, self.z_bits & bit != 0) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (true, true) => 'Y',
                    (false, true) => 'Z',
                }
            })
            .collect()
    }
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn letter_bits(c: char) -> Result<(bool, bool)> {
    match c {
        'I' | 'i' => Ok((false, false)),
        'X' | 'x' => Ok((true, false)),
        'Y' | 'y' => Ok((true, true)),
        'Z' | 'z' => Ok((false, true)),
        other => Err(Error::arg(format!("invalid Pauli letter {other:?}"))),
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses labels such as `"XIZ"`; letters are case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::arg(format!("Pauli label must have 1..={MAX_QUBITS} letters")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in s.chars().enumerate() {
            let (xb, zb) = letter_bits(c)?;
            let bit = 1u64 << (n - 1 - q);
            if xb {
                x |= bit;
            }
            if zb {
                z |= bit;
            }
        }
        Self::new(n, x, z)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
