use crate::qcore::{eig_hermitian, inner, ComplexMatrix, C64};
use crate::{Error, Result};

const TOL: f64 = 1e-10;

/// Projective measurement `{P_i}` with equal blocks of dimension `2^r` and an
/// explicit orthonormal basis for every block.
#[derive(Clone, Debug)]
pub struct MeasurementSetting {
    dim: usize,
    block_dim: usize,
    block_qubits: usize,
    bases: Vec<Vec<Vec<C64>>>,
    projectors: Vec<ComplexMatrix>,
}

impl MeasurementSetting {
    /// Builds the setting from ordered block bases `bases[i][b] = |ψ_i^(b)>`.
    pub fn new(bases: Vec<Vec<Vec<C64>>>) -> Result<Self> {
        let m = bases.len();
        if m == 0 {
            return Err(Error::arg("measurement needs at least one block"));
        }
        let block_dim = bases[0].len();
        if block_dim == 0 || !block_dim.is_power_of_two() {
            return Err(Error::dim(format!("block dimension {block_dim} is not a power of two")));
        }
        if bases.iter().any(|b| b.len() != block_dim) {
            return Err(Error::dim("all blocks must have the same dimension"));
        }
        let dim = m * block_dim;
        if bases.iter().flatten().any(|v| v.len() != dim) {
            return Err(Error::dim(format!("basis vectors must have length {dim}")));
        }
        let flat: Vec<&Vec<C64>> = bases.iter().flatten().collect();
        for (a, u) in flat.iter().enumerate() {
            for (b, v) in flat.iter().enumerate().skip(a) {
                let target = if a == b { 1.0 } else { 0.0 };
                let ip = inner(u, v);
                if (ip - C64::new(target, 0.0)).norm() > TOL {
                    return Err(Error::contract(format!("block basis vectors {a} and {b} are not orthonormal (overlap {ip})")));
                }
            }
        }
        let projectors = bases
            .iter()
            .map(|block| block.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, v| &acc + &ComplexMatrix::outer(v, v)))
            .collect();
        Ok(Self { dim, block_dim, block_qubits: block_dim.trailing_zeros() as usize, bases, projectors })
    }

    /// Builds the setting from projector matrices, taking each block basis
    /// from the unit-eigenvalue eigenvectors of `P_i`.
    pub fn from_projectors(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let m = projectors.len();
        if m == 0 {
            return Err(Error::arg("measurement needs at least one projector"));
        }
        let dim = projectors[0].rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        let mut bases = Vec::with_capacity(m);
        for (i, p) in projectors.iter().enumerate() {
            if p.rows() != dim || p.cols() != dim {
                return Err(Error::dim(format!("projector {i} is not {dim}x{dim}")));
            }
            if !p.is_hermitian(TOL) {
                return Err(Error::contract(format!("projector {i} is not Hermitian")));
            }
            if (p * p).max_abs_diff(p) > TOL {
                return Err(Error::contract(format!("projector {i} is not idempotent")));
            }
            let rank = p.trace().re.round() as usize;
            let eig = eig_hermitian(p)?;
            bases.push((dim - rank..dim).map(|k| eig.vector(k)).collect());
            sum = &sum + p;
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(dim)) > TOL {
            return Err(Error::contract("projectors do not sum to the identity"));
        }
        Self::new(bases)
    }

    /// `|x><x| ⊗ I` over all bit strings `x` of the first `prefix_qubits` of an
    /// `n`-qubit register; block `i` is labelled by the integer `x = i` and its
    /// basis is `|x>|b>` in computational order.
    pub fn computational_prefix(n: usize, prefix_qubits: usize) -> Result<Self> {
        if prefix_qubits == 0 || prefix_qubits > n || n > 16 {
            return Err(Error::dim(format!("cannot measure {prefix_qubits} leading qubits of {n}")));
        }
        let dim = 1usize << n;
        let block_dim = 1usize << (n - prefix_qubits);
        let bases = (0..1usize << prefix_qubits)
            .map(|x| {
                (0..block_dim)
                    .map(|b| {
                        let mut v = vec![C64::new(0.0, 0.0); dim];
                        v[x * block_dim + b] = C64::new(1.0, 0.0);
                        v
                    })
                    .collect()
            })
            .collect();
        Self::new(bases)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_blocks(&self) -> usize {
        self.bases.len()
    }

    /// `2^r`.
    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    /// `r = log₂(N/M)`.
    pub fn block_qubits(&self) -> usize {
        self.block_qubits
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn block_basis(&self, i: usize) -> &[Vec<C64>] {
        &self.bases[i]
    }

    /// `Σ_i Σ_{b,b'} (u_i)_{b b'} |ψ_i^(b)><ψ_i^(b')|`: the direct sum of the
    /// given block operators written in the block bases.
    pub fn embed_blocks(&self, blocks: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
        if blocks.len() != self.num_blocks() {
            return Err(Error::dim("one operator per block is required"));
        }
        let d = self.block_dim;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (i, u) in blocks.iter().enumerate() {
            if u.rows() != d || u.cols() != d {
                return Err(Error::dim(format!("block operator {i} must be {d}x{d}")));
            }
            let basis = &self.bases[i];
            for b in 0..d {
                for bp in 0..d {
                    let c = u[(b, bp)];
                    if c == C64::new(0.0, 0.0) {
                        continue;
                    }
                    out = &out + &ComplexMatrix::outer(&basis[b], &basis[bp]).scale(c);
                }
            }
        }
        Ok(out)
    }

    /// `I_M ⊗ u`: the same block operator on every block.
    pub fn embed_uniform(&self, u: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.embed_blocks(&vec![u; self.num_blocks()])
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(Error::dim(format!("measurement acts on dimension {} but operand has {dim}", self.dim)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_setting_projectors() {
        let ms = MeasurementSetting::computational_prefix(3, 2).unwrap();
        assert_eq!(ms.num_blocks(), 4);
        assert_eq!(ms.block_dim(), 2);
        assert_eq!(ms.block_qubits(), 1);
        let mut diag = vec![0.0; 8];
        diag[6] = 1.0;
        diag[7] = 1.0;
        assert!(ms.projectors()[3].max_abs_diff(&ComplexMatrix::from_diagonal(&diag)) < 1e-15);
    }

    #[test]
    fn from_projectors_recovers_blocks() {
        let ms = MeasurementSetting::computational_prefix(3, 1).unwrap();
        let again = MeasurementSetting::from_projectors(ms.projectors().to_vec()).unwrap();
        for (p, q) in ms.projectors().iter().zip(again.projectors()) {
            assert!(p.max_abs_diff(q) < 1e-10);
        }
    }

    #[test]
    fn rejects_unequal_or_incomplete_blocks() {
        let p0 = ComplexMatrix::from_diagonal(&[1.0, 0.0, 0.0, 0.0]);
        let p1 = ComplexMatrix::from_diagonal(&[0.0, 1.0, 1.0, 1.0]);
        assert!(MeasurementSetting::from_projectors(vec![p0.clone(), p1]).is_err());
        let p2 = ComplexMatrix::from_diagonal(&[0.0, 1.0, 0.0, 0.0]);
        assert!(MeasurementSetting::from_projectors(vec![p0, p2]).is_err());
    }

    #[test]
    fn uniform_embedding_of_identity_is_identity() {
        let ms = MeasurementSetting::computational_prefix(3, 1).unwrap();
        let e = ms.embed_uniform(&ComplexMatrix::identity(4)).unwrap();
        assert!(e.max_abs_diff(&ComplexMatrix::identity(8)) < 1e-15);
    }
}
