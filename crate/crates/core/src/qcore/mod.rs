//! Dense linear algebra and quantum-state primitives.

mod density;
mod eig;
mod hamiltonian;
mod matrix;
mod pauli;

pub use density::{expectation, partial_trace_b, DensityMatrix};
pub use eig::{eig_hermitian, HermitianEigen};
pub use hamiltonian::{build_heisenberg_xxx, build_number_hamiltonian, EnergyLevel, HamiltonianSpec, PauliTerm};
pub use matrix::{inner, norm, ComplexMatrix, C64, ONE, ZERO};
pub use pauli::PauliString;
