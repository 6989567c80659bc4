//! Dense complex matrices and the spectral primitives every other module uses.
//!
//! Kronecker products always carry the outer index on the left factor:
//! block `(i, j)` of `kron(a, b)` is `a[i, j] * b`.

mod eig;
mod matrix;
pub mod random;

pub use eig::{
    hermitian_eig, hpd_inverse, inverse_sqrt, normalize_phase, operator_norm, partial_trace_outer, psd_project,
    solve_real, symmetric_eigenvalues, top_singular_pair, HermitianEig, HERMITIAN_TOL, MAX_SWEEPS, OFF_DIAGONAL_TOL,
};
pub use matrix::{pauli, CMatrix, C64, I, ONE, ZERO};
