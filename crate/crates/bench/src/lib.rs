//! Fixtures shared by the benchmarks.

use matlip::linalg::pauli;
use matlip::{FiniteGroup, MatrixState, Seminorm};

/// Two-point spectral triple with `D = σ_x`.
pub fn two_point() -> Seminorm {
    Seminorm::commutator(&matlip::OperatorSystem::two_point(), pauli::x()).unwrap()
}

/// Translation seminorm of `Z_m` with the word length over `{1}`.
pub fn cyclic(m: usize) -> Seminorm {
    let g = FiniteGroup::cyclic(m);
    let len = g.word_length(&[1]);
    Seminorm::translation(g, len).unwrap()
}

/// A seeded pair of random states at level `n`.
pub fn state_pair(l: &Seminorm, n: usize, seed: u64) -> (MatrixState, MatrixState) {
    (
        MatrixState::random_seeded(l.system(), n, 2 * seed).unwrap(),
        MatrixState::random_seeded(l.system(), n, 2 * seed + 1).unwrap(),
    )
}
