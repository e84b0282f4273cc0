//! Proptest strategies shared by the unit tests.

use proptest::prelude::*;

use crate::linalg::{ComplexMatrix, C64};
use crate::states::{DenseState, PureQubit};

/// Random Hermitian `d x d` matrix with entries of order one.
pub fn hermitian(d: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(-1.0..1.0f64, 2 * d * d).prop_map(move |x| {
        let g = ComplexMatrix::from_fn(d, d, |i, j| {
            C64::new(x[2 * (i * d + j)], x[2 * (i * d + j) + 1])
        });
        g.hermitian_part()
    })
}

/// Random density matrix on `n` qubits of random rank.
pub fn density(n: u32) -> impl Strategy<Value = DenseState> {
    let d = 1usize << n;
    (1..=d, prop::collection::vec(-1.0..1.0f64, 2 * d * d)).prop_map(move |(rank, x)| {
        let g = ComplexMatrix::from_fn(d, rank, |i, j| {
            C64::new(x[2 * (i * d + j)], x[2 * (i * d + j) + 1])
        });
        let m = &g * &g.adjoint();
        let t = m.trace().re;
        let rho = m.scale(1.0 / t).hermitian_part();
        DenseState::new(n, rho).expect("Gram matrix is a state")
    })
}

pub fn pure_qubit() -> impl Strategy<Value = PureQubit> {
    (0.0..=1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(p, phi)| PureQubit::new(p, phi).unwrap())
}
