//! Seeded random inputs for the integration tests.

#![allow(dead_code)]

use std::f64::consts::TAU;

use parity_qht::linalg::{support_basis, trace_norm, ComplexMatrix, C64};
use parity_qht::states::{DenseState, PureQubit};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pure_qubit(rng: &mut impl Rng) -> PureQubit {
    PureQubit::new(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..TAU)).unwrap()
}

/// `G G^dag / Tr` for a `2^n x rank` matrix `G` of uniform entries; the rank is
/// drawn uniformly so that pure and rank-deficient states show up.
pub fn density(rng: &mut impl Rng, n: u32) -> DenseState {
    let d = 1usize << n;
    let rank = rng.gen_range(1..=d);
    let g = ComplexMatrix::from_fn(d, rank, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    DenseState::new(n, m.scale(1.0 / t).hermitian_part()).unwrap()
}

/// Upper bound on the trace distance of two states: the trace norm of the
/// difference compressed to the joint support, plus `sqrt(d)` times the
/// Frobenius norm of what the compression leaves out.
pub fn trace_distance_bound(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let q = support_basis(&(a + b), 1e-14).unwrap();
    let d = a - b;
    let inner = d.compress(&q);
    let rest = (&d - &inner.lift(&q)).frobenius_norm();
    0.5 * (trace_norm(&inner).unwrap() + (a.rows() as f64).sqrt() * rest)
}
