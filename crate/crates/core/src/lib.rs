//! Binary quantum hypothesis testing for qubit states under a parity
//! superselection rule.
//!
//! * [`linalg`]: dense complex matrices, Hermitian spectra, trace norms.
//! * [`states`]: pure qubits, n-copy powers, the parity operator and twirling.
//! * [`testing`]: unrestricted testing; minimal type-II error and its dual.
//! * [`parity`]: parity-restricted testing, optimal tests and copy numbers.

pub mod error;
pub mod linalg;
mod optimize;
pub mod parity;
pub mod states;
pub mod testing;

pub use error::{Error, Result};

#[cfg(test)]
mod test_support;
