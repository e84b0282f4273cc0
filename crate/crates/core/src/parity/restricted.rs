//! Minimal type-II error under parity-invariant tests.
//!
//! The twirled states are written in a small orthonormal basis of their
//! joint support:
//!
//! * pure vs pure: `{|0_q>, |1_q>, L2, L3}` where `L2`, `L3` complete
//!   `|0_p>`, `|1_p>`; `Z[rho1]` is diagonal there and `Z[rho0]` follows from
//!   the branch overlaps.
//! * pure vs maximally mixed: `{|0_p>, |1_p>, rest}` with the remaining
//!   `2^n - 2` dimensions merged into one. Both states are proportional to
//!   the identity on `rest`, so an optimal test may be taken constant there
//!   and the merge loses nothing.

use crate::error::{invalid, Result};
use crate::linalg::{ComplexMatrix, C64, DEFAULT_DIM_CAP};
use crate::states::{parity_weights, twirl_dense, DenseState, PureQubit};
use crate::testing::{beta_min, beta_min_matrices, BetaResult};

use super::overlap::branch_overlaps;
use super::{classify, CaseTag};

/// One side of the test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hypothesis {
    Pure(PureQubit),
    MaxMixed,
}

impl Hypothesis {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Pure(_) => "pure",
            Self::MaxMixed => "maxmixed",
        }
    }

    /// Dense `Z[h^{(x) n}]`.
    pub fn twirled_dense(&self, n: u32, cap: usize) -> Result<DenseState> {
        match self {
            Self::Pure(q) => Ok(twirl_dense(&DenseState::pure_power(q, n, cap)?)),
            Self::MaxMixed => DenseState::maximally_mixed(n, cap),
        }
    }
}

fn pure_mm_pair(psi: &PureQubit, n: u32) -> (ComplexMatrix, ComplexMatrix) {
    let (_, we, wo) = parity_weights(psi.p(), n);
    let unit = (-f64::from(n) * std::f64::consts::LN_2).exp();
    let on = |w: f64| if w > 0.0 { unit } else { 0.0 };
    let rest = (1.0 - on(we) - on(wo)).max(0.0);
    (
        ComplexMatrix::from_diag(&[we, wo, 0.0]),
        ComplexMatrix::from_diag(&[on(we), on(wo), rest]),
    )
}

/// `(Z[h0^{(x) n}], Z[h1^{(x) n}])` in the reduced basis described in the
/// module docs.
pub fn logical_states(
    h0: &Hypothesis,
    h1: &Hypothesis,
    n: u32,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    Ok(match (h0, h1) {
        (Hypothesis::MaxMixed, Hypothesis::MaxMixed) => {
            let one = ComplexMatrix::identity(1);
            (one.clone(), one)
        }
        (Hypothesis::Pure(psi), Hypothesis::MaxMixed) => pure_mm_pair(psi, n),
        (Hypothesis::MaxMixed, Hypothesis::Pure(psi)) => {
            let (pure, mm) = pure_mm_pair(psi, n);
            (mm, pure)
        }
        (Hypothesis::Pure(a), Hypothesis::Pure(b)) => {
            let c = classify(a, b);
            let (_, we_q, wo_q) = parity_weights(c.q, n);
            let sigma1 = ComplexMatrix::from_diag(&[we_q, wo_q, 0.0, 0.0]);
            if c.tag == CaseTag::IdenticalTwirl {
                return Ok((sigma1.clone(), sigma1));
            }
            let (_, we_p, wo_p) = parity_weights(c.p, n);
            let (ce, co) = branch_overlaps(c.p, c.q, c.phi, n);
            let se = (1.0 - ce.norm_sqr()).max(0.0).sqrt();
            let so = (1.0 - co.norm_sqr()).max(0.0).sqrt();
            let zero = C64::new(0.0, 0.0);
            let v0 = [ce, zero, C64::new(se, 0.0), zero];
            let v1 = [zero, co, zero, C64::new(so, 0.0)];
            let sigma0 =
                &ComplexMatrix::outer(&v0).scale(we_p) + &ComplexMatrix::outer(&v1).scale(wo_p);
            (sigma0, sigma1)
        }
    })
}

/// `beta_min` between the twirled `n`-copy states, via the reduced basis.
/// The returned test is expressed in that basis.
pub fn restricted_beta(h0: &Hypothesis, h1: &Hypothesis, n: u32, eps: f64) -> Result<BetaResult> {
    let (s0, s1) = logical_states(h0, h1, n)?;
    beta_min_matrices(&s0, &s1, eps)
}

/// The same quantity from dense `2^n`-dimensional twirled states.
pub fn restricted_beta_dense(
    h0: &Hypothesis,
    h1: &Hypothesis,
    n: u32,
    eps: f64,
    cap: usize,
) -> Result<BetaResult> {
    let s0 = h0.twirled_dense(n, cap)?;
    let s1 = h1.twirled_dense(n, cap)?;
    beta_min(&s0, &s1, eps)
}

/// [`restricted_beta_dense`] with the default dimension cap.
pub fn restricted_beta_oracle(
    h0: &Hypothesis,
    h1: &Hypothesis,
    n: u32,
    eps: f64,
) -> Result<BetaResult> {
    restricted_beta_dense(h0, h1, n, eps, DEFAULT_DIM_CAP)
}
