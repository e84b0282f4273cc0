//! Parity-restricted testing between pure qubit states, and between a pure
//! qubit state and the maximally mixed state.
//!
//! Any parity-invariant test `E` satisfies `Tr(rho E) = Tr(Z[rho] E)`, so the
//! restricted problem is the unrestricted one on the twirled states. For
//! pure inputs those live in `span{|0_p>, |1_p>, |0_q>, |1_q>}`, which makes
//! every quantity here computable at a cost independent of `n`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::states::PureQubit;

pub mod critical;
pub mod overlap;
pub mod povm;
pub mod restricted;
pub mod theorem3;

pub use critical::{
    critical_n_exact, critical_n_exact_capped, critical_n_formula, CriticalCopiesReport,
    CriticalFormula, FormulaReport, DEFAULT_ITERATION_CAP,
};
pub use overlap::{branch_overlaps, overlaps, OverlapData};
pub use povm::{optimal_povm, residual, zero_error_acceptance, zero_error_basis, ZeroErrorBasis};
pub use restricted::{
    logical_states, restricted_beta, restricted_beta_dense, restricted_beta_oracle, Hypothesis,
};
pub use theorem3::{
    theorem3_beta, theorem3_critical_n, theorem3_critical_n_search, theorem3_povm,
    theorem3_povm_errors, Theorem3Value,
};

/// Default tolerance for snapping parameters onto the special cases.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// Regimes of a pair of pure qubit states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// Same twirl for every `n`: equal states, or `p = q` with phase `pi`.
    IdenticalTwirl,
    /// `{|0>, |1>}`.
    BasisOrthogonal,
    /// Both states off the poles.
    GenericDistinct,
    /// The null state is `|0>` or `|1>`.
    DegenerateNull,
    /// The alternative state is `|0>` or `|1>`.
    DegenerateAlt,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::IdenticalTwirl => "IdenticalTwirl",
            Self::BasisOrthogonal => "BasisOrthogonal",
            Self::GenericDistinct => "GenericDistinct",
            Self::DegenerateNull => "DegenerateNull",
            Self::DegenerateAlt => "DegenerateAlt",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A classified pair. `p`, `q` are snapped to `0` or `1` when within the
/// tolerance of a pole, and `phi` is the relative phase `phi1 - phi0` in
/// `[0, 2pi)`, zero when either state is a basis state.
///
/// The snapped states sit in a frame where the null state has zero phase;
/// the local phase rotation `diag(1, e^{i frame})` on every qubit maps them
/// back onto the inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseClass {
    pub tag: CaseTag,
    pub p: f64,
    pub q: f64,
    pub phi: f64,
    pub frame: f64,
}

impl CaseClass {
    /// The snapped null state with zero phase.
    pub fn null_state(&self) -> PureQubit {
        PureQubit::new(self.p, 0.0).expect("snapped p is valid")
    }

    /// The snapped alternative state carrying the relative phase.
    pub fn alt_state(&self) -> PureQubit {
        PureQubit::new(self.q, self.phi).expect("snapped q is valid")
    }
}

/// Distance between two angles on the circle.
pub(crate) fn angle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn snap(x: f64, tol: f64) -> f64 {
    if x <= tol {
        0.0
    } else if x >= 1.0 - tol {
        1.0
    } else {
        x
    }
}

/// Classifies with [`CLASSIFY_TOL`].
pub fn classify(psi0: &PureQubit, psi1: &PureQubit) -> CaseClass {
    classify_with_tol(psi0, psi1, CLASSIFY_TOL)
}

/// Classifies a null/alternative pair, comparing `p`, `q` with absolute
/// tolerance `tol` and the relative phase modulo `2pi` with the same `tol`.
pub fn classify_with_tol(psi0: &PureQubit, psi1: &PureQubit, tol: f64) -> CaseClass {
    let p = snap(psi0.p(), tol);
    let q = snap(psi1.p(), tol);
    let pole = |x: f64| x == 0.0 || x == 1.0;
    let mut phi = if pole(p) || pole(q) {
        0.0
    } else {
        (psi1.phi() - psi0.phi()).rem_euclid(TAU)
    };
    if angle_dist(phi, 0.0) <= tol {
        phi = 0.0;
    } else if angle_dist(phi, PI) <= tol {
        phi = PI;
    }
    let same_p = (p - q).abs() <= tol;
    let tag = if same_p && (pole(p) || phi == 0.0 || phi == PI) {
        CaseTag::IdenticalTwirl
    } else if pole(p) && pole(q) {
        CaseTag::BasisOrthogonal
    } else if pole(p) {
        CaseTag::DegenerateNull
    } else if pole(q) {
        CaseTag::DegenerateAlt
    } else {
        CaseTag::GenericDistinct
    };
    let q = if same_p && tag == CaseTag::IdenticalTwirl {
        p
    } else {
        q
    };
    let frame = if !pole(p) {
        psi0.phi()
    } else if !pole(q) {
        psi1.phi()
    } else {
        0.0
    };
    CaseClass {
        tag,
        p,
        q,
        phi,
        frame,
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::linalg::trace_norm;
    use crate::states::{twirl_dense, DenseState};
    use crate::testing::beta_min;
    use proptest::prelude::*;

    // Pairs biased towards the special regimes.
    fn pair() -> impl Strategy<Value = (PureQubit, PureQubit)> {
        let p = prop_oneof![Just(0.0), Just(1.0), 0.0..=1.0f64];
        let phi = prop_oneof![Just(0.0), Just(PI), 0.0..TAU];
        (p.clone(), p, phi.clone(), phi, any::<bool>()).prop_map(|(p, q, a, b, same)| {
            let q = if same { p } else { q };
            (PureQubit::new(p, a).unwrap(), PureQubit::new(q, b).unwrap())
        })
    }

    fn generic() -> impl Strategy<Value = (PureQubit, PureQubit)> {
        (0.02..0.98f64, 0.02..0.98f64, 0.05..6.2f64)
            .prop_filter("distinct twirls", |&(p, q, phi)| {
                (p - q).abs() > 1e-3 || angle_dist(phi, PI) > 1e-3
            })
            .prop_map(|(p, q, phi)| {
                (
                    PureQubit::new(p, 0.0).unwrap(),
                    PureQubit::new(q, phi).unwrap(),
                )
            })
    }

    fn dense_twirl(q: &PureQubit, n: u32) -> DenseState {
        twirl_dense(&DenseState::pure_power(q, n, 1 << 10).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn identical_twirl_iff_dense_twirls_coincide((a, b) in pair()) {
            let same = (1..=6).all(|n| {
                let d = dense_twirl(&a, n).rho() - dense_twirl(&b, n).rho();
                0.5 * trace_norm(&d).unwrap() <= 1e-10
            });
            prop_assert_eq!(classify(&a, &b).tag == CaseTag::IdenticalTwirl, same);
        }

        #[test]
        fn zero_error_test_never_accepts_the_alternative((a, b) in pair(), n in 1u32..=6) {
            prop_assume!(classify(&a, &b).tag != CaseTag::IdenticalTwirl);
            let e = optimal_povm(&a, &b, n).unwrap();
            let t1 = dense_twirl(&b, n).rho().trace_product(e.matrix()).re;
            prop_assert!(t1.abs() <= 1e-12);
        }

        #[test]
        fn acceptance_grows_to_one((a, b) in generic()) {
            let mut prev = 0.0;
            for n in 1..=200 {
                let acc = zero_error_acceptance(&a, &b, n).unwrap();
                prop_assert!(acc >= prev - 1e-12, "n = {}: {} < {}", n, acc, prev);
                prev = acc;
            }
        }

        #[test]
        fn logical_path_matches_dense_oracle((a, b) in pair(), n in 1u32..=8, eps in 0.02..0.98f64) {
            let (ha, hb) = (Hypothesis::Pure(a), Hypothesis::Pure(b));
            let fast = restricted_beta(&ha, &hb, n, eps).unwrap().beta_min;
            let slow = beta_min(&dense_twirl(&a, n), &dense_twirl(&b, n), eps).unwrap().beta_min;
            prop_assert!((fast - slow).abs() < 1e-8, "{} vs {}", fast, slow);
        }

        #[test]
        fn maxmixed_logical_path_matches_dense(p in 0.0..=1.0f64, n in 1u32..=8, eps in 0.02..0.98f64, flip in any::<bool>()) {
            let psi = Hypothesis::Pure(PureQubit::new(p, 0.0).unwrap());
            let (h0, h1) = if flip { (Hypothesis::MaxMixed, psi) } else { (psi, Hypothesis::MaxMixed) };
            let fast = restricted_beta(&h0, &h1, n, eps).unwrap().beta_min;
            let slow = restricted_beta_oracle(&h0, &h1, n, eps).unwrap().beta_min;
            prop_assert!((fast - slow).abs() < 1e-8, "{} vs {}", fast, slow);
        }

        #[test]
        fn pure_vs_maxmixed_rate_tends_to_one(p in 0.05..0.95f64, eps in 0.05..0.95f64) {
            let gap = |n: u32| (theorem3_beta(p, n, eps).unwrap().dhe.to_f64() / f64::from(n) - 1.0).abs();
            let mut prev = f64::INFINITY;
            for n in [80, 160, 320, 640] {
                let g = gap(n);
                prop_assert!(g <= prev + 1e-12);
                prev = g;
            }
            prop_assert!(prev <= (2.0 - (1.0 - eps).log2()) / 640.0);
        }

        #[test]
        fn generic_copy_number_tracks_leading_term((a, b) in generic()) {
            let r = critical_n_exact(&a, &b, 1e-6).unwrap();
            let nx = r.n_exact as f64;
            prop_assert!(r.lower_bound().unwrap() <= nx && nx <= r.upper_bound().unwrap(), "{:?} {}", r.formula, nx);
        }
    }
}
