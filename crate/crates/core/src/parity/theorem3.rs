//! Closed forms for a pure state against the maximally mixed state.

use crate::error::{invalid, Result};
use crate::linalg::{ComplexMatrix, DEFAULT_DIM_CAP};
use crate::states::{parity_weights, twirl_pure_analytic, PureQubit};
use crate::testing::{BinaryTest, ExtendedReal};

use super::restricted::{restricted_beta, Hypothesis};

/// Output of [`theorem3_beta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem3Value {
    pub beta: f64,
    pub dhe: ExtendedReal,
    /// `false` when the closed form does not apply and the numerical dual
    /// was used instead.
    pub closed_form: bool,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        invalid(format!("eps = {eps} is outside (0, 1)"))
    }
}

/// Minimal restricted type-II error for `psi = (p, 0)` as null against the
/// maximally mixed alternative, with `d = |2p - 1|^n`:
///
/// * `eps < 1/2` and `1 - 2 eps - d > 0`: `(1 - d - eps) / ((1 - d) 2^{n-1})`;
/// * `eps >= 1/2`: `(1 - eps) / ((1 + d) 2^{n-1})`;
/// * otherwise the numerical dual.
pub fn theorem3_beta(p: f64, n: u32, eps: f64) -> Result<Theorem3Value> {
    check_eps(eps)?;
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let psi = PureQubit::new(p, 0.0)?;
    let (_, we, wo) = parity_weights(p, n);
    // 1 - d and 1 + d without cancellation.
    let (one_minus_d, one_plus_d) = (2.0 * we.min(wo), 2.0 * we.max(wo));
    let d = 1.0 - one_minus_d;
    let log2_pow = f64::from(n - 1);
    let (num, den) = if eps >= 0.5 {
        (1.0 - eps, one_plus_d)
    } else if 1.0 - 2.0 * eps - d > 0.0 {
        (one_minus_d - eps, one_minus_d)
    } else {
        let r = restricted_beta(&Hypothesis::Pure(psi), &Hypothesis::MaxMixed, n, eps)?;
        return Ok(Theorem3Value {
            beta: r.beta_min,
            dhe: r.dhe,
            closed_form: false,
        });
    };
    let dhe = -num.log2() + den.log2() + log2_pow;
    Ok(Theorem3Value {
        beta: (num / den) * (-log2_pow).exp2(),
        dhe: ExtendedReal::Finite(dhe),
        closed_form: true,
    })
}

// ceil that forgives floating noise just above an integer.
pub(crate) fn ceil_guarded(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x.ceil()
    }
}

/// `ceil(log2(1/eps)) + 1`: copies after which the maximally mixed null can
/// be told apart from any pure alternative with zero type-II error.
pub fn theorem3_critical_n(eps: f64) -> Result<u32> {
    check_eps(eps)?;
    Ok(ceil_guarded((1.0 / eps).log2()) as u32 + 1)
}

/// First `n` with `(2^n - 2) / 2^n >= 1 - eps`, by direct search.
pub fn theorem3_critical_n_search(eps: f64) -> Result<u32> {
    check_eps(eps)?;
    let mut n = 1u32;
    loop {
        let (alpha, _) = theorem3_povm_errors(n);
        if alpha <= eps * (1.0 + 1e-12) {
            return Ok(n);
        }
        n += 1;
    }
}

/// `(alpha, beta)` of `E = I - |0_p><0_p| - |1_p><1_p|` with the maximally
/// mixed state as null and a non-basis pure state as alternative.
pub fn theorem3_povm_errors(n: u32) -> (f64, f64) {
    ((1.0 - f64::from(n)).exp2().min(1.0), 0.0)
}

/// Dense `E = I - |0_p><0_p| - |1_p><1_p|` on `n` qubits.
pub fn theorem3_povm(psi: &PureQubit, n: u32) -> Result<BinaryTest> {
    let t = twirl_pure_analytic(psi, n)?;
    let dim = 1usize << n.min(usize::BITS - 1);
    if n >= usize::BITS || dim > DEFAULT_DIM_CAP {
        return Err(crate::error::Error::ResourceLimit {
            what: "theorem3_povm",
            requested: if n >= usize::BITS { usize::MAX } else { dim },
            cap: DEFAULT_DIM_CAP,
        });
    }
    let mut e = ComplexMatrix::identity(dim);
    for v in [&t.v_even, &t.v_odd] {
        if !v.is_zero() {
            e = &e - &ComplexMatrix::outer(&v.to_dense(DEFAULT_DIM_CAP)?);
        }
    }
    Ok(BinaryTest::from_matrix(e))
}
