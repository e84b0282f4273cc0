//! Inner products between the twirl branches of two pure qubit states.
//!
//! With `mu1 = sqrt(pq)`, `mu2 = sqrt((1-p)(1-q))` and relative phase `phi`,
//! the binomial sums over even and odd Dicke indices collapse to
//! `<0_q|0_p> = (A + B) / (2 sqrt(w_even(p) w_even(q)))` and
//! `<1_q|1_p> = (A - B) / (2 sqrt(w_odd(p) w_odd(q)))`, where
//! `A = (mu1 + e^{-i phi} mu2)^n` and `B = (mu1 - e^{-i phi} mu2)^n`.

use crate::error::{invalid, Result};
use crate::linalg::C64;
use crate::states::parity_weights;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapData {
    pub n: u32,
    /// `|<0_q|0_p>|`.
    pub a_n: f64,
    pub theta_a: f64,
    /// `|<1_q|1_p>|`.
    pub b_n: f64,
    pub theta_b: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// `|mu1 + e^{-i phi} mu2|`.
    pub lambda1: f64,
    /// `|mu1 - e^{-i phi} mu2|`.
    pub lambda2: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
}

// z^n through its modulus and argument; 0^n = 0 for n >= 1.
fn pow_polar(z: C64, n: u32) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::from_polar((f64::from(n) * r.ln()).exp(), f64::from(n) * z.arg())
}

pub(crate) fn lambdas(p: f64, q: f64, phi: f64) -> (f64, f64, C64, C64) {
    let mu1 = (p * q).sqrt();
    let mu2 = ((1.0 - p) * (1.0 - q)).sqrt();
    let e = C64::from_polar(mu2, -phi);
    (mu1, mu2, mu1 + e, mu1 - e)
}

/// `(<0_q|0_p>, <1_q|1_p>)` for any `p, q` in `[0, 1]`; a branch with zero
/// weight contributes a zero overlap.
pub fn branch_overlaps(p: f64, q: f64, phi: f64, n: u32) -> (C64, C64) {
    let (_, _, z1, z2) = lambdas(p, q, phi);
    let (a, b) = (pow_polar(z1, n), pow_polar(z2, n));
    let (_, we_p, wo_p) = parity_weights(p, n);
    let (_, we_q, wo_q) = parity_weights(q, n);
    let ratio = |num: C64, w1: f64, w2: f64| {
        if w1 == 0.0 || w2 == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            num * 0.5 / (w1.sqrt() * w2.sqrt())
        }
    };
    (ratio(a + b, we_p, we_q), ratio(a - b, wo_p, wo_q))
}

/// Overlap moduli, phases and the rates `lambda1`, `lambda2` for
/// `p, q` in `(0, 1)`.
pub fn overlaps(p: f64, q: f64, phi: f64, n: u32) -> Result<OverlapData> {
    for (name, x) in [("p", p), ("q", q)] {
        if !(x > 0.0 && x < 1.0) {
            return invalid(format!(
                "{name} = {x} must lie in (0, 1); basis states have their own closed forms"
            ));
        }
    }
    if !phi.is_finite() {
        return invalid("phase must be finite");
    }
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let (mu1, mu2, z1, z2) = lambdas(p, q, phi);
    let (even, odd) = branch_overlaps(p, q, phi, n);
    let (l1, l2) = (z1.norm(), z2.norm());
    Ok(OverlapData {
        n,
        a_n: even.norm().min(1.0),
        theta_a: even.arg(),
        b_n: odd.norm().min(1.0),
        theta_b: odd.arg(),
        mu1,
        mu2,
        lambda1: l1,
        lambda2: l2,
        lambda_max: l1.max(l2),
        lambda_min: l1.min(l2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{twirl_pure_analytic, PureQubit};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn identical_states_overlap_fully() {
        for n in [1, 2, 7, 40] {
            let o = overlaps(0.35, 0.35, 0.0, n).unwrap();
            assert!((o.a_n - 1.0).abs() < 1e-12 && (o.b_n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_phase_example() {
        let o = overlaps(0.5, 0.5, FRAC_PI_2, 2).unwrap();
        assert!(o.a_n < 1e-15);
        assert!((o.b_n - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlaps_decay() {
        let o = overlaps(0.3, 0.6, 1.0, 400).unwrap();
        assert!(o.a_n < 1e-6 && o.b_n < 1e-6);
        assert!(o.lambda_max < 1.0);
    }

    #[test]
    fn lambda_max_formula() {
        let (p, q, phi) = (0.3, 0.6, 1.0_f64);
        let o = overlaps(p, q, phi, 3).unwrap();
        let expect = (p * q
            + (1.0 - p) * (1.0 - q)
            + 2.0 * (p * q * (1.0 - p) * (1.0 - q)).sqrt() * phi.cos().abs())
        .sqrt();
        assert!((o.lambda_max - expect).abs() < 1e-15);
    }

    #[test]
    fn matches_branch_inner_products() {
        let (p, q, phi) = (0.3, 0.6, 1.0);
        for n in 1..=10 {
            let tp = twirl_pure_analytic(&PureQubit::new(p, 0.0).unwrap(), n).unwrap();
            let tq = twirl_pure_analytic(&PureQubit::new(q, phi).unwrap(), n).unwrap();
            let (even, odd) = branch_overlaps(p, q, phi, n);
            assert!((tq.v_even.inner(&tp.v_even) - even).norm() < 1e-12);
            assert!((tq.v_odd.inner(&tp.v_odd) - odd).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_poles() {
        assert!(overlaps(0.0, 0.5, 0.0, 2).is_err());
        assert!(overlaps(0.5, 1.0, 0.0, 2).is_err());
        assert!(overlaps(0.5, 0.5, 0.0, 0).is_err());
    }
}
