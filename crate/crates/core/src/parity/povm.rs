//! The fixed parity-invariant test that never errs under the alternative:
//! the projector onto the part of the null branches orthogonal to the
//! support of the twirled alternative.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, DEFAULT_DIM_CAP};
use crate::states::{parity_weights, twirl_pure_analytic, BranchVector, PureQubit};
use crate::testing::BinaryTest;

use super::overlap::{lambdas, overlaps};
use super::{classify, CaseClass, CaseTag};

const GS_TOL: f64 = 1e-12;

/// Orthonormal vectors in the symmetric subspace describing the test.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroErrorBasis {
    pub case: CaseTag,
    /// Orthonormal basis of the support of the twirled alternative.
    pub alt_support: Vec<BranchVector>,
    /// Orthonormal vectors spanning the test `E`.
    pub test_vectors: Vec<BranchVector>,
}

fn require_distinct(class: &CaseClass) -> Result<()> {
    if class.tag == CaseTag::IdenticalTwirl {
        return Err(Error::Unsupported(
            "the two twirled states coincide; no test separates them".into(),
        ));
    }
    Ok(())
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    Ok(())
}

/// Gram-Schmidt over the alternative's branches, then the null's.
///
/// A null branch lying inside the alternative's support is dropped when it
/// is a single Dicke state (this happens for `n = 1`, and for the odd branch
/// at `n = 2`, where both branches are the same Dicke vector). Any other
/// vanishing residual is reported as a numerical failure.
pub fn zero_error_basis(psi0: &PureQubit, psi1: &PureQubit, n: u32) -> Result<ZeroErrorBasis> {
    check_n(n)?;
    let class = classify(psi0, psi1);
    require_distinct(&class)?;
    let t0 = twirl_pure_analytic(&class.null_state(), n)?;
    let t1 = twirl_pure_analytic(&class.alt_state(), n)?;

    let alt_support: Vec<BranchVector> = [(t1.w_even, &t1.v_even), (t1.w_odd, &t1.v_odd)]
        .into_iter()
        .filter(|(w, v)| *w > 0.0 && !v.is_zero())
        .map(|(_, v)| v.clone())
        .collect();
    let mut basis = alt_support.clone();
    let mut test_vectors = Vec::new();
    for (name, w, v) in [
        ("|0_p>", t0.w_even, &t0.v_even),
        ("|1_p>", t0.w_odd, &t0.v_odd),
    ] {
        if w == 0.0 || v.is_zero() {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                r = r.axpy(-b.inner(&r), b);
            }
        }
        let norm = r.norm();
        if norm < GS_TOL {
            if v.support_len() == 1 {
                continue;
            }
            return Err(Error::Numerical(format!(
                "Gram-Schmidt residual of {name} has norm {norm:e} at n = {n}"
            )));
        }
        let e = r.scaled((1.0 / norm).into());
        basis.push(e.clone());
        test_vectors.push(e);
    }
    let rotate = |v: Vec<BranchVector>| -> Result<Vec<BranchVector>> {
        v.iter().map(|b| to_frame(b, class.frame)).collect()
    };
    Ok(ZeroErrorBasis {
        case: class.tag,
        alt_support: rotate(alt_support)?,
        test_vectors: rotate(test_vectors)?,
    })
}

// Applies diag(1, e^{i theta}) to every qubit.
fn to_frame(v: &BranchVector, theta: f64) -> Result<BranchVector> {
    if theta == 0.0 {
        return Ok(v.clone());
    }
    let entries = v
        .entries()
        .iter()
        .map(|&(j, a)| (j, a * C64::from_polar(1.0, f64::from(j) * theta)))
        .collect();
    BranchVector::new(v.n(), entries)
}

/// The test as a dense `2^n x 2^n` operator.
pub fn optimal_povm(psi0: &PureQubit, psi1: &PureQubit, n: u32) -> Result<BinaryTest> {
    optimal_povm_capped(psi0, psi1, n, DEFAULT_DIM_CAP)
}

pub fn optimal_povm_capped(
    psi0: &PureQubit,
    psi1: &PureQubit,
    n: u32,
    cap: usize,
) -> Result<BinaryTest> {
    let basis = zero_error_basis(psi0, psi1, n)?;
    let dim = 1usize << n.min(usize::BITS - 1);
    if n >= usize::BITS || dim > cap {
        return Err(Error::ResourceLimit {
            what: "optimal_povm",
            requested: if n >= usize::BITS { usize::MAX } else { dim },
            cap,
        });
    }
    let mut e = ComplexMatrix::zeros(dim, dim);
    for v in &basis.test_vectors {
        e = &e + &ComplexMatrix::outer(&v.to_dense(cap)?);
    }
    Ok(BinaryTest::from_matrix(e))
}

/// Closed-form `Tr(Z[rho0^{(x) n}] E)` for the test of [`zero_error_basis`].
pub fn zero_error_acceptance(psi0: &PureQubit, psi1: &PureQubit, n: u32) -> Result<f64> {
    check_n(n)?;
    let c = classify(psi0, psi1);
    require_distinct(&c)?;
    let nf = f64::from(n);
    Ok(match c.tag {
        CaseTag::BasisOrthogonal => 1.0,
        CaseTag::GenericDistinct => {
            let o = overlaps(c.p, c.q, c.phi, n)?;
            let (_, we, wo) = parity_weights(c.p, n);
            we * (1.0 - o.a_n * o.a_n) + wo * (1.0 - o.b_n * o.b_n)
        }
        CaseTag::DegenerateNull => 1.0 - x_n(&c, n),
        CaseTag::DegenerateAlt => {
            if c.q == 1.0 {
                1.0 - c.p.powf(nf)
            } else {
                1.0 - (1.0 - c.p).powf(nf)
            }
        }
        CaseTag::IdenticalTwirl => unreachable!(),
    })
}

// Residual weight of a basis null state on the alternative's support.
fn x_n(c: &CaseClass, n: u32) -> f64 {
    let nf = f64::from(n);
    let (_, we, wo) = parity_weights(c.q, n);
    if c.p == 1.0 {
        (nf * c.q.ln() - we.ln()).exp()
    } else {
        let w = if n.is_multiple_of(2) { we } else { wo };
        (nf * (1.0 - c.q).ln() - w.ln()).exp()
    }
}

/// `1 - Tr(Z[rho0^{(x) n}] E)`, evaluated in log space so that it stays
/// accurate for large `n`.
pub fn residual(psi0: &PureQubit, psi1: &PureQubit, n: u32) -> Result<f64> {
    check_n(n)?;
    let c = classify(psi0, psi1);
    require_distinct(&c)?;
    Ok(residual_class(&c, n))
}

pub(crate) fn residual_class(c: &CaseClass, n: u32) -> f64 {
    let nf = f64::from(n);
    match c.tag {
        CaseTag::BasisOrthogonal => 0.0,
        CaseTag::DegenerateNull => x_n(c, n),
        CaseTag::DegenerateAlt => {
            let base = if c.q == 1.0 { c.p } else { 1.0 - c.p };
            (nf * base.ln()).exp()
        }
        CaseTag::GenericDistinct | CaseTag::IdenticalTwirl => {
            let (_, _, z1, z2) = lambdas(c.p, c.q, c.phi);
            let pw = |z: crate::linalg::C64| {
                let r = z.norm();
                if r == 0.0 {
                    0.0
                } else {
                    (nf * r.ln()).exp()
                }
            };
            let (e1, e2) = (pw(z1), pw(z2));
            let cross = 2.0 * e1 * e2 * (nf * (z1.arg() - z2.arg())).cos();
            let plus = (e1 * e1 + e2 * e2 + cross).max(0.0);
            let minus = (e1 * e1 + e2 * e2 - cross).max(0.0);
            let (_, we_q, wo_q) = parity_weights(c.q, n);
            plus / (4.0 * we_q) + minus / (4.0 * wo_q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{twirl_dense, DenseState};

    fn pq(p: f64, phi: f64) -> PureQubit {
        PureQubit::new(p, phi).unwrap()
    }

    fn dense_traces(psi0: &PureQubit, psi1: &PureQubit, n: u32) -> (f64, f64) {
        let e = optimal_povm(psi0, psi1, n).unwrap();
        let s0 = twirl_dense(&DenseState::pure_power(psi0, n, 1024).unwrap());
        let s1 = twirl_dense(&DenseState::pure_power(psi1, n, 1024).unwrap());
        (
            s0.rho().trace_product(e.matrix()).re,
            s1.rho().trace_product(e.matrix()).re,
        )
    }

    #[test]
    fn generic_example() {
        let (a, b) = (pq(0.3, 0.0), pq(0.6, 1.0));
        let (t0, t1) = dense_traces(&a, &b, 4);
        assert!(t1.abs() < 1e-12);
        assert!((t0 - zero_error_acceptance(&a, &b, 4).unwrap()).abs() < 1e-10);
        assert!((1.0 - t0 - 0.245_876_85).abs() < 1e-8);
    }

    #[test]
    fn degenerate_alt_example() {
        let (a, b) = (pq(0.5, 0.0), PureQubit::basis(0));
        let (t0, t1) = dense_traces(&a, &b, 3);
        assert!(t1.abs() < 1e-12);
        assert!((t0 - 0.875).abs() < 1e-12);
        assert!((zero_error_acceptance(&a, &b, 3).unwrap() - 0.875).abs() < 1e-15);
    }

    #[test]
    fn degenerate_null_example() {
        let (a, b) = (PureQubit::basis(0), pq(0.5, 0.0));
        let (t0, t1) = dense_traces(&a, &b, 3);
        assert!(t1.abs() < 1e-12);
        assert!((t0 - 0.75).abs() < 1e-12);
        assert!((zero_error_acceptance(&a, &b, 3).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn single_copy_directions_are_dropped() {
        let b = zero_error_basis(&pq(0.3, 0.0), &pq(0.6, 1.0), 1).unwrap();
        assert!(b.test_vectors.is_empty());
        let b = zero_error_basis(&pq(0.3, 0.0), &pq(0.6, 1.0), 2).unwrap();
        assert_eq!(b.test_vectors.len(), 1);
        assert!((residual(&pq(0.3, 0.0), &pq(0.6, 1.0), 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identical_twirl_is_unsupported() {
        let err = optimal_povm(&pq(0.3, 0.0), &pq(0.3, std::f64::consts::PI), 3).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn residual_matches_acceptance() {
        let cases = [
            (pq(0.3, 0.0), pq(0.6, 1.0)),
            (pq(0.8, 0.0), pq(0.2, 2.5)),
            (PureQubit::basis(1), pq(0.35, 0.0)),
            (pq(0.7, 0.0), PureQubit::basis(1)),
            (PureQubit::basis(0), PureQubit::basis(1)),
        ];
        for (a, b) in cases {
            for n in 1..=30 {
                let r = residual(&a, &b, n).unwrap();
                let acc = zero_error_acceptance(&a, &b, n).unwrap();
                assert!((r + acc - 1.0).abs() < 1e-12, "{a:?} {b:?} n={n}");
            }
        }
    }
}
