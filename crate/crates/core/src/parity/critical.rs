//! Critical copy number: the smallest `n` from which the fixed zero-type-II
//! test keeps its type-I error at or below `eps` for every larger `n`.

use crate::error::{invalid, Error, Result};
use crate::states::PureQubit;

use super::overlap::lambdas;
use super::povm::residual_class;
use super::theorem3::ceil_guarded;
use super::{classify, CaseClass, CaseTag};

/// Default cap on the number of copies examined by [`critical_n_exact`].
pub const DEFAULT_ITERATION_CAP: u64 = 1_000_000;

// Relative slack in `residual <= eps`, so that e.g. 0.1^2 <= 0.01 holds.
const GOAL_SLACK: f64 = 1e-12;

/// Formula side of the critical copy number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalFormula {
    /// An exact closed form.
    Exact(u64),
    /// Only the leading asymptotic term `log_{lambda^2}(eps)` is known.
    Asymptotic { leading: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormulaReport {
    pub case: CaseTag,
    pub value: CriticalFormula,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    /// Decay rate of the residual, where one applies.
    pub lambda_max: Option<f64>,
    pub lambda_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalCopiesReport {
    pub case: CaseTag,
    /// Smallest `n` with `residual(m) <= eps` for all `m >= n`.
    pub n_exact: u64,
    /// Smallest `n` with `residual(n) <= eps`.
    pub n_first_hit: u64,
    pub formula: FormulaReport,
    /// `residual(n)` for `n = 1, 2, ...` up to the point where the tail was
    /// certified.
    pub residuals: Vec<f64>,
    /// Upper bound on `residual(m)` for every `m` past the end of the trace.
    pub tail_bound: f64,
}

impl CriticalCopiesReport {
    pub fn lower_bound(&self) -> Option<f64> {
        self.formula.lower_bound
    }

    pub fn upper_bound(&self) -> Option<f64> {
        self.formula.upper_bound
    }
}

fn prepare(psi0: &PureQubit, psi1: &PureQubit, eps: f64) -> Result<CaseClass> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("eps = {eps} is outside (0, 1)"));
    }
    let c = classify(psi0, psi1);
    if c.tag == CaseTag::IdenticalTwirl {
        return Err(Error::Unsupported(
            "the two twirled states coincide for every n; no critical copy number exists".into(),
        ));
    }
    Ok(c)
}

// Nonincreasing bound on residual(m) for all m >= n.
fn tail_bound(c: &CaseClass, n: u64) -> f64 {
    let nf = n as f64;
    match c.tag {
        CaseTag::BasisOrthogonal => 0.0,
        CaseTag::DegenerateAlt => {
            let base = if c.q == 1.0 { c.p } else { 1.0 - c.p };
            (nf * base.ln()).exp()
        }
        CaseTag::DegenerateNull => {
            let base = if c.p == 1.0 { c.q } else { 1.0 - c.q };
            (nf * base.ln()).exp() / c.q.min(1.0 - c.q)
        }
        CaseTag::GenericDistinct | CaseTag::IdenticalTwirl => {
            let (_, _, z1, z2) = lambdas(c.p, c.q, c.phi);
            let lmax = z1.norm().max(z2.norm());
            (2.0 * nf * lmax.ln()).exp() / (c.q * (1.0 - c.q))
        }
    }
}

/// [`critical_n_exact_capped`] with [`DEFAULT_ITERATION_CAP`].
pub fn critical_n_exact(
    psi0: &PureQubit,
    psi1: &PureQubit,
    eps: f64,
) -> Result<CriticalCopiesReport> {
    critical_n_exact_capped(psi0, psi1, eps, DEFAULT_ITERATION_CAP)
}

/// Walks `n = 1, 2, ...` through the closed-form residuals until an upper
/// bound certifies that no later `n` exceeds `eps`.
pub fn critical_n_exact_capped(
    psi0: &PureQubit,
    psi1: &PureQubit,
    eps: f64,
    cap: u64,
) -> Result<CriticalCopiesReport> {
    let c = prepare(psi0, psi1, eps)?;
    let formula = formula_for(&c, eps);
    let goal = eps * (1.0 + GOAL_SLACK);
    let mut residuals = Vec::new();
    let mut last_fail = 0u64;
    let mut first_hit = None;
    for n in 1..=cap {
        let r = residual_class(&c, u32::try_from(n).unwrap_or(u32::MAX));
        residuals.push(r);
        if r > goal {
            last_fail = n;
        } else if first_hit.is_none() {
            first_hit = Some(n);
        }
        let tail = tail_bound(&c, n);
        if r <= goal && tail <= goal {
            return Ok(CriticalCopiesReport {
                case: c.tag,
                n_exact: last_fail + 1,
                n_first_hit: first_hit.unwrap_or(n),
                formula,
                residuals,
                tail_bound: tail,
            });
        }
    }
    Err(Error::NonTermination {
        iterations: cap,
        residual: residuals.last().copied().unwrap_or(f64::NAN),
    })
}

/// Closed-form or asymptotic critical copy number, with the finite brackets
/// available for the asymptotic cases.
pub fn critical_n_formula(psi0: &PureQubit, psi1: &PureQubit, eps: f64) -> Result<FormulaReport> {
    let c = prepare(psi0, psi1, eps)?;
    Ok(formula_for(&c, eps))
}

fn log_base(x: f64, base: f64) -> f64 {
    x.ln() / base.ln()
}

fn exact(c: &CaseClass, n: f64) -> FormulaReport {
    FormulaReport {
        case: c.tag,
        value: CriticalFormula::Exact(n.max(1.0) as u64),
        lower_bound: None,
        upper_bound: None,
        lambda_max: None,
        lambda_min: None,
    }
}

fn formula_for(c: &CaseClass, eps: f64) -> FormulaReport {
    match c.tag {
        CaseTag::BasisOrthogonal => exact(c, 1.0),
        CaseTag::DegenerateAlt => {
            let base = if c.q == 1.0 { c.p } else { 1.0 - c.p };
            exact(c, ceil_guarded(log_base(eps, base)))
        }
        CaseTag::DegenerateNull => {
            if c.q == 0.5 {
                return exact(c, ceil_guarded(log_base(eps, 0.5) + 1.0));
            }
            // The residual is base^n over a parity weight; `tilt > 0` when
            // that weight tends to 1/2 from above.
            let (base, tilt) = if c.p == 1.0 {
                (c.q, 2.0 * c.q - 1.0)
            } else {
                (1.0 - c.q, 1.0 - 2.0 * c.q)
            };
            let l = log_base(eps, base);
            let (lo, hi) = if tilt > 0.0 {
                (l + 1.0, l + log_base(0.5, base) + 1.0)
            } else {
                (l, l + 2.0)
            };
            FormulaReport {
                case: c.tag,
                value: CriticalFormula::Asymptotic { leading: l },
                lower_bound: Some(lo),
                upper_bound: Some(hi),
                lambda_max: Some(base.sqrt()),
                lambda_min: None,
            }
        }
        CaseTag::GenericDistinct | CaseTag::IdenticalTwirl => {
            let (_, _, z1, z2) = lambdas(c.p, c.q, c.phi);
            let (l1, l2) = (z1.norm(), z2.norm());
            let (lmax, lmin) = (l1.max(l2), l1.min(l2));
            let base = lmax * lmax;
            let upper = log_base(c.q * (1.0 - c.q) * eps, base) + 1.0;
            let lower = if c.phi.cos().abs() < 1e-12 {
                log_base(eps, base)
            } else {
                let gap = 1.0 - lmin / lmax;
                log_base(eps / (gap * gap), base)
            };
            FormulaReport {
                case: c.tag,
                value: CriticalFormula::Asymptotic {
                    leading: log_base(eps, base),
                },
                lower_bound: Some(lower),
                upper_bound: Some(upper),
                lambda_max: Some(lmax),
                lambda_min: Some(lmin),
            }
        }
    }
}
