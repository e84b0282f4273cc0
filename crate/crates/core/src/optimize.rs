//! Golden-section search for unimodal functions of one variable.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy)]
pub(crate) struct GoldenOutcome {
    pub x: f64,
    pub fx: f64,
    pub iterations: u32,
}

/// Maximizes a unimodal `f` on `[lo, hi]` until the bracket is narrower than
/// `rel_width * (1 + |x|)`.
pub(crate) fn golden_max(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    rel_width: f64,
    max_iter: u32,
) -> Result<GoldenOutcome> {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iterations = 0;
    while b - a > rel_width * (1.0 + 0.5 * (a + b).abs()) {
        if iterations == max_iter {
            return Err(Error::Numerical(format!(
                "golden-section search stalled after {max_iter} iterations on [{a:e}, {b:e}]"
            )));
        }
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let (x, fx) = if fc >= fd { (c, fc) } else { (d, fd) };
    Ok(GoldenOutcome { x, fx, iterations })
}

/// Minimizes a unimodal `f` on `[lo, hi]`.
pub(crate) fn golden_min(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    rel_width: f64,
    max_iter: u32,
) -> Result<GoldenOutcome> {
    let out = golden_max(|x| f(x).map(|v| -v), lo, hi, rel_width, max_iter)?;
    Ok(GoldenOutcome { fx: -out.fx, ..out })
}
