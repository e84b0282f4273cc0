//! Unrestricted binary hypothesis testing between two density matrices.
//!
//! The minimal type-II error at type-I level `eps` is computed from the
//! one-variable dual `f(r) = (1-eps) r - Tr(r rho0 - rho1)_+`, which is
//! concave and piecewise smooth. Its kinks sit at the values of `r` where an
//! eigenvalue of `r rho0 - rho1` crosses zero. The optimal test is recovered
//! Neyman-Pearson style from the maximizer.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, ComplexMatrix, C64};
use crate::optimize::{golden_max, golden_min};
use crate::states::DenseState;

/// Largest allowed type-I excess of a constructed optimal test.
pub const PRIMAL_FEAS_TOL: f64 = 1e-9;
/// Largest allowed gap between the primal and dual optimal values.
pub const DUALITY_GAP_TOL: f64 = 1e-8;
/// Iteration cap of the one-dimensional refinement.
pub const MAX_SEARCH_ITER: u32 = 200;
/// Eigenvalue tolerance for `0 <= E <= I`.
pub const TEST_TOL: f64 = 1e-10;

const SUPPORT_REL_TOL: f64 = 1e-13;
const KERNEL_REL_TOL: f64 = 1e-12;
const COMMUTE_TOL: f64 = 1e-12;
const SCALAR_TOL: f64 = 1e-14;
const SEARCH_REL_WIDTH: f64 = 1e-14;
// Irrational mixing weight used to diagonalize commuting pairs at once.
const MIX: f64 = 0.754_877_666_246_692_7;

/// A real number or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::PosInfinity)
    }

    /// The value as an `f64`, mapping `PosInfinity` to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            Self::Finite(x) => x,
            Self::PosInfinity => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(x) => Some(x),
            Self::PosInfinity => None,
        }
    }

    /// `-log2(x)` for a probability, `+inf` at zero.
    pub fn neg_log2(x: f64) -> Self {
        if x <= 0.0 {
            Self::PosInfinity
        } else {
            Self::Finite(-x.log2())
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(x) => write!(f, "{x}"),
            Self::PosInfinity => f.write_str("inf"),
        }
    }
}

/// The accepting element `E` of a two-outcome measurement `{E, I - E}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryTest {
    e: ComplexMatrix,
}

impl BinaryTest {
    /// Checks Hermiticity and `0 <= E <= I`.
    pub fn new(e: ComplexMatrix) -> Result<Self> {
        let spec = linalg::hermitian_eig(&e)?;
        let lo = spec.eigenvalues.first().copied().unwrap_or(0.0);
        let hi = spec.eigenvalues.last().copied().unwrap_or(0.0);
        if lo < -TEST_TOL || hi > 1.0 + TEST_TOL {
            return invalid(format!(
                "test operator has eigenvalues in [{lo:e}, {hi:e}], outside [0, 1]"
            ));
        }
        Ok(Self { e })
    }

    pub(crate) fn from_matrix(e: ComplexMatrix) -> Self {
        Self { e }
    }

    pub fn accept_all(dim: usize) -> Self {
        Self {
            e: ComplexMatrix::identity(dim),
        }
    }

    pub fn reject_all(dim: usize) -> Self {
        Self {
            e: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.e
    }

    pub fn dim(&self) -> usize {
        self.e.rows()
    }
}

/// Type-I and type-II error probabilities of a test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPair {
    pub alpha: f64,
    pub beta: f64,
}

/// Which route [`beta_min`] took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverPath {
    /// `rho0` has at least `1 - eps` of its weight on the kernel of `rho1`.
    ZeroBeta,
    /// One of the two states is proportional to the identity.
    Scalar,
    /// The compressed states commute and were diagonalized together.
    Commuting,
    /// Breakpoint enumeration with golden-section refinement.
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaDiagnostics {
    pub path: SolverPath,
    /// Number of candidate `r` values evaluated before refinement.
    pub candidates: usize,
    /// Golden-section iterations spent.
    pub iterations: u32,
    /// Set of maximizers of the dual when it is not a single point.
    pub flat_interval: Option<(f64, f64)>,
    /// `r` at which the test was built.
    pub r_test: f64,
    /// `Tr(rho1 E)` of the constructed test.
    pub primal_beta: f64,
    /// `1 - Tr(rho0 E)` of the constructed test.
    pub alpha: f64,
    pub duality_gap: f64,
}

/// Optimal value and witness of the constrained testing problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaResult {
    /// `max_r f(r)`, clamped to `[0, 1]`.
    pub beta_min: f64,
    /// Smallest maximizer of the dual.
    pub r_star: f64,
    /// Optimal test, expressed in the coordinates of the input matrices.
    pub test: BinaryTest,
    /// `-log2(beta_min)`.
    pub dhe: ExtendedReal,
    pub diagnostics: BetaDiagnostics,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        invalid(format!("eps = {eps} is outside (0, 1)"))
    }
}

fn check_pair(rho0: &ComplexMatrix, rho1: &ComplexMatrix) -> Result<()> {
    if !rho0.is_square() || rho0.rows() != rho1.rows() || rho0.cols() != rho1.cols() {
        return invalid(format!(
            "state dimensions differ: {}x{} vs {}x{}",
            rho0.rows(),
            rho0.cols(),
            rho1.rows(),
            rho1.cols()
        ));
    }
    if !rho0.is_hermitian(linalg::HERMITIAN_TOL) || !rho1.is_hermitian(linalg::HERMITIAN_TOL) {
        return invalid("states must be Hermitian");
    }
    Ok(())
}

/// `alpha = 1 - Tr(rho0 E)`, `beta = Tr(rho1 E)`.
pub fn error_pair(rho0n: &DenseState, rho1n: &DenseState, test: &BinaryTest) -> Result<ErrorPair> {
    if rho0n.dim() != rho1n.dim() || test.dim() != rho0n.dim() {
        return invalid(format!(
            "dimension mismatch: states {} and {}, test {}",
            rho0n.dim(),
            rho1n.dim(),
            test.dim()
        ));
    }
    Ok(error_pair_matrices(rho0n.rho(), rho1n.rho(), test.matrix()))
}

fn error_pair_matrices(rho0: &ComplexMatrix, rho1: &ComplexMatrix, e: &ComplexMatrix) -> ErrorPair {
    let alpha = 1.0 - rho0.trace_product(e).re;
    let beta = rho1.trace_product(e).re;
    ErrorPair {
        alpha: alpha.clamp(0.0, 1.0),
        beta: beta.clamp(0.0, 1.0),
    }
}

/// `f(r) = (1 - eps) r - Tr(r rho0 - rho1)_+`.
pub fn dual_f(r: f64, rho0n: &DenseState, rho1n: &DenseState, eps: f64) -> Result<f64> {
    dual_f_matrices(r, rho0n.rho(), rho1n.rho(), eps)
}

/// [`dual_f`] on raw density matrices.
pub fn dual_f_matrices(
    r: f64,
    rho0: &ComplexMatrix,
    rho1: &ComplexMatrix,
    eps: f64,
) -> Result<f64> {
    check_eps(eps)?;
    if !(r >= 0.0 && r.is_finite()) {
        return invalid(format!(
            "dual variable r = {r} must be finite and nonnegative"
        ));
    }
    check_pair(rho0, rho1)?;
    let m = &rho0.scale(r) - rho1;
    Ok((1.0 - eps) * r - linalg::positive_part_trace(&m)?)
}

/// Minimal type-II error over all tests with type-I error at most `eps`.
pub fn beta_min(rho0n: &DenseState, rho1n: &DenseState, eps: f64) -> Result<BetaResult> {
    beta_min_matrices(rho0n.rho(), rho1n.rho(), eps)
}

/// [`beta_min`] on raw density matrices. The caller is responsible for
/// passing positive semidefinite, unit-trace inputs.
pub fn beta_min_matrices(
    rho0: &ComplexMatrix,
    rho1: &ComplexMatrix,
    eps: f64,
) -> Result<BetaResult> {
    check_eps(eps)?;
    check_pair(rho0, rho1)?;

    let sol = if let Some(blocks) = scalar_blocks(rho0, rho1)? {
        solve_blocks(&blocks, eps, SolverPath::Scalar)
    } else {
        let s = rho0 + rho1;
        let v = linalg::support_basis(&s, SUPPORT_REL_TOL)?;
        let (r0, r1) = (rho0.compress(&v), rho1.compress(&v));
        let sol = match commuting_blocks(&r0, &r1)? {
            Some(blocks) => solve_blocks(&blocks, eps, SolverPath::Commuting),
            None => solve_general(&r0, &r1, eps)?,
        };
        Solution {
            test: sol.test.lift(&v),
            ..sol
        }
    };

    let ErrorPair {
        alpha,
        beta: primal,
    } = {
        let a = 1.0 - rho0.trace_product(&sol.test).re;
        let b = rho1.trace_product(&sol.test).re;
        ErrorPair { alpha: a, beta: b }
    };
    if alpha > eps + PRIMAL_FEAS_TOL {
        return Err(Error::Numerical(format!(
            "constructed test has type-I error {alpha:e} > eps = {eps} (path {:?}, r = {:e})",
            sol.path, sol.r_test
        )));
    }
    let gap = (primal - sol.f_star).abs();
    if gap > DUALITY_GAP_TOL {
        return Err(Error::Numerical(format!(
            "duality gap {gap:e}: primal {primal:e}, dual {:e} (path {:?}, r = {:e})",
            sol.f_star, sol.path, sol.r_test
        )));
    }
    let beta = sol.f_star.clamp(0.0, 1.0);
    Ok(BetaResult {
        beta_min: beta,
        r_star: sol.r_star,
        test: BinaryTest::from_matrix(sol.test),
        dhe: ExtendedReal::neg_log2(beta),
        diagnostics: BetaDiagnostics {
            path: sol.path,
            candidates: sol.candidates,
            iterations: sol.iterations,
            flat_interval: sol.flat,
            r_test: sol.r_test,
            primal_beta: primal.clamp(0.0, 1.0),
            alpha: alpha.clamp(0.0, 1.0),
            duality_gap: gap,
        },
    })
}

/// Hypothesis-testing relative entropy `-log2 beta_min`.
pub fn dhe(rho0n: &DenseState, rho1n: &DenseState, eps: f64) -> Result<ExtendedReal> {
    Ok(beta_min(rho0n, rho1n, eps)?.dhe)
}

struct Solution {
    f_star: f64,
    r_star: f64,
    r_test: f64,
    flat: Option<(f64, f64)>,
    test: ComplexMatrix,
    path: SolverPath,
    candidates: usize,
    iterations: u32,
}

// A joint eigenspace of the two states: a single direction, or the
// orthogonal complement of all listed directions.
struct Block {
    a: f64,
    b: f64,
    dir: Option<Vec<C64>>,
}

struct Blocks {
    dim: usize,
    blocks: Vec<Block>,
}

fn scalar_of(m: &ComplexMatrix) -> Option<f64> {
    let d = m.rows();
    let c = m.trace().re / d as f64;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { c } else { 0.0 };
            if (m[(i, j)] - target).norm() > SCALAR_TOL {
                return None;
            }
        }
    }
    Some(c)
}

// Eigenpairs of a positive semidefinite matrix on its range.
fn range_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let basis = linalg::support_basis(m, SUPPORT_REL_TOL)?;
    let small = m.compress(&basis);
    let spec = linalg::eig_unchecked(&small)?;
    let rotated = &basis * &spec.eigenvectors;
    Ok((
        spec.eigenvalues,
        (0..rotated.cols()).map(|k| rotated.column(k)).collect(),
    ))
}

// When one state is `c I`, both are diagonal in the eigenbasis of the other
// one, whose range is typically small.
fn scalar_blocks(rho0: &ComplexMatrix, rho1: &ComplexMatrix) -> Result<Option<Blocks>> {
    let d = rho0.rows();
    let (s0, s1) = (scalar_of(rho0), scalar_of(rho1));
    let (other, c, null_is_scalar) = match (s0, s1) {
        (Some(c0), Some(c1)) => {
            return Ok(Some(Blocks {
                dim: d,
                blocks: vec![Block {
                    a: c0 * d as f64,
                    b: c1 * d as f64,
                    dir: None,
                }],
            }))
        }
        (Some(c0), None) => (rho1, c0, true),
        (None, Some(c1)) => (rho0, c1, false),
        (None, None) => return Ok(None),
    };
    let (values, vectors) = range_eig(other)?;
    let rest = (d - vectors.len()) as f64;
    let mut blocks: Vec<Block> = values
        .into_iter()
        .zip(vectors)
        .map(|(lam, v)| {
            let (a, b) = if null_is_scalar { (c, lam) } else { (lam, c) };
            Block { a, b, dir: Some(v) }
        })
        .collect();
    if rest > 0.0 {
        let (a, b) = if null_is_scalar {
            (c * rest, 0.0)
        } else {
            (0.0, c * rest)
        };
        blocks.push(Block { a, b, dir: None });
    }
    Ok(Some(Blocks { dim: d, blocks }))
}

fn commuting_blocks(r0: &ComplexMatrix, r1: &ComplexMatrix) -> Result<Option<Blocks>> {
    let comm = &(r0 * r1) - &(r1 * r0);
    if comm.frobenius_norm() > COMMUTE_TOL {
        return Ok(None);
    }
    let mixed = r0 + &r1.scale(MIX);
    let spec = linalg::eig_unchecked(&mixed)?;
    let v = &spec.eigenvectors;
    let (d0, d1) = (r0.compress(v), r1.compress(v));
    let k = r0.rows();
    for i in 0..k {
        for j in 0..k {
            if i != j && (d0[(i, j)].norm() > 1e-11 || d1[(i, j)].norm() > 1e-11) {
                return Ok(None);
            }
        }
    }
    let blocks = (0..k)
        .map(|i| Block {
            a: d0[(i, i)].re.max(0.0),
            b: d1[(i, i)].re.max(0.0),
            dir: Some(v.column(i)),
        })
        .collect();
    Ok(Some(Blocks { dim: k, blocks }))
}

fn blocks_f(blocks: &Blocks, r: f64, eps: f64) -> f64 {
    let pos: f64 = blocks
        .blocks
        .iter()
        .map(|bl| (r * bl.a - bl.b).max(0.0))
        .sum();
    (1.0 - eps) * r - pos
}

// Exact solution of the diagonal problem: f is piecewise linear with kinks
// at the ratios b/a.
fn solve_blocks(blocks: &Blocks, eps: f64, path: SolverPath) -> Solution {
    let target = 1.0 - eps;
    let b_max = blocks.blocks.iter().map(|bl| bl.b).fold(0.0, f64::max);
    let kernel_mass: f64 = blocks
        .blocks
        .iter()
        .filter(|bl| bl.b <= KERNEL_REL_TOL * b_max)
        .map(|bl| bl.a)
        .sum();

    let (r_star, f_star, flat, candidates, path) = if kernel_mass >= target - KERNEL_REL_TOL * eps {
        (0.0, 0.0, None, 1, SolverPath::ZeroBeta)
    } else {
        let mut cands: Vec<f64> = std::iter::once(0.0)
            .chain(
                blocks
                    .blocks
                    .iter()
                    .filter(|bl| bl.a > 0.0)
                    .map(|bl| bl.b / bl.a),
            )
            .collect();
        cands.sort_by(f64::total_cmp);
        cands.dedup();
        let values: Vec<f64> = cands.iter().map(|&r| blocks_f(blocks, r, eps)).collect();
        let f_star = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let noise = 8.0 * f64::EPSILON * (1.0 + f_star.abs());
        let maximizers: Vec<f64> = cands
            .iter()
            .zip(&values)
            .filter(|(_, &v)| v >= f_star - noise)
            .map(|(&r, _)| r)
            .collect();
        let lo = maximizers[0];
        let hi = *maximizers.last().unwrap();
        let flat = (hi > lo).then_some((lo, hi));
        (lo, f_star, flat, cands.len(), path)
    };

    let weights = block_weights(blocks, r_star, target);
    let d = blocks.dim;
    let mut test = ComplexMatrix::zeros(d, d);
    let mut listed = ComplexMatrix::zeros(d, d);
    let mut complement_weight = 0.0;
    for (bl, &t) in blocks.blocks.iter().zip(&weights) {
        match &bl.dir {
            Some(v) => {
                let p = ComplexMatrix::outer(v);
                if t > 0.0 {
                    test = &test + &p.scale(t);
                }
                if bl.a == 0.0 && bl.b == 0.0 {
                    continue;
                }
                listed = &listed + &p;
            }
            None => complement_weight = t,
        }
    }
    if complement_weight > 0.0 {
        let comp = &ComplexMatrix::identity(d) - &listed;
        test = &test + &comp.scale(complement_weight);
    }
    Solution {
        f_star,
        r_star,
        r_test: r_star,
        flat,
        test,
        path,
        candidates,
        iterations: 0,
    }
}

// Neyman-Pearson weights at `r`: full weight where `r a > b`, and the kernel
// filled in order of decreasing `a` until the type-I budget is met.
fn block_weights(blocks: &Blocks, r: f64, target: f64) -> Vec<f64> {
    let tau = KERNEL_REL_TOL * (1.0 + r);
    let mut weights = vec![0.0; blocks.blocks.len()];
    let mut mass = 0.0;
    let mut kernel = Vec::new();
    for (k, bl) in blocks.blocks.iter().enumerate() {
        let g = r * bl.a - bl.b;
        if g > tau {
            weights[k] = 1.0;
            mass += bl.a;
        } else if g.abs() <= tau && bl.a > 0.0 {
            kernel.push(k);
        }
    }
    kernel.sort_by(|&i, &j| blocks.blocks[j].a.total_cmp(&blocks.blocks[i].a));
    let mut need = target - mass;
    for k in kernel {
        if need <= 0.0 {
            break;
        }
        let a = blocks.blocks[k].a;
        let t = (need / a).clamp(0.0, 1.0);
        weights[k] = t;
        need -= t * a;
    }
    weights
}

fn eval_f(r: f64, r0: &ComplexMatrix, r1: &ComplexMatrix, eps: f64) -> Result<f64> {
    let m = &r0.scale(r) - r1;
    let spec = linalg::eig_unchecked(&m)?;
    Ok((1.0 - eps) * r - linalg::positive_sum(&spec.eigenvalues))
}

fn solve_general(r0: &ComplexMatrix, r1: &ComplexMatrix, eps: f64) -> Result<Solution> {
    let target = 1.0 - eps;
    let k = r0.rows();

    // Weight of rho0 on the kernel of rho1.
    let spec1 = linalg::eig_unchecked(r1)?;
    let top1 = spec1.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let ker1: Vec<Vec<C64>> = (0..k)
        .filter(|&i| spec1.eigenvalues[i] <= KERNEL_REL_TOL * top1)
        .map(|i| spec1.eigenvector(i))
        .collect();
    let ker_mass: f64 = ker1.iter().map(|v| r0.sandwich(v, v).re).sum();
    if !ker1.is_empty() && ker_mass >= target - KERNEL_REL_TOL * eps {
        let test = np_test(r0, r1, 0.0, target)?;
        return Ok(Solution {
            f_star: 0.0,
            r_star: 0.0,
            r_test: 0.0,
            flat: None,
            test,
            path: SolverPath::ZeroBeta,
            candidates: 1,
            iterations: 0,
        });
    }

    // Breakpoints: with S = rho0 + rho1 = U L U^dag and W = U L^{-1/2},
    // r rho0 - rho1 is congruent to (r + 1) T - I where T = W^dag rho0 W.
    let s = r0 + r1;
    let spec_s = linalg::eig_unchecked(&s)?;
    let w = ComplexMatrix::from_fn(k, k, |i, j| {
        spec_s.eigenvectors[(i, j)] / spec_s.eigenvalues[j].max(f64::MIN_POSITIVE).sqrt()
    });
    let t = r0.compress(&w);
    let r_hi = 1.0 / eps;
    let mut cands = vec![0.0, r_hi];
    for tv in linalg::eig_unchecked(&t)?.eigenvalues {
        if tv > 0.0 {
            let r = (1.0 - tv) / tv;
            if r > 0.0 && r < r_hi {
                cands.push(r);
            }
        }
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let values: Vec<f64> = cands
        .iter()
        .map(|&r| eval_f(r, r0, r1, eps))
        .collect::<Result<_>>()?;
    let best = (0..cands.len())
        .max_by(|&i, &j| values[i].total_cmp(&values[j]).then(j.cmp(&i)))
        .unwrap();
    // Candidates tied with the best up to rounding widen the bracket, since
    // breakpoints closer than the noise floor cannot be ordered by value.
    let noise = 16.0 * f64::EPSILON * (1.0 + values[best].abs());
    let tied = |i: usize| values[i] >= values[best] - noise;
    let first = (0..cands.len()).find(|&i| tied(i)).unwrap();
    let last = (0..cands.len()).rev().find(|&i| tied(i)).unwrap();
    let lo = cands[first.saturating_sub(1)];
    let hi = cands[(last + 1).min(cands.len() - 1)];
    let mut r_found = cands[best];
    let mut f_star = values[best];
    let mut iterations = 0;
    if hi > lo {
        let g = golden_max(
            |r| eval_f(r, r0, r1, eps),
            lo,
            hi,
            SEARCH_REL_WIDTH,
            MAX_SEARCH_ITER,
        )?;
        iterations = g.iterations;
        if g.fx > f_star + noise {
            r_found = g.x;
            f_star = g.fx;
        }
        // Function values pin a smooth maximum only to about sqrt(eps_mach);
        // the sign change of the slope pins it to full precision, which the
        // type-I constraint of the test needs.
        // An interior sign change is the maximizer by concavity; at the
        // bracket ends fall back to comparing values.
        let r_pol = slope_root(r0, r1, eps, lo, hi)?;
        let f_pol = eval_f(r_pol, r0, r1, eps)?;
        let margin = 64.0 * f64::EPSILON * hi.abs().max(1.0);
        let interior = r_pol > lo + margin && r_pol < hi - margin;
        if interior || f_pol >= f_star - noise {
            r_found = r_pol;
            f_star = f_star.max(f_pol);
        }
    }

    // A flat top shows up as an unchanged value a macroscopic step away.
    let h = 1e-4 * (1.0 + r_found);
    let flat_tol = 1e-13 * (1.0 + f_star.abs());
    let is_top = |r: f64| -> Result<bool> { Ok(eval_f(r, r0, r1, eps)? >= f_star - flat_tol) };
    let mut flat = None;
    let mut r_star = r_found;
    let left_probe = (r_found - h).max(lo);
    let right_probe = (r_found + h).min(hi);
    if (left_probe < r_found && is_top(left_probe)?)
        || (right_probe > r_found && is_top(right_probe)?)
    {
        let edge = |inside: f64, outside: f64| -> Result<f64> {
            let (mut a, mut b) = (inside, outside);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if is_top(m)? {
                    a = m;
                } else {
                    b = m;
                }
            }
            Ok(a)
        };
        let left = if is_top(lo)? { lo } else { edge(r_found, lo)? };
        let right = if is_top(hi)? { hi } else { edge(r_found, hi)? };
        if right > left {
            flat = Some((left, right));
            r_star = left;
        }
    }

    let test = np_test(r0, r1, r_found, target)?;
    Ok(Solution {
        f_star,
        r_star,
        r_test: r_found,
        flat,
        test,
        path: SolverPath::General,
        candidates: cands.len(),
        iterations,
    })
}

// Right derivative (1 - eps) - Tr(rho0 P_+(r)), nonincreasing in r.
fn slope(r: f64, r0: &ComplexMatrix, r1: &ComplexMatrix, eps: f64) -> Result<f64> {
    let m = &r0.scale(r) - r1;
    let spec = linalg::eig_unchecked(&m)?;
    let mass: f64 = (0..spec.len())
        .filter(|&i| spec.eigenvalues[i] > 0.0)
        .map(|i| {
            let v = spec.eigenvector(i);
            r0.sandwich(&v, &v).re
        })
        .sum();
    Ok(1.0 - eps - mass)
}

// Bisection for the point where the slope changes sign.
fn slope_root(r0: &ComplexMatrix, r1: &ComplexMatrix, eps: f64, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..MAX_SEARCH_ITER {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if slope(m, r0, r1, eps)? > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

// Projector onto the positive part of r rho0 - rho1, plus a fractional
// weight on its kernel chosen to bring Tr(rho0 E) up to `target`.
fn np_test(r0: &ComplexMatrix, r1: &ComplexMatrix, r: f64, target: f64) -> Result<ComplexMatrix> {
    let k = r0.rows();
    let m = &r0.scale(r) - r1;
    let spec = linalg::eig_unchecked(&m)?;
    let scale = spec
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, l| acc.max(l.abs()))
        .max(1e-300);
    let tau = 1e-11 * scale.max(1.0);
    let mut e = ComplexMatrix::zeros(k, k);
    let mut kernel = Vec::new();
    for (i, &lam) in spec.eigenvalues.iter().enumerate() {
        if lam > tau {
            e = &e + &ComplexMatrix::outer(&spec.eigenvector(i));
        } else if lam.abs() <= tau {
            kernel.push(spec.eigenvector(i));
        }
    }
    let mut need = target - r0.trace_product(&e).re;
    if need > 0.0 && !kernel.is_empty() {
        let kb = ComplexMatrix::from_columns(k, &kernel);
        let ks = linalg::eig_unchecked(&r0.compress(&kb))?;
        for i in (0..kernel.len()).rev() {
            let c = ks.eigenvalues[i];
            if need <= 0.0 || c <= 0.0 {
                break;
            }
            let t = (need / c).clamp(0.0, 1.0);
            let y = kb.apply(&ks.eigenvector(i));
            e = &e + &ComplexMatrix::outer(&y).scale(t);
            need -= t * c;
        }
    }
    Ok(e)
}

/// Quantum relative entropy `Tr rho (log2 rho - log2 sigma)`.
pub fn qre(rho: &DenseState, sigma: &DenseState) -> Result<ExtendedReal> {
    if rho.dim() != sigma.dim() {
        return invalid("qre needs states of equal dimension");
    }
    let sr = linalg::hermitian_eig(rho.rho())?;
    let ss = linalg::hermitian_eig(sigma.rho())?;
    let d = rho.dim();
    let mut acc = 0.0;
    for i in 0..d {
        let p = sr.eigenvalues[i];
        if p <= 1e-12 {
            continue;
        }
        acc += p * p.log2();
        let u = sr.eigenvector(i);
        for j in 0..d {
            let w = linalg::inner(&ss.eigenvector(j), &u).norm_sqr() * p;
            let q = ss.eigenvalues[j];
            if q < 1e-12 {
                if w > 1e-12 {
                    return Ok(ExtendedReal::PosInfinity);
                }
                continue;
            }
            acc -= w * q.log2();
        }
    }
    Ok(ExtendedReal::Finite(acc.max(0.0)))
}

/// Minimal average error `(1 - ||pi0 rho0 - pi1 rho1||_1) / 2` with priors
/// `(pi0, 1 - pi0)`.
pub fn symmetric_min_error(rho0n: &DenseState, rho1n: &DenseState, pi0: f64) -> Result<f64> {
    if !(pi0 > 0.0 && pi0 < 1.0) {
        return invalid(format!("prior pi0 = {pi0} is outside (0, 1)"));
    }
    check_pair(rho0n.rho(), rho1n.rho())?;
    let m = &rho0n.rho().scale(pi0) - &rho1n.rho().scale(1.0 - pi0);
    Ok((0.5 * (1.0 - linalg::trace_norm(&m)?)).max(0.0))
}

/// Outcome of the Chernoff minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffResult {
    /// `-log2 min_s Tr(rho0^s rho1^{1-s})`.
    pub exponent: ExtendedReal,
    pub s_star: f64,
    pub q_min: f64,
}

/// Quantum Chernoff exponent.
pub fn chernoff_exponent(rho0: &DenseState, rho1: &DenseState) -> Result<ExtendedReal> {
    Ok(chernoff(rho0, rho1)?.exponent)
}

/// Quantum Chernoff exponent with the minimizing `s`.
pub fn chernoff(rho0: &DenseState, rho1: &DenseState) -> Result<ChernoffResult> {
    if rho0.dim() != rho1.dim() {
        return invalid("chernoff needs states of equal dimension");
    }
    let s0 = linalg::hermitian_eig(rho0.rho())?;
    let s1 = linalg::hermitian_eig(rho1.rho())?;
    let d = rho0.dim();
    let supp = |vals: &[f64]| -> Vec<usize> { (0..d).filter(|&i| vals[i] > 1e-12).collect() };
    let (i0, i1) = (supp(&s0.eigenvalues), supp(&s1.eigenvalues));
    let mut terms = Vec::with_capacity(i0.len() * i1.len());
    let mut overlap = 0.0;
    for &i in &i0 {
        let u = s0.eigenvector(i);
        for &j in &i1 {
            let c = linalg::inner(&u, &s1.eigenvector(j)).norm_sqr();
            overlap += c;
            terms.push((s0.eigenvalues[i].ln(), s1.eigenvalues[j].ln(), c));
        }
    }
    if overlap <= 1e-12 {
        return Ok(ChernoffResult {
            exponent: ExtendedReal::PosInfinity,
            s_star: 0.5,
            q_min: 0.0,
        });
    }
    // Q(s) = sum a^s b^{1-s} |<u|w>|^2 is convex in s.
    let q = |s: f64| -> Result<f64> {
        Ok(terms
            .iter()
            .map(|&(la, lb, c)| c * (s * la + (1.0 - s) * lb).exp())
            .sum())
    };
    let g = golden_min(q, 0.0, 1.0, 1e-12, MAX_SEARCH_ITER)?;
    let (mut s_star, mut q_min) = (g.x, g.fx);
    for s in [0.0, 1.0] {
        let v = q(s)?;
        if v < q_min {
            s_star = s;
            q_min = v;
        }
    }
    let q_min = q_min.min(1.0);
    Ok(ChernoffResult {
        exponent: ExtendedReal::Finite((-q_min.log2()).max(0.0)),
        s_star,
        q_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{twirl_dense, PureQubit};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ket(amps: &[(f64, f64)]) -> DenseState {
        let v: Vec<C64> = amps.iter().map(|&(re, im)| C64::new(re, im)).collect();
        DenseState::new((v.len() as f64).log2() as u32, ComplexMatrix::outer(&v)).unwrap()
    }

    fn zero() -> DenseState {
        ket(&[(1.0, 0.0), (0.0, 0.0)])
    }

    fn one() -> DenseState {
        ket(&[(0.0, 0.0), (1.0, 0.0)])
    }

    fn plus() -> DenseState {
        ket(&[(FRAC_1_SQRT_2, 0.0), (FRAC_1_SQRT_2, 0.0)])
    }

    fn diag(v: &[f64]) -> DenseState {
        DenseState::new((v.len() as f64).log2() as u32, ComplexMatrix::from_diag(v)).unwrap()
    }

    fn p75_vs_mm(n: u32) -> (DenseState, DenseState) {
        let q = PureQubit::new(0.75, 0.0).unwrap();
        let s0 = twirl_dense(&DenseState::pure_power(&q, n, 1024).unwrap());
        let s1 = DenseState::maximally_mixed(n, 1024).unwrap();
        (s0, s1)
    }

    #[test]
    fn error_pair_examples() {
        let (a, b) = (zero(), plus());
        let ep = error_pair(&a, &b, &BinaryTest::accept_all(2)).unwrap();
        assert_eq!((ep.alpha, ep.beta), (0.0, 1.0));
        let ep = error_pair(&a, &b, &BinaryTest::reject_all(2)).unwrap();
        assert_eq!((ep.alpha, ep.beta), (1.0, 0.0));
        let e = BinaryTest::new(zero().rho().clone()).unwrap();
        let ep = error_pair(&a, &b, &e).unwrap();
        assert!(ep.alpha.abs() < 1e-15 && (ep.beta - 0.5).abs() < 1e-15);
        assert!(error_pair(&a, &diag(&[0.25; 4]), &e).is_err());
        assert!(BinaryTest::new(ComplexMatrix::from_diag(&[1.5, 0.0])).is_err());
    }

    #[test]
    fn dual_f_examples() {
        let (a, b) = (zero(), plus());
        assert_eq!(dual_f(0.0, &a, &b, 0.3).unwrap(), 0.0);
        assert!((dual_f(1.0, &a, &a, 0.3).unwrap() - 0.7).abs() < 1e-15);
        assert!(dual_f(1.0, &a, &b, 0.0).is_err());
        assert!(dual_f(1.0, &a, &b, 1.0).is_err());
        assert!(dual_f(-1.0, &a, &b, 0.5).is_err());

        // right end of the middle linear piece: 2^{-n} / w_odd
        let (s0, s1) = p75_vs_mm(4);
        let r2 = (1.0 / 16.0) / 0.468_75;
        let f = dual_f(r2, &s0, &s1, 0.1).unwrap();
        assert!((f - 0.111_666_666_666_666_7).abs() < 1e-12, "{f}");
    }

    #[test]
    fn dual_f_matches_trace_norm_form() {
        let (a, b) = (plus(), diag(&[0.9, 0.1]));
        for r in [0.0, 0.3, 1.0, 2.5, 7.0] {
            let m = &a.rho().scale(r) - b.rho();
            let alt = 0.5 * (1.0 + (1.0 - 2.0 * 0.2) * r - linalg::trace_norm(&m).unwrap());
            assert!((dual_f(r, &a, &b, 0.2).unwrap() - alt).abs() < 1e-10);
        }
    }

    #[test]
    fn beta_min_examples() {
        let a = plus();
        let r = beta_min(&a, &a, 0.3).unwrap();
        assert!((r.beta_min - 0.7).abs() < 1e-12);
        assert!((r.r_star - 1.0).abs() < 1e-12);

        let r = beta_min(&zero(), &one(), 0.2).unwrap();
        assert_eq!(r.beta_min, 0.0);
        assert_eq!(r.dhe, ExtendedReal::PosInfinity);
        assert_eq!(r.diagnostics.path, SolverPath::ZeroBeta);

        let (s0, s1) = p75_vs_mm(4);
        let r = beta_min(&s0, &s1, 0.1).unwrap();
        assert!((r.beta_min - 0.111_666_666_666_666_7).abs() < 1e-12);
        assert!((r.dhe.to_f64() - 3.1627).abs() < 1e-4);
        assert!(r.diagnostics.alpha <= 0.1 + 1e-9);
        assert!(beta_min(&s0, &s1, 0.0).is_err());
    }

    #[test]
    fn beta_min_general_path_against_qubit_closed_form() {
        // Two pure qubit states: beta = (sqrt((1-eps) F) - sqrt(eps (1-F)))^2
        // when eps < 1 - F, zero otherwise, with F the fidelity.
        let eps = 0.05;
        let r = beta_min(&zero(), &plus(), eps).unwrap();
        let fid: f64 = 0.5;
        let expect = ((1.0 - eps) * fid).sqrt() - (eps * (1.0 - fid)).sqrt();
        assert_eq!(r.diagnostics.path, SolverPath::General);
        assert!(
            (r.beta_min - expect * expect).abs() < 1e-10,
            "{}",
            r.beta_min
        );
        assert!(r.diagnostics.duality_gap < 1e-10);
    }

    #[test]
    fn flat_dual_reports_interval() {
        // Block ratios 1/4 and 7/4 with the budget exactly saturated by the
        // first block: every r in between maximizes the dual.
        let a = diag(&[0.5, 0.5]);
        let b = diag(&[0.125, 0.875]);
        let r = beta_min(&a, &b, 0.5).unwrap();
        let (lo, hi) = r.diagnostics.flat_interval.expect("flat top");
        assert!((lo - 0.25).abs() < 1e-12 && (hi - 1.75).abs() < 1e-12);
        assert_eq!(r.r_star, lo);
        assert!((r.beta_min - 0.125).abs() < 1e-12);
    }

    #[test]
    fn dhe_examples() {
        let a = plus();
        assert!((dhe(&a, &a, 0.5).unwrap().to_f64() - 1.0).abs() < 1e-12);
        assert!(dhe(&zero(), &one(), 0.5).unwrap().is_infinite());
    }

    #[test]
    fn qre_examples() {
        let a = plus();
        assert!(qre(&a, &a).unwrap().to_f64().abs() < 1e-10);
        assert!((qre(&zero(), &diag(&[0.5, 0.5])).unwrap().to_f64() - 1.0).abs() < 1e-12);
        assert!(qre(&zero(), &one()).unwrap().is_infinite());
    }

    #[test]
    fn symmetric_error_examples() {
        assert!((symmetric_min_error(&plus(), &plus(), 0.5).unwrap() - 0.5).abs() < 1e-12);
        assert!(symmetric_min_error(&zero(), &one(), 0.5).unwrap().abs() < 1e-12);
        let v = symmetric_min_error(&zero(), &plus(), 0.5).unwrap();
        assert!((v - 0.146_446_609_406_726_24).abs() < 1e-9);
        assert!(symmetric_min_error(&zero(), &plus(), 1.0).is_err());
    }

    #[test]
    fn chernoff_examples() {
        assert!(chernoff_exponent(&plus(), &plus()).unwrap().to_f64().abs() < 1e-12);
        let c = chernoff_exponent(&zero(), &plus()).unwrap().to_f64();
        assert!((c - 1.0).abs() < 1e-9);
        // Oracle: dense scan of 0.5 (0.9^s 0.1^{1-s} + 0.1^s 0.9^{1-s}) over s.
        let r = chernoff(&diag(&[0.5, 0.5]), &diag(&[0.9, 0.1])).unwrap();
        assert!((r.exponent.to_f64() - 0.162_126).abs() < 1e-6, "{:?}", r);
        assert!((r.s_star - 0.5416).abs() < 1e-3);
        assert!(chernoff_exponent(&zero(), &one()).unwrap().is_infinite());
    }
}
