//! Dense complex linear algebra for the small matrices used throughout the
//! crate: Hermitian eigendecomposition, trace norms, positive parts and
//! Kronecker products.
//!
//! Matrices are stored dense in row-major order. The largest objects handled
//! are `2^10 x 2^10` density matrices; everything on the analytic path is at
//! most four-dimensional.
//!
//! Trace-norm style functionals on large matrices first compress onto the
//! column space when the matrix is numerically low rank. Twirled pure states
//! have rank at most two, so differences of them can be handled without a
//! full `O(N^3)` eigendecomposition.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Complex scalar used everywhere.
pub type C64 = Complex64;

/// Maximum deviation from Hermiticity accepted by validating operations.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Residual bound for eigenpairs, relative to the matrix norm.
pub const EIG_RESIDUAL_TOL: f64 = 1e-10;

/// Default cap on the dimension of dense constructions (`2^10`).
pub const DEFAULT_DIM_CAP: usize = 1 << 10;

// Below this size a direct eigendecomposition is cheaper than a range finder.
const LOW_RANK_MIN_DIM: usize = 64;
// Relative column residual below which a direction is treated as absent.
const RANGE_REL_TOL: f64 = 1e-14;

const EIG_MAX_ITER: usize = 10_000;

/// A dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return invalid(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// The rank-one projector-like matrix `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, columns: &[Vec<C64>]) -> Self {
        Self::from_fn(n, columns.len(), |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation `|M[i,j] - conj(M[j,i])|`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_defect() <= tol
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// `self * v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `<u| self |v>`.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        let mv = self.apply(v);
        inner(u, &mv)
    }

    /// `V^dagger M V` for a matrix `V` with orthonormal columns.
    pub fn compress(&self, basis: &Self) -> Self {
        let mv = self * basis;
        &basis.adjoint() * &mv
    }

    /// `V M V^dagger`, the inverse of [`ComplexMatrix::compress`].
    pub fn lift(&self, basis: &Self) -> Self {
        let vm = basis * self;
        &vm * &basis.adjoint()
    }

    fn check_same_shape(&self, other: &Self, op: &str) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "{op}: shape mismatch {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs, "add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs, "sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `<u|v>`, conjugate-linear in the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

fn require_hermitian(m: &ComplexMatrix, op: &str) -> Result<()> {
    if !m.is_square() {
        return invalid(format!("{op}: matrix is {}x{}, not square", m.rows, m.cols));
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return invalid(format!(
            "{op}: matrix is not Hermitian (defect {defect:e} > {HERMITIAN_TOL:e})"
        ));
    }
    Ok(())
}

/// Full spectrum of a Hermitian matrix.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    require_hermitian(m, "hermitian_eig")?;
    eig_unchecked(m)
}

/// Eigendecomposition of the Hermitian part of `m`, without validation.
pub(crate) fn eig_unchecked(m: &ComplexMatrix) -> Result<Spectrum> {
    let n = m.rows;
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let h = m.hermitian_part();
    let dm = DMatrix::from_row_slice(n, n, &h.data);
    let eig = SymmetricEigen::try_new(dm, f64::EPSILON, EIG_MAX_ITER).ok_or_else(|| {
        Error::Numerical(format!(
            "Hermitian eigensolver did not converge on a {n}x{n} matrix"
        ))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Orthonormal basis of the column space of `m`, or `None` if the numerical
/// rank exceeds `max_rank`.
///
/// Columns are processed with modified Gram-Schmidt and one
/// re-orthogonalization pass; a residual below `rel_tol` times the largest
/// column norm is dropped.
pub(crate) fn range_basis(
    m: &ComplexMatrix,
    rel_tol: f64,
    max_rank: usize,
) -> Option<ComplexMatrix> {
    let n = m.rows;
    let scale = (0..m.cols)
        .map(|j| vec_norm(&m.column(j)))
        .fold(0.0_f64, f64::max);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    if scale == 0.0 {
        return Some(ComplexMatrix::zeros(n, 0));
    }
    for j in 0..m.cols {
        let mut v = m.column(j);
        for _ in 0..2 {
            for q in &basis {
                let c = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm > rel_tol * scale {
            v.iter_mut().for_each(|z| *z /= norm);
            basis.push(v);
            if basis.len() > max_rank {
                return None;
            }
        }
    }
    Some(ComplexMatrix::from_columns(n, &basis))
}

// Eigenvalues of a Hermitian matrix, restricted to its column space when that
// is much smaller than the full dimension. Zero eigenvalues outside the range
// are omitted, which leaves trace-norm type sums unchanged.
fn nonzero_spectrum_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.rows;
    if n > LOW_RANK_MIN_DIM {
        if let Some(q) = range_basis(m, RANGE_REL_TOL, n / 4) {
            let small = m.hermitian_part().compress(&q);
            return Ok(eig_unchecked(&small)?.eigenvalues);
        }
    }
    Ok(eig_unchecked(m)?.eigenvalues)
}

/// `||M||_1`, the sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    require_hermitian(m, "trace_norm")?;
    Ok(nonzero_spectrum_values(m)?.iter().map(|l| l.abs()).sum())
}

/// `Tr(M)_+`, the sum of the strictly positive eigenvalues.
pub fn positive_part_trace(m: &ComplexMatrix) -> Result<f64> {
    require_hermitian(m, "positive_part_trace")?;
    Ok(positive_sum(&nonzero_spectrum_values(m)?))
}

pub(crate) fn positive_sum(values: &[f64]) -> f64 {
    values.iter().filter(|&&l| l > 0.0).sum()
}

/// Orthonormal basis (as columns) of the support of a positive semidefinite
/// matrix: eigenvectors with eigenvalue above `rel_tol` times the largest.
pub fn support_basis(m: &ComplexMatrix, rel_tol: f64) -> Result<ComplexMatrix> {
    require_hermitian(m, "support_basis")?;
    let n = m.rows;
    if n > LOW_RANK_MIN_DIM {
        if let Some(q) = range_basis(m, RANGE_REL_TOL.max(rel_tol), n / 4) {
            // Clean up the range basis so the kept directions are eigenvectors.
            let small = m.hermitian_part().compress(&q);
            let spec = eig_unchecked(&small)?;
            let keep = kept_indices(&spec.eigenvalues, rel_tol);
            let rotated = &q * &spec.eigenvectors;
            let cols: Vec<Vec<C64>> = keep.iter().map(|&k| rotated.column(k)).collect();
            return Ok(ComplexMatrix::from_columns(n, &cols));
        }
    }
    let spec = eig_unchecked(m)?;
    let keep = kept_indices(&spec.eigenvalues, rel_tol);
    let cols: Vec<Vec<C64>> = keep.iter().map(|&k| spec.eigenvector(k)).collect();
    Ok(ComplexMatrix::from_columns(n, &cols))
}

fn kept_indices(values: &[f64], rel_tol: f64) -> Vec<usize> {
    let top = values.iter().fold(0.0_f64, |a, &b| a.max(b));
    (0..values.len())
        .filter(|&k| top > 0.0 && values[k] > rel_tol * top)
        .collect()
}

/// Kronecker product `A (x) B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |i, j| {
        a[(i / b.rows, j / b.cols)] * b[(i % b.rows, j % b.cols)]
    })
}

/// `A^{(x) n}` with the default dimension cap.
pub fn kron_power(a: &ComplexMatrix, n: u32) -> Result<ComplexMatrix> {
    kron_power_capped(a, n, DEFAULT_DIM_CAP)
}

pub fn kron_power_capped(a: &ComplexMatrix, n: u32, cap: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return invalid("kron_power needs n >= 1");
    }
    let requested = checked_pow(a.rows.max(a.cols), n);
    if requested.is_none_or(|d| d > cap) {
        return Err(Error::ResourceLimit {
            what: "kron_power",
            requested: requested.unwrap_or(usize::MAX),
            cap,
        });
    }
    let mut out = a.clone();
    for _ in 1..n {
        out = kron(&out, a);
    }
    Ok(out)
}

/// Kronecker power of a vector, `v^{(x) n}`.
pub fn kron_power_vec(v: &[C64], n: u32, cap: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return invalid("kron_power_vec needs n >= 1");
    }
    let requested = checked_pow(v.len(), n);
    if requested.is_none_or(|d| d > cap) {
        return Err(Error::ResourceLimit {
            what: "kron_power_vec",
            requested: requested.unwrap_or(usize::MAX),
            cap,
        });
    }
    let mut out = v.to_vec();
    for _ in 1..n {
        out = out
            .iter()
            .flat_map(|a| v.iter().map(move |b| a * b))
            .collect();
    }
    Ok(out)
}

fn checked_pow(base: usize, n: u32) -> Option<usize> {
    base.checked_pow(n)
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::test_support::hermitian;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trace_norm_is_sum_of_abs_eigenvalues(m in (1usize..=16).prop_flat_map(hermitian)) {
            let s = hermitian_eig(&m).unwrap();
            let direct: f64 = s.eigenvalues.iter().map(|l| l.abs()).sum();
            prop_assert!((trace_norm(&m).unwrap() - direct).abs() < 1e-10);
        }

        #[test]
        fn positive_parts_split_the_trace_norm(m in (1usize..=16).prop_flat_map(hermitian)) {
            let split = positive_part_trace(&m).unwrap() + positive_part_trace(&-&m).unwrap();
            prop_assert!((split - trace_norm(&m).unwrap()).abs() < 1e-10);
        }

        #[test]
        fn kron_is_bilinear(
            a in hermitian(2), a2 in hermitian(2), b in hermitian(3), s in -2.0..2.0f64,
        ) {
            let lhs = kron(&(&a + &a2.scale(s)), &b);
            let rhs = &kron(&a, &b) + &kron(&a2, &b).scale(s);
            prop_assert!((&lhs - &rhs).frobenius_norm() < 1e-12);
            let lhs = kron(&b, &(&a + &a2.scale(s)));
            let rhs = &kron(&b, &a) + &kron(&b, &a2).scale(s);
            prop_assert!((&lhs - &rhs).frobenius_norm() < 1e-12);
        }

        #[test]
        fn kron_of_diagonals_multiplies_spectra(
            x in prop::collection::vec(-3.0..3.0f64, 1..5),
            y in prop::collection::vec(-3.0..3.0f64, 1..5),
        ) {
            let k = kron(&ComplexMatrix::from_diag(&x), &ComplexMatrix::from_diag(&y));
            let mut want: Vec<f64> = x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect();
            want.sort_by(f64::total_cmp);
            let got = hermitian_eig(&k).unwrap().eigenvalues;
            prop_assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g - w).abs() < 1e-12);
            }
        }
    }
}
