//! Qubit states, their n-copy tensor powers, the parity operator and
//! Z2-twirling.
//!
//! Computational basis strings are indexed with the first qubit as the most
//! significant bit, matching [`crate::linalg::kron`]. The twirl of an n-copy
//! pure state lives on the symmetric subspace and is stored as two branch
//! vectors over the Dicke basis `|v_j>`, `j = 0..=n`; even `j` for the
//! `+1` parity branch, odd `j` for the `-1` branch.

use std::f64::consts::TAU;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, ComplexMatrix, C64, DEFAULT_DIM_CAP};

/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a density matrix.
pub const PSD_TOL: f64 = 1e-10;

/// `sqrt(p)|0> + e^{i phi} sqrt(1-p)|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureQubit {
    p: f64,
    phi: f64,
}

impl PureQubit {
    /// `p` is the weight on `|0>`; `phi` is reduced into `[0, 2pi)`. The
    /// phase is dropped for the basis states, where it is global.
    pub fn new(p: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return invalid(format!("p = {p} is outside [0, 1]"));
        }
        if !phi.is_finite() {
            return invalid(format!("phase {phi} is not finite"));
        }
        let phi = if p == 0.0 || p == 1.0 {
            0.0
        } else {
            let r = phi.rem_euclid(TAU);
            if r >= TAU {
                0.0
            } else {
                r
            }
        };
        Ok(Self { p, phi })
    }

    /// `|0>` for `bit == 0`, `|1>` otherwise.
    pub fn basis(bit: u8) -> Self {
        Self {
            p: if bit == 0 { 1.0 } else { 0.0 },
            phi: 0.0,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `2p - 1`.
    pub fn delta(&self) -> f64 {
        2.0 * self.p - 1.0
    }

    /// `Some(0)` for `|0>`, `Some(1)` for `|1>`.
    pub fn basis_bit(&self) -> Option<u8> {
        if self.p == 1.0 {
            Some(0)
        } else if self.p == 0.0 {
            Some(1)
        } else {
            None
        }
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [
            C64::new(self.p.sqrt(), 0.0),
            C64::from_polar((1.0 - self.p).sqrt(), self.phi),
        ]
    }

    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes())
    }
}

/// A vector in the span of the Dicke states, stored as `(j, amplitude)`
/// pairs with increasing `j`. Entries with zero amplitude are omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchVector {
    n: u32,
    entries: Vec<(u32, C64)>,
}

impl BranchVector {
    pub fn new(n: u32, mut entries: Vec<(u32, C64)>) -> Result<Self> {
        if let Some(&(j, _)) = entries.iter().find(|(j, _)| *j > n) {
            return invalid(format!("Dicke index {j} exceeds n = {n}"));
        }
        entries.sort_by_key(|(j, _)| *j);
        entries.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        entries.retain(|(_, a)| *a != C64::new(0.0, 0.0));
        Ok(Self { n, entries })
    }

    pub fn zero(n: u32) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    /// The Dicke state `|v_j>` itself.
    pub fn dicke(n: u32, j: u32) -> Result<Self> {
        Self::new(n, vec![(j, C64::new(1.0, 0.0))])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn entries(&self) -> &[(u32, C64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of Dicke components carrying weight.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn amplitude(&self, j: u32) -> C64 {
        self.entries
            .iter()
            .find(|(k, _)| *k == j)
            .map_or(C64::new(0.0, 0.0), |(_, a)| *a)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() && b < other.entries.len() {
            let (ja, za) = self.entries[a];
            let (jb, zb) = other.entries[b];
            match ja.cmp(&jb) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += za.conj() * zb;
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, z)| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: C64, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|&(j, z)| (j, s * z)));
        Self::new(self.n, entries).expect("indices already validated")
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self::new(
            self.n,
            self.entries.iter().map(|&(j, z)| (j, s * z)).collect(),
        )
        .expect("indices already validated")
    }

    /// Expands into the `2^n`-dimensional computational basis.
    pub fn to_dense(&self, cap: usize) -> Result<Vec<C64>> {
        let dim = dense_dim(self.n, cap, "branch vector")?;
        let ln_fact = ln_factorials(self.n);
        let per_string: Vec<C64> = (0..=self.n)
            .map(|j| {
                let c = (0.5 * ln_binomial(&ln_fact, self.n, j)).exp();
                self.amplitude(j) / c
            })
            .collect();
        Ok((0..dim)
            .map(|s| per_string[(s as u64).count_ones() as usize])
            .collect())
    }
}

/// The Z2-twirl of `|psi><psi|^{(x) n}` for a pure qubit,
/// `w_even |0_p><0_p| + w_odd |1_p><1_p|`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwirledState {
    pub n: u32,
    pub delta: f64,
    pub w_even: f64,
    pub w_odd: f64,
    pub v_even: BranchVector,
    pub v_odd: BranchVector,
}

impl TwirledState {
    /// Dense `2^n x 2^n` density matrix.
    pub fn to_dense(&self, cap: usize) -> Result<DenseState> {
        let dim = dense_dim(self.n, cap, "twirled state")?;
        let mut rho = ComplexMatrix::zeros(dim, dim);
        for (w, v) in [(self.w_even, &self.v_even), (self.w_odd, &self.v_odd)] {
            if w == 0.0 || v.is_zero() {
                continue;
            }
            let dense = v.to_dense(cap)?;
            rho = &rho + &ComplexMatrix::outer(&dense).scale(w);
        }
        Ok(DenseState::from_parts(self.n, rho))
    }
}

/// A density matrix on `n` qubits.
#[derive(Debug, Clone)]
pub struct DenseState {
    n: u32,
    rho: ComplexMatrix,
}

impl DenseState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n: u32, rho: ComplexMatrix) -> Result<Self> {
        let dim = 1usize
            .checked_shl(n)
            .ok_or_else(|| Error::Validation(format!("n = {n} is too large")))?;
        if rho.rows() != dim || rho.cols() != dim {
            return invalid(format!(
                "state on {n} qubits must be {dim}x{dim}, got {}x{}",
                rho.rows(),
                rho.cols()
            ));
        }
        if !rho.is_hermitian(linalg::HERMITIAN_TOL) {
            return invalid("density matrix is not Hermitian");
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return invalid(format!("density matrix has trace {tr}"));
        }
        let min_eig = linalg::hermitian_eig(&rho)?.eigenvalues[0];
        if min_eig < -PSD_TOL {
            return invalid(format!("density matrix has eigenvalue {min_eig:e}"));
        }
        Ok(Self { n, rho })
    }

    // For constructions that are states by design.
    pub(crate) fn from_parts(n: u32, rho: ComplexMatrix) -> Self {
        Self { n, rho }
    }

    /// `(|psi><psi|)^{(x) n}`.
    pub fn pure_power(q: &PureQubit, n: u32, cap: usize) -> Result<Self> {
        let rho = linalg::kron_power_capped(&q.density(), n, cap)?;
        Ok(Self::from_parts(n, rho))
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: u32, cap: usize) -> Result<Self> {
        if n == 0 {
            return invalid("n must be at least 1");
        }
        let dim = dense_dim(n, cap, "maximally mixed state")?;
        Ok(Self::from_parts(
            n,
            ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        ))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }
}

fn dense_dim(n: u32, cap: usize, what: &'static str) -> Result<usize> {
    match 1usize.checked_shl(n) {
        Some(d) if n < usize::BITS && d <= cap => Ok(d),
        d => Err(Error::ResourceLimit {
            what,
            requested: if n < usize::BITS {
                d.unwrap_or(usize::MAX)
            } else {
                usize::MAX
            },
            cap,
        }),
    }
}

/// `ln k!` for `k = 0..=n`.
pub(crate) fn ln_factorials(n: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += f64::from(k).ln();
        out.push(acc);
    }
    out
}

pub(crate) fn ln_binomial(ln_fact: &[f64], n: u32, j: u32) -> f64 {
    ln_fact[n as usize] - ln_fact[j as usize] - ln_fact[(n - j) as usize]
}

// k * ln(x) with the convention 0 * ln(0) = 0.
fn ln_pow(x: f64, k: u32) -> f64 {
    if k == 0 {
        0.0
    } else {
        f64::from(k) * x.ln()
    }
}

/// Signed `(2p-1)^n` together with the branch weights
/// `((1 + (2p-1)^n)/2, (1 - (2p-1)^n)/2)`, computed without cancellation.
pub fn parity_weights(p: f64, n: u32) -> (f64, f64, f64) {
    let d = 2.0 * p - 1.0;
    if d == 0.0 {
        return (0.0, 0.5, 0.5);
    }
    // ln|2p-1| through log1p so that p near 0 or 1 keeps full precision.
    let ln_abs = if d > 0.0 {
        (-2.0 * (1.0 - p)).ln_1p()
    } else {
        (-2.0 * p).ln_1p()
    };
    let x = f64::from(n) * ln_abs;
    let pow_abs = x.exp();
    let one_minus = -x.exp_m1();
    if d < 0.0 && n % 2 == 1 {
        (-pow_abs, 0.5 * one_minus, 0.5 * (1.0 + pow_abs))
    } else {
        (pow_abs, 0.5 * (1.0 + pow_abs), 0.5 * one_minus)
    }
}

/// Normalized uniform superposition of the `n`-qubit strings with `j` ones.
pub fn dicke_vector(n: u32, j: u32) -> Result<Vec<C64>> {
    if j > n {
        return invalid(format!("Dicke index j = {j} exceeds n = {n}"));
    }
    BranchVector::dicke(n, j)?.to_dense(DEFAULT_DIM_CAP)
}

/// `(-1)^{weight(s)}` for each basis string `s`.
pub fn parity_signs(n: u32, cap: usize) -> Result<Vec<f64>> {
    let dim = dense_dim(n, cap, "parity operator")?;
    Ok((0..dim)
        .map(|s| {
            if (s as u64).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        })
        .collect())
}

/// The diagonal parity operator on `n` qubits.
pub fn parity_operator(n: u32) -> Result<ComplexMatrix> {
    if n == 0 {
        return invalid("parity operator needs n >= 1");
    }
    Ok(ComplexMatrix::from_diag(&parity_signs(n, DEFAULT_DIM_CAP)?))
}

/// `rho -> (rho + w rho w) / 2` on a dense state.
pub fn twirl_dense(state: &DenseState) -> DenseState {
    let dim = state.dim();
    let signs: Vec<f64> = (0..dim)
        .map(|s| {
            if (s as u64).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    let rho = state.rho();
    let out = ComplexMatrix::from_fn(dim, dim, |i, j| {
        rho[(i, j)] * (0.5 * (1.0 + signs[i] * signs[j]))
    });
    DenseState::from_parts(state.n, out)
}

/// Closed-form twirl of `|psi><psi|^{(x) n}`.
///
/// `|0_p>` carries amplitude `sqrt(C(n,j) p^{n-j} (1-p)^j / w_even) e^{i j phi}`
/// on even `j`, and `|1_p>` the same on odd `j` with `w_odd`. For the basis
/// states one branch is empty: its weight is zero and its vector is the zero
/// vector.
pub fn twirl_pure_analytic(q: &PureQubit, n: u32) -> Result<TwirledState> {
    if n == 0 {
        return invalid("number of copies must be at least 1");
    }
    let (_, w_even, w_odd) = parity_weights(q.p, n);
    let ln_fact = ln_factorials(n);
    let ln_p = |k: u32| ln_pow(q.p, k);
    let ln_q = |k: u32| ln_pow(1.0 - q.p, k);
    let branch = |parity: u32, w: f64| -> Result<BranchVector> {
        if w == 0.0 {
            return Ok(BranchVector::zero(n));
        }
        let ln_w = w.ln();
        let entries = (0..=n)
            .filter(|j| j % 2 == parity)
            .filter_map(|j| {
                let ln_mod2 = ln_binomial(&ln_fact, n, j) + ln_p(n - j) + ln_q(j) - ln_w;
                if ln_mod2 == f64::NEG_INFINITY {
                    return None;
                }
                let modulus = (0.5 * ln_mod2).exp();
                Some((j, C64::from_polar(modulus, f64::from(j) * q.phi)))
            })
            .collect();
        BranchVector::new(n, entries)
    };
    Ok(TwirledState {
        n,
        delta: q.delta(),
        w_even,
        w_odd,
        v_even: branch(0, w_even)?,
        v_odd: branch(1, w_odd)?,
    })
}

/// Twirling fixes `I / 2^n`.
pub fn twirl_maxmixed(n: u32) -> Result<DenseState> {
    DenseState::maximally_mixed(n, DEFAULT_DIM_CAP)
}

/// Dimensions of the even- and odd-parity subspaces of `n` qubits.
pub fn even_odd_dims(n: u32) -> Result<(u128, u128)> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if n > 127 {
        return Err(Error::ResourceLimit {
            what: "even_odd_dims",
            requested: usize::MAX,
            cap: 127,
        });
    }
    // Pascal row in exact integer arithmetic.
    let mut row: Vec<u128> = vec![1];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for k in 1..row.len() {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
    }
    let even = row.iter().step_by(2).sum();
    let odd = row.iter().skip(1).step_by(2).sum();
    Ok((even, odd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;

    fn pure(p: f64, phi: f64) -> PureQubit {
        PureQubit::new(p, phi).unwrap()
    }

    #[test]
    fn pure_qubit_canonicalizes_phase() {
        assert_eq!(pure(1.0, 2.0).phi(), 0.0);
        assert_eq!(pure(0.0, -1.0).phi(), 0.0);
        assert!((pure(0.5, -1.0).phi() - (TAU - 1.0)).abs() < 1e-15);
        assert!(PureQubit::new(1.2, 0.0).is_err());
        assert!(PureQubit::new(0.5, f64::NAN).is_err());
        assert_eq!(PureQubit::basis(0).basis_bit(), Some(0));
        assert_eq!(PureQubit::basis(1).basis_bit(), Some(1));
    }

    #[test]
    fn dicke_examples() {
        let v = dicke_vector(1, 0).unwrap();
        assert_eq!(v, vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);

        let v = dicke_vector(2, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (got, want) in v.iter().zip([0.0, h, h, 0.0]) {
            assert!((got.re - want).abs() < 1e-15 && got.im == 0.0);
        }

        // enumeration oracle: strings of weight 2 out of 3 bits
        let v = dicke_vector(3, 2).unwrap();
        for (s, got) in v.iter().enumerate() {
            let want = if (s as u32).count_ones() == 2 {
                1.0 / 3f64.sqrt()
            } else {
                0.0
            };
            assert!((got.re - want).abs() < 1e-15);
        }
        assert!((linalg::vec_norm(&dicke_vector(7, 3).unwrap()) - 1.0).abs() < 1e-12);
        assert!(dicke_vector(2, 3).is_err());
    }

    #[test]
    fn parity_operator_examples() {
        assert_eq!(
            parity_operator(1).unwrap(),
            ComplexMatrix::from_diag(&[1.0, -1.0])
        );
        assert_eq!(
            parity_operator(2).unwrap(),
            ComplexMatrix::from_diag(&[1.0, -1.0, -1.0, 1.0])
        );
        for n in 1..=6 {
            let w = parity_operator(n).unwrap();
            assert_eq!(&w * &w, ComplexMatrix::identity(1 << n));
        }
        assert!(matches!(
            parity_operator(11),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn twirl_dense_fixed_points() {
        let zero = DenseState::pure_power(&PureQubit::basis(0), 3, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(twirl_dense(&zero).rho(), zero.rho());
        for n in 1..=6 {
            let mm = twirl_maxmixed(n).unwrap();
            assert_eq!(twirl_dense(&mm).rho(), mm.rho());
        }
        assert_eq!(
            twirl_maxmixed(1).unwrap().rho(),
            &ComplexMatrix::from_diag(&[0.5, 0.5])
        );
        assert_eq!(
            twirl_maxmixed(3).unwrap().rho(),
            &ComplexMatrix::identity(8).scale(0.125)
        );
    }

    #[test]
    fn twirl_of_two_copies_has_expected_even_block() {
        let rho = DenseState::pure_power(&pure(0.75, 0.0), 2, DEFAULT_DIM_CAP).unwrap();
        let tw = twirl_dense(&rho);
        let even_trace: f64 = [0usize, 3].iter().map(|&i| tw.rho()[(i, i)].re).sum();
        assert!((even_trace - 0.625).abs() < 1e-14);
        // block diagonal: even-odd couplings vanish
        assert_eq!(tw.rho()[(0, 1)], C64::new(0.0, 0.0));
        assert_eq!(tw.rho()[(3, 2)], C64::new(0.0, 0.0));
    }

    #[test]
    fn analytic_twirl_weights() {
        for n in [1, 4, 9] {
            let t = twirl_pure_analytic(&PureQubit::basis(0), n).unwrap();
            assert_eq!(t.w_even, 1.0);
            assert_eq!(t.w_odd, 0.0);
            assert!(t.v_odd.is_zero());
            assert_eq!(t.v_even.entries(), &[(0, C64::new(1.0, 0.0))]);
        }
        let t = twirl_pure_analytic(&pure(0.5, 1.0), 3).unwrap();
        assert!((t.w_even - 0.5).abs() < 1e-15 && (t.w_odd - 0.5).abs() < 1e-15);
        let t = twirl_pure_analytic(&pure(0.75, 0.0), 2).unwrap();
        assert!((t.w_even - 0.625).abs() < 1e-15 && (t.w_odd - 0.375).abs() < 1e-15);
        assert!(twirl_pure_analytic(&pure(0.75, 0.0), 0).is_err());
    }

    #[test]
    fn basis_one_lands_in_parity_branch_of_n() {
        let t = twirl_pure_analytic(&PureQubit::basis(1), 3).unwrap();
        assert_eq!((t.w_even, t.w_odd), (0.0, 1.0));
        assert_eq!(t.v_odd.entries(), &[(3, C64::new(1.0, 0.0))]);
        let t = twirl_pure_analytic(&PureQubit::basis(1), 4).unwrap();
        assert_eq!((t.w_even, t.w_odd), (1.0, 0.0));
    }

    #[test]
    fn branch_vectors_carry_dicke_phases() {
        let phi = 0.9;
        let t = twirl_pure_analytic(&pure(0.3, phi), 6).unwrap();
        for &(j, a) in t.v_even.entries().iter().chain(t.v_odd.entries()) {
            let expected = (f64::from(j) * phi).rem_euclid(TAU);
            let got = a.arg().rem_euclid(TAU);
            assert!((got - expected).abs() < 1e-12 || (got - expected).abs() > TAU - 1e-12);
        }
        assert!((t.v_even.norm() - 1.0).abs() < 1e-12);
        assert!((t.v_odd.norm() - 1.0).abs() < 1e-12);
        assert_eq!(t.v_even.inner(&t.v_odd), C64::new(0.0, 0.0));
    }

    #[test]
    fn branch_vector_dense_inner_products_agree() {
        let a = twirl_pure_analytic(&pure(0.3, 0.4), 5).unwrap();
        let b = twirl_pure_analytic(&pure(0.8, 1.9), 5).unwrap();
        let sparse = a.v_odd.inner(&b.v_odd);
        let dense = inner(
            &a.v_odd.to_dense(DEFAULT_DIM_CAP).unwrap(),
            &b.v_odd.to_dense(DEFAULT_DIM_CAP).unwrap(),
        );
        assert!((sparse - dense).norm() < 1e-14);
    }

    #[test]
    fn parity_weights_are_precise_near_the_poles() {
        let p = 1.0 - 1e-12;
        let h = 1.0 - p; // exactly representable
        let (d, we, wo) = parity_weights(p, 3);
        // 1 - (1 - 2h)^3 = 6h - 12h^2 + 8h^3
        assert!(((1.0 - d) - 6.0 * h).abs() < 1e-15);
        assert!((wo / (3.0 * h) - 1.0).abs() < 1e-10);
        assert!((we + wo - 1.0).abs() < 1e-15);
        let (d, we, wo) = parity_weights(0.25, 3);
        assert!((d + 0.125).abs() < 1e-15);
        assert!((we - 0.4375).abs() < 1e-15 && (wo - 0.5625).abs() < 1e-15);
    }

    #[test]
    fn even_odd_dims_examples() {
        assert_eq!(even_odd_dims(1).unwrap(), (1, 1));
        assert_eq!(even_odd_dims(2).unwrap(), (2, 2));
        assert_eq!(even_odd_dims(5).unwrap(), (16, 16));
        assert_eq!(even_odd_dims(100).unwrap(), (1u128 << 99, 1u128 << 99));
        assert!(even_odd_dims(0).is_err());
    }

    #[test]
    fn dense_state_validation() {
        assert!(DenseState::new(1, ComplexMatrix::from_diag(&[0.5, 0.5])).is_ok());
        assert!(DenseState::new(1, ComplexMatrix::from_diag(&[0.7, 0.5])).is_err());
        assert!(DenseState::new(1, ComplexMatrix::from_diag(&[1.5, -0.5])).is_err());
        assert!(DenseState::new(2, ComplexMatrix::from_diag(&[0.5, 0.5])).is_err());
    }
}
