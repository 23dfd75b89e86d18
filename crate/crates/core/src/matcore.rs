//! Dense complex matrix algebra used by every measure in the crate.
//!
//! Matrices are plain [`nalgebra::DMatrix`] values over [`Complex64`]. The
//! incoherent basis is always the basis in which a matrix is stored, so
//! dephasing is simply dropping the off-diagonal entries.
//!
//! Spectra come from `faer`: nalgebra's symmetric eigensolver returns NaN on
//! some sparse squeezing states.

use faer::Side;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Maximum entrywise |m - m^dagger| accepted as Hermitian.
pub const TOL_HERM: f64 = 1e-10;
/// Allowed trace deviation for density matrices.
pub const TOL_TRACE: f64 = 1e-10;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_SLACK: f64 = 1e-9;
/// Slack used when comparing two norms.
pub const NORM_SLACK: f64 = 1e-9;
/// Eigenvalues below this magnitude count as exactly zero in norm sums.
pub const EIG_ZERO: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Which factor of a bipartite system to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    hermiticity_residual(m) <= tol
}

fn ensure_square(m: &CMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

fn ensure_hermitian(m: &CMatrix) -> Result<()> {
    ensure_square(m)?;
    let residual = hermiticity_residual(m);
    if residual > TOL_HERM {
        return Err(Error::NonHermitian { residual });
    }
    Ok(())
}

/// Eigenvalues (descending) and matching orthonormal eigenvectors (columns).
#[derive(Clone, Debug)]
pub struct HermEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEigen {
    /// `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= v;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn herm_eigh(m: &CMatrix) -> Result<HermEigen> {
    let a = to_faer_hermitian(m)?;
    let eig = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::ConvergenceFailure)?;
    let (s, u) = (eig.S(), eig.U());
    let n = m.nrows();
    // faer sorts ascending.
    let values: Vec<f64> = (0..n).rev().map(|k| s[k].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| u[(i, n - 1 - j)]);
    finite(&values)?;
    Ok(HermEigen { values, vectors })
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn herm_eigvals(m: &CMatrix) -> Result<Vec<f64>> {
    let a = to_faer_hermitian(m)?;
    let mut values = a.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::ConvergenceFailure)?;
    values.reverse();
    finite(&values)?;
    Ok(values)
}

pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let a = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let values = a.singular_values().map_err(|_| Error::ConvergenceFailure)?;
    finite(&values)?;
    Ok(values)
}

/// Symmetrized copy so the solver sees an exactly Hermitian input.
fn to_faer_hermitian(m: &CMatrix) -> Result<faer::Mat<C64>> {
    ensure_hermitian(m)?;
    Ok(faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5))
}

fn finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::ConvergenceFailure)
    }
}

fn clamped_abs_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .map(f64::abs)
        .filter(|v| *v >= EIG_ZERO)
        .sum()
}

/// Trace norm. Hermitian inputs go through the eigendecomposition, everything
/// else through the SVD.
pub fn schatten1(m: &CMatrix) -> Result<f64> {
    if m.is_square() && is_hermitian(m, TOL_HERM) {
        Ok(clamped_abs_sum(herm_eigvals(m)?))
    } else {
        Ok(clamped_abs_sum(singular_values(m)?))
    }
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product, A index major.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Copy of `m` with every off-diagonal entry set to zero.
pub fn diagonal_part(m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if i == j {
            m[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Partial trace of a matrix on a `dim_a * dim_b` space.
pub fn partial_trace_matrix(m: &CMatrix, dim_a: usize, dim_b: usize, keep: Subsystem) -> CMatrix {
    debug_assert_eq!(m.nrows(), dim_a * dim_b);
    match keep {
        Subsystem::A => CMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    }
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
///
/// The optional split records a bipartite factorization `D = D_A * D_B` with
/// the A index major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    split: Option<(usize, usize)>,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::validate(&matrix)?;
        Ok(Self {
            matrix,
            split: None,
        })
    }

    pub fn bipartite(matrix: CMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::new(matrix)?.with_split(dim_a, dim_b)
    }

    /// Checks every density-matrix invariant, returning the first failure.
    pub fn validate(m: &CMatrix) -> Result<()> {
        ensure_square(m)?;
        if m.nrows() == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        ensure_hermitian(m)?;
        let tr = trace(m).re;
        if (tr - 1.0).abs() > TOL_TRACE {
            return Err(Error::NotNormalized { trace: tr });
        }
        let min_eigenvalue = *herm_eigvals(m)?.last().expect("non-empty");
        if min_eigenvalue < -PSD_SLACK {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(())
    }

    /// Skips validation for matrices that are density matrices by construction.
    pub(crate) fn from_trusted(matrix: CMatrix, split: Option<(usize, usize)>) -> Self {
        Self { matrix, split }
    }

    pub fn with_split(mut self, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || dim_a * dim_b != self.dim() {
            return Err(Error::InvalidSplit {
                a: dim_a,
                b: dim_b,
                dim: self.dim(),
            });
        }
        self.split = Some((dim_a, dim_b));
        Ok(self)
    }

    pub fn without_split(mut self) -> Self {
        self.split = None;
        self
    }

    /// `|psi><psi|` for a (not necessarily normalized) state vector.
    pub fn from_pure(amplitudes: &[C64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::DomainError("state vector has zero norm".into()));
        }
        let n = amplitudes.len();
        let m = CMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj() / (norm * norm));
        Ok(Self::from_trusted(m, None))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self::from_trusted(
            CMatrix::identity(dim, dim).scale(1.0 / dim as f64),
            None,
        ))
    }

    /// Convex combination `sum_n p_n rho_n`. Keeps the split of the first state.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::DomainError("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut total = 0.0;
        let mut m = CMatrix::zeros(dim, dim);
        for (p, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            if *p < 0.0 {
                return Err(Error::DomainError(format!("negative weight {p}")));
            }
            total += p;
            m += rho.matrix.scale(*p);
        }
        if (total - 1.0).abs() > TOL_TRACE {
            return Err(Error::DomainError(format!("weights sum to {total}")));
        }
        let mut out = Self::new(m)?;
        out.split = first.1.split;
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn split(&self) -> Option<(usize, usize)> {
        self.split
    }

    pub fn require_split(&self) -> Result<(usize, usize)> {
        self.split.ok_or(Error::MissingSplit)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)].norm() <= tol))
    }

    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix).re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        herm_eigvals(&self.matrix)
    }
}

pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let (a, b) = rho.require_split()?;
    Ok(DensityMatrix::from_trusted(
        partial_trace_matrix(rho.matrix(), a, b, keep),
        None,
    ))
}

/// Product of the two reduced states, `rho_A (x) rho_B`.
pub fn product_of_marginals(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let (a, b) = rho.require_split()?;
    let ra = partial_trace_matrix(rho.matrix(), a, b, Subsystem::A);
    let rb = partial_trace_matrix(rho.matrix(), a, b, Subsystem::B);
    Ok(DensityMatrix::from_trusted(tensor(&ra, &rb), Some((a, b))))
}

pub fn tensor_states(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_trusted(tensor(a.matrix(), b.matrix()), Some((a.dim(), b.dim())))
}

/// Decohered state: the diagonal of `rho` in its storage basis.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_trusted(diagonal_part(rho.matrix()), rho.split())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_fn(values.len(), values.len(), |i, j| {
            if i == j {
                real(values[i])
            } else {
                real(0.0)
            }
        })
    }

    fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)])
    }

    /// Roots of the characteristic polynomial of a real symmetric 3x3 matrix
    /// via the trigonometric solution of the depressed cubic.
    fn char_poly_roots_3x3(m: [[f64; 3]; 3]) -> Vec<f64> {
        let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
        let off = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
        let p = (((m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * off) / 6.0).sqrt();
        let b = |i: usize, j: usize| (m[i][j] - if i == j { q } else { 0.0 }) / p;
        let det_b = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
            - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
            + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
        let phi = (det_b / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
        let third = 2.0 * std::f64::consts::PI / 3.0;
        let mut roots: Vec<f64> = (0..3).map(|k| q + 2.0 * p * (phi + third * k as f64).cos()).collect();
        roots.sort_by(|a, b| b.total_cmp(a));
        roots
    }

    #[test]
    fn eigvals_of_diagonal_are_sorted() {
        assert_eq!(herm_eigvals(&diag(&[3.0, 1.0, 2.0])).unwrap(), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn eigvals_of_pauli_x() {
        let v = herm_eigvals(&sigma_x()).unwrap();
        assert_abs_diff_eq!(v[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigvals_of_rank_one_plus_identity_match_characteristic_polynomial() {
        let third = 1.0 / 3.0;
        let m = CMatrix::from_fn(3, 3, |i, j| real(if i == j { 0.0 } else { third }));
        let got = herm_eigvals(&m).unwrap();
        let oracle = char_poly_roots_3x3([[0.0, third, third], [third, 0.0, third], [third, third, 0.0]]);
        let expected = [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        for k in 0..3 {
            assert_abs_diff_eq!(oracle[k], expected[k], epsilon = 1e-9);
            assert_abs_diff_eq!(got[k], expected[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn eigh_reconstructs_input() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[real(1.0), c(0.2, 0.3), c(-0.1, 0.0), c(0.2, -0.3), real(-0.5), c(0.0, 0.7), c(-0.1, 0.0), c(0.0, -0.7), real(2.0)],
        );
        let eig = herm_eigh(&m).unwrap();
        let err = (eig.reconstruct() - &m).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-9 * 3.0);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(0.0), real(0.0)]);
        assert!(matches!(herm_eigvals(&m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn schatten1_examples() {
        assert_eq!(schatten1(&CMatrix::zeros(3, 3)).unwrap(), 0.0);
        assert_abs_diff_eq!(schatten1(&diag(&[0.5, -0.5])).unwrap(), 1.0, epsilon = 1e-14);
        // |psi><psi| - I/4 for uniform two-qubit psi: spectrum {3/4, -1/4 x3}.
        let m = CMatrix::from_fn(4, 4, |i, j| real(0.25 - if i == j { 0.25 } else { 0.0 }));
        assert_abs_diff_eq!(schatten1(&m).unwrap(), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn schatten1_of_non_hermitian_uses_singular_values() {
        let m = CMatrix::from_row_slice(2, 2, &[real(0.0), real(2.0), real(0.0), real(0.0)]);
        assert_abs_diff_eq!(schatten1(&m).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn frobenius_examples() {
        assert_abs_diff_eq!(frobenius(&CMatrix::identity(3, 3)), 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(frobenius(&diag(&[0.5, -0.5])), 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(
            tensor(&CMatrix::identity(2, 2), &CMatrix::identity(2, 2)),
            CMatrix::identity(4, 4)
        );
        assert_eq!(tensor(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])), diag(&[0.0, 1.0, 0.0, 0.0]));
        let xx = tensor(&sigma_x(), &sigma_x());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx[(i, j)], real(expected));
            }
        }
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::from_pure(&[real(s), real(0.0), real(0.0), real(s)])
            .unwrap()
            .with_split(2, 2)
            .unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let r = partial_trace(&bell, keep).unwrap();
            let err = (r.matrix() - CMatrix::identity(2, 2).scale(0.5)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-15);
        }
    }

    #[test]
    fn partial_trace_needs_split() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        assert_eq!(partial_trace(&rho, Subsystem::A), Err(Error::MissingSplit));
    }

    #[test]
    fn dephase_examples() {
        let d = DensityMatrix::new(diag(&[0.3, 0.7])).unwrap();
        assert_eq!(dephase(&d), d);
        let plus = DensityMatrix::from_pure(&[real(1.0), real(1.0)]).unwrap();
        let out = dephase(&plus);
        assert_abs_diff_eq!(out.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_eq!(out.matrix()[(0, 1)], real(0.0));
        assert_eq!(dephase(&out), out);
    }

    #[test]
    fn validation_catches_each_invariant() {
        assert!(matches!(
            DensityMatrix::new(diag(&[0.5, 0.6])),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(diag(&[1.5, -0.5])),
            Err(Error::NotPositive { .. })
        ));
        let mut m = diag(&[0.5, 0.5]);
        m[(0, 1)] = real(f64::NAN);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NonFinite { .. })));
        assert!(matches!(
            DensityMatrix::new(diag(&[0.5, 0.5])).unwrap().with_split(3, 1),
            Err(Error::InvalidSplit { .. })
        ));
    }
}
