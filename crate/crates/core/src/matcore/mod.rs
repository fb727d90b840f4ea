//! Dense complex linear algebra: matrices, tensor structure and a Hermitian eigensolver.

mod eigen;
mod matrix;

pub use eigen::HermitianEigen;
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;

use thiserror::Error;

/// Default tolerance for PSD decisions.
pub const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("eigensolver failed to converge")]
    NoConvergence,
    #[error("not a density operator: {0}")]
    NotAState(String),
}

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    factors.iter().fold(ComplexMatrix::identity(1), |acc, f| acc.kron(f))
}

pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix, LinalgError> {
    m.partial_trace(dims, keep)
}

/// Eigen-decomposition of a Hermitian matrix (input is symmetrised first).
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen, LinalgError> {
    eigen::eig_hermitian(m)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigvalsh(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    eigen::eigvalsh(m)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64, LinalgError> {
    Ok(eigvalsh(m)?.first().copied().unwrap_or(0.0))
}

pub fn max_eigenvalue(m: &ComplexMatrix) -> Result<f64, LinalgError> {
    Ok(eigvalsh(m)?.last().copied().unwrap_or(0.0))
}

/// True iff the Hermitian matrix has no eigenvalue below `-tol`.
pub fn psd_check(m: &ComplexMatrix, tol: f64) -> Result<bool, LinalgError> {
    Ok(min_eigenvalue(m)? >= -tol)
}

/// Schatten 1-norm. Hermitian inputs use |eigenvalues|, others the singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64, LinalgError> {
    if m.is_square() && m.hermiticity_defect() <= 1e-12 * m.max_abs().max(1.0) {
        return Ok(eigvalsh(m)?.iter().map(|v| v.abs()).sum());
    }
    let g = &m.adjoint() * m;
    Ok(eigvalsh(&g)?.iter().map(|v| v.max(0.0).sqrt()).sum())
}

/// Principal square root of a PSD matrix; small negative eigenvalues are clipped.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    Ok(eig_hermitian(m)?.map(|v| v.max(0.0).sqrt()))
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, clamped to [0, 1].
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64, LinalgError> {
    for (name, s) in [("rho", rho), ("sigma", sigma)] {
        if !s.is_square() {
            return Err(LinalgError::NotSquare(s.rows(), s.cols()));
        }
        let tr = s.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 || !psd_check(s, PSD_TOL)? {
            return Err(LinalgError::NotAState(format!("{name} is not a unit-trace PSD matrix")));
        }
    }
    if rho.rows() != sigma.rows() {
        return Err(LinalgError::DimensionMismatch("fidelity arguments differ in size".into()));
    }
    let sr = sqrt_psd(rho)?;
    let inner = &(&sr * sigma) * &sr;
    let root_trace: f64 = eigvalsh(&inner.hermitian_part())?.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// Orthogonal projector onto eigenvectors with eigenvalue above `cutoff`.
pub fn support_projector(m: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix, LinalgError> {
    Ok(eig_hermitian(m)?.map(|v| if v > cutoff { 1.0 } else { 0.0 }))
}

/// Vectorised `(e_i)` computational basis ket.
pub fn basis_ket(d: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![c64(0.0, 0.0); d];
    v[i] = c64(1.0, 0.0);
    v
}
