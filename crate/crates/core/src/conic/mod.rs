//! Conic programs over real vectors and Hermitian matrices.
//!
//! Programs are built from blocks (PSD, free Hermitian, non-negative, free
//! scalar), linear functionals and affine Hermitian-matrix expressions. They are
//! compiled to the standard form `min c·x s.t. A x = b, x ∈ K` and solved with
//! an operator-splitting (Douglas–Rachford) method, see [`admm`].

mod admm;
mod bisect;
mod compile;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcore::{ComplexMatrix, LinalgError};

pub use bisect::bisect_feasibility;

/// Solver accuracy used when the caller does not override it.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone)]
pub enum ConicError {
    #[error("malformed program: {0}")]
    Malformed(String),
    #[error("solver did not converge: {0:?}")]
    SolverFailure(SolveReport),
    #[error("bisection: {0}")]
    Bisection(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Psd,
    Hermitian,
    Nonneg,
    Free,
}

/// Handle to a variable block of a [`ConicProgram`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var {
    id: usize,
}

#[derive(Clone, Debug)]
struct Block {
    kind: BlockKind,
    size: usize,
}

impl Block {
    fn is_matrix(&self) -> bool {
        matches!(self.kind, BlockKind::Psd | BlockKind::Hermitian)
    }

    /// Number of real coordinates.
    fn width(&self) -> usize {
        if self.is_matrix() {
            self.size * self.size
        } else {
            self.size
        }
    }
}

#[derive(Clone, Debug)]
enum FormTerm {
    /// `Re Tr(C X)` for a matrix block.
    Trace { var: Var, coeff: ComplexMatrix },
    /// `coeff · x_index` for a vector block.
    Entry { var: Var, index: usize, coeff: f64 },
}

/// Real-valued affine functional of the program variables.
#[derive(Clone, Debug, Default)]
pub struct LinearForm {
    terms: Vec<FormTerm>,
    constant: f64,
}

impl LinearForm {
    pub fn new() -> Self {
        Self::default()
    }

    /// `Re Tr(C X)`.
    pub fn trace_with(mut self, var: Var, coeff: ComplexMatrix) -> Self {
        self.terms.push(FormTerm::Trace { var, coeff });
        self
    }

    /// `s · Tr X`.
    pub fn trace(self, var: Var, n: usize, s: f64) -> Self {
        self.trace_with(var, ComplexMatrix::identity(n).scale_real(s))
    }

    /// `coeff · x_index`.
    pub fn entry(mut self, var: Var, index: usize, coeff: f64) -> Self {
        self.terms.push(FormTerm::Entry { var, index, coeff });
        self
    }

    /// `Σ_i coeffs[i] · x_i`.
    pub fn entries(mut self, var: Var, coeffs: &[f64]) -> Self {
        for (index, &coeff) in coeffs.iter().enumerate() {
            if coeff != 0.0 {
                self.terms.push(FormTerm::Entry { var, index, coeff });
            }
        }
        self
    }

    pub fn constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }
}

type MatrixMap = Arc<dyn Fn(&ComplexMatrix) -> ComplexMatrix + Send + Sync>;
type VectorMap = Arc<dyn Fn(&[f64]) -> ComplexMatrix + Send + Sync>;

#[derive(Clone)]
enum MatrixTerm {
    /// Linear image `f(X)` of a matrix block; `f` must map Hermitian to Hermitian.
    Map { var: Var, f: MatrixMap },
    /// Linear image `f(x)` of a vector block.
    VectorMap { var: Var, f: VectorMap },
}

/// Affine Hermitian-matrix-valued expression `C + Σ f_k(X_k)`.
#[derive(Clone)]
pub struct AffineMatrix {
    dim: usize,
    constant: ComplexMatrix,
    terms: Vec<MatrixTerm>,
}

impl AffineMatrix {
    pub fn new(dim: usize) -> Self {
        Self { dim, constant: ComplexMatrix::zeros(dim, dim), terms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn plus_constant(mut self, c: &ComplexMatrix) -> Self {
        self.constant += c;
        self
    }

    /// `+ s · X`.
    pub fn plus_var(self, var: Var, s: f64) -> Self {
        self.plus_map(var, move |x| x.scale_real(s))
    }

    /// `+ f(X)` for a linear, Hermiticity-preserving `f`.
    pub fn plus_map(mut self, var: Var, f: impl Fn(&ComplexMatrix) -> ComplexMatrix + Send + Sync + 'static) -> Self {
        self.terms.push(MatrixTerm::Map { var, f: Arc::new(f) });
        self
    }

    /// `+ f(x)` for a vector block and linear `f`.
    pub fn plus_vector_map(mut self, var: Var, f: impl Fn(&[f64]) -> ComplexMatrix + Send + Sync + 'static) -> Self {
        self.terms.push(MatrixTerm::VectorMap { var, f: Arc::new(f) });
        self
    }

    /// `+ diag(s · x)` for a vector block of length `dim`.
    pub fn plus_diag(self, var: Var, s: f64) -> Self {
        self.plus_vector_map(var, move |x| ComplexMatrix::from_real_diagonal(&x.iter().map(|v| v * s).collect::<Vec<_>>()))
    }

    /// `+ x_index · M`.
    pub fn plus_scaled(self, var: Var, index: usize, m: ComplexMatrix) -> Self {
        self.plus_vector_map(var, move |x| m.scale_real(x[index]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sense {
    Minimize,
    Maximize,
}

/// A conic program under construction.
#[derive(Clone)]
pub struct ConicProgram {
    blocks: Vec<Block>,
    objective: LinearForm,
    sense: Sense,
    equalities: Vec<(LinearForm, f64)>,
    inequalities: Vec<(LinearForm, f64)>,
    psd: Vec<AffineMatrix>,
    matrix_equalities: Vec<AffineMatrix>,
}

impl Default for ConicProgram {
    fn default() -> Self {
        Self::new()
    }
}

impl ConicProgram {
    pub fn new() -> Self {
        Self {
            blocks: Vec::new(),
            objective: LinearForm::new(),
            sense: Sense::Minimize,
            equalities: Vec::new(),
            inequalities: Vec::new(),
            psd: Vec::new(),
            matrix_equalities: Vec::new(),
        }
    }

    fn block(&mut self, kind: BlockKind, size: usize) -> Var {
        self.blocks.push(Block { kind, size });
        Var { id: self.blocks.len() - 1 }
    }

    /// `n x n` PSD matrix variable.
    pub fn psd(&mut self, n: usize) -> Var {
        self.block(BlockKind::Psd, n)
    }

    /// Unconstrained `n x n` Hermitian matrix variable.
    pub fn hermitian(&mut self, n: usize) -> Var {
        self.block(BlockKind::Hermitian, n)
    }

    pub fn nonneg(&mut self, n: usize) -> Var {
        self.block(BlockKind::Nonneg, n)
    }

    pub fn free(&mut self, n: usize) -> Var {
        self.block(BlockKind::Free, n)
    }

    pub fn minimize(&mut self, f: LinearForm) {
        self.objective = f;
        self.sense = Sense::Minimize;
    }

    pub fn maximize(&mut self, f: LinearForm) {
        self.objective = f;
        self.sense = Sense::Maximize;
    }

    /// `f = rhs`.
    pub fn add_eq(&mut self, f: LinearForm, rhs: f64) {
        self.equalities.push((f, rhs));
    }

    /// `f >= rhs`.
    pub fn add_ge(&mut self, f: LinearForm, rhs: f64) {
        self.inequalities.push((f, rhs));
    }

    /// `f <= rhs`.
    pub fn add_le(&mut self, f: LinearForm, rhs: f64) {
        let neg = LinearForm {
            terms: f
                .terms
                .into_iter()
                .map(|t| match t {
                    FormTerm::Trace { var, coeff } => FormTerm::Trace { var, coeff: coeff.scale_real(-1.0) },
                    FormTerm::Entry { var, index, coeff } => FormTerm::Entry { var, index, coeff: -coeff },
                })
                .collect(),
            constant: -f.constant,
        };
        self.inequalities.push((neg, -rhs));
    }

    /// `expr ⪰ 0`.
    pub fn add_psd(&mut self, expr: AffineMatrix) {
        self.psd.push(expr);
    }

    /// `expr = 0` (as a Hermitian matrix).
    pub fn add_matrix_eq(&mut self, expr: AffineMatrix) {
        self.matrix_equalities.push(expr);
    }

    pub fn solve(&self, settings: &SolverSettings) -> Result<Solution, ConicError> {
        let compiled = compile::compile(self)?;
        let raw = admm::solve(&compiled.standard, settings)?;
        Ok(compiled.extract(self, raw))
    }
}

#[derive(Clone, Debug)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    /// Over-relaxation parameter in (0, 2).
    pub alpha: f64,
    pub rho: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iter: 200_000, alpha: 1.6, rho: 1.0 }
    }
}

impl SolverSettings {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// Converged to a looser tolerance (100x) before the iteration limit.
    Inaccurate,
    Infeasible,
    MaxIterations,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub tol: f64,
}

#[derive(Clone, Debug)]
pub enum BlockValue {
    Matrix(ComplexMatrix),
    Vector(Vec<f64>),
}

/// Primal values and solver statistics.
#[derive(Clone, Debug)]
pub struct Solution {
    pub report: SolveReport,
    values: Vec<BlockValue>,
    /// Direction certifying infeasibility when `report.status == Infeasible`.
    pub certificate: Option<Vec<f64>>,
}

impl Solution {
    pub fn matrix(&self, var: Var) -> &ComplexMatrix {
        match &self.values[var.id] {
            BlockValue::Matrix(m) => m,
            BlockValue::Vector(_) => panic!("block {} is a vector block", var.id),
        }
    }

    pub fn vector(&self, var: Var) -> &[f64] {
        match &self.values[var.id] {
            BlockValue::Vector(v) => v,
            BlockValue::Matrix(_) => panic!("block {} is a matrix block", var.id),
        }
    }

    pub fn scalar(&self, var: Var) -> f64 {
        self.vector(var)[0]
    }

    /// Objective in the program's own sense (max or min).
    pub fn objective(&self) -> f64 {
        self.report.primal_objective
    }

    pub fn is_optimal(&self) -> bool {
        matches!(self.report.status, SolveStatus::Optimal | SolveStatus::Inaccurate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{self, c64};

    #[test]
    fn min_eigenvalue_as_sdp() {
        // max t s.t. M - t I ⪰ 0.
        let m = ComplexMatrix::from_rows(&[vec![c64(2.0, 0.0), c64(0.0, 1.0)], vec![c64(0.0, -1.0), c64(3.0, 0.0)]]).unwrap();
        let want = matcore::min_eigenvalue(&m).unwrap();
        let mut p = ConicProgram::new();
        let t = p.free(1);
        p.maximize(LinearForm::new().entry(t, 0, 1.0));
        p.add_psd(AffineMatrix::new(2).plus_constant(&m).plus_scaled(t, 0, ComplexMatrix::identity(2).scale_real(-1.0)));
        let sol = p.solve(&SolverSettings::default()).unwrap();
        assert_eq!(sol.report.status, SolveStatus::Optimal);
        assert!((sol.objective() - want).abs() < 1e-7, "{} vs {want}", sol.objective());
        assert!((sol.report.dual_objective - want).abs() < 1e-7);
    }

    #[test]
    fn trace_minimisation_with_hermitian_block() {
        // min Tr X s.t. X ⪰ ρ for a free Hermitian X: optimum is Tr ρ.
        let rho = ComplexMatrix::from_rows(&[vec![c64(0.7, 0.0), c64(0.2, 0.1)], vec![c64(0.2, -0.1), c64(0.3, 0.0)]]).unwrap();
        let mut p = ConicProgram::new();
        let x = p.hermitian(2);
        p.minimize(LinearForm::new().trace(x, 2, 1.0));
        p.add_psd(AffineMatrix::new(2).plus_var(x, 1.0).plus_constant(&rho.scale_real(-1.0)));
        let sol = p.solve(&SolverSettings::default()).unwrap();
        assert!((sol.objective() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn detects_infeasibility() {
        let mut p = ConicProgram::new();
        let x = p.psd(2);
        p.minimize(LinearForm::new());
        p.add_eq(LinearForm::new().trace(x, 2, 1.0), -1.0);
        let sol = p.solve(&SolverSettings::default()).unwrap();
        assert_eq!(sol.report.status, SolveStatus::Infeasible);
        assert!(sol.certificate.is_some());
    }

    #[test]
    fn rejects_undeclared_block() {
        let mut p = ConicProgram::new();
        let _ = p.free(1);
        let ghost = Var { id: 7 };
        p.minimize(LinearForm::new().entry(ghost, 0, 1.0));
        assert!(matches!(p.solve(&SolverSettings::default()), Err(ConicError::Malformed(_))));
    }

    #[test]
    fn inconsistent_equalities_are_reported() {
        let mut p = ConicProgram::new();
        let x = p.free(1);
        p.minimize(LinearForm::new().entry(x, 0, 1.0));
        p.add_eq(LinearForm::new().entry(x, 0, 1.0), 1.0);
        p.add_eq(LinearForm::new().entry(x, 0, 2.0), 3.0);
        let sol = p.solve(&SolverSettings::default()).unwrap();
        assert_eq!(sol.report.status, SolveStatus::Infeasible);
    }
}
