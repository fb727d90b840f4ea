//! Hypothesis-testing relative entropy and the channel-level lower bounds built on it.
//!
//! All values are computed from a repaired feasible test operator `P`, so
//! `−log2 Tr(Pσ)` never exceeds the exact optimum: the reported numbers are
//! certified lower bounds.

use super::{check_eps, MeasureError, MeasureResult, Witness};
use crate::conic::{AffineMatrix, ConicProgram, LinearForm, SolverSettings};
use crate::matcore::{self, ComplexMatrix};
use crate::qobj::{QuantumChannel, QuantumState};
use crate::random;

/// Eigenvalues of `ρ` below this are treated as outside its support.
pub const SUPPORT_CUTOFF: f64 = 1e-10;

/// At `ε = 0` a feasible test acts as the identity on `supp ρ`, so the support
/// projector `Π_ρ` is optimal and the value is `−log2 β` with `β = Tr(Π_ρ σ)`.
fn exact_test(beta: f64, pi: ComplexMatrix) -> MeasureResult {
    let value = if beta > 0.0 { -beta.log2() } else { f64::INFINITY };
    MeasureResult { value, bound: Some(value), witness: Some(Witness::Operator(pi)), solver: vec![] }
}

/// Feasible test operator close to `p`: eigenvalues clipped to `[0, 1]`, then
/// mixed with `Π_ρ + Π⊥ P Π⊥` until `Tr(Pρ) ≥ 1 − ε` holds exactly.
fn repair_test(p: &ComplexMatrix, rho: &ComplexMatrix, eps: f64) -> Result<ComplexMatrix, MeasureError> {
    let clipped = matcore::eig_hermitian(&p.hermitian_part())?.map(|v| v.clamp(0.0, 1.0));
    let a = clipped.re_trace_product(rho);
    let need = 1.0 - eps;
    if a >= need {
        return Ok(clipped);
    }
    let pi = matcore::support_projector(rho, SUPPORT_CUTOFF)?;
    let perp = &ComplexMatrix::identity(rho.rows()) - &pi;
    let mut fallback = &(&perp * &clipped) * &perp;
    fallback += &pi;
    let b = fallback.re_trace_product(rho);
    let theta = if b - a > 0.0 { ((need - a) / (b - a)).clamp(0.0, 1.0) } else { 1.0 };
    let mut out = clipped.scale_real(1.0 - theta);
    out += &fallback.scale_real(theta);
    Ok(out)
}

/// `D_H^ε(ρ ‖ σ) = −log2 min{Tr Pσ : 0 ⪯ P ⪯ I, Tr Pρ ≥ 1 − ε}`.
pub fn htest_state(rho: &QuantumState, sigma: &ComplexMatrix, eps: f64, s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    check_eps(eps)?;
    let d = rho.dim();
    if sigma.rows() != d || !sigma.is_square() {
        return Err(MeasureError::InvalidArgument("σ does not match ρ".into()));
    }
    let rho_m = rho.matrix().clone();
    if eps == 0.0 {
        let pi = matcore::support_projector(&rho_m, SUPPORT_CUTOFF)?;
        return Ok(exact_test(pi.re_trace_product(sigma), pi));
    }
    let mut p = ConicProgram::new();
    let pv = p.psd(d);
    p.add_psd(AffineMatrix::new(d).plus_constant(&ComplexMatrix::identity(d)).plus_var(pv, -1.0));
    p.add_ge(LinearForm::new().trace_with(pv, rho_m.clone()), 1.0 - eps);
    p.minimize(LinearForm::new().trace_with(pv, sigma.clone()));
    let sol = p.solve(s)?;
    if !sol.is_optimal() {
        return Err(MeasureError::Solver(crate::conic::ConicError::SolverFailure(sol.report)));
    }
    let test = repair_test(sol.matrix(pv), &rho_m, eps)?;
    let beta = test.re_trace_product(sigma);
    let value = if beta > 0.0 { -beta.log2() } else { f64::INFINITY };
    let dual = sol.report.dual_objective;
    Ok(MeasureResult { value, bound: (dual > 0.0).then(|| -dual.log2()), witness: Some(Witness::Operator(test)), solver: vec![sol.report] })
}

/// The maximally entangled input followed by `count` Haar-random pure inputs on
/// `R ⊗ A` (with `|R| = |A| = din`), generated from `seed`.
pub fn default_inputs(din: usize, count: usize, seed: u64) -> Vec<QuantumState> {
    let mut rng = random::seeded(seed);
    let mut out = vec![QuantumState::maximally_entangled(din)];
    out.extend((0..count).map(|_| random::random_pure_state(&mut rng, din * din)));
    out
}

fn check_inputs(n: &QuantumChannel, inputs: &[QuantumState]) -> Result<(), MeasureError> {
    if inputs.is_empty() {
        return Err(MeasureError::InvalidArgument("no input states".into()));
    }
    if let Some(bad) = inputs.iter().find(|psi| psi.dim() != n.din() * n.din()) {
        return Err(MeasureError::InvalidArgument(format!(
            "input of dimension {} does not live on R⊗A with |R| = |A| = {}",
            bad.dim(),
            n.din()
        )));
    }
    Ok(())
}

/// Per-input value `min_M D_H^ε((id⊗N)ψ ‖ (id⊗M)ψ)` over classical `M`.
///
/// Solved in the form `min Σ_i s_i` over tests `P` with `s_i ≥ Tr(P σ_ij)`,
/// where `σ_ij = ⟨i|ψ|i⟩_A ⊗ |j⟩⟨j|`; by minimax this equals
/// `max_M min_P Tr(P (id⊗M)ψ)`, and its optimum is attained even at `ε = 0`.
fn classical_htest(n: &QuantumChannel, psi: &QuantumState, eps: f64, s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    let (din, dout) = (n.din(), n.dout());
    let dim = din * dout;
    let rho = n.apply_to_last(psi.matrix())?;
    let psi_m = psi.matrix();
    let blocks: Vec<ComplexMatrix> =
        (0..din).map(|i| ComplexMatrix::from_fn(din, din, |r, rp| psi_m[(r * din + i, rp * din + i)])).collect();
    let sigma = |i: usize, j: usize| blocks[i].kron(&ComplexMatrix::unit(dout, j, j));
    if eps == 0.0 {
        let pi = matcore::support_projector(&rho, SUPPORT_CUTOFF)?;
        let beta = (0..din).map(|i| (0..dout).map(|j| pi.re_trace_product(&sigma(i, j))).fold(f64::NEG_INFINITY, f64::max)).sum();
        return Ok(exact_test(beta, pi));
    }

    let mut p = ConicProgram::new();
    let pv = p.psd(dim);
    let sv = p.free(din);
    p.add_psd(AffineMatrix::new(dim).plus_constant(&ComplexMatrix::identity(dim)).plus_var(pv, -1.0));
    p.add_ge(LinearForm::new().trace_with(pv, rho.clone()), 1.0 - eps);
    for i in 0..din {
        for j in 0..dout {
            p.add_ge(LinearForm::new().entry(sv, i, 1.0).trace_with(pv, sigma(i, j).scale_real(-1.0)), 0.0);
        }
    }
    p.minimize(LinearForm::new().entries(sv, &vec![1.0; din]));
    let sol = p.solve(s)?;
    if !sol.is_optimal() {
        return Err(MeasureError::Solver(crate::conic::ConicError::SolverFailure(sol.report)));
    }
    let test = repair_test(sol.matrix(pv), &rho, eps)?;
    let beta: f64 = (0..din).map(|i| (0..dout).map(|j| test.re_trace_product(&sigma(i, j))).fold(f64::NEG_INFINITY, f64::max)).sum();
    let value = if beta > 0.0 { -beta.log2() } else { f64::INFINITY };
    let dual = sol.report.dual_objective;
    Ok(MeasureResult { value, bound: (dual > 0.0).then(|| -dual.log2()), witness: Some(Witness::Operator(test)), solver: vec![sol.report] })
}

fn best_over_inputs(
    inputs: &[QuantumState],
    mut f: impl FnMut(&QuantumState) -> Result<MeasureResult, MeasureError>,
) -> Result<MeasureResult, MeasureError> {
    let mut best: Option<MeasureResult> = None;
    let mut reports = Vec::new();
    for psi in inputs {
        let r = f(psi)?;
        reports.extend(r.solver.iter().cloned());
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    let mut best = best.expect("non-empty inputs");
    best.solver = reports;
    Ok(best)
}

/// Lower bound on the hypothesis-testing coherence of `N` (maximum over the given inputs).
pub fn ch_coherence_lb(n: &QuantumChannel, eps: f64, inputs: &[QuantumState], s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    check_eps(eps)?;
    check_inputs(n, inputs)?;
    best_over_inputs(inputs, |psi| classical_htest(n, psi, eps, s))
}

/// Lower bound on the dephasing hypothesis-testing coherence of `N`:
/// `max_ψ D_H^ε((id⊗N)ψ ‖ (id⊗Δ∘N∘Δ)ψ)` over the given inputs.
pub fn ch_dephasing_lb(n: &QuantumChannel, eps: f64, inputs: &[QuantumState], s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    check_eps(eps)?;
    check_inputs(n, inputs)?;
    let dn = n.dephased_both();
    best_over_inputs(inputs, |psi| {
        let rho = QuantumState::new(n.apply_to_last(psi.matrix())?.hermitian_part())?;
        let sigma = dn.apply_to_last(psi.matrix())?;
        htest_state(&rho, &sigma, eps, s)
    })
}
