//! Log-robustness of coherence and its smoothed and dephasing variants.

use super::{check_eps, dmax_channel, dmax_state, MeasureError, MeasureResult, Witness};
use crate::conic::{bisect_feasibility, AffineMatrix, ConicProgram, LinearForm, SolveStatus, SolverSettings, Var};
use crate::matcore::ComplexMatrix;
use crate::qobj::{self, QuantumChannel};

/// Bisection resolution for the dephasing-smoothed robustness.
pub const BISECT_TOL: f64 = 1e-7;

fn ensure_converged(sol: &crate::conic::Solution) -> Result<(), MeasureError> {
    if sol.is_optimal() {
        Ok(())
    } else {
        Err(MeasureError::Solver(crate::conic::ConicError::SolverFailure(sol.report.clone())))
    }
}

/// Normalised classical channel from a non-negative vector over `din x dout`
/// (rows renormalised; an all-zero row becomes uniform).
fn classical_from_weights(x: &[f64], din: usize, dout: usize) -> QuantumChannel {
    let p: Vec<Vec<f64>> = (0..din)
        .map(|i| {
            let row: Vec<f64> = x[i * dout..(i + 1) * dout].iter().map(|v| v.max(0.0)).collect();
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter().map(|v| v / s).collect()
            } else {
                vec![1.0 / dout as f64; dout]
            }
        })
        .collect();
    QuantumChannel::classical(&p).expect("normalised rows")
}

/// `LR(ρ) = log2 min{Tr σ̃ : ρ ⪯ σ̃, σ̃ diagonal}`.
pub fn lr_state(rho: &ComplexMatrix, s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    let st = qobj::QuantumState::new(rho.clone())?;
    let d = st.dim();
    let rho = st.matrix();
    if (rho - &rho.diag_part()).max_abs() <= 1e-14 {
        return Ok(MeasureResult { witness: Some(Witness::State(rho.diag_part())), ..MeasureResult::exact(0.0) });
    }
    let mut p = ConicProgram::new();
    let t = p.nonneg(d);
    p.minimize(LinearForm::new().entries(t, &vec![1.0; d]));
    p.add_psd(AffineMatrix::new(d).plus_diag(t, 1.0).plus_constant(&rho.scale_real(-1.0)));
    let sol = p.solve(s)?;
    ensure_converged(&sol)?;
    let tv = sol.vector(t);
    let total: f64 = tv.iter().map(|v| v.max(0.0)).sum();
    let sigma = ComplexMatrix::from_real_diagonal(&tv.iter().map(|v| v.max(0.0) / total).collect::<Vec<_>>());
    let value = dmax_state(rho, &sigma)?;
    Ok(MeasureResult {
        value,
        bound: Some(sol.report.dual_objective.max(1.0).log2()),
        witness: Some(Witness::State(sigma)),
        solver: vec![sol.report],
    })
}

/// Adds `diag(x) ⪰ J` and the row-sum constraints `Σ_j x_ij = λ/din`.
fn add_classical_domination(p: &mut ConicProgram, jvar: JRef, din: usize, dout: usize) -> (Var, Var) {
    let dim = din * dout;
    let x = p.nonneg(dim);
    let lam = p.free(1);
    let mut e = AffineMatrix::new(dim).plus_diag(x, 1.0);
    e = match jvar {
        JRef::Fixed(j) => e.plus_constant(&j.scale_real(-1.0)),
        JRef::Var(v) => e.plus_var(v, -1.0),
    };
    p.add_psd(e);
    for i in 0..din {
        let mut coeffs = vec![0.0; dim];
        coeffs[i * dout..(i + 1) * dout].iter_mut().for_each(|c| *c = 1.0);
        p.add_eq(LinearForm::new().entries(x, &coeffs).entry(lam, 0, -1.0 / din as f64), 0.0);
    }
    p.minimize(LinearForm::new().entry(lam, 0, 1.0));
    (x, lam)
}

#[derive(Clone, Copy)]
enum JRef<'a> {
    Fixed(&'a ComplexMatrix),
    Var(Var),
}

/// `LR(N) = min_M D_max(N ‖ M)` over classical channels (upper bound; the dual
/// objective is returned as the lower bound). Exactly 0 for classical `N`.
pub fn lr_channel(n: &QuantumChannel, s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    if qobj::classical_check(n).pass {
        let w = n.dephased_both();
        return Ok(MeasureResult { witness: Some(Witness::Channel(w)), ..MeasureResult::exact(0.0) });
    }
    let (din, dout) = (n.din(), n.dout());
    let mut p = ConicProgram::new();
    let (x, _) = add_classical_domination(&mut p, JRef::Fixed(n.choi()), din, dout);
    let sol = p.solve(s)?;
    ensure_converged(&sol)?;
    let m = classical_from_weights(sol.vector(x), din, dout);
    let value = dmax_channel(n, &m)?;
    Ok(MeasureResult {
        value,
        bound: Some(sol.report.dual_objective.max(1.0).log2()),
        witness: Some(Witness::Channel(m)),
        solver: vec![sol.report],
    })
}

/// Iteration budget of [`lr_channel_upper`].
pub const UPPER_BOUND_ITERS: usize = 20_000;

/// Certified upper bound on `LR(N)` that survives a stalled solve: the value is
/// `D_max` against the classical channel read off the last iterate, which is
/// feasible by construction. Runs at most [`UPPER_BOUND_ITERS`] iterations.
pub fn lr_channel_upper(n: &QuantumChannel, s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    if qobj::classical_check(n).pass {
        let w = n.dephased_both();
        return Ok(MeasureResult { witness: Some(Witness::Channel(w)), ..MeasureResult::exact(0.0) });
    }
    let (din, dout) = (n.din(), n.dout());
    let mut p = ConicProgram::new();
    let (x, _) = add_classical_domination(&mut p, JRef::Fixed(n.choi()), din, dout);
    let capped = SolverSettings { max_iter: s.max_iter.min(UPPER_BOUND_ITERS), ..s.clone() };
    let sol = p.solve(&capped)?;
    if sol.report.status == SolveStatus::Infeasible {
        ensure_converged(&sol)?;
    }
    let m = classical_from_weights(sol.vector(x), din, dout);
    let value = dmax_channel(n, &m)?;
    let bound = sol.is_optimal().then(|| sol.report.dual_objective.max(1.0).log2());
    Ok(MeasureResult { value, bound, witness: Some(Witness::Channel(m)), solver: vec![sol.report] })
}

/// Generalised robustness `C_R = 2^LR − 1`.
pub fn cr_channel(n: &QuantumChannel, s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    let r = lr_channel(n, s)?;
    Ok(MeasureResult { value: r.value.exp2() - 1.0, bound: r.bound.map(|b| b.exp2() - 1.0), witness: r.witness, solver: r.solver })
}

/// `LR_Δ(N) = D_max(N ‖ Δ∘N∘Δ)`, closed form.
pub fn lr_dephasing(n: &QuantumChannel) -> Result<MeasureResult, MeasureError> {
    let dn = n.dephased_both();
    let value = dmax_channel(n, &dn)?;
    Ok(MeasureResult { witness: Some(Witness::Channel(dn)), ..MeasureResult::exact(value) })
}

/// Bipartite structure `(A0 B0) -> (A1 B1)` for the no-signalling restriction.
#[derive(Clone, Copy, Debug)]
pub struct NoSignalling {
    pub a: (usize, usize),
    pub b: (usize, usize),
}

/// Declares `J'` (a channel Choi within half-diamond distance `eps` of `n`) and returns it.
fn smoothing_ball(p: &mut ConicProgram, n: &QuantumChannel, eps: f64, ns: Option<NoSignalling>) -> Result<Var, MeasureError> {
    let (din, dout) = (n.din(), n.dout());
    let dim = din * dout;
    let jp = p.psd(dim);
    let z = p.psd(dim);
    let marg_target = ComplexMatrix::identity(din).scale_real(-1.0 / din as f64);
    p.add_matrix_eq(
        AffineMatrix::new(din).plus_map(jp, move |x| x.partial_trace(&[din, dout], &[0]).expect("dims")).plus_constant(&marg_target),
    );
    // Z ⪰ din (J' − J), ‖Tr_out Z‖∞ ≤ eps.
    let dinf = din as f64;
    p.add_psd(AffineMatrix::new(dim).plus_var(z, 1.0).plus_var(jp, -dinf).plus_constant(&n.choi().scale_real(dinf)));
    p.add_psd(
        AffineMatrix::new(din)
            .plus_constant(&ComplexMatrix::identity(din).scale_real(eps))
            .plus_map(z, move |x| x.partial_trace(&[din, dout], &[0]).expect("dims").scale_real(-1.0)),
    );
    if let Some(ns) = ns {
        let (a0, a1) = ns.a;
        let (b0, b1) = ns.b;
        if a0 * b0 != din || a1 * b1 != dout {
            return Err(MeasureError::InvalidArgument("no-signalling split does not match the channel".into()));
        }
        let dims = [a0, b0, a1, b1];
        // Tr_{A1} J' = I_{A0}/a0 ⊗ Tr_{A0 A1} J'.
        p.add_matrix_eq(AffineMatrix::new(a0 * b0 * b1).plus_map(jp, move |x| {
            let lhs = x.partial_trace(&dims, &[0, 1, 3]).expect("dims");
            let bb = x.partial_trace(&dims, &[1, 3]).expect("dims");
            &lhs - &ComplexMatrix::identity(a0).scale_real(1.0 / a0 as f64).kron(&bb)
        }));
    }
    Ok(jp)
}

fn lr_smoothed_impl(n: &QuantumChannel, eps: f64, ns: Option<NoSignalling>, s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    check_eps(eps)?;
    if eps == 0.0 {
        return lr_channel(n, s);
    }
    let (din, dout) = (n.din(), n.dout());
    let mut p = ConicProgram::new();
    let jp = smoothing_ball(&mut p, n, eps, ns)?;
    let (x, _) = add_classical_domination(&mut p, JRef::Var(jp), din, dout);
    let sol = p.solve(s)?;
    ensure_converged(&sol)?;
    let smoothed = QuantumChannel::repaired(din, dout, sol.matrix(jp))?;
    let classical = classical_from_weights(sol.vector(x), din, dout);
    let value = dmax_channel(&smoothed, &classical)?;
    Ok(MeasureResult {
        value,
        bound: Some(sol.report.dual_objective.max(1.0).log2()),
        witness: Some(Witness::SmoothedPair { smoothed, classical }),
        solver: vec![sol.report],
    })
}

/// `LR_ε(N) = min{LR(N') : ½‖N' − N‖⋄ ≤ ε}`.
pub fn lr_smoothed(n: &QuantumChannel, eps: f64, s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    lr_smoothed_impl(n, eps, None, s)
}

/// [`lr_smoothed`] with the smoothing channel restricted to be A→B
/// non-signalling for the given bipartition.
pub fn lr_smoothed_restricted(n: &QuantumChannel, eps: f64, ns: NoSignalling, s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    check_eps(eps)?;
    if eps == 0.0 {
        return lr_channel(n, s);
    }
    lr_smoothed_impl(n, eps, Some(ns), s)
}

/// `LR_{ε,Δ}(N) = min{LR_Δ(N') : ½‖N' − N‖⋄ ≤ ε}` by bisection on `λ` over the
/// convex feasibility problem `λ Δ(J') ⪰ J'`.
pub fn lr_dephasing_smoothed(n: &QuantumChannel, eps: f64, s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    check_eps(eps)?;
    if eps == 0.0 {
        return lr_dephasing(n);
    }
    let (din, dout) = (n.din(), n.dout());
    let dim = din * dout;
    let mut reports = Vec::new();
    let mut best: Option<ComplexMatrix> = None;

    let mut feasible = |lam: f64| -> Result<bool, crate::conic::ConicError> {
        let mut p = ConicProgram::new();
        let jp = smoothing_ball(&mut p, n, eps, None).map_err(|e| crate::conic::ConicError::Malformed(e.to_string()))?;
        let t = p.free(1);
        p.add_psd(AffineMatrix::new(dim).plus_map(jp, move |x| &x.diag_part().scale_real(lam) - x).plus_scaled(
            t,
            0,
            ComplexMatrix::identity(dim),
        ));
        p.minimize(LinearForm::new().entry(t, 0, 1.0));
        let sol = p.solve(s)?;
        let ok = sol.is_optimal() && sol.objective() <= 1e-9;
        if sol.report.status != SolveStatus::Infeasible && !sol.is_optimal() {
            return Err(crate::conic::ConicError::SolverFailure(sol.report));
        }
        if ok {
            best = Some(sol.matrix(jp).clone());
        }
        reports.push(sol.report);
        Ok(ok)
    };
    // J ⪯ dim · Δ(J) for every PSD J, so the bracket always closes at the top.
    let hi = dim as f64;
    bisect_feasibility(&mut feasible, 1.0, hi, BISECT_TOL)?;
    let witness = best.ok_or_else(|| MeasureError::InvalidArgument("no feasible point recorded".into()))?;
    let smoothed = QuantumChannel::repaired(din, dout, &witness)?;
    let value = dmax_channel(&smoothed, &smoothed.dephased_both())?;
    Ok(MeasureResult { value, bound: None, witness: Some(Witness::Channel(smoothed)), solver: reports })
}
