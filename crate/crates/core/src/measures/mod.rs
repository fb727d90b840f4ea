//! Coherence monotones and distances, mostly evaluated as SDPs.
//!
//! Every SDP-backed value is reported through its witness: the returned `value`
//! is recomputed from the (repaired) primal witness, so it is a certified bound
//! in the direction stated on each function, and `bound` carries the opposite
//! bound from the solver's dual objective when it is meaningful.

mod diamond;
mod hypothesis;
mod robustness;

use serde::Serialize;
use thiserror::Error;

use crate::conic::{ConicError, SolveReport};
use crate::matcore::{self, ComplexMatrix, LinalgError};
use crate::qobj::{QobjError, QuantumChannel};

pub use diamond::diamond_distance;
pub use hypothesis::{ch_coherence_lb, ch_dephasing_lb, default_inputs, htest_state};
pub use robustness::{
    cr_channel, lr_channel, lr_channel_upper, lr_dephasing, lr_dephasing_smoothed, lr_smoothed, lr_smoothed_restricted, lr_state,
    NoSignalling,
};

/// Eigenvalues of `σ` at or below this are treated as its kernel in `D_max`.
pub const DMAX_CUTOFF: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Solver(#[from] ConicError),
    #[error(transparent)]
    Qobj(#[from] QobjError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Certificate attached to a measured value.
#[derive(Clone, Debug)]
pub enum Witness {
    /// Optimal channel (smoothing witness, or the classical channel in a robustness bound).
    Channel(QuantumChannel),
    /// Pair of a smoothed channel and its classical dominating channel.
    SmoothedPair { smoothed: QuantumChannel, classical: QuantumChannel },
    /// Dominating incoherent state.
    State(ComplexMatrix),
    /// Hypothesis-test operator (or the diamond-norm dual matrix `Z`).
    Operator(ComplexMatrix),
}

#[derive(Clone, Debug)]
pub struct MeasureResult {
    /// The value, recomputed from the witness.
    pub value: f64,
    /// Bound from the other side (e.g. the dual objective), if available.
    pub bound: Option<f64>,
    pub witness: Option<Witness>,
    pub solver: Vec<SolveReport>,
}

impl MeasureResult {
    pub(crate) fn exact(value: f64) -> Self {
        Self { value, bound: Some(value), witness: None, solver: Vec::new() }
    }
}

/// Scalar summary of a [`MeasureResult`] for reports.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureSummary {
    pub value: f64,
    pub bound: Option<f64>,
    pub solver_iterations: usize,
}

impl From<&MeasureResult> for MeasureSummary {
    fn from(r: &MeasureResult) -> Self {
        Self { value: r.value, bound: r.bound, solver_iterations: r.solver.iter().map(|s| s.iterations).sum() }
    }
}

/// Max-relative entropy `log2 min{λ : ρ ⪯ λσ}`; `+∞` when `supp ρ ⊄ supp σ`.
pub fn dmax_state(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64, MeasureError> {
    if rho.rows() != sigma.rows() || !rho.is_square() || !sigma.is_square() {
        return Err(MeasureError::InvalidArgument("D_max arguments differ in shape".into()));
    }
    let es = matcore::eig_hermitian(sigma)?;
    let n = rho.rows();
    let scale = es.values.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = DMAX_CUTOFF * scale.max(1.0);
    let kernel: Vec<usize> = (0..n).filter(|&k| es.values[k] <= cutoff).collect();
    let support: Vec<usize> = (0..n).filter(|&k| es.values[k] > cutoff).collect();
    if support.is_empty() {
        return Ok(f64::INFINITY);
    }
    // ρ expressed in σ's eigenbasis.
    let rho_e = &(&es.vectors.adjoint() * rho) * &es.vectors;
    let kernel_mass: f64 = kernel.iter().map(|&k| rho_e[(k, k)].re).sum();
    if kernel_mass > 1e-9 * rho.trace().re.abs().max(1.0) {
        return Ok(f64::INFINITY);
    }
    let m = support.len();
    let w = ComplexMatrix::from_fn(m, m, |a, b| {
        let (i, j) = (support[a], support[b]);
        rho_e[(i, j)] / (es.values[i] * es.values[j]).sqrt()
    });
    let lmax = matcore::max_eigenvalue(&w.hermitian_part())?;
    if lmax <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(lmax.log2())
}

/// `D_max(J^N ‖ J^M)`.
pub fn dmax_channel(n: &QuantumChannel, m: &QuantumChannel) -> Result<f64, MeasureError> {
    if (n.din(), n.dout()) != (m.din(), m.dout()) {
        return Err(MeasureError::InvalidArgument("channels differ in shape".into()));
    }
    dmax_state(n.choi(), m.choi())
}

pub(crate) fn check_eps(eps: f64) -> Result<(), MeasureError> {
    if !(0.0..1.0).contains(&eps) {
        return Err(MeasureError::InvalidArgument(format!("smoothing parameter {eps} outside [0, 1)")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dmax_basics() {
        let rho = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        let sigma = ComplexMatrix::from_real_diagonal(&[0.25, 0.75]);
        assert!((dmax_state(&rho, &sigma).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(dmax_state(&sigma, &ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap(), f64::INFINITY);
        assert!(dmax_state(&rho, &rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn dmax_of_qft_against_dephased_choi() {
        for d in 2..=4 {
            let f = QuantumChannel::qft(d).unwrap();
            let v = dmax_channel(&f, &f.dephased_both()).unwrap();
            assert!((v - 2.0 * (d as f64).log2()).abs() < 1e-10);
        }
    }
}
