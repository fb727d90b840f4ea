//! Diamond-norm distance through Watrous' semidefinite program.

use super::{MeasureError, MeasureResult, Witness};
use crate::conic::{AffineMatrix, ConicError, ConicProgram, LinearForm, SolverSettings};
use crate::matcore::{self, ComplexMatrix};
use crate::qobj::QuantumChannel;

/// `½‖N − M‖⋄ = min{‖Tr_out Z‖∞ : Z ⪰ J(N − M), Z ⪰ 0}` with `J` the unnormalised Choi.
///
/// The value is recomputed from the solver's `Z` after shifting it by the
/// smallest multiple of the identity that restores `Z ⪰ J(N − M)`, so it is a
/// certified upper bound; `bound` is the dual objective.
pub fn diamond_distance(n: &QuantumChannel, m: &QuantumChannel, s: &SolverSettings) -> Result<MeasureResult, MeasureError> {
    if (n.din(), n.dout()) != (m.din(), m.dout()) {
        return Err(MeasureError::InvalidArgument(format!(
            "channels {}->{} and {}->{} differ in shape",
            n.din(),
            n.dout(),
            m.din(),
            m.dout()
        )));
    }
    let (din, dout) = (n.din(), n.dout());
    let dim = din * dout;
    let diff = (n.choi() - m.choi()).scale_real(din as f64);
    if diff.max_abs() <= 1e-15 {
        return Ok(MeasureResult::exact(0.0));
    }
    let mut p = ConicProgram::new();
    let z = p.psd(dim);
    let t = p.free(1);
    p.add_psd(AffineMatrix::new(dim).plus_var(z, 1.0).plus_constant(&diff.scale_real(-1.0)));
    p.add_psd(
        AffineMatrix::new(din)
            .plus_scaled(t, 0, ComplexMatrix::identity(din))
            .plus_map(z, move |x| x.partial_trace(&[din, dout], &[0]).expect("dims").scale_real(-1.0)),
    );
    p.minimize(LinearForm::new().entry(t, 0, 1.0));
    let sol = p.solve(s)?;
    if !sol.is_optimal() {
        return Err(MeasureError::Solver(ConicError::SolverFailure(sol.report)));
    }
    let mut zm = sol.matrix(z).clone();
    let shift = (-matcore::min_eigenvalue(&(&zm - &diff))?).max(0.0);
    zm += &ComplexMatrix::identity(dim).scale_real(shift);
    let value = matcore::max_eigenvalue(&zm.partial_trace(&[din, dout], &[0])?)?.min(1.0);
    Ok(MeasureResult {
        value,
        bound: Some(sol.report.dual_objective.max(0.0)),
        witness: Some(Witness::Operator(zm)),
        solver: vec![sol.report],
    })
}
