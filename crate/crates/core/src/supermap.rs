//! Superchannels: linear maps taking channels `A0 -> A1` to channels `B0 -> B1`.
//!
//! Every realization acts linearly on normalised Choi matrices, so the checks
//! below work on the images of matrix units. A measure-and-prepare affine term
//! `a` is applied as `a · Tr J`, which is linear and agrees with the constant
//! `a` on every channel.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::conic::SolverSettings;
use crate::matcore::{self, ComplexMatrix, LinalgError};
use crate::measures::{self, MeasureError};
use crate::qobj::{self, choi, deterministic_tables, QobjError, QuantumChannel, CLASS_TOL};

/// Version tag of the admissibility criterion, embedded in every certificate.
pub const ADMISSIBILITY_CRITERION: &str = "choi-psd+tp-span/v1";
/// Tolerance for the supermap-Choi PSD and trace-preservation conditions.
pub const ADMISSIBILITY_TOL: f64 = 1e-8;
/// Tolerance on the trace-norm discrepancy `‖Δ∘Θ − Θ∘Δ‖` per matrix unit.
pub const DISC_TOL: f64 = 1e-8;
/// Slack added to `δ` when certifying δ-MISC membership.
pub const DELTA_MISC_SLACK: f64 = 1e-7;
/// Upper limit on the number of deterministic channels enumerated per check.
pub const ENUMERATION_CAP: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum SupermapError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid superchannel: {0}")]
    Invalid(String),
    #[error("output is not a channel: {0}")]
    InvalidOutput(QobjError),
    #[error("{count} deterministic channels exceed the enumeration cap {cap}")]
    EnumerationCap { count: usize, cap: usize },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Qobj(#[from] QobjError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `(|A0|, |A1|, |B0|, |B1|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuperDims {
    pub a0: usize,
    pub a1: usize,
    pub b0: usize,
    pub b1: usize,
}

impl SuperDims {
    pub fn new(a0: usize, a1: usize, b0: usize, b1: usize) -> Self {
        Self { a0, a1, b0, b1 }
    }

    fn input_choi_dim(&self) -> usize {
        self.a0 * self.a1
    }

    fn output_choi_dim(&self) -> usize {
        self.b0 * self.b1
    }
}

/// One measure-and-prepare term: `(affine + coeff · Tr[effect · J]) · target`.
#[derive(Clone, Debug)]
pub struct Branch {
    pub affine: f64,
    pub coeff: f64,
    pub effect: ComplexMatrix,
    pub target: QuantumChannel,
}

#[derive(Clone, Debug)]
pub enum Realization {
    /// `Θ[N] = post ∘ (N ⊗ id_E) ∘ pre`, with `pre: B0 -> A0 E` and `post: A1 E -> B1`.
    PrePost {
        pre: QuantumChannel,
        post: QuantumChannel,
        env: usize,
    },
    MeasurePrepare {
        branches: Vec<Branch>,
    },
    /// Matrix on row-major `vec(J)`: `(|B0||B1|)² × (|A0||A1|)²`.
    Linear {
        matrix: ComplexMatrix,
    },
}

#[derive(Clone, Debug)]
pub struct Superchannel {
    dims: SuperDims,
    realization: Realization,
}

impl Superchannel {
    pub fn pre_post(pre: QuantumChannel, post: QuantumChannel, env: usize) -> Result<Self, SupermapError> {
        if env == 0 || !pre.dout().is_multiple_of(env) || !post.din().is_multiple_of(env) {
            return Err(SupermapError::DimensionMismatch(format!(
                "environment of size {env} does not divide pre output {} / post input {}",
                pre.dout(),
                post.din()
            )));
        }
        let dims = SuperDims::new(pre.dout() / env, post.din() / env, pre.din(), post.dout());
        Ok(Self { dims, realization: Realization::PrePost { pre, post, env } })
    }

    pub fn measure_prepare(a0: usize, a1: usize, branches: Vec<Branch>) -> Result<Self, SupermapError> {
        let first = branches.first().ok_or_else(|| SupermapError::Invalid("no branches".into()))?;
        let (b0, b1) = (first.target.din(), first.target.dout());
        for (k, br) in branches.iter().enumerate() {
            if br.effect.rows() != a0 * a1 || !br.effect.is_square() {
                return Err(SupermapError::DimensionMismatch(format!("effect {k} is not on A0⊗A1")));
            }
            if !br.effect.is_hermitian(1e-10) {
                return Err(SupermapError::Invalid(format!("effect {k} is not Hermitian")));
            }
            if (br.target.din(), br.target.dout()) != (b0, b1) {
                return Err(SupermapError::DimensionMismatch(format!("target {k} differs in shape")));
            }
            if !br.affine.is_finite() || !br.coeff.is_finite() {
                return Err(SupermapError::Invalid(format!("branch {k} has a non-finite coefficient")));
            }
        }
        Ok(Self { dims: SuperDims::new(a0, a1, b0, b1), realization: Realization::MeasurePrepare { branches } })
    }

    pub fn linear(dims: SuperDims, matrix: ComplexMatrix) -> Result<Self, SupermapError> {
        let (ni, no) = (dims.input_choi_dim().pow(2), dims.output_choi_dim().pow(2));
        if matrix.rows() != no || matrix.cols() != ni {
            return Err(SupermapError::DimensionMismatch(format!(
                "linear action is {}x{}, expected {no}x{ni}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { dims, realization: Realization::Linear { matrix } })
    }

    /// `Θ[N] = N`.
    pub fn identity(d0: usize, d1: usize) -> Self {
        Self::pre_post(QuantumChannel::identity(d0), QuantumChannel::identity(d1), 1).expect("identity dims")
    }

    pub fn dims(&self) -> SuperDims {
        self.dims
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    /// Image of an arbitrary operator on `A0 ⊗ A1` (linear extension of `Θ` on normalised Choi matrices).
    pub fn apply_choi(&self, j: &ComplexMatrix) -> Result<ComplexMatrix, SupermapError> {
        let d = self.dims;
        if j.rows() != d.input_choi_dim() || !j.is_square() {
            return Err(SupermapError::DimensionMismatch(format!("operator of size {} is not on A0⊗A1 ({}x{})", j.rows(), d.a0, d.a1)));
        }
        Ok(match &self.realization {
            Realization::PrePost { pre, post, env } => {
                let x = choi::apply_to_factor(&j.scale_real(d.a0 as f64), d.a0, d.a1, &pre.choi_unnormalized(), d.b0, *env);
                let y = choi::apply_to_factor(&post.choi_unnormalized(), d.a1 * env, d.b1, &x, d.b0, 1);
                y.scale_real(1.0 / d.b0 as f64)
            }
            Realization::MeasurePrepare { branches } => {
                let tr = j.trace();
                let mut out = ComplexMatrix::zeros(d.output_choi_dim(), d.output_choi_dim());
                for br in branches {
                    let w = tr * br.affine + br.effect.trace_product(j) * br.coeff;
                    out.add_scaled(w, br.target.choi());
                }
                out
            }
            Realization::Linear { matrix } => choi::unvec(&matrix.matvec(&choi::vec_of(j)), d.output_choi_dim()),
        })
    }

    pub fn apply(&self, n: &QuantumChannel) -> Result<QuantumChannel, SupermapError> {
        if (n.din(), n.dout()) != (self.dims.a0, self.dims.a1) {
            return Err(SupermapError::DimensionMismatch(format!(
                "channel {}->{} does not fit a superchannel on {}->{}",
                n.din(),
                n.dout(),
                self.dims.a0,
                self.dims.a1
            )));
        }
        let out = self.apply_choi(n.choi())?;
        QuantumChannel::from_choi(self.dims.b0, self.dims.b1, out).map_err(SupermapError::InvalidOutput)
    }

    /// Images `Θ(E_ij)` of all matrix units, indexed `i * n + j`.
    fn unit_images(&self) -> Result<Vec<ComplexMatrix>, SupermapError> {
        let n = self.dims.input_choi_dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.apply_choi(&ComplexMatrix::unit(n, i, j))?);
            }
        }
        Ok(out)
    }

    /// The equivalent [`Realization::Linear`] matrix.
    pub fn linear_matrix(&self) -> Result<ComplexMatrix, SupermapError> {
        if let Realization::Linear { matrix } = &self.realization {
            return Ok(matrix.clone());
        }
        let ni = self.dims.input_choi_dim().pow(2);
        let no = self.dims.output_choi_dim().pow(2);
        let mut m = ComplexMatrix::zeros(no, ni);
        for (col, img) in self.unit_images()?.iter().enumerate() {
            for (row, v) in img.as_slice().iter().enumerate() {
                m[(row, col)] = *v;
            }
        }
        Ok(m)
    }

    pub fn to_linear(&self) -> Result<Self, SupermapError> {
        Self::linear(self.dims, self.linear_matrix()?)
    }

    /// `S = Σ_ij E_ij ⊗ Θ(E_ij)` on `(A0 A1) ⊗ (B0 B1)`.
    pub fn supermap_choi(&self) -> Result<ComplexMatrix, SupermapError> {
        let n = self.dims.input_choi_dim();
        let m = self.dims.output_choi_dim();
        let mut s = ComplexMatrix::zeros(n * m, n * m);
        for (idx, img) in self.unit_images()?.iter().enumerate() {
            let (i, j) = (idx / n, idx % n);
            for r in 0..m {
                for c in 0..m {
                    s[(i * m + r, j * m + c)] = img[(r, c)];
                }
            }
        }
        Ok(s)
    }
}

/// `Δ[N] = D ∘ N ∘ D`.
pub fn dephasing_super(d0: usize, d1: usize) -> Superchannel {
    Superchannel::pre_post(QuantumChannel::dephasing(d0), QuantumChannel::dephasing(d1), 1).expect("dephasing dims")
}

/// `outer ∘ inner`, as a linear action.
pub fn compose(outer: &Superchannel, inner: &Superchannel) -> Result<Superchannel, SupermapError> {
    let (o, i) = (outer.dims, inner.dims);
    if (o.a0, o.a1) != (i.b0, i.b1) {
        return Err(SupermapError::DimensionMismatch("inner output does not match outer input".into()));
    }
    let m = outer.linear_matrix()?.matmul(&inner.linear_matrix()?)?;
    Superchannel::linear(SuperDims::new(i.a0, i.a1, o.b0, o.b1), m)
}

/// `Θ1 ⊗ Θ2`, acting on channels `A0 A0' -> A1 A1'`, as a linear action.
pub fn tensor(t1: &Superchannel, t2: &Superchannel) -> Result<Superchannel, SupermapError> {
    let (p, q) = (t1.dims, t2.dims);
    let dims = SuperDims::new(p.a0 * q.a0, p.a1 * q.a1, p.b0 * q.b0, p.b1 * q.b1);
    let (n1, n2) = (p.input_choi_dim(), q.input_choi_dim());
    let img1 = t1.unit_images()?;
    let img2 = t2.unit_images()?;
    let in_dims = [p.a0, q.a0, p.a1, q.a1];
    let out_split = [p.b0, p.b1, q.b0, q.b1];
    let ni = dims.input_choi_dim();
    let mut m = ComplexMatrix::zeros(dims.output_choi_dim().pow(2), ni * ni);
    for r in 0..ni {
        for c in 0..ni {
            // Locate E_rc in the (A0 A1)(A0' A1') ordering.
            let unit = ComplexMatrix::unit(ni, r, c).permute_subsystems(&in_dims, &[0, 2, 1, 3])?;
            let (rr, cc) = nonzero_position(&unit);
            let (i1, i2) = (rr / n2, rr % n2);
            let (j1, j2) = (cc / n2, cc % n2);
            let out = img1[i1 * n1 + j1].kron(&img2[i2 * n2 + j2]).permute_subsystems(&out_split, &[0, 2, 1, 3])?;
            for (row, v) in out.as_slice().iter().enumerate() {
                m[(row, r * ni + c)] = *v;
            }
        }
    }
    Superchannel::linear(dims, m)
}

fn nonzero_position(m: &ComplexMatrix) -> (usize, usize) {
    let k = m.as_slice().iter().position(|v| v.norm() > 0.0).expect("matrix unit");
    (k / m.cols(), k % m.cols())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SuperProperty {
    Admissible,
    Misc,
    Disc,
    DeltaMisc { delta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SuperWitness {
    /// The supermap Choi operator is not Hermitian.
    NotHermitian { defect: f64 },
    /// Most negative eigenpair of the supermap Choi operator; vector entries as `[re, im]`.
    NegativeEigenvalue { value: f64, vector: Vec<[f64; 2]> },
    /// Trace preservation fails on `J0 = I/(|A0||A1|)` (`unit = None`) or on the
    /// traceless direction `E_ab ⊗ Y` where `Y = E_cd` (`c ≠ d`) or `E_cc − E_00`.
    TraceDefect { unit: Option<[usize; 4]> },
    /// Deterministic channel, as its function table, whose image violates the property.
    Deterministic { table: Vec<usize> },
    /// Matrix unit `E_ij` of the input Choi space.
    MatrixUnit { row: usize, col: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuperchannelVerdict {
    pub property: SuperProperty,
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub witness: Option<SuperWitness>,
    pub criterion: Option<&'static str>,
}

impl SuperchannelVerdict {
    fn new(property: SuperProperty, residual: f64, tolerance: f64, witness: Option<SuperWitness>) -> Self {
        let pass = residual <= tolerance;
        Self { property, pass, residual, tolerance, witness: if pass { None } else { witness }, criterion: None }
    }
}

/// Supermap-Choi positivity plus trace preservation on the affine span of channel Choi matrices.
///
/// The residual is the larger of the most negative eigenvalue of `S` (negated)
/// and the worst marginal defect `‖Tr_B1 Θ(X) − target‖_max`.
pub fn admissibility_check(t: &Superchannel) -> Result<SuperchannelVerdict, SupermapError> {
    let d = t.dims;
    let s = t.supermap_choi()?;
    let prop = SuperProperty::Admissible;
    let finish = |mut v: SuperchannelVerdict| {
        v.criterion = Some(ADMISSIBILITY_CRITERION);
        Ok(v)
    };

    let defect = s.hermiticity_defect();
    if defect > ADMISSIBILITY_TOL {
        return finish(SuperchannelVerdict::new(prop, defect, ADMISSIBILITY_TOL, Some(SuperWitness::NotHermitian { defect })));
    }
    let eig = matcore::eig_hermitian(&s.hermitian_part())?;
    let lmin = eig.values[0];
    let mut residual = (-lmin).max(0.0);
    let mut witness =
        Some(SuperWitness::NegativeEigenvalue { value: lmin, vector: eig.eigenvector(0).iter().map(|z| [z.re, z.im]).collect() });

    let marginal = |x: &ComplexMatrix| -> Result<ComplexMatrix, SupermapError> { Ok(choi::input_marginal(&t.apply_choi(x)?, d.b0, d.b1)) };
    let n_in = d.input_choi_dim();
    let j0 = ComplexMatrix::identity(n_in).scale_real(1.0 / n_in as f64);
    let target = ComplexMatrix::identity(d.b0).scale_real(1.0 / d.b0 as f64);
    let mut tp_worst = (marginal(&j0)?.max_abs_diff(&target), None);
    let zero = ComplexMatrix::zeros(d.b0, d.b0);
    for a in 0..d.a0 {
        for b in 0..d.a0 {
            let ea = ComplexMatrix::unit(d.a0, a, b);
            for c in 0..d.a1 {
                for dd in 0..d.a1 {
                    if c == 0 && dd == 0 {
                        continue;
                    }
                    let mut y = ComplexMatrix::unit(d.a1, c, dd);
                    if c == dd {
                        y -= &ComplexMatrix::unit(d.a1, 0, 0);
                    }
                    let r = marginal(&ea.kron(&y))?.max_abs_diff(&zero);
                    if r > tp_worst.0 {
                        tp_worst = (r, Some([a, b, c, dd]));
                    }
                }
            }
        }
    }
    if tp_worst.0 > residual {
        residual = tp_worst.0;
        witness = Some(SuperWitness::TraceDefect { unit: tp_worst.1 });
    }
    finish(SuperchannelVerdict::new(prop, residual, ADMISSIBILITY_TOL, witness))
}

/// Normalised Choi of a deterministic channel from its function table.
fn deterministic_choi(din: usize, dout: usize, f: &[usize]) -> ComplexMatrix {
    let mut diag = vec![0.0; din * dout];
    for (i, &fi) in f.iter().enumerate() {
        diag[i * dout + fi] = 1.0 / din as f64;
    }
    ComplexMatrix::from_real_diagonal(&diag)
}

/// Images of all deterministic channels, deduplicated. Measure-and-prepare
/// superchannels are grouped by their branch weights, so effects with constant
/// diagonals need a single evaluation.
fn deterministic_images(t: &Superchannel) -> Result<Vec<(Vec<usize>, ComplexMatrix)>, SupermapError> {
    let d = t.dims;
    let count = d.a1.checked_pow(d.a0 as u32).unwrap_or(usize::MAX);
    if count > ENUMERATION_CAP {
        return Err(SupermapError::EnumerationCap { count, cap: ENUMERATION_CAP });
    }
    let mut out = Vec::new();
    match &t.realization {
        Realization::MeasurePrepare { branches } => {
            let diags: Vec<Vec<f64>> = branches.iter().map(|b| b.effect.real_diagonal()).collect();
            let mut seen: BTreeMap<Vec<i64>, ()> = BTreeMap::new();
            for f in deterministic_tables(d.a0, d.a1) {
                let weights: Vec<f64> = branches
                    .iter()
                    .zip(&diags)
                    .map(|(b, diag)| {
                        let tr: f64 = f.iter().enumerate().map(|(i, &fi)| diag[i * d.a1 + fi]).sum::<f64>() / d.a0 as f64;
                        b.affine + b.coeff * tr
                    })
                    .collect();
                let key: Vec<i64> = weights.iter().map(|w| (w * 1e12).round() as i64).collect();
                if seen.insert(key, ()).is_none() {
                    let img = t.apply_choi(&deterministic_choi(d.a0, d.a1, &f))?;
                    out.push((f, img));
                }
            }
        }
        _ => {
            for f in deterministic_tables(d.a0, d.a1) {
                let img = t.apply_choi(&deterministic_choi(d.a0, d.a1, &f))?;
                out.push((f, img));
            }
        }
    }
    Ok(out)
}

/// Every deterministic (hence, by convexity, every classical) input is mapped to a classical channel.
pub fn misc_check(t: &Superchannel) -> Result<SuperchannelVerdict, SupermapError> {
    let mut worst: (f64, Option<Vec<usize>>) = (0.0, None);
    for (f, img) in deterministic_images(t)? {
        let r = matcore::trace_norm(&(&img - &img.diag_part()))?;
        if worst.1.is_none() || r > worst.0 {
            worst = (r, Some(f));
        }
    }
    let witness = worst.1.map(|table| SuperWitness::Deterministic { table });
    Ok(SuperchannelVerdict::new(SuperProperty::Misc, worst.0, CLASS_TOL, witness))
}

/// `Δ_B ∘ Θ = Θ ∘ Δ_A` on every matrix unit of the input Choi space.
pub fn disc_check(t: &Superchannel) -> Result<SuperchannelVerdict, SupermapError> {
    let n = t.dims.input_choi_dim();
    let mut worst = (0.0, 0, 0);
    for i in 0..n {
        for j in 0..n {
            let img = t.apply_choi(&ComplexMatrix::unit(n, i, j))?;
            let lhs = img.diag_part();
            // Θ(Δ E_ij) is Θ(E_ii) on the diagonal and zero otherwise.
            let r = if i == j { matcore::trace_norm(&(&lhs - &img))? } else { matcore::trace_norm(&lhs)? };
            if r > worst.0 {
                worst = (r, i, j);
            }
        }
    }
    let witness = Some(SuperWitness::MatrixUnit { row: worst.1, col: worst.2 });
    Ok(SuperchannelVerdict::new(SuperProperty::Disc, worst.0, DISC_TOL, witness))
}

/// `max_Q Ĉ_R(Θ[Q]) ≤ δ` over deterministic `Q`; the robustness of each image is a
/// certified upper bound, so a pass is rigorous up to the solver's feasibility.
pub fn delta_misc_check(t: &Superchannel, delta: f64, s: &SolverSettings) -> Result<SuperchannelVerdict, SupermapError> {
    if !(delta >= 0.0) {
        return Err(SupermapError::Invalid(format!("δ = {delta} must be nonnegative")));
    }
    let d = t.dims;
    let mut worst: (f64, Option<Vec<usize>>) = (0.0, None);
    for (f, img) in deterministic_images(t)? {
        let ch = QuantumChannel::from_choi(d.b0, d.b1, img).map_err(SupermapError::InvalidOutput)?;
        let cr = if qobj::classical_check(&ch).pass { 0.0 } else { measures::lr_channel_upper(&ch, s)?.value.exp2() - 1.0 };
        if worst.1.is_none() || cr > worst.0 {
            worst = (cr.max(0.0), Some(f));
        }
    }
    let residual = worst.0 - delta;
    let pass = residual <= DELTA_MISC_SLACK;
    Ok(SuperchannelVerdict {
        property: SuperProperty::DeltaMisc { delta },
        pass,
        residual: worst.0,
        tolerance: delta + DELTA_MISC_SLACK,
        witness: if pass { None } else { worst.1.map(|table| SuperWitness::Deterministic { table }) },
        criterion: None,
    })
}

/// Largest entrywise difference between the images of two superchannels on the matrix units.
pub fn action_distance(t1: &Superchannel, t2: &Superchannel) -> Result<f64, SupermapError> {
    if t1.dims != t2.dims {
        return Err(SupermapError::DimensionMismatch("superchannels differ in shape".into()));
    }
    let a = t1.unit_images()?;
    let b = t2.unit_images()?;
    Ok(a.iter().zip(&b).fold(0.0, |acc, (x, y)| acc.max(x.max_abs_diff(y))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_superchannel_fixes_qft() {
        let f = QuantumChannel::qft(2).unwrap();
        let out = Superchannel::identity(2, 2).apply(&f).unwrap();
        assert!(out.choi().max_abs_diff(f.choi()) < 1e-14);
    }

    #[test]
    fn dephasing_super_on_qft_is_flat() {
        for d in 2..=3 {
            let out = dephasing_super(d, d).apply(&QuantumChannel::qft(d).unwrap()).unwrap();
            let flat = ComplexMatrix::identity(d * d).scale_real(1.0 / (d * d) as f64);
            assert!(out.choi().max_abs_diff(&flat) < 1e-14);
        }
    }

    #[test]
    fn dephasing_super_is_idempotent_and_free() {
        let dz = dephasing_super(2, 2);
        let twice = compose(&dz, &dz).unwrap();
        assert!(action_distance(&twice, &dz).unwrap() < 1e-14);
        assert!(admissibility_check(&dz).unwrap().pass);
        assert!(misc_check(&dz).unwrap().pass);
        assert!(disc_check(&dz).unwrap().pass);
    }

    #[test]
    fn transposing_the_choi_is_not_admissible() {
        // J -> J^T maps channels to channels (of the conjugate map) but is not completely positive.
        let n = 4;
        let mut m = ComplexMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                m[(j * n + i, i * n + j)] = matcore::c64(1.0, 0.0);
            }
        }
        let t = Superchannel::linear(SuperDims::new(2, 2, 2, 2), m).unwrap();
        let v = admissibility_check(&t).unwrap();
        assert!(!v.pass);
        assert!(matches!(v.witness, Some(SuperWitness::NegativeEigenvalue { value, .. }) if value < -0.1));
        assert_eq!(v.criterion, Some(ADMISSIBILITY_CRITERION));
    }

    #[test]
    fn constant_qft_output_is_not_misc() {
        let f = QuantumChannel::qft(2).unwrap();
        let t =
            Superchannel::measure_prepare(2, 2, vec![Branch { affine: 1.0, coeff: 0.0, effect: ComplexMatrix::zeros(4, 4), target: f }])
                .unwrap();
        assert!(admissibility_check(&t).unwrap().pass);
        let v = misc_check(&t).unwrap();
        assert!(!v.pass);
        assert!(matches!(v.witness, Some(SuperWitness::Deterministic { .. })));
    }

    #[test]
    fn linear_form_matches_prepost() {
        let pre = QuantumChannel::qft(2).unwrap();
        let post = QuantumChannel::dephasing(2);
        let t = Superchannel::pre_post(pre, post, 1).unwrap();
        assert!(action_distance(&t, &t.to_linear().unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let id = Superchannel::identity(2, 2);
        let t = tensor(&id, &id).unwrap();
        let f = QuantumChannel::qft(2).unwrap().tensor(&QuantumChannel::dephasing(2));
        let out = t.apply(&f).unwrap();
        assert!(out.choi().max_abs_diff(f.choi()) < 1e-14);
    }
}
