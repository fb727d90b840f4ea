//! States, channels (normalised Choi representation) and the channel classes
//! of the coherence resource theory.

pub mod choi;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcore::{self, c64, Complex64, ComplexMatrix, LinalgError};

/// Tolerance on Hermiticity, PSD-ness and trace conditions of channel inputs.
pub const CHANNEL_TOL: f64 = 1e-9;
/// Tolerance on the trace-norm residuals of the class checks.
pub const CLASS_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QobjError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Density operator on `C^d`.
#[derive(Clone, Debug)]
pub struct QuantumState {
    rho: ComplexMatrix,
}

impl QuantumState {
    pub fn new(rho: ComplexMatrix) -> Result<Self, QobjError> {
        if !rho.is_square() {
            return Err(QobjError::InvalidState("not square".into()));
        }
        let defect = rho.hermiticity_defect();
        if defect > CHANNEL_TOL {
            return Err(QobjError::InvalidState(format!("not Hermitian (defect {defect:.2e})")));
        }
        let rho = rho.hermitian_part();
        let tr = rho.trace().re;
        if (tr - 1.0).abs() > CHANNEL_TOL {
            return Err(QobjError::InvalidState(format!("trace {tr} != 1")));
        }
        let lmin = matcore::min_eigenvalue(&rho)?;
        if lmin < -CHANNEL_TOL {
            return Err(QobjError::InvalidState(format!("negative eigenvalue {lmin:.3e}")));
        }
        Ok(Self { rho })
    }

    /// Pure state from an (unnormalised) ket.
    pub fn pure(ket: &[Complex64]) -> Result<Self, QobjError> {
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(QobjError::InvalidState("zero ket".into()));
        }
        let k: Vec<Complex64> = ket.iter().map(|z| z / norm).collect();
        Ok(Self { rho: ComplexMatrix::outer(&k, &k) })
    }

    /// `|ψ⁺_d⟩ = Σ_i |i⟩/√d`.
    pub fn maximally_coherent(d: usize) -> Self {
        let k = vec![c64(1.0, 0.0); d];
        Self::pure(&k).expect("nonzero ket")
    }

    /// `|φ⁺⟩ = Σ_i |ii⟩/√d` on `d ⊗ d`.
    pub fn maximally_entangled(d: usize) -> Self {
        Self { rho: choi::phi_plus(d) }
    }

    pub fn basis(d: usize, i: usize) -> Self {
        Self { rho: ComplexMatrix::unit(d, i, i) }
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn dephased(&self) -> Self {
        Self { rho: self.rho.diag_part() }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { rho: self.rho.kron(&other.rho) }
    }
}

/// A CPTP map `A0 -> A1` stored as its normalised Choi matrix
/// `J = (id ⊗ N)(φ⁺)`, so `Tr J = 1` and `Tr_out J = I/din`.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    din: usize,
    dout: usize,
    choi: ComplexMatrix,
}

impl QuantumChannel {
    /// Validates Hermiticity, PSD-ness and the trace-preservation marginal.
    pub fn from_choi(din: usize, dout: usize, choi: ComplexMatrix) -> Result<Self, QobjError> {
        if din == 0 || dout == 0 {
            return Err(QobjError::InvalidChannel("zero dimension".into()));
        }
        if choi.rows() != din * dout || choi.cols() != din * dout {
            return Err(QobjError::DimensionMismatch(format!("Choi is {}x{}, expected {}", choi.rows(), choi.cols(), din * dout)));
        }
        let defect = choi.hermiticity_defect();
        if defect > CHANNEL_TOL {
            return Err(QobjError::InvalidChannel(format!("Choi not Hermitian (defect {defect:.2e})")));
        }
        let choi = choi.hermitian_part();
        let lmin = matcore::min_eigenvalue(&choi)?;
        if lmin < -CHANNEL_TOL {
            return Err(QobjError::InvalidChannel(format!("Choi not PSD (min eigenvalue {lmin:.3e})")));
        }
        let marg = choi::input_marginal(&choi, din, dout);
        let target = ComplexMatrix::identity(din).scale_real(1.0 / din as f64);
        let tp = marg.max_abs_diff(&target);
        if tp > CHANNEL_TOL {
            return Err(QobjError::InvalidChannel(format!("not trace preserving (marginal defect {tp:.3e})")));
        }
        Ok(Self { din, dout, choi })
    }

    /// Nearest-ish valid channel to an approximately valid Choi: the input
    /// marginal is corrected exactly, then just enough of `I/(din dout)` is mixed
    /// in to remove negative eigenvalues.
    pub fn repaired(din: usize, dout: usize, approx: &ComplexMatrix) -> Result<Self, QobjError> {
        let mut j = approx.hermitian_part();
        let marg = choi::input_marginal(&j, din, dout);
        let defect = &marg - &ComplexMatrix::identity(din).scale_real(1.0 / din as f64);
        j -= &defect.kron(&ComplexMatrix::identity(dout).scale_real(1.0 / dout as f64));
        let n = (din * dout) as f64;
        let lmin = matcore::min_eigenvalue(&j)?;
        if lmin < 0.0 {
            let eta = -lmin / (1.0 / n - lmin);
            j = j.scale_real(1.0 - eta);
            j += &ComplexMatrix::identity(din * dout).scale_real(eta / n);
        }
        Self::from_choi(din, dout, j)
    }

    pub fn from_kraus(din: usize, dout: usize, kraus: &[ComplexMatrix]) -> Result<Self, QobjError> {
        if kraus.is_empty() {
            return Err(QobjError::InvalidChannel("no Kraus operators".into()));
        }
        for k in kraus {
            if k.rows() != dout || k.cols() != din {
                return Err(QobjError::DimensionMismatch(format!("Kraus operator is {}x{}, expected {dout}x{din}", k.rows(), k.cols())));
            }
        }
        Self::from_choi(din, dout, choi_of_kraus(din, dout, kraus))
    }

    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self, QobjError> {
        if !u.is_square() {
            return Err(QobjError::InvalidChannel("unitary must be square".into()));
        }
        let d = u.dim();
        let defect = (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(d));
        if defect > CHANNEL_TOL {
            return Err(QobjError::InvalidChannel(format!("matrix is not unitary (defect {defect:.2e})")));
        }
        Self::from_kraus(d, d, std::slice::from_ref(u))
    }

    pub fn identity(d: usize) -> Self {
        Self { din: d, dout: d, choi: choi::phi_plus(d) }
    }

    /// Quantum Fourier transform `F_d = d^{-1/2} Σ_{jk} ω^{jk} |j⟩⟨k|`.
    pub fn qft(d: usize) -> Result<Self, QobjError> {
        if d < 2 {
            return Err(QobjError::InvalidChannel("qft needs d >= 2".into()));
        }
        Self::from_unitary(&fourier_matrix(d))
    }

    /// Completely dephasing channel `Δ_d`.
    pub fn dephasing(d: usize) -> Self {
        let mut j = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            j[(i * d + i, i * d + i)] = c64(1.0 / d as f64, 0.0);
        }
        Self { din: d, dout: d, choi: j }
    }

    /// `R_d(ρ) = Tr(ρ) ψ⁺_d`.
    pub fn replacement(d: usize) -> Self {
        Self::constant(d, &QuantumState::maximally_coherent(d))
    }

    /// Replacement channel `ρ ↦ Tr(ρ) σ`.
    pub fn constant(din: usize, sigma: &QuantumState) -> Self {
        let dout = sigma.dim();
        let choi = ComplexMatrix::identity(din).scale_real(1.0 / din as f64).kron(sigma.matrix());
        Self { din, dout, choi }
    }

    /// Deterministic classical channel `|i⟩⟨i| ↦ |f(i)⟩⟨f(i)|`.
    pub fn deterministic(din: usize, dout: usize, f: &[usize]) -> Result<Self, QobjError> {
        if f.len() != din || f.iter().any(|&j| j >= dout) {
            return Err(QobjError::InvalidChannel(format!("function table {f:?} does not map {din} -> {dout}")));
        }
        let mut j = ComplexMatrix::zeros(din * dout, din * dout);
        for (i, &fi) in f.iter().enumerate() {
            j[(i * dout + fi, i * dout + fi)] = c64(1.0 / din as f64, 0.0);
        }
        Ok(Self { din, dout, choi: j })
    }

    /// Classical channel with transition probabilities `p[i][j] = p(j|i)`.
    pub fn classical(p: &[Vec<f64>]) -> Result<Self, QobjError> {
        let din = p.len();
        let dout = p.first().map_or(0, Vec::len);
        let mut diag = Vec::with_capacity(din * dout);
        for row in p {
            if row.len() != dout || row.iter().any(|&v| v < -CHANNEL_TOL) {
                return Err(QobjError::InvalidChannel("bad transition matrix".into()));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > CHANNEL_TOL {
                return Err(QobjError::InvalidChannel(format!("row sums to {s}")));
            }
            diag.extend(row.iter().map(|v| v.max(0.0) / din as f64));
        }
        Self::from_choi(din, dout, ComplexMatrix::from_real_diagonal(&diag))
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    /// Normalised Choi matrix.
    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn choi_unnormalized(&self) -> ComplexMatrix {
        self.choi.scale_real(self.din as f64)
    }

    /// The map applied to an arbitrary operator on the input space.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        choi::apply_map(&self.choi_unnormalized(), self.din, self.dout, x)
    }

    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState, QobjError> {
        if state.dim() != self.din {
            return Err(QobjError::DimensionMismatch(format!("state dimension {} vs channel input {}", state.dim(), self.din)));
        }
        Ok(QuantumState { rho: self.apply_operator(state.matrix()).hermitian_part() })
    }

    /// `(id_R ⊗ N)(ρ_{R A0})` for a state whose last factor is the input.
    pub fn apply_to_last(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, QobjError> {
        if !rho.rows().is_multiple_of(self.din) {
            return Err(QobjError::DimensionMismatch("reference dimension".into()));
        }
        let left = rho.rows() / self.din;
        Ok(choi::apply_to_factor(&self.choi_unnormalized(), self.din, self.dout, rho, left, 1))
    }

    /// `self ⊗ other`, acting on `(A0 B0) -> (A1 B1)`.
    pub fn tensor(&self, other: &Self) -> Self {
        let choi = choi::tensor_choi(&self.choi, (self.din, self.dout), &other.choi, (other.din, other.dout));
        Self { din: self.din * other.din, dout: self.dout * other.dout, choi }
    }

    /// Liouville matrix acting on row-major vectorised operators.
    pub fn liouville(&self) -> ComplexMatrix {
        choi::liouville_from_choi(&self.choi_unnormalized(), self.din, self.dout)
    }

    /// `Δ ∘ N ∘ Δ`, whose Choi is the diagonal of `J`.
    pub fn dephased_both(&self) -> Self {
        Self { din: self.din, dout: self.dout, choi: self.choi.diag_part() }
    }

    /// `Δ ∘ N`.
    pub fn dephased_output(&self) -> Self {
        compose(&Self::dephasing(self.dout), self).expect("dims agree")
    }
}

/// `outer ∘ inner` (apply `inner` first).
pub fn compose(outer: &QuantumChannel, inner: &QuantumChannel) -> Result<QuantumChannel, QobjError> {
    if inner.dout != outer.din {
        return Err(QobjError::DimensionMismatch(format!(
            "cannot compose {}->{} after {}->{}",
            outer.din, outer.dout, inner.din, inner.dout
        )));
    }
    let choi = choi::compose_choi(&outer.choi, (outer.din, outer.dout), &inner.choi, (inner.din, inner.dout));
    Ok(QuantumChannel { din: inner.din, dout: outer.dout, choi })
}

pub fn tensor(a: &QuantumChannel, b: &QuantumChannel) -> QuantumChannel {
    a.tensor(b)
}

/// Normalised Choi of the map with the given Kraus operators.
pub fn choi_of_kraus(din: usize, dout: usize, kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let n = din * dout;
    let mut j = ComplexMatrix::zeros(n, n);
    for k in kraus {
        // Column vector of (I ⊗ K)|φ⁺⟩ · sqrt(din): entries K[b][a] at (a, b).
        let v: Vec<Complex64> = (0..n).map(|idx| k[(idx % dout, idx / dout)]).collect();
        j += &ComplexMatrix::outer(&v, &v);
    }
    j.scale_real(1.0 / din as f64)
}

/// Unitary matrix of `F_d`; `d = 1` gives the trivial `[1]`.
pub fn fourier_matrix(d: usize) -> ComplexMatrix {
    let s = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |j, k| {
        let ang = 2.0 * PI * ((j * k) % d) as f64 / d as f64;
        c64(s * ang.cos(), s * ang.sin())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelClass {
    Classical,
    Mio,
    Dio,
    Di,
}

/// Matrix unit `E_{row,col}` on which a class check failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassWitness {
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelClassVerdict {
    pub class: ChannelClass,
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub witness: Option<ClassWitness>,
}

impl ChannelClassVerdict {
    fn from_worst(class: ChannelClass, worst: (f64, usize, usize)) -> Self {
        let pass = worst.0 <= CLASS_TOL;
        Self {
            class,
            pass,
            residual: worst.0,
            tolerance: CLASS_TOL,
            witness: (!pass).then_some(ClassWitness { row: worst.1, col: worst.2 }),
        }
    }
}

fn offdiag_trace_norm(m: &ComplexMatrix) -> f64 {
    let off = m - &m.diag_part();
    matcore::trace_norm(&off).expect("square")
}

/// `N = Δ ∘ N ∘ Δ`, i.e. the Choi matrix is diagonal.
pub fn classical_check(n: &QuantumChannel) -> ChannelClassVerdict {
    let res = offdiag_trace_norm(&n.choi);
    let (mut bi, mut bj, mut best) = (0, 0, -1.0);
    for i in 0..n.choi.rows() {
        for j in 0..n.choi.cols() {
            if i != j && n.choi[(i, j)].norm() > best {
                best = n.choi[(i, j)].norm();
                (bi, bj) = (i, j);
            }
        }
    }
    ChannelClassVerdict::from_worst(ChannelClass::Classical, (res, bi, bj))
}

fn worst_over_units(n: &QuantumChannel, diagonal_only: bool, f: impl Fn(&ComplexMatrix, usize, usize) -> f64) -> (f64, usize, usize) {
    let mut worst = (0.0, 0, 0);
    for a in 0..n.din {
        for b in 0..n.din {
            if diagonal_only && a != b {
                continue;
            }
            let out = n.apply_operator(&ComplexMatrix::unit(n.din, a, b));
            let r = f(&out, a, b);
            if r > worst.0 {
                worst = (r, a, b);
            }
        }
    }
    worst
}

/// Maximally incoherent: `N(|i⟩⟨i|)` is diagonal for every `i`.
pub fn mio_check(n: &QuantumChannel) -> ChannelClassVerdict {
    let worst = worst_over_units(n, true, |out, _, _| offdiag_trace_norm(out));
    ChannelClassVerdict::from_worst(ChannelClass::Mio, worst)
}

/// Dephasing covariant: `Δ ∘ N = N ∘ Δ` on every matrix unit.
pub fn dio_check(n: &QuantumChannel) -> ChannelClassVerdict {
    let worst = worst_over_units(n, false, |out, a, b| {
        let lhs = out.diag_part();
        let rhs = if a == b { out.clone() } else { ComplexMatrix::zeros(n.dout, n.dout) };
        matcore::trace_norm(&(&lhs - &rhs)).expect("square")
    });
    ChannelClassVerdict::from_worst(ChannelClass::Dio, worst)
}

/// Detection incoherent: `Δ ∘ N = Δ ∘ N ∘ Δ` on every matrix unit.
pub fn di_check(n: &QuantumChannel) -> ChannelClassVerdict {
    let worst =
        worst_over_units(n, false, |out, a, b| if a == b { 0.0 } else { out.diag_part().real_diagonal().iter().map(|v| v.abs()).sum() });
    ChannelClassVerdict::from_worst(ChannelClass::Di, worst)
}

pub fn class_check(n: &QuantumChannel, class: ChannelClass) -> ChannelClassVerdict {
    match class {
        ChannelClass::Classical => classical_check(n),
        ChannelClass::Mio => mio_check(n),
        ChannelClass::Dio => dio_check(n),
        ChannelClass::Di => di_check(n),
    }
}

/// Trace-norm distance between normalised Choi matrices.
pub fn choi_distance(a: &QuantumChannel, b: &QuantumChannel) -> Result<f64, QobjError> {
    if (a.din, a.dout) != (b.din, b.dout) {
        return Err(QobjError::DimensionMismatch("channels differ in shape".into()));
    }
    Ok(matcore::trace_norm(&(&a.choi - &b.choi))?)
}

/// Cheap upper bound `din · ½‖J_a − J_b‖₁ ≥ ½‖a − b‖⋄`.
pub fn diamond_upper_bound(a: &QuantumChannel, b: &QuantumChannel) -> Result<f64, QobjError> {
    Ok(0.5 * a.din as f64 * choi_distance(a, b)?)
}

/// All `dout^din` deterministic channels, in lexicographic order of function tables.
pub fn deterministic_tables(din: usize, dout: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dout.checked_pow(din as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut code| {
        let mut f = vec![0; din];
        for slot in f.iter_mut().rev() {
            *slot = code % dout;
            code /= dout;
        }
        f
    })
}
