//! Douglas–Rachford splitting for `min c·x s.t. A x = b, x ∈ K`.
//!
//! Iteration (scaled form, over-relaxation `α`):
//!
//! ```text
//! x̃ = Π_aff(z − u − c/ρ)
//! x̂ = α x̃ + (1 − α) z
//! z = Π_K(x̂ + u)
//! u = u + x̂ − z
//! ```
//!
//! `Π_aff` uses a pivoted Cholesky factor of `A Aᵀ` (after dropping dependent
//! rows). `ρ` stays fixed: residual-balancing updates broke the monotone
//! convergence of the splitting on the robustness programs. Dual variables are
//! `y = −ρ w` from the affine multiplier and `s = −ρ u ∈ K*`.

use super::compile::{herm_to_svec, svec_to_herm};
use super::{ConicError, SolveReport, SolveStatus, SolverSettings};
use crate::matcore;

#[derive(Clone, Copy, Debug)]
pub(crate) enum Cone {
    Free {
        len: usize,
    },
    Nonneg {
        offset: usize,
        len: usize,
    },
    /// `n x n` Hermitian PSD block stored as `n²` svec coordinates.
    Psd {
        offset: usize,
        n: usize,
    },
}

pub(crate) struct StandardForm {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    c: Vec<f64>,
    cones: Vec<Cone>,
}

pub(crate) struct RawSolution {
    pub x: Vec<f64>,
    pub report: SolveReport,
    pub certificate: Option<Vec<f64>>,
}

impl StandardForm {
    pub fn new(n: usize, rows: Vec<Vec<(usize, f64)>>, b: Vec<f64>, c: Vec<f64>, cones: Vec<Cone>) -> Self {
        Self { n, rows, b, c, cones }
    }
}

/// Affine projector onto `{x : A x = b}` for a row-normalised, full-row-rank `A`.
struct AffineProjector {
    rows: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    /// Lower-triangular Cholesky factor of `A Aᵀ`, row-major `m x m`.
    l: Vec<f64>,
}

impl AffineProjector {
    fn m(&self) -> usize {
        self.rows.len()
    }

    fn apply_a(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|&(c, v)| v * x[c]).sum();
        }
    }

    fn apply_at(&self, w: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (wi, row) in w.iter().zip(&self.rows) {
            for &(c, v) in row {
                out[c] += v * wi;
            }
        }
    }

    #[allow(clippy::needless_range_loop)]
    fn solve_gram(&self, r: &mut [f64]) {
        let m = self.m();
        for i in 0..m {
            let mut s = r[i];
            for k in 0..i {
                s -= self.l[i * m + k] * r[k];
            }
            r[i] = s / self.l[i * m + i];
        }
        for i in (0..m).rev() {
            let mut s = r[i];
            for k in i + 1..m {
                s -= self.l[k * m + i] * r[k];
            }
            r[i] = s / self.l[i * m + i];
        }
    }

    /// Projects `v` in place; returns the multiplier `w` with `x = v − Aᵀw`.
    fn project(&self, v: &mut [f64], w: &mut [f64], scratch: &mut [f64]) {
        self.apply_a(v, w);
        for (wi, bi) in w.iter_mut().zip(&self.b) {
            *wi -= bi;
        }
        self.solve_gram(w);
        self.apply_at(w, scratch);
        for (vi, si) in v.iter_mut().zip(scratch.iter()) {
            *vi -= si;
        }
    }
}

enum Preprocessed {
    Ready(AffineProjector),
    /// Equalities are inconsistent; the vector is a row combination certificate.
    Inconsistent(Vec<f64>),
}

fn preprocess(sf: &StandardForm) -> Preprocessed {
    let n = sf.n;
    let mut rows = Vec::new();
    let mut b = Vec::new();
    for (row, &bi) in sf.rows.iter().zip(&sf.b) {
        let norm = row.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
        if norm < 1e-14 {
            if bi.abs() > 1e-9 {
                return Preprocessed::Inconsistent(vec![bi.signum()]);
            }
            continue;
        }
        rows.push(row.iter().map(|&(c, v)| (c, v / norm)).collect::<Vec<_>>());
        b.push(bi / norm);
    }
    let m = rows.len();

    // Gram matrix through column lists.
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, row) in rows.iter().enumerate() {
        for &(c, v) in row {
            cols[c].push((i, v));
        }
    }
    let mut g = vec![0.0; m * m];
    for col in &cols {
        for &(i, vi) in col {
            for &(j, vj) in col {
                g[i * m + j] += vi * vj;
            }
        }
    }

    // Pivoted Cholesky: keep a maximal well-conditioned subset of rows.
    let mut perm: Vec<usize> = (0..m).collect();
    let mut diag: Vec<f64> = (0..m).map(|i| g[i * m + i]).collect();
    let mut lcols: Vec<Vec<f64>> = Vec::new(); // lcols[k][i] = L[perm[i], k]
    let mut rank = 0;
    for k in 0..m {
        let (mut best, mut bi) = (-1.0, k);
        for (i, &p) in perm.iter().enumerate().skip(k) {
            if diag[p] > best {
                best = diag[p];
                bi = i;
            }
        }
        if best < 1e-10 {
            break;
        }
        perm.swap(k, bi);
        let pk = perm[k];
        let lkk = best.sqrt();
        let mut col = vec![0.0; m];
        col[pk] = lkk;
        for &pi in &perm[k + 1..] {
            let mut s = g[pi * m + pk];
            for lc in &lcols {
                s -= lc[pi] * lc[pk];
            }
            col[pi] = s / lkk;
            diag[pi] -= col[pi] * col[pi];
        }
        lcols.push(col);
        rank += 1;
    }
    let kept: Vec<usize> = perm[..rank].to_vec();
    let mut l = vec![0.0; rank * rank];
    for (i, &pi) in kept.iter().enumerate() {
        for (k, lc) in lcols.iter().enumerate().take(i + 1) {
            l[i * rank + k] = lc[pi];
        }
    }
    let proj = AffineProjector { rows: kept.iter().map(|&i| rows[i].clone()).collect(), b: kept.iter().map(|&i| b[i]).collect(), l };

    if rank < m {
        // Minimum-norm point of the kept rows must satisfy the dropped ones.
        let mut x0 = vec![0.0; n];
        let mut w = vec![0.0; rank];
        let mut scratch = vec![0.0; n];
        proj.project(&mut x0, &mut w, &mut scratch);
        let resid: Vec<f64> = rows.iter().zip(&b).map(|(row, bi)| row.iter().map(|&(c, v)| v * x0[c]).sum::<f64>() - bi).collect();
        let worst = resid.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        if worst > 1e-8 * (1.0 + b.iter().fold(0.0f64, |a, v| a.max(v.abs()))) {
            return Preprocessed::Inconsistent(resid);
        }
    }
    Preprocessed::Ready(proj)
}

fn project_cones(cones: &[Cone], x: &mut [f64]) -> Result<(), ConicError> {
    for cone in cones {
        match *cone {
            Cone::Free { .. } => {}
            Cone::Nonneg { offset, len } => {
                for v in &mut x[offset..offset + len] {
                    *v = v.max(0.0);
                }
            }
            Cone::Psd { offset, n } => {
                let seg = &mut x[offset..offset + n * n];
                if n == 1 {
                    seg[0] = seg[0].max(0.0);
                    continue;
                }
                let m = svec_to_herm(seg, n);
                let e = matcore::eig_hermitian(&m)?;
                if e.values[0] >= 0.0 {
                    continue;
                }
                herm_to_svec(&e.map(|v| v.max(0.0)), seg);
            }
        }
    }
    Ok(())
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const CHECK_EVERY: usize = 10;
const DRIFT_EVERY: usize = 50;
/// Primal residual below which a steady drift is read as slow convergence, not infeasibility.
const INFEASIBLE_RESIDUAL: f64 = 1e-4;

pub(crate) fn solve(sf: &StandardForm, settings: &SolverSettings) -> Result<RawSolution, ConicError> {
    let n = sf.n;
    let tol = settings.tol;
    let proj = match preprocess(sf) {
        Preprocessed::Ready(p) => p,
        Preprocessed::Inconsistent(cert) => {
            let report = SolveReport {
                status: SolveStatus::Infeasible,
                iterations: 0,
                primal_objective: f64::NAN,
                dual_objective: f64::NAN,
                primal_residual: inf_norm(&cert),
                dual_residual: f64::NAN,
                gap: f64::NAN,
                tol,
            };
            return Ok(RawSolution { x: vec![0.0; n], report, certificate: Some(cert) });
        }
    };
    let m = proj.m();
    let c = &sf.c;
    let b_scale = 1.0 + inf_norm(&proj.b);
    let c_scale = 1.0 + inf_norm(c);

    let rho = settings.rho;
    let alpha = settings.alpha;
    let mut z = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut xt = vec![0.0; n];
    let mut w = vec![0.0; m];
    let mut ax = vec![0.0; m];
    let mut scratch = vec![0.0; n];
    let mut zprev = vec![0.0; n];
    let mut uprev = vec![0.0; n];

    let mut u_at_check = vec![0.0; n];
    let mut drift_prev: Option<Vec<f64>> = None;
    let mut stable_drift = 0;

    let mut report = SolveReport {
        status: SolveStatus::MaxIterations,
        iterations: 0,
        primal_objective: f64::NAN,
        dual_objective: f64::NAN,
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
        gap: f64::INFINITY,
        tol,
    };

    for it in 1..=settings.max_iter {
        zprev.copy_from_slice(&z);
        uprev.copy_from_slice(&u);
        for i in 0..n {
            xt[i] = z[i] - u[i] - c[i] / rho;
        }
        proj.project(&mut xt, &mut w, &mut scratch);
        for i in 0..n {
            let xh = alpha * xt[i] + (1.0 - alpha) * zprev[i];
            z[i] = xh + u[i];
            scratch[i] = xh;
        }
        project_cones(&sf.cones, &mut z)?;
        for i in 0..n {
            u[i] += scratch[i] - z[i];
        }

        if it % CHECK_EVERY != 0 && it != settings.max_iter {
            continue;
        }

        // y = −ρ w, s = −ρ u.
        proj.apply_a(&z, &mut ax);
        let prim = ax.iter().zip(&proj.b).fold(0.0f64, |a, (v, bi)| a.max((v - bi).abs()));
        proj.apply_at(&w, &mut scratch);
        let mut dual: f64 = 0.0;
        for i in 0..n {
            dual = dual.max((c[i] + rho * scratch[i] + rho * u[i]).abs());
        }
        let pobj = dot(c, &z);
        let dobj = -rho * dot(&proj.b, &w);
        let gap = (pobj - dobj).abs();
        report = SolveReport {
            status: SolveStatus::MaxIterations,
            iterations: it,
            primal_objective: pobj,
            dual_objective: dobj,
            primal_residual: prim,
            dual_residual: dual,
            gap,
            tol,
        };
        let gap_scale = 1.0 + pobj.abs() + dobj.abs();
        if prim <= tol * b_scale && dual <= tol * c_scale && gap <= tol * gap_scale {
            report.status = SolveStatus::Optimal;
            return Ok(RawSolution { x: z, report, certificate: None });
        }

        if it % DRIFT_EVERY == 0 {
            // Infeasibility: u drifts linearly along a separating direction.
            let drift: Vec<f64> = u.iter().zip(&u_at_check).map(|(a, b)| (a - b) / DRIFT_EVERY as f64).collect();
            u_at_check.copy_from_slice(&u);
            let dn = inf_norm(&drift);
            if let Some(prev) = &drift_prev {
                let change = drift.iter().zip(prev).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
                if dn > 1e-6 && change <= 1e-4 * dn && prim > INFEASIBLE_RESIDUAL * b_scale {
                    stable_drift += 1;
                } else {
                    stable_drift = 0;
                }
            }
            if stable_drift >= 20 {
                report.status = SolveStatus::Infeasible;
                let cert: Vec<f64> = drift.iter().map(|v| -rho * v).collect();
                return Ok(RawSolution { x: z, report, certificate: Some(cert) });
            }
            drift_prev = Some(drift);
        }
    }

    let loose = 100.0 * tol;
    if report.primal_residual <= loose * b_scale
        && report.dual_residual <= loose * c_scale
        && report.gap <= loose * (1.0 + report.primal_objective.abs() + report.dual_objective.abs())
    {
        report.status = SolveStatus::Inaccurate;
        return Ok(RawSolution { x: z, report, certificate: None });
    }
    // The iterate is still returned: some callers only need a feasible point.
    Ok(RawSolution { x: z, report, certificate: None })
}
