//! Hermitian eigensolver.
//!
//! Householder reduction to a complex Hermitian tridiagonal matrix, a diagonal
//! phase change that makes the off-diagonal real, then implicit QL iterations
//! on the real symmetric tridiagonal.

use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

/// Eigen-decomposition `M = V diag(values) V†`, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V diag(f(values)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            if fv[k] == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * fv[k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }
}

const HERMITIAN_INPUT_TOL: f64 = 1e-10;

fn check_input(m: &ComplexMatrix) -> Result<(), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_INPUT_TOL * m.max_abs().max(1.0) {
        return Err(LinalgError::NotHermitian(defect));
    }
    Ok(())
}

pub(super) fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen, LinalgError> {
    check_input(m)?;
    let n = m.dim();
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: ComplexMatrix::zeros(0, 0) });
    }
    let tri = tridiagonalize(&m.hermitian_part(), true);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    let mut d = tri.diag;
    let mut e = tri.offdiag;
    tql2(&mut d, &mut e, Some(&mut z))?;
    // V = Q · diag(phase) · Z.
    let q = tri.q.expect("accumulated reflector");
    let mut qd = q;
    for i in 0..n {
        for k in 0..n {
            qd[(i, k)] *= tri.phase[k];
        }
    }
    let mut vectors = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let a = qd[(i, k)];
            for j in 0..n {
                vectors[(i, j)] += a * z[k * n + j];
            }
        }
    }
    Ok(HermitianEigen { values: d, vectors })
}

pub(super) fn eigvalsh(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    check_input(m)?;
    if m.dim() == 0 {
        return Ok(vec![]);
    }
    let tri = tridiagonalize(&m.hermitian_part(), false);
    let mut d = tri.diag;
    let mut e = tri.offdiag;
    tql2(&mut d, &mut e, None)?;
    Ok(d)
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `offdiag[k]` couples `k` and `k+1` after the phase change; last entry is 0.
    offdiag: Vec<f64>,
    phase: Vec<Complex64>,
    q: Option<ComplexMatrix>,
}

fn tridiagonalize(m: &ComplexMatrix, want_q: bool) -> Tridiagonal {
    let n = m.dim();
    let mut a = m.clone();
    let mut q = want_q.then(|| ComplexMatrix::identity(n));
    let mut sub = vec![Complex64::new(0.0, 0.0); n];
    let zero = Complex64::new(0.0, 0.0);

    for k in 0..n.saturating_sub(1) {
        let len = n - k - 1;
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            sub[k] = x[0];
            continue;
        }
        let norm = (tail + x[0].norm_sqr()).sqrt();
        let x0abs = x[0].norm();
        let ph = if x0abs == 0.0 { Complex64::new(1.0, 0.0) } else { x[0] / x0abs };
        let alpha = -ph * norm;
        let mut v = x;
        v[0] -= alpha;
        let tau = 1.0 / (norm * norm + norm * x0abs);

        // p = tau * B v on the trailing block.
        let mut p = vec![zero; len];
        for (ii, pi) in p.iter_mut().enumerate() {
            let row = k + 1 + ii;
            let mut acc = zero;
            for (jj, vj) in v.iter().enumerate() {
                acc += a[(row, k + 1 + jj)] * vj;
            }
            *pi = acc * tau;
        }
        let vp: Complex64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let kk = 0.5 * tau * vp.re;
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * kk).collect();
        for ii in 0..len {
            for jj in 0..len {
                let upd = v[ii] * w[jj].conj() + w[ii] * v[jj].conj();
                a[(k + 1 + ii, k + 1 + jj)] -= upd;
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = zero;
            a[(k, i)] = zero;
        }
        sub[k] = alpha;

        if let Some(q) = q.as_mut() {
            // Q <- Q (I - tau v v†) on columns k+1..n.
            for i in 0..n {
                let mut s = zero;
                for (jj, vj) in v.iter().enumerate() {
                    s += q[(i, k + 1 + jj)] * vj;
                }
                s *= tau;
                for (jj, vj) in v.iter().enumerate() {
                    q[(i, k + 1 + jj)] -= s * vj.conj();
                }
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut phase = vec![Complex64::new(1.0, 0.0); n];
    let mut offdiag = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let mag = sub[k].norm();
        offdiag[k] = mag;
        phase[k + 1] = if mag == 0.0 { phase[k] } else { phase[k] * sub[k] / mag };
    }
    Tridiagonal { diag, offdiag, phase, q }
}

/// Implicit QL on a symmetric tridiagonal (`e[i]` couples `i`, `i+1`; `e[n-1] = 0`).
/// Eigenvalues come back ascending, with `z` (row-major, columns are vectors) permuted to match.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Vec<f64>>) -> Result<(), LinalgError> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(LinalgError::NoConvergence);
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zh = z[k * n + i + 1];
                            z[k * n + i + 1] = s * z[k * n + i] + c * zh;
                            z[k * n + i] = c * z[k * n + i] - s * zh;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Selection sort keeps the eigenvector swaps simple.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in i + 1..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            if let Some(z) = z.as_deref_mut() {
                for row in 0..n {
                    z.swap(row * n + i, row * n + k);
                }
            }
        }
    }
    Ok(())
}
