//! Lowering of [`ConicProgram`] to standard form.

use super::admm::{Cone, RawSolution, StandardForm};
use super::{
    AffineMatrix, Block, BlockKind, BlockValue, ConicError, ConicProgram, FormTerm, LinearForm, MatrixTerm, Sense, Solution, SolveReport,
    Var,
};
use crate::matcore::{c64, ComplexMatrix};

/// Sparse rows `(column, coefficient)` of a matrix expression and its constant part.
type SparseRows = (Vec<Vec<(usize, f64)>>, Vec<f64>);

const DROP: f64 = 1e-15;
const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Coordinates of an `n x n` Hermitian matrix: the diagonal first, then for each
/// pair `i < j` (row-major) `√2 Re X_ij` and `√2 Im X_ij`. Orthonormal for the
/// Hilbert–Schmidt inner product.
pub(crate) fn herm_to_svec(m: &ComplexMatrix, out: &mut [f64]) {
    let n = m.rows();
    for i in 0..n {
        out[i] = m[(i, i)].re;
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = m[(i, j)];
            out[k] = SQRT2 * z.re;
            out[k + 1] = SQRT2 * z.im;
            k += 2;
        }
    }
}

pub(crate) fn svec_to_herm(x: &[f64], n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c64(x[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = c64(x[k], x[k + 1]) / SQRT2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

fn basis_matrix(n: usize, k: usize) -> ComplexMatrix {
    let mut x = vec![0.0; n * n];
    x[k] = 1.0;
    svec_to_herm(&x, n)
}

/// Coefficients of `X ↦ Re Tr(C X)` in svec coordinates.
fn trace_coefficients(c: &ComplexMatrix) -> Vec<f64> {
    let n = c.rows();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        out[i] = c[(i, i)].re;
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let (cij, cji) = (c[(i, j)], c[(j, i)]);
            out[k] = (cij.re + cji.re) / SQRT2;
            out[k + 1] = (cij.im - cji.im) / SQRT2;
            k += 2;
        }
    }
    out
}

pub(crate) struct Compiled {
    pub standard: StandardForm,
    offsets: Vec<usize>,
    sign: f64,
    constant: f64,
}

struct Builder<'a> {
    blocks: &'a [Block],
    offsets: Vec<usize>,
    rows: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    cones: Vec<Cone>,
    n: usize,
}

impl Builder<'_> {
    fn block(&self, var: Var) -> Result<&Block, ConicError> {
        self.blocks.get(var.id).ok_or_else(|| ConicError::Malformed(format!("block {} was never declared", var.id)))
    }

    fn new_slack(&mut self, cone: Cone) -> usize {
        let off = self.n;
        let width = match cone {
            Cone::Free { len, .. } | Cone::Nonneg { len, .. } => len,
            Cone::Psd { n, .. } => n * n,
        };
        self.n += width;
        self.cones.push(cone);
        off
    }

    /// Dense coefficient vector of a linear form plus its constant.
    fn form(&self, f: &LinearForm) -> Result<(Vec<(usize, f64)>, f64), ConicError> {
        let mut out = Vec::new();
        for t in &f.terms {
            match t {
                FormTerm::Trace { var, coeff } => {
                    let b = self.block(*var)?;
                    if !b.is_matrix() || coeff.rows() != b.size || coeff.cols() != b.size {
                        return Err(ConicError::Malformed(format!(
                            "trace term of size {} on block {} ({:?}, {})",
                            coeff.rows(),
                            var.id,
                            b.kind,
                            b.size
                        )));
                    }
                    let off = self.offsets[var.id];
                    for (k, v) in trace_coefficients(coeff).into_iter().enumerate() {
                        if v.abs() > DROP {
                            out.push((off + k, v));
                        }
                    }
                }
                FormTerm::Entry { var, index, coeff } => {
                    let b = self.block(*var)?;
                    if b.is_matrix() || *index >= b.size {
                        return Err(ConicError::Malformed(format!("entry {index} out of range for block {}", var.id)));
                    }
                    out.push((self.offsets[var.id] + index, *coeff));
                }
            }
        }
        Ok((out, f.constant))
    }

    /// Rows (in svec coordinates of the expression) of a matrix expression.
    fn matrix_rows(&self, e: &AffineMatrix) -> Result<SparseRows, ConicError> {
        let m = e.dim;
        let width = m * m;
        let mut rows = vec![Vec::new(); width];
        let mut buf = vec![0.0; width];
        let check = |y: &ComplexMatrix, what: &str| -> Result<(), ConicError> {
            if y.rows() != m || y.cols() != m {
                return Err(ConicError::Malformed(format!("{what} produced {}x{}, expected {m}", y.rows(), y.cols())));
            }
            let defect = y.hermiticity_defect();
            if defect > 1e-12 * y.max_abs().max(1.0) {
                return Err(ConicError::Malformed(format!("{what} is not Hermitian (defect {defect:.2e})")));
            }
            Ok(())
        };
        for t in &e.terms {
            match t {
                MatrixTerm::Map { var, f } => {
                    let b = self.block(*var)?;
                    if !b.is_matrix() {
                        return Err(ConicError::Malformed(format!("matrix map applied to vector block {}", var.id)));
                    }
                    let off = self.offsets[var.id];
                    for k in 0..b.width() {
                        let y = f(&basis_matrix(b.size, k));
                        check(&y, "matrix map")?;
                        herm_to_svec(&y, &mut buf);
                        for (r, &v) in buf.iter().enumerate() {
                            if v.abs() > DROP {
                                rows[r].push((off + k, v));
                            }
                        }
                    }
                }
                MatrixTerm::VectorMap { var, f } => {
                    let b = self.block(*var)?;
                    if b.is_matrix() {
                        return Err(ConicError::Malformed(format!("vector map applied to matrix block {}", var.id)));
                    }
                    let off = self.offsets[var.id];
                    let mut unit = vec![0.0; b.size];
                    for k in 0..b.size {
                        unit[k] = 1.0;
                        let y = f(&unit);
                        unit[k] = 0.0;
                        check(&y, "vector map")?;
                        herm_to_svec(&y, &mut buf);
                        for (r, &v) in buf.iter().enumerate() {
                            if v.abs() > DROP {
                                rows[r].push((off + k, v));
                            }
                        }
                    }
                }
            }
        }
        if e.constant.rows() != m {
            return Err(ConicError::Malformed("constant has wrong size".into()));
        }
        check(&e.constant, "constant")?;
        let mut cst = vec![0.0; width];
        herm_to_svec(&e.constant, &mut cst);
        Ok((rows, cst))
    }

    fn push_row(&mut self, mut row: Vec<(usize, f64)>, rhs: f64) {
        row.sort_by_key(|&(c, _)| c);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
        for (c, v) in row {
            match merged.last_mut() {
                Some((lc, lv)) if *lc == c => *lv += v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|&(_, v)| v.abs() > DROP);
        self.rows.push(merged);
        self.b.push(rhs);
    }
}

pub(crate) fn compile(p: &ConicProgram) -> Result<Compiled, ConicError> {
    let mut offsets = Vec::with_capacity(p.blocks.len());
    let mut cones = Vec::new();
    let mut n = 0;
    for blk in &p.blocks {
        if blk.size == 0 {
            return Err(ConicError::Malformed("empty block".into()));
        }
        offsets.push(n);
        cones.push(match blk.kind {
            BlockKind::Psd => Cone::Psd { offset: n, n: blk.size },
            BlockKind::Hermitian => Cone::Free { len: blk.width() },
            BlockKind::Nonneg => Cone::Nonneg { offset: n, len: blk.size },
            BlockKind::Free => Cone::Free { len: blk.size },
        });
        n += blk.width();
    }
    let mut bld = Builder { blocks: &p.blocks, offsets, rows: Vec::new(), b: Vec::new(), cones, n };

    for (f, rhs) in &p.equalities {
        let (row, cst) = bld.form(f)?;
        bld.push_row(row, rhs - cst);
    }
    for (f, rhs) in &p.inequalities {
        let (mut row, cst) = bld.form(f)?;
        let s = bld.new_slack(Cone::Nonneg { offset: bld.n, len: 1 });
        row.push((s, -1.0));
        bld.push_row(row, rhs - cst);
    }
    for e in &p.matrix_equalities {
        let (rows, cst) = bld.matrix_rows(e)?;
        for (row, c) in rows.into_iter().zip(cst) {
            bld.push_row(row, -c);
        }
    }
    for e in &p.psd {
        let (rows, cst) = bld.matrix_rows(e)?;
        let s = bld.new_slack(Cone::Psd { offset: bld.n, n: e.dim });
        for (r, (mut row, c)) in rows.into_iter().zip(cst).enumerate() {
            row.push((s + r, -1.0));
            bld.push_row(row, -c);
        }
    }

    let (obj, constant) = bld.form(&p.objective)?;
    let sign = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let mut c = vec![0.0; bld.n];
    for (k, v) in obj {
        c[k] += sign * v;
    }
    let standard = StandardForm::new(bld.n, bld.rows, bld.b, c, bld.cones);
    Ok(Compiled { standard, offsets: bld.offsets, sign, constant })
}

impl Compiled {
    pub(crate) fn extract(&self, p: &ConicProgram, raw: RawSolution) -> Solution {
        let values = p
            .blocks
            .iter()
            .zip(&self.offsets)
            .map(|(blk, &off)| {
                let x = &raw.x[off..off + blk.width()];
                if blk.is_matrix() {
                    BlockValue::Matrix(svec_to_herm(x, blk.size))
                } else {
                    BlockValue::Vector(x.to_vec())
                }
            })
            .collect();
        let r = raw.report;
        let report = SolveReport {
            primal_objective: self.sign * r.primal_objective + self.constant,
            dual_objective: self.sign * r.dual_objective + self.constant,
            ..r
        };
        Solution { report, values, certificate: raw.certificate }
    }
}
