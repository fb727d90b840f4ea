//! Index-level operations on raw Choi matrices.
//!
//! Conventions: a map `A -> B` has Choi matrix on `A ⊗ B` (input factor first),
//! flat index `a * d_B + b`. The *unnormalised* Choi `C = Σ E_ab ⊗ N(E_ab)` is
//! `d_A` times the normalised one stored in [`super::QuantumChannel`].

use crate::matcore::{Complex64, ComplexMatrix};

/// Applies the map with unnormalised Choi `c` (on `din ⊗ dout`) to the middle
/// factor of `x`, which lives on `left ⊗ din ⊗ right`.
pub fn apply_to_factor(c: &ComplexMatrix, din: usize, dout: usize, x: &ComplexMatrix, left: usize, right: usize) -> ComplexMatrix {
    let nin = left * din * right;
    assert_eq!(x.rows(), nin, "operator does not match left*din*right");
    assert_eq!(c.rows(), din * dout, "Choi does not match din*dout");
    let nout = left * dout * right;
    let mut out = ComplexMatrix::zeros(nout, nout);
    let zero = Complex64::new(0.0, 0.0);
    let xs = x.as_slice();
    let cs = c.as_slice();
    let cd = din * dout;
    let os = out.as_mut_slice();
    for l in 0..left {
        for i in 0..din {
            for r in 0..right {
                let row_in = (l * din + i) * right + r;
                for lp in 0..left {
                    for ip in 0..din {
                        for rp in 0..right {
                            let col_in = (lp * din + ip) * right + rp;
                            let xv = xs[row_in * nin + col_in];
                            if xv == zero {
                                continue;
                            }
                            for o in 0..dout {
                                let row_out = (l * dout + o) * right + r;
                                let crow = (i * dout + o) * cd + ip * dout;
                                for op in 0..dout {
                                    let col_out = (lp * dout + op) * right + rp;
                                    os[row_out * nout + col_out] += xv * cs[crow + op];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// `N(X)` for the map with unnormalised Choi `c`.
pub fn apply_map(c: &ComplexMatrix, din: usize, dout: usize, x: &ComplexMatrix) -> ComplexMatrix {
    apply_to_factor(c, din, dout, x, 1, 1)
}

/// Choi of `N ⊗ M` from the Chois of `N: A0 -> A1` and `M: B0 -> B1`, on `(A0 B0) ⊗ (A1 B1)`.
pub fn tensor_choi(jn: &ComplexMatrix, dn: (usize, usize), jm: &ComplexMatrix, dm: (usize, usize)) -> ComplexMatrix {
    jn.kron(jm).permute_subsystems(&[dn.0, dn.1, dm.0, dm.1], &[0, 2, 1, 3]).expect("consistent tensor dims")
}

/// Normalised Choi of `outer ∘ inner`.
pub fn compose_choi(outer: &ComplexMatrix, outer_dims: (usize, usize), inner: &ComplexMatrix, inner_dims: (usize, usize)) -> ComplexMatrix {
    let (din, mid) = inner_dims;
    assert_eq!(mid, outer_dims.0, "composition dimension mismatch");
    let c_outer = outer.scale_real(outer_dims.0 as f64);
    apply_to_factor(&c_outer, mid, outer_dims.1, inner, din, 1)
}

/// Normalised maximally entangled state on `d ⊗ d`.
pub fn phi_plus(d: usize) -> ComplexMatrix {
    let n = d * d;
    let mut m = ComplexMatrix::zeros(n, n);
    let w = Complex64::new(1.0 / d as f64, 0.0);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = w;
        }
    }
    m
}

/// `Tr_out J` for a Choi on `din ⊗ dout`.
pub fn input_marginal(j: &ComplexMatrix, din: usize, dout: usize) -> ComplexMatrix {
    j.partial_trace(&[din, dout], &[0]).expect("Choi dims")
}

/// Liouville (transfer) matrix `L[(c,d),(a,b)] = N(E_ab)[c,d]` from an unnormalised Choi.
pub fn liouville_from_choi(c: &ComplexMatrix, din: usize, dout: usize) -> ComplexMatrix {
    let mut l = ComplexMatrix::zeros(dout * dout, din * din);
    for a in 0..din {
        for b in 0..din {
            for cc in 0..dout {
                for d in 0..dout {
                    l[(cc * dout + d, a * din + b)] = c[(a * dout + cc, b * dout + d)];
                }
            }
        }
    }
    l
}

/// Row-major vectorisation.
pub fn vec_of(m: &ComplexMatrix) -> Vec<Complex64> {
    m.as_slice().to_vec()
}

pub fn unvec(v: &[Complex64], n: usize) -> ComplexMatrix {
    ComplexMatrix::new(n, n, v.to_vec()).expect("square unvec")
}
