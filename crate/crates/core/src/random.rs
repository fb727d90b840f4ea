//! Seeded generators for random states, unitaries and channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::{c64, Complex64, ComplexMatrix};
use crate::qobj::{QuantumChannel, QuantumState};

pub type DetRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> DetRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Orthonormalises the columns (modified Gram–Schmidt, run twice for stability).
fn orthonormal_columns(mut m: ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = (m.rows(), m.cols());
    for _ in 0..2 {
        for j in 0..cols {
            for k in 0..j {
                let mut dot = c64(0.0, 0.0);
                for i in 0..rows {
                    dot += m[(i, k)].conj() * m[(i, j)];
                }
                for i in 0..rows {
                    let v = m[(i, k)];
                    m[(i, j)] -= dot * v;
                }
            }
            let norm = (0..rows).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            for i in 0..rows {
                m[(i, j)] /= norm;
            }
        }
    }
    m
}

/// Haar-random unitary (QR of a Ginibre matrix; Gram–Schmidt fixes the phases).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    orthonormal_columns(ginibre(rng, d, d))
}

/// Random isometry `C^din -> C^dout` (requires `dout >= din`).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, din: usize, dout: usize) -> ComplexMatrix {
    assert!(dout >= din, "isometry needs dout >= din");
    orthonormal_columns(ginibre(rng, dout, din))
}

pub fn random_pure_ket<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| gaussian_complex(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> QuantumState {
    QuantumState::pure(&random_pure_ket(rng, d)).expect("nonzero ket")
}

/// Full-rank random state `G G† / Tr(G G†)`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> QuantumState {
    let g = ginibre(rng, d, d);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    QuantumState::new(m.scale_real(1.0 / tr).hermitian_part()).expect("Ginibre state")
}

/// Random channel from a Stinespring isometry with `rank` Kraus operators.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, din: usize, dout: usize, rank: usize) -> QuantumChannel {
    let v = random_isometry(rng, din, dout * rank);
    let kraus: Vec<ComplexMatrix> = (0..rank).map(|k| ComplexMatrix::from_fn(dout, din, |i, j| v[(i * rank + k, j)])).collect();
    QuantumChannel::from_kraus(din, dout, &kraus).expect("isometry gives a channel")
}

/// Random channel with full-rank Choi matrix.
pub fn random_full_rank_channel<R: Rng + ?Sized>(rng: &mut R, din: usize, dout: usize) -> QuantumChannel {
    random_channel(rng, din, dout, din * dout)
}

pub fn random_unitary_channel<R: Rng + ?Sized>(rng: &mut R, d: usize) -> QuantumChannel {
    QuantumChannel::from_unitary(&haar_unitary(rng, d)).expect("unitary")
}

pub fn random_stochastic<R: Rng + ?Sized>(rng: &mut R, din: usize, dout: usize) -> Vec<Vec<f64>> {
    (0..din)
        .map(|_| {
            let row: Vec<f64> = (0..dout).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|v| v / s).collect()
        })
        .collect()
}

pub fn random_classical_channel<R: Rng + ?Sized>(rng: &mut R, din: usize, dout: usize) -> QuantumChannel {
    QuantumChannel::classical(&random_stochastic(rng, din, dout)).expect("stochastic matrix")
}

/// Random permutation-times-phases unitary, which is incoherent.
pub fn random_incoherent_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let mut perm: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let mut u = ComplexMatrix::zeros(d, d);
    for (i, &p) in perm.iter().enumerate() {
        let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        u[(p, i)] = c64(phase.cos(), phase.sin());
    }
    u
}

/// Random dephasing-covariant channel: a mixture of incoherent unitaries and a classical channel.
pub fn random_dio_channel<R: Rng + ?Sized>(rng: &mut R, din: usize, dout: usize) -> QuantumChannel {
    let classical = random_classical_channel(rng, din, dout);
    if din != dout {
        return classical;
    }
    let w: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    let mut j = classical.choi().scale_real(w[0] / s);
    for &wk in &w[1..] {
        let u = QuantumChannel::from_unitary(&random_incoherent_unitary(rng, din)).expect("unitary");
        j += &u.choi().scale_real(wk / s);
    }
    QuantumChannel::from_choi(din, dout, j).expect("mixture of channels")
}

/// Convex mixture of channels with the same shape.
pub fn mixture(weights: &[f64], channels: &[&QuantumChannel]) -> QuantumChannel {
    let (din, dout) = (channels[0].din(), channels[0].dout());
    let mut j = ComplexMatrix::zeros(din * dout, din * dout);
    for (w, c) in weights.iter().zip(channels) {
        j += &c.choi().scale_real(*w);
    }
    QuantumChannel::from_choi(din, dout, j).expect("mixture of channels")
}

/// Random classical-to-classical channel on a deterministic table, for tests.
pub fn random_deterministic<R: Rng + ?Sized>(rng: &mut R, din: usize, dout: usize) -> QuantumChannel {
    let f: Vec<usize> = (0..din).map(|_| rng.random_range(0..dout)).collect();
    QuantumChannel::deterministic(din, dout, &f).expect("valid table")
}
