//! Brute-force references and generators of free superchannels shared by the integration tests.
//!
//! The references avoid the conic solver entirely: they search small parameter
//! spaces directly (grid followed by pattern-search refinement).

#![allow(dead_code)]

use dyncoh::matcore::{self, c64, Complex64, ComplexMatrix};
use dyncoh::qobj::QuantumChannel;
use dyncoh::random::{self, DetRng};
use dyncoh::supermap::{Branch, SuperDims, Superchannel};
use rand::Rng;

/// Maximises `f` over a box by a grid followed by shrinking coordinate pattern search.
pub fn maximize_box(f: &dyn Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], grid: usize, tol: f64) -> (f64, Vec<f64>) {
    maximize_box_multistart(f, lo, hi, grid, tol, 1)
}

/// [`maximize_box`] refining the `starts` best grid points, guarding against local maxima.
pub fn maximize_box_multistart(f: &dyn Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], grid: usize, tol: f64, starts: usize) -> (f64, Vec<f64>) {
    let k = lo.len();
    let mut pts: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let x: Vec<f64> = (0..k).map(|i| lo[i] + (hi[i] - lo[i]) * idx[i] as f64 / (grid - 1) as f64).collect();
        pts.push((f(&x), x));
        let mut i = 0;
        while i < k {
            idx[i] += 1;
            if idx[i] < grid {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut overall = (f64::NEG_INFINITY, lo.to_vec());
    for mut best in pts.into_iter().take(starts) {
        let mut step: Vec<f64> = (0..k).map(|i| (hi[i] - lo[i]) / (grid - 1) as f64).collect();
        while step.iter().any(|s| *s > tol) {
            let mut improved = false;
            for i in 0..k {
                for sgn in [-1.0, 1.0] {
                    let mut x = best.1.clone();
                    x[i] = (x[i] + sgn * step[i]).clamp(lo[i], hi[i]);
                    let v = f(&x);
                    if v > best.0 {
                        best = (v, x);
                        improved = true;
                    }
                }
            }
            if !improved {
                step.iter_mut().for_each(|s| *s *= 0.5);
            }
        }
        if best.0 > overall.0 {
            overall = best;
        }
    }
    overall
}

fn bloch(x: f64, y: f64, z: f64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![c64(0.5 * (1.0 + z), 0.0), c64(0.5 * x, -0.5 * y)],
        vec![c64(0.5 * x, 0.5 * y), c64(0.5 * (1.0 - z), 0.0)],
    ])
    .unwrap()
}

/// Half diamond distance of two qubit channels by maximising over pure inputs
/// `Σ_i √λ_i |i⟩|u_i⟩`, parametrised by the Bloch vector of the input marginal.
pub fn diamond_bruteforce(n: &QuantumChannel, m: &QuantumChannel) -> f64 {
    assert_eq!(n.din(), 2);
    let f = |p: &[f64]| {
        // Spherical coordinates (r, θ, φ) for the marginal.
        let (r, th, ph) = (p[0], p[1], p[2]);
        let rho = bloch(r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos());
        let e = matcore::eig_hermitian(&rho).unwrap();
        let mut psi = vec![c64(0.0, 0.0); 4];
        for i in 0..2 {
            let lam = e.values[i].max(0.0).sqrt();
            let u = e.eigenvector(i);
            for a in 0..2 {
                psi[i * 2 + a] += u[a] * lam;
            }
        }
        let state = ComplexMatrix::outer(&psi, &psi);
        let diff = &n.apply_to_last(&state).unwrap() - &m.apply_to_last(&state).unwrap();
        0.5 * matcore::trace_norm(&diff).unwrap()
    };
    let pi = std::f64::consts::PI;
    maximize_box_multistart(&f, &[0.0, 0.0, 0.0], &[1.0, pi, 2.0 * pi], 9, 1e-7, 12).0
}

/// `LR` of a qubit state from the determinant condition on `diag(t) − ρ ⪰ 0`:
/// the optimum is `Tr = 1 + 2|ρ01|`.
pub fn lr_state_qubit(rho: &ComplexMatrix) -> f64 {
    (1.0 + 2.0 * rho[(0, 1)].norm()).log2()
}

/// `D_H^ε(ρ‖σ)` from the scalar Lagrange dual of the test program,
/// `β = max_{μ ≥ 0} μ(1 − ε) − Tr(μρ − σ)_+`, searched over `μ = e^t`.
pub fn htest_dual_search(rho: &ComplexMatrix, sigma: &ComplexMatrix, eps: f64) -> f64 {
    let g = |p: &[f64]| {
        let mu = p[0].exp();
        let ev = matcore::eigvalsh(&(&rho.scale_real(mu) - sigma)).unwrap();
        mu * (1.0 - eps) - ev.iter().filter(|v| **v > 0.0).sum::<f64>()
    };
    let (beta, _) = maximize_box(&g, &[-30.0], &[30.0], 2001, 1e-12);
    -beta.max(0.0).log2()
}

fn expect(v: &[Complex64], m: &ComplexMatrix) -> f64 {
    let mv = m.matvec(v);
    v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum()
}

/// `D_H^ε(ρ‖σ)` on a qubit by enumerating extreme tests of `{0 ⪯ P ⪯ I, Tr Pρ ≥ 1 − ε}`:
/// `P = I`, `λ|v⟩⟨v|` and `|v⊥⟩⟨v⊥| + λ|v⟩⟨v|` with `λ` fixed by the active constraint,
/// where `v` runs over eigenvectors of `σ − μρ` as the multiplier `μ = e^t` is swept.
pub fn htest_extreme_points(rho: &ComplexMatrix, sigma: &ComplexMatrix, eps: f64) -> f64 {
    let need = 1.0 - eps;
    let cost = |p: &[f64]| -> f64 {
        let e = matcore::eig_hermitian(&(sigma - &rho.scale_real(p[0].exp()))).unwrap();
        let (lo, hi) = (e.eigenvector(0), e.eigenvector(1));
        let mut best = f64::INFINITY;
        for (v, w) in [(&lo, &hi), (&hi, &lo)] {
            let (rv, sv) = (expect(v, rho), expect(v, sigma));
            let (rw, sw) = (expect(w, rho), expect(w, sigma));
            for (base_r, base_s) in [(0.0, 0.0), (rw, sw)] {
                let lam = ((need - base_r) / rv.max(1e-300)).max(0.0);
                if lam <= 1.0 {
                    best = best.min(base_s + lam * sv);
                }
            }
        }
        -best
    };
    let (v, _) = maximize_box(&cost, &[-30.0], &[30.0], 2001, 1e-12);
    -(-v).min(sigma.trace().re).log2()
}

/// `min_M D_H^ε((id⊗N)ψ ‖ (id⊗M)ψ)` over classical qubit channels `M`, with the
/// inner test evaluated by `htest` and the two row parameters searched directly.
pub fn ch_single_input_bruteforce(n: &QuantumChannel, psi: &ComplexMatrix, htest: &dyn Fn(&ComplexMatrix, &ComplexMatrix) -> f64) -> f64 {
    let rho = n.apply_to_last(psi).unwrap();
    let f = |p: &[f64]| {
        let m = QuantumChannel::classical(&[vec![p[0], 1.0 - p[0]], vec![p[1], 1.0 - p[1]]]).unwrap();
        let sigma = m.apply_to_last(psi).unwrap();
        -htest(&rho, &sigma)
    };
    -maximize_box(&f, &[0.0, 0.0], &[1.0, 1.0], 11, 1e-4).0
}

/// `LR(N)` of a qubit channel by searching the two row parameters of the classical
/// channel `M` and evaluating `D_max(N ‖ M)` in closed form.
pub fn lr_channel_qubit_bruteforce(n: &QuantumChannel) -> f64 {
    let f = |p: &[f64]| {
        let m = QuantumChannel::classical(&[vec![p[0], 1.0 - p[0]], vec![p[1], 1.0 - p[1]]]).unwrap();
        -dyncoh::measures::dmax_channel(n, &m).unwrap()
    };
    -maximize_box(&f, &[1e-9, 1e-9], &[1.0 - 1e-9, 1.0 - 1e-9], 21, 1e-10).0
}

pub fn rng(seed: u64) -> DetRng {
    random::seeded(seed)
}

pub fn random_qubit_state(rng: &mut DetRng) -> ComplexMatrix {
    random::random_state(rng, 2).matrix().clone()
}

/// Random MISC on qubit channels, cycling through the constructions used in the suites.
pub fn random_misc(rng: &mut DetRng, kind: usize) -> Superchannel {
    match kind % 3 {
        // Pre- and post-processing that commute with dephasing.
        0 => Superchannel::pre_post(random::random_dio_channel(rng, 2, 2), random::random_dio_channel(rng, 2, 2), 1).unwrap(),
        // Measure and prepare classical channels.
        1 => {
            let e = random_effect(rng, 4);
            Superchannel::measure_prepare(
                2,
                2,
                vec![
                    Branch { affine: 0.0, coeff: 1.0, effect: e.clone(), target: random::random_classical_channel(rng, 2, 2) },
                    Branch { affine: 1.0, coeff: -1.0, effect: e, target: random::random_classical_channel(rng, 2, 2) },
                ],
            )
            .unwrap()
        }
        _ => dyncoh::supermap::dephasing_super(2, 2),
    }
}

/// Random DISC on qubit channels: dephasing-covariant pre/post processing or full dephasing.
pub fn random_disc(rng: &mut DetRng, kind: usize) -> Superchannel {
    match kind % 2 {
        0 => Superchannel::pre_post(random::random_dio_channel(rng, 2, 2), random::random_dio_channel(rng, 2, 2), 1).unwrap(),
        _ => dyncoh::supermap::dephasing_super(2, 2),
    }
}

/// Random admissible superchannel with a qubit environment.
pub fn random_superchannel(rng: &mut DetRng) -> Superchannel {
    let pre = random::random_channel(rng, 2, 4, 2);
    let post = random::random_channel(rng, 4, 2, 2);
    Superchannel::pre_post(pre, post, 2).unwrap()
}

/// `0 ⪯ E ⪯ I` with a random spectrum and eigenbasis.
pub fn random_effect(rng: &mut DetRng, n: usize) -> ComplexMatrix {
    let u = random::haar_unitary(rng, n);
    let d: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    (&(&u * &ComplexMatrix::from_real_diagonal(&d)) * &u.adjoint()).hermitian_part()
}

/// `(1 − t) Θ_MISC + t K` with `K` the constant superchannel onto `R_2`: every classical
/// input lands within robustness `t · CR(R_2) = t` of a classical channel.
pub fn delta_misc(rng: &mut DetRng, delta: f64, kind: usize) -> Superchannel {
    let base = random_misc(rng, kind);
    let constant = Superchannel::measure_prepare(
        2,
        2,
        vec![Branch { affine: 1.0, coeff: 0.0, effect: ComplexMatrix::zeros(4, 4), target: QuantumChannel::replacement(2) }],
    )
    .unwrap();
    let mut m = base.linear_matrix().unwrap().scale_real(1.0 - delta);
    m += &constant.linear_matrix().unwrap().scale_real(delta);
    Superchannel::linear(SuperDims::new(2, 2, 2, 2), m).unwrap()
}
