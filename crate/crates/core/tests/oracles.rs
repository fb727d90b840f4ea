//! Solver-backed measures against the brute-force references in `common`.

mod common;

use common::*;
use dyncoh::conic::SolverSettings;
use dyncoh::matcore::{c64, ComplexMatrix};
use dyncoh::measures;
use dyncoh::qobj::{QuantumChannel, QuantumState};
use dyncoh::random;

fn amplitude_damping(g: f64) -> QuantumChannel {
    let k0 = ComplexMatrix::from_rows(&[vec![c64(1.0, 0.0), c64(0.0, 0.0)], vec![c64(0.0, 0.0), c64((1.0 - g).sqrt(), 0.0)]]).unwrap();
    let k1 = ComplexMatrix::from_rows(&[vec![c64(0.0, 0.0), c64(g.sqrt(), 0.0)], vec![c64(0.0, 0.0), c64(0.0, 0.0)]]).unwrap();
    QuantumChannel::from_kraus(2, 2, &[k0, k1]).unwrap()
}

#[test]
fn diamond_matches_input_search() {
    let s = SolverSettings::default();
    // Seed 7001 has a local maximum that a single-start search gets stuck in.
    for seed in [0, 1, 2, 7001u64] {
        let mut r = rng(seed);
        let n = random::random_channel(&mut r, 2, 2, 2);
        let m = random::random_channel(&mut r, 2, 2, 2);
        let sdp = measures::diamond_distance(&n, &m, &s).unwrap().value;
        let brute = diamond_bruteforce(&n, &m);
        assert!((sdp - brute).abs() < 1e-5, "seed {seed}: sdp {sdp} brute {brute}");
    }
}

#[test]
fn diamond_identity_vs_amplitude_damping_is_frozen() {
    // Frozen from `diamond_bruteforce`; the optimum is the `|1⟩` input.
    let n = amplitude_damping(0.3);
    let brute = diamond_bruteforce(&QuantumChannel::identity(2), &n);
    let sdp = measures::diamond_distance(&QuantumChannel::identity(2), &n, &SolverSettings::default()).unwrap().value;
    assert!((brute - FROZEN_DIAMOND_AD03).abs() < 1e-6, "brute {brute}");
    assert!((sdp - FROZEN_DIAMOND_AD03).abs() < 1e-5, "sdp {sdp}");
}

const FROZEN_DIAMOND_AD03: f64 = 0.3;

#[test]
fn lr_state_matches_qubit_closed_form() {
    let s = SolverSettings::default();
    for seed in 0..8u64 {
        let mut r = rng(seed);
        let rho = random_qubit_state(&mut r);
        let sdp = measures::lr_state(&rho, &s).unwrap().value;
        assert!((sdp - lr_state_qubit(&rho)).abs() < 1e-6, "seed {seed}");
    }
}

#[test]
fn htest_matches_extreme_tests() {
    let s = SolverSettings::default();
    for seed in 0..4u64 {
        let mut r = rng(100 + seed);
        let rho = random_qubit_state(&mut r);
        let sigma = random_qubit_state(&mut r);
        for eps in [0.05, 0.2] {
            let sdp = measures::htest_state(&QuantumState::new(rho.clone()).unwrap(), &sigma, eps, &s).unwrap().value;
            let dual = htest_dual_search(&rho, &sigma, eps);
            let extreme = htest_extreme_points(&rho, &sigma, eps);
            assert!((dual - extreme).abs() < 1e-7, "seed {seed} eps {eps}: dual {dual} extreme {extreme}");
            assert!((sdp - extreme).abs() < 1e-6, "seed {seed} eps {eps}: sdp {sdp} extreme {extreme}");
        }
    }
}

#[test]
fn lr_channel_matches_classical_search() {
    let s = SolverSettings::default();
    let mut cases = vec![amplitude_damping(0.3), QuantumChannel::identity(2), QuantumChannel::qft(2).unwrap()];
    for seed in 0..3u64 {
        cases.push(random::random_channel(&mut rng(200 + seed), 2, 2, 2));
    }
    for (k, n) in cases.iter().enumerate() {
        let sdp = measures::lr_channel(n, &s).unwrap().value;
        let brute = lr_channel_qubit_bruteforce(n);
        assert!((sdp - brute).abs() < 1e-5, "case {k}: sdp {sdp} brute {brute}");
    }
}

#[test]
fn lr_amplitude_damping_is_frozen() {
    // Frozen from `lr_channel_qubit_bruteforce`.
    let n = amplitude_damping(0.3);
    let brute = lr_channel_qubit_bruteforce(&n);
    assert!((brute - FROZEN_LR_AD03).abs() < 1e-7, "brute {brute:.12}");
    let sdp = measures::lr_channel(&n, &SolverSettings::default()).unwrap().value;
    assert!((sdp - FROZEN_LR_AD03).abs() < 1e-6, "sdp {sdp}");
}

const FROZEN_LR_AD03: f64 = 0.877084603111;

#[test]
fn ch_single_input_matches_classical_search() {
    let s = SolverSettings::default();
    let eps = 0.1;
    let inputs = vec![QuantumState::maximally_entangled(2)];
    for n in [amplitude_damping(0.3), QuantumChannel::qft(2).unwrap(), random::random_channel(&mut rng(300), 2, 2, 2)] {
        let sdp = measures::ch_coherence_lb(&n, eps, &inputs, &s).unwrap().value;
        let inner = |rho: &ComplexMatrix, sigma: &ComplexMatrix| {
            measures::htest_state(&QuantumState::new(rho.clone()).unwrap(), sigma, eps, &s).unwrap().value
        };
        let brute = ch_single_input_bruteforce(&n, inputs[0].matrix(), &inner);
        assert!((sdp - brute).abs() < 1e-4, "sdp {sdp} brute {brute}");
    }
}

#[test]
fn htest_pure_state_at_zero_eps() {
    let s = SolverSettings::default();
    for seed in 0..4u64 {
        let mut r = rng(400 + seed);
        let ket = random::random_pure_ket(&mut r, 2);
        let sigma = random_qubit_state(&mut r);
        let overlap: f64 = ket.iter().zip(sigma.matvec(&ket)).map(|(a, b)| (a.conj() * b).re).sum();
        let v = measures::htest_state(&QuantumState::pure(&ket).unwrap(), &sigma, 0.0, &s).unwrap().value;
        assert!((v + overlap.log2()).abs() < 1e-9);
    }
}
