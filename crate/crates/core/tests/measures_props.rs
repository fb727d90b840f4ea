mod common;

use common::*;
use dyncoh::conic::SolverSettings;
use dyncoh::matcore;
use dyncoh::measures;
use dyncoh::qobj::{QuantumChannel, QuantumState};
use dyncoh::random;
use proptest::prelude::*;

fn s() -> SolverSettings {
    SolverSettings::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dmax_data_processing_under_superchannels(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_superchannel(&mut r);
        let n = random::random_full_rank_channel(&mut r, 2, 2);
        let m = random::random_full_rank_channel(&mut r, 2, 2);
        let before = measures::dmax_channel(&n, &m).unwrap();
        let after = measures::dmax_channel(&t.apply(&n).unwrap(), &t.apply(&m).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-7, "{after} > {before}");
    }

    #[test]
    fn lr_monotone_under_misc(seed in any::<u64>(), kind in 0usize..3) {
        let mut r = rng(seed);
        let t = random_misc(&mut r, kind);
        let n = random::random_channel(&mut r, 2, 2, 2);
        let before = measures::lr_channel(&n, &s()).unwrap().value;
        let after = measures::lr_channel(&t.apply(&n).unwrap(), &s()).unwrap().value;
        prop_assert!(after <= before + 1e-6, "{after} > {before}");
    }

    #[test]
    fn lr_dephasing_monotone_under_disc(seed in any::<u64>(), kind in 0usize..2) {
        let mut r = rng(seed);
        let t = random_disc(&mut r, kind);
        let n = random::random_channel(&mut r, 2, 2, 2);
        let before = measures::lr_dephasing(&n).unwrap().value;
        let after = measures::lr_dephasing(&t.apply(&n).unwrap()).unwrap().value;
        prop_assert!(after <= before + 1e-7, "{after} > {before}");
    }

    #[test]
    fn htest_data_processing(seed in any::<u64>(), eps in 0.01f64..0.4) {
        let mut r = rng(seed);
        let rho = random::random_state(&mut r, 2);
        let sigma = random::random_state(&mut r, 2);
        let e = random::random_channel(&mut r, 2, 3, 2);
        let before = measures::htest_state(&rho, sigma.matrix(), eps, &s()).unwrap().value;
        let after = measures::htest_state(&e.apply(&rho).unwrap(), &e.apply_operator(sigma.matrix()), eps, &s()).unwrap().value;
        prop_assert!(after <= before + 1e-6, "{after} > {before}");
    }

    #[test]
    fn delta_misc_growth_bound(seed in any::<u64>(), kind in 0usize..3, wide in any::<bool>()) {
        let delta = if wide { 0.5 } else { 0.1 };
        let mut r = rng(seed);
        let t = delta_misc(&mut r, delta, kind);
        let n = random::random_channel(&mut r, 2, 2, 2);
        let before = measures::lr_channel(&n, &s()).unwrap().value;
        let after = measures::lr_channel(&t.apply(&n).unwrap(), &s()).unwrap().value;
        prop_assert!(after <= before + (1.0 + delta).log2() + 1e-6, "{after} > {before} + log(1+{delta})");
    }

    #[test]
    fn fuchs_van_de_graaf(seed in any::<u64>(), d in 2usize..5) {
        let mut r = rng(seed);
        let a = random::random_state(&mut r, d);
        let b = random::random_state(&mut r, d);
        let f = matcore::fidelity(a.matrix(), b.matrix()).unwrap();
        let t = 0.5 * matcore::trace_norm(&(a.matrix() - b.matrix())).unwrap();
        prop_assert!(1.0 - f.sqrt() <= t + 1e-12);
        prop_assert!(t <= (1.0 - f).max(0.0).sqrt() + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn lr_additive_on_qubit_pairs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = random::random_channel(&mut r, 2, 2, 2);
        let m = random::random_channel(&mut r, 2, 2, 2);
        let joint = measures::lr_channel(&n.tensor(&m), &s()).unwrap().value;
        let sum = measures::lr_channel(&n, &s()).unwrap().value + measures::lr_channel(&m, &s()).unwrap().value;
        prop_assert!((joint - sum).abs() < 1e-5, "{joint} vs {sum}");
    }

    #[test]
    fn ch_lower_bound_monotone_in_eps(seed in any::<u64>()) {
        let n = random::random_channel(&mut rng(seed), 2, 2, 2);
        let inputs = measures::default_inputs(2, 2, seed);
        let mut last = 0.0;
        for eps in [0.0, 0.05, 0.1] {
            let v = measures::ch_coherence_lb(&n, eps, &inputs, &s()).unwrap().value;
            prop_assert!(v >= last - 1e-6 && v >= -1e-9, "eps {eps}: {v} < {last}");
            last = v;
        }
    }
}

#[test]
fn dmax_is_infinite_off_support() {
    let rho = QuantumState::basis(2, 1);
    let sigma = QuantumState::basis(2, 0);
    assert!(measures::dmax_state(rho.matrix(), sigma.matrix()).unwrap().is_infinite());
}

#[test]
fn golden_unit_is_maximal_for_both_robustnesses() {
    for d in 2..=3 {
        let f = QuantumChannel::qft(d).unwrap();
        let expect = 2.0 * (d as f64).log2();
        assert!((measures::lr_channel(&f, &s()).unwrap().value - expect).abs() < 1e-5);
        assert!((measures::lr_dephasing(&f).unwrap().value - expect).abs() < 1e-9);
    }
}

#[test]
fn classical_channels_carry_no_robustness() {
    let c = random::random_classical_channel(&mut rng(9), 3, 3);
    assert!(measures::lr_channel(&c, &s()).unwrap().value.abs() < 1e-6);
    assert!(measures::lr_dephasing(&c).unwrap().value.abs() < 1e-9);
}
