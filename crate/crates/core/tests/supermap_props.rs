mod common;

use common::*;
use dyncoh::conic::SolverSettings;
use dyncoh::matcore::{self, ComplexMatrix};
use dyncoh::qobj::{self, QuantumChannel};
use dyncoh::random;
use dyncoh::supermap::{self, Superchannel};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_channels_are_cptp(seed in any::<u64>(), din in 1usize..4, dout in 1usize..4, rank in 1usize..4) {
        prop_assume!(dout * rank >= din);
        let n = random::random_channel(&mut rng(seed), din, dout, rank);
        prop_assert!(matcore::min_eigenvalue(n.choi()).unwrap() > -1e-12);
        let marg = qobj::choi::input_marginal(n.choi(), din, dout);
        prop_assert!(marg.max_abs_diff(&ComplexMatrix::identity(din).scale_real(1.0 / din as f64)) < 1e-12);
        prop_assert!((n.choi().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_check_separates(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let c = random::random_classical_channel(&mut r, d, d);
        prop_assert!(qobj::classical_check(&c).pass);
        prop_assert!(qobj::dio_check(&c).pass && qobj::mio_check(&c).pass);
        let verdict = qobj::classical_check(&QuantumChannel::qft(d).unwrap());
        prop_assert!(!verdict.pass);
        prop_assert!(verdict.witness.is_some());
    }

    #[test]
    fn dio_channels_lie_in_mio(seed in any::<u64>(), d in 2usize..4) {
        let n = random::random_dio_channel(&mut rng(seed), d, d);
        prop_assert!(qobj::dio_check(&n).pass);
        prop_assert!(qobj::mio_check(&n).pass);
    }

    #[test]
    fn tensor_acts_factorwise(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random::random_channel(&mut r, 2, 3, 2);
        let b = random::random_channel(&mut r, 2, 2, 2);
        let (x, y) = (random::random_state(&mut r, 2), random::random_state(&mut r, 2));
        let joint = a.tensor(&b).apply_operator(&x.matrix().kron(y.matrix()));
        let split = a.apply_operator(x.matrix()).kron(&b.apply_operator(y.matrix()));
        prop_assert!(joint.max_abs_diff(&split) < 1e-12);
    }

    #[test]
    fn composition_matches_sequential_action(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inner = random::random_channel(&mut r, 2, 3, 2);
        let outer = random::random_channel(&mut r, 3, 2, 3);
        let x = random::random_state(&mut r, 2);
        let both = qobj::compose(&outer, &inner).unwrap().apply_operator(x.matrix());
        prop_assert!(both.max_abs_diff(&outer.apply_operator(&inner.apply_operator(x.matrix()))) < 1e-12);
    }

    #[test]
    fn pre_post_agrees_with_linear_form(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_superchannel(&mut r);
        let lin = t.to_linear().unwrap();
        let n = random::random_channel(&mut r, 2, 2, 2);
        let a = t.apply(&n).unwrap();
        let b = lin.apply(&n).unwrap();
        prop_assert!(a.choi().max_abs_diff(b.choi()) < 1e-12);
        prop_assert!(supermap::admissibility_check(&t).unwrap().pass);
        prop_assert!(supermap::admissibility_check(&lin).unwrap().pass);
    }

    #[test]
    fn constructed_misc_and_disc_are_certified(seed in any::<u64>(), kind in 0usize..6) {
        let mut r = rng(seed);
        let t = random_misc(&mut r, kind);
        prop_assert!(supermap::admissibility_check(&t).unwrap().pass);
        prop_assert!(supermap::misc_check(&t).unwrap().pass);
        let t = random_disc(&mut r, kind);
        prop_assert!(supermap::admissibility_check(&t).unwrap().pass);
        prop_assert!(supermap::disc_check(&t).unwrap().pass);
    }

    #[test]
    fn image_of_classical_under_misc_is_classical(seed in any::<u64>(), kind in 0usize..3) {
        let mut r = rng(seed);
        let t = random_misc(&mut r, kind);
        let c = random::random_classical_channel(&mut r, 2, 2);
        prop_assert!(qobj::classical_check(&t.apply(&c).unwrap()).pass);
    }

    #[test]
    fn random_superchannel_is_not_misc(seed in any::<u64>()) {
        // Generic pre/post processing creates coherence from classical inputs.
        let t = random_superchannel(&mut rng(seed));
        let v = supermap::misc_check(&t).unwrap();
        prop_assert!(!v.pass);
        prop_assert!(v.witness.is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn superchannels_contract_diamond(seed in any::<u64>()) {
        let s = SolverSettings::default();
        let mut r = rng(seed);
        let t = random_superchannel(&mut r);
        let n = random::random_channel(&mut r, 2, 2, 2);
        let m = random::random_channel(&mut r, 2, 2, 2);
        let before = dyncoh::measures::diamond_distance(&n, &m, &s).unwrap().value;
        let after = dyncoh::measures::diamond_distance(&t.apply(&n).unwrap(), &t.apply(&m).unwrap(), &s).unwrap().value;
        prop_assert!(after <= before + 1e-6, "{after} > {before}");
    }

    #[test]
    fn misc_is_delta_misc(seed in any::<u64>(), kind in 0usize..3) {
        let t = random_misc(&mut rng(seed), kind);
        prop_assert!(supermap::delta_misc_check(&t, 0.1, &SolverSettings::default()).unwrap().pass);
    }

    #[test]
    fn mixed_constant_is_delta_misc(seed in any::<u64>(), kind in 0usize..3) {
        let t = delta_misc(&mut rng(seed), 0.5, kind);
        prop_assert!(supermap::admissibility_check(&t).unwrap().pass);
        prop_assert!(supermap::delta_misc_check(&t, 0.5, &SolverSettings::default()).unwrap().pass);
    }
}

#[test]
fn constant_qft_superchannel_is_not_delta_misc() {
    let t = Superchannel::measure_prepare(
        2,
        2,
        vec![supermap::Branch { affine: 1.0, coeff: 0.0, effect: ComplexMatrix::zeros(4, 4), target: QuantumChannel::qft(2).unwrap() }],
    )
    .unwrap();
    // CR(F_2) = 3 exceeds any δ below it.
    assert!(!supermap::delta_misc_check(&t, 0.5, &SolverSettings::default()).unwrap().pass);
    assert!(supermap::delta_misc_check(&t, 3.01, &SolverSettings::default()).unwrap().pass);
}

#[test]
fn dephasing_superchannel_is_disc_and_misc() {
    let t = supermap::dephasing_super(3, 3);
    assert!(supermap::admissibility_check(&t).unwrap().pass);
    assert!(supermap::misc_check(&t).unwrap().pass);
    assert!(supermap::disc_check(&t).unwrap().pass);
    let out = t.apply(&QuantumChannel::qft(3).unwrap()).unwrap();
    assert!(qobj::classical_check(&out).pass);
}
