use dyncoh::matcore::{self, c64, ComplexMatrix};
use dyncoh::random;
use proptest::prelude::*;

fn random_hermitian(seed: u64, n: usize) -> ComplexMatrix {
    let mut rng = random::seeded(seed);
    random::ginibre(&mut rng, n, n).hermitian_part()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), n in 1usize..14) {
        let m = random_hermitian(seed, n);
        let e = matcore::eig_hermitian(&m).unwrap();
        let back = e.map(|v| v);
        prop_assert!(back.max_abs_diff(&m) < 1e-11 * (n as f64));
        let vtv = &e.vectors.adjoint() * &e.vectors;
        prop_assert!(vtv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12 * (n as f64));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let vals = matcore::eigvalsh(&m).unwrap();
        for (a, b) in vals.iter().zip(&e.values) {
            prop_assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn degenerate_spectra_are_handled(seed in any::<u64>(), n in 2usize..10) {
        // Projector with repeated eigenvalues, rotated by a random unitary.
        let mut rng = random::seeded(seed);
        let u = random::haar_unitary(&mut rng, n);
        let diag: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let m = &(&u * &ComplexMatrix::from_real_diagonal(&diag)) * &u.adjoint();
        let vals = matcore::eigvalsh(&m.hermitian_part()).unwrap();
        let mut want = diag.clone();
        want.sort_by(f64::total_cmp);
        for (a, b) in vals.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn kron_mixed_product(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        let a = random::ginibre(&mut rng, 2, 3);
        let b = random::ginibre(&mut rng, 3, 2);
        let c = random::ginibre(&mut rng, 3, 2);
        let d = random::ginibre(&mut rng, 2, 2);
        let lhs = &a.kron(&b) * &c.kron(&d);
        let rhs = (&a * &c).kron(&(&b * &d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn partial_traces_compose(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        let m = random::random_state(&mut rng, 12).matrix().clone();
        let dims = [2, 3, 2];
        let direct = m.partial_trace(&dims, &[1]).unwrap();
        let step = m.partial_trace(&dims, &[0, 1]).unwrap().partial_trace(&[2, 3], &[1]).unwrap();
        prop_assert!(direct.max_abs_diff(&step) < 1e-14);
        prop_assert!((direct.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_is_sum_of_singular_values(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = random::seeded(seed);
        let m = random::ginibre(&mut rng, n, n);
        let tn = matcore::trace_norm(&m).unwrap();
        // Tr|M| = max over unitaries |Tr(U M)| >= |Tr M|, and ≥ Frobenius norm.
        prop_assert!(tn + 1e-12 >= m.trace().norm());
        prop_assert!(tn + 1e-12 >= m.frobenius_norm());
        prop_assert!(tn <= m.frobenius_norm() * (n as f64).sqrt() + 1e-12);
    }

    #[test]
    fn fuchs_van_de_graaf(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = random::seeded(seed);
        let rho = random::random_state(&mut rng, n);
        let sigma = random::random_state(&mut rng, n);
        let f = matcore::fidelity(rho.matrix(), sigma.matrix()).unwrap();
        let t = 0.5 * matcore::trace_norm(&(rho.matrix() - sigma.matrix())).unwrap();
        prop_assert!(1.0 - f.sqrt() <= t + 1e-10);
        prop_assert!(t <= (1.0 - f).sqrt() + 1e-10);
        let sym = matcore::fidelity(sigma.matrix(), rho.matrix()).unwrap();
        prop_assert!((f - sym).abs() < 1e-9);
    }
}

#[test]
fn tiny_and_empty_matrices() {
    let one = ComplexMatrix::from_real_diagonal(&[2.5]);
    assert_eq!(matcore::eigvalsh(&one).unwrap(), vec![2.5]);
    let empty = ComplexMatrix::zeros(0, 0);
    assert!(matcore::eigvalsh(&empty).unwrap().is_empty());
    let z = ComplexMatrix::from_rows(&[vec![c64(0., 0.), c64(0., 0.)], vec![c64(0., 0.), c64(0., 0.)]]).unwrap();
    assert!(matcore::psd_check(&z, 0.0).unwrap());
}
