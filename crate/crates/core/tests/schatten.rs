use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semilab_core::linalg;
use semilab_core::schatten::{random, raw_norm, schatten, singular_values, trace_norm, SchattenReport};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unitary_invariance_and_triangle(seed in any::<u64>(), n in 2usize..10, p in 1.0f64..6.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::gaussian_matrix(&mut rng, n);
        let b = random::gaussian_matrix(&mut rng, n);
        let u = random::unitary(&mut rng, n);
        let na = raw_norm(&singular_values(&a).unwrap(), p);
        let rotated = linalg::matmul(&linalg::matmul(&u, &a), &linalg::adjoint(&u));
        prop_assert!((raw_norm(&singular_values(&rotated).unwrap(), p) - na).abs() <= 1e-10 * na);
        let nb = raw_norm(&singular_values(&b).unwrap(), p);
        let nab = raw_norm(&singular_values(&(&a + &b)).unwrap(), p);
        prop_assert!(nab <= na + nb + 1e-10);
    }

    #[test]
    fn norms_decrease_in_p(seed in any::<u64>(), n in 2usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sv = singular_values(&random::hermitian(&mut rng, n)).unwrap();
        let ps = [1.0, 1.5, 2.0, 4.0, f64::INFINITY];
        for w in ps.windows(2) {
            prop_assert!(raw_norm(&sv, w[1]) <= raw_norm(&sv, w[0]) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn density_matrix_has_unit_trace_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [4, 8, 16] {
        let rho = random::density_matrix(&mut rng, n);
        assert!((trace_norm(&rho).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn report_roundtrips_through_json() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random::psd(&mut rng, 6);
    let r = schatten(&a, 0.1, &[1.0, 2.0, f64::INFINITY]).unwrap();
    let back = SchattenReport::from_json(&r.to_json()).unwrap();
    assert!(back.singular_values.is_empty());
    assert_eq!(SchattenReport { singular_values: Vec::new(), ..r }, back);
}
