use cyclic_rmt::spacing::ks_statistic;
use cyclic_rmt::{
    build_histogram, eigenvalues_dft, eta_apply, fourier_eigenvector, generalized_parity, inverse_coefficients,
    materialize_matrix, normalize_to_unit_mean, pseudo_symmetry_residual, FirstRow64, SpacingKind, SpacingSample,
};
use num_complex::Complex;
use proptest::prelude::*;

fn row_strategy(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    (2..=max_n).prop_flat_map(|n| prop::collection::vec(-10.0f64..10.0, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parity_is_an_involution(v in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..80)) {
        let v: Vec<Complex<f64>> = v.into_iter().map(|(re, im)| Complex::new(re, im)).collect();
        let eta = generalized_parity(v.len()).unwrap();
        let once = eta_apply(&v, &eta).unwrap();
        prop_assert_eq!(eta_apply(&once, &eta).unwrap(), v.clone());
        let norm = |x: &[Complex<f64>]| x.iter().map(|c| c.norm_sqr()).sum::<f64>();
        // same multiset of terms, summed in a different order
        prop_assert!((norm(&once) - norm(&v)).abs() <= 1e-12 * norm(&v).max(1.0));
    }

    #[test]
    fn cyclic_matrices_are_pseudo_symmetric(a in row_strategy(40)) {
        let row = FirstRow64::new(a).unwrap();
        let eta = generalized_parity(row.dimension()).unwrap();
        prop_assert_eq!(pseudo_symmetry_residual(&materialize_matrix(&row), &eta).unwrap(), 0.0);
    }

    #[test]
    fn dft_round_trip(a in row_strategy(64)) {
        let row = FirstRow64::new(a).unwrap();
        let back = inverse_coefficients(&eigenvalues_dft(&row)).unwrap();
        let scale = row.max_abs().max(f64::MIN_POSITIVE);
        for (x, y) in back.coefficients().iter().zip(row.coefficients()) {
            prop_assert!((x - y).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn eigen_equation(a in row_strategy(24)) {
        let row = FirstRow64::new(a).unwrap();
        let n = row.dimension();
        let m = materialize_matrix(&row);
        let spectrum = eigenvalues_dft(&row);
        prop_assert_eq!(spectrum.pairing_defect(), 0.0);
        for l in 0..n {
            let u = fourier_eigenvector::<f64>(n, l).unwrap();
            let mu = m.mul_complex_vec(&u).unwrap();
            for (x, y) in mu.iter().zip(&u) {
                prop_assert!((x - y * spectrum.eigenvalue(l)).norm() < 1e-10 * (1.0 + row.max_abs()));
            }
        }
    }

    #[test]
    fn leading_eigenvalue_is_the_ordered_sum(a in row_strategy(30)) {
        let row = FirstRow64::new(a.clone()).unwrap();
        let mut sum = 0.0;
        for x in &a {
            sum += x;
        }
        prop_assert_eq!(eigenvalues_dft(&row).eigenvalue(0).re, sum);
    }

    #[test]
    fn normalized_samples_have_unit_mean(values in prop::collection::vec(0.0f64..50.0, 1..500)) {
        prop_assume!(values.iter().any(|&v| v > 0.0));
        let s = normalize_to_unit_mean(SpacingKind::Rc, values).unwrap();
        let mean = s.values().iter().sum::<f64>() / s.len() as f64;
        prop_assert!((mean - 1.0).abs() < 1e-15 * s.len() as f64);
    }

    #[test]
    fn histogram_mass_is_one(values in prop::collection::vec(0.0f64..10.0, 1..400), bins in 1usize..80) {
        let h = build_histogram(&SpacingSample::raw(SpacingKind::Cc, values.clone()).unwrap(), bins).unwrap();
        let mass: f64 = h.density_values.iter().map(|d| d * h.bin_width()).sum();
        prop_assert!((mass - 1.0).abs() < 1e-12);
        prop_assert_eq!(h.total() as usize, values.len());
        prop_assert!(h.bin_edges.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn ks_statistic_bounds(values in prop::collection::vec(0.0f64..5.0, 1..300)) {
        let d = ks_statistic(&values, |x: f64| 1.0 - (-x).exp()).unwrap();
        prop_assert!(d >= 0.5 / values.len() as f64 - 1e-15);
        prop_assert!(d <= 1.0);
    }
}
