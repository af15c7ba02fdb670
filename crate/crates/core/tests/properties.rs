use proptest::prelude::*;

use sbd_core::eig::dense_spectrum;
use sbd_core::hammat::{random_hermitian, SparseHermitian};
use sbd_core::linalg::diag;
use sbd_core::sbd::{
    applications_needed, compress, compress_dense, compression_ratio, top_eigenvalue, CompressOptions, SbdConfig,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn depth_from_ratio_is_minimal(c in 0.0f64..99.9999) {
        let k = applications_needed(c).unwrap();
        prop_assert!(compression_ratio(k).unwrap() >= c);
        if k > 1 {
            prop_assert!(compression_ratio(k - 1).unwrap() < c);
        }
    }

    #[test]
    fn each_level_halves_the_block(q in 2usize..7, seed in 0u64..1000) {
        let m = random_hermitian(1 << q, seed);
        let sp = SparseHermitian::from_dense(&m).unwrap();
        for depth in 1..q {
            let c = compress(&sp, &CompressOptions::new(depth), &SbdConfig::default()).unwrap();
            prop_assert_eq!(c.block.nrows(), (1 << q) >> depth);
            prop_assert_eq!(c.steps.len(), depth);
        }
    }

    #[test]
    fn negative_diagonal_ground_is_recovered(
        values in prop::collection::vec(-20.0f64..10.0, 16),
        shift in 1.0f64..5.0,
    ) {
        let mut values = values;
        let lowest = values.iter().copied().fold(f64::INFINITY, f64::min);
        if lowest > -shift {
            values[3] = -shift;
        }
        let ground = values.iter().copied().fold(f64::INFINITY, f64::min);
        let c = compress_dense(&diag(&values), &CompressOptions::new(1), &SbdConfig::default()).unwrap();
        let got = c.recover(top_eigenvalue(&c.block, 0).unwrap()).unwrap();
        prop_assert!((got - ground).abs() < 1e-6 * ground.abs().max(1.0), "{} vs {}", got, ground);
    }

    #[test]
    fn spectrum_of_random_hermitian_is_real_and_sorted(dim in 1usize..24, seed in 0u64..500) {
        let ev = dense_spectrum(&random_hermitian(dim, seed)).unwrap();
        prop_assert_eq!(ev.len(), dim);
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }
}
