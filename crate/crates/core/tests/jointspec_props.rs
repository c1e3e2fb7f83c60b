mod common;

use common::normal::{commuting_pair, normal, psd};
use common::sorted_close;
use num_complex::Complex64;
use proptest::prelude::*;
use tensor_hodge::jointspec::{
    check_pair, joint_spectrum, pair_match_gap, spectral_mapping, sum_operator_check, tensor_pair_spectrum,
};
use tensor_hodge::numerics::Tolerance;

const GAP: f64 = 1e-7;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn joint_spectrum_of_commuting_pairs((t, s, expected) in commuting_pair(6)) {
        let tol = Tolerance::default();
        let j = joint_spectrum(&check_pair(&t, &s, &tol).unwrap(), &tol).unwrap();
        prop_assert_eq!(j.total_multiplicity(), t.rows());
        prop_assert!(pair_match_gap(&j.expanded(), &expected) <= GAP);
        // the basis is unitary
        let g = &j.basis.adjoint() * &j.basis;
        prop_assert!(g.max_diff(&tensor_hodge::numerics::ComplexMatrix::identity(t.rows())) < 1e-9);
    }

    #[test]
    fn tensor_pair_is_the_cartesian_product((t, lt) in normal(5), (s, ls) in normal(5)) {
        let j = tensor_pair_spectrum(&t, &s, &Tolerance::default()).unwrap();
        let expected: Vec<_> = lt.iter().flat_map(|&a| ls.iter().map(move |&b| (a, b))).collect();
        prop_assert!(pair_match_gap(&j.expanded(), &expected) <= GAP);
    }

    #[test]
    fn sum_of_positive_operators((t, lt) in psd(6), (s, ls) in psd(6)) {
        let tol = Tolerance::default();
        let r = sum_operator_check(&t, &s, &tol).unwrap();
        prop_assert!(r.pass, "gap {} symbolic {}", r.max_gap, r.symbolic_gap);
        let sums: Vec<f64> = lt.iter().flat_map(|a| ls.iter().map(move |b| a + b)).collect();
        prop_assert!(sorted_close(&r.assembled, &sums, GAP));
        // the mapped joint spectrum is the spectrum of the assembled sum
        let j = tensor_pair_spectrum(&t, &s, &tol).unwrap();
        let mapped: Vec<f64> = spectral_mapping(&j, |a, b| a + b)
            .into_iter()
            .flat_map(|(z, m)| std::iter::repeat_n(z.re, m))
            .collect();
        prop_assert!(sorted_close(&mapped, &r.assembled, GAP));
    }

    #[test]
    fn functional_relation((t, l) in psd(6)) {
        let tol = Tolerance::default();
        let t2 = &t * &t;
        let j = joint_spectrum(&check_pair(&t, &t2, &tol).unwrap(), &tol).unwrap();
        let expected: Vec<_> = l.iter().map(|&x| (Complex64::new(x, 0.0), Complex64::new(x * x, 0.0))).collect();
        prop_assert!(pair_match_gap(&j.expanded(), &expected) <= GAP);
    }
}
