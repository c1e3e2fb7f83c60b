mod common;

use common::dbar::{curve, factor};
use proptest::prelude::*;
use tensor_hodge::dbar::{neumann_compactness, product_box_spectrum, riemann_surface_product_report, DbarFactorModel, SpaceDim};
use tensor_hodge::spectra::{Rule, Verdict};

/// The product as a factor model, bidegree by bidegree.
fn fold(x: &DbarFactorModel, y: &DbarFactorModel) -> DbarFactorModel {
    let n = x.complex_dimension() + y.complex_dimension();
    let mut m = DbarFactorModel::unknown("product", n).unwrap().with_closed_range(true);
    for p in 0..=n {
        for q in 0..=n {
            m = m.with_box_spectrum(p, q, product_box_spectrum(x, y, p, q).unwrap()).unwrap();
        }
    }
    m.validated().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn product_is_symmetric(x in factor(), y in factor()) {
        let n = x.complex_dimension() + y.complex_dimension();
        for p in 0..=n {
            for q in 0..=n {
                prop_assert_eq!(product_box_spectrum(&x, &y, p, q).unwrap(), product_box_spectrum(&y, &x, p, q).unwrap());
            }
        }
    }

    #[test]
    fn pairwise_verdict_matches_essential_spectrum(x in factor(), y in factor()) {
        let n = x.complex_dimension() + y.complex_dimension();
        for p in 0..=n {
            for q in 0..=n {
                let r = neumann_compactness(&x, &y, p, q).unwrap();
                let ess = product_box_spectrum(&x, &y, p, q).unwrap().essential().clone();
                prop_assert_eq!(r.verdict == Verdict::Compact, ess.is_empty());
                prop_assert_eq!(r.verdict == Verdict::NonCompact, !r.witnesses.is_empty());
                if r.rule == Rule::InfiniteBergmanSpace {
                    prop_assert!(x.has_infinite_bergman_space() || y.has_infinite_bergman_space());
                }
            }
        }
    }

    #[test]
    fn two_curves_agree_with_the_pairwise_formula(x in curve(0.0), y in curve(0.0)) {
        let r = riemann_surface_product_report(&[x.clone(), y.clone()], 0).unwrap();
        for d in &r.degrees {
            let pair = product_box_spectrum(&x, &y, 0, d.q).unwrap();
            prop_assert_eq!(d.essential.as_ref(), Some(pair.essential()));
        }
    }

    #[test]
    fn three_curves_agree_with_iterated_products(a in curve(0.0), b in curve(0.0), c in curve(0.0)) {
        let r = riemann_surface_product_report(&[a.clone(), b.clone(), c.clone()], 0).unwrap();
        let ab = fold(&a, &b);
        for d in &r.degrees {
            let iterated = product_box_spectrum(&ab, &c, 0, d.q).unwrap();
            prop_assert_eq!(d.essential.as_ref(), Some(iterated.essential()));
        }
    }

    #[test]
    fn curve_product_implications(fs in (2usize..=4).prop_flat_map(|n| prop::collection::vec(curve(0.15), n))) {
        let n = fs.len();
        let r = riemann_surface_product_report(&fs, 0).unwrap();
        let v: Vec<Verdict> = r.degrees.iter().map(|d| d.verdict).collect();
        let nc = |q: usize| v[q] == Verdict::NonCompact;
        let c = |q: usize| v[q] == Verdict::Compact;
        for q in 1..n {
            // a middle degree is compact exactly when both ends are
            prop_assert_eq!(c(q), c(0) && c(n));
            if nc(q) {
                prop_assert!((1..n).all(nc));
            }
        }
        if nc(0) {
            prop_assert!((0..n).all(nc));
        }
        if nc(n) {
            prop_assert!((1..=n).all(nc));
        }
        let solution_noncompact = fs.iter().any(|f| {
            (0..=1).any(|k| f.box_spectrum(0, k).is_some_and(|s| !s.essential().within_zero()))
        });
        if solution_noncompact {
            prop_assert!((0..=n).all(nc));
        }
        if fs.iter().any(|f| f.has_infinite_bergman_space()) {
            prop_assert!((0..n).all(nc));
        }
        if fs.iter().all(|f| f.box_spectrum(0, 0).is_some() && f.box_spectrum(0, 1).is_some()) {
            prop_assert!(v.iter().all(|&x| x != Verdict::Undecidable));
        }
    }

    #[test]
    fn declared_bergman_dimension_is_checked(x in curve(0.0)) {
        let kernel_infinite = x.box_spectrum(0, 0).unwrap().essential().contains(&Default::default());
        let declared = x.clone().with_bergman_dim(SpaceDim::Infinite).validated();
        prop_assert_eq!(declared.is_ok(), kernel_infinite);
    }

    #[test]
    fn models_round_trip_through_json(x in factor()) {
        let back: DbarFactorModel = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }
}
