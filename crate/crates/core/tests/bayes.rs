use lindley::bayes::{bayes_factor_truncated, log_bayes_factor_upper_bound, BOUND_TOLERANCE};
use lindley::frequentist::p_value;
use lindley::model::{ExperimentSummary, TruncatedScalePrior};
use proptest::prelude::*;

fn support() -> impl Strategy<Value = TruncatedScalePrior> {
    (-5i32..5)
        .prop_flat_map(|i| (Just(i), i + 1..=5))
        .prop_map(|(i, j)| TruncatedScalePrior::new(10f64.powi(i), 10f64.powi(j)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn never_exceeds_the_bound(t in -5.0f64..5.0, ln_n in 0.0f64..27.7, sigma in 0.1f64..10.0, prior in support()) {
        let s = ExperimentSummary::new(t, ln_n.exp(), sigma).unwrap();
        let r = bayes_factor_truncated(&s, &prior).unwrap();
        prop_assert!(r.b10() <= log_bayes_factor_upper_bound(t).exp() * (1.0 + BOUND_TOLERANCE));
    }

    #[test]
    fn symmetric_in_t(t in 0.0f64..5.0, ln_n in 0.0f64..27.7, prior in support()) {
        let n = ln_n.exp();
        let plus = bayes_factor_truncated(&ExperimentSummary::new(t, n, 1.0).unwrap(), &prior).unwrap();
        let minus = bayes_factor_truncated(&ExperimentSummary::new(-t, n, 1.0).unwrap(), &prior).unwrap();
        prop_assert_eq!(plus.log_b10, minus.log_b10);
    }

    #[test]
    fn fixed_p_value_loses_evidence_as_n_grows(t in 1.5f64..4.0, prior in support()) {
        let p = p_value(t).unwrap();
        let at = |n: f64| bayes_factor_truncated(&ExperimentSummary::new(t, n, 1.0).unwrap(), &prior).unwrap().log_b10;
        let (small, large) = (at(1.0), at(1e12));
        prop_assert_eq!(p_value(t).unwrap(), p);
        prop_assert!(large < small);
    }
}
