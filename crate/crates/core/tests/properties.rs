use std::collections::BTreeSet;

use proptest::prelude::*;

use esamp::empirical::{
    classify_countable, classify_real, classify_real_avg, empirical_cdf, empirical_measure,
    frequency_count, EmpiricalMeasure, HorizonSchedule, SetSpec, Status,
};
use esamp::kernel::laws::run_law_suite;
use esamp::rational::{int, ratio, Rational};
use esamp::rng;
use esamp::sequence::{iid_truncation, resample_index_average, resample_truncated};
use esamp::{CylinderState, FinitePermutation, SequencePrefix};

fn pmf(weights: Vec<u32>) -> Vec<Rational> {
    let total: u32 = weights.iter().sum();
    weights.iter().map(|&w| ratio(w as i64, total as i64)).collect()
}

fn weights(max_len: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..5, 2..=max_len).prop_filter("some mass", |w| w.iter().any(|&x| x > 0))
}

fn permutation(n: usize) -> impl Strategy<Value = FinitePermutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| FinitePermutation::new(v).unwrap())
}

/// A state on words of length `n` over `{0,1}` with arbitrary weights,
/// usually not exchangeable.
fn state(n: usize) -> impl Strategy<Value = CylinderState> {
    prop::collection::vec(0u32..4, 1usize << n)
        .prop_filter("some mass", |w| w.iter().any(|&x| x > 0))
        .prop_map(move |w| {
            let p = pmf(w);
            let words = (0..1usize << n).map(|code| (0..n).map(|i| (code >> i) & 1).collect());
            CylinderState::new(2, n, words.zip(p)).unwrap()
        })
}

/// Naturals of a few shapes: IID small values, slow drift, blocks.
fn naturals() -> impl Strategy<Value = Vec<u64>> {
    let iid = prop::collection::vec(1u64..6, 200..600);
    let drift = (200usize..600, 1u64..40).prop_map(|(n, k)| (0..n as u64).map(|i| i / k + 1).collect());
    let blocks = (200usize..600, 2usize..60, 1u64..4)
        .prop_map(|(n, b, a)| (0..n).map(|i| if (i / b) % 2 == 0 { a } else { a + 1 }).collect());
    prop_oneof![iid, drift, blocks]
}

fn reals() -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec(-2.0f64..2.0, 100..400),
        prop::collection::vec(prop_oneof![Just(0.0), Just(1.0), Just(-0.5)], 100..400),
        (100usize..400).prop_map(|n| (1..=n).map(|i| (i as f64).sqrt()).collect()),
    ]
}

fn schedule(n: usize) -> HorizonSchedule {
    HorizonSchedule::default_for(n).unwrap().with_epsilon(0.1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_laws_on_random_instances(seed in any::<u64>()) {
        for check in run_law_suite(&mut rng::stream(seed, 0), 20) {
            prop_assert!(check.passed(), "{}: {:?}", check.law, check.first_failure);
        }
    }

    #[test]
    fn cone_condition(w in weights(4), n in 1usize..5, k in 1usize..5) {
        let k = k.min(n);
        let p = pmf(w);
        prop_assert_eq!(iid_truncation(&p, n).unwrap().marginal(k).unwrap(), iid_truncation(&p, k).unwrap());
    }

    #[test]
    fn permutations_act_contravariantly(
        (s, sigma, tau) in (1usize..5).prop_flat_map(|n| (state(n), permutation(n), permutation(n)))
    ) {
        let twice = s.permute(&tau).unwrap().permute(&sigma).unwrap();
        prop_assert_eq!(twice, s.permute(&tau.after(&sigma)).unwrap());
        prop_assert_eq!(s.permute(&sigma).unwrap().permute(&sigma.inverse()).unwrap(), s);
    }

    #[test]
    fn resampling_is_exchangeable_and_close_to_the_index_average(
        (letters, m) in prop::collection::vec(0usize..3, 1..14)
            .prop_flat_map(|v| { let n = v.len(); (Just(v), 1..=n.min(4)) })
    ) {
        let n = letters.len();
        let x = SequencePrefix::finite(3, letters).unwrap();
        let once = resample_truncated(&x, m, n).unwrap();
        prop_assert!(once.is_exchangeable());
        let tv = once.total_variation(&resample_index_average(&x, m, n).unwrap());
        prop_assert!(tv <= ratio((m * (m - 1)) as i64, n as i64));
        prop_assert!(tv <= ratio((m * (m - 1)) as i64, 2 * n as i64));
        if m == 1 {
            prop_assert_eq!(tv, int(0));
        }
    }

    #[test]
    fn verdicts_ignore_permutations_of_the_head(
        (values, sigma) in naturals().prop_flat_map(|v| {
            let k = schedule(v.len()).reference();
            (Just(v), permutation(k))
        })
    ) {
        let h = schedule(values.len());
        let x = SequencePrefix::natural(values).unwrap();
        let y = x.permute_head(&sigma).unwrap();
        let grid = [0.5, 1.0, 2.5];
        let a = classify_countable(&x, &h).unwrap();
        prop_assert_eq!(&a, &classify_countable(&y, &h).unwrap());
        prop_assert_eq!(classify_real(&x, &h, &grid).unwrap(), classify_real(&y, &h, &grid).unwrap());
        prop_assert_eq!(classify_real_avg(&x, &h, &grid).unwrap(), classify_real_avg(&y, &h, &grid).unwrap());
        if a.status == Status::InDomain {
            prop_assert_eq!(empirical_measure(&x, &a).unwrap(), empirical_measure(&y, &a).unwrap());
        }
        prop_assert_eq!(empirical_cdf(&x, h.last()).unwrap(), empirical_cdf(&y, h.last()).unwrap());
    }

    #[test]
    fn empirical_cdfs_are_valid(values in reals(), cut in 0.0f64..1.0) {
        let n = ((values.len() as f64 * cut) as usize).max(1);
        let x = SequencePrefix::real(values.clone()).unwrap();
        let m = empirical_cdf(&x, n).unwrap();
        let EmpiricalMeasure::Real { points, cdf, .. } = &m else { panic!("real measure") };
        prop_assert!(points.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(cdf.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(cdf.iter().all(|&c| c > 0.0 && c <= 1.0));
        prop_assert_eq!(*cdf.last().unwrap(), 1.0);
        prop_assert_eq!(m.cdf(points[0] - 1.0), 0.0);
        prop_assert_eq!(m.cdf(f64::INFINITY), 1.0);
    }

    #[test]
    fn singleton_counts_add_up(values in naturals(), set in prop::collection::btree_set(1u64..12, 0..6)) {
        let n = values.len();
        let x = SequencePrefix::natural(values).unwrap();
        let whole = frequency_count(&x, &SetSpec::Naturals { members: set.clone(), cofinite: false }, n).unwrap();
        let parts: usize = set
            .iter()
            .map(|&v| frequency_count(&x, &SetSpec::Naturals { members: BTreeSet::from([v]), cofinite: false }, n).unwrap())
            .sum();
        prop_assert_eq!(whole, parts);
        let rest = frequency_count(&x, &SetSpec::Naturals { members: set, cofinite: true }, n).unwrap();
        prop_assert_eq!(whole + rest, n);
    }

    #[test]
    fn average_domain_lies_inside_real_domain(values in reals()) {
        let x = SequencePrefix::real(values).unwrap();
        let h = schedule(x.len());
        let grid = [-1.0, 0.0, 1.0];
        if classify_real_avg(&x, &h, &grid).unwrap().status == Status::InDomain {
            prop_assert_eq!(classify_real(&x, &h, &grid).unwrap().status, Status::InDomain);
        }
    }

    #[test]
    fn countable_criteria_and_real_embedding(values in naturals()) {
        let x = SequencePrefix::natural(values).unwrap();
        let h = schedule(x.len());
        let v = classify_countable(&x, &h).unwrap();
        let premise = v.criterion("singleton frequencies settle").unwrap().outcome;
        if premise != esamp::empirical::Outcome::Fail && v.status != Status::Inconclusive {
            prop_assert_eq!(v.criteria_agree, Some(true));
        }
        if v.criteria_agree == Some(false) && premise != esamp::empirical::Outcome::Fail {
            prop_assert_eq!(v.status, Status::Inconclusive);
        }
        let r = classify_real(&x, &h, &[1.0]).unwrap();
        let clash = matches!(
            (v.status, r.status),
            (Status::InDomain, Status::OutOfDomain) | (Status::OutOfDomain, Status::InDomain)
        );
        prop_assert!(!clash, "countable {} vs real {}", v.status, r.status);
    }
}
