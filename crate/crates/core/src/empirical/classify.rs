//! The four domain classifiers.
//!
//! Every quantity is computed from counts or from sorted prefixes, so
//! permuting terms that all checkpoints include leaves verdicts
//! bit-identical.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    Criterion, Domain, EmpiricalError, EmpiricalVerdict, HorizonSchedule, Outcome, Status,
    Witness,
};
use crate::prefix::SequencePrefix;

pub const LETTER_FREQUENCIES: &str = "letter frequencies settle";
pub const SINGLETONS: &str = "singleton frequencies settle";
pub const TIGHTNESS: &str = "tightness";
pub const UNIFORM: &str = "uniform limits";
pub const NORMALIZATION: &str = "normalization";
pub const CDF_UNIFORM: &str = "CDFs settle uniformly";
pub const ABS_SETTLE: &str = "absolute averages settle";
pub const ABS_MATCH: &str = "absolute average matches truncated moment";
pub const SIGNED_SETTLE: &str = "signed averages settle";
pub const SIGNED_MATCH: &str = "signed average matches truncated mean";

/// Extra rational evaluation points. Between sample points the empirical
/// CDFs are constant, so these only add reporting resolution.
pub fn default_grid() -> Vec<f64> {
    vec![-1.0, -0.5, 0.0, 0.5, 1.0]
}

fn wrong_kind(op: &'static str, expected: &'static str, x: &SequencePrefix) -> EmpiricalError {
    EmpiricalError::WrongKind {
        op,
        expected,
        found: x.kind().as_str(),
    }
}

fn verdict(
    domain: Domain,
    status: Status,
    x: &SequencePrefix,
    h: &HorizonSchedule,
    criteria: Vec<Criterion>,
) -> EmpiricalVerdict {
    EmpiricalVerdict {
        domain,
        status,
        length: x.len(),
        schedule: h.clone(),
        criteria,
        criteria_agree: None,
        tail_threshold: None,
        mean: None,
        notes: Vec::new(),
    }
}

fn status_of(outcome: Outcome) -> Status {
    match outcome {
        Outcome::Pass => Status::InDomain,
        Outcome::Fail => Status::OutOfDomain,
        Outcome::Undecided => Status::Inconclusive,
    }
}

/// Largest spread `max − min` of `values[k]` over the compared
/// checkpoints, with the two checkpoints attaining it.
fn spread(compared: &[usize], values: &[f64]) -> (f64, Witness) {
    let (mut lo, mut hi) = (0, 0);
    for k in 0..values.len() {
        if values[k] < values[lo] {
            lo = k;
        }
        if values[k] > values[hi] {
            hi = k;
        }
    }
    let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
    (
        values[hi] - values[lo],
        Witness {
            horizons: (compared[a], compared[b]),
            point: None,
            values: (values[a], values[b]),
        },
    )
}

/// Finite alphabet: every letter frequency must settle.
pub fn classify_finite(
    x: &SequencePrefix,
    h: &HorizonSchedule,
) -> Result<EmpiricalVerdict, EmpiricalError> {
    let (alphabet, values) = x
        .letters()
        .ok_or_else(|| wrong_kind("classify_finite", "finite", x))?;
    h.check_length(values.len())?;
    let compared = h.compared();
    let counts = counts_at(values, compared, |&v| v);
    let mut worst: Option<(f64, Witness)> = None;
    for letter in 0..alphabet {
        let freqs: Vec<f64> = compared
            .iter()
            .zip(&counts)
            .map(|(&n, c)| *c.get(&letter).unwrap_or(&0) as f64 / n as f64)
            .collect();
        let (d, mut w) = spread(compared, &freqs);
        w.point = Some(letter as f64);
        if worst.as_ref().is_none_or(|(best, _)| d > *best) {
            worst = Some((d, w));
        }
    }
    let (d, w) = worst.expect("alphabet is non-empty");
    let c = Criterion::new(LETTER_FREQUENCIES, d, h.epsilon(), Some(w));
    Ok(verdict(Domain::Finite, status_of(c.outcome), x, h, vec![c]))
}

/// Counts of each value among the first `n` terms, for each `n` in
/// `horizons` (increasing).
fn counts_at<T, K: Ord + Copy>(
    values: &[T],
    horizons: &[usize],
    key: impl Fn(&T) -> K,
) -> Vec<BTreeMap<K, u64>> {
    let mut out = Vec::with_capacity(horizons.len());
    let mut running: BTreeMap<K, u64> = BTreeMap::new();
    let mut done = 0;
    for &n in horizons {
        for v in &values[done..n] {
            *running.entry(key(v)).or_insert(0) += 1;
        }
        done = n;
        out.push(running.clone());
    }
    out
}

/// Sample values: naturals are compared as integers, reported as reals.
pub(crate) trait Point: Copy + PartialOrd {
    fn as_f64(self) -> f64;
}

impl Point for u64 {
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Point for f64 {
    fn as_f64(self) -> f64 {
        self
    }
}

fn sorted_prefix<T: Copy + PartialOrd>(values: &[T], n: usize) -> Vec<T> {
    let mut v = values[..n].to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("values are comparable"));
    v
}

/// `sup_t |F_a(t) − F_b(t)|` for two sorted samples, and a point where
/// it is attained. Both functions only jump at sample points, so the
/// supremum over ℝ is a maximum over the merged sample.
pub(crate) fn sup_gap<T: Point>(a: &[T], b: &[T]) -> (f64, Option<f64>) {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best = (0.0, None);
    while i < a.len() || j < b.len() {
        let t = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => {
                if x <= y {
                    x
                } else {
                    y
                }
            }
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        let gap = (i as f64 / na - j as f64 / nb).abs();
        if gap > best.0 {
            best = (gap, Some(t.as_f64()));
        }
    }
    best
}

fn cdf_sorted<T: Copy + PartialOrd>(sorted: &[T], t: T) -> f64 {
    sorted.partition_point(|&v| v <= t) as f64 / sorted.len() as f64
}

/// Largest CDF gap over all pairs of compared checkpoints.
fn pairwise_sup<T: Point>(
    sorted: &[Vec<T>],
    compared: &[usize],
    grid: &[T],
) -> (f64, Option<Witness>) {
    let mut best: (f64, Option<Witness>) = (0.0, None);
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            let (mut gap, mut at) = sup_gap(&sorted[i], &sorted[j]);
            for &g in grid {
                let d = (cdf_sorted(&sorted[i], g) - cdf_sorted(&sorted[j], g)).abs();
                if d > gap {
                    (gap, at) = (d, Some(g.as_f64()));
                }
            }
            if gap > best.0 || best.1.is_none() {
                let values = match at {
                    Some(t) => (
                        cdf_sorted_f64(&sorted[i], t),
                        cdf_sorted_f64(&sorted[j], t),
                    ),
                    None => (0.0, 0.0),
                };
                best = (
                    gap,
                    Some(Witness {
                        horizons: (compared[i], compared[j]),
                        point: at,
                        values,
                    }),
                );
            }
        }
    }
    best
}

fn cdf_sorted_f64<T: Point>(sorted: &[T], t: f64) -> f64 {
    sorted.partition_point(|&v| v.as_f64() <= t) as f64 / sorted.len() as f64
}

/// Smallest `t ≥ 1` with `|{x ≥ t}| < (ε/2)·n` in a sorted sample.
pub(crate) fn tail_threshold(sorted: &[u64], epsilon: f64) -> u64 {
    let n = sorted.len();
    let allowed = ((epsilon * n as f64 / 2.0).ceil() as usize).saturating_sub(1);
    if allowed >= n {
        return 1;
    }
    sorted[n - 1 - allowed] + 1
}

fn tail_fraction(sorted: &[u64], t: u64) -> f64 {
    (sorted.len() - sorted.partition_point(|&v| v < t)) as f64 / sorted.len() as f64
}

/// Values in ℕ. Reports tightness, uniform limits and normalization
/// separately, after checking that singleton frequencies settle.
///
/// In-domain needs all four to pass. Out-of-domain needs a certified
/// failure of the singleton check, or of all three criteria at once. Any
/// other combination, including the three criteria disagreeing, is
/// inconclusive.
pub fn classify_countable(
    x: &SequencePrefix,
    h: &HorizonSchedule,
) -> Result<EmpiricalVerdict, EmpiricalError> {
    let values = x
        .naturals()
        .ok_or_else(|| wrong_kind("classify_countable", "natural", x))?;
    h.check_length(values.len())?;
    let eps = h.epsilon();
    let compared = h.compared();
    let reference = sorted_prefix(values, h.reference());
    let sorted: Vec<Vec<u64>> = compared.iter().map(|&n| sorted_prefix(values, n)).collect();

    // Singleton frequencies.
    let counts = counts_at(values, compared, |&v| v);
    let support: BTreeSet<u64> = counts.last().expect("non-empty").keys().copied().collect();
    let mut singletons: Option<(f64, Witness)> = None;
    for &v in &support {
        let freqs: Vec<f64> = compared
            .iter()
            .zip(&counts)
            .map(|(&n, c)| *c.get(&v).unwrap_or(&0) as f64 / n as f64)
            .collect();
        let (d, mut w) = spread(compared, &freqs);
        w.point = Some(v as f64);
        if singletons.as_ref().is_none_or(|(best, _)| d > *best) {
            singletons = Some((d, w));
        }
    }
    let (d, w) = singletons.expect("support is non-empty");
    let premise = Criterion::new(SINGLETONS, d, eps, Some(w));

    // Tightness: the tail above a threshold chosen at the reference
    // horizon must stay small.
    let t_hat = tail_threshold(&reference, eps);
    let tail_ref = tail_fraction(&reference, t_hat);
    let (tail, at) = sorted
        .iter()
        .zip(compared)
        .map(|(s, &n)| (tail_fraction(s, t_hat), n))
        .fold((f64::MIN, 0), |acc, cur| if cur.0 > acc.0 { cur } else { acc });
    let tight = Criterion::new(
        TIGHTNESS,
        tail,
        eps,
        Some(Witness {
            horizons: (h.reference(), at),
            point: Some(t_hat as f64),
            values: (tail_ref, tail),
        }),
    );

    // Uniform limits of F_n(t) = |{x_i ≤ t}|/n over t ∈ ℕ.
    let (gap, w) = pairwise_sup::<u64>(&sorted, compared, &[]);
    let uniform = Criterion::new(UNIFORM, gap, eps, w);

    // Normalization: mass already carried by the reference support.
    let seen: BTreeSet<u64> = reference.iter().copied().collect();
    let (deficit, at) = compared
        .iter()
        .zip(&counts)
        .map(|(&n, c)| {
            let inside: u64 = seen.iter().map(|v| c.get(v).copied().unwrap_or(0)).sum();
            (1.0 - inside as f64 / n as f64, n)
        })
        .fold((f64::MIN, 0), |acc, cur| if cur.0 > acc.0 { cur } else { acc });
    let normalization = Criterion::new(
        NORMALIZATION,
        deficit,
        eps,
        Some(Witness {
            horizons: (h.reference(), at),
            point: None,
            values: (0.0, deficit),
        }),
    );

    let three = [tight.outcome, uniform.outcome, normalization.outcome];
    let agree = three.iter().all(|&o| o == three[0]);
    let status = if premise.outcome == Outcome::Fail {
        Status::OutOfDomain
    } else if premise.outcome == Outcome::Pass && three.iter().all(|&o| o == Outcome::Pass) {
        Status::InDomain
    } else if three.iter().all(|&o| o == Outcome::Fail) {
        Status::OutOfDomain
    } else {
        Status::Inconclusive
    };
    let mut v = verdict(
        Domain::Countable,
        status,
        x,
        h,
        vec![premise, tight, uniform, normalization],
    );
    v.criteria_agree = Some(agree);
    v.tail_threshold = Some(t_hat);
    Ok(v)
}

/// Values in ℝ (letters and naturals are embedded). In-domain when the
/// empirical CDFs at the compared checkpoints are uniformly within `ε`.
pub fn classify_real(
    x: &SequencePrefix,
    h: &HorizonSchedule,
    grid: &[f64],
) -> Result<EmpiricalVerdict, EmpiricalError> {
    if grid.is_empty() {
        return Err(EmpiricalError::EmptyGrid);
    }
    let values = x.to_reals();
    h.check_length(values.len())?;
    let compared = h.compared();
    let sorted: Vec<Vec<f64>> = compared.iter().map(|&n| sorted_prefix(&values, n)).collect();
    let (gap, w) = pairwise_sup(&sorted, compared, grid);
    let c = Criterion::new(CDF_UNIFORM, gap, h.epsilon(), w);
    Ok(verdict(Domain::Real, status_of(c.outcome), x, h, vec![c]))
}

/// [`classify_real`] plus convergence of running averages.
///
/// The averages of `|x_i|` must settle and agree with the first absolute
/// moment of the empirical measure, truncated at the largest `|x_i|` seen
/// by the reference horizon. When they do, signed averages are checked the
/// same way against the truncated mean. Averages are compared with the
/// tolerance `ε·max(1, |mean|)`.
pub fn classify_real_avg(
    x: &SequencePrefix,
    h: &HorizonSchedule,
    grid: &[f64],
) -> Result<EmpiricalVerdict, EmpiricalError> {
    let base = classify_real(x, h, grid)?;
    let values = x.to_reals();
    let compared = h.compared();
    let reference = sorted_prefix(&values, h.reference());
    let cap = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    // Sums run over each prefix in sorted order.
    let sorted: Vec<Vec<f64>> = compared.iter().map(|&n| sorted_prefix(&values, n)).collect();
    let abs_avg: Vec<f64> = sorted
        .iter()
        .map(|s| s.iter().map(|v| v.abs()).sum::<f64>() / s.len() as f64)
        .collect();
    let signed_avg: Vec<f64> = sorted
        .iter()
        .map(|s| s.iter().sum::<f64>() / s.len() as f64)
        .collect();
    let last = sorted.last().expect("two compared checkpoints");
    let truncated_abs = last.iter().map(|v| v.abs().min(cap)).sum::<f64>() / last.len() as f64;
    let truncated_mean = last.iter().map(|v| v.clamp(-cap, cap)).sum::<f64>() / last.len() as f64;
    let n_last = *compared.last().expect("non-empty");
    let mean = *signed_avg.last().expect("non-empty");
    let tol = h.epsilon() * mean.abs().max(1.0);

    let mut criteria = base.criteria.clone();
    let (d, w) = spread(compared, &abs_avg);
    let abs_settle = Criterion::new(ABS_SETTLE, d, tol, Some(w));
    let abs_last = *abs_avg.last().expect("non-empty");
    let abs_match = Criterion::new(
        ABS_MATCH,
        (abs_last - truncated_abs).abs(),
        tol,
        Some(Witness {
            horizons: (n_last, n_last),
            point: Some(cap),
            values: (abs_last, truncated_abs),
        }),
    );
    let abs_ok = abs_settle.outcome == Outcome::Pass && abs_match.outcome == Outcome::Pass;
    criteria.push(abs_settle);
    criteria.push(abs_match);
    let mut notes = Vec::new();
    if abs_ok {
        let (d, w) = spread(compared, &signed_avg);
        criteria.push(Criterion::new(SIGNED_SETTLE, d, tol, Some(w)));
        criteria.push(Criterion::new(
            SIGNED_MATCH,
            (mean - truncated_mean).abs(),
            tol,
            Some(Witness {
                horizons: (n_last, n_last),
                point: Some(cap),
                values: (mean, truncated_mean),
            }),
        ));
    } else {
        notes.push("signed averages not checked: absolute averages did not settle".to_string());
    }

    let own = &criteria[base.criteria.len()..];
    let status = if base.status == Status::OutOfDomain
        || own.iter().any(|c| c.outcome == Outcome::Fail)
    {
        Status::OutOfDomain
    } else if base.status == Status::InDomain
        && abs_ok
        && own.iter().all(|c| c.outcome == Outcome::Pass)
    {
        Status::InDomain
    } else {
        Status::Inconclusive
    };
    let mut v = verdict(Domain::RealAverage, status, x, h, criteria);
    v.mean = Some(mean);
    v.notes = notes;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Dist, NamedSequence};
    use crate::rng;

    fn schedule(n: usize, eps: f64) -> HorizonSchedule {
        HorizonSchedule::default_for(n)
            .unwrap()
            .with_epsilon(eps)
            .unwrap()
    }

    #[test]
    fn sup_gap_by_hand() {
        // F_a jumps 1/2 at 1 and 2; F_b jumps 1/3 at 1, 2, 3.
        let (g, at) = sup_gap(&[1.0, 2.0], &[1.0, 2.0, 3.0]);
        assert!((g - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(at, Some(2.0));
        assert_eq!(sup_gap(&[0.5], &[0.5, 0.5]).0, 0.0);
    }

    #[test]
    fn tail_thresholds() {
        // 10 values, ε = 0.2: fewer than 1 may lie in the tail.
        let s: Vec<u64> = (1..=10).collect();
        assert_eq!(tail_threshold(&s, 0.2), 11);
        // ε = 0.5: fewer than 2.5, so 2 may lie in the tail.
        assert_eq!(tail_threshold(&s, 0.5), 9);
        assert_eq!(tail_threshold(&[1, 1, 1], 0.1), 2);
    }

    #[test]
    fn constant_and_alternating_letters() {
        let c = SequencePrefix::finite(3, vec![2; 1000]).unwrap();
        let h = schedule(1000, 0.05);
        assert_eq!(classify_finite(&c, &h).unwrap().status, Status::InDomain);
        let alt = NamedSequence::Alternating.prefix(1000).unwrap();
        assert_eq!(classify_finite(&alt, &h).unwrap().status, Status::InDomain);
    }

    #[test]
    fn log2_letters_oscillate() {
        let x = NamedSequence::Log2Oscillating.prefix(100_000).unwrap();
        let v = classify_finite(&x, &schedule(100_000, 0.01)).unwrap();
        assert_eq!(v.status, Status::OutOfDomain);
        let w = v.criteria[0].witness.as_ref().unwrap();
        assert!((w.values.0 - w.values.1).abs() > 0.02);
    }

    #[test]
    fn naturals_fail_all_three() {
        let x = NamedSequence::Naturals.prefix(100_000).unwrap();
        let v = classify_countable(&x, &schedule(100_000, 0.01)).unwrap();
        assert_eq!(v.status, Status::OutOfDomain);
        for name in [TIGHTNESS, UNIFORM, NORMALIZATION] {
            assert_eq!(v.criterion(name).unwrap().outcome, Outcome::Fail, "{name}");
        }
        assert_eq!(v.criteria_agree, Some(true));
    }

    #[test]
    fn escaping_sequence_is_countable_but_not_averageable() {
        let x = NamedSequence::Escaping.prefix(100_000).unwrap();
        let h = schedule(100_000, 0.01);
        let v = classify_countable(&x, &h).unwrap();
        assert_eq!(v.status, Status::InDomain);
        assert_eq!(v.tail_threshold, Some(2));
        let avg = classify_real_avg(&x, &h, &default_grid()).unwrap();
        assert_eq!(classify_real(&x, &h, &default_grid()).unwrap().status, Status::InDomain);
        assert_eq!(avg.status, Status::OutOfDomain);
        assert_eq!(avg.criterion(ABS_MATCH).unwrap().outcome, Outcome::Fail);
    }

    #[test]
    fn harmonic_sequences() {
        let h = schedule(100_000, 0.01);
        let pos = NamedSequence::Harmonic.prefix(100_000).unwrap();
        let v = classify_real(&pos, &h, &default_grid()).unwrap();
        assert_eq!(v.status, Status::OutOfDomain);
        // F_n(−1/n) = 1 for every n, so the negative harmonic sequence
        // is not uniformly Cauchy either.
        let neg = NamedSequence::NegHarmonic.prefix(100_000).unwrap();
        let v = classify_real(&neg, &h, &default_grid()).unwrap();
        assert!(v.criteria[0].discrepancy > 0.5);
    }

    #[test]
    fn iid_samples_are_in_domain() {
        let mut r = rng::stream(7, 0);
        let h = HorizonSchedule::default_for(100_000).unwrap();
        let u = Dist::Uniform01.prefix(&mut r, 100_000);
        assert_eq!(classify_real(&u, &h, &default_grid()).unwrap().status, Status::InDomain);
        let g = Dist::Geometric(0.5).prefix(&mut r, 100_000);
        assert_eq!(classify_countable(&g, &h).unwrap().status, Status::InDomain);
        let coin = Dist::Bernoulli(0.5).prefix(&mut r, 100_000);
        let h2 = h.clone().with_epsilon(0.02).unwrap();
        assert_eq!(classify_finite(&coin, &h2).unwrap().status, Status::InDomain);
        let e = Dist::Exponential(1.0).prefix(&mut r, 100_000);
        let v = classify_real_avg(&e, &h, &default_grid()).unwrap();
        assert_eq!(v.status, Status::InDomain, "{v:?}");
        assert!((v.mean.unwrap() - 1.0).abs() < 0.02);
    }

    #[test]
    fn constant_real_average() {
        let x = SequencePrefix::real(vec![2.5; 800]).unwrap();
        let v = classify_real_avg(&x, &HorizonSchedule::default_for(800).unwrap(), &[0.0]).unwrap();
        assert_eq!(v.status, Status::InDomain);
        assert_eq!(v.mean, Some(2.5));
    }

    #[test]
    fn kind_and_grid_errors() {
        let x = SequencePrefix::real(vec![1.0; 10]).unwrap();
        let h = HorizonSchedule::default_for(10).unwrap();
        assert!(classify_finite(&x, &h).is_err());
        assert!(classify_countable(&x, &h).is_err());
        assert_eq!(classify_real(&x, &h, &[]), Err(EmpiricalError::EmptyGrid));
        let short = HorizonSchedule::new(vec![5, 20], 0.1).unwrap();
        assert!(matches!(
            classify_real(&x, &short, &[0.0]),
            Err(EmpiricalError::Horizon { .. })
        ));
    }
}
