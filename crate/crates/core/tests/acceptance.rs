//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and
//! asserts it. Run with `--nocapture` to see the lines.

use std::time::{Duration, Instant};

use esamp::empirical::{
    classify_countable, classify_finite, classify_real, classify_real_avg, default_grid,
    empirical_measure, EmpiricalMeasure, HorizonSchedule, Outcome, Status,
};
use esamp::kernel::laws::run_law_suite;
use esamp::rational::{int, ratio};
use esamp::rng;
use esamp::verify::{
    default_moment_configs, sixth_moment_oracle, sixth_moment_suite, verify_concentration,
    verify_ecdf_concentration, verify_empirical_adequacy, verify_glivenko_cantelli,
    verify_maximal_ergodic, verify_permutation_invariance, verify_resampling_idempotence,
    verify_slln, FiniteLaw, SequenceModel, TrialPlan, VerificationReport,
};
use esamp::{Dist, MixtureModel, NamedSequence};

fn report(id: u32, title: &str, ok: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let within = elapsed <= limit;
    let verdict = if ok && within { "PASS" } else { "FAIL" };
    println!(
        "{verdict} criterion {id}: {title} ({:.2}s, limit {}s){}{detail}",
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if detail.is_empty() { "" } else { ": " }
    );
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(within, "criterion {id} exceeded {}s", limit.as_secs());
}

fn failures(r: &VerificationReport) -> String {
    r.failures()
        .map(|c| format!("[{} {}: {:.4e} vs {:.4e}]", r.check, c.name, c.estimate, c.bound))
        .collect::<Vec<_>>()
        .join(" ")
}

#[test]
fn criterion_1_exact_kernel_laws() {
    let start = Instant::now();
    let mut rng = rng::stream(0, 0);
    let checks = run_law_suite(&mut rng, 1000);
    let bad: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| format!("{} ({}/{}): {:?}", c.law, c.failures, c.instances, c.first_failure))
        .collect();
    let ok = bad.is_empty() && checks.iter().all(|c| c.instances >= 1000);
    report(
        1,
        &format!("{} kernel laws × 1000 exact instances", checks.len()),
        ok,
        start.elapsed(),
        Duration::from_secs(10),
        &bad.join("; "),
    );
}

#[test]
fn criterion_2_cumulant_oracle() {
    let start = Instant::now();
    let configs = default_moment_configs();
    let fair = FiniteLaw::bernoulli(ratio(1, 2)).unwrap();
    let (brute, formula) = sixth_moment_oracle(&fair, 1, 2).unwrap();
    let anchor = brute == ratio(1, 2) && formula == ratio(1, 2);
    let suite = sixth_moment_suite(&configs).unwrap();
    let ok = anchor && suite.pass && configs.len() >= 20;
    report(
        2,
        &format!("sixth-moment oracle exact over {} configurations", configs.len()),
        ok,
        start.elapsed(),
        Duration::from_secs(30),
        &format!("{}{}", if anchor { "" } else { "Bernoulli(1/2) n=1 m=2 ≠ 1/2 " }, failures(&suite)),
    );
}

#[test]
fn criterion_3_named_sequences() {
    let start = Instant::now();
    let n = 100_000;
    let h = HorizonSchedule::default_for(n).unwrap().with_epsilon(0.01).unwrap();
    let grid = default_grid();
    let mut sub = Vec::new();

    let log2 = classify_finite(&NamedSequence::Log2Oscillating.prefix(n).unwrap(), &h).unwrap();
    sub.push(("oscillating log₂ letters out-of-domain", log2.status == Status::OutOfDomain));

    let nat = classify_countable(&NamedSequence::Naturals.prefix(n).unwrap(), &h).unwrap();
    let all_fail = ["tightness", "uniform limits", "normalization"]
        .iter()
        .all(|name| nat.criterion(name).map(|c| c.outcome) == Some(Outcome::Fail));
    sub.push(("(1,2,3,…) out-of-domain, all three criteria fail", nat.status == Status::OutOfDomain && all_fail));

    let harm = classify_real(&NamedSequence::Harmonic.prefix(n).unwrap(), &h, &grid).unwrap();
    sub.push(("(1,1/2,1/3,…) out-of-domain", harm.status == Status::OutOfDomain));

    let neg_x = NamedSequence::NegHarmonic.prefix(n).unwrap();
    let neg = classify_real(&neg_x, &h, &grid).unwrap();
    let delta0 = neg.status == Status::InDomain
        && match empirical_measure(&neg_x, &neg) {
            Ok(m) => (m.cdf(0.0) - 1.0).abs() < 0.01 && m.cdf(-0.01) < 0.01,
            Err(_) => false,
        };
    sub.push(("(−1,−1/2,−1/3,…) in-domain with δ₀", delta0));

    let esc_x = NamedSequence::Escaping.prefix(n).unwrap();
    let esc = classify_countable(&esc_x, &h).unwrap();
    let delta1 = esc.status == Status::InDomain
        && match empirical_measure(&esc_x, &esc) {
            Ok(EmpiricalMeasure::Countable { pmf, .. }) => pmf
                .iter()
                .any(|&(v, p)| v == 1 && (p - 1.0).abs() < 0.01),
            _ => false,
        };
    let esc_avg = classify_real_avg(&esc_x, &h, &grid).unwrap();
    sub.push((
        "power-of-2 sequence in countable domain with δ₁, out of average domain",
        delta1 && esc_avg.status == Status::OutOfDomain,
    ));

    for (name, ok) in &sub {
        println!("  {} {name}", if *ok { "ok  " } else { "FAIL" });
    }
    let failed: Vec<&str> = sub.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    report(
        3,
        "named sequences at N = 10⁵, ε = 0.01",
        failed.is_empty(),
        start.elapsed(),
        Duration::from_secs(5),
        &failed.join("; "),
    );
}

#[test]
fn criterion_4_glivenko_cantelli() {
    let start = Instant::now();
    let plan = TrialPlan::new(100, 42, 100_000)
        .with_epsilons(vec![0.01])
        .with_horizons(vec![1_000, 10_000, 100_000]);
    let uniform = verify_glivenko_cantelli(&Dist::Uniform01, &plan).unwrap();
    let cauchy = verify_glivenko_cantelli(&Dist::Cauchy { x0: 0.0, gamma: 1.0 }, &plan).unwrap();
    report(
        4,
        "GC for uniform[0,1] and Cauchy, N = 10⁵, 100 trials, tol 0.01",
        uniform.pass && cauchy.pass,
        start.elapsed(),
        Duration::from_secs(120),
        &format!("{}{}", failures(&uniform), failures(&cauchy)),
    );
}

#[test]
fn criterion_5_strong_law() {
    let start = Instant::now();
    let plan = TrialPlan::new(100, 5, 1_000_000).with_epsilons(vec![0.01]);
    let exp = verify_slln(&Dist::Exponential(1.0), &plan).unwrap();
    let cauchy = verify_slln(&Dist::Cauchy { x0: 0.0, gamma: 1.0 }, &plan).unwrap();
    report(
        5,
        "SLLN for exponential(1) at N = 10⁶ and the Cauchy counter-test",
        exp.pass && cauchy.pass,
        start.elapsed(),
        Duration::from_secs(300),
        &format!(
            "exponential {:.2} within tol, Cauchy {:.2} not in-domain {}{}",
            exp.cases[0].estimate,
            cauchy.cases[0].estimate,
            failures(&exp),
            failures(&cauchy)
        ),
    );
}

#[test]
fn criterion_6_empirical_adequacy() {
    let start = Instant::now();
    let point_masses = MixtureModel::new(
        2,
        vec![ratio(1, 2), ratio(1, 2)],
        vec![vec![int(1), int(0)], vec![int(0), int(1)]],
    )
    .unwrap();
    let exact = verify_empirical_adequacy(&point_masses, &TrialPlan::new(100, 6, 100).with_m(2)).unwrap();
    let exact_ok = exact.cases.iter().any(|c| c.name.contains("exact"))
        && exact
            .cases
            .iter()
            .filter(|c| c.name.contains("exact"))
            .all(|c| c.pass && c.estimate == 0.0);
    let iid = MixtureModel::iid(vec![ratio(2, 3), ratio(1, 3)]).unwrap();
    let mc = verify_empirical_adequacy(&iid, &TrialPlan::new(1000, 6, 10_000).with_m(3)).unwrap();
    report(
        6,
        "point-mass mixture exact; Bernoulli(1/3), m = 1..3, N = 10⁴, 10³ trials within 4 stderr",
        exact_ok && mc.pass,
        start.elapsed(),
        Duration::from_secs(180),
        &format!("{}{}", failures(&exact), failures(&mc)),
    );
}

#[test]
fn criterion_7_maximal_ergodic() {
    let start = Instant::now();
    let plan = TrialPlan::new(10_000, 7, 10_000);
    let r = verify_maximal_ergodic(&Dist::Exponential(1.0), 2.0, &plan).unwrap();
    let c = &r.cases[0];
    report(
        7,
        "exponential(1), r = 2, N_max = 10⁴, 10⁴ trials",
        r.pass && c.bound == 0.5,
        start.elapsed(),
        Duration::from_secs(120),
        &format!("estimate {:.4} ± {:.4} vs 0.5", c.estimate, c.stderr),
    );
}

#[test]
fn criterion_8_concentration_envelopes() {
    let start = Instant::now();
    let coin = Dist::Bernoulli(0.5);
    let runs = [
        verify_concentration(
            &coin,
            &TrialPlan::new(1000, 8, 80).with_epsilons(vec![0.2]).with_horizons(vec![10, 20, 40]),
        ),
        verify_concentration(
            &Dist::Uniform01,
            &TrialPlan::new(1000, 8, 200).with_epsilons(vec![0.1]).with_horizons(vec![25, 50, 100]),
        ),
        verify_ecdf_concentration(
            &coin,
            &TrialPlan::new(1000, 8, 2000).with_epsilons(vec![0.1]).with_horizons(vec![100, 1000]),
        ),
        verify_ecdf_concentration(
            &Dist::Uniform01,
            &TrialPlan::new(1000, 8, 2000).with_epsilons(vec![0.1]).with_horizons(vec![100, 1000]),
        ),
    ]
    .map(Result::unwrap);
    report(
        8,
        "concentration and ECDF envelopes with C = 261/64 on Bernoulli(1/2) and uniform[0,1]",
        runs.iter().all(|r| r.pass),
        start.elapsed(),
        Duration::from_secs(300),
        &runs.iter().map(failures).collect::<String>(),
    );
}

#[test]
fn criterion_9_invariance_and_idempotence() {
    let start = Instant::now();
    let coin = SequenceModel::Law(Dist::Bernoulli(0.5));
    let mut bad = Vec::new();
    for seed in 0..10 {
        let runs = [
            verify_permutation_invariance(&coin, 100, &TrialPlan::new(100, seed, 100_000)),
            verify_permutation_invariance(
                &SequenceModel::Law(Dist::Uniform01),
                100,
                &TrialPlan::new(10, seed, 10_000),
            ),
            verify_permutation_invariance(
                &SequenceModel::Law(Dist::Geometric(0.5)),
                100,
                &TrialPlan::new(10, seed, 10_000),
            ),
            verify_resampling_idempotence(
                &coin,
                &TrialPlan::new(100, seed, 10_000).with_m(2).with_horizons(vec![100, 1_000, 10_000]),
            ),
        ]
        .map(Result::unwrap);
        for r in runs.iter().filter(|r| !r.pass) {
            bad.push(format!("seed {seed} {}", failures(r)));
        }
    }
    report(
        9,
        "permutation invariance and resampling idempotence, seeds 0–9",
        bad.is_empty(),
        start.elapsed(),
        Duration::from_secs(120),
        &bad.join("; "),
    );
}
