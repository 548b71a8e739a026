//! Concentration bounds, the maximal ergodic inequality, Glivenko–Cantelli
//! and the strong law.

use super::moments::{concentration_constant, law_moments, sixth_moment_from_cumulants};
use super::{
    mean_stderr, median, proportion, run_trials, CaseResult, TrialPlan, VerificationReport,
    VerifyError, CUMULANT_BOUNDS,
};
use crate::empirical::{classify_real_avg, default_grid, sup_gap, HorizonSchedule, Status};
use crate::rational::{self, int, Rational};
use crate::Dist;

const DEFAULT_CONCENTRATION_GRID: [usize; 3] = [10, 20, 40];
const DEFAULT_ECDF_GRID: [usize; 2] = [100, 1000];

fn grid_or(plan: &TrialPlan, default: &[usize]) -> Result<Vec<usize>, VerifyError> {
    let g = if plan.horizons.is_empty() {
        default.to_vec()
    } else {
        plan.horizons.clone()
    };
    if g.len() < 2 {
        return Err(VerifyError::Plan(format!("need at least two sizes, got {g:?}")));
    }
    Ok(g)
}

fn require_unit_interval(dist: &Dist, suite: &'static str) -> Result<(), VerifyError> {
    if !dist.is_bounded01() {
        return Err(VerifyError::Precondition {
            suite,
            reason: format!("{dist} is not supported on [0,1]"),
        });
    }
    Ok(())
}

/// `D = m S_n − n S_m` for the first `n` and `m` terms.
fn split_difference(values: &[f64], n: usize, m: usize) -> f64 {
    let s_n: f64 = values[..n].iter().sum();
    let s_m: f64 = s_n + values[n..m].iter().sum::<f64>();
    m as f64 * s_n - n as f64 * s_m
}

/// Checks `E[D⁶] ≤ C n³ m⁶` and `P(|S_n/n − S_m/m| > ε) ≤ C/(ε⁶ n³)` with
/// `C = 261/64` over `n` in the plan's horizons (default 10, 20, 40),
/// `m = 2n` and every `ε` in the plan. `E[D⁶]` is exact when the law's
/// moments are rational and estimated by Monte Carlo as well.
pub fn verify_concentration(dist: &Dist, plan: &TrialPlan) -> Result<VerificationReport, VerifyError> {
    plan.require_trials("concentration")?;
    require_unit_interval(dist, "concentration")?;
    let grid = grid_or(plan, &DEFAULT_CONCENTRATION_GRID)?;
    let c = concentration_constant();
    let c_f = rational::to_f64(&c);
    let longest = 2 * grid.iter().max().expect("non-empty grid");

    // ds[t][k]: D for trial t at grid size k.
    let ds = run_trials(plan.seed, plan.trials, |_, rng| {
        let values = dist.sample_n(rng, longest);
        grid.iter().map(|&n| split_difference(&values, n, 2 * n)).collect::<Vec<f64>>()
    });

    let mut report = VerificationReport::new("concentration", dist.to_string(), Some(plan));
    report.note(format!(
        "C = {} = K₆ + 15K₄K₂ + 10K₃² + 15K₂³ from {CUMULANT_BOUNDS} for laws on [0,1]",
        rational::format(&c)
    ));
    report.note("P(|S_n/n − S_m/m| > ε) = P(|D| > ε n m) ≤ E[D⁶]/(ε⁶ n⁶ m⁶) ≤ C/(ε⁶ n³) by Markov");
    report.raw_columns = vec!["trial", "n", "m", "d"];
    for (t, row) in ds.iter().enumerate() {
        for (&n, d) in grid.iter().zip(row) {
            report.raw.push(vec![t as f64, n as f64, (2 * n) as f64, *d]);
        }
    }

    let moments = law_moments(dist);
    for (k, &n) in grid.iter().enumerate() {
        let m = 2 * n;
        let scale = (n as f64).powi(3) * (m as f64).powi(6);
        if let Some(mu) = &moments {
            let exact = sixth_moment_from_cumulants(mu, n, m);
            let ratio = &exact / (num_traits::pow(int(n as i64), 3) * num_traits::pow(int(m as i64), 6));
            report.push(
                CaseResult::exact(
                    format!("n={n} m={m} E[D⁶]/(n³m⁶) ≤ C, exact"),
                    rational::to_f64(&ratio),
                    c_f,
                    ratio <= c,
                )
                .with_detail(format!("E[D⁶] = {}", short(&exact))),
            );
        }
        let sixth: Vec<f64> = ds.iter().map(|row| row[k].powi(6) / scale).collect();
        let (est, se) = mean_stderr(&sixth);
        report.push(CaseResult::at_most(
            format!("n={n} m={m} E[D⁶]/(n³m⁶) ≤ C, Monte Carlo"),
            est,
            se,
            c_f,
            plan.slack,
        ));
        for &eps in &plan.epsilons {
            let (p, se) = proportion(ds.iter().map(|row| row[k].abs() > eps * (n * m) as f64));
            report.push(CaseResult::at_most(
                format!("n={n} m={m} ε={eps} P(|S_n/n − S_m/m| > ε)"),
                p,
                se,
                c_f / (eps.powi(6) * (n as f64).powi(3)),
                plan.slack,
            ));
        }
    }
    Ok(report)
}

fn short(x: &Rational) -> String {
    let s = rational::format(x);
    if s.len() <= 48 {
        s
    } else {
        format!("{:.6e}", rational::to_f64(x))
    }
}

/// Sup-distance between the empirical CDFs of the first `n` and first
/// `m = 2n` terms, for `n` in the plan's horizons (default 100, 1000).
///
/// The sup is attained at one of the `m` sample points. Conditional on
/// `X_k = x`, the other terms are IID, and fixing one of them moves
/// `F_n(x) − F_m(x)` by at most `1/n`; the lemma bound and a union over
/// `k` give `P(sup > ε) ≤ m C/((ε − 1/n)⁶ n³)`. The report checks that
/// bound and that `ε⁶ n² P̂` does not increase along the grid beyond
/// `slack` combined standard errors.
pub fn verify_ecdf_concentration(dist: &Dist, plan: &TrialPlan) -> Result<VerificationReport, VerifyError> {
    plan.require_trials("ECDF concentration")?;
    let grid = grid_or(plan, &DEFAULT_ECDF_GRID)?;
    let c = rational::to_f64(&concentration_constant());
    let longest = 2 * grid.iter().max().expect("non-empty grid");

    let sups = run_trials(plan.seed, plan.trials, |_, rng| {
        let values = dist.sample_n(rng, longest);
        grid.iter()
            .map(|&n| {
                let mut a = values[..n].to_vec();
                let mut b = values[..2 * n].to_vec();
                a.sort_by(f64::total_cmp);
                b.sort_by(f64::total_cmp);
                sup_gap(&a, &b).0
            })
            .collect::<Vec<f64>>()
    });

    let mut report = VerificationReport::new("ecdf-concentration", dist.to_string(), Some(plan));
    report.raw_columns = vec!["trial", "n", "sup"];
    for (t, row) in sups.iter().enumerate() {
        for (&n, s) in grid.iter().zip(row) {
            report.raw.push(vec![t as f64, n as f64, *s]);
        }
    }
    report.note("sup over t is attained at a sample point; union over the m points of the fixed-t bound with ε reduced by 1/n");
    report.note("indicators 1{X ≤ t} lie in [0,1] for any law, so the constant C applies");

    for &eps in &plan.epsilons {
        let mut scaled = Vec::new();
        for (k, &n) in grid.iter().enumerate() {
            let m = 2 * n;
            let (p, se) = proportion(sups.iter().map(|row| row[k] > eps));
            let shrunk = eps - 1.0 / n as f64;
            let envelope = if shrunk > 0.0 {
                m as f64 * c / (shrunk.powi(6) * (n as f64).powi(3))
            } else {
                f64::INFINITY
            };
            report.push(CaseResult::at_most(
                format!("n={n} m={m} ε={eps} P(sup|F_n − F_m| > ε)"),
                p,
                se,
                envelope,
                plan.slack,
            ));
            let factor = eps.powi(6) * (n as f64).powi(2);
            scaled.push((n, p * factor, se * factor));
        }
        for w in scaled.windows(2) {
            let ((n0, s0, e0), (n1, s1, e1)) = (w[0], w[1]);
            let se = (e0 * e0 + e1 * e1).sqrt();
            report.push(
                CaseResult::at_most(
                    format!("ε={eps} ε⁶n²P̂ non-increasing {n0}→{n1}"),
                    s1,
                    se,
                    s0,
                    plan.slack,
                ),
            );
        }
    }
    Ok(report)
}

/// `P(max_{n ≤ N} (1/n) Σ_{i≤n} Y_i > r) ≤ E[Y₁]/r` for nonnegative `Y`,
/// with `N = plan.n`.
pub fn verify_maximal_ergodic(dist: &Dist, r: f64, plan: &TrialPlan) -> Result<VerificationReport, VerifyError> {
    plan.require_trials("maximal ergodic")?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(VerifyError::Precondition {
            suite: "maximal ergodic",
            reason: format!("threshold r = {r} must be positive"),
        });
    }
    let mean = dist.mean().filter(|_| dist.cdf_left(0.0) == 0.0).ok_or_else(|| {
        VerifyError::Precondition {
            suite: "maximal ergodic",
            reason: format!("{dist} is not nonnegative with a finite mean"),
        }
    })?;
    let maxima = run_trials(plan.seed, plan.trials, |_, rng| {
        let mut sum = 0.0;
        let mut best = f64::NEG_INFINITY;
        for i in 1..=plan.n {
            sum += dist.sample(rng);
            best = best.max(sum / i as f64);
        }
        best
    });
    let (p, se) = proportion(maxima.iter().map(|&b| b > r));
    let mut report = VerificationReport::new("maximal-ergodic", dist.to_string(), Some(plan));
    report.push(CaseResult::at_most(
        format!("P(max_{{n≤{}}} running mean > {r})", plan.n),
        p,
        se,
        mean / r,
        plan.slack,
    ));
    report.note("the maximum over n ≤ N underestimates the supremum over all n, so passing here is implied by the inequality");
    report.raw_columns = vec!["trial", "max_running_mean"];
    report.raw = maxima.iter().enumerate().map(|(t, &b)| vec![t as f64, b]).collect();
    Ok(report)
}

/// `sup_t |F_n(t) − F(t)|` for sorted values, using both `F(t)` and
/// `F(t−)` at every distinct sample point.
pub fn ks_statistic(sorted: &[f64], dist: &Dist) -> f64 {
    let n = sorted.len() as f64;
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        best = best
            .max((i as f64 / n - dist.cdf_left(v)).abs())
            .max((j as f64 / n - dist.cdf(v)).abs());
        i = j;
    }
    best
}

/// IID prefixes against the analytic CDF: the sup distance at `N` must be
/// below the tolerance in every trial, and its median must decrease along
/// the horizons (default `N/100, N/10, N`).
pub fn verify_glivenko_cantelli(dist: &Dist, plan: &TrialPlan) -> Result<VerificationReport, VerifyError> {
    plan.require_trials("Glivenko–Cantelli")?;
    let mut default: Vec<usize> = [plan.n / 100, plan.n / 10, plan.n].into_iter().filter(|&h| h > 0).collect();
    default.dedup();
    let horizons = plan.horizons_or(default)?;
    let tol = plan.tolerance();
    let sups = run_trials(plan.seed, plan.trials, |_, rng| {
        let values = dist.sample_n(rng, plan.n);
        horizons
            .iter()
            .map(|&h| {
                let mut s = values[..h].to_vec();
                s.sort_by(f64::total_cmp);
                ks_statistic(&s, dist)
            })
            .collect::<Vec<f64>>()
    });

    let mut report = VerificationReport::new("glivenko-cantelli", dist.to_string(), Some(plan));
    report.raw_columns = vec!["trial", "horizon", "sup"];
    for (t, row) in sups.iter().enumerate() {
        for (&h, s) in horizons.iter().zip(row) {
            report.raw.push(vec![t as f64, h as f64, *s]);
        }
    }
    let last = horizons.len() - 1;
    let at_n: Vec<f64> = sups.iter().map(|row| row[last]).collect();
    let worst = at_n.iter().cloned().fold(0.0, f64::max);
    let below = at_n.iter().filter(|&&s| s < tol).count();
    report.push(
        CaseResult::exact(
            format!("sup_t |F_N − F| < {tol} in every trial, N = {}", plan.n),
            worst,
            tol,
            below == plan.trials,
        )
        .with_detail(format!("{below}/{} trials below tolerance", plan.trials)),
    );
    let medians: Vec<f64> = (0..horizons.len())
        .map(|k| median(&sups.iter().map(|row| row[k]).collect::<Vec<_>>()))
        .collect();
    let trivial = medians.iter().all(|&m| m == 0.0);
    for k in 1..horizons.len() {
        let ok = medians[k] < medians[k - 1] || trivial;
        report.push(CaseResult::exact(
            format!("median sup decreases {}→{}", horizons[k - 1], horizons[k]),
            medians[k],
            medians[k - 1],
            ok,
        ));
    }
    if trivial {
        report.note("the sup distance is identically zero");
    }
    Ok(report)
}

/// Finite mean: the running mean at `N` lies within the tolerance of the
/// mean in at least 99% of trials. No mean: the average classifier must
/// not certify the prefix in-domain in at least 90% of trials.
pub fn verify_slln(dist: &Dist, plan: &TrialPlan) -> Result<VerificationReport, VerifyError> {
    plan.require_trials("strong law")?;
    let tol = plan.tolerance();
    let mut report = VerificationReport::new("slln", dist.to_string(), Some(plan));
    match dist.mean() {
        Some(mu) => {
            let means = run_trials(plan.seed, plan.trials, |_, rng| {
                (0..plan.n).map(|_| dist.sample(rng)).sum::<f64>() / plan.n as f64
            });
            let (frac, se) = proportion(means.iter().map(|&x| (x - mu).abs() < tol));
            report.push(
                CaseResult::at_least(
                    format!("|mean_N − {mu}| < {tol} in ≥ 99% of trials"),
                    frac,
                    se,
                    0.99,
                    0.0,
                )
                .with_detail(format!("mean of means {:.6}", mean_stderr(&means).0)),
            );
            if let Some(var) = dist.variance() {
                report.note(format!(
                    "standard error of one running mean: {:.3e}",
                    (var / plan.n as f64).sqrt()
                ));
            }
            report.raw_columns = vec!["trial", "mean"];
            report.raw = means.iter().enumerate().map(|(t, &m)| vec![t as f64, m]).collect();
        }
        None => {
            let h = HorizonSchedule::default_for(plan.n)?;
            let grid = default_grid();
            let statuses = run_trials(plan.seed, plan.trials, |_, rng| {
                let x = dist.prefix(rng, plan.n);
                classify_real_avg(&x, &h, &grid).map(|v| (v.status, v.mean.unwrap_or(f64::NAN)))
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
            let (frac, se) = proportion(statuses.iter().map(|(s, _)| *s != Status::InDomain));
            let out = statuses.iter().filter(|(s, _)| *s == Status::OutOfDomain).count();
            report.push(
                CaseResult::at_least(
                    "running averages not certified in-domain in ≥ 90% of trials",
                    frac,
                    se,
                    0.9,
                    0.0,
                )
                .with_detail(format!("{out} out-of-domain, checkpoints {:?}", h.checkpoints())),
            );
            report.note("no finite mean: averages are expected to keep moving between checkpoints");
            report.raw_columns = vec!["trial", "in_domain", "mean"];
            report.raw = statuses
                .iter()
                .enumerate()
                .map(|(t, (s, m))| vec![t as f64, (*s == Status::InDomain) as u8 as f64, *m])
                .collect();
        }
    }
    Ok(report)
}
