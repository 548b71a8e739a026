//! Exact and Monte Carlo checks of the limit theorems behind empirical
//! sampling.
//!
//! Each suite returns a [`VerificationReport`]. Probabilistic cases carry
//! their estimate, standard error and bound so the margin can be audited.
//! Trials are independent: trial `t` draws from [`rng::stream`]`(seed, t)`
//! and trials run on scoped threads, so reports do not depend on thread
//! count or scheduling.

mod limits;
mod moments;
mod sampling;

use std::fmt::Write as _;

use serde::Serialize;

use crate::dist::DistError;
use crate::empirical::EmpiricalError;
use crate::prefix::{PrefixError, SequencePrefix};
use crate::rng::{self, StreamRng};
use crate::sequence::{MixtureModel, SequenceError};
use crate::Dist;

pub use limits::{
    verify_concentration, verify_ecdf_concentration, verify_glivenko_cantelli,
    verify_maximal_ergodic, verify_slln,
};
pub use moments::{
    concentration_constant, cumulant_bounds, cumulants_from_moments, default_moment_configs,
    law_moments, sixth_moment_from_cumulants, sixth_moment_oracle, sixth_moment_suite, FiniteLaw,
    CUMULANT_BOUNDS,
};
pub use sampling::{
    verify_empirical_adequacy, verify_permutation_invariance, verify_resampling_idempotence,
};

pub const SCHEMA: &str = "esamp.verify/1";

/// Probabilistic assertions need at least this many trials.
pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("{suite} needs at least {min} trials, got {got}")]
    TooFewTrials {
        suite: &'static str,
        min: usize,
        got: usize,
    },
    #[error("invalid trial plan: {0}")]
    Plan(String),
    #[error("{suite}: {reason}")]
    Precondition { suite: &'static str, reason: String },
    #[error("enumeration of {states} states exceeds the limit of {limit}")]
    Enumeration { states: u128, limit: u128 },
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Empirical(#[from] EmpiricalError),
    #[error(transparent)]
    Prefix(#[from] PrefixError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialPlan {
    pub trials: usize,
    pub seed: u64,
    /// Sequence length `N`.
    pub n: usize,
    /// Word length.
    pub m: usize,
    /// Tolerances; suites that need a single one use the first.
    pub epsilons: Vec<f64>,
    /// Standard errors allowed on one-sided and two-sided estimates.
    pub slack: f64,
    /// Horizons along which decay is checked. Empty means the suite's
    /// default.
    pub horizons: Vec<usize>,
}

impl TrialPlan {
    pub fn new(trials: usize, seed: u64, n: usize) -> Self {
        Self {
            trials,
            seed,
            n,
            m: 2,
            epsilons: vec![0.01],
            slack: 4.0,
            horizons: Vec::new(),
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_epsilons(mut self, epsilons: Vec<f64>) -> Self {
        self.epsilons = epsilons;
        self
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self
    }

    pub fn with_horizons(mut self, horizons: Vec<usize>) -> Self {
        self.horizons = horizons;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.epsilons[0]
    }

    fn validate(&self) -> Result<(), VerifyError> {
        if self.trials == 0 || self.n == 0 || self.m == 0 {
            return Err(VerifyError::Plan(
                "trials, N and m must be positive".into(),
            ));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(VerifyError::Plan(format!(
                "tolerances {:?} must be non-empty and positive",
                self.epsilons
            )));
        }
        if !(self.slack >= 0.0 && self.slack.is_finite()) {
            return Err(VerifyError::Plan(format!("slack {} must be ≥ 0", self.slack)));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) || self.horizons.first() == Some(&0) {
            return Err(VerifyError::Plan(format!(
                "horizons {:?} must be positive and increasing",
                self.horizons
            )));
        }
        Ok(())
    }

    fn require_trials(&self, suite: &'static str) -> Result<(), VerifyError> {
        self.validate()?;
        if self.trials < MIN_TRIALS {
            return Err(VerifyError::TooFewTrials {
                suite,
                min: MIN_TRIALS,
                got: self.trials,
            });
        }
        Ok(())
    }

    /// The plan's horizons, or `default` when none were given. Horizons
    /// beyond `N` are an error.
    fn horizons_or(&self, default: Vec<usize>) -> Result<Vec<usize>, VerifyError> {
        let h = if self.horizons.is_empty() {
            default
        } else {
            self.horizons.clone()
        };
        if h.iter().any(|&x| x == 0 || x > self.n) || h.windows(2).any(|w| w[0] >= w[1]) {
            return Err(VerifyError::Plan(format!(
                "horizons {h:?} must be increasing within 1..={}",
                self.n
            )));
        }
        Ok(h)
    }
}

/// How a case's estimate is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Check {
    /// `estimate ≤ bound + slack·stderr`.
    AtMost { slack: f64 },
    /// `estimate ≥ bound − slack·stderr`.
    AtLeast { slack: f64 },
    /// `|estimate − bound| ≤ tol`.
    Within { tol: f64 },
    /// Exact equality, decided before conversion to floats.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub estimate: f64,
    pub stderr: f64,
    pub bound: f64,
    pub check: Check,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CaseResult {
    pub fn at_most(name: impl Into<String>, estimate: f64, stderr: f64, bound: f64, slack: f64) -> Self {
        Self {
            name: name.into(),
            estimate,
            stderr,
            bound,
            check: Check::AtMost { slack },
            pass: estimate <= bound + slack * stderr,
            detail: None,
        }
    }

    pub fn at_least(name: impl Into<String>, estimate: f64, stderr: f64, bound: f64, slack: f64) -> Self {
        Self {
            name: name.into(),
            estimate,
            stderr,
            bound,
            check: Check::AtLeast { slack },
            pass: estimate >= bound - slack * stderr,
            detail: None,
        }
    }

    pub fn within(name: impl Into<String>, estimate: f64, stderr: f64, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            estimate,
            stderr,
            bound: target,
            check: Check::Within { tol },
            pass: (estimate - target).abs() <= tol,
            detail: None,
        }
    }

    pub fn exact(name: impl Into<String>, estimate: f64, target: f64, equal: bool) -> Self {
        Self {
            name: name.into(),
            estimate,
            stderr: 0.0,
            bound: target,
            check: Check::Exact,
            pass: equal,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub check: &'static str,
    pub subject: String,
    pub seed: u64,
    pub plan: Option<TrialPlan>,
    pub pass: bool,
    pub cases: Vec<CaseResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip)]
    pub raw_columns: Vec<&'static str>,
    #[serde(skip)]
    pub raw: Vec<Vec<f64>>,
}

impl VerificationReport {
    fn new(check: &'static str, subject: impl Into<String>, plan: Option<&TrialPlan>) -> Self {
        Self {
            schema: SCHEMA,
            check,
            subject: subject.into(),
            seed: plan.map_or(0, |p| p.seed),
            plan: plan.cloned(),
            pass: true,
            cases: Vec::new(),
            notes: Vec::new(),
            raw_columns: Vec::new(),
            raw: Vec::new(),
        }
    }

    fn push(&mut self, case: CaseResult) {
        self.pass &= case.pass;
        self.cases.push(case);
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// A fixed-width table, one row per case.
    pub fn table(&self) -> String {
        let width = self.cases.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        let _ = writeln!(out, "{} ({}), seed {}", self.check, self.subject, self.seed);
        let _ = writeln!(
            out,
            "{:<width$}  {:>14}  {:>11}  {:>14}  {:<14}  result",
            "case", "estimate", "stderr", "bound", "check"
        );
        for c in &self.cases {
            let check = match c.check {
                Check::AtMost { slack } => format!("≤ +{slack}σ"),
                Check::AtLeast { slack } => format!("≥ −{slack}σ"),
                Check::Within { tol } => format!("± {tol}"),
                Check::Exact => "exact".to_string(),
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>14.6e}  {:>11.3e}  {:>14.6e}  {:<14}  {}",
                c.name,
                c.estimate,
                c.stderr,
                c.bound,
                check,
                if c.pass { "pass" } else { "FAIL" }
            );
            if let Some(d) = &c.detail {
                let _ = writeln!(out, "{:<width$}    {d}", "");
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(out, "verdict: {}", if self.pass { "pass" } else { "FAIL" });
        out
    }

    /// Per-trial statistics as CSV, one row per trial.
    pub fn raw_csv(&self) -> String {
        let mut out = self.raw_columns.join(",");
        out.push('\n');
        for row in &self.raw {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Where sampled sequences come from.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceModel {
    Mixture(MixtureModel),
    Law(Dist),
}

impl SequenceModel {
    pub fn describe(&self) -> String {
        match self {
            SequenceModel::Mixture(m) => serde_json::to_string(m).expect("models serialize"),
            SequenceModel::Law(d) => d.to_string(),
        }
    }

    pub fn sample(&self, rng: &mut StreamRng, n: usize) -> SequencePrefix {
        match self {
            SequenceModel::Mixture(m) => SequencePrefix::finite(m.alphabet(), m.sample(rng, n))
                .expect("mixture letters are in range"),
            SequenceModel::Law(d) => d.prefix(rng, n),
        }
    }

    fn alphabet(&self) -> Option<usize> {
        match self {
            SequenceModel::Mixture(m) => Some(m.alphabet()),
            SequenceModel::Law(d) => d.alphabet(),
        }
    }
}

/// Runs `f(t, rng_t)` for every trial `t` on scoped threads and returns
/// the results in trial order.
pub(crate) fn run_trials<T, F>(seed: u64, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut StreamRng) -> T + Sync,
{
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(trials.max(1));
    let chunk = trials.div_ceil(threads);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|k| {
                s.spawn(move || {
                    (k * chunk..((k + 1) * chunk).min(trials))
                        .map(|t| f(t, &mut rng::stream(seed, t as u64)))
                        .collect::<Vec<T>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("trial thread panicked"))
            .collect()
    })
}

/// Sample mean and its standard error.
pub(crate) fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Proportion of `true` and its binomial standard error.
pub(crate) fn proportion(hits: impl IntoIterator<Item = bool>) -> (f64, f64) {
    let (k, n) = hits
        .into_iter()
        .fold((0usize, 0usize), |(k, n), b| (k + b as usize, n + 1));
    let p = k as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

pub(crate) fn median(xs: &[f64]) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let k = s.len();
    if k % 2 == 1 {
        s[k / 2]
    } else {
        (s[k / 2 - 1] + s[k / 2]) / 2.0
    }
}
