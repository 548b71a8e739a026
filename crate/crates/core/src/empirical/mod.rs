//! Empirical measures of concrete sequences.
//!
//! A sequence has an empirical measure when its relative frequencies
//! converge in the appropriate sense. A finite prefix can only approximate
//! those limits, so every classifier compares frequencies at the
//! checkpoints of a [`HorizonSchedule`] and answers with one of three
//! statuses:
//!
//! * in-domain: every criterion moved by less than `ε` between the
//!   compared checkpoints;
//! * out-of-domain: some criterion moved by more than `2ε`, and the two
//!   checkpoints that show it are reported as a witness;
//! * inconclusive: anything in between.
//!
//! Only checkpoints at or after the schedule's guard are compared. The
//! first checkpoint is the reference horizon, used to pick tail
//! thresholds and truncation levels before the compared window starts.

mod classify;
mod measure;

use serde::Serialize;

pub use classify::{
    classify_countable, classify_finite, classify_real, classify_real_avg, default_grid,
};
pub(crate) use classify::sup_gap;
pub use measure::{
    empirical_cdf, empirical_expectation, empirical_measure, frequency_count, positive_part,
    relative_frequency, Endpoint, EmpiricalMeasure, Piece, RegulatedFn, SetSpec,
};

use crate::prefix::PrefixError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmpiricalError {
    #[error("{op} needs a {expected} prefix, got {found}")]
    WrongKind {
        op: &'static str,
        expected: &'static str,
        found: &'static str,
    },
    #[error("horizon {n} is outside 1..={len}")]
    Horizon { n: usize, len: usize },
    #[error("invalid horizon schedule: {0}")]
    Schedule(String),
    #[error("the evaluation grid is empty")]
    EmptyGrid,
    #[error("no empirical measure: the verdict is {0}")]
    NotInDomain(Status),
    #[error("set {set} does not apply to {kind} values")]
    UnsupportedSet { set: String, kind: &'static str },
    #[error("invalid function: {0}")]
    BadFunction(String),
    #[error(transparent)]
    Prefix(#[from] PrefixError),
}

/// Checkpoints `n₁ < n₂ < … < n_k` and the tolerance `ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizonSchedule {
    checkpoints: Vec<usize>,
    epsilon: f64,
    guard: usize,
}

impl HorizonSchedule {
    /// The guard defaults to the second checkpoint when there are at
    /// least three, otherwise to the first.
    pub fn new(checkpoints: Vec<usize>, epsilon: f64) -> Result<Self, EmpiricalError> {
        if checkpoints.len() < 2 {
            return Err(EmpiricalError::Schedule(
                "at least two checkpoints are needed".into(),
            ));
        }
        if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EmpiricalError::Schedule(format!(
                "checkpoints {checkpoints:?} must be positive and strictly increasing"
            )));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(EmpiricalError::Schedule(format!(
                "tolerance {epsilon} must be positive"
            )));
        }
        let guard = if checkpoints.len() >= 3 {
            checkpoints[1]
        } else {
            checkpoints[0]
        };
        Ok(Self {
            checkpoints,
            epsilon,
            guard,
        })
    }

    /// `N/8, N/4, N/2, N` with `ε = max(0.01, 4/√N)`.
    pub fn default_for(n: usize) -> Result<Self, EmpiricalError> {
        let mut points: Vec<usize> = [n / 8, n / 4, n / 2, n]
            .into_iter()
            .filter(|&c| c > 0)
            .collect();
        points.dedup();
        Self::new(points, default_epsilon(n))
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self, EmpiricalError> {
        let guard = self.guard;
        self = Self::new(self.checkpoints, epsilon)?;
        self.guard = guard;
        Ok(self)
    }

    /// Compares only checkpoints `≥ guard`; at least two must remain.
    pub fn with_guard(mut self, guard: usize) -> Result<Self, EmpiricalError> {
        if self.checkpoints.iter().filter(|&&c| c >= guard).count() < 2 {
            return Err(EmpiricalError::Schedule(format!(
                "guard {guard} leaves fewer than two checkpoints to compare"
            )));
        }
        self.guard = guard;
        Ok(self)
    }

    pub fn checkpoints(&self) -> &[usize] {
        &self.checkpoints
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    pub fn reference(&self) -> usize {
        self.checkpoints[0]
    }

    pub fn last(&self) -> usize {
        *self.checkpoints.last().expect("at least two checkpoints")
    }

    /// Checkpoints at or after the guard.
    pub fn compared(&self) -> &[usize] {
        let start = self.checkpoints.partition_point(|&c| c < self.guard);
        &self.checkpoints[start..]
    }

    pub(crate) fn check_length(&self, len: usize) -> Result<(), EmpiricalError> {
        if self.last() > len {
            return Err(EmpiricalError::Horizon {
                n: self.last(),
                len,
            });
        }
        Ok(())
    }
}

pub fn default_epsilon(n: usize) -> f64 {
    (4.0 / (n as f64).sqrt()).max(0.01)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    InDomain,
    OutOfDomain,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::InDomain => "in-domain",
            Status::OutOfDomain => "out-of-domain",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// `Fail` is certified: the discrepancy exceeds twice the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Undecided,
}

impl Outcome {
    pub fn judge(discrepancy: f64, tolerance: f64) -> Self {
        if discrepancy < tolerance {
            Outcome::Pass
        } else if discrepancy > 2.0 * tolerance {
            Outcome::Fail
        } else {
            Outcome::Undecided
        }
    }
}

/// Two checkpoints and the point at which a criterion differs most.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub horizons: (usize, usize),
    pub point: Option<f64>,
    pub values: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub name: &'static str,
    pub outcome: Outcome,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub witness: Option<Witness>,
}

impl Criterion {
    fn new(name: &'static str, discrepancy: f64, tolerance: f64, witness: Option<Witness>) -> Self {
        Self {
            name,
            outcome: Outcome::judge(discrepancy, tolerance),
            discrepancy,
            tolerance,
            witness,
        }
    }
}

/// Which empirical sampling construction a verdict refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Finite,
    Countable,
    Real,
    RealAverage,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalVerdict {
    pub domain: Domain,
    pub status: Status,
    pub length: usize,
    pub schedule: HorizonSchedule,
    pub criteria: Vec<Criterion>,
    /// Countable case: whether tightness, uniform limits and
    /// normalization reached the same outcome.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criteria_agree: Option<bool>,
    /// Countable case: values at or above this threshold form the tail.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_threshold: Option<u64>,
    /// Average case: the signed running mean at the last checkpoint.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl EmpiricalVerdict {
    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule() {
        let h = HorizonSchedule::default_for(100_000).unwrap();
        assert_eq!(h.checkpoints(), &[12_500, 25_000, 50_000, 100_000]);
        assert_eq!(h.guard(), 25_000);
        assert_eq!(h.compared(), &[25_000, 50_000, 100_000]);
        assert!((h.epsilon() - 4.0 / 100_000f64.sqrt()).abs() < 1e-15);
        assert_eq!(HorizonSchedule::default_for(10_000_000).unwrap().epsilon(), 0.01);
    }

    #[test]
    fn schedule_validation() {
        assert!(HorizonSchedule::new(vec![10], 0.1).is_err());
        assert!(HorizonSchedule::new(vec![10, 10], 0.1).is_err());
        assert!(HorizonSchedule::new(vec![0, 10], 0.1).is_err());
        assert!(HorizonSchedule::new(vec![5, 10], 0.0).is_err());
        let h = HorizonSchedule::new(vec![5, 10], 0.1).unwrap();
        assert_eq!(h.compared(), &[5, 10]);
        assert!(h.clone().with_guard(6).is_err());
        assert!(h.check_length(9).is_err());
        assert!(HorizonSchedule::default_for(1).is_err());
    }

    #[test]
    fn judging() {
        assert_eq!(Outcome::judge(0.05, 0.1), Outcome::Pass);
        assert_eq!(Outcome::judge(0.15, 0.1), Outcome::Undecided);
        assert_eq!(Outcome::judge(0.25, 0.1), Outcome::Fail);
    }
}
