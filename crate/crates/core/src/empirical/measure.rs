//! Empirical measures, relative frequencies and empirical integrals.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::classify::tail_threshold;
use super::{Domain, EmpiricalError, EmpiricalVerdict, Status};
use crate::prefix::{SequencePrefix, ValueKind};
use crate::rational::{self, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EmpiricalMeasure {
    /// Exact letter frequencies.
    Finite {
        horizon: usize,
        #[serde(with = "rational::serde_rational::vec")]
        pmf: Vec<Rational>,
    },
    /// Frequencies of observed values below `tail_threshold`; the rest of
    /// the mass is reported as `tail_mass`.
    Countable {
        horizon: usize,
        pmf: Vec<(u64, f64)>,
        tail_threshold: u64,
        tail_mass: f64,
    },
    /// Step CDF: `cdf[k]` is the mass of `(−∞, points[k]]`.
    Real {
        horizon: usize,
        points: Vec<f64>,
        cdf: Vec<f64>,
    },
}

impl EmpiricalMeasure {
    pub fn horizon(&self) -> usize {
        match self {
            EmpiricalMeasure::Finite { horizon, .. }
            | EmpiricalMeasure::Countable { horizon, .. }
            | EmpiricalMeasure::Real { horizon, .. } => *horizon,
        }
    }

    /// `F(t)`. In the countable case the tail mass sits at the threshold.
    pub fn cdf(&self, t: f64) -> f64 {
        match self {
            EmpiricalMeasure::Finite { pmf, .. } => pmf
                .iter()
                .enumerate()
                .filter(|(a, _)| *a as f64 <= t)
                .map(|(_, p)| rational::to_f64(p))
                .sum(),
            EmpiricalMeasure::Countable {
                pmf,
                tail_threshold,
                tail_mass,
                ..
            } => {
                let below: f64 = pmf.iter().filter(|(v, _)| *v as f64 <= t).map(|(_, p)| p).sum();
                if *tail_threshold as f64 <= t {
                    below + tail_mass
                } else {
                    below
                }
            }
            EmpiricalMeasure::Real { points, cdf, .. } => {
                let k = points.partition_point(|&p| p <= t);
                if k == 0 {
                    0.0
                } else {
                    cdf[k - 1]
                }
            }
        }
    }

    /// Total mass (including any tail mass).
    pub fn total_mass(&self) -> f64 {
        match self {
            EmpiricalMeasure::Finite { pmf, .. } => rational::to_f64(&pmf.iter().sum()),
            EmpiricalMeasure::Countable { pmf, tail_mass, .. } => {
                pmf.iter().map(|(_, p)| p).sum::<f64>() + tail_mass
            }
            EmpiricalMeasure::Real { cdf, .. } => cdf.last().copied().unwrap_or(0.0),
        }
    }

    /// Atoms as `(value, mass)`. The real case differences the CDF.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match self {
            EmpiricalMeasure::Finite { pmf, .. } => pmf
                .iter()
                .enumerate()
                .filter(|(_, p)| !num_traits::Zero::is_zero(*p))
                .map(|(a, p)| (a as f64, rational::to_f64(p)))
                .collect(),
            EmpiricalMeasure::Countable { pmf, .. } => {
                pmf.iter().map(|&(v, p)| (v as f64, p)).collect()
            }
            EmpiricalMeasure::Real { points, cdf, .. } => {
                let mut prev = 0.0;
                points
                    .iter()
                    .zip(cdf)
                    .map(|(&t, &c)| {
                        let m = c - prev;
                        prev = c;
                        (t, m)
                    })
                    .collect()
            }
        }
    }
}

/// `F_n(t) = |{i ≤ n : x_i ≤ t}|/n` as a step function on the sorted
/// distinct sample values.
pub fn empirical_cdf(x: &SequencePrefix, n: usize) -> Result<EmpiricalMeasure, EmpiricalError> {
    check_horizon(x, n)?;
    Ok(step_cdf(&x.to_reals()[..n]))
}

fn step_cdf(values: &[f64]) -> EmpiricalMeasure {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut points = Vec::new();
    let mut cdf = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        if i + 1 < n && sorted[i + 1] == v {
            continue;
        }
        points.push(v);
        cdf.push((i + 1) as f64 / n as f64);
    }
    EmpiricalMeasure::Real {
        horizon: n,
        points,
        cdf,
    }
}

fn check_horizon(x: &SequencePrefix, n: usize) -> Result<(), EmpiricalError> {
    if n == 0 || n > x.len() {
        return Err(EmpiricalError::Horizon { n, len: x.len() });
    }
    Ok(())
}

/// The empirical measure at the last checkpoint of an in-domain verdict.
/// Any other verdict is refused.
pub fn empirical_measure(
    x: &SequencePrefix,
    v: &EmpiricalVerdict,
) -> Result<EmpiricalMeasure, EmpiricalError> {
    if v.status != Status::InDomain {
        return Err(EmpiricalError::NotInDomain(v.status));
    }
    let n = v.schedule.last();
    check_horizon(x, n)?;
    match v.domain {
        Domain::Finite => {
            let (alphabet, values) = x.letters().ok_or(EmpiricalError::WrongKind {
                op: "empirical_measure",
                expected: "finite",
                found: x.kind().as_str(),
            })?;
            let mut counts = vec![0i64; alphabet];
            for &a in &values[..n] {
                counts[a] += 1;
            }
            Ok(EmpiricalMeasure::Finite {
                horizon: n,
                pmf: counts.iter().map(|&c| ratio(c, n as i64)).collect(),
            })
        }
        Domain::Countable => {
            let values = x.naturals().ok_or(EmpiricalError::WrongKind {
                op: "empirical_measure",
                expected: "natural",
                found: x.kind().as_str(),
            })?;
            let threshold = v.tail_threshold.unwrap_or_else(|| {
                let mut r = values[..v.schedule.reference()].to_vec();
                r.sort_unstable();
                tail_threshold(&r, v.schedule.epsilon())
            });
            let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
            let mut tail = 0u64;
            for &x in &values[..n] {
                if x >= threshold {
                    tail += 1;
                } else {
                    *counts.entry(x).or_insert(0) += 1;
                }
            }
            Ok(EmpiricalMeasure::Countable {
                horizon: n,
                pmf: counts
                    .into_iter()
                    .map(|(k, c)| (k, c as f64 / n as f64))
                    .collect(),
                tail_threshold: threshold,
                tail_mass: tail as f64 / n as f64,
            })
        }
        Domain::Real | Domain::RealAverage => Ok(step_cdf(&x.to_reals()[..n])),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Unbounded,
    Open(f64),
    Closed(f64),
}

/// The events whose relative frequency can be taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetSpec {
    All,
    Empty,
    /// Letters of a finite alphabet.
    Letters(BTreeSet<usize>),
    /// A finite subset of ℕ, or its complement when `cofinite`.
    Naturals { members: BTreeSet<u64>, cofinite: bool },
    Interval { lo: Endpoint, hi: Endpoint },
}

impl SetSpec {
    pub fn interval(lo: Endpoint, hi: Endpoint) -> Self {
        SetSpec::Interval { lo, hi }
    }

    /// `(−∞, t]`.
    pub fn at_most(t: f64) -> Self {
        SetSpec::Interval {
            lo: Endpoint::Unbounded,
            hi: Endpoint::Closed(t),
        }
    }

    /// Parses `all`, `empty`, `{a,b,…}`, `cofinite{a,…}` or an interval
    /// such as `(-inf,0.5]` or `[0,1)`. Braces read letters for a finite
    /// prefix and naturals otherwise.
    pub fn parse(text: &str, kind: ValueKind) -> Result<Self, EmpiricalError> {
        let bad = || EmpiricalError::UnsupportedSet {
            set: text.to_string(),
            kind: kind.as_str(),
        };
        let t = text.trim();
        match t {
            "all" => return Ok(SetSpec::All),
            "empty" | "{}" => return Ok(SetSpec::Empty),
            _ => {}
        }
        let (cofinite, body) = match t.strip_prefix("cofinite") {
            Some(rest) => (true, rest.trim()),
            None => (false, t),
        };
        if let Some(inner) = body.strip_prefix('{').and_then(|b| b.strip_suffix('}')) {
            let items: Vec<&str> = inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            return match kind {
                ValueKind::Finite if !cofinite => Ok(SetSpec::Letters(
                    items.iter().map(|s| s.parse().map_err(|_| bad())).collect::<Result<_, _>>()?,
                )),
                ValueKind::Natural => Ok(SetSpec::Naturals {
                    members: items.iter().map(|s| s.parse().map_err(|_| bad())).collect::<Result<_, _>>()?,
                    cofinite,
                }),
                _ => Err(bad()),
            };
        }
        if cofinite || t.len() < 2 {
            return Err(bad());
        }
        let (open, close) = (t.as_bytes()[0], t.as_bytes()[t.len() - 1]);
        let inner = &t[1..t.len() - 1];
        let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
        let end = |s: &str, closed: bool| -> Result<Endpoint, EmpiricalError> {
            match s.trim() {
                "-inf" | "inf" | "+inf" | "" => Ok(Endpoint::Unbounded),
                v => {
                    let x = if v.contains('/') {
                        rational::to_f64(&rational::parse(v).map_err(|_| bad())?)
                    } else {
                        v.parse::<f64>().map_err(|_| bad())?
                    };
                    Ok(if closed { Endpoint::Closed(x) } else { Endpoint::Open(x) })
                }
            }
        };
        let lo = match open {
            b'[' => end(lo, true)?,
            b'(' => end(lo, false)?,
            _ => return Err(bad()),
        };
        let hi = match close {
            b']' => end(hi, true)?,
            b')' => end(hi, false)?,
            _ => return Err(bad()),
        };
        Ok(SetSpec::Interval { lo, hi })
    }

    fn contains_real(&self, v: f64) -> bool {
        match self {
            SetSpec::All => true,
            SetSpec::Empty => false,
            SetSpec::Interval { lo, hi } => {
                let above = match lo {
                    Endpoint::Unbounded => true,
                    Endpoint::Open(a) => v > *a,
                    Endpoint::Closed(a) => v >= *a,
                };
                let below = match hi {
                    Endpoint::Unbounded => true,
                    Endpoint::Open(b) => v < *b,
                    Endpoint::Closed(b) => v <= *b,
                };
                above && below
            }
            SetSpec::Letters(_) | SetSpec::Naturals { .. } => unreachable!("checked by caller"),
        }
    }
}

/// `|{i ≤ n : x_i ∈ T}|`, exactly.
pub fn frequency_count(
    x: &SequencePrefix,
    set: &SetSpec,
    n: usize,
) -> Result<usize, EmpiricalError> {
    check_horizon(x, n)?;
    let unsupported = || EmpiricalError::UnsupportedSet {
        set: format!("{set:?}"),
        kind: x.kind().as_str(),
    };
    Ok(match set {
        SetSpec::Letters(letters) => {
            let (_, values) = x.letters().ok_or_else(unsupported)?;
            values[..n].iter().filter(|v| letters.contains(v)).count()
        }
        SetSpec::Naturals { members, cofinite } => {
            let values = x.naturals().ok_or_else(unsupported)?;
            values[..n]
                .iter()
                .filter(|v| members.contains(v) != *cofinite)
                .count()
        }
        other => x.to_reals()[..n]
            .iter()
            .filter(|&&v| other.contains_real(v))
            .count(),
    })
}

/// `|{i ≤ n : x_i ∈ T}| / n`.
pub fn relative_frequency(
    x: &SequencePrefix,
    set: &SetSpec,
    n: usize,
) -> Result<f64, EmpiricalError> {
    Ok(frequency_count(x, set, n)? as f64 / n as f64)
}

/// One piece of a regulated function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Piece {
    Constant(f64),
    /// `slope · y + intercept`.
    Linear { slope: f64, intercept: f64 },
}

impl Piece {
    fn eval(&self, y: f64) -> f64 {
        match *self {
            Piece::Constant(c) => c,
            Piece::Linear { slope, intercept } => slope * y + intercept,
        }
    }
}

/// A bounded function given by breakpoints `b₁ < … < b_k` and `k + 1`
/// pieces on `(−∞, b₁], (b₁, b₂], …, (b_k, ∞)`. The two outer pieces
/// must be constant so that the limits at `±∞` are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegulatedRepr")]
pub struct RegulatedFn {
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
}

#[derive(Deserialize)]
struct RegulatedRepr {
    #[serde(default)]
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
}

impl TryFrom<RegulatedRepr> for RegulatedFn {
    type Error = EmpiricalError;

    fn try_from(r: RegulatedRepr) -> Result<Self, EmpiricalError> {
        Self::new(r.breakpoints, r.pieces)
    }
}

impl RegulatedFn {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Piece>) -> Result<Self, EmpiricalError> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(EmpiricalError::BadFunction(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EmpiricalError::BadFunction(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        let outer = [pieces[0], pieces[pieces.len() - 1]];
        if outer.iter().any(|p| !matches!(p, Piece::Constant(_))) {
            return Err(EmpiricalError::BadFunction(
                "unbounded: the outer pieces must be constant".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            pieces,
        })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            breakpoints: vec![],
            pieces: vec![Piece::Constant(c)],
        }
    }

    /// `1` on `(−∞, t]`, `0` after.
    pub fn indicator_at_most(t: f64) -> Self {
        Self {
            breakpoints: vec![t],
            pieces: vec![Piece::Constant(1.0), Piece::Constant(0.0)],
        }
    }

    /// `min(max(y, lo), hi)`.
    pub fn clamp(lo: f64, hi: f64) -> Self {
        Self {
            breakpoints: vec![lo, hi],
            pieces: vec![
                Piece::Constant(lo),
                Piece::Linear {
                    slope: 1.0,
                    intercept: 0.0,
                },
                Piece::Constant(hi),
            ],
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b < y);
        self.pieces[k].eval(y)
    }
}

/// `(∫ f dF_n, (1/n) Σ_{i≤n} f(x_i))`: the integral against the empirical
/// measure at horizon `n`, and the running average.
pub fn empirical_expectation(
    x: &SequencePrefix,
    f: &RegulatedFn,
    n: usize,
) -> Result<(f64, f64), EmpiricalError> {
    let measure = empirical_cdf(x, n)?;
    let integral = measure.atoms().iter().map(|&(y, m)| f.eval(y) * m).sum();
    let values = x.to_reals();
    let average = values[..n].iter().map(|&y| f.eval(y)).sum::<f64>() / n as f64;
    Ok((integral, average))
}

/// `x ↦ max(x, 0)` termwise, as a real prefix.
pub fn positive_part(x: &SequencePrefix) -> SequencePrefix {
    let values = x.to_reals().into_iter().map(|v| if v > 0.0 { v } else { 0.0 }).collect();
    SequencePrefix::real(values)
        .expect("same length as a valid prefix")
        .with_provenance(x.provenance().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::{classify_countable, classify_finite, HorizonSchedule};

    fn reals(v: &[f64]) -> SequencePrefix {
        SequencePrefix::real(v.to_vec()).unwrap()
    }

    #[test]
    fn step_cdf_with_ties() {
        let x = reals(&[0.5, 0.1, 0.5, 0.9]);
        let m = empirical_cdf(&x, 4).unwrap();
        assert_eq!(m.cdf(0.0), 0.0);
        assert_eq!(m.cdf(0.1), 0.25);
        assert_eq!(m.cdf(0.5), 0.75);
        assert_eq!(m.cdf(0.7), 0.75);
        assert_eq!(m.cdf(2.0), 1.0);
        assert_eq!(m.atoms(), vec![(0.1, 0.25), (0.5, 0.5), (0.9, 0.25)]);
        assert_eq!(empirical_cdf(&x, 2).unwrap().cdf(0.2), 0.5);
        assert!(empirical_cdf(&x, 5).is_err());
        assert!(empirical_cdf(&x, 0).is_err());
    }

    #[test]
    fn finite_measure_is_exact() {
        let x = SequencePrefix::finite(3, (0..1200).map(|i| i % 3).collect()).unwrap();
        let h = HorizonSchedule::new(vec![300, 600, 1200], 0.05).unwrap();
        let v = classify_finite(&x, &h).unwrap();
        let m = empirical_measure(&x, &v).unwrap();
        match &m {
            EmpiricalMeasure::Finite { pmf, horizon } => {
                assert_eq!(*horizon, 1200);
                assert!(pmf.iter().all(|p| *p == ratio(1, 3)));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(m.total_mass(), 1.0);
    }

    #[test]
    fn countable_measure_has_a_tail() {
        let values: Vec<u64> = (0..4000).map(|i| if i % 4 == 0 { 7 } else { 1 + (i % 2) as u64 }).collect();
        let x = SequencePrefix::natural(values).unwrap();
        let h = HorizonSchedule::new(vec![500, 1000, 2000, 4000], 0.3).unwrap();
        let v = classify_countable(&x, &h).unwrap();
        assert_eq!(v.status, Status::InDomain);
        let m = empirical_measure(&x, &v).unwrap();
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
        assert!((m.cdf(100.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refuses_out_of_domain() {
        let x = SequencePrefix::natural((1..=4000).collect()).unwrap();
        let h = HorizonSchedule::default_for(4000).unwrap();
        let v = classify_countable(&x, &h).unwrap();
        assert_eq!(
            empirical_measure(&x, &v),
            Err(EmpiricalError::NotInDomain(Status::OutOfDomain))
        );
    }

    #[test]
    fn frequencies() {
        let x = SequencePrefix::natural(vec![1, 2, 3, 4, 5, 6]).unwrap();
        let evens = SetSpec::parse("{2,4,6}", ValueKind::Natural).unwrap();
        assert_eq!(frequency_count(&x, &evens, 6).unwrap(), 3);
        assert_eq!(frequency_count(&x, &evens, 3).unwrap(), 1);
        let odd = SetSpec::parse("cofinite{2,4,6}", ValueKind::Natural).unwrap();
        assert_eq!(relative_frequency(&x, &odd, 6).unwrap(), 0.5);
        let iv = SetSpec::parse("(2,4]", ValueKind::Natural).unwrap();
        assert_eq!(frequency_count(&x, &iv, 6).unwrap(), 2);
        let iv = SetSpec::parse("[-inf,1/2)", ValueKind::Real).unwrap();
        assert_eq!(
            iv,
            SetSpec::interval(Endpoint::Unbounded, Endpoint::Open(0.5))
        );
        assert_eq!(frequency_count(&x, &SetSpec::All, 6).unwrap(), 6);
        assert_eq!(frequency_count(&x, &SetSpec::Empty, 6).unwrap(), 0);
        let letters = SetSpec::parse("{0}", ValueKind::Finite).unwrap();
        assert!(frequency_count(&x, &letters, 6).is_err());
        assert!(SetSpec::parse("cofinite{1}", ValueKind::Finite).is_err());
        assert!(SetSpec::parse("<1,2>", ValueKind::Real).is_err());
        assert!(SetSpec::parse("{x}", ValueKind::Natural).is_err());
    }

    #[test]
    fn regulated_functions() {
        let f = RegulatedFn::clamp(0.0, 1.0);
        assert_eq!(f.eval(-3.0), 0.0);
        assert_eq!(f.eval(0.25), 0.25);
        assert_eq!(f.eval(9.0), 1.0);
        let g = RegulatedFn::indicator_at_most(0.5);
        assert_eq!(g.eval(0.5), 1.0);
        assert_eq!(g.eval(0.51), 0.0);
        let unbounded = RegulatedFn::new(
            vec![0.0],
            vec![
                Piece::Constant(0.0),
                Piece::Linear { slope: 1.0, intercept: 0.0 },
            ],
        );
        assert!(matches!(unbounded, Err(EmpiricalError::BadFunction(_))));
        assert!(RegulatedFn::new(vec![1.0, 0.0], vec![Piece::Constant(0.0); 3]).is_err());
        let json = r#"{"breakpoints":[0,1],"pieces":[{"constant":0},{"linear":{"slope":2,"intercept":0}},{"constant":2}]}"#;
        let h: RegulatedFn = serde_json::from_str(json).unwrap();
        assert_eq!(h.eval(0.5), 1.0);
        let bad = r#"{"pieces":[{"linear":{"slope":1,"intercept":0}}]}"#;
        assert!(serde_json::from_str::<RegulatedFn>(bad).is_err());
    }

    #[test]
    fn expectation_matches_average() {
        let x = reals(&[0.2, -1.0, 0.2, 3.0, 0.7]);
        let f = RegulatedFn::clamp(0.0, 1.0);
        let (integral, average) = empirical_expectation(&x, &f, 5).unwrap();
        assert!((integral - average).abs() < 1e-15);
        assert!((average - 2.1 / 5.0).abs() < 1e-15);
        let p = positive_part(&x);
        assert_eq!(p.reals().unwrap(), &[0.2, 0.0, 0.2, 3.0, 0.7]);
    }
}
