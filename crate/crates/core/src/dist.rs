//! Built-in distributions and deterministic sequences, and the generator
//! spec that turns either into a [`SequencePrefix`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::prefix::{Provenance, SequencePrefix, ValueKind};
use crate::rational;
use crate::rng;
use crate::sequence::pick;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistError {
    #[error("unknown distribution or sequence {0:?}")]
    Unknown(String),
    #[error("{dist}: unknown parameter {param:?}")]
    UnknownParam { dist: String, param: String },
    #[error("{dist}: parameter {param} = {value} is invalid ({reason})")]
    BadParam {
        dist: String,
        param: String,
        value: String,
        reason: &'static str,
    },
    #[error("{dist}: expected at most {max} parameters, got {got}")]
    Arity { dist: String, max: usize, got: usize },
    #[error("malformed distribution {0:?}")]
    Syntax(String),
    #[error("generator length must be positive")]
    EmptyLength,
}

/// The distribution catalogue. Letters of a finite law are `0..k`;
/// the geometric law counts trials up to the first success, so its
/// support starts at 1.
#[derive(Debug, Clone, PartialEq)]
pub enum Dist {
    Constant(f64),
    Bernoulli(f64),
    Uniform01,
    Geometric(f64),
    Exponential(f64),
    Normal { mu: f64, sigma: f64 },
    Cauchy { x0: f64, gamma: f64 },
    Finite(Vec<f64>),
}

impl Dist {
    pub fn name(&self) -> &'static str {
        match self {
            Dist::Constant(_) => "constant",
            Dist::Bernoulli(_) => "bernoulli",
            Dist::Uniform01 => "uniform01",
            Dist::Geometric(_) => "geometric",
            Dist::Exponential(_) => "exponential",
            Dist::Normal { .. } => "normal",
            Dist::Cauchy { .. } => "cauchy",
            Dist::Finite(_) => "finite",
        }
    }

    /// Parameters in the order accepted by [`Dist::parse`].
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match self {
            Dist::Constant(c) => vec![("c", *c)],
            Dist::Bernoulli(p) | Dist::Geometric(p) => vec![("p", *p)],
            Dist::Uniform01 => vec![],
            Dist::Exponential(l) => vec![("lambda", *l)],
            Dist::Normal { mu, sigma } => vec![("mu", *mu), ("sigma", *sigma)],
            Dist::Cauchy { x0, gamma } => vec![("x0", *x0), ("gamma", *gamma)],
            Dist::Finite(p) => p.iter().map(|&q| ("probs", q)).collect(),
        }
    }

    /// `name` or `name(a, b, …)`, parameters as decimals or `p/q`.
    /// Example: `bernoulli(1/3)`, `normal(0, 2)`, `finite(1/4, 3/4)`.
    pub fn parse(text: &str) -> Result<Self, DistError> {
        let text = text.trim();
        let (name, args) = match text.split_once('(') {
            Some((name, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| DistError::Syntax(text.to_string()))?;
                let args = inner
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| number(s).ok_or_else(|| DistError::Syntax(text.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                (name.trim(), args)
            }
            None => (text, Vec::new()),
        };
        let arity = |max: usize| {
            if args.len() > max {
                Err(DistError::Arity {
                    dist: name.to_string(),
                    max,
                    got: args.len(),
                })
            } else {
                Ok(())
            }
        };
        let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
        let dist = match name {
            "constant" => {
                arity(1)?;
                Dist::Constant(arg(0, 0.0))
            }
            "bernoulli" => {
                arity(1)?;
                Dist::Bernoulli(arg(0, 0.5))
            }
            "uniform01" | "uniform" => {
                arity(0)?;
                Dist::Uniform01
            }
            "geometric" => {
                arity(1)?;
                Dist::Geometric(arg(0, 0.5))
            }
            "exponential" => {
                arity(1)?;
                Dist::Exponential(arg(0, 1.0))
            }
            "normal" => {
                arity(2)?;
                Dist::Normal {
                    mu: arg(0, 0.0),
                    sigma: arg(1, 1.0),
                }
            }
            "cauchy" => {
                arity(2)?;
                Dist::Cauchy {
                    x0: arg(0, 0.0),
                    gamma: arg(1, 1.0),
                }
            }
            "finite" => Dist::Finite(args),
            other => return Err(DistError::Unknown(other.to_string())),
        };
        dist.validate()
    }

    /// Builds a law from a name and a JSON parameter object.
    pub fn from_params(name: &str, params: &BTreeMap<String, Value>) -> Result<Self, DistError> {
        let allowed: &[&str] = match name {
            "constant" => &["c", "value"],
            "bernoulli" | "geometric" => &["p"],
            "uniform01" | "uniform" => &[],
            "exponential" => &["lambda", "rate"],
            "normal" => &["mu", "mean", "sigma", "sd"],
            "cauchy" => &["x0", "location", "gamma", "scale"],
            "finite" => &["probs", "p"],
            other => return Err(DistError::Unknown(other.to_string())),
        };
        if let Some(key) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(DistError::UnknownParam {
                dist: name.to_string(),
                param: key.clone(),
            });
        }
        let bad = |v: &Value| DistError::BadParam {
            dist: name.to_string(),
            param: allowed.iter().find(|k| params.get(**k) == Some(v)).unwrap_or(&"?").to_string(),
            value: v.to_string(),
            reason: "expected a number or \"p/q\"",
        };
        let get = |names: &[&str], default: f64| -> Result<f64, DistError> {
            match names.iter().find_map(|n| params.get(*n)) {
                Some(v) => json_number(v).ok_or_else(|| bad(v)),
                None => Ok(default),
            }
        };
        let dist = match name {
            "constant" => Dist::Constant(get(&["c", "value"], 0.0)?),
            "bernoulli" => Dist::Bernoulli(get(&["p"], 0.5)?),
            "geometric" => Dist::Geometric(get(&["p"], 0.5)?),
            "exponential" => Dist::Exponential(get(&["lambda", "rate"], 1.0)?),
            "normal" => Dist::Normal {
                mu: get(&["mu", "mean"], 0.0)?,
                sigma: get(&["sigma", "sd"], 1.0)?,
            },
            "cauchy" => Dist::Cauchy {
                x0: get(&["x0", "location"], 0.0)?,
                gamma: get(&["gamma", "scale"], 1.0)?,
            },
            "finite" => {
                let v = ["probs", "p"]
                    .iter()
                    .find_map(|n| params.get(*n))
                    .ok_or_else(|| DistError::Syntax("finite needs \"probs\"".into()))?;
                let items = v.as_array().ok_or_else(|| bad(v))?;
                Dist::Finite(
                    items
                        .iter()
                        .map(|item| json_number(item).ok_or_else(|| bad(item)))
                        .collect::<Result<_, _>>()?,
                )
            }
            _ => Dist::Uniform01,
        };
        dist.validate()
    }

    fn validate(self) -> Result<Self, DistError> {
        let bad = |param: &str, value: f64, reason| DistError::BadParam {
            dist: self.name().to_string(),
            param: param.to_string(),
            value: value.to_string(),
            reason,
        };
        match &self {
            Dist::Constant(c) if !c.is_finite() => return Err(bad("c", *c, "must be finite")),
            Dist::Bernoulli(p) if !(0.0..=1.0).contains(p) => {
                return Err(bad("p", *p, "must lie in [0, 1]"))
            }
            Dist::Geometric(p) if !(*p > 0.0 && *p <= 1.0) => {
                return Err(bad("p", *p, "must lie in (0, 1]"))
            }
            Dist::Exponential(l) if !(*l > 0.0 && l.is_finite()) => {
                return Err(bad("lambda", *l, "must be positive"))
            }
            Dist::Normal { mu, sigma } if !(mu.is_finite() && *sigma > 0.0 && sigma.is_finite()) => {
                return Err(bad("sigma", *sigma, "must be positive"))
            }
            Dist::Cauchy { x0, gamma } if !(x0.is_finite() && *gamma > 0.0 && gamma.is_finite()) => {
                return Err(bad("gamma", *gamma, "must be positive"))
            }
            Dist::Finite(p) => {
                if p.is_empty() {
                    return Err(bad("probs", 0.0, "needs at least one letter"));
                }
                if let Some(&q) = p.iter().find(|q| !(0.0..=1.0).contains(*q)) {
                    return Err(bad("probs", q, "must lie in [0, 1]"));
                }
                let total: f64 = p.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(bad("probs", total, "must sum to 1"));
                }
            }
            _ => {}
        }
        Ok(self)
    }

    /// The kind of value a draw produces.
    pub fn native_kind(&self) -> ValueKind {
        match self {
            Dist::Bernoulli(_) | Dist::Finite(_) => ValueKind::Finite,
            Dist::Geometric(_) => ValueKind::Natural,
            _ => ValueKind::Real,
        }
    }

    pub fn alphabet(&self) -> Option<usize> {
        match self {
            Dist::Bernoulli(_) => Some(2),
            Dist::Finite(p) => Some(p.len()),
            _ => None,
        }
    }

    /// Whether every draw lies in `[0, 1]`.
    pub fn is_bounded01(&self) -> bool {
        match self {
            Dist::Constant(c) => (0.0..=1.0).contains(c),
            Dist::Bernoulli(_) | Dist::Uniform01 => true,
            Dist::Finite(p) => p.len() <= 2,
            _ => false,
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Dist::Constant(c) => *c,
            Dist::Bernoulli(p) => f64::from(u8::from(rand_distr::Bernoulli::new(*p).expect("validated").sample(rng))),
            Dist::Uniform01 => rng.random::<f64>(),
            Dist::Geometric(p) => {
                1.0 + rand_distr::Geometric::new(*p).expect("validated").sample(rng) as f64
            }
            Dist::Exponential(l) => rand_distr::Exp::new(*l).expect("validated").sample(rng),
            Dist::Normal { mu, sigma } => {
                rand_distr::Normal::new(*mu, *sigma).expect("validated").sample(rng)
            }
            Dist::Cauchy { x0, gamma } => {
                rand_distr::Cauchy::new(*x0, *gamma).expect("validated").sample(rng)
            }
            Dist::Finite(p) => pick(rng, p) as f64,
        }
    }

    pub fn sample_n<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// `P(X ≤ t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        match self {
            Dist::Constant(c) => step(t >= *c),
            Dist::Bernoulli(p) => {
                if t < 0.0 {
                    0.0
                } else if t < 1.0 {
                    1.0 - p
                } else {
                    1.0
                }
            }
            Dist::Uniform01 => t.clamp(0.0, 1.0),
            Dist::Geometric(p) => {
                if t < 1.0 {
                    0.0
                } else {
                    1.0 - (1.0 - p).powf(t.floor())
                }
            }
            Dist::Exponential(l) => {
                if t <= 0.0 {
                    0.0
                } else {
                    -(-l * t).exp_m1()
                }
            }
            Dist::Normal { mu, sigma } => {
                0.5 * statrs::function::erf::erfc(-(t - mu) / (sigma * std::f64::consts::SQRT_2))
            }
            Dist::Cauchy { x0, gamma } => 0.5 + ((t - x0) / gamma).atan() / PI,
            Dist::Finite(p) => {
                if t < 0.0 {
                    0.0
                } else {
                    let k = (t.floor() as usize).min(p.len() - 1);
                    p[..=k].iter().sum::<f64>().min(1.0)
                }
            }
        }
    }

    /// `P(X < t)`.
    pub fn cdf_left(&self, t: f64) -> f64 {
        match self {
            Dist::Constant(c) => step(t > *c),
            Dist::Bernoulli(p) => {
                if t <= 0.0 {
                    0.0
                } else if t <= 1.0 {
                    1.0 - p
                } else {
                    1.0
                }
            }
            Dist::Geometric(p) => {
                let below = t.ceil() - 1.0;
                if below < 1.0 {
                    0.0
                } else {
                    1.0 - (1.0 - p).powf(below)
                }
            }
            Dist::Finite(p) => {
                let below = t.ceil() - 1.0;
                if below < 0.0 {
                    0.0
                } else {
                    let k = (below as usize).min(p.len() - 1);
                    p[..=k].iter().sum::<f64>().min(1.0)
                }
            }
            _ => self.cdf(t),
        }
    }

    /// `E[X]`, or `None` when the first moment is infinite or undefined.
    pub fn mean(&self) -> Option<f64> {
        match self {
            Dist::Constant(c) => Some(*c),
            Dist::Bernoulli(p) => Some(*p),
            Dist::Uniform01 => Some(0.5),
            Dist::Geometric(p) => Some(1.0 / p),
            Dist::Exponential(l) => Some(1.0 / l),
            Dist::Normal { mu, .. } => Some(*mu),
            Dist::Cauchy { .. } => None,
            Dist::Finite(p) => Some(p.iter().enumerate().map(|(i, q)| i as f64 * q).sum()),
        }
    }

    pub fn variance(&self) -> Option<f64> {
        match self {
            Dist::Constant(_) => Some(0.0),
            Dist::Bernoulli(p) => Some(p * (1.0 - p)),
            Dist::Uniform01 => Some(1.0 / 12.0),
            Dist::Geometric(p) => Some((1.0 - p) / (p * p)),
            Dist::Exponential(l) => Some(1.0 / (l * l)),
            Dist::Normal { sigma, .. } => Some(sigma * sigma),
            Dist::Cauchy { .. } => None,
            Dist::Finite(p) => {
                let m = self.mean()?;
                Some(p.iter().enumerate().map(|(i, q)| (i as f64 - m).powi(2) * q).sum())
            }
        }
    }

    /// A prefix of `n` IID draws, kept in the law's native kind.
    pub fn prefix<R: Rng>(&self, rng: &mut R, n: usize) -> SequencePrefix {
        let draws = self.sample_n(rng, n);
        match self.native_kind() {
            ValueKind::Finite => SequencePrefix::finite(
                self.alphabet().expect("finite laws have an alphabet"),
                draws.iter().map(|&v| v as usize).collect(),
            ),
            ValueKind::Natural => SequencePrefix::natural(draws.iter().map(|&v| v as u64).collect()),
            ValueKind::Real => SequencePrefix::real(draws),
        }
        .expect("draws are valid and n > 0")
    }
}

impl std::fmt::Display for Dist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let params = self.params();
        if params.is_empty() {
            return write!(f, "{}", self.name());
        }
        let args: Vec<String> = params.iter().map(|(_, v)| v.to_string()).collect();
        write!(f, "{}({})", self.name(), args.join(","))
    }
}

fn step(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn number(s: &str) -> Option<f64> {
    if s.contains('/') {
        rational::parse(s).ok().map(|r| rational::to_f64(&r))
    } else {
        s.parse().ok()
    }
}

fn json_number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => number(s),
        _ => None,
    }
}

/// Deterministic sequences with known empirical behaviour. Indices start
/// at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedSequence {
    /// `1, 2, 3, …` in ℕ.
    Naturals,
    /// `1, 1/2, 1/3, …` in ℝ.
    Harmonic,
    /// `−1, −1/2, −1/3, …` in ℝ.
    NegHarmonic,
    /// `x_i = 0` iff `⌈log₂ i⌉` is even, over `{0, 1}`.
    Log2Oscillating,
    /// `x_n = n + 1` when `n` is a power of two, else `1`, in ℕ.
    Escaping,
    /// `0, 1, 0, 1, …` over `{0, 1}`.
    Alternating,
}

impl NamedSequence {
    pub const ALL: [NamedSequence; 6] = [
        NamedSequence::Naturals,
        NamedSequence::Harmonic,
        NamedSequence::NegHarmonic,
        NamedSequence::Log2Oscillating,
        NamedSequence::Escaping,
        NamedSequence::Alternating,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedSequence::Naturals => "naturals",
            NamedSequence::Harmonic => "harmonic",
            NamedSequence::NegHarmonic => "neg_harmonic",
            NamedSequence::Log2Oscillating => "log2_oscillating",
            NamedSequence::Escaping => "escaping",
            NamedSequence::Alternating => "alternating",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn prefix(self, n: usize) -> Result<SequencePrefix, DistError> {
        if n == 0 {
            return Err(DistError::EmptyLength);
        }
        let idx = 1..=n as u64;
        let prefix = match self {
            NamedSequence::Naturals => SequencePrefix::natural(idx.collect()),
            NamedSequence::Harmonic => SequencePrefix::real(idx.map(|i| 1.0 / i as f64).collect()),
            NamedSequence::NegHarmonic => {
                SequencePrefix::real(idx.map(|i| -1.0 / i as f64).collect())
            }
            NamedSequence::Log2Oscillating => SequencePrefix::finite(
                2,
                idx.map(|i| usize::from(ceil_log2(i) % 2 == 1)).collect(),
            ),
            NamedSequence::Escaping => SequencePrefix::natural(
                idx.map(|i| if i.is_power_of_two() { i + 1 } else { 1 })
                    .collect(),
            ),
            NamedSequence::Alternating => {
                SequencePrefix::finite(2, idx.map(|i| ((i - 1) % 2) as usize).collect())
            }
        }
        .expect("named sequences are valid");
        Ok(prefix.with_provenance(Provenance::Named {
            name: self.name().to_string(),
        }))
    }
}

fn ceil_log2(i: u64) -> u32 {
    u64::BITS - (i - 1).leading_zeros()
}

/// `{"dist": name, "params": {...}, "seed": s, "n": N}`. The name may be
/// a catalogue law or a named deterministic sequence (which ignores the
/// seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub dist: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub seed: u64,
    pub n: usize,
}

pub enum Source {
    Random(Dist),
    Named(NamedSequence),
}

impl GeneratorSpec {
    pub fn source(&self) -> Result<Source, DistError> {
        if let Some(named) = NamedSequence::from_name(&self.dist) {
            if let Some(param) = self.params.keys().next() {
                return Err(DistError::UnknownParam {
                    dist: self.dist.clone(),
                    param: param.clone(),
                });
            }
            return Ok(Source::Named(named));
        }
        Dist::from_params(&self.dist, &self.params).map(Source::Random)
    }

    /// Draws from stream 0 of the seed.
    pub fn generate(&self) -> Result<SequencePrefix, DistError> {
        if self.n == 0 {
            return Err(DistError::EmptyLength);
        }
        match self.source()? {
            Source::Named(named) => named.prefix(self.n),
            Source::Random(dist) => {
                let mut rng = rng::stream(self.seed, 0);
                Ok(dist
                    .prefix(&mut rng, self.n)
                    .with_provenance(Provenance::Generator(self.clone())))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(Dist::parse("uniform01").unwrap(), Dist::Uniform01);
        assert_eq!(Dist::parse("bernoulli(1/4)").unwrap(), Dist::Bernoulli(0.25));
        assert_eq!(
            Dist::parse("normal(1, 2)").unwrap(),
            Dist::Normal { mu: 1.0, sigma: 2.0 }
        );
        assert!(Dist::parse("bernoulli(2)").is_err());
        assert!(Dist::parse("bernoulli(1,2)").is_err());
        assert!(Dist::parse("finite(1/3, 1/3)").is_err());
        assert!(Dist::parse("poisson").is_err());
        assert!(Dist::parse("normal(1").is_err());
    }

    #[test]
    fn params_object() {
        let p: BTreeMap<String, Value> =
            serde_json::from_str(r#"{"rate": 2}"#).unwrap();
        assert_eq!(Dist::from_params("exponential", &p).unwrap(), Dist::Exponential(2.0));
        let f: BTreeMap<String, Value> =
            serde_json::from_str(r#"{"probs": ["1/4", 0.75]}"#).unwrap();
        assert_eq!(Dist::from_params("finite", &f).unwrap(), Dist::Finite(vec![0.25, 0.75]));
        let bad: BTreeMap<String, Value> = serde_json::from_str(r#"{"q": 1}"#).unwrap();
        assert!(Dist::from_params("bernoulli", &bad).is_err());
    }

    #[test]
    fn cdfs_at_atoms() {
        let g = Dist::Geometric(0.5);
        assert_eq!(g.cdf(1.0), 0.5);
        assert_eq!(g.cdf_left(1.0), 0.0);
        assert_eq!(g.cdf_left(2.0), 0.5);
        assert_eq!(g.cdf(2.5), 0.75);
        let b = Dist::Bernoulli(0.25);
        assert_eq!(b.cdf(0.0), 0.75);
        assert_eq!(b.cdf_left(0.0), 0.0);
        assert_eq!(b.cdf_left(1.0), 0.75);
        let c = Dist::Constant(2.0);
        assert_eq!((c.cdf_left(2.0), c.cdf(2.0)), (0.0, 1.0));
        let f = Dist::Finite(vec![0.5, 0.25, 0.25]);
        assert_eq!((f.cdf(1.0), f.cdf_left(1.0), f.cdf(7.0)), (0.75, 0.5, 1.0));
    }

    #[test]
    fn continuous_cdfs() {
        let n = Dist::Normal { mu: 0.0, sigma: 1.0 };
        assert!((n.cdf(0.0) - 0.5).abs() < 1e-15);
        let q = n.cdf(1.959963984540054);
        assert!((q - 0.975).abs() < 1e-10, "{q}");
        let c = Dist::Cauchy { x0: 0.0, gamma: 1.0 };
        assert!((c.cdf(1.0) - 0.75).abs() < 1e-15);
        assert!((Dist::Exponential(1.0).cdf(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(c.mean(), None);
    }

    #[test]
    fn sample_means() {
        let mut rng = rng::stream(5, 0);
        for (d, tol) in [
            (Dist::Exponential(2.0), 0.01),
            (Dist::Geometric(0.25), 0.05),
            (Dist::Bernoulli(0.3), 0.01),
            (Dist::Normal { mu: -1.0, sigma: 2.0 }, 0.03),
            (Dist::Finite(vec![0.2, 0.3, 0.5]), 0.02),
        ] {
            let xs = d.sample_n(&mut rng, 100_000);
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            assert!((m - d.mean().unwrap()).abs() < tol, "{d}: {m}");
        }
        assert!(Dist::Geometric(0.5).sample_n(&mut rng, 1000).iter().all(|&v| v >= 1.0));
    }

    #[test]
    fn named_sequences() {
        let log2 = NamedSequence::Log2Oscillating.prefix(9).unwrap();
        // ⌈log₂ i⌉ for i = 1..9: 0 1 2 2 3 3 3 3 4.
        assert_eq!(log2.letters().unwrap().1, &[0, 1, 0, 0, 1, 1, 1, 1, 0]);
        let esc = NamedSequence::Escaping.prefix(8).unwrap();
        assert_eq!(esc.naturals().unwrap(), &[2, 3, 1, 5, 1, 1, 1, 9]);
        let alt = NamedSequence::Alternating.prefix(3).unwrap();
        assert_eq!(alt.letters().unwrap().1, &[0, 1, 0]);
        assert_eq!(NamedSequence::NegHarmonic.prefix(2).unwrap().reals().unwrap(), &[-1.0, -0.5]);
    }

    #[test]
    fn generator_spec() {
        let spec: GeneratorSpec =
            serde_json::from_str(r#"{"dist":"uniform01","seed":7,"n":10}"#).unwrap();
        let a = spec.generate().unwrap();
        assert_eq!(a, spec.generate().unwrap());
        assert_eq!(a.len(), 10);
        let named: GeneratorSpec = serde_json::from_str(r#"{"dist":"naturals","n":3}"#).unwrap();
        assert_eq!(named.generate().unwrap().naturals().unwrap(), &[1, 2, 3]);
        assert!(serde_json::from_str::<GeneratorSpec>(r#"{"dist":"x","n":1,"extra":1}"#).is_err());
        let b: GeneratorSpec =
            serde_json::from_str(r#"{"dist":"bernoulli","params":{"p":"1/3"},"n":5}"#).unwrap();
        assert_eq!(b.generate().unwrap().letters().unwrap().0, 2);
    }
}
