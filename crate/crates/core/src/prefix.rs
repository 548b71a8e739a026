//! Finite prefixes of concrete sequences, with where they came from.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::dist::GeneratorSpec;
use crate::rational;
use crate::sequence::FinitePermutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Finite,
    Natural,
    Real,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::Finite => "finite",
            ValueKind::Natural => "natural",
            ValueKind::Real => "real",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    /// Letters `0..alphabet`.
    Finite { alphabet: usize, values: Vec<usize> },
    /// Naturals, starting at 1.
    Natural(Vec<u64>),
    Real(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum Provenance {
    File { path: String },
    Generator(GeneratorSpec),
    Named { name: String },
    Inline,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PrefixError {
    #[error("a sequence prefix needs at least one term")]
    Empty,
    #[error("letter {value} at position {position} is outside an alphabet of size {alphabet}")]
    Letter {
        position: usize,
        value: usize,
        alphabet: usize,
    },
    #[error("natural numbers start at 1, found 0 at position {position}")]
    ZeroNatural { position: usize },
    #[error("non-finite real at position {position}")]
    NonFinite { position: usize },
    #[error("line {line}: {reason} ({value:?})")]
    Parse {
        line: u64,
        value: String,
        reason: String,
    },
    #[error("cannot read {from} values as {to}")]
    Convert {
        from: &'static str,
        to: &'static str,
    },
    #[error("horizon {n} is outside 1..={len}")]
    Horizon { n: usize, len: usize },
    #[error("permutation of length {k} exceeds the prefix length {len}")]
    PermutationTooLong { k: usize, len: usize },
    #[error("reading input: {0}")]
    Io(String),
}

/// The first `N ≥ 1` terms of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequencePrefix {
    values: Values,
    provenance: Provenance,
}

impl SequencePrefix {
    pub fn finite(alphabet: usize, values: Vec<usize>) -> Result<Self, PrefixError> {
        if values.is_empty() {
            return Err(PrefixError::Empty);
        }
        if let Some((position, &value)) = values.iter().enumerate().find(|(_, &v)| v >= alphabet) {
            return Err(PrefixError::Letter {
                position,
                value,
                alphabet,
            });
        }
        Ok(Self::unchecked(Values::Finite { alphabet, values }))
    }

    pub fn natural(values: Vec<u64>) -> Result<Self, PrefixError> {
        if values.is_empty() {
            return Err(PrefixError::Empty);
        }
        if let Some(position) = values.iter().position(|&v| v == 0) {
            return Err(PrefixError::ZeroNatural { position });
        }
        Ok(Self::unchecked(Values::Natural(values)))
    }

    pub fn real(values: Vec<f64>) -> Result<Self, PrefixError> {
        if values.is_empty() {
            return Err(PrefixError::Empty);
        }
        if let Some(position) = values.iter().position(|v| !v.is_finite()) {
            return Err(PrefixError::NonFinite { position });
        }
        Ok(Self::unchecked(Values::Real(values)))
    }

    fn unchecked(values: Values) -> Self {
        Self {
            values,
            provenance: Provenance::Inline,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn kind(&self) -> ValueKind {
        match self.values {
            Values::Finite { .. } => ValueKind::Finite,
            Values::Natural(_) => ValueKind::Natural,
            Values::Real(_) => ValueKind::Real,
        }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            Values::Finite { values, .. } => values.len(),
            Values::Natural(v) => v.len(),
            Values::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn letters(&self) -> Option<(usize, &[usize])> {
        match &self.values {
            Values::Finite { alphabet, values } => Some((*alphabet, values)),
            _ => None,
        }
    }

    pub fn naturals(&self) -> Option<&[u64]> {
        match &self.values {
            Values::Natural(v) => Some(v),
            _ => None,
        }
    }

    pub fn reals(&self) -> Option<&[f64]> {
        match &self.values {
            Values::Real(v) => Some(v),
            _ => None,
        }
    }

    /// Every kind embeds into ℝ; letters map to their index.
    pub fn to_reals(&self) -> Vec<f64> {
        match &self.values {
            Values::Finite { values, .. } => values.iter().map(|&v| v as f64).collect(),
            Values::Natural(v) => v.iter().map(|&v| v as f64).collect(),
            Values::Real(v) => v.clone(),
        }
    }

    /// Reads the same terms as another kind when every term fits:
    /// reals that are integers become naturals or letters, and letters
    /// and naturals embed into ℝ.
    pub fn reinterpret(&self, kind: ValueKind, alphabet: Option<usize>) -> Result<Self, PrefixError> {
        let convert = || PrefixError::Convert {
            from: self.kind().as_str(),
            to: kind.as_str(),
        };
        let out = match kind {
            ValueKind::Real => Self::real(self.to_reals())?,
            ValueKind::Natural => {
                let reals = self.to_reals();
                if reals.iter().any(|v| v.fract() != 0.0 || *v < 1.0 || *v > 2f64.powi(53)) {
                    return Err(convert());
                }
                Self::natural(reals.iter().map(|&v| v as u64).collect())?
            }
            ValueKind::Finite => {
                let reals = self.to_reals();
                if reals.iter().any(|v| v.fract() != 0.0 || *v < 0.0 || *v > 2f64.powi(32)) {
                    return Err(convert());
                }
                let values: Vec<usize> = reals.iter().map(|&v| v as usize).collect();
                let size = alphabet
                    .or(self.letters().map(|(a, _)| a))
                    .unwrap_or_else(|| values.iter().max().map_or(1, |m| m + 1));
                Self::finite(size, values)?
            }
        };
        Ok(out.with_provenance(self.provenance.clone()))
    }

    /// The first `n` terms.
    pub fn truncated(&self, n: usize) -> Result<Self, PrefixError> {
        if n == 0 || n > self.len() {
            return Err(PrefixError::Horizon { n, len: self.len() });
        }
        let values = match &self.values {
            Values::Finite { alphabet, values } => Values::Finite {
                alphabet: *alphabet,
                values: values[..n].to_vec(),
            },
            Values::Natural(v) => Values::Natural(v[..n].to_vec()),
            Values::Real(v) => Values::Real(v[..n].to_vec()),
        };
        Ok(Self {
            values,
            provenance: self.provenance.clone(),
        })
    }

    /// Applies `σ` to the first `σ.len()` terms and keeps the rest.
    pub fn permute_head(&self, sigma: &FinitePermutation) -> Result<Self, PrefixError> {
        let k = sigma.len();
        if k > self.len() {
            return Err(PrefixError::PermutationTooLong { k, len: self.len() });
        }
        fn head<T: Clone>(v: &[T], s: &FinitePermutation) -> Vec<T> {
            let mut out = s.apply(&v[..s.len()]);
            out.extend_from_slice(&v[s.len()..]);
            out
        }
        let values = match &self.values {
            Values::Finite { alphabet, values } => Values::Finite {
                alphabet: *alphabet,
                values: head(values, sigma),
            },
            Values::Natural(v) => Values::Natural(head(v, sigma)),
            Values::Real(v) => Values::Real(head(v, sigma)),
        };
        Ok(Self {
            values,
            provenance: self.provenance.clone(),
        })
    }

    /// Reads a one-column CSV: one value per line. Blank lines and lines starting with `#`
    /// are skipped. Letters are non-negative indices; when `alphabet` is
    /// not given it is one more than the largest letter. Reals may also be
    /// written as `p/q`.
    pub fn read_csv<R: Read>(
        reader: R,
        kind: ValueKind,
        alphabet: Option<usize>,
    ) -> Result<Self, PrefixError> {
        let mut text = String::new();
        let mut reader = reader;
        reader
            .read_to_string(&mut text)
            .map_err(|e| PrefixError::Io(e.to_string()))?;
        let mut raw: Vec<(u64, String)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i as u64 + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if fields.len() != 1 {
                return Err(PrefixError::Parse {
                    line: line_no,
                    value: trimmed.to_string(),
                    reason: format!("expected one value per line, found {}", fields.len()),
                });
            }
            raw.push((line_no, fields[0].to_string()));
        }
        let bad = |line: u64, value: &str, reason: &str| PrefixError::Parse {
            line,
            value: value.to_string(),
            reason: reason.to_string(),
        };
        match kind {
            ValueKind::Finite => {
                let mut values = Vec::with_capacity(raw.len());
                for (line, s) in &raw {
                    let v: usize = s
                        .parse()
                        .map_err(|_| bad(*line, s, "expected a letter index"))?;
                    if alphabet.is_some_and(|a| v >= a) {
                        return Err(bad(*line, s, "letter outside the alphabet"));
                    }
                    values.push(v);
                }
                let size = alphabet.unwrap_or_else(|| values.iter().max().map_or(1, |m| m + 1));
                Self::finite(size, values)
            }
            ValueKind::Natural => {
                let mut values = Vec::with_capacity(raw.len());
                for (line, s) in &raw {
                    let v: u64 = s
                        .parse()
                        .map_err(|_| bad(*line, s, "expected a natural number"))?;
                    if v == 0 {
                        return Err(bad(*line, s, "natural numbers start at 1"));
                    }
                    values.push(v);
                }
                Self::natural(values)
            }
            ValueKind::Real => {
                let mut values = Vec::with_capacity(raw.len());
                for (line, s) in &raw {
                    let v = parse_real(s).ok_or_else(|| bad(*line, s, "expected a finite real"))?;
                    values.push(v);
                }
                Self::real(values)
            }
        }
    }
}

fn parse_real(s: &str) -> Option<f64> {
    let v = if s.contains('/') {
        rational::to_f64(&rational::parse(s).ok()?)
    } else {
        s.parse::<f64>().ok()?
    };
    v.is_finite().then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants() {
        assert_eq!(SequencePrefix::real(vec![]), Err(PrefixError::Empty));
        assert!(SequencePrefix::finite(2, vec![0, 2]).is_err());
        assert!(SequencePrefix::natural(vec![1, 0]).is_err());
        assert!(SequencePrefix::real(vec![f64::NAN]).is_err());
    }

    #[test]
    fn csv_reports_line_numbers() {
        let text = "1\n2\n\n# note\nx\n";
        let err = SequencePrefix::read_csv(text.as_bytes(), ValueKind::Natural, None).unwrap_err();
        match err {
            PrefixError::Parse { line, value, .. } => {
                assert_eq!(line, 5);
                assert_eq!(value, "x");
            }
            other => panic!("{other:?}"),
        }
        let two = SequencePrefix::read_csv("1,2\n".as_bytes(), ValueKind::Real, None).unwrap_err();
        assert!(matches!(two, PrefixError::Parse { line: 1, .. }));
    }

    #[test]
    fn csv_values() {
        let x = SequencePrefix::read_csv("1/2\n-3\n 0.25 \n".as_bytes(), ValueKind::Real, None)
            .unwrap();
        assert_eq!(x.reals().unwrap(), &[0.5, -3.0, 0.25]);
        let f = SequencePrefix::read_csv("0\n2\n".as_bytes(), ValueKind::Finite, None).unwrap();
        assert_eq!(f.letters().unwrap(), (3, &[0, 2][..]));
        assert!(SequencePrefix::read_csv("0\n2\n".as_bytes(), ValueKind::Finite, Some(2)).is_err());
        assert!(SequencePrefix::read_csv("".as_bytes(), ValueKind::Real, None).is_err());
    }

    #[test]
    fn reinterpret_and_head_permutation() {
        let x = SequencePrefix::real(vec![1.0, 2.0, 3.0]).unwrap();
        let n = x.reinterpret(ValueKind::Natural, None).unwrap();
        assert_eq!(n.naturals().unwrap(), &[1, 2, 3]);
        assert!(SequencePrefix::real(vec![0.5])
            .unwrap()
            .reinterpret(ValueKind::Natural, None)
            .is_err());
        let s = FinitePermutation::new(vec![1, 0]).unwrap();
        assert_eq!(n.permute_head(&s).unwrap().naturals().unwrap(), &[2, 1, 3]);
        assert_eq!(n.truncated(2).unwrap().len(), 2);
    }
}
