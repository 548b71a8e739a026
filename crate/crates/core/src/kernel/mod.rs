//! Partial stochastic kernels between finite spaces.
//!
//! A [`PartialKernel`] `f : X → Y` is a domain `D_f ⊆ X` together with a
//! probability vector over `Y` for every `x ∈ D_f`. Inputs outside the
//! domain have no row at all; they are never represented as zero rows.
//! All arithmetic is exact.
//!
//! The algebra (sequential and parallel composition, copy/delete/swap,
//! domains and the extension order) lives in the submodules and is
//! re-exported here.

mod json;
pub mod laws;
mod order;
pub mod random;
mod structure;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::rational::{self, Rational};
use crate::space::{FiniteSpace, SpaceError};

pub use json::{KernelJson, KernelJsonError};
pub use laws::{almost_surely_equal, check_positivity_instance, is_copyable};
pub use order::{chain_meet, domain_of, extends, meet_domains, DomainIdempotent};
pub use structure::{compose, copy, delete, identity, structural, swap, tensor, Structural};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("{op}: space mismatch, expected {expected:?} but found {found:?}")]
    SpaceMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },
    #[error("row {row} has {found} entries, target has {expected} elements")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row} is not a probability vector (entry {entry} = {value})")]
    NotProbability {
        row: usize,
        entry: usize,
        value: String,
    },
    #[error("row {row} sums to {sum}, expected 1 on the domain")]
    RowSum { row: usize, sum: String },
    #[error("row {row} of the substochastic matrix sums to {sum}: neither defined (1) nor undefined (0)")]
    IllFormedRow { row: usize, sum: String },
    #[error("element {element} is outside a space of size {size}")]
    OutOfRange { element: usize, size: usize },
    #[error("swap needs a product space, got {0:?}")]
    NotAProduct(String),
    #[error("chain is empty")]
    EmptyChain,
    #[error("chain is not descending at position {index}: element {index} does not extend element {next}", next = index + 1)]
    NotDescending { index: usize },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Rational(#[from] rational::ParseRationalError),
}

/// A partial Markov kernel `source → target` with exact rational rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialKernel {
    source: FiniteSpace,
    target: FiniteSpace,
    rows: BTreeMap<usize, Vec<Rational>>,
}

impl PartialKernel {
    /// Builds a kernel from the rows of its domain. Every row must be a
    /// probability vector over `target` summing exactly to one.
    pub fn new(
        source: FiniteSpace,
        target: FiniteSpace,
        rows: BTreeMap<usize, Vec<Rational>>,
    ) -> Result<Self, KernelError> {
        for (&x, row) in &rows {
            if x >= source.size() {
                return Err(KernelError::OutOfRange {
                    element: x,
                    size: source.size(),
                });
            }
            if row.len() != target.size() {
                return Err(KernelError::RowLength {
                    row: x,
                    expected: target.size(),
                    found: row.len(),
                });
            }
            if let Some((entry, v)) = row
                .iter()
                .enumerate()
                .find(|(_, v)| !rational::is_probability(v))
            {
                return Err(KernelError::NotProbability {
                    row: x,
                    entry,
                    value: rational::format(v),
                });
            }
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                return Err(KernelError::RowSum {
                    row: x,
                    sum: rational::format(&sum),
                });
            }
        }
        Ok(Self {
            source,
            target,
            rows,
        })
    }

    /// Reads a substochastic matrix (one row per source element). Rows
    /// summing to one are in the domain, all-zero rows are undefined and
    /// anything in between is rejected, since such a row would not be
    /// quasi-total.
    pub fn from_substochastic(
        source: FiniteSpace,
        target: FiniteSpace,
        matrix: Vec<Vec<Rational>>,
    ) -> Result<Self, KernelError> {
        if matrix.len() != source.size() {
            return Err(KernelError::RowLength {
                row: matrix.len(),
                expected: source.size(),
                found: matrix.len(),
            });
        }
        let mut rows = BTreeMap::new();
        for (x, row) in matrix.into_iter().enumerate() {
            if let Some((entry, v)) = row
                .iter()
                .enumerate()
                .find(|(_, v)| !rational::is_probability(v))
            {
                return Err(KernelError::NotProbability {
                    row: x,
                    entry,
                    value: rational::format(v),
                });
            }
            let sum: Rational = row.iter().sum();
            if sum.is_zero() {
                continue;
            }
            if !sum.is_one() {
                return Err(KernelError::IllFormedRow {
                    row: x,
                    sum: rational::format(&sum),
                });
            }
            rows.insert(x, row);
        }
        Self::new(source, target, rows)
    }

    /// The kernel sending each `x` in `domain` to `δ_{map(x)}`.
    pub fn deterministic(
        source: FiniteSpace,
        target: FiniteSpace,
        domain: impl IntoIterator<Item = usize>,
        map: impl Fn(usize) -> usize,
    ) -> Result<Self, KernelError> {
        let mut rows = BTreeMap::new();
        for x in domain {
            let y = map(x);
            if y >= target.size() {
                return Err(KernelError::OutOfRange {
                    element: y,
                    size: target.size(),
                });
            }
            rows.insert(x, point_mass(target.size(), y));
        }
        Self::new(source, target, rows)
    }

    /// The partial identity on `domain`.
    pub fn partial_identity(
        space: &FiniteSpace,
        domain: impl IntoIterator<Item = usize>,
    ) -> Result<Self, KernelError> {
        Self::deterministic(space.clone(), space.clone(), domain, |x| x)
    }

    /// A state `I → target`.
    pub fn state(target: FiniteSpace, probs: Vec<Rational>) -> Result<Self, KernelError> {
        Self::new(FiniteSpace::unit(), target, BTreeMap::from([(0, probs)]))
    }

    pub fn source(&self) -> &FiniteSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteSpace {
        &self.target
    }

    pub fn domain(&self) -> BTreeSet<usize> {
        self.rows.keys().copied().collect()
    }

    pub fn in_domain(&self, x: usize) -> bool {
        self.rows.contains_key(&x)
    }

    pub fn is_total(&self) -> bool {
        self.rows.len() == self.source.size()
    }

    pub fn row(&self, x: usize) -> Option<&[Rational]> {
        self.rows.get(&x).map(Vec::as_slice)
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &[Rational])> {
        self.rows.iter().map(|(&x, r)| (x, r.as_slice()))
    }

    /// `f(T | x)`, or `None` when `x` is outside the domain.
    pub fn mass(&self, x: usize, set: &BTreeSet<usize>) -> Option<Rational> {
        self.row(x)
            .map(|row| set.iter().filter_map(|&y| row.get(y)).sum())
    }

    /// Restriction of `self` to `domain ∩ D_self`.
    pub fn restrict(&self, domain: &BTreeSet<usize>) -> Self {
        Self {
            source: self.source.clone(),
            target: self.target.clone(),
            rows: self
                .rows
                .iter()
                .filter(|(x, _)| domain.contains(x))
                .map(|(&x, r)| (x, r.clone()))
                .collect(),
        }
    }

    /// Dense substochastic matrix, with zero rows outside the domain.
    pub fn to_substochastic(&self) -> Vec<Vec<Rational>> {
        self.source
            .elements()
            .map(|x| {
                self.rows
                    .get(&x)
                    .cloned()
                    .unwrap_or_else(|| vec![Rational::zero(); self.target.size()])
            })
            .collect()
    }

    pub(crate) fn from_parts_unchecked(
        source: FiniteSpace,
        target: FiniteSpace,
        rows: BTreeMap<usize, Vec<Rational>>,
    ) -> Self {
        debug_assert!(rows.values().all(|r| r.iter().sum::<Rational>().is_one()));
        Self {
            source,
            target,
            rows,
        }
    }
}

pub(crate) fn point_mass(size: usize, at: usize) -> Vec<Rational> {
    let mut row = vec![Rational::zero(); size];
    row[at] = Rational::one();
    row
}

pub(crate) fn require_same(
    op: &'static str,
    expected: &FiniteSpace,
    found: &FiniteSpace,
) -> Result<(), KernelError> {
    if expected == found {
        Ok(())
    } else {
        Err(KernelError::SpaceMismatch {
            op,
            expected: expected.label().to_string(),
            found: found.label().to_string(),
        })
    }
}
