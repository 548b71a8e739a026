//! Finite truncations of sequence spaces: cylinder states on words of a
//! fixed length, coordinate permutations, IID powers and finite mixtures.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::prefix::SequencePrefix;
use crate::rational::{self, ratio, Rational};

pub type Word = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SequenceError {
    #[error("length {found} does not match {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("marginal length {k} must lie in 1..={n}")]
    MarginalRange { k: usize, n: usize },
    #[error("word length must be positive")]
    EmptyWord,
    #[error("letter {letter} is outside an alphabet of size {alphabet}")]
    Letter { letter: usize, alphabet: usize },
    #[error("probabilities sum to {0}, expected 1")]
    Sum(String),
    #[error("probability {0} is outside [0, 1]")]
    NotProbability(String),
    #[error("{0:?} is not a permutation of 0..n")]
    NotAPermutation(Vec<usize>),
    #[error("mixture has {weights} weights for {components} components")]
    ComponentCount { weights: usize, components: usize },
    #[error("word length {m} exceeds horizon {n}")]
    WordTooLong { m: usize, n: usize },
    #[error("horizon {n} exceeds prefix length {len}")]
    HorizonTooLong { n: usize, len: usize },
    #[error("resampling needs a finite-alphabet prefix")]
    NotFinite,
    #[error("{words} words exceed the enumeration limit {limit}")]
    TooManyWords { words: u128, limit: u128 },
}

/// Largest support a cylinder state may be expanded to.
pub const WORD_LIMIT: u128 = 10_000_000;

/// A probability measure on words of length `n` over `0..alphabet`,
/// stored sparsely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderState {
    alphabet: usize,
    n: usize,
    pmf: BTreeMap<Word, Rational>,
}

impl CylinderState {
    pub fn new(
        alphabet: usize,
        n: usize,
        pmf: impl IntoIterator<Item = (Word, Rational)>,
    ) -> Result<Self, SequenceError> {
        if n == 0 {
            return Err(SequenceError::EmptyWord);
        }
        let mut out: BTreeMap<Word, Rational> = BTreeMap::new();
        for (w, p) in pmf {
            if w.len() != n {
                return Err(SequenceError::LengthMismatch {
                    expected: n,
                    found: w.len(),
                });
            }
            if let Some(&letter) = w.iter().find(|&&a| a >= alphabet) {
                return Err(SequenceError::Letter { letter, alphabet });
            }
            if !rational::is_probability(&p) {
                return Err(SequenceError::NotProbability(rational::format(&p)));
            }
            if !p.is_zero() {
                *out.entry(w).or_insert_with(Rational::zero) += p;
            }
        }
        let total: Rational = out.values().sum();
        if !total.is_one() {
            return Err(SequenceError::Sum(rational::format(&total)));
        }
        Ok(Self {
            alphabet,
            n,
            pmf: out,
        })
    }

    pub fn point_mass(alphabet: usize, word: Word) -> Result<Self, SequenceError> {
        let n = word.len();
        Self::new(alphabet, n, [(word, Rational::one())])
    }

    fn from_sparse(alphabet: usize, n: usize, mut pmf: BTreeMap<Word, Rational>) -> Self {
        pmf.retain(|_, p| !p.is_zero());
        debug_assert!(pmf.values().sum::<Rational>().is_one());
        Self { alphabet, n, pmf }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn pmf(&self) -> &BTreeMap<Word, Rational> {
        &self.pmf
    }

    pub fn prob(&self, word: &[usize]) -> Rational {
        self.pmf.get(word).cloned().unwrap_or_else(Rational::zero)
    }

    /// Law of the first `k` coordinates.
    pub fn marginal(&self, k: usize) -> Result<Self, SequenceError> {
        if k == 0 || k > self.n {
            return Err(SequenceError::MarginalRange { k, n: self.n });
        }
        let mut out: BTreeMap<Word, Rational> = BTreeMap::new();
        for (w, p) in &self.pmf {
            *out.entry(w[..k].to_vec()).or_insert_with(Rational::zero) += p;
        }
        Ok(Self::from_sparse(self.alphabet, k, out))
    }

    /// Pushforward along `X^σ`: output coordinate `j` reads input
    /// coordinate `σ(j)`, so the `i`-th input lands at output `σ⁻¹(i)`.
    /// With this convention `X^σ ∘ X^τ = X^{τ∘σ}`.
    pub fn permute(&self, sigma: &FinitePermutation) -> Result<Self, SequenceError> {
        if sigma.len() != self.n {
            return Err(SequenceError::LengthMismatch {
                expected: self.n,
                found: sigma.len(),
            });
        }
        let pmf = self
            .pmf
            .iter()
            .map(|(w, p)| (sigma.apply(w), p.clone()))
            .collect();
        Ok(Self::from_sparse(self.alphabet, self.n, pmf))
    }

    /// Invariance under every adjacent transposition, which generate `S_n`.
    pub fn is_exchangeable(&self) -> bool {
        (0..self.n.saturating_sub(1)).all(|i| {
            let t = FinitePermutation::transposition(self.n, i, i + 1);
            self.permute(&t).expect("same length") == *self
        })
    }

    pub fn total_variation(&self, other: &Self) -> Rational {
        rational::total_variation(&self.pmf, &other.pmf)
    }

    fn mix(alphabet: usize, n: usize, parts: impl IntoIterator<Item = (Rational, Self)>) -> Self {
        let mut out: BTreeMap<Word, Rational> = BTreeMap::new();
        for (w, state) in parts {
            if w.is_zero() {
                continue;
            }
            for (word, p) in state.pmf {
                *out.entry(word).or_insert_with(Rational::zero) += &w * p;
            }
        }
        Self::from_sparse(alphabet, n, out)
    }
}

/// A bijection of `0..n`, applied to words by `X^σ` (see
/// [`CylinderState::permute`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FinitePermutation {
    images: Vec<usize>,
}

impl FinitePermutation {
    /// `images[j] = σ(j)`, zero-based.
    pub fn new(images: Vec<usize>) -> Result<Self, SequenceError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(SequenceError::NotAPermutation(images));
            }
        }
        Ok(Self { images })
    }

    /// One-based images, as a permutation of `{1..n}`.
    pub fn from_one_based(images: &[usize]) -> Result<Self, SequenceError> {
        let zero: Option<Vec<usize>> = images.iter().map(|i| i.checked_sub(1)).collect();
        Self::new(zero.ok_or_else(|| SequenceError::NotAPermutation(images.to_vec()))?)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Self { images }
    }

    pub fn random<R: Rng>(rng: &mut R, n: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(rng);
        Self { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image(&self, j: usize) -> usize {
        self.images[j]
    }

    /// `self ∘ other`, i.e. `j ↦ self(other(j))`.
    pub fn after(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "permutations of different lengths");
        Self {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (j, &i) in self.images.iter().enumerate() {
            inv[i] = j;
        }
        Self { images: inv }
    }

    /// `(w_{σ(0)}, …, w_{σ(n−1)})`.
    pub fn apply<T: Clone>(&self, word: &[T]) -> Vec<T> {
        self.images.iter().map(|&i| word[i].clone()).collect()
    }
}

impl TryFrom<Vec<usize>> for FinitePermutation {
    type Error = SequenceError;

    fn try_from(v: Vec<usize>) -> Result<Self, SequenceError> {
        Self::new(v)
    }
}

impl From<FinitePermutation> for Vec<usize> {
    fn from(p: FinitePermutation) -> Self {
        p.images
    }
}

fn check_probability_vector(p: &[Rational]) -> Result<(), SequenceError> {
    if let Some(bad) = p.iter().find(|v| !rational::is_probability(v)) {
        return Err(SequenceError::NotProbability(rational::format(bad)));
    }
    let total: Rational = p.iter().sum();
    if !total.is_one() {
        return Err(SequenceError::Sum(rational::format(&total)));
    }
    Ok(())
}

/// Number of words with positive probability under an IID law with
/// support size `support`, used to refuse oversized expansions.
fn check_word_count(support: usize, n: usize) -> Result<(), SequenceError> {
    let words = (support as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if words > WORD_LIMIT {
        return Err(SequenceError::TooManyWords {
            words,
            limit: WORD_LIMIT,
        });
    }
    Ok(())
}

/// `p ⊗ … ⊗ p` on words of length `n`.
pub fn iid_truncation(p: &[Rational], n: usize) -> Result<CylinderState, SequenceError> {
    check_probability_vector(p)?;
    if n == 0 {
        return Err(SequenceError::EmptyWord);
    }
    let support: Vec<usize> = (0..p.len()).filter(|&a| !p[a].is_zero()).collect();
    check_word_count(support.len(), n)?;
    let mut layer: BTreeMap<Word, Rational> = BTreeMap::from([(Vec::new(), Rational::one())]);
    for _ in 0..n {
        let mut next = BTreeMap::new();
        for (w, q) in &layer {
            for &a in &support {
                let mut longer = w.clone();
                longer.push(a);
                next.insert(longer, q * &p[a]);
            }
        }
        layer = next;
    }
    Ok(CylinderState::from_sparse(p.len(), n, layer))
}

/// A finite mixture of IID laws on `0..alphabet`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MixtureRepr", into = "MixtureRepr")]
pub struct MixtureModel {
    alphabet: usize,
    weights: Vec<Rational>,
    components: Vec<Vec<Rational>>,
}

impl MixtureModel {
    pub fn new(
        alphabet: usize,
        weights: Vec<Rational>,
        components: Vec<Vec<Rational>>,
    ) -> Result<Self, SequenceError> {
        if weights.len() != components.len() || weights.is_empty() {
            return Err(SequenceError::ComponentCount {
                weights: weights.len(),
                components: components.len(),
            });
        }
        check_probability_vector(&weights)?;
        for c in &components {
            if c.len() != alphabet {
                return Err(SequenceError::LengthMismatch {
                    expected: alphabet,
                    found: c.len(),
                });
            }
            check_probability_vector(c)?;
        }
        Ok(Self {
            alphabet,
            weights,
            components,
        })
    }

    pub fn iid(p: Vec<Rational>) -> Result<Self, SequenceError> {
        Self::new(p.len(), vec![Rational::one()], vec![p])
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn components(&self) -> &[Vec<Rational>] {
        &self.components
    }

    /// Every component is a point mass, so sampled sequences are constant.
    pub fn is_point_mass_mixture(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.iter().filter(|p| !p.is_zero()).count() == 1)
    }

    /// Draws a component by weight, then `len` IID letters from it.
    pub fn sample<R: Rng>(&self, rng: &mut R, len: usize) -> Vec<usize> {
        let weights: Vec<f64> = self.weights.iter().map(rational::to_f64).collect();
        let j = pick(rng, &weights);
        let comp: Vec<f64> = self.components[j].iter().map(rational::to_f64).collect();
        (0..len).map(|_| pick(rng, &comp)).collect()
    }
}

/// Inverse-transform draw from a finite pmf given as floats.
pub(crate) fn pick<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

#[derive(Serialize, Deserialize)]
struct MixtureRepr {
    alphabet: usize,
    #[serde(with = "rational::serde_rational::vec")]
    weights: Vec<Rational>,
    components: Vec<RationalVec>,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RationalVec(#[serde(with = "rational::serde_rational::vec")] Vec<Rational>);

impl TryFrom<MixtureRepr> for MixtureModel {
    type Error = SequenceError;

    fn try_from(r: MixtureRepr) -> Result<Self, SequenceError> {
        Self::new(
            r.alphabet,
            r.weights,
            r.components.into_iter().map(|c| c.0).collect(),
        )
    }
}

impl From<MixtureModel> for MixtureRepr {
    fn from(m: MixtureModel) -> Self {
        Self {
            alphabet: m.alphabet,
            weights: m.weights,
            components: m.components.into_iter().map(RationalVec).collect(),
        }
    }
}

/// `Σ_j w_j · p_j^{⊗n}`.
pub fn mixture_state(model: &MixtureModel, n: usize) -> Result<CylinderState, SequenceError> {
    let parts = model
        .weights
        .iter()
        .zip(&model.components)
        .filter(|(w, _)| !w.is_zero())
        .map(|(w, c)| Ok((w.clone(), iid_truncation(c, n)?)))
        .collect::<Result<Vec<_>, SequenceError>>()?;
    Ok(CylinderState::mix(model.alphabet, n, parts))
}

fn letter_counts(x: &SequencePrefix, n: usize) -> Result<(usize, Vec<u64>), SequenceError> {
    let (alphabet, values) = x.letters().ok_or(SequenceError::NotFinite)?;
    if n > values.len() {
        return Err(SequenceError::HorizonTooLong {
            n,
            len: values.len(),
        });
    }
    let mut counts = vec![0u64; alphabet];
    for &v in &values[..n] {
        counts[v] += 1;
    }
    Ok((alphabet, counts))
}

fn check_resample_args(m: usize, n: usize) -> Result<(), SequenceError> {
    if m == 0 {
        return Err(SequenceError::EmptyWord);
    }
    if m > n {
        return Err(SequenceError::WordTooLong { m, n });
    }
    Ok(())
}

/// Law of the first `m` letters after a uniformly random permutation of
/// `x_1..x_n`: `(1/n!) Σ_σ δ_(x_σ(1),…,x_σ(m))`.
///
/// Only letter multiplicities matter. A word using letter `a` exactly
/// `k_a` times has probability `Π_a (c_a)_{k_a} / (n)_m` with falling
/// factorials, where `c_a` counts `a` among the first `n` letters.
pub fn resample_truncated(
    x: &SequencePrefix,
    m: usize,
    n: usize,
) -> Result<CylinderState, SequenceError> {
    check_resample_args(m, n)?;
    let (alphabet, counts) = letter_counts(x, n)?;
    let support = counts.iter().filter(|&&c| c > 0).count();
    check_word_count(support, m)?;
    let mut pmf = BTreeMap::new();
    let mut word = Vec::with_capacity(m);
    let mut left = counts.clone();
    draw_without_replacement(
        &mut left,
        n as u64,
        m,
        &mut word,
        Rational::one(),
        &mut pmf,
    );
    Ok(CylinderState::from_sparse(alphabet, m, pmf))
}

fn draw_without_replacement(
    left: &mut [u64],
    remaining: u64,
    m: usize,
    word: &mut Word,
    prob: Rational,
    out: &mut BTreeMap<Word, Rational>,
) {
    if word.len() == m {
        out.insert(word.clone(), prob);
        return;
    }
    for a in 0..left.len() {
        if left[a] == 0 {
            continue;
        }
        let p = &prob * ratio(left[a] as i64, remaining as i64);
        left[a] -= 1;
        word.push(a);
        draw_without_replacement(left, remaining - 1, m, word, p, out);
        word.pop();
        left[a] += 1;
    }
}

/// `(1/n^m) Σ δ_(x_{i_1},…,x_{i_m})` over all index tuples in `1..n`,
/// i.e. the IID power of the empirical frequencies. Differs from
/// [`resample_truncated`] by at most `m(m−1)/(2n)` in total variation,
/// since both agree conditionally on the indices being distinct.
pub fn resample_index_average(
    x: &SequencePrefix,
    m: usize,
    n: usize,
) -> Result<CylinderState, SequenceError> {
    check_resample_args(m, n)?;
    let (_, counts) = letter_counts(x, n)?;
    let freqs: Vec<Rational> = counts.iter().map(|&c| ratio(c as i64, n as i64)).collect();
    iid_truncation(&freqs, m)
}
