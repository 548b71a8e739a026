//! Random small kernels for law checks.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::{point_mass, PartialKernel};
use crate::rational::{ratio, Rational};
use crate::space::FiniteSpace;

#[derive(Debug, Clone, Copy)]
pub struct KernelShape {
    /// Chance that a row is left out of the domain.
    pub undefined: f64,
    /// Chance that a defined row is a point mass.
    pub point_mass: f64,
    /// Other rows get integer weights in `0..=max_weight`, normalized.
    pub max_weight: i64,
}

impl Default for KernelShape {
    fn default() -> Self {
        Self {
            undefined: 0.25,
            point_mass: 0.3,
            max_weight: 3,
        }
    }
}

/// An unnamed space of size `1..=max_size`. Spaces of equal size compare
/// equal, so independently drawn kernels often compose.
pub fn random_space<R: Rng>(rng: &mut R, max_size: usize) -> FiniteSpace {
    let n = rng.random_range(1..=max_size);
    FiniteSpace::new(format!("S{n}"), n).expect("size is positive")
}

pub fn random_kernel<R: Rng>(
    rng: &mut R,
    source: &FiniteSpace,
    target: &FiniteSpace,
    shape: &KernelShape,
) -> PartialKernel {
    let n = target.size();
    let mut rows = BTreeMap::new();
    for x in source.elements() {
        if rng.random_bool(shape.undefined) {
            continue;
        }
        let row = if rng.random_bool(shape.point_mass) {
            point_mass(n, rng.random_range(0..n))
        } else {
            random_probability(rng, n, shape.max_weight)
        };
        rows.insert(x, row);
    }
    PartialKernel::from_parts_unchecked(source.clone(), target.clone(), rows)
}

fn random_probability<R: Rng>(rng: &mut R, n: usize, max_weight: i64) -> Vec<Rational> {
    let mut weights: Vec<i64> = (0..n).map(|_| rng.random_range(0..=max_weight)).collect();
    let total: i64 = weights.iter().sum();
    if total == 0 {
        weights[rng.random_range(0..n)] = 1;
        return weights.iter().map(|&w| ratio(w, 1)).collect();
    }
    weights.iter().map(|&w| ratio(w, total)).collect()
}

/// A kernel extended by `f`: `f` restricted to a random subset of `D_f`.
pub fn random_restriction<R: Rng>(rng: &mut R, f: &PartialKernel) -> PartialKernel {
    let keep: BTreeSet<usize> = f.domain().into_iter().filter(|_| rng.random_bool(0.6)).collect();
    f.restrict(&keep)
}

/// `f ⊒ c₁ ⊒ … ⊒ c_links`, starting at `f`.
pub fn random_chain<R: Rng>(rng: &mut R, f: &PartialKernel, links: usize) -> Vec<PartialKernel> {
    let mut chain = vec![f.clone()];
    for _ in 0..links {
        let last = chain.last().expect("chain starts non-empty");
        let next = random_restriction(rng, last);
        chain.push(next);
    }
    chain
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::extends;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_kernels_are_valid_and_chains_descend() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = random_space(&mut rng, 4);
            let b = random_space(&mut rng, 4);
            let f = random_kernel(&mut rng, &a, &b, &KernelShape::default());
            let checked = PartialKernel::new(
                a.clone(),
                b.clone(),
                f.rows().map(|(x, r)| (x, r.to_vec())).collect(),
            )
            .unwrap();
            assert_eq!(checked, f);
            let chain = random_chain(&mut rng, &f, 3);
            assert!(chain.windows(2).all(|w| extends(&w[0], &w[1]).unwrap()));
        }
    }
}
