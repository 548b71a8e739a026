//! Sequential and parallel composition and the copy/discard structure.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{point_mass, require_same, KernelError, PartialKernel};
use crate::rational::Rational;
use crate::space::FiniteSpace;

/// `g ∘ f`: run `f` first, then `g`.
///
/// The composite is defined at `x` only if `f` is defined there and puts
/// all of its mass inside the domain of `g`. Inputs where `f` leaks some
/// but not all mass out of `D_g` are dropped rather than producing a
/// row of total mass below one.
pub fn compose(f: &PartialKernel, g: &PartialKernel) -> Result<PartialKernel, KernelError> {
    require_same("compose", f.target(), g.source())?;
    let width = g.target().size();
    let mut rows = BTreeMap::new();
    'rows: for (x, frow) in f.rows() {
        let mut out = vec![Rational::zero(); width];
        for (y, p) in frow.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let Some(grow) = g.row(y) else {
                continue 'rows;
            };
            for (z, q) in grow.iter().enumerate() {
                if !q.is_zero() {
                    out[z] += p * q;
                }
            }
        }
        rows.insert(x, out);
    }
    Ok(PartialKernel::from_parts_unchecked(
        f.source().clone(),
        g.target().clone(),
        rows,
    ))
}

/// `f ⊗ g : A × B → X × Y`, defined on `D_f × D_g` with product rows.
pub fn tensor(f: &PartialKernel, g: &PartialKernel) -> PartialKernel {
    let source = FiniteSpace::product(f.source(), g.source());
    let target = FiniteSpace::product(f.target(), g.target());
    let (nb, ny) = (g.source().size(), g.target().size());
    let mut rows = BTreeMap::new();
    for (a, frow) in f.rows() {
        for (b, grow) in g.rows() {
            let mut out = vec![Rational::zero(); target.size()];
            for (x, p) in frow.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
                for (y, q) in grow.iter().enumerate().filter(|(_, q)| !q.is_zero()) {
                    out[x * ny + y] = p * q;
                }
            }
            rows.insert(a * nb + b, out);
        }
    }
    PartialKernel::from_parts_unchecked(source, target, rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structural {
    Copy,
    Delete,
    Swap,
    Identity,
}

pub fn structural(space: &FiniteSpace, which: Structural) -> Result<PartialKernel, KernelError> {
    match which {
        Structural::Copy => Ok(copy(space)),
        Structural::Delete => Ok(delete(space)),
        Structural::Swap => swap(space),
        Structural::Identity => Ok(identity(space)),
    }
}

pub fn identity(space: &FiniteSpace) -> PartialKernel {
    let rows = space
        .elements()
        .map(|x| (x, point_mass(space.size(), x)))
        .collect();
    PartialKernel::from_parts_unchecked(space.clone(), space.clone(), rows)
}

/// `copy_X(· | x) = δ_(x,x)`.
pub fn copy(space: &FiniteSpace) -> PartialKernel {
    let target = FiniteSpace::product(space, space);
    let n = space.size();
    let rows = space
        .elements()
        .map(|x| (x, point_mass(target.size(), x * n + x)))
        .collect();
    PartialKernel::from_parts_unchecked(space.clone(), target, rows)
}

/// `del_X({∗} | x) = 1`.
pub fn delete(space: &FiniteSpace) -> PartialKernel {
    let rows = space.elements().map(|x| (x, vec![Rational::one()])).collect();
    PartialKernel::from_parts_unchecked(space.clone(), FiniteSpace::unit(), rows)
}

/// `A × B → B × A`.
pub fn swap(space: &FiniteSpace) -> Result<PartialKernel, KernelError> {
    let (a, b) = space
        .factors()
        .ok_or_else(|| KernelError::NotAProduct(space.label().to_string()))?;
    let target = FiniteSpace::product(b, a);
    let (na, nb) = (a.size(), b.size());
    let rows = space
        .elements()
        .map(|i| {
            let (x, y) = (i / nb, i % nb);
            (i, point_mass(target.size(), y * na + x))
        })
        .collect();
    Ok(PartialKernel::from_parts_unchecked(
        space.clone(),
        target,
        rows,
    ))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::rational::{int, ratio};

    fn ab() -> FiniteSpace {
        FiniteSpace::named("X", ["a", "b"]).unwrap()
    }

    fn matrix(rows: &[&[(i64, i64)]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&(n, d)| ratio(n, d)).collect())
            .collect()
    }

    #[test]
    fn partial_identity_absorbs_identity() {
        let f = PartialKernel::partial_identity(&ab(), [0]).unwrap();
        assert_eq!(compose(&f, &identity(&ab())).unwrap(), f);
        assert_eq!(compose(&identity(&ab()), &f).unwrap(), f);
    }

    #[test]
    fn composite_domain_drops_leaking_inputs() {
        // f(·|a) = ½δ_a + ½δ_b, f(·|b) = δ_b; g defined only at b.
        let f = PartialKernel::from_substochastic(
            ab(),
            ab(),
            matrix(&[&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]]),
        )
        .unwrap();
        let g = PartialKernel::partial_identity(&ab(), [1]).unwrap();
        let gf = compose(&f, &g).unwrap();
        // By hand: x=a has f(D_g|a) = ½ ≠ 1, x=b has f(D_g|b) = 1.
        assert_eq!(gf.domain(), BTreeSet::from([1]));
        assert_eq!(gf.row(1).unwrap(), &[int(0), int(1)]);
    }

    #[test]
    fn total_composites_are_matrix_products() {
        let f = PartialKernel::from_substochastic(
            ab(),
            ab(),
            matrix(&[&[(1, 3), (2, 3)], &[(1, 4), (3, 4)]]),
        )
        .unwrap();
        let g = PartialKernel::from_substochastic(
            ab(),
            ab(),
            matrix(&[&[(1, 2), (1, 2)], &[(1, 5), (4, 5)]]),
        )
        .unwrap();
        let gf = compose(&f, &g).unwrap();
        assert!(gf.is_total());
        // [1/3 2/3; 1/4 3/4] · [1/2 1/2; 1/5 4/5]
        assert_eq!(
            gf.to_substochastic(),
            matrix(&[&[(3, 10), (7, 10)], &[(11, 40), (29, 40)]])
        );
    }

    #[test]
    fn compose_checks_spaces() {
        let three = FiniteSpace::new("Y", 3).unwrap();
        let err = compose(&identity(&ab()), &identity(&three)).unwrap_err();
        assert!(matches!(err, KernelError::SpaceMismatch { .. }));
    }

    #[test]
    fn tensor_domain_is_product_of_domains() {
        let x = FiniteSpace::named("X", ["a", "b"]).unwrap();
        let y = FiniteSpace::named("Y", ["c", "d"]).unwrap();
        let f = PartialKernel::partial_identity(&x, [0]).unwrap();
        let g = PartialKernel::partial_identity(&y, [0]).unwrap();
        let fg = tensor(&f, &g);
        // (D_f × Y) ∩ (X × D_g) = {(a,c)} = index 0.
        assert_eq!(fg.domain(), BTreeSet::from([0]));
        assert_eq!(fg.source().name(0), "(a,c)");
        assert_eq!(tensor(&identity(&x), &identity(&y)), identity(&FiniteSpace::product(&x, &y)));
    }

    #[test]
    fn copy_delete_swap() {
        let c = copy(&ab());
        assert_eq!(c.row(0).unwrap(), &point_mass(4, 0)[..]);
        assert_eq!(c.target().name(0), "(a,a)");
        let d = delete(&ab());
        assert!(d.rows().all(|(_, r)| r == [int(1)]));
        let prod = FiniteSpace::product(&ab(), &FiniteSpace::new("Z", 3).unwrap());
        let s = swap(&prod).unwrap();
        let ss = compose(&s, &swap(s.target()).unwrap()).unwrap();
        assert_eq!(ss, identity(&prod));
        assert!(matches!(swap(&ab()), Err(KernelError::NotAProduct(_))));
        assert!(structural(&ab(), Structural::Delete).unwrap().is_total());
    }
}
