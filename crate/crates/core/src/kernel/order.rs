//! Domains and the extension order.

use std::collections::BTreeSet;
use std::ops::Deref;

use super::{require_same, KernelError, PartialKernel};

/// The partial identity on the domain of some kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainIdempotent(PartialKernel);

impl DomainIdempotent {
    pub fn on(space: &crate::space::FiniteSpace, domain: &BTreeSet<usize>) -> Self {
        Self(
            PartialKernel::partial_identity(space, domain.iter().copied())
                .expect("domain elements come from the space"),
        )
    }

    pub fn kernel(&self) -> &PartialKernel {
        &self.0
    }

    pub fn into_kernel(self) -> PartialKernel {
        self.0
    }
}

impl Deref for DomainIdempotent {
    type Target = PartialKernel;

    fn deref(&self) -> &PartialKernel {
        &self.0
    }
}

impl From<DomainIdempotent> for PartialKernel {
    fn from(d: DomainIdempotent) -> Self {
        d.0
    }
}

/// `dom f`: identity on `D_f`, undefined elsewhere.
pub fn domain_of(f: &PartialKernel) -> DomainIdempotent {
    DomainIdempotent::on(f.source(), &f.domain())
}

/// `f ⊒ g`: `D_g ⊆ D_f` and the rows agree on `D_g`.
pub fn extends(f: &PartialKernel, g: &PartialKernel) -> Result<bool, KernelError> {
    require_same("extends", f.source(), g.source())?;
    require_same("extends", f.target(), g.target())?;
    Ok(g.rows().all(|(x, grow)| f.row(x) == Some(grow)))
}

/// Greatest lower bound of `dom f` and `dom g`: the partial identity on
/// `D_f ∩ D_g`.
pub fn meet_domains(f: &PartialKernel, g: &PartialKernel) -> Result<DomainIdempotent, KernelError> {
    require_same("meet_domains", f.source(), g.source())?;
    let common: BTreeSet<usize> = f.domain().intersection(&g.domain()).copied().collect();
    Ok(DomainIdempotent::on(f.source(), &common))
}

/// Meet of a descending chain `c₀ ⊒ c₁ ⊒ …`, given as a finite prefix.
///
/// The result is defined on the intersection of all domains and agrees
/// with every member there. For a countable chain this is the meet of the
/// supplied prefix only; on finite spaces a descending chain stabilizes,
/// so a long enough prefix gives the full meet.
pub fn chain_meet(chain: &[PartialKernel]) -> Result<PartialKernel, KernelError> {
    let first = chain.first().ok_or(KernelError::EmptyChain)?;
    for (index, pair) in chain.windows(2).enumerate() {
        if !extends(&pair[0], &pair[1])? {
            return Err(KernelError::NotDescending { index });
        }
    }
    let common = chain
        .iter()
        .skip(1)
        .fold(first.domain(), |acc, k| {
            acc.intersection(&k.domain()).copied().collect()
        });
    Ok(first.restrict(&common))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{compose, delete, identity};
    use crate::rational::ratio;
    use crate::space::FiniteSpace;

    fn abc() -> FiniteSpace {
        FiniteSpace::named("X", ["a", "b", "c"]).unwrap()
    }

    fn pid(ids: &[usize]) -> PartialKernel {
        PartialKernel::partial_identity(&abc(), ids.iter().copied()).unwrap()
    }

    #[test]
    fn domain_of_total_is_identity() {
        assert_eq!(domain_of(&identity(&abc())).kernel(), &identity(&abc()));
        assert_eq!(domain_of(&pid(&[0])).into_kernel(), pid(&[0]));
    }

    #[test]
    fn extension_examples() {
        let f = pid(&[0, 1]);
        assert!(extends(&f, &f).unwrap());
        assert!(extends(&identity(&abc()), &pid(&[0])).unwrap());
        assert!(!extends(&pid(&[0]), &identity(&abc())).unwrap());
        // delete extends anything into the unit.
        let half = PartialKernel::from_substochastic(
            abc(),
            FiniteSpace::unit(),
            vec![vec![ratio(1, 1)], vec![ratio(0, 1)], vec![ratio(1, 1)]],
        )
        .unwrap();
        assert!(extends(&delete(&abc()), &half).unwrap());
        assert!(extends(&identity(&abc()), &delete(&abc())).is_err());
    }

    #[test]
    fn meet_is_intersection_and_composite() {
        let f = pid(&[0, 1]);
        let g = pid(&[1, 2]);
        let m = meet_domains(&f, &g).unwrap();
        assert_eq!(m.kernel(), &pid(&[1]));
        let via_compose = compose(&domain_of(&f), &domain_of(&g)).unwrap();
        assert_eq!(m.kernel(), &via_compose);
        assert_eq!(meet_domains(&identity(&abc()), &g).unwrap(), domain_of(&g));
        assert_eq!(meet_domains(&f, &f).unwrap(), domain_of(&f));
    }

    #[test]
    fn chain_meets() {
        assert_eq!(chain_meet(&[pid(&[0, 2])]).unwrap(), pid(&[0, 2]));
        let chain = [pid(&[0, 1, 2]), pid(&[0, 1]), pid(&[0])];
        assert_eq!(chain_meet(&chain).unwrap(), pid(&[0]));
        let bad = [pid(&[0]), pid(&[0, 1])];
        assert_eq!(chain_meet(&bad), Err(KernelError::NotDescending { index: 0 }));
        assert_eq!(chain_meet(&[]), Err(KernelError::EmptyChain));
    }
}
