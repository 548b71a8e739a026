//! Copyability, almost-sure equality and positivity, plus a randomized
//! law suite that checks the quasi-Markov identities on small instances.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use super::random::{random_chain, random_kernel, random_restriction, random_space, KernelShape};
use super::{
    chain_meet, compose, copy, delete, domain_of, extends, identity, meet_domains, require_same,
    swap, tensor, KernelError, PartialKernel,
};
use crate::space::FiniteSpace;

/// `copy ∘ f = (f ⊗ f) ∘ copy`, evaluated exactly.
pub fn is_copyable(f: &PartialKernel) -> bool {
    let lhs = compose(f, &copy(f.target())).expect("copy matches target");
    let rhs = compose(&copy(f.source()), &tensor(f, f)).expect("copy matches source");
    same_matrix(&lhs, &rhs)
}

/// Every defined row is a point mass.
pub fn rows_are_point_masses(f: &PartialKernel) -> bool {
    f.rows().all(|(_, row)| {
        row.iter().filter(|p| !p.is_zero()).count() == 1 && row.iter().any(|p| p.is_one())
    })
}

/// `f =_p g`: `(id ⊗ f) ∘ copy ∘ p` equals `(id ⊗ g) ∘ copy ∘ p`.
pub fn almost_surely_equal(
    p: &PartialKernel,
    f: &PartialKernel,
    g: &PartialKernel,
) -> Result<bool, KernelError> {
    require_same("almost_surely_equal", p.target(), f.source())?;
    require_same("almost_surely_equal", p.target(), g.source())?;
    require_same("almost_surely_equal", f.target(), g.target())?;
    let x = p.target();
    let copied = compose(p, &copy(x))?;
    let lhs = compose(&copied, &tensor(&identity(x), f))?;
    let rhs = compose(&copied, &tensor(&identity(x), g))?;
    Ok(lhs == rhs)
}

/// Positivity for one pair `f : X → Y`, `g : Y → Z`.
///
/// When `g ∘ f` is copyable, checks
/// `(id_Y ⊗ g) ∘ copy_Y ∘ f = (f ⊗ g∘f) ∘ copy_X`. Otherwise the axiom
/// says nothing and the instance holds vacuously.
pub fn check_positivity_instance(
    f: &PartialKernel,
    g: &PartialKernel,
) -> Result<bool, KernelError> {
    let gf = compose(f, g)?;
    if !is_copyable(&gf) {
        return Ok(true);
    }
    let y = f.target();
    let lhs = compose(&compose(f, &copy(y))?, &tensor(&identity(y), g))?;
    let rhs = compose(&copy(f.source()), &tensor(f, &gf))?;
    Ok(lhs == rhs)
}

/// Compares two kernels as substochastic matrices, ignoring how their
/// spaces are labelled. Used where two spaces are only canonically
/// isomorphic (`(X×X)×X` vs `X×(X×X)`, `I×X` vs `X`), which share the
/// same element indexing.
pub fn same_matrix(a: &PartialKernel, b: &PartialKernel) -> bool {
    a.source().size() == b.source().size()
        && a.target().size() == b.target().size()
        && a.to_substochastic() == b.to_substochastic()
}

#[derive(Debug, Clone, Serialize)]
pub struct LawCheck {
    pub law: &'static str,
    pub instances: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl LawCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    law: &'static str,
    instances: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn new(law: &'static str) -> Self {
        Self {
            law,
            instances: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    fn finish(self) -> LawCheck {
        LawCheck {
            law: self.law,
            instances: self.instances,
            failures: self.failures,
            first_failure: self.first_failure,
        }
    }
}

/// Runs every law on `instances` random small kernels each.
pub fn run_law_suite<R: Rng>(rng: &mut R, instances: usize) -> Vec<LawCheck> {
    let shape = KernelShape::default();
    let max = 3;
    let mut assoc = Tally::new("associativity");
    let mut unit = Tally::new("identity is a two-sided unit");
    let mut comonoid = Tally::new("copy/delete comonoid laws");
    let mut dom_comp = Tally::new("composite domain formula");
    let mut quasi_total = Tally::new("quasi-totality f ∘ dom f = f");
    let mut dom_repeat = Tally::new("dom(g∘f) = dom(dom g ∘ f)");
    let mut meet = Tally::new("meet of domains");
    let mut chain = Tally::new("chain meets preserved by composition and tensor");
    let mut monotone = Tally::new("composition and tensor are monotone");
    let mut order = Tally::new("extension is a partial order");
    let mut copyable = Tally::new("copyability passes to restrictions");
    let mut closure = Tally::new("composites are well formed");
    let mut positivity = Tally::new("positivity");

    for _ in 0..instances {
        let a = random_space(rng, max);
        let b = random_space(rng, max);
        let c = random_space(rng, max);
        let d = random_space(rng, max);
        let f = random_kernel(rng, &a, &b, &shape);
        let g = random_kernel(rng, &b, &c, &shape);
        let h = random_kernel(rng, &c, &d, &shape);

        let gf = compose(&f, &g).unwrap();
        let hg = compose(&g, &h).unwrap();
        assoc.record(
            compose(&gf, &h).unwrap() == compose(&f, &hg).unwrap(),
            || format!("{f:?} {g:?} {h:?}"),
        );
        unit.record(
            compose(&identity(&a), &f).unwrap() == f && compose(&f, &identity(&b)).unwrap() == f,
            || format!("{f:?}"),
        );

        comonoid.record(comonoid_laws(&a), || format!("{a:?}"));

        // Composite domain, evaluated independently from the rows.
        let dg = g.domain();
        let expected: BTreeSet<usize> = f
            .rows()
            .filter(|(x, _)| f.mass(*x, &dg).is_some_and(|m| m.is_one()))
            .map(|(x, _)| x)
            .collect();
        dom_comp.record(gf.domain() == expected, || format!("{f:?} {g:?}"));

        quasi_total.record(
            compose(&domain_of(&f), &f).unwrap() == f,
            || format!("{f:?}"),
        );
        dom_repeat.record(
            domain_of(&gf) == domain_of(&compose(&f, &domain_of(&g)).unwrap()),
            || format!("{f:?} {g:?}"),
        );

        let f2 = random_kernel(rng, &a, &c, &shape);
        meet.record(meet_law(rng, &f, &f2), || format!("{f:?} {f2:?}"));

        let links = rng.random_range(1..=4);
        let descending = random_chain(rng, &g, links);
        chain.record(
            chain_law(&descending, &f, &h, &random_kernel(rng, &d, &a, &shape)),
            || format!("{descending:?}"),
        );

        let g_small = random_restriction(rng, &g);
        monotone.record(
            extends(&compose(&f, &g).unwrap(), &compose(&f, &g_small).unwrap()).unwrap()
                && extends(&compose(&g, &h).unwrap(), &compose(&g_small, &h).unwrap()).unwrap()
                && extends(&tensor(&g, &f), &tensor(&g_small, &f)).unwrap()
                && extends(&tensor(&f, &g), &tensor(&f, &g_small)).unwrap(),
            || format!("{g:?} {g_small:?}"),
        );

        let g_smaller = random_restriction(rng, &g_small);
        order.record(
            extends(&g, &g).unwrap()
                && extends(&g, &g_smaller).unwrap()
                && (!extends(&g_small, &g).unwrap() || g_small == g),
            || format!("{g:?} {g_small:?} {g_smaller:?}"),
        );

        let det = random_kernel(
            rng,
            &a,
            &b,
            &KernelShape {
                point_mass: 1.0,
                ..shape
            },
        );
        let det_small = random_restriction(rng, &det);
        copyable.record(
            is_copyable(&det)
                && is_copyable(&det_small)
                && is_copyable(&f) == rows_are_point_masses(&f),
            || format!("{det:?} {f:?}"),
        );

        let fg_t = tensor(&f, &g);
        closure.record(
            well_formed(&gf) && well_formed(&fg_t) && well_formed(&hg),
            || format!("{f:?} {g:?}"),
        );

        positivity.record(
            check_positivity_instance(&f, &g).unwrap(),
            || format!("{f:?} {g:?}"),
        );
    }

    [
        assoc, unit, comonoid, dom_comp, quasi_total, dom_repeat, meet, chain, monotone, order,
        copyable, closure, positivity,
    ]
    .into_iter()
    .map(Tally::finish)
    .collect()
}

fn well_formed(k: &PartialKernel) -> bool {
    PartialKernel::new(
        k.source().clone(),
        k.target().clone(),
        k.rows().map(|(x, r)| (x, r.to_vec())).collect(),
    )
    .is_ok()
}

fn comonoid_laws(x: &FiniteSpace) -> bool {
    let c = copy(x);
    let id = identity(x);
    // (copy ⊗ id) ∘ copy  vs  (id ⊗ copy) ∘ copy, up to the associator.
    let left = compose(&c, &tensor(&c, &id)).unwrap();
    let right = compose(&c, &tensor(&id, &c)).unwrap();
    let coassoc = same_matrix(&left, &right);
    let cocomm = compose(&c, &swap(c.target()).unwrap()).unwrap() == c;
    let del = delete(x);
    let counit_l = same_matrix(&compose(&c, &tensor(&del, &id)).unwrap(), &id);
    let counit_r = same_matrix(&compose(&c, &tensor(&id, &del)).unwrap(), &id);
    coassoc && cocomm && counit_l && counit_r
}

fn meet_law<R: Rng>(rng: &mut R, f: &PartialKernel, g: &PartialKernel) -> bool {
    let m = meet_domains(f, g).unwrap();
    let via_compose = compose(&domain_of(f), &domain_of(g)).unwrap();
    let lower = extends(&domain_of(f), &m).unwrap() && extends(&domain_of(g), &m).unwrap();
    // Any common lower bound among partial identities lies below the meet.
    let space = f.source();
    let subset: BTreeSet<usize> = space.elements().filter(|_| rng.random_bool(0.5)).collect();
    let h = PartialKernel::partial_identity(space, subset).unwrap();
    let h_lower = extends(&domain_of(f), &h).unwrap() && extends(&domain_of(g), &h).unwrap();
    let greatest = !h_lower || extends(&m, &h).unwrap();
    *m.kernel() == via_compose && lower && greatest
}

/// `descending` is a chain of kernels `B → C`; `pre : A → B`,
/// `post : C → D`, and `side` is any kernel used as a tensor factor.
fn chain_law(
    descending: &[PartialKernel],
    pre: &PartialKernel,
    post: &PartialKernel,
    side: &PartialKernel,
) -> bool {
    let meet = chain_meet(descending).unwrap();
    let map = |op: &dyn Fn(&PartialKernel) -> PartialKernel| -> Option<PartialKernel> {
        let image: Vec<PartialKernel> = descending.iter().map(op).collect();
        chain_meet(&image).ok()
    };
    let pre_ok = map(&|k| compose(pre, k).unwrap()) == Some(compose(pre, &meet).unwrap());
    let post_ok = map(&|k| compose(k, post).unwrap()) == Some(compose(&meet, post).unwrap());
    let tensor_ok = map(&|k| tensor(k, side)) == Some(tensor(&meet, side));
    pre_ok && post_ok && tensor_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ab() -> FiniteSpace {
        FiniteSpace::named("X", ["a", "b"]).unwrap()
    }

    fn coin() -> PartialKernel {
        PartialKernel::state(ab(), vec![ratio(1, 2), ratio(1, 2)]).unwrap()
    }

    #[test]
    fn copyability_examples() {
        assert!(is_copyable(&identity(&ab())));
        // copy ∘ coin = ½δ_aa + ½δ_bb, but (coin ⊗ coin) ∘ copy is uniform on 4.
        assert!(!is_copyable(&coin()));
        let partial_det = PartialKernel::partial_identity(&ab(), [1]).unwrap();
        assert!(is_copyable(&partial_det));
    }

    #[test]
    fn almost_sure_equality_examples() {
        let pa = PartialKernel::state(ab(), vec![int(1), int(0)]).unwrap();
        let f = identity(&ab());
        // agrees with f at a, differs at b.
        let g = PartialKernel::from_substochastic(
            ab(),
            ab(),
            vec![vec![int(1), int(0)], vec![ratio(1, 2), ratio(1, 2)]],
        )
        .unwrap();
        assert!(almost_surely_equal(&pa, &f, &f).unwrap());
        assert!(almost_surely_equal(&pa, &f, &g).unwrap());
        assert!(!almost_surely_equal(&coin(), &f, &g).unwrap());
        assert!(almost_surely_equal(&coin(), &delete(&ab()), &f).is_err());
    }

    #[test]
    fn positivity_on_a_splitting() {
        // f : {0,1} → {0,1,2,3} spreads each input over two outputs and
        // g collapses them back, so g ∘ f = id.
        let x = FiniteSpace::new("X", 2).unwrap();
        let y = FiniteSpace::new("Y", 4).unwrap();
        let h = ratio(1, 2);
        let z = Rational::from_integer(0.into());
        let f = PartialKernel::from_substochastic(
            x.clone(),
            y.clone(),
            vec![
                vec![h.clone(), h.clone(), z.clone(), z.clone()],
                vec![z.clone(), z, h.clone(), h],
            ],
        )
        .unwrap();
        let g = PartialKernel::deterministic(y.clone(), x.clone(), 0..4, |v| v / 2).unwrap();
        assert_eq!(compose(&f, &g).unwrap(), identity(&x));
        assert!(check_positivity_instance(&f, &g).unwrap());
        // Deterministic pair.
        let d = PartialKernel::deterministic(x.clone(), y, 0..2, |v| v + 2).unwrap();
        assert!(check_positivity_instance(&d, &g).unwrap());
        // Non-copyable composite: vacuous.
        assert!(check_positivity_instance(&coin(), &identity(&ab())).unwrap());
    }

    #[test]
    fn law_suite_is_green() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for check in run_law_suite(&mut rng, 200) {
            assert!(check.passed(), "{}: {:?}", check.law, check.first_failure);
            assert_eq!(check.instances, 200);
        }
    }
}
