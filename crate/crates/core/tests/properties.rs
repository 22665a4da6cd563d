use std::sync::OnceLock;

use proptest::prelude::*;

use mrdlab_core::equivalence::{verify_witness, EquivalenceWitness};
use mrdlab_core::families::{nsz_code, NszVariant};
use mrdlab_core::{FieldContext, FieldElement, FieldParams, QPoly};

fn fields() -> &'static [FieldContext] {
    static FIELDS: OnceLock<Vec<FieldContext>> = OnceLock::new();
    FIELDS.get_or_init(|| {
        [(3, 1, 3), (2, 2, 3), (5, 1, 3), (2, 1, 4), (3, 1, 4)]
            .into_iter()
            .map(|(p, r, t)| FieldContext::new(FieldParams::new(p, r, t).unwrap()).unwrap())
            .collect()
    })
}

fn el(c: &FieldContext, seed: u64) -> FieldElement {
    c.from_index(seed % c.order()).unwrap()
}

fn poly(c: &FieldContext, seeds: &[u64]) -> QPoly {
    QPoly::from_coeffs(c, (0..c.n() as usize).map(|i| el(c, seeds[i])).collect()).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn field_axioms(which in 0usize..5, a in any::<u64>(), b in any::<u64>(), e in any::<u64>(), k in 0i64..16) {
        let c = &fields()[which];
        let (a, b, e) = (el(c, a), el(c, b), el(c, e));
        prop_assert_eq!(c.add(a, b), c.add(b, a));
        prop_assert_eq!(c.mul(a, b), c.mul(b, a));
        prop_assert_eq!(c.add(c.add(a, b), e), c.add(a, c.add(b, e)));
        prop_assert_eq!(c.mul(c.mul(a, b), e), c.mul(a, c.mul(b, e)));
        prop_assert_eq!(c.mul(a, c.add(b, e)), c.add(c.mul(a, b), c.mul(a, e)));
        prop_assert_eq!(c.add(a, c.zero()), a);
        prop_assert_eq!(c.mul(a, c.one()), a);
        prop_assert!(c.add(a, c.neg(a)).is_zero());
        prop_assert_eq!(c.sub(c.add(a, b), b), a);
        if !b.is_zero() {
            prop_assert_eq!(c.mul(c.div(a, b).unwrap(), b), a);
        }
        prop_assert_eq!(c.frobenius(c.mul(a, b), k), c.mul(c.frobenius(a, k), c.frobenius(b, k)));
        prop_assert_eq!(c.frobenius(c.add(a, b), k), c.add(c.frobenius(a, k), c.frobenius(b, k)));
        prop_assert_eq!(c.frobenius(a, c.n() as i64), a);
        prop_assert_eq!(c.from_coords(&c.coords(a)).unwrap(), a);
    }

    #[test]
    fn norm_and_trace_are_transitive(which in 0usize..5, a in any::<u64>(), b in any::<u64>()) {
        let c = &fields()[which];
        let (a, b) = (el(c, a), el(c, b));
        let q = c.q();
        for d in (1..=c.n()).filter(|d| c.n() % d == 0) {
            let nd = c.norm(a, d).unwrap();
            let td = c.trace(a, d).unwrap();
            prop_assert!(c.is_in_subfield(nd, d));
            prop_assert!(c.is_in_subfield(td, d));
            prop_assert_eq!(c.pow_u(nd, (q.pow(d) - 1) / (q - 1)), c.norm(a, 1).unwrap());
            let down = (0..d).fold(c.zero(), |acc, k| c.add(acc, c.frobenius(td, k as i64)));
            prop_assert_eq!(down, c.trace(a, 1).unwrap());
            prop_assert_eq!(c.norm(c.mul(a, b), d).unwrap(), c.mul(nd, c.norm(b, d).unwrap()));
            prop_assert_eq!(c.trace(c.add(a, b), d).unwrap(), c.add(td, c.trace(b, d).unwrap()));
        }
    }

    #[test]
    fn rank_distance_is_a_metric(
        which in 0usize..3,
        f in prop::collection::vec(any::<u64>(), 8),
        g in prop::collection::vec(any::<u64>(), 8),
        h in prop::collection::vec(any::<u64>(), 8),
        lambda in any::<u64>(),
    ) {
        let c = &fields()[[0, 1, 3][which]];
        let (f, g, h) = (poly(c, &f), poly(c, &g), poly(c, &h));
        let d = |a: &QPoly, b: &QPoly| a.sub(c, b).rank(c);
        prop_assert_eq!(d(&f, &f), 0);
        prop_assert_eq!(d(&f, &g) == 0, f == g);
        prop_assert_eq!(d(&f, &g), d(&g, &f));
        prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h));
        prop_assert!(d(&f, &g) <= c.n());
        let lambda = el(c, lambda);
        if !lambda.is_zero() {
            prop_assert_eq!(f.scale(c, lambda).rank(c), f.rank(c));
        }
    }

    #[test]
    fn composition_is_consistent(
        which in 0usize..3,
        f in prop::collection::vec(any::<u64>(), 8),
        g in prop::collection::vec(any::<u64>(), 8),
        h in prop::collection::vec(any::<u64>(), 8),
        x in any::<u64>(),
        j in 0i64..8,
    ) {
        let c = &fields()[[0, 1, 3][which]];
        let (f, g, h) = (poly(c, &f), poly(c, &g), poly(c, &h));
        let x = el(c, x);
        let fg = f.compose(c, &g);
        prop_assert_eq!(fg.evaluate(c, x), f.evaluate(c, g.evaluate(c, x)));
        prop_assert_eq!(f.compose(c, &g.compose(c, &h)), fg.compose(c, &h));
        prop_assert_eq!(f.compose(c, &g.add(c, &h)), fg.add(c, &f.compose(c, &h)));
        prop_assert_eq!(f.compose(c, &QPoly::identity(c)), f.clone());
        prop_assert!(fg.rank(c) <= f.rank(c).min(g.rank(c)));
        let j = j % c.degree() as i64;
        prop_assert_eq!(fg.twist(c, j), f.twist(c, j).compose(c, &g.twist(c, j)));
    }

    #[test]
    fn witness_composition_is_consistent(
        h1 in any::<u64>(),
        a in any::<u64>(), d in any::<u64>(), b in any::<u64>(), cc in any::<u64>(),
        r1 in 0u32..6, r2 in 0u32..6,
    ) {
        // chains of scaling and swapping maps between codes that need not be MRD
        let c = &fields()[0];
        let fiber = c.norm_fiber(c.neg_one(), 3).unwrap();
        let pick = |s: u64| fiber[(s % fiber.len() as u64) as usize];
        let f = nsz_code(c, pick(h1), 1, NszVariant::Sec4).unwrap().f().clone();
        prop_assume!(f.rank(c) == c.n());
        let unit = |s: u64| c.from_log(s % (c.order() - 1));
        let w1 = EquivalenceWitness::diagonal(r1, unit(a), unit(d));
        let w2 = EquivalenceWitness::antidiagonal(r2, unit(b), unit(cc));
        let g = image(c, &f, &w1);
        let k = image(c, &g, &w2);
        prop_assert!(verify_witness(c, &f, &g, &w1));
        prop_assert!(verify_witness(c, &g, &k, &w2));
        let chain = w1.then(c, &w2);
        prop_assert!(verify_witness(c, &f, &k, &chain));
        prop_assert!(verify_witness(c, &k, &f, &chain.inverse(c)));
        prop_assert!(verify_witness(c, &f, &f, &w1.then(c, &w1.inverse(c))));
    }
}

/// The unique g with (f, g) linked by a diagonal or antidiagonal witness.
fn image(c: &FieldContext, f: &QPoly, w: &EquivalenceWitness) -> QPoly {
    let [a, b, cc, d] = w.matrix;
    let fr = f.twist(c, w.rho as i64);
    if b.is_zero() {
        // fr(a x) = d g(x)
        fr.compose(c, &QPoly::scalar(c, a)).scale(c, c.inv(d).unwrap())
    } else {
        // fr(b g(x)) = c x, so g = b^(-1) fr^(-1)(c x)
        let inv = inverse_map(c, &fr);
        QPoly::scalar(c, c.inv(b).unwrap()).compose(c, &inv.compose(c, &QPoly::scalar(c, cc)))
    }
}

/// Compositional inverse of a bijective q-polynomial, by powering: in the
/// finite group of invertible maps f^(-1) = f^(k-1) for the order k of f.
fn inverse_map(c: &FieldContext, f: &QPoly) -> QPoly {
    let id = QPoly::identity(c);
    let mut prev = id.clone();
    let mut cur = f.clone();
    while cur != id {
        prev = cur.clone();
        cur = cur.compose(c, f);
    }
    prev
}

#[test]
fn norm_fiber_sizes_exhaustive_at_q3() {
    for t in [3, 4] {
        let c = FieldContext::new(FieldParams::new(3, 1, t).unwrap()).unwrap();
        let q = c.q();
        for d in (1..=c.n()).filter(|d| c.n() % d == 0) {
            let expected = ((q.pow(c.n()) - 1) / (q.pow(d) - 1)) as usize;
            let mut counts = std::collections::HashMap::new();
            for e in c.nonzero_elements() {
                *counts.entry(c.norm(e, d).unwrap()).or_insert(0usize) += 1;
            }
            assert_eq!(counts.len() as u64, q.pow(d) - 1);
            for (target, count) in counts {
                assert_eq!(count, expected);
                assert_eq!(c.norm_fiber(target, d).unwrap().len(), expected);
            }
        }
    }
}
