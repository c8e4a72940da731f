mod common;

use std::collections::BTreeSet;

use common::*;
use itertools::Itertools;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simscheme::address::gamma_contains;
use simscheme::fixedpoint::{find_isomorphism, find_violation, shift_injective, shift_map};
use simscheme::random::random_scheme;
use simscheme::{apply_functor, injectivity_report, is_fixed_point, FiniteScheme, InjectivityReport, Pair, PointId, Symbol, Tower};

/// Applying the functor to `(X_n, phi_{n,0})` reproduces level `n + 1`: same
/// gluing of `Y x X_n` and an isomorphism of pairs.
fn functor_matches_tower(s: FiniteScheme, depth: usize) {
    let t = Tower::build(s.clone(), depth).unwrap();
    for n in 0..depth {
        let source = Pair::from_level(&t, n).unwrap();
        let image = apply_functor(&s, &source);
        let next = t.level(n + 1).unwrap();
        assert_eq!(image.pair.len(), next.len());
        let len = source.len();
        let cells: Vec<(Symbol, PointId)> = s
            .all_symbols()
            .flat_map(|y| (0..len).map(move |z| (y, PointId::from(z))))
            .collect();
        for &(y, z) in &cells {
            for &(y2, z2) in &cells {
                let ours = image.project(y, z, len) == image.project(y2, z2, len);
                let tower = next.project(y, z) == next.project(y2, z2);
                assert_eq!(ours, tower);
            }
        }
        let target = Pair::from_level(&t, n + 1).unwrap();
        let theta = find_isomorphism(&target, &image.pair).expect("isomorphic pairs");
        for &(y, z) in &cells {
            assert_eq!(theta[next.project(y, z).unwrap().index()], image.project(y, z, len));
        }
    }
}

#[test]
fn functor_agrees_with_levels() {
    for (_, s) in example_schemes() {
        functor_matches_tower(s, 4);
    }
    functor_matches_tower(diag3(), 3);
}

/// Exhaustive search for `theta` over all bijections.
fn brute_isomorphism(from: &Pair, to: &Pair) -> bool {
    if from.len() != to.len() {
        return false;
    }
    (0..to.len()).permutations(from.len()).any(|theta| {
        from.phi().iter().zip(to.phi()).all(|(z, w)| theta[z.index()] == w.index())
    })
}

fn random_pair(s: &FiniteScheme, rng: &mut ChaCha8Rng, size: usize) -> Pair {
    let labels = (0..size).map(|i| format!("z{i}")).collect();
    let phi = s.base_points().map(|_| PointId(rng.gen_range(0..size as u32))).collect();
    Pair::new(s, labels, phi).unwrap()
}

#[test]
fn theta_search_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..200 {
        let s = random_scheme(seed);
        let size = rng.gen_range(1..=6);
        let a = random_pair(&s, &mut rng, size);
        let b = random_pair(&s, &mut rng, size);
        for (from, to) in [(&a, &b), (&a, &a), (&b, &a)] {
            let found = find_isomorphism(from, to);
            assert_eq!(found.is_some(), brute_isomorphism(from, to));
            if let Some(theta) = found {
                assert_eq!(theta.iter().collect::<BTreeSet<_>>().len(), from.len());
                for (z, w) in from.phi().iter().zip(to.phi()) {
                    assert_eq!(theta[z.index()], *w);
                }
            }
        }
        let image = apply_functor(&s, &a).pair;
        assert_eq!(find_isomorphism(&a, &image).is_some(), brute_isomorphism(&a, &image));
    }
}

#[test]
fn nonunique_has_two_fixed_points() {
    let s = nonunique();
    let id = Pair::identity(&s);
    assert!(is_fixed_point(&s, &id).is_none(), "(X0, id) generates rather than solves");
    let t = Tower::build(s.clone(), 6).unwrap();
    assert_eq!(t.sizes(), vec![3, 4, 6, 10, 18, 34, 66]);

    let z = zac(&s);
    assert!(!z.injective());
    let w = is_fixed_point(&s, &z).unwrap();
    assert_eq!(w.describe(&z), "a↦a c↦c");
    assert_eq!(w.image.pair.labels(), &["a", "c"]);
}

#[test]
fn collapsing_pair_is_a_fixed_point_of_nfi() {
    let s = nfi();
    let point = Pair::new(&s, vec!["a".into()], vec![PointId(0), PointId(0)]).unwrap();
    assert!(is_fixed_point(&s, &point).is_some());
}

/// `f_y(C(w)) = C(yw)` and `f_y` commutes with the embeddings.
fn shift_laws(s: FiniteScheme, max_len: usize) {
    let t = Tower::build(s.clone(), max_len + 1).unwrap();
    for y in s.all_symbols() {
        for n in 0..=max_len {
            let f = shift_map(&t, y, n).unwrap();
            for w in all_words(s.symbol_count(), n) {
                let image: BTreeSet<PointId> = t.cell(&w).unwrap().members.iter().map(|p| f[p.index()]).collect();
                let mut yw = vec![y];
                yw.extend(&w);
                assert_eq!(image, t.cell(&yw).unwrap().members);
            }
            if n < max_len {
                let f_next = shift_map(&t, y, n + 1).unwrap();
                for x in t.level(n).unwrap().points() {
                    let lhs = f_next[t.embed(n, n + 1, x).unwrap().index()];
                    assert_eq!(lhs, t.embed(n + 1, n + 2, f[x.index()]).unwrap());
                }
            }
        }
        let inj: Vec<bool> = (0..=max_len).map(|n| shift_injective(&t, y, n).unwrap()).collect();
        assert!(inj.iter().all(|&b| b == inj[0]), "injectivity of f_y constant over levels");
    }
}

#[test]
fn shift_laws_on_example_schemes() {
    for (_, s) in example_schemes() {
        shift_laws(s, 5);
    }
    shift_laws(diag3(), 3);
}

#[test]
fn shift_injectivity_examples() {
    let t = Tower::build(nfi(), 3).unwrap();
    assert!(shift_injective(&t, Symbol(0), 0).unwrap());
    let t = Tower::build(diag2(), 3).unwrap();
    assert!(shift_injective(&t, Symbol(1), 2).unwrap());
}

#[test]
fn discrete_schemes_are_certified_and_have_no_violation() {
    for k in 1..=4 {
        let t = Tower::build(FiniteScheme::diagonal(k), 4).unwrap();
        let report = injectivity_report(&t, 4).unwrap();
        assert!(matches!(report, InjectivityReport::CertifiedFullyInjective(_)), "{k}");
        assert_eq!(report.to_string(), "CERTIFIED_FULLY_INJECTIVE");
        assert_eq!(find_violation(&t, 4).unwrap(), None);
    }
}

#[test]
fn nfi_violation_is_checkable() {
    let s = nfi();
    assert!(!s.is_discrete());
    let w = s.discreteness_witness().unwrap();
    assert_ne!(w.first, w.second);
    let t = Tower::build(s, 3).unwrap();
    let InjectivityReport::Violation(v) = injectivity_report(&t, 3).unwrap() else {
        panic!("nfi is not fully injective");
    };
    assert_ne!(v.first, v.second);
    assert!(gamma_contains(&t, v.level, v.first, &v.address).unwrap());
    assert!(gamma_contains(&t, v.level, v.second, &v.address).unwrap());
}

#[test]
fn nonunique_violation() {
    let t = Tower::build(nonunique(), 3).unwrap();
    let report = injectivity_report(&t, 3).unwrap();
    let InjectivityReport::Violation(v) = report else {
        panic!("expected a violation");
    };
    assert!(gamma_contains(&t, v.level, v.first, &v.address).unwrap());
    assert!(gamma_contains(&t, v.level, v.second, &v.address).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn functor_agrees_on_random_schemes(seed in any::<u64>()) {
        functor_matches_tower(random_scheme(seed), 3);
    }

    #[test]
    fn shift_laws_on_random_schemes(seed in any::<u64>()) {
        shift_laws(random_scheme(seed), 2);
    }

    #[test]
    fn violations_are_genuine(seed in any::<u64>()) {
        let t = Tower::build(random_scheme(seed), 3).unwrap();
        if let Some(v) = find_violation(&t, 3).unwrap() {
            prop_assert_ne!(v.first, v.second);
            prop_assert!(gamma_contains(&t, v.level, v.first, &v.address).unwrap());
            prop_assert!(gamma_contains(&t, v.level, v.second, &v.address).unwrap());
        }
    }
}
