mod common;

use common::*;
use kbmerge::forgetting::{dilate, dilate_models, dilate_via_forgetting, forget, forget_in_order, switch_models};
use kbmerge::semantics::{self, ModelSet};
use kbmerge::{ForgetSet, Formula, Vocabulary};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn forget_set(n: usize) -> impl Strategy<Value = ForgetSet> {
    subsequence(&VARS[..n], 0..=n).prop_map(ForgetSet::new)
}

fn all4() -> Vocabulary {
    vocab(&VARS[..4])
}

fn mods(f: &Formula) -> ModelSet {
    semantics::models(f, &all4()).unwrap()
}

/// Masks over `v` that agree with some model of `f` outside `vars`.
fn brute_forget(f: &Formula, vars: &ForgetSet, v: &Vocabulary) -> Vec<u64> {
    let free: u64 = v
        .iter()
        .enumerate()
        .filter(|(_, n)| vars.contains(n))
        .map(|(i, _)| 1u64 << (v.len() - 1 - i))
        .sum();
    let base = brute_models(f, v);
    (0..1u64 << v.len())
        .filter(|w| base.iter().any(|m| (m & !free) == (w & !free)))
        .collect()
}

proptest! {
    #[test]
    fn forgetting_matches_its_model_characterization(f in formula(4), vars in forget_set(4)) {
        let g = forget(&f, &vars);
        prop_assert!(g.variables().iter().all(|n| !vars.contains(n)));
        prop_assert_eq!(mods(&g).masks().collect::<Vec<_>>(), brute_forget(&f, &vars, &all4()));
    }

    #[test]
    fn forgetting_order_is_irrelevant(f in formula(4), vars in forget_set(4)) {
        let mut reversed: Vec<&str> = vars.iter().collect();
        reversed.reverse();
        prop_assert_eq!(mods(&forget(&f, &vars)), mods(&forget_in_order(&f, reversed)));
    }

    #[test]
    fn switch_characterization(f in formula(4), i in 0usize..4) {
        let p = VARS[i];
        let g = forget(&f, &ForgetSet::new([p]));
        prop_assert_eq!(mods(&g), switch_models(&mods(&f), p).unwrap());
    }

    #[test]
    fn forgetting_is_monotone_in_the_set(f in consistent_formula(4), v2 in forget_set(4), keep in prop::collection::vec(any::<bool>(), 4)) {
        let v1 = ForgetSet::new(v2.iter().zip(&keep).filter(|(_, k)| **k).map(|(n, _)| n));
        prop_assert!(mods(&forget(&f, &v1)).is_subset(&mods(&forget(&f, &v2))));
        prop_assert!(mods(&f).is_subset(&mods(&forget(&f, &v2))));
    }

    #[test]
    fn forgetting_everything(f in formula(4), extra in forget_set(5)) {
        let all = ForgetSet::from(&f.variables());
        let consistent = semantics::is_consistent(&f).unwrap();
        let expected = if consistent { ModelSet::full(all4()) } else { ModelSet::empty(all4()) };
        prop_assert_eq!(mods(&forget(&f, &all)), expected.clone());
        let wider = ForgetSet::new(all.iter().chain(extra.iter()));
        prop_assert_eq!(mods(&forget(&f, &wider)), expected);
    }

    #[test]
    fn forgetting_distributes_over_disjunction(f in formula(4), g in formula(4), vars in forget_set(4)) {
        let lhs = forget(&Formula::Or(vec![f.clone(), g.clone()]), &vars);
        let rhs = Formula::Or(vec![forget(&f, &vars), forget(&g, &vars)]);
        prop_assert_eq!(mods(&lhs), mods(&rhs));
    }

    #[test]
    fn forgetting_an_absent_variable(f in formula(3)) {
        prop_assert_eq!(mods(&forget(&f, &ForgetSet::new(["s"]))), mods(&f));
    }

    #[test]
    fn forgetting_preserves_entailment(f in formula(4), g in formula(4), vars in forget_set(4)) {
        let strong = Formula::And(vec![f, g.clone()]);
        prop_assert!(mods(&forget(&strong, &vars)).is_subset(&mods(&forget(&g, &vars))));
        let untouched = Formula::conj(g.variables().iter().filter(|n| !vars.contains(n)).map(Formula::atom));
        let strong = Formula::And(vec![strong, untouched.clone()]);
        prop_assert!(mods(&forget(&strong, &vars)).is_subset(&mods(&untouched)));
    }

    #[test]
    fn forgotten_models_are_close(f in consistent_formula(4), vars in forget_set(4)) {
        let base = brute_models(&f, &all4());
        for w in mods(&forget(&f, &vars)).masks() {
            prop_assert!(brute_distance(w, &base).unwrap() <= vars.len() as u32);
        }
    }

    #[test]
    fn distance_to_a_forgotten_formula(f in consistent_formula(4), g in consistent_formula(4), vars in forget_set(4), keep in prop::collection::vec(any::<bool>(), 4)) {
        let d = |a: &Formula, b: &Formula| {
            let ma = brute_models(a, &all4());
            let mb = brute_models(b, &all4());
            ma.iter().map(|w| brute_distance(*w, &mb).unwrap()).min().unwrap()
        };
        let fv = forget(&f, &vars);
        let sub = ForgetSet::new(vars.iter().zip(&keep).filter(|(_, k)| **k).map(|(n, _)| n));
        prop_assert_eq!(d(&fv, &g), d(&fv, &forget(&g, &vars)));
        prop_assert_eq!(d(&fv, &g), d(&fv, &forget(&g, &sub)));
    }

    #[test]
    fn dilation_through_forgetting(f in consistent_formula(5)) {
        let v = f.variables();
        for n in 1..=v.len() as u32 + 2 {
            let via = dilate_via_forgetting(&f, n).unwrap();
            let expected = semantics::models(&dilate(&f, n, &v).unwrap(), &v).unwrap();
            prop_assert_eq!(semantics::models(&via, &v).unwrap(), expected.clone(), "n = {}", n);
            if n as usize >= v.len() {
                prop_assert_eq!(expected, ModelSet::full(v.clone()));
            }
        }
    }

    #[test]
    fn dilation_is_iterated_unit_dilation(f in consistent_formula(4)) {
        let v = all4();
        let mut ball: Vec<u64> = brute_models(&f, &v);
        for n in 1..=5 {
            ball = (0..16u64).filter(|w| brute_distance(*w, &ball).unwrap() <= 1).collect();
            prop_assert_eq!(dilate_models(&f, n, &v).unwrap().masks().collect::<Vec<_>>(), ball.clone());
        }
    }
}

#[test]
fn forgetting_does_not_commute_with_conjunction() {
    let phi = parse("p & q");
    let phi2 = parse("!p");
    let p = ForgetSet::new(["p"]);
    let lhs = Formula::conj([forget(&phi, &p), phi2.clone()]);
    let rhs = Formula::conj([forget(&phi, &p), forget(&phi2, &p)]);
    assert!(semantics::equivalent(&lhs, &parse("q & !p")).unwrap());
    assert!(semantics::equivalent(&rhs, &parse("q")).unwrap());
}

#[test]
fn forgetting_the_pool_formula() {
    let f = parse("S & T & P");
    assert_eq!(forget(&f, &ForgetSet::new(["S", "T", "P"])), Formula::top());
    assert!(semantics::equivalent(&forget(&f, &ForgetSet::new(["S"])), &parse("T & P")).unwrap());
}
