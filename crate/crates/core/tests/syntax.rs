mod common;

use common::*;
use kbmerge::semantics::{self, ModelSet};
use kbmerge::{Formula, Vocabulary};
use proptest::prelude::*;

proptest! {
    #[test]
    fn printing_then_parsing_is_the_identity(f in formula(5)) {
        let text = f.to_string();
        prop_assert_eq!(kbmerge::parse(&text).unwrap(), f, "printed as {}", text);
    }

    #[test]
    fn models_agree_with_evaluation(f in formula(4)) {
        let v = vocab(&VARS[..4]);
        let set = semantics::models(&f, &v).unwrap();
        prop_assert_eq!(set.masks().collect::<Vec<_>>(), brute_models(&f, &v));
    }

    #[test]
    fn dnf_and_folding_preserve_meaning(f in formula(4)) {
        let v = vocab(&VARS[..4]);
        let set = semantics::models(&f, &v).unwrap();
        prop_assert_eq!(semantics::models(&semantics::to_dnf(&set), &v).unwrap(), set.clone());
        prop_assert_eq!(semantics::models(&f.fold_constants(), &v).unwrap(), set);
    }

    #[test]
    fn distance_table_matches_brute_force(f in consistent_formula(4)) {
        let v = vocab(&VARS[..4]);
        let set = semantics::models(&f, &v).unwrap();
        let table = semantics::distance_table(&set).unwrap();
        let masks = brute_models(&f, &v);
        for w in 0..(1u64 << 4) {
            prop_assert_eq!(Some(table[w as usize]), brute_distance(w, &masks));
        }
    }

    #[test]
    fn widening_and_projection_round_trip(f in formula(3)) {
        let narrow = vocab(&VARS[..3]);
        let wide = vocab(&VARS[..5]);
        let set = semantics::models(&f, &narrow).unwrap();
        let widened = set.extend_to(&wide).unwrap();
        prop_assert_eq!(widened.len(), set.len() * 4);
        prop_assert_eq!(widened.clone(), semantics::models(&f, &wide).unwrap());
        prop_assert_eq!(widened.project(&narrow).unwrap(), set);
    }
}

#[test]
fn precedence_and_associativity() {
    assert_eq!(parse("p -> q -> r"), Formula::implies(parse("p"), parse("q -> r")));
    assert_eq!(parse("p <-> q <-> r"), Formula::iff(parse("p <-> q"), parse("r")));
    assert_eq!(parse("!p & q | r -> s <-> t").to_string(), "!p & q | r -> s <-> t");
    assert_eq!(parse("(p | q) & r").to_string(), "(p | q) & r");
}

#[test]
fn empty_vocabulary() {
    let v = Vocabulary::empty();
    assert_eq!(semantics::models(&Formula::top(), &v).unwrap(), ModelSet::full(v.clone()));
    assert!(semantics::models(&Formula::bottom(), &v).unwrap().is_empty());
    assert_eq!(semantics::to_dnf(&ModelSet::full(v)), Formula::top());
}

#[test]
fn vocabulary_cap_is_enforced() {
    let names: Vec<String> = (0..30).map(|i| format!("x{i}")).collect();
    let f = Formula::conj(names.iter().map(|n| Formula::atom(n.clone())));
    assert!(matches!(
        semantics::models(&f, &f.variables()),
        Err(semantics::SemanticsError::VocabularyTooLarge { size: 30, .. })
    ));
}
