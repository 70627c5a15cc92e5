#![allow(dead_code)]

use proptest::prelude::*;
use proptest::sample::select;

use kbmerge::semantics::{self, Interpretation};
use kbmerge::{Formula, Vocabulary};

pub const VARS: [&str; 5] = ["p", "q", "r", "s", "t"];

/// Arbitrary formula trees over the first `n` names of [`VARS`].
pub fn formula(n: usize) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        1 => any::<bool>().prop_map(Formula::Const),
        8 => select(&VARS[..n]).prop_map(Formula::atom),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

/// Consistent formula trees over the first `n` names of [`VARS`].
pub fn consistent_formula(n: usize) -> impl Strategy<Value = Formula> {
    formula(n).prop_filter("consistent", |f| semantics::is_consistent(f).unwrap())
}

pub fn parse(s: &str) -> Formula {
    kbmerge::parse(s).unwrap()
}

pub fn vocab(names: &[&str]) -> Vocabulary {
    Vocabulary::new(names.iter().copied())
}

/// Every interpretation over `v`, in binary order.
pub fn all_interpretations(v: &Vocabulary) -> Vec<Interpretation> {
    (0..1u64 << v.len()).map(|m| Interpretation::from_mask(v.clone(), m)).collect()
}

/// Models of `f` over `v` as plain masks, by direct evaluation.
pub fn brute_models(f: &Formula, v: &Vocabulary) -> Vec<u64> {
    all_interpretations(v)
        .into_iter()
        .filter(|w| semantics::evaluate(f, w).unwrap())
        .map(|w| w.mask())
        .collect()
}

/// Hamming distance from `w` to the nearest mask in `set`.
pub fn brute_distance(w: u64, set: &[u64]) -> Option<u32> {
    set.iter().map(|m| (w ^ m).count_ones()).min()
}
