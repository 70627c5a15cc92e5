//! Variable forgetting `∃V.φ` and dilation `Dⁿ(φ)`.
//!
//! Forgetting is computed on the syntax, `∃{p}.φ = φ[p:=⊥] ∨ φ[p:=⊤]`, one
//! variable at a time, with constants folded after each step. Dilation is
//! computed on models, as the Hamming ball of radius `n` around `mod(φ)`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::formula::{Formula, Vocabulary};
use crate::semantics::{self, bit_of, ModelSet, SemanticsError};

/// A set of variables to forget, kept sorted and duplicate free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ForgetSet(Vec<String>);

impl ForgetSet {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        names.sort();
        names.dedup();
        ForgetSet(names)
    }

    pub fn empty() -> Self {
        ForgetSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.iter().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.binary_search_by(|n| n.as_str().cmp(name)).is_ok()
    }

    pub fn is_subset(&self, other: &ForgetSet) -> bool {
        self.iter().all(|n| other.contains(n))
    }

    pub fn without(&self, name: &str) -> ForgetSet {
        ForgetSet(self.0.iter().filter(|n| *n != name).cloned().collect())
    }
}

impl From<&Vocabulary> for ForgetSet {
    fn from(v: &Vocabulary) -> Self {
        ForgetSet(v.names().to_vec())
    }
}

impl fmt::Display for ForgetSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(", "))
    }
}

/// `∃{p}.φ` with constants folded.
pub fn forget_one(formula: &Formula, var: &str) -> Formula {
    Formula::Or(vec![
        formula.substitute(var, false),
        formula.substitute(var, true),
    ])
    .fold_constants()
}

/// `∃V.φ`, forgetting the variables of `vars` in sorted order.
pub fn forget(formula: &Formula, vars: &ForgetSet) -> Formula {
    forget_in_order(formula, vars.iter())
}

/// `∃V.φ` with an explicit processing order.
pub fn forget_in_order<'a>(formula: &Formula, order: impl IntoIterator<Item = &'a str>) -> Formula {
    order
        .into_iter()
        .fold(formula.clone(), |acc, var| forget_one(&acc, var))
}

/// `mod(φ) ∪ { switch(ω, p) | ω ∈ mod(φ) }`.
pub fn switch_models(set: &ModelSet, var: &str) -> semantics::Result<ModelSet> {
    let vocabulary = set.vocabulary();
    let i = vocabulary
        .index_of(var)
        .ok_or_else(|| SemanticsError::UnknownVariable(var.to_owned()))?;
    let bit = bit_of(vocabulary.len(), i);
    let flipped = ModelSet::from_masks(vocabulary.clone(), set.masks().map(|m| m ^ bit));
    Ok(set.union(&flipped))
}

/// Models of `Dⁿ(φ)` over `vocabulary`: every interpretation within
/// distance `n` of a model of `φ`.
pub fn dilate_models(
    formula: &Formula,
    n: u32,
    vocabulary: &Vocabulary,
) -> semantics::Result<ModelSet> {
    let base = semantics::models(formula, vocabulary)?;
    let table = semantics::distance_table(&base).ok_or(SemanticsError::Inconsistent)?;
    Ok(ModelSet::from_masks(
        vocabulary.clone(),
        (0..table.len() as u64).filter(|m| table[*m as usize] <= n),
    ))
}

/// `Dⁿ(φ)` as the canonical DNF of its models over `vocabulary`.
pub fn dilate(formula: &Formula, n: u32, vocabulary: &Vocabulary) -> semantics::Result<Formula> {
    Ok(semantics::to_dnf(&dilate_models(formula, n, vocabulary)?))
}

/// All `k`-subsets of `names` (assumed sorted), in lexicographic order of
/// their sorted member lists.
pub fn subsets_of_size(names: &[String], k: usize) -> Vec<ForgetSet> {
    fn go(names: &[String], k: usize, start: usize, cur: &mut Vec<String>, out: &mut Vec<ForgetSet>) {
        if cur.len() == k {
            out.push(ForgetSet(cur.clone()));
            return;
        }
        for i in start..names.len() {
            if names.len() - i < k - cur.len() {
                break;
            }
            cur.push(names[i].clone());
            go(names, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= names.len() {
        go(names, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// All subsets of `names` by ascending cardinality, lexicographic within a
/// cardinality.
pub fn all_subsets(names: &[String]) -> Vec<ForgetSet> {
    (0..=names.len())
        .flat_map(|k| subsets_of_size(names, k))
        .collect()
}

/// Dilation rebuilt from forgetting:
/// `∨ { ∃V.φ : V ⊆ Var(φ), |V| = min(n, |Var(φ)|) }`.
pub fn dilate_via_forgetting(formula: &Formula, n: u32) -> semantics::Result<Formula> {
    if !semantics::is_consistent(formula)? {
        return Err(SemanticsError::Inconsistent);
    }
    let vars = formula.variables();
    let size = (n as usize).min(vars.len());
    let parts: Vec<Formula> = subsets_of_size(vars.names(), size)
        .par_iter()
        .map(|v| forget(formula, v))
        .collect();
    Ok(Formula::disj(parts).fold_constants())
}

/// `d(φ, ψ)`: minimum distance between a model of `φ` and a model of `ψ`
/// over `Var(φ) ∪ Var(ψ)`. Undefined, hence an error, when either side is
/// inconsistent.
pub fn formula_distance(phi: &Formula, psi: &Formula) -> semantics::Result<u32> {
    let v = phi.variables().union(&psi.variables());
    let a = semantics::models(phi, &v)?;
    let b = semantics::models(psi, &v)?;
    let table = semantics::distance_table(&b).ok_or(SemanticsError::Inconsistent)?;
    a.masks()
        .map(|m| table[m as usize])
        .min()
        .ok_or(SemanticsError::Inconsistent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;
    use crate::semantics::{equivalent, models};

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn fs(names: &[&str]) -> ForgetSet {
        ForgetSet::new(names.iter().copied())
    }

    fn voc(names: &[&str]) -> Vocabulary {
        Vocabulary::new(names.iter().copied())
    }

    #[test]
    fn forget_examples() {
        let f = p("(a | b) & !c");
        assert_eq!(forget(&f, &ForgetSet::empty()), f);
        assert!(equivalent(&forget(&p("p & q"), &fs(&["p"])), &p("q")).unwrap());
        assert!(equivalent(&forget(&f, &fs(&["z"])), &f).unwrap());
        assert_eq!(forget(&p("S & T & P"), &fs(&["S", "T", "P"])), Formula::top());
        assert_eq!(forget(&p("p & !p"), &fs(&["p"])), Formula::bottom());
    }

    #[test]
    fn forget_drops_the_variables() {
        let f = p("(a -> b) <-> (c | !a)");
        let g = forget(&f, &fs(&["a", "c"]));
        assert!(g.variables().is_subset(&voc(&["b"])));
    }

    #[test]
    fn switch_models_examples() {
        let v = voc(&["p", "q"]);
        assert!(switch_models(&ModelSet::empty(v.clone()), "p").unwrap().is_empty());
        let single = ModelSet::from_masks(v.clone(), [0b11]);
        let switched = switch_models(&single, "p").unwrap();
        assert_eq!(switched.masks().collect::<Vec<_>>(), vec![0b01, 0b11]);
        assert!(switch_models(&single, "r").is_err());

        let f = p("(p & q) | (!p & !q & r)");
        let v = voc(&["p", "q", "r"]);
        assert_eq!(
            models(&forget(&f, &fs(&["p"])), &v).unwrap(),
            switch_models(&models(&f, &v).unwrap(), "p").unwrap()
        );
    }

    #[test]
    fn dilate_examples() {
        let v = voc(&["p", "q"]);
        let f = p("p & q");
        assert!(equivalent(&dilate(&f, 0, &v).unwrap(), &f).unwrap());
        assert!(equivalent(&dilate(&f, 1, &v).unwrap(), &p("p | q")).unwrap());
        assert_eq!(dilate_models(&f, 3, &v).unwrap(), ModelSet::full(v.clone()));
        assert_eq!(
            dilate(&p("p & !p"), 1, &voc(&["p"])),
            Err(SemanticsError::Inconsistent)
        );
    }

    #[test]
    fn dilation_through_forgetting() {
        let f = p("p & q");
        let d1 = dilate_via_forgetting(&f, 1).unwrap();
        assert!(equivalent(&d1, &p("p | q")).unwrap());
        assert_eq!(dilate_via_forgetting(&f, 2).unwrap(), Formula::top());
        assert_eq!(dilate_via_forgetting(&f, 7).unwrap(), Formula::top());
        assert!(dilate_via_forgetting(&p("p & !p"), 1).is_err());
    }

    #[test]
    fn subset_enumeration_order() {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let all: Vec<String> = all_subsets(&names).iter().map(|s| s.to_string()).collect();
        assert_eq!(
            all,
            ["{}", "{a}", "{b}", "{c}", "{a, b}", "{a, c}", "{b, c}", "{a, b, c}"]
        );
        assert!(subsets_of_size(&names, 4).is_empty());
    }

    #[test]
    fn formula_distance_examples() {
        assert_eq!(formula_distance(&p("p & q"), &p("!p & !q")).unwrap(), 2);
        assert_eq!(formula_distance(&p("p"), &p("q")).unwrap(), 0);
        assert!(formula_distance(&p("p & !p"), &p("q")).is_err());
        assert!(formula_distance(&p("q"), &p("p & !p")).is_err());
    }

    #[test]
    fn conjunction_with_forgotten_side_is_not_preserved() {
        // ∃{p}.(p∧q) ∧ ¬p is q∧¬p, while ∃{p}.(p∧q) ∧ ∃{p}.¬p is q.
        let phi = p("p & q");
        let phi2 = p("!p");
        let v = fs(&["p"]);
        let lhs = Formula::conj([forget(&phi, &v), phi2.clone()]);
        let rhs = Formula::conj([forget(&phi, &v), forget(&phi2, &v)]);
        assert!(equivalent(&lhs, &p("q & !p")).unwrap());
        assert!(equivalent(&rhs, &p("q")).unwrap());
        assert!(!equivalent(&lhs, &rhs).unwrap());
    }
}
