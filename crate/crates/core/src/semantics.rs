//! Brute-force semantics: interpretations, model enumeration, Dalal
//! distance, entailment and canonical DNF.
//!
//! An interpretation over a vocabulary of size `n` is encoded as an `n`-bit
//! mask in which the lexicographically first variable is the most
//! significant bit, so ascending mask order is the enumeration order.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::formula::{Formula, Vocabulary};

pub const DEFAULT_VOCABULARY_CAP: usize = 24;
/// Masks are `u64` and model sets are dense bitsets, which bounds any
/// override of the cap.
pub const HARD_VOCABULARY_LIMIT: usize = 32;

static VOCABULARY_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_VOCABULARY_CAP);

/// Largest vocabulary the enumerator accepts.
pub fn vocabulary_cap() -> usize {
    VOCABULARY_CAP.load(Ordering::Relaxed)
}

/// Overrides the enumeration cap for the whole process. Values above
/// [`HARD_VOCABULARY_LIMIT`] are clamped.
pub fn set_vocabulary_cap(cap: usize) {
    VOCABULARY_CAP.store(cap.min(HARD_VOCABULARY_LIMIT), Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("variable `{0}` is not in the vocabulary")]
    UnknownVariable(String),
    #[error("vocabulary of {size} variables exceeds the enumeration cap of {cap}")]
    VocabularyTooLarge { size: usize, cap: usize },
    #[error("interpretations are over different vocabularies")]
    VocabularyMismatch,
    #[error("formula is inconsistent")]
    Inconsistent,
}

pub type Result<T> = std::result::Result<T, SemanticsError>;

fn check_cap(vocabulary: &Vocabulary) -> Result<()> {
    let cap = vocabulary_cap();
    if vocabulary.len() > cap {
        return Err(SemanticsError::VocabularyTooLarge {
            size: vocabulary.len(),
            cap,
        });
    }
    Ok(())
}

/// A total truth assignment over a vocabulary.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interpretation {
    vocabulary: Vocabulary,
    bits: u64,
}

impl Interpretation {
    pub fn from_mask(vocabulary: Vocabulary, bits: u64) -> Self {
        let n = vocabulary.len();
        debug_assert!(n >= 64 || bits >> n == 0);
        Interpretation { vocabulary, bits }
    }

    /// Builds the interpretation that makes exactly `true_vars` true.
    pub fn from_true_set<'a>(
        vocabulary: Vocabulary,
        true_vars: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self> {
        let mut bits = 0;
        for name in true_vars {
            let i = vocabulary
                .index_of(name)
                .ok_or_else(|| SemanticsError::UnknownVariable(name.to_owned()))?;
            bits |= bit_of(vocabulary.len(), i);
        }
        Ok(Interpretation { vocabulary, bits })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn mask(&self) -> u64 {
        self.bits
    }

    pub fn value(&self, name: &str) -> Option<bool> {
        let i = self.vocabulary.index_of(name)?;
        Some(self.bits & bit_of(self.vocabulary.len(), i) != 0)
    }

    /// `switch(ω, p)`: the same assignment with `p` flipped.
    pub fn switch(&self, name: &str) -> Result<Interpretation> {
        let i = self
            .vocabulary
            .index_of(name)
            .ok_or_else(|| SemanticsError::UnknownVariable(name.to_owned()))?;
        Ok(Interpretation {
            vocabulary: self.vocabulary.clone(),
            bits: self.bits ^ bit_of(self.vocabulary.len(), i),
        })
    }

    /// Literals in vocabulary order, e.g. `!I P !S T`.
    pub fn literals(&self) -> Vec<(String, bool)> {
        self.vocabulary
            .iter()
            .enumerate()
            .map(|(i, n)| (n.to_owned(), self.bits & bit_of(self.vocabulary.len(), i) != 0))
            .collect()
    }
}

impl fmt::Debug for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .literals()
            .into_iter()
            .map(|(n, v)| if v { n } else { format!("!{n}") })
            .collect();
        write!(f, "{{{}}}", parts.join(" "))
    }
}

#[inline]
pub(crate) fn bit_of(len: usize, index: usize) -> u64 {
    1u64 << (len - 1 - index)
}

/// Set of interpretations over one vocabulary, stored as a dense bitset
/// indexed by mask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModelSet {
    vocabulary: Vocabulary,
    words: Vec<u64>,
}

fn word_count(vars: usize) -> usize {
    (1usize << vars).div_ceil(64)
}

impl ModelSet {
    pub fn empty(vocabulary: Vocabulary) -> Self {
        let words = vec![0; word_count(vocabulary.len())];
        ModelSet { vocabulary, words }
    }

    /// Every interpretation over the vocabulary.
    pub fn full(vocabulary: Vocabulary) -> Self {
        let size = 1u64 << vocabulary.len();
        ModelSet::from_masks(vocabulary, 0..size)
    }

    pub fn from_masks(vocabulary: Vocabulary, masks: impl IntoIterator<Item = u64>) -> Self {
        let mut set = ModelSet::empty(vocabulary);
        for m in masks {
            set.insert(m);
        }
        set
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn insert(&mut self, mask: u64) {
        debug_assert!(mask < 1u64 << self.vocabulary.len());
        self.words[(mask / 64) as usize] |= 1 << (mask % 64);
    }

    pub fn contains(&self, mask: u64) -> bool {
        (mask >> self.vocabulary.len()) == 0 && self.words[(mask / 64) as usize] & (1 << (mask % 64)) != 0
    }

    pub fn contains_interpretation(&self, omega: &Interpretation) -> bool {
        omega.vocabulary == self.vocabulary && self.contains(omega.bits)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    /// Member masks in ascending order.
    pub fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(wi as u64 * 64 + bit)
            })
        })
    }

    pub fn interpretations(&self) -> impl Iterator<Item = Interpretation> + '_ {
        self.masks()
            .map(|m| Interpretation::from_mask(self.vocabulary.clone(), m))
    }

    fn zip_with(&self, other: &ModelSet, op: impl Fn(u64, u64) -> u64) -> ModelSet {
        assert_eq!(self.vocabulary, other.vocabulary, "model sets over different vocabularies");
        ModelSet {
            vocabulary: self.vocabulary.clone(),
            words: self.words.iter().zip(&other.words).map(|(a, b)| op(*a, *b)).collect(),
        }
    }

    /// Both operands must share the vocabulary.
    pub fn union(&self, other: &ModelSet) -> ModelSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &ModelSet) -> ModelSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn is_subset(&self, other: &ModelSet) -> bool {
        assert_eq!(self.vocabulary, other.vocabulary, "model sets over different vocabularies");
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &ModelSet) -> bool {
        assert_eq!(self.vocabulary, other.vocabulary, "model sets over different vocabularies");
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Re-expresses the set over a wider vocabulary; the added variables are
    /// unconstrained.
    pub fn extend_to(&self, wider: &Vocabulary) -> Result<ModelSet> {
        if !self.vocabulary.is_subset(wider) {
            return Err(SemanticsError::VocabularyMismatch);
        }
        check_cap(wider)?;
        let positions: Vec<u64> = self
            .vocabulary
            .iter()
            .map(|n| bit_of(wider.len(), wider.index_of(n).unwrap()))
            .collect();
        let narrow = self.vocabulary.len();
        let mut out = ModelSet::empty(wider.clone());
        for wide in 0..(1u64 << wider.len()) {
            let mut m = 0;
            for (i, &pos) in positions.iter().enumerate() {
                if wide & pos != 0 {
                    m |= bit_of(narrow, i);
                }
            }
            if self.contains(m) {
                out.insert(wide);
            }
        }
        Ok(out)
    }

    /// Projection onto a sub-vocabulary (existential over the dropped variables).
    pub fn project(&self, narrower: &Vocabulary) -> Result<ModelSet> {
        if !narrower.is_subset(&self.vocabulary) {
            return Err(SemanticsError::VocabularyMismatch);
        }
        let positions: Vec<u64> = narrower
            .iter()
            .map(|n| bit_of(self.vocabulary.len(), self.vocabulary.index_of(n).unwrap()))
            .collect();
        let mut out = ModelSet::empty(narrower.clone());
        for wide in self.masks() {
            let mut m = 0;
            for (i, &pos) in positions.iter().enumerate() {
                if wide & pos != 0 {
                    m |= bit_of(narrower.len(), i);
                }
            }
            out.insert(m);
        }
        Ok(out)
    }
}

impl fmt::Debug for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.interpretations()).finish()
    }
}

/// Formula with atoms resolved to mask bits, for fast repeated evaluation.
#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    Const(bool),
    Bit(u64),
    Not(Box<Compiled>),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    pub(crate) fn new(formula: &Formula, vocabulary: &Vocabulary) -> Result<Self> {
        let n = vocabulary.len();
        let rec = |f: &Formula| Compiled::new(f, vocabulary);
        Ok(match formula {
            Formula::Const(b) => Compiled::Const(*b),
            Formula::Atom(name) => {
                let i = vocabulary
                    .index_of(name)
                    .ok_or_else(|| SemanticsError::UnknownVariable(name.clone()))?;
                Compiled::Bit(bit_of(n, i))
            }
            Formula::Not(inner) => Compiled::Not(Box::new(rec(inner)?)),
            Formula::And(parts) => Compiled::And(parts.iter().map(rec).collect::<Result<_>>()?),
            Formula::Or(parts) => Compiled::Or(parts.iter().map(rec).collect::<Result<_>>()?),
            Formula::Implies(l, r) => Compiled::Implies(Box::new(rec(l)?), Box::new(rec(r)?)),
            Formula::Iff(l, r) => Compiled::Iff(Box::new(rec(l)?), Box::new(rec(r)?)),
        })
    }

    pub(crate) fn eval(&self, mask: u64) -> bool {
        match self {
            Compiled::Const(b) => *b,
            Compiled::Bit(bit) => mask & bit != 0,
            Compiled::Not(inner) => !inner.eval(mask),
            Compiled::And(parts) => parts.iter().all(|p| p.eval(mask)),
            Compiled::Or(parts) => parts.iter().any(|p| p.eval(mask)),
            Compiled::Implies(l, r) => !l.eval(mask) || r.eval(mask),
            Compiled::Iff(l, r) => l.eval(mask) == r.eval(mask),
        }
    }
}

/// Classical truth value of `formula` under `omega`.
pub fn evaluate(formula: &Formula, omega: &Interpretation) -> Result<bool> {
    Ok(Compiled::new(formula, &omega.vocabulary)?.eval(omega.bits))
}

/// Above this many assignments the enumeration is split across threads.
const PARALLEL_THRESHOLD: usize = 1 << 14;

/// `mod(φ)` over `vocabulary`, by exhaustive enumeration.
pub fn models(formula: &Formula, vocabulary: &Vocabulary) -> Result<ModelSet> {
    check_cap(vocabulary)?;
    let compiled = Compiled::new(formula, vocabulary)?;
    let size = 1u64 << vocabulary.len();
    let fill = |wi: usize| {
        let base = wi as u64 * 64;
        let mut word = 0u64;
        for b in 0..64.min(size - base.min(size)) {
            if compiled.eval(base + b) {
                word |= 1 << b;
            }
        }
        word
    };
    let count = word_count(vocabulary.len());
    let words = if (size as usize) < PARALLEL_THRESHOLD {
        (0..count).map(fill).collect()
    } else {
        (0..count).into_par_iter().map(fill).collect()
    };
    Ok(ModelSet {
        vocabulary: vocabulary.clone(),
        words,
    })
}

/// Models over the formula's own variables.
pub fn own_models(formula: &Formula) -> Result<ModelSet> {
    models(formula, &formula.variables())
}

pub fn is_consistent(formula: &Formula) -> Result<bool> {
    Ok(!own_models(formula)?.is_empty())
}

/// Dalal (Hamming) distance between two interpretations.
pub fn dalal(a: &Interpretation, b: &Interpretation) -> Result<u32> {
    if a.vocabulary != b.vocabulary {
        return Err(SemanticsError::VocabularyMismatch);
    }
    Ok((a.bits ^ b.bits).count_ones())
}

/// `d(ω, M)`: minimum Hamming distance from `mask` to a member of `set`;
/// `None` when the set is empty.
pub fn distance_to_models(mask: u64, set: &ModelSet) -> Option<u32> {
    set.masks().map(|m| (m ^ mask).count_ones()).min()
}

/// `d(ω, φ)` over the union of `ω`'s vocabulary and `Var(φ)`. Fails on an
/// inconsistent `φ`, where the minimum is undefined.
pub fn distance_to_formula(omega: &Interpretation, formula: &Formula) -> Result<u32> {
    if !formula.variables().is_subset(&omega.vocabulary) {
        let missing = formula.variables().difference(&omega.vocabulary);
        return Err(SemanticsError::UnknownVariable(missing.names()[0].clone()));
    }
    let set = models(formula, &omega.vocabulary)?;
    distance_to_models(omega.bits, &set).ok_or(SemanticsError::Inconsistent)
}

/// Distance from every interpretation to the nearest member of `set`,
/// computed by breadth-first search over the hypercube. Indexed by mask.
pub fn distance_table(set: &ModelSet) -> Option<Vec<u32>> {
    if set.is_empty() {
        return None;
    }
    let n = set.vocabulary.len();
    let size = 1usize << n;
    let mut dist = vec![u32::MAX; size];
    let mut frontier: Vec<u64> = set.masks().collect();
    for &m in &frontier {
        dist[m as usize] = 0;
    }
    let mut level = 0;
    while !frontier.is_empty() {
        level += 1;
        let mut next = Vec::new();
        for m in frontier {
            for i in 0..n {
                let nb = m ^ (1 << i);
                if dist[nb as usize] == u32::MAX {
                    dist[nb as usize] = level;
                    next.push(nb);
                }
            }
        }
        frontier = next;
    }
    Some(dist)
}

/// `φ ⊨ ψ`, decided over `Var(φ) ∪ Var(ψ)`.
pub fn entails(phi: &Formula, psi: &Formula) -> Result<bool> {
    let v = phi.variables().union(&psi.variables());
    Ok(models(phi, &v)?.is_subset(&models(psi, &v)?))
}

/// `φ ≡ ψ`, decided over `Var(φ) ∪ Var(ψ)`.
pub fn equivalent(phi: &Formula, psi: &Formula) -> Result<bool> {
    let v = phi.variables().union(&psi.variables());
    Ok(models(phi, &v)? == models(psi, &v)?)
}

/// Some interpretation on which the two formulas disagree, if any.
pub fn distinguishing_model(phi: &Formula, psi: &Formula) -> Result<Option<Interpretation>> {
    let v = phi.variables().union(&psi.variables());
    let (a, b) = (models(phi, &v)?, models(psi, &v)?);
    let diff = a.zip_with(&b, |x, y| x ^ y);
    let first = diff.interpretations().next();
    Ok(first)
}

/// The full minterm of one interpretation; `true` over the empty vocabulary.
pub fn minterm(omega: &Interpretation) -> Formula {
    Formula::conj(
        omega
            .literals()
            .into_iter()
            .map(|(name, value)| Formula::literal(name, value)),
    )
}

/// Canonical DNF: one full minterm per member in ascending mask order;
/// the empty set is `false`.
pub fn to_dnf(set: &ModelSet) -> Formula {
    Formula::disj(set.interpretations().map(|omega| minterm(&omega)))
}
