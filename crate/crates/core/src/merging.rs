//! Merging operators over a profile of knowledge bases under an integrity
//! constraint.
//!
//! * `Σ`, `Max`, `GMax` select the models of `μ` minimal for the summed,
//!   maximal, or descending-sorted vector of Dalal distances.
//! * The `*Forget` variants compute the same three operators as
//!   disjunctions of conjunctions of forgotten knowledge bases, searching
//!   for the least `k` (or least tuple `T`) that makes the disjunction
//!   consistent.
//! * `F1`/`F2` forget one shared variable set from every knowledge base,
//!   minimal by cardinality (`F1`) or by inclusion (`F2`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forgetting::{all_subsets, forget, subsets_of_size, ForgetSet};
use crate::formula::{Formula, Vocabulary};
use crate::semantics::{self, ModelSet, SemanticsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("a profile needs at least one knowledge base")]
    EmptyProfile,
    #[error("knowledge base #{index} is inconsistent: {formula}")]
    InconsistentKb { index: usize, formula: Formula },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

pub type Result<T> = std::result::Result<T, MergeError>;

/// A multiset of consistent knowledge bases `Φ` and a constraint `μ`.
///
/// Knowledge bases keep their position; duplicates are meaningful.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    kbs: Vec<Formula>,
    constraint: Formula,
    vocabulary: Vocabulary,
}

impl Profile {
    pub fn new(kbs: Vec<Formula>, constraint: Formula) -> Result<Self> {
        Profile::with_vocabulary(kbs, constraint, &Vocabulary::empty())
    }

    /// Like [`Profile::new`], with the working vocabulary widened by `extra`.
    pub fn with_vocabulary(kbs: Vec<Formula>, constraint: Formula, extra: &Vocabulary) -> Result<Self> {
        if kbs.is_empty() {
            return Err(MergeError::EmptyProfile);
        }
        let vocabulary = Vocabulary::of_all(kbs.iter().chain([&constraint]), extra);
        if vocabulary.len() > semantics::vocabulary_cap() {
            return Err(SemanticsError::VocabularyTooLarge {
                size: vocabulary.len(),
                cap: semantics::vocabulary_cap(),
            }
            .into());
        }
        for (index, kb) in kbs.iter().enumerate() {
            if !semantics::is_consistent(kb)? {
                return Err(MergeError::InconsistentKb {
                    index,
                    formula: kb.clone(),
                });
            }
        }
        Ok(Profile {
            kbs,
            constraint,
            vocabulary,
        })
    }

    pub fn kbs(&self) -> &[Formula] {
        &self.kbs
    }

    pub fn constraint(&self) -> &Formula {
        &self.constraint
    }

    /// Working vocabulary: `Var(Φ) ∪ Var(μ)` plus any declared extras.
    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    /// `Var(Φ)`, the variables of the knowledge bases alone.
    pub fn kb_vocabulary(&self) -> Vocabulary {
        Vocabulary::of_all(&self.kbs, &Vocabulary::empty())
    }

    /// Declared variables that occur in no formula.
    pub fn extra_vocabulary(&self) -> Vocabulary {
        let used = Vocabulary::of_all(self.kbs.iter().chain([&self.constraint]), &Vocabulary::empty());
        self.vocabulary.difference(&used)
    }

    /// `⋀Φ`.
    pub fn conjunction(&self) -> Formula {
        Formula::conj(self.kbs.iter().cloned())
    }

    pub fn with_constraint(&self, constraint: Formula) -> Result<Profile> {
        Profile::with_vocabulary(self.kbs.clone(), constraint, &self.vocabulary)
    }

    /// Same knowledge bases and constraint over a wider vocabulary.
    pub fn widened(&self, extra: &Vocabulary) -> Result<Profile> {
        Profile::with_vocabulary(self.kbs.clone(), self.constraint.clone(), &self.vocabulary.union(extra))
    }

    /// Multiset union `Φ ⊔ Φ'`, keeping this profile's constraint.
    pub fn concat(&self, other: &Profile) -> Result<Profile> {
        let kbs = self.kbs.iter().chain(&other.kbs).cloned().collect();
        Profile::with_vocabulary(kbs, self.constraint.clone(), &self.vocabulary.union(&other.vocabulary))
    }

    /// `Φⁿ`: every knowledge base repeated `n` times (`n ≥ 1`).
    pub fn repeated(&self, n: usize) -> Result<Profile> {
        let kbs = std::iter::repeat_n(&self.kbs, n.max(1)).flatten().cloned().collect();
        Profile::with_vocabulary(kbs, self.constraint.clone(), &self.vocabulary)
    }
}

/// The forgetting sets selected by `F1` or `F2`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ForgettingFamily {
    pub sets: Vec<ForgetSet>,
}

impl fmt::Display for ForgettingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sets.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operator {
    Sigma,
    Max,
    Gmax,
    SigmaForget,
    MaxForget,
    GmaxForget,
    F1,
    F2,
}

impl Operator {
    pub const ALL: [Operator; 8] = [
        Operator::Sigma,
        Operator::Max,
        Operator::Gmax,
        Operator::SigmaForget,
        Operator::MaxForget,
        Operator::GmaxForget,
        Operator::F1,
        Operator::F2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operator::Sigma => "sigma",
            Operator::Max => "max",
            Operator::Gmax => "gmax",
            Operator::SigmaForget => "sigma-forget",
            Operator::MaxForget => "max-forget",
            Operator::GmaxForget => "gmax-forget",
            Operator::F1 => "f1",
            Operator::F2 => "f2",
        }
    }

    pub fn apply(self, profile: &Profile) -> Result<MergeResult> {
        match self {
            Operator::Sigma => merge_sigma(profile),
            Operator::Max => merge_max(profile),
            Operator::Gmax => merge_gmax(profile),
            Operator::SigmaForget => merge_sigma_forget(profile),
            Operator::MaxForget => merge_max_forget(profile),
            Operator::GmaxForget => merge_gmax_forget(profile),
            Operator::F1 => merge_f1(profile),
            Operator::F2 => merge_f2(profile),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown operator `{0}`")]
pub struct UnknownOperator(pub String);

impl FromStr for Operator {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Operator::ALL
            .into_iter()
            .find(|op| op.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownOperator(s.to_owned()))
    }
}

/// Operator-specific evidence for a result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostics {
    /// Least aggregated distance `k` (Σ and Max).
    Distance(u32),
    /// Least descending-sorted distance tuple `T` (GMax).
    Tuple(Vec<u32>),
    /// Selected forgetting sets (F1 and F2).
    Family(ForgettingFamily),
    /// The constraint was inconsistent; nothing was selected.
    Degenerate,
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostics::Distance(k) => write!(f, "k = {k}"),
            Diagnostics::Tuple(t) => {
                let parts: Vec<String> = t.iter().map(ToString::to_string).collect();
                write!(f, "T = ({})", parts.join(", "))
            }
            Diagnostics::Family(fs) => write!(f, "FS = {fs}"),
            Diagnostics::Degenerate => f.write_str("inconsistent constraint"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeResult {
    pub operator: Operator,
    pub models: ModelSet,
    /// Canonical DNF of `models`.
    pub formula: Formula,
    pub diagnostics: Diagnostics,
    /// Set when `μ` is inconsistent and the result is `⊥` by convention.
    pub degenerate: bool,
}

impl MergeResult {
    fn new(operator: Operator, models: ModelSet, diagnostics: Diagnostics) -> Self {
        MergeResult {
            operator,
            formula: semantics::to_dnf(&models),
            models,
            diagnostics,
            degenerate: false,
        }
    }

    fn degenerate(operator: Operator, vocabulary: &Vocabulary) -> Self {
        let models = ModelSet::empty(vocabulary.clone());
        MergeResult {
            operator,
            formula: Formula::bottom(),
            models,
            diagnostics: Diagnostics::Degenerate,
            degenerate: true,
        }
    }

    pub fn family(&self) -> Option<&ForgettingFamily> {
        match &self.diagnostics {
            Diagnostics::Family(fs) => Some(fs),
            _ => None,
        }
    }
}

/// `mod(μ)` or `None` when the constraint is inconsistent.
fn constraint_models(profile: &Profile) -> Result<Option<ModelSet>> {
    let mu = semantics::models(&profile.constraint, &profile.vocabulary)?;
    Ok(if mu.is_empty() { None } else { Some(mu) })
}

/// Distances `d(ω, φᵢ)` for every interpretation `ω`, one table per KB.
fn distance_tables(profile: &Profile) -> Result<Vec<Vec<u32>>> {
    profile
        .kbs
        .iter()
        .map(|kb| {
            let set = semantics::models(kb, &profile.vocabulary)?;
            // KBs are consistent by construction of the profile.
            Ok(semantics::distance_table(&set).expect("consistent knowledge base"))
        })
        .collect()
}

/// Keeps the models of `μ` whose score is minimal.
fn select_min<K: Ord + Clone>(mu: &ModelSet, score: impl Fn(u64) -> K) -> (ModelSet, K) {
    let scored: Vec<(u64, K)> = mu.masks().map(|m| (m, score(m))).collect();
    let best = scored.iter().map(|(_, k)| k).min().cloned().expect("nonempty constraint");
    let chosen = scored.into_iter().filter(|(_, k)| *k == best).map(|(m, _)| m);
    (ModelSet::from_masks(mu.vocabulary().clone(), chosen), best)
}

/// `Δ^Σ`: models of `μ` minimising `Σᵢ d(ω, φᵢ)`.
pub fn merge_sigma(profile: &Profile) -> Result<MergeResult> {
    let Some(mu) = constraint_models(profile)? else {
        return Ok(MergeResult::degenerate(Operator::Sigma, &profile.vocabulary));
    };
    let tables = distance_tables(profile)?;
    let (models, k) = select_min(&mu, |m| tables.iter().map(|t| t[m as usize]).sum::<u32>());
    Ok(MergeResult::new(Operator::Sigma, models, Diagnostics::Distance(k)))
}

/// `Δ^Max`: models of `μ` minimising `maxᵢ d(ω, φᵢ)`.
pub fn merge_max(profile: &Profile) -> Result<MergeResult> {
    let Some(mu) = constraint_models(profile)? else {
        return Ok(MergeResult::degenerate(Operator::Max, &profile.vocabulary));
    };
    let tables = distance_tables(profile)?;
    let (models, k) = select_min(&mu, |m| tables.iter().map(|t| t[m as usize]).max().unwrap());
    Ok(MergeResult::new(Operator::Max, models, Diagnostics::Distance(k)))
}

/// `Δ^GMax`: models of `μ` whose descending-sorted distance vector is
/// lexicographically least.
pub fn merge_gmax(profile: &Profile) -> Result<MergeResult> {
    let Some(mu) = constraint_models(profile)? else {
        return Ok(MergeResult::degenerate(Operator::Gmax, &profile.vocabulary));
    };
    let tables = distance_tables(profile)?;
    let (models, tuple) = select_min(&mu, |m| {
        let mut v: Vec<u32> = tables.iter().map(|t| t[m as usize]).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    });
    Ok(MergeResult::new(Operator::Gmax, models, Diagnostics::Tuple(tuple)))
}

/// Models of `∃V.φᵢ` for the KBs of a profile, computed syntactically and
/// memoised by variable set.
struct ForgetCache<'a> {
    profile: &'a Profile,
    by_set: BTreeMap<ForgetSet, Vec<ModelSet>>,
    /// `∨_{|V|=c} ∃V.φᵢ` indexed by `[i][c]`.
    by_size: Vec<Vec<Option<ModelSet>>>,
    pool: Vec<String>,
}

impl<'a> ForgetCache<'a> {
    fn new(profile: &'a Profile, pool: Vocabulary) -> Self {
        ForgetCache {
            profile,
            by_set: BTreeMap::new(),
            by_size: vec![vec![None; pool.len() + 1]; profile.kbs.len()],
            pool: pool.names().to_vec(),
        }
    }

    fn forgotten(&mut self, set: &ForgetSet) -> Result<&[ModelSet]> {
        if !self.by_set.contains_key(set) {
            let vocabulary = &self.profile.vocabulary;
            let sets = self
                .profile
                .kbs
                .iter()
                .map(|kb| Ok(semantics::models(&forget(kb, set), vocabulary)?))
                .collect::<Result<Vec<_>>>()?;
            self.by_set.insert(set.clone(), sets);
        }
        Ok(&self.by_set[set])
    }

    /// `⋀ᵢ ∃V.φᵢ ∧ μ` for one shared `V`.
    fn shared(&mut self, set: &ForgetSet, mu: &ModelSet) -> Result<ModelSet> {
        let forgotten = self.forgotten(set)?;
        Ok(forgotten.iter().fold(mu.clone(), |acc, s| acc.intersection(s)))
    }

    /// `∨ { ∃V.φᵢ : V ⊆ pool, |V| = size }`.
    fn dilation(&mut self, kb: usize, size: usize) -> Result<ModelSet> {
        if let Some(set) = &self.by_size[kb][size] {
            return Ok(set.clone());
        }
        let mut acc = ModelSet::empty(self.profile.vocabulary.clone());
        for v in subsets_of_size(&self.pool.clone(), size) {
            acc = acc.union(&self.forgotten(&v)?[kb]);
        }
        self.by_size[kb][size] = Some(acc.clone());
        Ok(acc)
    }

    /// `⋀ᵢ (∨_{|Vᵢ|=cᵢ} ∃Vᵢ.φᵢ) ∧ μ`.
    fn conjoin_sizes(&mut self, sizes: &[usize], mu: &ModelSet) -> Result<ModelSet> {
        let mut acc = mu.clone();
        for (i, &c) in sizes.iter().enumerate() {
            if acc.is_empty() {
                break;
            }
            acc = acc.intersection(&self.dilation(i, c)?);
        }
        Ok(acc)
    }
}

/// Every way of writing `total` as `parts` ordered summands in `0..=cap`.
fn compositions(total: usize, parts: usize, cap: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, parts: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == parts {
            if rest <= cap {
                cur.push(rest);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for c in 0..=rest.min(cap) {
            cur.push(c);
            go(rest - c, parts, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, cap, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Non-increasing tuples of length `len` over `0..=cap`, in ascending
/// lexicographic order.
fn sorted_tuples(len: usize, cap: usize) -> Vec<Vec<usize>> {
    fn go(len: usize, bound: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for c in 0..=bound {
            cur.push(c);
            go(len, c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(len, cap, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Distinct permutations of `tuple`, in lexicographic order.
fn distinct_permutations(tuple: &[usize]) -> Vec<Vec<usize>> {
    let mut current = tuple.to_vec();
    current.sort_unstable();
    let mut out = vec![current.clone()];
    // Standard next-permutation walk.
    loop {
        let Some(i) = (0..current.len().saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            return out;
        };
        let j = (i + 1..current.len()).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(current.clone());
    }
}

/// `Δ^Σ` as `∨_{|V₁|+…+|Vₙ|=k} (∃V₁.φ₁ ∧ … ∧ ∃Vₙ.φₙ ∧ μ)` with the least
/// consistent `k`.
pub fn merge_sigma_forget(profile: &Profile) -> Result<MergeResult> {
    let op = Operator::SigmaForget;
    let Some(mu) = constraint_models(profile)? else {
        return Ok(MergeResult::degenerate(op, &profile.vocabulary));
    };
    let pool = profile.kb_vocabulary();
    let cap = pool.len();
    let n = profile.kbs.len();
    let mut cache = ForgetCache::new(profile, pool);
    for k in 0..=n * cap {
        let mut acc = ModelSet::empty(profile.vocabulary.clone());
        for sizes in compositions(k, n, cap) {
            acc = acc.union(&cache.conjoin_sizes(&sizes, &mu)?);
        }
        if !acc.is_empty() {
            return Ok(MergeResult::new(op, acc, Diagnostics::Distance(k as u32)));
        }
    }
    unreachable!("forgetting every variable of every KB leaves μ consistent")
}

/// `Δ^Max` as `∨_{|V₁|=…=|Vₙ|=k} (∃V₁.φ₁ ∧ … ∧ ∃Vₙ.φₙ ∧ μ)` with the least
/// consistent `k`.
pub fn merge_max_forget(profile: &Profile) -> Result<MergeResult> {
    let op = Operator::MaxForget;
    let Some(mu) = constraint_models(profile)? else {
        return Ok(MergeResult::degenerate(op, &profile.vocabulary));
    };
    let pool = profile.kb_vocabulary();
    let cap = pool.len();
    let n = profile.kbs.len();
    let mut cache = ForgetCache::new(profile, pool);
    for k in 0..=cap {
        let acc = cache.conjoin_sizes(&vec![k; n], &mu)?;
        if !acc.is_empty() {
            return Ok(MergeResult::new(op, acc, Diagnostics::Distance(k as u32)));
        }
    }
    unreachable!("forgetting every variable of every KB leaves μ consistent")
}

/// `Δ^GMax` as `∨_{⟨|V₁|,…,|Vₙ|⟩ ∈ perm(T)} (∃V₁.φ₁ ∧ … ∧ ∃Vₙ.φₙ ∧ μ)` with
/// the lexicographically least consistent descending tuple `T`.
pub fn merge_gmax_forget(profile: &Profile) -> Result<MergeResult> {
    let op = Operator::GmaxForget;
    let Some(mu) = constraint_models(profile)? else {
        return Ok(MergeResult::degenerate(op, &profile.vocabulary));
    };
    let pool = profile.kb_vocabulary();
    let cap = pool.len();
    let n = profile.kbs.len();
    let mut cache = ForgetCache::new(profile, pool);
    for tuple in sorted_tuples(n, cap) {
        let mut acc = ModelSet::empty(profile.vocabulary.clone());
        for sizes in distinct_permutations(&tuple) {
            acc = acc.union(&cache.conjoin_sizes(&sizes, &mu)?);
        }
        if !acc.is_empty() {
            let t = tuple.iter().map(|&c| c as u32).collect();
            return Ok(MergeResult::new(op, acc, Diagnostics::Tuple(t)));
        }
    }
    unreachable!("forgetting every variable of every KB leaves μ consistent")
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Minimality {
    Cardinality,
    Inclusion,
}

/// Shared search for `F1`/`F2`: candidate sets are subsets of `Var(Φ)`,
/// by ascending cardinality and lexicographically within a cardinality.
fn forgetting_family(profile: &Profile, mu: &ModelSet, minimality: Minimality) -> Result<(ForgettingFamily, ModelSet)> {
    let pool = profile.kb_vocabulary();
    let mut cache = ForgetCache::new(profile, pool.clone());
    let mut family: Vec<ForgetSet> = Vec::new();
    let mut result = ModelSet::empty(profile.vocabulary.clone());
    for size in 0..=pool.len() {
        if minimality == Minimality::Cardinality && !family.is_empty() {
            break;
        }
        for candidate in subsets_of_size(pool.names(), size) {
            // Supersets of a success are never inclusion-minimal.
            if family.iter().any(|found| found.is_subset(&candidate)) {
                continue;
            }
            let merged = cache.shared(&candidate, mu)?;
            if !merged.is_empty() {
                result = result.union(&merged);
                family.push(candidate);
            }
        }
    }
    Ok((ForgettingFamily { sets: family }, result))
}

/// `Δ^f1`: disjunction of `⋀ᵢ ∃V.φᵢ ∧ μ` over the minimum-cardinality `V`
/// that restore consistency.
pub fn merge_f1(profile: &Profile) -> Result<MergeResult> {
    let Some(mu) = constraint_models(profile)? else {
        return Ok(MergeResult::degenerate(Operator::F1, &profile.vocabulary));
    };
    let (family, models) = forgetting_family(profile, &mu, Minimality::Cardinality)?;
    Ok(MergeResult::new(Operator::F1, models, Diagnostics::Family(family)))
}

/// `Δ^f2`: as `Δ^f1` with inclusion-minimal `V`.
pub fn merge_f2(profile: &Profile) -> Result<MergeResult> {
    let Some(mu) = constraint_models(profile)? else {
        return Ok(MergeResult::degenerate(Operator::F2, &profile.vocabulary));
    };
    let (family, models) = forgetting_family(profile, &mu, Minimality::Inclusion)?;
    Ok(MergeResult::new(Operator::F2, models, Diagnostics::Family(family)))
}

/// All subsets of `Var(Φ)` in search order; exposed for oracles.
pub fn candidate_sets(profile: &Profile) -> Vec<ForgetSet> {
    all_subsets(profile.kb_vocabulary().names())
}
