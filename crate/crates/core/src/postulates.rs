//! Executable rationality postulates for merging operators.
//!
//! Each postulate is checked on concrete instances by comparing model sets
//! over the instance vocabulary. [`check_randomized`] draws instances that
//! satisfy a postulate's structural preconditions from a seeded generator
//! and records every violation in a replayable form.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Vocabulary};
use crate::merging::{MergeError, Operator, Profile};
use crate::parser;
use crate::profile_file::{self, ProfileFileError};
use crate::semantics::{self, ModelSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PostulateId {
    IC0,
    IC1,
    IC2,
    IC3,
    IC4,
    IC5,
    IC6,
    IC7,
    IC8,
    Maj,
    MI,
    A1,
    A2,
}

impl PostulateId {
    pub const ALL: [PostulateId; 13] = [
        PostulateId::IC0,
        PostulateId::IC1,
        PostulateId::IC2,
        PostulateId::IC3,
        PostulateId::IC4,
        PostulateId::IC5,
        PostulateId::IC6,
        PostulateId::IC7,
        PostulateId::IC8,
        PostulateId::Maj,
        PostulateId::MI,
        PostulateId::A1,
        PostulateId::A2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PostulateId::IC0 => "IC0",
            PostulateId::IC1 => "IC1",
            PostulateId::IC2 => "IC2",
            PostulateId::IC3 => "IC3",
            PostulateId::IC4 => "IC4",
            PostulateId::IC5 => "IC5",
            PostulateId::IC6 => "IC6",
            PostulateId::IC7 => "IC7",
            PostulateId::IC8 => "IC8",
            PostulateId::Maj => "Maj",
            PostulateId::MI => "MI",
            PostulateId::A1 => "A1",
            PostulateId::A2 => "A2",
        }
    }

    /// Postulates whose quantifier over `n` is truncated by the checker.
    pub fn is_bounded(self) -> bool {
        matches!(self, PostulateId::Maj | PostulateId::MI)
    }
}

impl fmt::Display for PostulateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown postulate `{0}`")]
pub struct UnknownPostulate(pub String);

impl FromStr for PostulateId {
    type Err = UnknownPostulate;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        PostulateId::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownPostulate(s.to_owned()))
    }
}

/// Largest `n` tried for the existential in `Maj`.
pub const MAJ_MAX_REPETITIONS: usize = 8;
/// Repetition counts sampled for the universal in `MI`.
pub const MI_REPETITIONS: [usize; 2] = [2, 3];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PostulateError {
    #[error("{postulate} cannot be checked on a {kind} instance")]
    Malformed { postulate: PostulateId, kind: &'static str },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Merge(#[from] MergeError),
    #[error(transparent)]
    Semantics(#[from] semantics::SemanticsError),
}

impl From<ProfileFileError> for PostulateError {
    fn from(e: ProfileFileError) -> Self {
        PostulateError::Invalid(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PostulateError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Literal {
    pub var: String,
    pub positive: bool,
}

impl Literal {
    pub fn formula(&self) -> Formula {
        Formula::literal(self.var.clone(), self.positive)
    }

    pub fn negated(&self) -> Literal {
        Literal {
            var: self.var.clone(),
            positive: !self.positive,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula())
    }
}

/// The objects a postulate quantifies over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    /// `Φ, μ` (IC0, IC1, IC2).
    Single { profile: Profile },
    /// `Φ₁, μ₁` and `Φ₂, μ₂`, meant to be pairwise equivalent (IC3).
    Equivalent { first: Profile, second: Profile },
    /// `{φ, φ'}` under `μ` (IC4).
    Pair { profile: Profile },
    /// `Φ₁` and `Φ₂` under the first profile's `μ` (IC5, IC6, Maj, MI).
    TwoProfiles { first: Profile, second: Profile },
    /// `Φ` with `μ₁` as its constraint, plus `μ₂` (IC7, IC8).
    TwoConstraints { profile: Profile, second: Formula },
    /// `Φ, μ`, a literal `l` and KB positions: for A1 the subgroup `Φ'`,
    /// for A2 the two KBs entailing `l` and `¬l`.
    Literal {
        profile: Profile,
        literal: Literal,
        subgroup: Vec<usize>,
    },
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Single { .. } => "single",
            Instance::Equivalent { .. } => "equivalent",
            Instance::Pair { .. } => "pair",
            Instance::TwoProfiles { .. } => "two-profiles",
            Instance::TwoConstraints { .. } => "two-constraints",
            Instance::Literal { .. } => "literal",
        }
    }

    /// Union of every vocabulary in the instance.
    pub fn vocabulary(&self) -> Vocabulary {
        match self {
            Instance::Single { profile } | Instance::Pair { profile } => profile.vocabulary().clone(),
            Instance::Equivalent { first, second } | Instance::TwoProfiles { first, second } => {
                first.vocabulary().union(second.vocabulary())
            }
            Instance::TwoConstraints { profile, second } => {
                profile.vocabulary().union(&second.variables())
            }
            Instance::Literal { profile, literal, .. } => {
                profile.vocabulary().union(&Vocabulary::new([literal.var.clone()]))
            }
        }
    }
}

/// Outcome of one postulate on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub holds: bool,
    /// False when a conditional postulate held vacuously.
    pub applicable: bool,
    pub left: ModelSet,
    pub right: ModelSet,
}

fn merged(op: Operator, profile: &Profile, vocabulary: &Vocabulary) -> Result<ModelSet> {
    Ok(op.apply(&profile.widened(vocabulary)?)?.models)
}

fn models_of(f: &Formula, vocabulary: &Vocabulary) -> Result<ModelSet> {
    Ok(semantics::models(f, vocabulary)?)
}

/// Bijection between two multisets of formulas preserving equivalence.
fn equivalent_multisets(a: &[Formula], b: &[Formula], vocabulary: &Vocabulary) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let mut left: Vec<ModelSet> = a.iter().map(|f| models_of(f, vocabulary)).collect::<Result<_>>()?;
    let mut right: Vec<ModelSet> = b.iter().map(|f| models_of(f, vocabulary)).collect::<Result<_>>()?;
    let key = |s: &ModelSet| s.masks().collect::<Vec<_>>();
    left.sort_by_key(key);
    right.sort_by_key(key);
    Ok(left == right)
}

fn conditional(antecedent: bool, consequent: bool, left: ModelSet, right: ModelSet) -> Evaluation {
    Evaluation {
        holds: !antecedent || consequent,
        applicable: antecedent,
        left,
        right,
    }
}

fn malformed(postulate: PostulateId, instance: &Instance) -> PostulateError {
    PostulateError::Malformed {
        postulate,
        kind: instance.kind(),
    }
}

/// Evaluates `postulate` for `op` on `instance`, keeping both sides.
pub fn evaluate(postulate: PostulateId, op: Operator, instance: &Instance) -> Result<Evaluation> {
    use PostulateId::*;
    let v = instance.vocabulary();
    match (postulate, instance) {
        (IC0 | IC1 | IC2, Instance::Single { profile }) => {
            let result = merged(op, profile, &v)?;
            let mu = models_of(profile.constraint(), &v)?;
            Ok(match postulate {
                IC0 => {
                    let holds = result.is_subset(&mu);
                    conditional(true, holds, result, mu)
                }
                IC1 => {
                    let antecedent = !mu.is_empty();
                    let holds = !result.is_empty();
                    conditional(antecedent, holds, result, mu)
                }
                _ => {
                    let both = models_of(&Formula::conj([profile.conjunction(), profile.constraint().clone()]), &v)?;
                    let antecedent = !both.is_empty();
                    let holds = result == both;
                    conditional(antecedent, holds, result, both)
                }
            })
        }
        (IC3, Instance::Equivalent { first, second }) => {
            let antecedent = equivalent_multisets(first.kbs(), second.kbs(), &v)?
                && models_of(first.constraint(), &v)? == models_of(second.constraint(), &v)?;
            let left = merged(op, first, &v)?;
            let right = merged(op, second, &v)?;
            let holds = left == right;
            Ok(conditional(antecedent, holds, left, right))
        }
        (IC4, Instance::Pair { profile }) => {
            if profile.kbs().len() != 2 {
                return Err(PostulateError::Invalid("IC4 needs exactly two knowledge bases".into()));
            }
            let mu = models_of(profile.constraint(), &v)?;
            let phi = models_of(&profile.kbs()[0], &v)?;
            let phi2 = models_of(&profile.kbs()[1], &v)?;
            let result = merged(op, profile, &v)?;
            let left = result.intersection(&phi);
            let right = result.intersection(&phi2);
            let antecedent = phi.is_subset(&mu) && phi2.is_subset(&mu) && !left.is_empty();
            let holds = !right.is_empty();
            Ok(conditional(antecedent, holds, left, right))
        }
        (IC5 | IC6 | Maj | MI, Instance::TwoProfiles { first, second }) => {
            // Both profiles are merged under the first profile's constraint.
            let second = second.with_constraint(first.constraint().clone())?;
            match postulate {
                IC5 | IC6 => {
                    let d1 = merged(op, first, &v)?;
                    let d2 = merged(op, &second, &v)?;
                    let joint = merged(op, &first.concat(&second)?, &v)?;
                    let meet = d1.intersection(&d2);
                    Ok(if postulate == IC5 {
                        let holds = meet.is_subset(&joint);
                        conditional(true, holds, meet, joint)
                    } else {
                        let antecedent = !meet.is_empty();
                        let holds = joint.is_subset(&meet);
                        conditional(antecedent, holds, joint, meet)
                    })
                }
                Maj => {
                    let target = merged(op, &second, &v)?;
                    let mut last = None;
                    for n in 1..=MAJ_MAX_REPETITIONS {
                        let result = merged(op, &first.concat(&second.repeated(n)?)?, &v)?;
                        if result.is_subset(&target) {
                            return Ok(conditional(true, true, result, target));
                        }
                        last = Some(result);
                    }
                    Ok(conditional(true, false, last.unwrap(), target))
                }
                _ => {
                    let base = merged(op, &first.concat(&second)?, &v)?;
                    for n in MI_REPETITIONS {
                        let result = merged(op, &first.concat(&second.repeated(n)?)?, &v)?;
                        if result != base {
                            return Ok(conditional(true, false, result, base));
                        }
                    }
                    Ok(conditional(true, true, base.clone(), base))
                }
            }
        }
        (IC7 | IC8, Instance::TwoConstraints { profile, second }) => {
            let mu2 = models_of(second, &v)?;
            let with_first = merged(op, profile, &v)?.intersection(&mu2);
            let joint_mu = Formula::conj([profile.constraint().clone(), second.clone()]);
            let with_both = merged(op, &profile.with_constraint(joint_mu)?, &v)?;
            Ok(if postulate == IC7 {
                let holds = with_first.is_subset(&with_both);
                conditional(true, holds, with_first, with_both)
            } else {
                let antecedent = !with_first.is_empty();
                let holds = with_both.is_subset(&with_first);
                conditional(antecedent, holds, with_both, with_first)
            })
        }
        (A1 | A2, Instance::Literal { profile, literal, subgroup }) => {
            if subgroup.iter().any(|&i| i >= profile.kbs().len()) {
                return Err(PostulateError::Invalid("subgroup index out of range".into()));
            }
            let l = models_of(&literal.formula(), &v)?;
            let not_l = models_of(&literal.negated().formula(), &v)?;
            let entails = |i: usize, target: &ModelSet| -> Result<bool> {
                Ok(models_of(&profile.kbs()[i], &v)?.is_subset(target))
            };
            let result = merged(op, profile, &v)?;
            if postulate == A1 {
                let mu = models_of(profile.constraint(), &v)?;
                let rest_mentions = (0..profile.kbs().len())
                    .filter(|i| !subgroup.contains(i))
                    .any(|i| profile.kbs()[i].variables().contains(&literal.var));
                let mut antecedent = !subgroup.is_empty() && !rest_mentions && mu.intersects(&l);
                for &i in subgroup {
                    antecedent &= entails(i, &l)?;
                }
                let target = mu.intersection(&l);
                let holds = result.is_subset(&target);
                Ok(conditional(antecedent, holds, result, target))
            } else {
                let [i, j] = subgroup[..] else {
                    return Err(PostulateError::Invalid("A2 needs exactly two KB positions".into()));
                };
                let antecedent = entails(i, &l)? && entails(j, &not_l)?;
                let holds = !result.is_subset(&l) && !result.is_subset(&not_l);
                Ok(conditional(antecedent, holds, result, l))
            }
        }
        _ => Err(malformed(postulate, instance)),
    }
}

/// Truth of `postulate` for `op` on `instance`. Conditionals whose
/// antecedent fails are true.
pub fn check(postulate: PostulateId, op: Operator, instance: &Instance) -> Result<bool> {
    Ok(evaluate(postulate, op, instance)?.holds)
}

/// Size limits and seed for random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_vars: usize,
    pub max_kbs: usize,
    pub seed: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_vars: 4,
            max_kbs: 3,
            seed: 42,
        }
    }
}

impl Bounds {
    pub fn validate(&self) -> Result<()> {
        if self.max_vars < 2 || self.max_vars > semantics::vocabulary_cap().min(16) {
            return Err(PostulateError::Invalid(format!(
                "max-vars must be between 2 and {}",
                semantics::vocabulary_cap().min(16)
            )));
        }
        if self.max_kbs < 2 || self.max_kbs > 8 {
            return Err(PostulateError::Invalid("max-kbs must be between 2 and 8".into()));
        }
        Ok(())
    }
}

const NAMES: [&str; 8] = ["p", "q", "r", "s", "t", "u", "v", "w"];

/// Random consistent DNF: 1 to 3 terms, each a nonempty set of literals
/// over distinct variables of `vars`. `true` when `vars` is empty.
pub fn random_dnf(rng: &mut impl Rng, vars: &[String]) -> Formula {
    if vars.is_empty() {
        return Formula::top();
    }
    let terms = rng.gen_range(1..=3);
    Formula::disj((0..terms).map(|_| random_term(rng, vars)))
}

fn random_term(rng: &mut impl Rng, vars: &[String]) -> Formula {
    let k = rng.gen_range(1..=vars.len());
    let mut chosen: Vec<&String> = vars.choose_multiple(rng, k).collect();
    chosen.sort();
    Formula::conj(chosen.into_iter().map(|v| Formula::literal(v.clone(), rng.gen_bool(0.5))))
}

/// Random formula tree of at most `depth` connectives deep over `vars`,
/// using every connective. May be inconsistent.
pub fn random_formula(rng: &mut impl Rng, vars: &[String], depth: usize) -> Formula {
    if depth == 0 || vars.is_empty() || rng.gen_bool(0.25) {
        return if vars.is_empty() || rng.gen_bool(0.05) {
            Formula::Const(rng.gen_bool(0.5))
        } else {
            Formula::atom(vars[rng.gen_range(0..vars.len())].clone())
        };
    }
    let sub = |rng: &mut _| random_formula(rng, vars, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::not(sub(rng)),
        1 => Formula::And((0..rng.gen_range(2..=3)).map(|_| sub(rng)).collect()),
        2 => Formula::Or((0..rng.gen_range(2..=3)).map(|_| sub(rng)).collect()),
        3 => Formula::implies(sub(rng), sub(rng)),
        _ => Formula::iff(sub(rng), sub(rng)),
    }
}

/// Random consistent formula tree, by rejection.
pub fn random_consistent_formula(rng: &mut impl Rng, vars: &[String], depth: usize) -> Formula {
    loop {
        let f = random_formula(rng, vars, depth);
        if consistent(&f) {
            return f;
        }
    }
}

/// Random profile of 1 to `max_kbs` consistent DNFs over 2 to `max_vars`
/// variables named `p, q, r, ...`, with a consistent constraint.
pub fn random_profile(bounds: &Bounds, rng: &mut impl Rng) -> Profile {
    let nvars = rng.gen_range(2..=bounds.max_vars.max(2));
    let vars: Vec<String> = (0..nvars).map(var_name).collect();
    let n = rng.gen_range(1..=bounds.max_kbs.max(1));
    let kbs = (0..n).map(|_| random_dnf(rng, &vars)).collect();
    let mu = random_constraint(rng, &vars);
    profile_over(kbs, mu, &Vocabulary::new(vars))
}

/// The `i`-th generated variable name: `p` to `w`, then `x8, x9, ...`.
pub fn var_name(i: usize) -> String {
    NAMES.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("x{i}"))
}

/// A random constraint: `true` one time in five, otherwise a random DNF.
fn random_constraint(rng: &mut impl Rng, vars: &[String]) -> Formula {
    if rng.gen_bool(0.2) {
        Formula::top()
    } else {
        random_dnf(rng, vars)
    }
}

/// Random DNF with one term made of literals true in `point`.
fn random_dnf_through(rng: &mut impl Rng, vars: &[String], point: &[bool]) -> Formula {
    let k = rng.gen_range(1..=vars.len());
    let mut idx: Vec<usize> = (0..vars.len()).collect();
    idx.shuffle(rng);
    idx.truncate(k);
    idx.sort();
    let term = Formula::conj(idx.into_iter().map(|i| Formula::literal(vars[i].clone(), point[i])));
    let mut terms: Vec<Formula> = (0..rng.gen_range(0..=2)).map(|_| random_term(rng, vars)).collect();
    let at = rng.gen_range(0..=terms.len());
    terms.insert(at, term);
    Formula::disj(terms)
}

fn consistent(f: &Formula) -> bool {
    semantics::is_consistent(f).unwrap_or(false)
}

fn consistent_with(f: &Formula, g: &Formula) -> bool {
    consistent(&Formula::conj([f.clone(), g.clone()]))
}

/// Equivalent reformulation by double negation, De Morgan and reordering.
fn rewrite(rng: &mut impl Rng, f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) if rng.gen_bool(0.3) => Formula::not(Formula::not(f.clone())),
        Formula::Const(_) | Formula::Atom(_) => f.clone(),
        Formula::Not(inner) => Formula::not(rewrite(rng, inner)),
        Formula::And(parts) | Formula::Or(parts) => {
            let mut parts: Vec<Formula> = parts.iter().map(|p| rewrite(rng, p)).collect();
            parts.shuffle(rng);
            let is_and = matches!(f, Formula::And(_));
            if rng.gen_bool(0.5) {
                let negated = parts.into_iter().map(Formula::not).collect();
                Formula::not(if is_and { Formula::Or(negated) } else { Formula::And(negated) })
            } else if is_and {
                Formula::And(parts)
            } else {
                Formula::Or(parts)
            }
        }
        Formula::Implies(l, r) => Formula::implies(rewrite(rng, l), rewrite(rng, r)),
        Formula::Iff(l, r) => Formula::iff(rewrite(rng, l), rewrite(rng, r)),
    }
}

/// Seeded generator for one trial; `trial` selects an independent stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn profile_over(kbs: Vec<Formula>, mu: Formula, vocabulary: &Vocabulary) -> Profile {
    Profile::with_vocabulary(kbs, mu, vocabulary).expect("generated knowledge bases are consistent")
}

/// A random instance shaped for `postulate`. Deterministic in `(bounds,
/// rng state)`; knowledge bases and constraints are always consistent.
pub fn generate_instance(postulate: PostulateId, bounds: &Bounds, rng: &mut impl Rng) -> Instance {
    use PostulateId::*;
    let nvars = rng.gen_range(2..=bounds.max_vars.max(2));
    let vars: Vec<String> = (0..nvars).map(var_name).collect();
    let vocabulary = Vocabulary::new(vars.clone());
    let kbs = |rng: &mut _, n: usize| -> Vec<Formula> { (0..n).map(|_| random_dnf(rng, &vars)).collect() };

    match postulate {
        IC0 | IC1 => {
            let n = rng.gen_range(1..=bounds.max_kbs);
            let phis = kbs(rng, n);
            let mu = random_constraint(rng, &vars);
            Instance::Single {
                profile: profile_over(phis, mu, &vocabulary),
            }
        }
        IC2 => {
            // Every formula is satisfied by one common point.
            let point: Vec<bool> = (0..nvars).map(|_| rng.gen_bool(0.5)).collect();
            let n = rng.gen_range(1..=bounds.max_kbs);
            let phis = (0..n).map(|_| random_dnf_through(rng, &vars, &point)).collect();
            let mu = if rng.gen_bool(0.2) {
                Formula::top()
            } else {
                random_dnf_through(rng, &vars, &point)
            };
            Instance::Single {
                profile: profile_over(phis, mu, &vocabulary),
            }
        }
        IC3 => {
            let n = rng.gen_range(1..=bounds.max_kbs);
            let phis = kbs(rng, n);
            let mu = random_constraint(rng, &vars);
            let mut twins: Vec<Formula> = phis.iter().map(|f| rewrite(rng, f)).collect();
            twins.shuffle(rng);
            let mu_twin = rewrite(rng, &mu);
            Instance::Equivalent {
                first: profile_over(phis, mu, &vocabulary),
                second: profile_over(twins, mu_twin, &vocabulary),
            }
        }
        IC4 => loop {
            let mu = random_constraint(rng, &vars);
            let a = Formula::conj([random_dnf(rng, &vars), mu.clone()]);
            let b = Formula::conj([random_dnf(rng, &vars), mu.clone()]);
            if consistent(&a) && consistent(&b) {
                break Instance::Pair {
                    profile: profile_over(vec![a, b], mu, &vocabulary),
                };
            }
        },
        IC5 | IC6 | Maj | MI => {
            // Φ₁ ⊔ Φ₂ stays within the KB bound.
            let total = rng.gen_range(2..=bounds.max_kbs);
            let n1 = rng.gen_range(1..total);
            let first = kbs(rng, n1);
            let second = kbs(rng, total - n1);
            let mu = random_constraint(rng, &vars);
            Instance::TwoProfiles {
                first: profile_over(first, mu.clone(), &vocabulary),
                second: profile_over(second, mu, &vocabulary),
            }
        }
        IC7 | IC8 => {
            let n = rng.gen_range(1..=bounds.max_kbs);
            let phis = kbs(rng, n);
            let mu1 = random_constraint(rng, &vars);
            let mu2 = random_dnf(rng, &vars);
            Instance::TwoConstraints {
                profile: profile_over(phis, mu1, &vocabulary),
                second: mu2,
            }
        }
        A1 => {
            let pi = rng.gen_range(0..nvars);
            let literal = Literal {
                var: vars[pi].clone(),
                positive: rng.gen_bool(0.5),
            };
            let rest: Vec<String> = vars.iter().filter(|v| **v != literal.var).cloned().collect();
            let n = rng.gen_range(1..=bounds.max_kbs);
            let group = rng.gen_range(1..=n);
            let mut tagged: Vec<(bool, Formula)> = (0..n)
                .map(|i| {
                    let body = random_dnf(rng, &rest);
                    if i < group {
                        (true, Formula::conj([literal.formula(), body]).fold_constants())
                    } else {
                        (false, body)
                    }
                })
                .collect();
            tagged.shuffle(rng);
            let mu = loop {
                let mu = random_constraint(rng, &vars);
                if consistent_with(&mu, &literal.formula()) {
                    break mu;
                }
            };
            let subgroup = tagged.iter().enumerate().filter(|(_, (g, _))| *g).map(|(i, _)| i).collect();
            Instance::Literal {
                profile: profile_over(tagged.into_iter().map(|(_, f)| f).collect(), mu, &vocabulary),
                literal,
                subgroup,
            }
        }
        A2 => {
            let pi = rng.gen_range(0..nvars);
            let literal = Literal {
                var: vars[pi].clone(),
                positive: rng.gen_bool(0.5),
            };
            let rest: Vec<String> = vars.iter().filter(|v| **v != literal.var).cloned().collect();
            let n = rng.gen_range(2..=bounds.max_kbs);
            let mut tagged: Vec<(u8, Formula)> = vec![
                (1, Formula::conj([literal.formula(), random_dnf(rng, &rest)]).fold_constants()),
                (2, Formula::conj([literal.negated().formula(), random_dnf(rng, &rest)]).fold_constants()),
            ];
            for _ in 2..n {
                tagged.push((0, random_dnf(rng, &vars)));
            }
            tagged.shuffle(rng);
            let pos = |tag| tagged.iter().position(|(t, _)| *t == tag).unwrap();
            let subgroup = vec![pos(1), pos(2)];
            let mu = random_constraint(rng, &vars);
            Instance::Literal {
                profile: profile_over(tagged.into_iter().map(|(_, f)| f).collect(), mu, &vocabulary),
                literal,
                subgroup,
            }
        }
    }
}

/// Plain-text rendering of an instance: profiles in the profile file
/// format plus the extra objects some postulates need.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerializedInstance {
    pub kind: String,
    pub profiles: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_constraint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal: Option<Literal>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subgroup: Vec<usize>,
}

impl SerializedInstance {
    pub fn from_instance(instance: &Instance) -> Self {
        let render = profile_file::render_profile;
        let mut out = SerializedInstance {
            kind: instance.kind().to_owned(),
            profiles: Vec::new(),
            second_constraint: None,
            literal: None,
            subgroup: Vec::new(),
        };
        match instance {
            Instance::Single { profile } | Instance::Pair { profile } => out.profiles.push(render(profile)),
            Instance::Equivalent { first, second } | Instance::TwoProfiles { first, second } => {
                out.profiles = vec![render(first), render(second)];
            }
            Instance::TwoConstraints { profile, second } => {
                out.profiles.push(render(profile));
                out.second_constraint = Some(second.to_string());
            }
            Instance::Literal {
                profile,
                literal,
                subgroup,
            } => {
                out.profiles.push(render(profile));
                out.literal = Some(literal.clone());
                out.subgroup = subgroup.clone();
            }
        }
        out
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let profiles: Vec<Profile> = self
            .profiles
            .iter()
            .map(|p| profile_file::parse_profile(p))
            .collect::<std::result::Result<_, _>>()?;
        let wrong = || PostulateError::Invalid(format!("malformed `{}` instance", self.kind));
        let one = || profiles.first().cloned().ok_or_else(wrong);
        let two = || match &profiles[..] {
            [a, b] => Ok((a.clone(), b.clone())),
            _ => Err(wrong()),
        };
        Ok(match self.kind.as_str() {
            "single" => Instance::Single { profile: one()? },
            "pair" => Instance::Pair { profile: one()? },
            "equivalent" => {
                let (first, second) = two()?;
                Instance::Equivalent { first, second }
            }
            "two-profiles" => {
                let (first, second) = two()?;
                Instance::TwoProfiles { first, second }
            }
            "two-constraints" => {
                let text = self.second_constraint.as_deref().ok_or_else(wrong)?;
                let second = parser::parse(text).map_err(|e| PostulateError::Invalid(e.to_string()))?;
                Instance::TwoConstraints { profile: one()?, second }
            }
            "literal" => Instance::Literal {
                profile: one()?,
                literal: self.literal.clone().ok_or_else(wrong)?,
                subgroup: self.subgroup.clone(),
            },
            _ => return Err(wrong()),
        })
    }
}

fn model_list(set: &ModelSet) -> Vec<String> {
    set.interpretations()
        .map(|omega| {
            omega
                .literals()
                .into_iter()
                .map(|(n, v)| if v { n } else { format!("!{n}") })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// A recorded counterexample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: u64,
    pub instance: SerializedInstance,
    pub vocabulary: Vec<String>,
    pub left: Vec<String>,
    pub right: Vec<String>,
}

impl Violation {
    fn new(trial: u64, instance: &Instance, evaluation: &Evaluation) -> Self {
        Violation {
            trial,
            instance: SerializedInstance::from_instance(instance),
            vocabulary: evaluation.left.vocabulary().names().to_vec(),
            left: model_list(&evaluation.left),
            right: model_list(&evaluation.right),
        }
    }

    /// Re-evaluates the stored instance; true when it still violates the
    /// postulate with the same two sides.
    pub fn replay(&self, postulate: PostulateId, op: Operator) -> Result<bool> {
        let instance = self.instance.to_instance()?;
        let evaluation = evaluate(postulate, op, &instance)?;
        Ok(!evaluation.holds
            && model_list(&evaluation.left) == self.left
            && model_list(&evaluation.right) == self.right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// No violation, but the postulate's quantifier over `n` was truncated.
    BoundedPass,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::BoundedPass => "bounded-pass",
        })
    }
}

/// How many violations a report keeps verbatim.
pub const STORED_VIOLATIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub postulate: PostulateId,
    pub operator: Operator,
    pub bounds: Bounds,
    pub trials: u64,
    /// Trials whose antecedent held (the rest passed vacuously).
    pub applicable: u64,
    pub violation_count: u64,
    /// The first [`STORED_VIOLATIONS`] violations.
    pub violations: Vec<Violation>,
    pub verdict: Verdict,
}

impl CheckReport {
    /// True when every stored violation still violates on replay.
    pub fn replay(&self) -> Result<bool> {
        for v in &self.violations {
            if !v.replay(self.postulate, self.operator)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Runs `trials` random instances of `postulate` against `op`. Trial `i`
/// draws from stream `i` of the seeded generator, so the report depends
/// only on the arguments.
pub fn check_randomized(postulate: PostulateId, op: Operator, trials: u64, bounds: &Bounds) -> Result<CheckReport> {
    bounds.validate()?;
    let outcomes: Vec<(bool, Option<Violation>)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(bounds.seed, trial);
            let instance = generate_instance(postulate, bounds, &mut rng);
            let evaluation = evaluate(postulate, op, &instance)?;
            let violation = (!evaluation.holds).then(|| Violation::new(trial, &instance, &evaluation));
            Ok((evaluation.applicable, violation))
        })
        .collect::<Result<_>>()?;

    let applicable = outcomes.iter().filter(|(a, _)| *a).count() as u64;
    let all: Vec<Violation> = outcomes.into_iter().filter_map(|(_, v)| v).collect();
    let violation_count = all.len() as u64;
    let verdict = if violation_count > 0 {
        Verdict::Fail
    } else if postulate.is_bounded() {
        Verdict::BoundedPass
    } else {
        Verdict::Pass
    };
    Ok(CheckReport {
        postulate,
        operator: op,
        bounds: *bounds,
        trials,
        applicable,
        violation_count,
        violations: all.into_iter().take(STORED_VIOLATIONS).collect(),
        verdict,
    })
}

/// What is claimed about an operator and a postulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    Satisfied,
    Violated,
    Unclaimed,
}

/// The expected verdict matrix. The forgetting forms of Σ, Max and GMax
/// inherit the claims of the model-based operators they are equivalent to.
pub fn claim(op: Operator, postulate: PostulateId) -> Claim {
    use PostulateId::*;
    let sat = |list: &[PostulateId]| list.contains(&postulate);
    match op {
        Operator::Sigma | Operator::SigmaForget => {
            if sat(&[IC0, IC1, IC2, IC3, IC4, IC5, IC6, IC7, IC8, Maj]) {
                Claim::Satisfied
            } else {
                Claim::Unclaimed
            }
        }
        Operator::Max | Operator::MaxForget => {
            if sat(&[IC0, IC1, IC2, IC3, IC4, IC5, IC7, IC8, MI]) {
                Claim::Satisfied
            } else if sat(&[IC6, Maj]) {
                Claim::Violated
            } else {
                Claim::Unclaimed
            }
        }
        Operator::Gmax | Operator::GmaxForget => {
            if sat(&[IC0, IC1, IC2, IC3, IC4, IC5, IC6, IC7, IC8]) {
                Claim::Satisfied
            } else {
                Claim::Unclaimed
            }
        }
        Operator::F1 => {
            if sat(&[IC0, IC1, IC2, IC3, IC4, IC7, IC8, MI, A1, A2]) {
                Claim::Satisfied
            } else if sat(&[IC5, IC6]) {
                Claim::Violated
            } else {
                Claim::Unclaimed
            }
        }
        Operator::F2 => {
            if sat(&[IC0, IC1, IC2, IC3, IC4, IC7, MI, A1, A2]) {
                Claim::Satisfied
            } else if sat(&[IC8]) {
                Claim::Violated
            } else {
                Claim::Unclaimed
            }
        }
    }
}

/// Status of one cell of the verdict matrix after a randomized check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    /// Claimed and no violation found.
    Confirmed,
    /// Claimed to hold but a violation was found.
    Refuted,
    /// Claimed to fail and a witness was found.
    WitnessFound,
    /// Claimed to fail but no witness within the budget.
    Inconclusive,
    /// No claim; the verdict is informational.
    Observed,
}

impl CellStatus {
    pub fn of(claim: Claim, report: &CheckReport) -> Self {
        let failed = report.verdict == Verdict::Fail;
        match (claim, failed) {
            (Claim::Satisfied, false) => CellStatus::Confirmed,
            (Claim::Satisfied, true) => CellStatus::Refuted,
            (Claim::Violated, true) => CellStatus::WitnessFound,
            (Claim::Violated, false) => CellStatus::Inconclusive,
            (Claim::Unclaimed, _) => CellStatus::Observed,
        }
    }

    /// Whether this cell makes a check run fail. A missing witness only
    /// counts against `Maj` for `Max`, where one is known to exist.
    pub fn is_failure(self, op: Operator, postulate: PostulateId) -> bool {
        match self {
            CellStatus::Refuted => true,
            CellStatus::Inconclusive => {
                matches!(op, Operator::Max | Operator::MaxForget) && postulate == PostulateId::Maj
            }
            _ => false,
        }
    }
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellStatus::Confirmed => "confirmed",
            CellStatus::Refuted => "REFUTED",
            CellStatus::WitnessFound => "witness found",
            CellStatus::Inconclusive => "no witness found (inconclusive)",
            CellStatus::Observed => "observed",
        })
    }
}
