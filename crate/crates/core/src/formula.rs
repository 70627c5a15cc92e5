//! Propositional formulas, vocabularies and the textual substitution
//! `φ[x := b]`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Abstract syntax tree of a propositional formula.
///
/// `And`/`Or` are n-ary. Nothing is simplified on construction, so
/// `true & q` stays exactly that until [`Formula::fold_constants`] is called.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Const(bool),
    Atom(String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn top() -> Self {
        Formula::Const(true)
    }

    pub fn bottom() -> Self {
        Formula::Const(false)
    }

    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn literal(name: impl Into<String>, positive: bool) -> Self {
        let atom = Formula::atom(name);
        if positive {
            atom
        } else {
            Formula::not(atom)
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Self {
        Formula::Not(Box::new(inner))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// Conjunction of `parts`. An empty conjunction is `true` and a single
    /// conjunct is returned as is; otherwise the parts are kept verbatim.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        match parts.len() {
            0 => Formula::top(),
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        }
    }

    /// Disjunction of `parts`, dual to [`Formula::conj`].
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        match parts.len() {
            0 => Formula::bottom(),
            1 => parts.pop().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    /// The set of atom names occurring in the formula, sorted.
    pub fn variables(&self) -> Vocabulary {
        let mut names = BTreeSet::new();
        self.collect_atoms(&mut names);
        Vocabulary::from_sorted_set(names)
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(name) => {
                out.insert(name);
            }
            Formula::Not(inner) => inner.collect_atoms(out),
            Formula::And(parts) | Formula::Or(parts) => {
                parts.iter().for_each(|p| p.collect_atoms(out))
            }
            Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Replaces every `Atom(var)` by `Const(value)`. No other node changes.
    pub fn substitute(&self, var: &str, value: bool) -> Formula {
        match self {
            Formula::Atom(name) if name == var => Formula::Const(value),
            Formula::Const(_) | Formula::Atom(_) => self.clone(),
            Formula::Not(inner) => Formula::not(inner.substitute(var, value)),
            Formula::And(parts) => {
                Formula::And(parts.iter().map(|p| p.substitute(var, value)).collect())
            }
            Formula::Or(parts) => {
                Formula::Or(parts.iter().map(|p| p.substitute(var, value)).collect())
            }
            Formula::Implies(l, r) => {
                Formula::implies(l.substitute(var, value), r.substitute(var, value))
            }
            Formula::Iff(l, r) => Formula::iff(l.substitute(var, value), r.substitute(var, value)),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + match self {
            Formula::Const(_) | Formula::Atom(_) => 0,
            Formula::Not(inner) => inner.node_count(),
            Formula::And(parts) | Formula::Or(parts) => parts.iter().map(Formula::node_count).sum(),
            Formula::Implies(l, r) | Formula::Iff(l, r) => l.node_count() + r.node_count(),
        }
    }

    pub fn as_const(&self) -> Option<bool> {
        match self {
            Formula::Const(b) => Some(*b),
            _ => None,
        }
    }

    /// Equivalence-preserving removal of constants (`true & x` to `x`,
    /// `false | x` to `x`, `!true` to `false`, ...). Atoms are never touched.
    pub fn fold_constants(&self) -> Formula {
        match self {
            Formula::Const(_) | Formula::Atom(_) => self.clone(),
            Formula::Not(inner) => match inner.fold_constants() {
                Formula::Const(b) => Formula::Const(!b),
                other => Formula::not(other),
            },
            Formula::And(parts) => {
                let mut kept = Vec::with_capacity(parts.len());
                for part in parts {
                    match part.fold_constants() {
                        Formula::Const(true) => {}
                        Formula::Const(false) => return Formula::bottom(),
                        other => kept.push(other),
                    }
                }
                Formula::conj(kept)
            }
            Formula::Or(parts) => {
                let mut kept = Vec::with_capacity(parts.len());
                for part in parts {
                    match part.fold_constants() {
                        Formula::Const(false) => {}
                        Formula::Const(true) => return Formula::top(),
                        other => kept.push(other),
                    }
                }
                Formula::disj(kept)
            }
            Formula::Implies(l, r) => match (l.fold_constants(), r.fold_constants()) {
                (Formula::Const(false), _) | (_, Formula::Const(true)) => Formula::top(),
                (Formula::Const(true), r) => r,
                (l, Formula::Const(false)) => Formula::not(l),
                (l, r) => Formula::implies(l, r),
            },
            Formula::Iff(l, r) => match (l.fold_constants(), r.fold_constants()) {
                (Formula::Const(a), Formula::Const(b)) => Formula::Const(a == b),
                (Formula::Const(true), x) | (x, Formula::Const(true)) => x,
                (Formula::Const(false), x) | (x, Formula::Const(false)) => Formula::not(x),
                (l, r) => Formula::iff(l, r),
            },
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = crate::parser::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::parser::parse(s)
    }
}

/// Binding strength used by the printer; higher binds tighter.
fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(_) => 3,
        Formula::And(_) => 4,
        Formula::Not(_) => 5,
        Formula::Const(_) | Formula::Atom(_) => 6,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

fn write_nary(
    f: &mut fmt::Formatter<'_>,
    parts: &[Formula],
    op: &str,
    level: u8,
    empty: &str,
) -> fmt::Result {
    if parts.is_empty() {
        return f.write_str(empty);
    }
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            write!(f, " {op} ")?;
        }
        // A nested chain of the same connective keeps its parentheses so
        // that re-parsing does not flatten it.
        write_child(f, part, precedence(part) <= level)?;
    }
    Ok(())
}

/// Minimal-parenthesis rendering that [`crate::parse`] reads back to the
/// same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(true) => f.write_str("true"),
            Formula::Const(false) => f.write_str("false"),
            Formula::Atom(name) => f.write_str(name),
            Formula::Not(inner) => {
                f.write_str("!")?;
                write_child(f, inner, precedence(inner) < 5)
            }
            Formula::And(parts) => write_nary(f, parts, "&", 4, "true"),
            Formula::Or(parts) => write_nary(f, parts, "|", 3, "false"),
            Formula::Implies(l, r) => {
                write_child(f, l, precedence(l) <= 2)?;
                f.write_str(" -> ")?;
                write_child(f, r, precedence(r) < 2)
            }
            Formula::Iff(l, r) => {
                write_child(f, l, precedence(l) < 1)?;
                f.write_str(" <-> ")?;
                write_child(f, r, precedence(r) <= 1)
            }
        }
    }
}

/// Ordered set of distinct variable names, sorted lexicographically.
///
/// Cloning is cheap; interpretations and model sets share one vocabulary.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Vocabulary(Arc<[String]>);

impl Vocabulary {
    pub fn empty() -> Self {
        Vocabulary(Arc::from(Vec::new()))
    }

    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        Vocabulary(set.into_iter().collect())
    }

    fn from_sorted_set(names: BTreeSet<&str>) -> Self {
        Vocabulary(names.into_iter().map(str::to_owned).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.iter().map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn is_subset(&self, other: &Vocabulary) -> bool {
        self.iter().all(|n| other.contains(n))
    }

    pub fn union(&self, other: &Vocabulary) -> Vocabulary {
        Vocabulary::new(self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &Vocabulary) -> Vocabulary {
        Vocabulary::new(self.iter().filter(|n| !other.contains(n)))
    }

    /// Union of the variables of every formula, extended by `extra`.
    pub fn of_all<'a>(formulas: impl IntoIterator<Item = &'a Formula>, extra: &Vocabulary) -> Self {
        let mut names: BTreeSet<&str> = extra.iter().collect();
        for f in formulas {
            f.collect_atoms(&mut names);
        }
        Vocabulary::from_sorted_set(names)
    }
}

impl fmt::Debug for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn variables_are_sorted_and_syntactic() {
        assert!(Formula::top().variables().is_empty());
        assert_eq!(p("S & T & P").variables().names(), ["P", "S", "T"]);
        assert_eq!(p("p | !p").variables().names(), ["p"]);
    }

    #[test]
    fn substitute_replaces_atoms_only() {
        assert_eq!(p("p & q").substitute("p", false), p("false & q"));
        assert_eq!(p("p & q").substitute("p", true), p("true & q"));
        assert_eq!(p("q").substitute("p", true), p("q"));
        let f = p("(p -> q) <-> !p | r");
        let g = f.substitute("p", true);
        assert_eq!(f.node_count(), g.node_count());
        assert_eq!(g.variables().names(), ["q", "r"]);
    }

    #[test]
    fn printer_uses_minimal_parentheses() {
        let pq = Formula::And(vec![Formula::atom("p"), Formula::atom("q")]);
        assert_eq!(pq.to_string(), "p & q");
        assert_eq!(Formula::not(pq).to_string(), "!(p & q)");
        let chain = Formula::implies(
            Formula::atom("p"),
            Formula::implies(Formula::atom("q"), Formula::atom("r")),
        );
        assert_eq!(chain.to_string(), "p -> q -> r");
        let left = Formula::implies(
            Formula::implies(Formula::atom("p"), Formula::atom("q")),
            Formula::atom("r"),
        );
        assert_eq!(left.to_string(), "(p -> q) -> r");
        let nested = Formula::Or(vec![
            Formula::Or(vec![Formula::atom("a"), Formula::atom("b")]),
            Formula::atom("c"),
        ]);
        assert_eq!(nested.to_string(), "(a | b) | c");
        assert_eq!(parse(&nested.to_string()).unwrap(), nested);
    }

    #[test]
    fn fold_constants_removes_units() {
        assert_eq!(p("true & q").fold_constants(), p("q"));
        assert_eq!(p("false & q").fold_constants(), Formula::bottom());
        assert_eq!(p("(false & q) | (true & q)").fold_constants(), p("q"));
        assert_eq!(p("p -> false").fold_constants(), p("!p"));
        assert_eq!(p("false <-> p").fold_constants(), p("!p"));
    }

    #[test]
    fn vocabulary_set_operations() {
        let a = Vocabulary::new(["b", "a", "b"]);
        assert_eq!(a.names(), ["a", "b"]);
        let b = Vocabulary::new(["c", "a"]);
        assert_eq!(a.union(&b).names(), ["a", "b", "c"]);
        assert_eq!(a.difference(&b).names(), ["b"]);
        assert_eq!(a.index_of("b"), Some(1));
        assert!(Vocabulary::new(["a"]).is_subset(&a));
    }
}
