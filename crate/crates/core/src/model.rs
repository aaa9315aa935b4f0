//! Atoms, literals, disjunctions and rules.
//!
//! `Display` renders every value in the native logic-program syntax, which is
//! also what the Prolog emitter writes and the native parser reads.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::predicate::{v, Predicate};
use crate::symbol::Symbol;
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Predicate,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: Predicate, args: Vec<Term>) -> Atom {
        debug_assert_eq!(predicate.arity, args.len(), "arity of {predicate}");
        Atom { predicate, args }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.args.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }

    pub fn substitute(&self, lookup: &dyn Fn(Symbol) -> Option<Term>) -> Atom {
        Atom {
            predicate: self.predicate,
            args: self.args.iter().map(|a| a.substitute(lookup)).collect(),
        }
    }

    pub fn skolem_depth(&self) -> usize {
        self.args.iter().map(Term::skolem_depth).max().unwrap_or(0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::term::write_quoted(f, self.predicate.spelling().as_str())?;
        f.write_str("(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    /// Classical negation, written `logicNot(...)`.
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub polarity: Polarity,
    pub atom: Atom,
}

impl Literal {
    pub fn positive(atom: Atom) -> Literal {
        Literal {
            polarity: Polarity::Positive,
            atom,
        }
    }

    pub fn negative(atom: Atom) -> Literal {
        Literal {
            polarity: Polarity::Negative,
            atom,
        }
    }

    pub fn negate(&self) -> Literal {
        Literal {
            polarity: self.polarity.flip(),
            atom: self.atom.clone(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "{}", self.atom),
            Polarity::Negative => write!(f, "logicNot({})", self.atom),
        }
    }
}

/// An atom under any number of `logicNot` wrappers, as written in input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedLiteral {
    pub negations: usize,
    pub atom: Atom,
}

impl From<Literal> for NestedLiteral {
    fn from(l: Literal) -> Self {
        NestedLiteral {
            negations: usize::from(l.polarity == Polarity::Negative),
            atom: l.atom,
        }
    }
}

/// Collapses `logicNot` nesting classically: even depth is positive, odd is negative.
pub fn canonicalize_literal(l: NestedLiteral) -> Literal {
    Literal {
        polarity: if l.negations.is_multiple_of(2) {
            Polarity::Positive
        } else {
            Polarity::Negative
        },
        atom: l.atom,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DisjunctionError {
    #[error("malformed disjunction: no disjuncts")]
    Empty,
    #[error("malformed disjunction: `{0}` is not ground")]
    NonGround(String),
}

/// A ground disjunction in canonical form: sorted, duplicate-free, non-empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Disjunction(Vec<Atom>);

impl Disjunction {
    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Canonicalizes a flat list of ground atoms.
    pub fn from_atoms(mut atoms: Vec<Atom>) -> Result<Disjunction, DisjunctionError> {
        if atoms.is_empty() {
            return Err(DisjunctionError::Empty);
        }
        if let Some(a) = atoms.iter().find(|a| !a.is_ground()) {
            return Err(DisjunctionError::NonGround(a.to_string()));
        }
        atoms.sort();
        atoms.dedup();
        Ok(Disjunction(atoms))
    }
}

impl fmt::Display for Disjunction {
    /// Right-nested binary `or`, as in `or(a, or(b, c))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_or(f, self.0.iter().map(|a| a as &dyn fmt::Display))
    }
}

pub(crate) fn write_or<'a>(
    f: &mut fmt::Formatter<'_>,
    items: impl ExactSizeIterator<Item = &'a dyn fmt::Display>,
) -> fmt::Result {
    let n = items.len();
    if n == 1 {
        f.write_str("or(")?;
    }
    for (i, item) in items.enumerate() {
        if i + 1 < n {
            write!(f, "or({item}, ")?;
        } else {
            write!(f, "{item}")?;
        }
    }
    for _ in 0..n.saturating_sub(1) {
        f.write_str(")")?;
    }
    if n == 1 {
        f.write_str(")")?;
    }
    Ok(())
}

/// Input shape of a disjunction: arbitrarily nested `or` over atoms and `=` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrTree {
    Atom(Atom),
    /// `=(a, b)`, mapped to `equivalentIndividuals(a, b)`.
    Equal(Term, Term),
    Or(Vec<OrTree>),
}

impl OrTree {
    pub fn or2(a: OrTree, b: OrTree) -> OrTree {
        OrTree::Or(vec![a, b])
    }

    fn flatten_into(&self, out: &mut Vec<Atom>) {
        match self {
            OrTree::Atom(a) => out.push(a.clone()),
            OrTree::Equal(x, y) => out.push(equality_atom(x.clone(), y.clone())),
            OrTree::Or(items) => items.iter().for_each(|t| t.flatten_into(out)),
        }
    }
}

/// The atom `=` denotes inside disjunctions.
pub fn equality_atom(a: Term, b: Term) -> Atom {
    Atom::new(v::equivalent(crate::predicate::Layer::Derived), vec![a, b])
}

pub fn canonicalize_disjunction(tree: &OrTree) -> Result<Disjunction, DisjunctionError> {
    let mut atoms = Vec::new();
    tree.flatten_into(&mut atoms);
    Disjunction::from_atoms(atoms)
}

/// One disjunct of a rule head.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Disjunct {
    Atom(Atom),
    /// `each(X, L, A)`: one disjunct `A` per element `X` of the list `L`.
    Each { var: Symbol, list: Term, atom: Atom },
}

impl fmt::Display for Disjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Disjunct::Atom(a) => write!(f, "{a}"),
            Disjunct::Each { var, list, atom } => write!(f, "each({var}, {list}, {atom})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Literal(Literal),
    Or(Vec<Disjunct>),
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Literal(l) => write!(f, "{l}"),
            Head::Or(ds) => write_or(f, ds.iter().map(|d| d as &dyn fmt::Display)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BodyElement {
    Literal(Literal),
    /// `not(A = B)` over bound terms.
    NotEqual(Term, Term),
    /// `A = B`; binds one side when the other is bound.
    Equal(Term, Term),
    /// `member(X, L)`: enumerates the elements of a bound list.
    Member(Term, Term),
}

impl BodyElement {
    pub fn literal(&self) -> Option<&Literal> {
        match self {
            BodyElement::Literal(l) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for BodyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyElement::Literal(l) => write!(f, "{l}"),
            BodyElement::NotEqual(a, b) => write!(f, "not({a} = {b})"),
            BodyElement::Equal(a, b) => write!(f, "{a} = {b}"),
            BodyElement::Member(x, l) => write!(f, "member({x}, {l})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleOrigin {
    General,
    CardinalityGenerated,
    User,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<BodyElement>,
    pub origin: RuleOrigin,
    /// Rule-group tag such as `GR4`, or the source location of a user rule.
    pub label: Option<Symbol>,
}

impl Rule {
    pub fn new(head: Head, body: Vec<BodyElement>, origin: RuleOrigin) -> Rule {
        Rule {
            head,
            body,
            origin,
            label: None,
        }
    }

    pub fn labeled(mut self, label: &str) -> Rule {
        self.label = Some(Symbol::new(label));
        self
    }

    /// Same clause up to variable renaming, ignoring origin and label.
    pub fn same_clause(&self, other: &Rule) -> bool {
        let (a, b) = (self.renamed_apart(), other.renamed_apart());
        a.head == b.head && a.body == b.body
    }

    /// Variables in order of first occurrence, head first.
    pub fn variables(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        let mut push = |t: &Term| t.collect_vars(&mut out);
        match &self.head {
            Head::Literal(l) => l.atom.args.iter().for_each(&mut push),
            Head::Or(ds) => {
                for d in ds {
                    match d {
                        Disjunct::Atom(a) => a.args.iter().for_each(&mut push),
                        Disjunct::Each { var, list, atom } => {
                            push(&Term::Var(*var));
                            push(list);
                            atom.args.iter().for_each(&mut push);
                        }
                    }
                }
            }
        }
        for e in &self.body {
            match e {
                BodyElement::Literal(l) => l.atom.args.iter().for_each(&mut push),
                BodyElement::NotEqual(a, b) | BodyElement::Equal(a, b) | BodyElement::Member(a, b) => {
                    push(a);
                    push(b);
                }
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        out.retain(|v| seen.insert(*v));
        out
    }

    /// The rule with its variables renamed `_0`, `_1`, ... by first occurrence.
    fn renamed_apart(&self) -> Rule {
        let map: std::collections::BTreeMap<Symbol, Symbol> = self
            .variables()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, Symbol::new(&format!("_{i}"))))
            .collect();
        let sub = |v: Symbol| map.get(&v).map(|n| Term::Var(*n));
        let lit = |l: &Literal| Literal { polarity: l.polarity, atom: l.atom.substitute(&sub) };
        let head = match &self.head {
            Head::Literal(l) => Head::Literal(lit(l)),
            Head::Or(ds) => Head::Or(
                ds.iter()
                    .map(|d| match d {
                        Disjunct::Atom(a) => Disjunct::Atom(a.substitute(&sub)),
                        Disjunct::Each { var, list, atom } => Disjunct::Each {
                            var: map[var],
                            list: list.substitute(&sub),
                            atom: atom.substitute(&sub),
                        },
                    })
                    .collect(),
            ),
        };
        let body = self
            .body
            .iter()
            .map(|e| match e {
                BodyElement::Literal(l) => BodyElement::Literal(lit(l)),
                BodyElement::NotEqual(a, b) => BodyElement::NotEqual(a.substitute(&sub), b.substitute(&sub)),
                BodyElement::Equal(a, b) => BodyElement::Equal(a.substitute(&sub), b.substitute(&sub)),
                BodyElement::Member(a, b) => BodyElement::Member(a.substitute(&sub), b.substitute(&sub)),
            })
            .collect();
        Rule { head, body, origin: self.origin, label: None }
    }

    pub fn body_literals(&self) -> impl Iterator<Item = &Literal> {
        self.body.iter().filter_map(BodyElement::literal)
    }

    /// Predicates the head can make true: the head literal's, or every disjunct's.
    pub fn head_atoms(&self) -> Vec<&Atom> {
        match &self.head {
            Head::Literal(l) => vec![&l.atom],
            Head::Or(ds) => ds
                .iter()
                .map(|d| match d {
                    Disjunct::Atom(a) => a,
                    Disjunct::Each { atom, .. } => atom,
                })
                .collect(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{b}")?;
            }
        }
        f.write_str(".")
    }
}
