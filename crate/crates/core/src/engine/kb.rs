use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;

use super::{effective_base, extend, stated_facts, materialize_with, query, Answer, EngineError, Materialized};
use crate::axioms::{MSG_CONTRADICTION, MSG_EMPTY_CLASS, MSG_EMPTY_DISJUNCTION, MSG_MAX_CARDINALITY, MSG_MIN_CARDINALITY};
use crate::model::{Atom, Literal, Polarity};
use crate::predicate::{is_internal, v, Layer};
use crate::program::{Program, DEFAULT_RULESET};
use crate::store::{FactStore, RelKey, TruthValue};
use crate::translator::declarations_for;
use crate::term::Term;

/// A dynamic change to the base facts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Change {
    Assert(Literal),
    Retract(Literal),
}

impl Change {
    pub fn literal(&self) -> &Literal {
        match self {
            Change::Assert(l) | Change::Retract(l) => l,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChangeOutcome {
    /// False when the change was a no-op (and was not journaled).
    pub applied: bool,
    /// Change in the active store's literal count.
    pub delta: isize,
    pub warning: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InconsistencyKind {
    Contradiction,
    EmptyClassMember,
    EmptyDisjunction,
    MaxCardinality,
    MissingValue,
    Other,
}

impl fmt::Display for InconsistencyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InconsistencyKind::Contradiction => "contradiction",
            InconsistencyKind::EmptyClassMember => "empty-class-member",
            InconsistencyKind::EmptyDisjunction => "empty-disjunction",
            InconsistencyKind::MaxCardinality => "max-cardinality",
            InconsistencyKind::MissingValue => "missing-value",
            InconsistencyKind::Other => "other",
        })
    }
}

/// One derivable `error` fact, decoded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inconsistency {
    pub kind: InconsistencyKind,
    pub message: String,
    pub witnesses: Vec<Term>,
    /// The rule (or pass) that first derived the fact.
    pub provenance: Option<String>,
    pub fact: Atom,
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)?;
        if !self.witnesses.is_empty() {
            let w: Vec<String> = self.witnesses.iter().map(|t| t.to_string()).collect();
            write!(f, " [{}]", w.join(", "))?;
        }
        if let Some(p) = &self.provenance {
            write!(f, " (from {p})")?;
        }
        Ok(())
    }
}

fn decode(fact: &Atom, provenance: Option<&String>) -> Inconsistency {
    let (message, witnesses) = match fact.args.first() {
        Some(Term::List(items)) => match items.first() {
            Some(Term::Const(m)) => (m.to_string(), items[1..].to_vec()),
            _ => (String::new(), items.to_vec()),
        },
        Some(t) => (String::new(), vec![t.clone()]),
        None => (String::new(), Vec::new()),
    };
    let kind = match message.as_str() {
        MSG_CONTRADICTION => InconsistencyKind::Contradiction,
        MSG_EMPTY_CLASS => InconsistencyKind::EmptyClassMember,
        MSG_EMPTY_DISJUNCTION => InconsistencyKind::EmptyDisjunction,
        MSG_MAX_CARDINALITY => InconsistencyKind::MaxCardinality,
        MSG_MIN_CARDINALITY => InconsistencyKind::MissingValue,
        _ => InconsistencyKind::Other,
    };
    Inconsistency { kind, message, witnesses, provenance: provenance.cloned(), fact: fact.clone() }
}

/// Every `error` fact of a materialization, in sorted order.
pub fn inconsistencies(m: &Materialized) -> Vec<Inconsistency> {
    let key = RelKey { predicate: v::error(), polarity: Polarity::Positive };
    let Some(rel) = m.store.relation(&key) else { return Vec::new() };
    let mut facts: Vec<Atom> = rel.iter().map(|t| Atom::new(v::error(), t.to_vec())).collect();
    facts.sort();
    facts.iter().map(|a| decode(a, m.provenance.get(a))).collect()
}

/// A program with one saturated store per rule set, kept current under
/// dynamic changes. Readers take cheap snapshots; changes publish new ones.
#[derive(Clone, Debug)]
pub struct KnowledgeBase {
    program: Arc<Program>,
    states: BTreeMap<String, Arc<Materialized>>,
    active: String,
    journal: Vec<Change>,
}

impl KnowledgeBase {
    /// Materializes every rule set of `program`.
    pub fn build(program: Program) -> Result<KnowledgeBase, EngineError> {
        let mut states = BTreeMap::new();
        for name in program.ruleset_names() {
            states.insert(name.clone(), Arc::new(materialize_with(&program, &name, &[])?));
        }
        Ok(KnowledgeBase { program: Arc::new(program), states, active: DEFAULT_RULESET.into(), journal: Vec::new() })
    }

    pub(crate) fn from_parts(
        program: Program,
        states: BTreeMap<String, Materialized>,
        active: String,
        journal: Vec<Change>,
    ) -> KnowledgeBase {
        KnowledgeBase {
            program: Arc::new(program),
            states: states.into_iter().map(|(k, m)| (k, Arc::new(m))).collect(),
            active,
            journal,
        }
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn active_ruleset(&self) -> &str {
        &self.active
    }

    pub fn journal(&self) -> &[Change] {
        &self.journal
    }

    /// The active rule set's materialization, shareable across threads.
    pub fn snapshot(&self) -> Arc<Materialized> {
        Arc::clone(&self.states[&self.active])
    }

    pub fn state(&self, ruleset: &str) -> Option<&Materialized> {
        self.states.get(ruleset).map(|m| &**m)
    }

    pub fn store(&self) -> &FactStore {
        &self.states[&self.active].store
    }

    /// Stated facts with the journal replayed.
    pub fn stated_facts(&self) -> IndexSet<Literal> {
        stated_facts(&self.program, &self.journal)
    }

    /// Stated facts with the journal replayed, plus their declarations.
    pub fn base_facts(&self) -> IndexSet<Literal> {
        effective_base(&self.program, &self.journal)
    }

    pub fn truth_value(&self, atom: &Atom) -> TruthValue {
        self.store().truth_value(atom)
    }

    pub fn query(&self, pattern: &Literal) -> Vec<Answer> {
        query(self.store(), pattern)
    }

    pub fn check_consistency(&self) -> Vec<Inconsistency> {
        inconsistencies(&self.states[&self.active])
    }

    /// Only ground Base-layer facts may change at run time.
    pub fn validate_dynamic(fact: &Literal) -> Result<(), EngineError> {
        let p = fact.atom.predicate;
        if !fact.atom.is_ground() {
            return Err(EngineError::Rejected(format!("`{fact}` is not ground")));
        }
        if p == v::error() || is_internal(&p) {
            return Err(EngineError::Rejected(format!("`{}` cannot be asserted or retracted", p.spelling())));
        }
        if p.is_layered() && p.layer == Layer::Derived {
            return Err(EngineError::Rejected(format!(
                "`{}` is a Derived-layer spelling; dynamic facts use the Base spelling `{}`",
                p.camel, p.name
            )));
        }
        Ok(())
    }

    fn len(&self) -> isize {
        self.store().len() as isize
    }

    fn rebuild(&self, journal: &[Change]) -> Result<BTreeMap<String, Arc<Materialized>>, EngineError> {
        let mut out = BTreeMap::new();
        for name in self.states.keys() {
            out.insert(name.clone(), Arc::new(materialize_with(&self.program, name, journal)?));
        }
        Ok(out)
    }

    /// Adds a base fact, updating every rule set's store. Asserting a fact
    /// already stated is a no-op.
    pub fn assert(&mut self, fact: Literal) -> Result<ChangeOutcome, EngineError> {
        Self::validate_dynamic(&fact)?;
        if self.stated_facts().contains(&fact) {
            return Ok(ChangeOutcome { applied: false, delta: 0, warning: None });
        }
        let before = self.len();
        let mut journal = self.journal.clone();
        journal.push(Change::Assert(fact.clone()));
        let states = if self.program.constraints.is_empty() {
            let mut added = vec![fact.clone()];
            added.extend(declarations_for(&fact.atom));
            let mut states = self.states.clone();
            for (name, state) in states.iter_mut() {
                extend(&self.program, name, Arc::make_mut(state), &added)?;
            }
            states
        } else {
            self.rebuild(&journal)?
        };
        self.states = states;
        self.journal = journal;
        Ok(ChangeOutcome { applied: true, delta: self.len() - before, warning: None })
    }

    /// Removes a base fact and rematerializes. Retracting a fact that is not
    /// stated is a no-op with a warning.
    pub fn retract(&mut self, fact: Literal) -> Result<ChangeOutcome, EngineError> {
        Self::validate_dynamic(&fact)?;
        if !self.stated_facts().contains(&fact) {
            return Ok(ChangeOutcome {
                applied: false,
                delta: 0,
                warning: Some(format!("`{fact}` is not a base fact; nothing retracted")),
            });
        }
        let before = self.len();
        let mut journal = self.journal.clone();
        journal.push(Change::Retract(fact));
        self.states = self.rebuild(&journal)?;
        self.journal = journal;
        Ok(ChangeOutcome { applied: true, delta: self.len() - before, warning: None })
    }

    /// Makes `ruleset` active; returns whether anything changed.
    pub fn swap(&mut self, ruleset: &str) -> Result<bool, EngineError> {
        if !self.states.contains_key(ruleset) {
            return Err(EngineError::UnknownRuleset(ruleset.to_owned()));
        }
        if self.active == ruleset {
            return Ok(false);
        }
        self.active = ruleset.to_owned();
        Ok(true)
    }
}
