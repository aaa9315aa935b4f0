//! The fact store: positive atoms, classically negated atoms, and disjunctions.
//!
//! Each (predicate, polarity) pair owns a [`Relation`], an insertion-ordered
//! tuple set with a hash index per argument position. Tuples are numbered in
//! insertion order; the engine's semi-naive rounds address "old", "delta" and
//! "full" versions of a relation as ranges of those numbers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexSet;
use rustc_hash::{FxBuildHasher, FxHashMap};
use smallvec::SmallVec;

use crate::model::{Atom, Disjunction, Literal, Polarity};
use crate::predicate::Predicate;
use crate::term::Term;

pub type Tuple = SmallVec<[Term; 3]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelKey {
    pub predicate: Predicate,
    pub polarity: Polarity,
}

impl RelKey {
    pub fn of(lit: &Literal) -> RelKey {
        RelKey {
            predicate: lit.atom.predicate,
            polarity: lit.polarity,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Relation {
    tuples: IndexSet<Tuple, FxBuildHasher>,
    index: Vec<FxHashMap<Term, Vec<u32>>>,
    /// Tuples below this number have been joined against every rule.
    pub(crate) stable: u32,
}

impl Relation {
    pub fn new(arity: usize) -> Relation {
        Relation {
            tuples: IndexSet::default(),
            index: (0..arity).map(|_| FxHashMap::default()).collect(),
            stable: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn insert(&mut self, tuple: Tuple) -> bool {
        if self.tuples.contains(&tuple) {
            return false;
        }
        let id = self.tuples.len() as u32;
        for (pos, value) in tuple.iter().enumerate() {
            self.index[pos].entry(value.clone()).or_default().push(id);
        }
        self.tuples.insert(tuple);
        true
    }

    pub fn contains(&self, tuple: &[Term]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn get(&self, id: u32) -> &Tuple {
        &self.tuples[id as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> {
        self.tuples.iter()
    }

    /// Ascending ids of tuples whose argument `pos` equals `value`.
    pub fn ids_with(&self, pos: usize, value: &Term) -> &[u32] {
        self.index[pos].get(value).map(Vec::as_slice).unwrap_or(&[])
    }

    pub(crate) fn mark_stable(&mut self) {
        self.stable = self.tuples.len() as u32;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TruthValue {
    True,
    False,
    Unknown,
    Inconsistent,
}

impl TruthValue {
    /// Combines the answers to `Q` and `logicNot(Q)`.
    pub fn from_answers(positive: bool, negative: bool) -> TruthValue {
        match (positive, negative) {
            (true, false) => TruthValue::True,
            (false, true) => TruthValue::False,
            (false, false) => TruthValue::Unknown,
            (true, true) => TruthValue::Inconsistent,
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthValue::True => "TRUE",
            TruthValue::False => "FALSE",
            TruthValue::Unknown => "UNKNOWN",
            TruthValue::Inconsistent => "INCONSISTENT",
        })
    }
}

/// Equality is set equality of literals and disjunctions; insertion order is ignored.
#[derive(Clone, Debug, Default)]
pub struct FactStore {
    relations: FxHashMap<RelKey, Relation>,
    disjunctions: BTreeSet<Disjunction>,
    count: usize,
}

impl FactStore {
    pub fn new() -> FactStore {
        FactStore::default()
    }

    pub fn from_literals(literals: impl IntoIterator<Item = Literal>) -> FactStore {
        let mut store = FactStore::new();
        for l in literals {
            store.insert(&l);
        }
        store
    }

    /// Adds a ground literal; returns whether it was new.
    pub fn insert(&mut self, lit: &Literal) -> bool {
        self.insert_tuple(RelKey::of(lit), lit.atom.args.iter().cloned().collect())
    }

    pub(crate) fn insert_tuple(&mut self, key: RelKey, tuple: Tuple) -> bool {
        let rel = self
            .relations
            .entry(key)
            .or_insert_with(|| Relation::new(key.predicate.arity));
        let added = rel.insert(tuple);
        if added {
            self.count += 1;
        }
        added
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.relations
            .get(&RelKey::of(lit))
            .is_some_and(|r| r.contains(&lit.atom.args))
    }

    pub fn contains_atom(&self, atom: &Atom, polarity: Polarity) -> bool {
        self.relations
            .get(&RelKey {
                predicate: atom.predicate,
                polarity,
            })
            .is_some_and(|r| r.contains(&atom.args))
    }

    pub fn truth_value(&self, atom: &Atom) -> TruthValue {
        TruthValue::from_answers(
            self.contains_atom(atom, Polarity::Positive),
            self.contains_atom(atom, Polarity::Negative),
        )
    }

    pub fn relation(&self, key: &RelKey) -> Option<&Relation> {
        self.relations.get(key)
    }

    pub fn relation_keys(&self) -> Vec<RelKey> {
        let mut keys: Vec<RelKey> = self
            .relations
            .iter()
            .filter(|(_, r)| !r.is_empty())
            .map(|(k, _)| *k)
            .collect();
        keys.sort();
        keys
    }

    pub(crate) fn relation_keys_all(&self) -> Vec<RelKey> {
        self.relations.keys().copied().collect()
    }

    /// Number of stored ground literals (disjunctions not included).
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0 && self.disjunctions.is_empty()
    }

    fn sorted(&self, polarity: Polarity) -> Vec<Atom> {
        let mut out: Vec<Atom> = self
            .relations
            .iter()
            .filter(|(k, _)| k.polarity == polarity)
            .flat_map(|(k, r)| {
                r.iter().map(move |t| Atom {
                    predicate: k.predicate,
                    args: t.to_vec(),
                })
            })
            .collect();
        out.sort();
        out
    }

    /// Positive atoms, sorted.
    pub fn positives(&self) -> Vec<Atom> {
        self.sorted(Polarity::Positive)
    }

    /// Atoms whose classical negation holds, sorted.
    pub fn negatives(&self) -> Vec<Atom> {
        self.sorted(Polarity::Negative)
    }

    /// Every stored literal, sorted.
    pub fn literals(&self) -> Vec<Literal> {
        let mut out: Vec<Literal> = self
            .positives()
            .into_iter()
            .map(Literal::positive)
            .chain(self.negatives().into_iter().map(Literal::negative))
            .collect();
        out.sort();
        out
    }

    /// Every disjunction recorded, including satisfied and resolved ones.
    pub fn disjunctions(&self) -> &BTreeSet<Disjunction> {
        &self.disjunctions
    }

    /// Disjunctions still carrying information: no disjunct is known true
    /// and at least two are not refuted.
    pub fn open_disjunctions(&self) -> Vec<&Disjunction> {
        self.disjunctions
            .iter()
            .filter(|d| {
                !d.atoms().iter().any(|a| self.contains_atom(a, Polarity::Positive))
                    && d.atoms().iter().filter(|a| !self.contains_atom(a, Polarity::Negative)).count() >= 2
            })
            .collect()
    }

    /// Open disjunctions with refuted disjuncts removed.
    pub fn residual_disjunctions(&self) -> Vec<Vec<Atom>> {
        self.open_disjunctions()
            .into_iter()
            .map(|d| {
                d.atoms()
                    .iter()
                    .filter(|a| !self.contains_atom(a, Polarity::Negative))
                    .cloned()
                    .collect()
            })
            .collect()
    }

    pub fn insert_disjunction(&mut self, d: Disjunction) -> bool {
        self.disjunctions.insert(d)
    }

    pub(crate) fn mark_all_stable(&mut self) {
        self.relations.values_mut().for_each(Relation::mark_stable);
    }

    /// Positive atom counts per predicate, sorted by predicate.
    pub fn counts_by_predicate(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for (k, r) in &self.relations {
            if r.is_empty() {
                continue;
            }
            let name = match k.polarity {
                Polarity::Positive => k.predicate.to_string(),
                Polarity::Negative => format!("logicNot({})", k.predicate),
            };
            *out.entry(name).or_insert(0) += r.len();
        }
        out
    }
}

impl PartialEq for FactStore {
    fn eq(&self, other: &Self) -> bool {
        if self.count != other.count || self.disjunctions != other.disjunctions {
            return false;
        }
        self.relations.iter().all(|(k, r)| {
            if r.is_empty() {
                return true;
            }
            match other.relations.get(k) {
                Some(o) => o.len() == r.len() && r.iter().all(|t| o.contains(t)),
                None => false,
            }
        })
    }
}

impl Eq for FactStore {}
