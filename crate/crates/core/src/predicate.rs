//! Predicates, the two-layer naming convention, and the fixed vocabulary.
//!
//! Every layered predicate has an all-lowercase Base spelling (asserted and
//! translated facts, rule heads) and a camelcase Derived spelling (rule bodies,
//! queries). A predicate whose two spellings coincide, such as `error`, only
//! exists at the Derived layer.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbol::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Layer {
    Base,
    Derived,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    /// Base (all-lowercase) spelling; doubles as the identity of the pair.
    pub name: Symbol,
    /// Derived (camelcase) spelling.
    pub camel: Symbol,
    pub arity: usize,
    pub layer: Layer,
}

impl Predicate {
    pub fn new(base: &str, camel: &str, arity: usize, layer: Layer) -> Predicate {
        let layer = if base == camel { Layer::Derived } else { layer };
        Predicate {
            name: Symbol::new(base),
            camel: Symbol::new(camel),
            arity,
            layer,
        }
    }

    /// True when the Base and Derived spellings differ.
    pub fn is_layered(&self) -> bool {
        self.name != self.camel
    }

    pub fn spelling(&self) -> Symbol {
        match self.layer {
            Layer::Base => self.name,
            Layer::Derived => self.camel,
        }
    }

    pub fn at(self, layer: Layer) -> Predicate {
        if self.is_layered() {
            Predicate { layer, ..self }
        } else {
            self
        }
    }

    pub fn base(self) -> Predicate {
        self.at(Layer::Base)
    }

    pub fn derived(self) -> Predicate {
        self.at(Layer::Derived)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.spelling(), self.arity)
    }
}

/// What kind of constant a vocabulary argument position holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    Class,
    Individual,
    Property,
    Datatype,
    /// `isset` member list.
    List,
    /// Cardinality bound.
    Number,
    /// Untyped (error payloads, user predicates).
    Any,
}

pub struct VocabEntry {
    pub base: &'static str,
    pub camel: &'static str,
    pub sorts: &'static [Sort],
}

use Sort::*;

pub const VOCABULARY: &[VocabEntry] = &[
    VocabEntry { base: "ismemberof", camel: "isMemberOf", sorts: &[Individual, Class] },
    VocabEntry { base: "issubclassof", camel: "isSubClassOf", sorts: &[Class, Class] },
    VocabEntry { base: "haspropertywith", camel: "hasPropertyWith", sorts: &[Individual, Property, Individual] },
    VocabEntry { base: "isclass", camel: "isClass", sorts: &[Class] },
    VocabEntry { base: "isindividual", camel: "isIndividual", sorts: &[Individual] },
    VocabEntry { base: "isproperty", camel: "isProperty", sorts: &[Property] },
    VocabEntry { base: "isdatatype", camel: "isDatatype", sorts: &[Datatype] },
    VocabEntry { base: "isset", camel: "isSet", sorts: &[Class, List] },
    VocabEntry { base: "complementaryclasses", camel: "complementaryClasses", sorts: &[Class, Class] },
    VocabEntry { base: "disjointclasses", camel: "disjointClasses", sorts: &[Class, Class] },
    VocabEntry { base: "equivalentclasses", camel: "equivalentClasses", sorts: &[Class, Class] },
    VocabEntry { base: "equivalentindividuals", camel: "equivalentIndividuals", sorts: &[Individual, Individual] },
    VocabEntry { base: "hassomevaluesofpropertyfrom", camel: "hasSomeValuesOfPropertyFrom", sorts: &[Class, Property, Class] },
    VocabEntry { base: "hasallvaluesofpropertyfrom", camel: "hasAllValuesOfPropertyFrom", sorts: &[Class, Property, Class] },
    VocabEntry { base: "mincardinality", camel: "minCardinality", sorts: &[Class, Property, Number] },
    VocabEntry { base: "maxcardinality", camel: "maxCardinality", sorts: &[Class, Property, Number] },
    VocabEntry { base: "exactcardinality", camel: "exactCardinality", sorts: &[Class, Property, Number] },
    VocabEntry { base: "error", camel: "error", sorts: &[Any] },
];

/// Internal predicates that are neither input nor output; written in underscore case.
pub const STRICT_SUBCLASS: &str = "is_sub_class_of_but_not_equal_to";

pub const INTERNAL: &[VocabEntry] = &[VocabEntry {
    base: STRICT_SUBCLASS,
    camel: STRICT_SUBCLASS,
    sorts: &[Class, Class],
}];

/// Looks up a vocabulary or internal entry by either spelling.
pub fn vocab_entry(spelling: &str) -> Option<&'static VocabEntry> {
    VOCABULARY
        .iter()
        .chain(INTERNAL)
        .find(|e| e.base == spelling || e.camel == spelling)
}

/// Vocabulary predicate by Base spelling. Panics on an unknown name; callers pass literals.
pub fn vocab(base: &str, layer: Layer) -> Predicate {
    let e = vocab_entry(base).unwrap_or_else(|| panic!("not a vocabulary predicate: {base}"));
    Predicate::new(e.base, e.camel, e.sorts.len(), layer)
}

pub fn sorts_of(pred: &Predicate) -> Option<&'static [Sort]> {
    vocab_entry(pred.name.as_str()).map(|e| e.sorts)
}

pub fn is_vocabulary(pred: &Predicate) -> bool {
    VOCABULARY.iter().any(|e| e.base == pred.name.as_str())
}

pub fn is_internal(pred: &Predicate) -> bool {
    INTERNAL.iter().any(|e| e.base == pred.name.as_str())
}

/// Shorthands for the vocabulary, used throughout rule construction.
pub mod v {
    use super::{vocab, Layer, Predicate};

    pub fn member(l: Layer) -> Predicate { vocab("ismemberof", l) }
    pub fn subclass(l: Layer) -> Predicate { vocab("issubclassof", l) }
    pub fn property(l: Layer) -> Predicate { vocab("haspropertywith", l) }
    pub fn class(l: Layer) -> Predicate { vocab("isclass", l) }
    pub fn individual(l: Layer) -> Predicate { vocab("isindividual", l) }
    pub fn is_property(l: Layer) -> Predicate { vocab("isproperty", l) }
    pub fn datatype(l: Layer) -> Predicate { vocab("isdatatype", l) }
    pub fn set(l: Layer) -> Predicate { vocab("isset", l) }
    pub fn complementary(l: Layer) -> Predicate { vocab("complementaryclasses", l) }
    pub fn disjoint(l: Layer) -> Predicate { vocab("disjointclasses", l) }
    pub fn equivalent_classes(l: Layer) -> Predicate { vocab("equivalentclasses", l) }
    pub fn equivalent(l: Layer) -> Predicate { vocab("equivalentindividuals", l) }
    pub fn some_values(l: Layer) -> Predicate { vocab("hassomevaluesofpropertyfrom", l) }
    pub fn all_values(l: Layer) -> Predicate { vocab("hasallvaluesofpropertyfrom", l) }
    pub fn min_card(l: Layer) -> Predicate { vocab("mincardinality", l) }
    pub fn max_card(l: Layer) -> Predicate { vocab("maxcardinality", l) }
    pub fn exact_card(l: Layer) -> Predicate { vocab("exactcardinality", l) }
    pub fn error() -> Predicate { vocab("error", Layer::Derived) }
    pub fn strict_subclass() -> Predicate { vocab(super::STRICT_SUBCLASS, Layer::Derived) }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("unknown predicate `{0}`")]
    Unknown(String),
    #[error("`{name}` used with arity {found}, declared with arity {expected}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("`{name}` spelled both `{first}` and `{second}`")]
    Spelling {
        name: String,
        first: String,
        second: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Entry {
    camel: Symbol,
    arity: usize,
}

/// Registry of predicate spellings, resolving a written name to a layered predicate.
///
/// All-lowercase spellings resolve to the Base layer only when a distinct
/// camelcase spelling is known for the same name; otherwise the predicate is
/// single-spelling and lives at the Derived layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateTable {
    entries: HashMap<Symbol, Entry>,
}

impl Default for PredicateTable {
    fn default() -> Self {
        Self::new()
    }
}

impl PredicateTable {
    pub fn new() -> Self {
        let mut entries = HashMap::new();
        for e in VOCABULARY.iter().chain(INTERNAL) {
            entries.insert(
                Symbol::new(e.base),
                Entry {
                    camel: Symbol::new(e.camel),
                    arity: e.sorts.len(),
                },
            );
        }
        PredicateTable { entries }
    }

    /// Records a spelling seen in input. Camelcase spellings fix the Derived
    /// spelling of their lowercase name.
    pub fn register(&mut self, spelling: &str, arity: usize) -> Result<(), ResolveError> {
        let lower = spelling.to_lowercase();
        let key = Symbol::new(&lower);
        match self.entries.get_mut(&key) {
            Some(entry) => {
                if entry.arity != arity {
                    return Err(ResolveError::Arity {
                        name: spelling.to_owned(),
                        expected: entry.arity,
                        found: arity,
                    });
                }
                if spelling != lower {
                    if entry.camel == key {
                        entry.camel = Symbol::new(spelling);
                    } else if entry.camel.as_str() != spelling {
                        return Err(ResolveError::Spelling {
                            name: lower,
                            first: entry.camel.to_string(),
                            second: spelling.to_owned(),
                        });
                    }
                }
            }
            None => {
                self.entries.insert(
                    key,
                    Entry {
                        camel: Symbol::new(spelling),
                        arity,
                    },
                );
            }
        }
        Ok(())
    }

    pub fn insert(&mut self, pred: Predicate) -> Result<(), ResolveError> {
        self.register(pred.name.as_str(), pred.arity)?;
        self.register(pred.camel.as_str(), pred.arity)
    }

    /// Resolves a spelling already registered.
    pub fn resolve(&self, spelling: &str, arity: usize) -> Result<Predicate, ResolveError> {
        let lower = spelling.to_lowercase();
        let entry = self
            .entries
            .get(&Symbol::new(&lower))
            .ok_or_else(|| ResolveError::Unknown(spelling.to_owned()))?;
        if entry.arity != arity {
            return Err(ResolveError::Arity {
                name: spelling.to_owned(),
                expected: entry.arity,
                found: arity,
            });
        }
        if spelling != lower && entry.camel.as_str() != spelling {
            return Err(ResolveError::Unknown(spelling.to_owned()));
        }
        let layer = if spelling == lower && entry.camel.as_str() != lower {
            Layer::Base
        } else {
            Layer::Derived
        };
        Ok(Predicate::new(&lower, entry.camel.as_str(), entry.arity, layer))
    }

    /// Registers then resolves.
    pub fn intern(&mut self, spelling: &str, arity: usize) -> Result<Predicate, ResolveError> {
        self.register(spelling, arity)?;
        self.resolve(spelling, arity)
    }

    pub fn merge(&mut self, other: &PredicateTable) -> Result<(), ResolveError> {
        let mut keys: Vec<_> = other.entries.keys().copied().collect();
        keys.sort();
        for k in keys {
            let e = &other.entries[&k];
            self.register(k.as_str(), e.arity)?;
            self.register(e.camel.as_str(), e.arity)?;
        }
        Ok(())
    }

    /// Predicates beyond the built-in vocabulary, sorted by name.
    pub fn user_predicates(&self) -> Vec<Predicate> {
        let mut out: Vec<Predicate> = self
            .entries
            .iter()
            .filter(|(k, _)| vocab_entry(k.as_str()).is_none())
            .map(|(k, e)| Predicate::new(k.as_str(), e.camel.as_str(), e.arity, Layer::Base))
            .collect();
        out.sort();
        out
    }
}
