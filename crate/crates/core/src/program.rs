use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::model::{Disjunction, Literal, Rule, RuleOrigin};
use crate::predicate::{PredicateTable, Sort};
use crate::symbol::Symbol;
use crate::term::Term;

pub const DEFAULT_RULESET: &str = "default";

/// How an unmet existential or minimum-cardinality requirement is handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExistentialStrategy {
    Error,
    Skolemize,
    AssertFresh,
}

/// How a value count above a maximum cardinality is handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaxCardStrategy {
    Error,
    Merge,
}

macro_rules! keyword_enum {
    ($ty:ident { $($variant:ident => $text:literal),* $(,)? }) => {
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s.replace('_', "-").as_str() {
                    $($text => Ok($ty::$variant),)*
                    other => Err(format!("unknown {} `{other}`", stringify!($ty))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$variant => $text,)* })
            }
        }
    };
}

keyword_enum!(ExistentialStrategy { Error => "error", Skolemize => "skolemize", AssertFresh => "assert-fresh" });
keyword_enum!(MaxCardStrategy { Error => "error", Merge => "merge" });

/// Compile-time switches fixed for the lifetime of a program.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pragmas {
    pub existential: ExistentialStrategy,
    pub max_cardinality: MaxCardStrategy,
    /// Deepest `unnamedIndividual` nesting a derived fact may contain.
    pub skolem_depth_cap: usize,
    pub consistency_check: bool,
    /// Largest cardinality bound rules are generated for.
    pub cardinality_cap: usize,
    /// Constraint passes (fresh-individual assertion) run at most this many times.
    pub constraint_pass_cap: usize,
    /// Materialization aborts when the store grows beyond this many facts.
    pub fact_cap: usize,
}

impl Default for Pragmas {
    fn default() -> Self {
        Pragmas {
            existential: ExistentialStrategy::Skolemize,
            max_cardinality: MaxCardStrategy::Merge,
            skolem_depth_cap: 1,
            consistency_check: true,
            cardinality_cap: 3,
            constraint_pass_cap: 5,
            fact_cap: 10_000_000,
        }
    }
}

impl Pragmas {
    /// Sets a pragma from its directive spelling, e.g. `("existential", "assert-fresh")`.
    pub fn set(&mut self, name: &str, value: &str) -> Result<(), String> {
        let number = || {
            value
                .parse::<usize>()
                .map_err(|_| format!("pragma `{name}` expects a number, got `{value}`"))
        };
        match name.replace('_', "-").as_str() {
            "existential" => self.existential = value.parse()?,
            "max-cardinality" | "max-card" => self.max_cardinality = value.parse()?,
            "skolem-depth-cap" | "skolem-depth" => self.skolem_depth_cap = number()?,
            "consistency-check" => {
                self.consistency_check = match value {
                    "on" | "true" | "yes" => true,
                    "off" | "false" | "no" => false,
                    _ => return Err(format!("pragma `{name}` expects on/off, got `{value}`")),
                }
            }
            "cardinality-cap" => self.cardinality_cap = number()?,
            "constraint-pass-cap" => self.constraint_pass_cap = number()?,
            "fact-cap" => self.fact_cap = number()?,
            _ => return Err(format!("unknown pragma `{name}`")),
        }
        Ok(())
    }

    /// Directive pairs for every pragma differing from the default.
    pub fn non_default(&self) -> Vec<(&'static str, String)> {
        let d = Pragmas::default();
        let mut out = Vec::new();
        if self.existential != d.existential {
            out.push(("existential", self.existential.to_string()));
        }
        if self.max_cardinality != d.max_cardinality {
            out.push(("max_cardinality", self.max_cardinality.to_string()));
        }
        if self.skolem_depth_cap != d.skolem_depth_cap {
            out.push(("skolem_depth_cap", self.skolem_depth_cap.to_string()));
        }
        if self.consistency_check != d.consistency_check {
            out.push(("consistency_check", if self.consistency_check { "on" } else { "off" }.into()));
        }
        if self.cardinality_cap != d.cardinality_cap {
            out.push(("cardinality_cap", self.cardinality_cap.to_string()));
        }
        if self.constraint_pass_cap != d.constraint_pass_cap {
            out.push(("constraint_pass_cap", self.constraint_pass_cap.to_string()));
        }
        if self.fact_cap != d.fact_cap {
            out.push(("fact_cap", self.fact_cap.to_string()));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintAction {
    /// Derive an `error` fact for each violating individual.
    Error,
    /// Assert fresh individuals as the missing values.
    AssertFresh,
}

/// A post-saturation check: every member of `class` needs at least `min`
/// distinct `property` values (members of `filler`, when given).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub class: Term,
    pub property: Term,
    pub filler: Option<Term>,
    pub min: usize,
    pub action: ConstraintAction,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Declarations {
    pub classes: BTreeSet<Symbol>,
    pub individuals: BTreeSet<Symbol>,
    pub properties: BTreeSet<Symbol>,
    pub datatypes: BTreeSet<Symbol>,
}

impl Declarations {
    pub fn contains(&self, s: Symbol) -> bool {
        self.classes.contains(&s)
            || self.individuals.contains(&s)
            || self.properties.contains(&s)
            || self.datatypes.contains(&s)
    }

    /// Constants declared in more than one category.
    pub fn overlapping(&self) -> Vec<Symbol> {
        let sets = [&self.classes, &self.individuals, &self.properties, &self.datatypes];
        let mut out: BTreeSet<Symbol> = BTreeSet::new();
        for (i, a) in sets.iter().enumerate() {
            for b in &sets[i + 1..] {
                out.extend(a.intersection(b).copied());
            }
        }
        out.into_iter().collect()
    }
}

/// A compiled program: facts, layered rules, pragmas, and rule-set variants.
#[derive(Clone, Debug, Default)]
pub struct Program {
    pub predicates: PredicateTable,
    pub facts: Vec<Literal>,
    pub disjunctions: Vec<Disjunction>,
    /// Rules of the default rule set.
    pub rules: Vec<Rule>,
    pub constraints: Vec<Constraint>,
    pub pragmas: Pragmas,
    /// Complete rule lists of the non-default rule sets.
    pub variants: BTreeMap<String, Vec<Rule>>,
}

impl Program {
    pub fn ruleset_names(&self) -> Vec<String> {
        let mut names = vec![DEFAULT_RULESET.to_string()];
        names.extend(self.variants.keys().filter(|k| *k != DEFAULT_RULESET).cloned());
        names
    }

    pub fn rules_for(&self, ruleset: &str) -> Option<&[Rule]> {
        if ruleset == DEFAULT_RULESET {
            Some(&self.rules)
        } else {
            self.variants.get(ruleset).map(Vec::as_slice)
        }
    }

    pub fn count_by_origin(&self, origin: RuleOrigin) -> usize {
        self.rules.iter().filter(|r| r.origin == origin).count()
    }

    /// `stated` facts followed by the declarations they and the program's
    /// disjunctions imply.
    pub fn with_declarations(&self, stated: impl IntoIterator<Item = Literal>) -> IndexSet<Literal> {
        let mut out: IndexSet<Literal> = stated.into_iter().collect();
        let implied: Vec<Literal> = out
            .iter()
            .map(|l| &l.atom)
            .chain(self.disjunctions.iter().flat_map(|d| d.atoms()))
            .flat_map(crate::translator::declarations_for)
            .collect();
        out.extend(implied);
        out
    }

    /// The stated facts with their declarations.
    pub fn base_facts(&self) -> IndexSet<Literal> {
        self.with_declarations(self.facts.iter().cloned())
    }

    /// Declarations implied by the argument sorts of every vocabulary fact.
    pub fn declarations(&self) -> Declarations {
        let mut d = Declarations::default();
        let atoms = self
            .facts
            .iter()
            .map(|l| &l.atom)
            .chain(self.disjunctions.iter().flat_map(|d| d.atoms()));
        for atom in atoms {
            let Some(sorts) = crate::translator::argument_sorts(atom) else { continue };
            for (arg, sort) in atom.args.iter().zip(sorts) {
                let Some(c) = arg.as_const() else { continue };
                match sort {
                    Sort::Class => d.classes.insert(c),
                    Sort::Individual => d.individuals.insert(c),
                    Sort::Property => d.properties.insert(c),
                    Sort::Datatype => d.datatypes.insert(c),
                    Sort::List | Sort::Number | Sort::Any => false,
                };
            }
        }
        d
    }

    /// Every constant symbol mentioned by facts or rules.
    pub fn constants(&self) -> BTreeSet<Symbol> {
        let mut out = Vec::new();
        for l in &self.facts {
            l.atom.args.iter().for_each(|a| a.collect_constants(&mut out));
        }
        for d in &self.disjunctions {
            for a in d.atoms() {
                a.args.iter().for_each(|t| t.collect_constants(&mut out));
            }
        }
        for r in self.rules.iter().chain(self.variants.values().flatten()) {
            for a in r.head_atoms() {
                a.args.iter().for_each(|t| t.collect_constants(&mut out));
            }
            for l in r.body_literals() {
                l.atom.args.iter().for_each(|t| t.collect_constants(&mut out));
            }
        }
        out.into_iter().collect()
    }
}
