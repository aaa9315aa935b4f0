//! Front ends: OWL RDF/XML subset, SWRL XML, RuleML XML, and the native
//! logic-program text format.
//!
//! Every dialect produces [`SourceAxiom`]s and [`SourceRule`]s with line
//! numbers. Problems are collected as [`Diagnostic`]s; a parse never stops at
//! the first one.

mod native;
mod owl;
mod ruleml;
mod swrl;
pub mod xml;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::model::{Disjunction, Literal, Rule};
use crate::predicate::PredicateTable;
use crate::symbol::Symbol;
use crate::term::Term;

pub use native::{parse_fact, parse_query, parse_rule_text};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dialect {
    Owl,
    Swrl,
    RuleMl,
    Native,
}

impl Dialect {
    pub fn from_extension(path: &Path) -> Option<Dialect> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "owl" | "rdf" => Some(Dialect::Owl),
            "swrl" => Some(Dialect::Swrl),
            "ruleml" => Some(Dialect::RuleMl),
            "pl" | "pro" | "lp" => Some(Dialect::Native),
            _ => None,
        }
    }

    /// Guesses the dialect from content.
    pub fn sniff(text: &str) -> Dialect {
        let head = text.trim_start();
        if !head.starts_with('<') {
            return Dialect::Native;
        }
        if text.contains("swrlx:") || text.contains("ruleml:imp") {
            Dialect::Swrl
        } else if text.contains("<Implies") || text.contains("<RuleML") || text.contains("<Atom") {
            Dialect::RuleMl
        } else {
            Dialect::Owl
        }
    }
}

impl FromStr for Dialect {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "owl" => Ok(Dialect::Owl),
            "swrl" => Ok(Dialect::Swrl),
            "ruleml" => Ok(Dialect::RuleMl),
            "native" | "pl" | "prolog" => Ok(Dialect::Native),
            other => Err(format!("unknown dialect `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    Syntax,
    /// A recognized construct outside the supported subset.
    Unsupported,
    /// Misuse of a reserved functor.
    Reserved,
    /// Unsafe rule, unknown predicate, arity clash and similar.
    Semantic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: Option<String>,
    pub line: usize,
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    pub fn error(kind: DiagnosticKind, line: usize, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            file: None,
            line,
            severity: Severity::Error,
            kind,
            message: message.into(),
        }
    }

    pub fn warning(line: usize, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            file: None,
            line,
            severity: Severity::Warning,
            kind: DiagnosticKind::Semantic,
            message: message.into(),
        }
    }

    pub fn in_file(mut self, file: &str) -> Diagnostic {
        self.file = Some(file.to_owned());
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning: ",
            Severity::Error => "error: ",
        };
        match (&self.file, self.line) {
            (None, 0) => {}
            (Some(file), 0) => write!(f, "{file}: ")?,
            (file, line) => write!(f, "{}:{line}: ", file.as_deref().unwrap_or("<input>"))?,
        }
        write!(f, "{level}{}", self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CardinalityKind {
    Min,
    Max,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceAxiom {
    ClassDecl(Symbol),
    PropertyDecl(Symbol),
    IndividualAssertion { individual: Symbol, class: Symbol },
    PropertyAssertion { subject: Symbol, property: Symbol, value: Symbol },
    SubClassOf { sub: Symbol, sup: Symbol },
    ComplementOf { class: Symbol, complement: Symbol },
    DisjointWith { class: Symbol, other: Symbol },
    EquivalentClasses { class: Symbol, other: Symbol },
    OneOf { class: Symbol, members: Vec<Symbol> },
    SomeValuesFrom { class: Symbol, property: Symbol, filler: Symbol },
    AllValuesFrom { class: Symbol, property: Symbol, filler: Symbol },
    Cardinality { kind: CardinalityKind, class: Symbol, property: Symbol, n: usize },
    /// `<owl:Class><p rdf:resource="#v"/></owl:Class>`: things whose `p` is `v`.
    AnonymousClass { property: Symbol, value: Symbol },
    /// A ground fact in logic-program form (native dialect).
    Fact(Literal),
    /// A ground disjunctive fact (native dialect).
    Disjunction(Disjunction),
}

/// An atom of SWRL or RuleML, in relational form before reification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceAtom {
    Class { class: Symbol, arg: Term },
    Property { property: Symbol, subject: Term, object: Term },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceRule {
    /// SWRL / RuleML implication; variables are implicitly universal.
    Horn { head: Vec<SourceAtom>, body: Vec<SourceAtom> },
    /// A native clause, already in layered logic-program form.
    Clause(Rule),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located<T> {
    pub item: T,
    pub line: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Parsed {
    pub axioms: Vec<Located<SourceAxiom>>,
    pub rules: Vec<Located<SourceRule>>,
    /// `:- pragma(name, value).` directives, native dialect only.
    pub pragmas: Vec<Located<(String, String)>>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Parsed {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    pub fn axiom_items(&self) -> Vec<SourceAxiom> {
        self.axioms.iter().map(|a| a.item.clone()).collect()
    }

    pub fn rule_items(&self) -> Vec<SourceRule> {
        self.rules.iter().map(|r| r.item.clone()).collect()
    }

    pub(crate) fn axiom(&mut self, line: usize, item: SourceAxiom) {
        self.axioms.push(Located { item, line });
    }

    pub(crate) fn error(&mut self, kind: DiagnosticKind, line: usize, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic::error(kind, line, message));
    }
}

/// OWL constructs recognized but not supported; ingest reports them by name.
pub const UNSUPPORTED_OWL: &[&str] = &[
    "subPropertyOf",
    "domain",
    "range",
    "FunctionalProperty",
    "InverseFunctionalProperty",
    "SymmetricProperty",
    "TransitiveProperty",
    "sameAs",
    "differentFrom",
    "AllDifferent",
    "distinctMembers",
    "DatatypeProperty",
    "equivalentProperty",
    "inverseOf",
    "hasValue",
    "unionOf",
    "intersectionOf",
    "imports",
];

/// Parses one document with a fresh predicate table.
pub fn parse(document: &str, dialect: Dialect) -> Parsed {
    parse_with(document, dialect, &mut PredicateTable::new())
}

/// Parses one document, resolving native predicate spellings against `table`
/// (which learns every spelling the document uses).
pub fn parse_with(document: &str, dialect: Dialect, table: &mut PredicateTable) -> Parsed {
    match dialect {
        Dialect::Owl => owl::parse(document),
        Dialect::Swrl => swrl::parse(document),
        Dialect::RuleMl => ruleml::parse(document),
        Dialect::Native => native::parse(document, table),
    }
}

pub(crate) fn stray_warnings(parsed: &mut Parsed, stray: Vec<xml::XmlError>) {
    for e in stray {
        parsed.diagnostics.push(Diagnostic::warning(e.line, e.message));
    }
}

/// Rejects names that collide with reserved functors.
pub(crate) fn check_name(parsed: &mut Parsed, line: usize, name: &str) -> bool {
    if crate::term::reserved_arity(name).is_some() {
        parsed.error(
            DiagnosticKind::Reserved,
            line,
            format!("`{name}` is reserved for system-generated terms"),
        );
        false
    } else if name.is_empty() {
        parsed.error(DiagnosticKind::Syntax, line, "empty name");
        false
    } else {
        true
    }
}
