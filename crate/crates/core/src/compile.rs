//! Program assembly: parse every document, translate, attach the general
//! and generated rules, and build rule-set variants.

use indexmap::IndexSet;

use crate::axioms::{general_rules, generate_cardinality_rules};
use crate::ingest::{parse_with, Diagnostic, DiagnosticKind, Dialect, Parsed, Severity, SourceAxiom};
use crate::model::{Disjunction, Literal, Rule, RuleOrigin};
use crate::predicate::PredicateTable;
use crate::program::{Pragmas, Program, DEFAULT_RULESET};
use crate::translator::{as_fact, check_safety, translate_axiom, translate_rule};

/// One input file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub name: String,
    pub text: String,
    pub dialect: Dialect,
}

impl Document {
    pub fn new(name: &str, text: &str, dialect: Dialect) -> Document {
        Document { name: name.to_owned(), text: text.to_owned(), dialect }
    }

    pub fn native(name: &str, text: &str) -> Document {
        Document::new(name, text, Dialect::Native)
    }
}

#[derive(Clone, Debug, Default)]
pub struct CompileOptions {
    /// Pragma overrides, applied after those in the documents.
    pub pragmas: Vec<(String, String)>,
    /// Named rule-set variants: the default rules plus each variant's rules.
    pub variants: Vec<(String, Vec<Document>)>,
}

#[derive(Clone, Debug)]
pub struct Compiled {
    pub program: Program,
    /// Warnings only; any error fails the compilation.
    pub diagnostics: Vec<Diagnostic>,
}

/// Appends rules not already present as the same clause.
fn push_unique(rules: &mut Vec<Rule>, new: impl IntoIterator<Item = Rule>) {
    for r in new {
        if !rules.iter().any(|x| x.same_clause(&r)) {
            rules.push(r);
        }
    }
}

struct Unit<'d> {
    doc: &'d Document,
    parsed: Parsed,
}

/// User rules of one document, labeled `file:line`; facts written as
/// bodyless rules are returned separately.
fn user_rules(unit: &Unit, diags: &mut Vec<Diagnostic>) -> (Vec<Rule>, Vec<Literal>) {
    let mut rules = Vec::new();
    let mut facts = Vec::new();
    for located in &unit.parsed.rules {
        for rule in translate_rule(&located.item) {
            if let Some(f) = as_fact(&rule) {
                facts.push(f.clone());
                continue;
            }
            let issues = check_safety(&rule);
            for issue in &issues {
                diags.push(
                    Diagnostic::error(DiagnosticKind::Semantic, located.line, format!("unsafe rule `{rule}`: {issue}"))
                        .in_file(&unit.doc.name),
                );
            }
            if issues.is_empty() {
                rules.push(rule.labeled(&format!("{}:{}", unit.doc.name, located.line)));
            }
        }
    }
    (rules, facts)
}

fn parse_all<'d>(docs: &'d [Document], table: &mut PredicateTable, diags: &mut Vec<Diagnostic>) -> Vec<Unit<'d>> {
    docs.iter()
        .map(|doc| {
            let parsed = parse_with(&doc.text, doc.dialect, table);
            diags.extend(parsed.diagnostics.iter().map(|d| d.clone().in_file(&doc.name)));
            Unit { doc, parsed }
        })
        .collect()
}

/// Compiles documents into a program. Fails with every error diagnostic
/// found; on success returns the warnings.
pub fn compile(docs: &[Document], options: &CompileOptions) -> Result<Compiled, Vec<Diagnostic>> {
    let mut diags = Vec::new();

    // Learn every spelling first so a lowercase use in one file resolves to
    // the Base layer when another file supplies the camelcase spelling.
    let mut table = PredicateTable::new();
    let all_docs = docs.iter().chain(options.variants.iter().flat_map(|(_, d)| d));
    for doc in all_docs.filter(|d| d.dialect == Dialect::Native) {
        parse_with(&doc.text, doc.dialect, &mut table);
    }

    let units = parse_all(docs, &mut table, &mut diags);
    let variant_units: Vec<(String, Vec<Unit>)> = options
        .variants
        .iter()
        .map(|(name, vdocs)| (name.clone(), parse_all(vdocs, &mut table, &mut diags)))
        .collect();

    let mut pragmas = Pragmas::default();
    for unit in &units {
        for p in &unit.parsed.pragmas {
            let (name, value) = &p.item;
            if let Err(e) = pragmas.set(name, value) {
                diags.push(Diagnostic::error(DiagnosticKind::Semantic, p.line, e).in_file(&unit.doc.name));
            }
        }
    }
    for (name, value) in &options.pragmas {
        if let Err(e) = pragmas.set(name, value) {
            diags.push(Diagnostic::error(DiagnosticKind::Semantic, 0, e).in_file("<command line>"));
        }
    }

    let mut facts: IndexSet<Literal> = IndexSet::new();
    let mut disjunctions: IndexSet<Disjunction> = IndexSet::new();
    let mut user = Vec::new();
    for unit in &units {
        for a in &unit.parsed.axioms {
            if let SourceAxiom::Disjunction(d) = &a.item {
                disjunctions.insert(d.clone());
            } else {
                facts.extend(translate_axiom(&a.item).into_iter().take(1));
            }
        }
        let (rules, rule_facts) = user_rules(unit, &mut diags);
        facts.extend(rule_facts);
        user.extend(rules);
    }
    let facts: Vec<Literal> = facts.into_iter().collect();

    let generated = generate_cardinality_rules(&facts, &pragmas);
    diags.extend(generated.diagnostics);

    let mut rules = Vec::new();
    push_unique(&mut rules, general_rules(&table, &pragmas));
    push_unique(&mut rules, generated.rules);
    push_unique(&mut rules, user);

    let mut program = Program {
        predicates: table,
        facts,
        disjunctions: disjunctions.into_iter().collect(),
        rules,
        constraints: generated.constraints,
        pragmas,
        variants: Default::default(),
    };

    for (name, vunits) in &variant_units {
        if name == DEFAULT_RULESET || program.variants.contains_key(name) {
            diags.push(Diagnostic::error(DiagnosticKind::Semantic, 0, format!("rule set `{name}` is defined twice")));
            continue;
        }
        let mut rules = program.rules.clone();
        for unit in vunits {
            if !unit.parsed.axioms.is_empty() || !unit.parsed.pragmas.is_empty() {
                let line = unit.parsed.axioms.first().map_or(0, |a| a.line);
                diags.push(
                    Diagnostic::error(
                        DiagnosticKind::Semantic,
                        line,
                        format!("rule-set file for `{name}` may only contain rules"),
                    )
                    .in_file(&unit.doc.name),
                );
            }
            let (vrules, vfacts) = user_rules(unit, &mut diags);
            if !vfacts.is_empty() {
                diags.push(
                    Diagnostic::error(DiagnosticKind::Semantic, 0, format!("rule-set file for `{name}` may only contain rules"))
                        .in_file(&unit.doc.name),
                );
            }
            push_unique(&mut rules, vrules);
        }
        program.variants.insert(name.clone(), rules);
    }

    let decls = program.declarations();
    for s in decls.overlapping() {
        diags.push(Diagnostic::warning(0, format!("`{s}` is declared in more than one category")));
    }

    if diags.iter().any(|d| d.severity == Severity::Error) {
        diags.retain(|d| d.severity == Severity::Error);
        return Err(diags);
    }
    Ok(Compiled { program, diagnostics: diags })
}

/// Compiles native-dialect text on its own.
pub fn compile_native(text: &str) -> Result<Compiled, Vec<Diagnostic>> {
    compile(&[Document::native("<input>", text)], &CompileOptions::default())
}

impl Program {
    pub fn user_rule_count(&self) -> usize {
        self.count_by_origin(RuleOrigin::User)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::ExistentialStrategy;

    #[test]
    fn empty_input_has_only_general_rules() {
        let c = compile_native("").unwrap();
        assert!(c.program.facts.is_empty());
        assert!(c.program.rules.iter().all(|r| r.origin == RuleOrigin::General));
        assert!(!c.program.rules.is_empty());
    }

    #[test]
    fn spellings_are_shared_across_files() {
        let docs = [
            Document::native("a.pl", "isthreatto(a, b).\n"),
            Document::native("b.pl", "alert(X) :- isThreatTo(X, Y).\n"),
        ];
        let c = compile(&docs, &CompileOptions::default()).unwrap();
        let fact = &c.program.facts[0];
        assert_eq!(fact.atom.predicate.layer, crate::predicate::Layer::Base);
        let labels: Vec<String> = c.program.rules.iter().filter_map(|r| r.label.map(|l| l.to_string())).collect();
        assert!(labels.contains(&"b.pl:1".to_string()));
    }

    #[test]
    fn pragma_precedence() {
        let docs = [Document::native("a.pl", ":- pragma(existential, error).\n")];
        let c = compile(&docs, &CompileOptions::default()).unwrap();
        assert_eq!(c.program.pragmas.existential, ExistentialStrategy::Error);
        let opts = CompileOptions { pragmas: vec![("existential".into(), "assert-fresh".into())], ..Default::default() };
        let c = compile(&docs, &opts).unwrap();
        assert_eq!(c.program.pragmas.existential, ExistentialStrategy::AssertFresh);
    }

    #[test]
    fn unsafe_rules_fail_with_file_and_line() {
        let err = compile(&[Document::native("u.pl", "\nfoo(X) :- not(X = a), bar(X).\n")], &CompileOptions::default())
            .unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].file.as_deref(), Some("u.pl"));
        assert_eq!(err[0].line, 2);
        assert!(err[0].message.contains("unbound variable `X` in guard"));
    }

    #[test]
    fn duplicate_general_rule_in_input_is_dropped() {
        let c1 = compile_native("").unwrap();
        let c2 = compile_native("isSubClassOf(C, D) :- issubclassof(C, D).\n").unwrap();
        assert_eq!(c1.program.rules.len(), c2.program.rules.len());
    }

    #[test]
    fn variants_hold_complete_rule_lists() {
        let opts = CompileOptions {
            variants: vec![("low".into(), vec![Document::native("low.pl", "alert(X) :- isMemberOf(X, enemy).\n")])],
            ..Default::default()
        };
        let c = compile(&[Document::native("m.pl", "ismemberof(t, enemy).\n")], &opts).unwrap();
        let low = &c.program.variants["low"];
        assert_eq!(low.len(), c.program.rules.len() + 1);
        let bad = CompileOptions {
            variants: vec![("low".into(), vec![Document::native("low.pl", "ismemberof(a, b).\n")])],
            ..Default::default()
        };
        let err = compile(&[], &bad).unwrap_err();
        assert!(err[0].message.contains("may only contain rules"));
    }

    #[test]
    fn unsupported_cardinality_is_an_error() {
        let err = compile_native("maxcardinality(c, p, 7).\n").unwrap_err();
        assert_eq!(err[0].kind, DiagnosticKind::Unsupported);
    }
}
