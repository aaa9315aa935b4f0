//! Logic-program text for a compiled program.
//!
//! The default output reparses under the native dialect to an equivalent
//! program. The three-case member spelling is for reading alongside
//! Prolog sources and is not meant to be reparsed.

use std::fmt::Write;

use crate::model::{BodyElement, Head, Literal, Rule, RuleOrigin};
use crate::predicate::{v, Layer};
use crate::program::{Program, DEFAULT_RULESET};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmitOptions {
    /// Include the general and generated rules, not just the user rules.
    pub all_rules: bool,
    /// Rule set whose rules are written; the default set when `None`.
    pub ruleset: Option<String>,
    /// Spell recursive uses of the member relation `is_member_of`, giving
    /// the relation its three cases `ismemberof`, `is_member_of` and
    /// `isMemberOf`.
    pub three_case_member: bool,
}

const BRIDGE: &str = "is_member_of";

fn section(out: &mut String, title: &str) {
    if !out.is_empty() {
        out.push('\n');
    }
    writeln!(out, "% {title}").unwrap();
}

/// A body literal with the Derived member predicate renamed to the bridge.
fn bridged(l: &Literal) -> String {
    let text = l.to_string();
    if l.atom.predicate == v::member(Layer::Derived) {
        text.replacen("isMemberOf(", &format!("{BRIDGE}("), 1)
    } else {
        text
    }
}

fn is_member_head(rule: &Rule) -> bool {
    matches!(&rule.head, Head::Literal(l) if l.atom.predicate == v::member(Layer::Derived))
}

fn write_rule(out: &mut String, rule: &Rule, three_case: bool) {
    if !three_case || !is_member_head(rule) || rule.body.iter().all(|b| b.literal().is_none_or(|l| l.atom.predicate != v::member(Layer::Derived))) {
        writeln!(out, "{rule}").unwrap();
        return;
    }
    let body: Vec<String> = rule
        .body
        .iter()
        .map(|b| match b {
            BodyElement::Literal(l) => bridged(l),
            other => other.to_string(),
        })
        .collect();
    writeln!(out, "{} :- {}.", rule.head, body.join(", ")).unwrap();
}

/// Renders `program` as logic-program text.
pub fn emit(program: &Program, options: &EmitOptions) -> String {
    let mut out = String::new();
    let pragmas = program.pragmas.non_default();
    if !pragmas.is_empty() {
        section(&mut out, "pragmas");
        for (name, value) in pragmas {
            writeln!(out, ":- pragma({name}, {}).", value.replace('-', "_")).unwrap();
        }
    }
    if !program.facts.is_empty() {
        section(&mut out, "facts");
        for f in &program.facts {
            writeln!(out, "{f}.").unwrap();
        }
    }
    if !program.disjunctions.is_empty() {
        section(&mut out, "disjunctions");
        for d in &program.disjunctions {
            writeln!(out, "{d}.").unwrap();
        }
    }
    let name = options.ruleset.as_deref().unwrap_or(DEFAULT_RULESET);
    let rules = program.rules_for(name).unwrap_or_default();
    let groups = [
        (RuleOrigin::General, "general rules"),
        (RuleOrigin::CardinalityGenerated, "cardinality rules"),
        (RuleOrigin::User, "user rules"),
    ];
    for (origin, title) in groups {
        if origin != RuleOrigin::User && !options.all_rules {
            continue;
        }
        let group: Vec<&Rule> = rules.iter().filter(|r| r.origin == origin).collect();
        if group.is_empty() {
            continue;
        }
        section(&mut out, title);
        if origin == RuleOrigin::General && options.three_case_member {
            writeln!(out, "{BRIDGE}(I, C) :- ismemberof(I, C).").unwrap();
        }
        let mut label = None;
        for r in group {
            if origin != RuleOrigin::User && r.label != label {
                if let Some(l) = r.label {
                    writeln!(out, "% {l}").unwrap();
                }
                label = r.label;
            }
            write_rule(&mut out, r, options.three_case_member);
        }
    }
    out
}
