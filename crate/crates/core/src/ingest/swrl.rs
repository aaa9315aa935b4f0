//! SWRL XML: `swrlx:classAtom`, `swrlx:individualPropertyAtom` and
//! `ruleml:imp` with `ruleml:_body` / `ruleml:_head`. Ground atoms outside a
//! rule are facts.

use super::xml::{self, Element};
use super::{check_name, DiagnosticKind, Located, Parsed, SourceAtom, SourceAxiom, SourceRule};
use crate::symbol::Symbol;
use crate::term::Term;

const CONTAINERS: &[&str] = &["Ontology", "RDF", "Rulebase", "RuleML", "Assert", "rulebase"];
const UNSUPPORTED_ATOMS: &[&str] = &[
    "datavaluedPropertyAtom",
    "sameIndividualAtom",
    "differentIndividualsAtom",
    "builtinAtom",
    "dataRangeAtom",
];

pub(super) fn parse(text: &str) -> Parsed {
    let mut out = Parsed::default();
    if text.trim().is_empty() {
        return out;
    }
    match xml::parse(text) {
        Ok((root, stray)) => {
            super::stray_warnings(&mut out, stray);
            root.children.iter().for_each(|el| top(&mut out, el));
        }
        Err(e) => out.error(DiagnosticKind::Syntax, e.line, format!("malformed XML: {}", e.message)),
    }
    out
}

fn top(out: &mut Parsed, el: &Element) {
    match el.local() {
        l if CONTAINERS.contains(&l) => el.children.iter().for_each(|c| top(out, c)),
        "imp" => {
            let body = el.child("_body").map(|b| atoms(out, b)).unwrap_or_default();
            let head = el.child("_head").map(|h| atoms(out, h)).unwrap_or_default();
            horn(out, el.line, head, body);
        }
        "classAtom" | "individualPropertyAtom" => {
            if let Some(atom) = atom(out, el) {
                fact(out, el.line, atom);
            }
        }
        "label" | "comment" | "_rlab" => {}
        other => unsupported(out, el, other),
    }
}

fn unsupported(out: &mut Parsed, el: &Element, what: &str) {
    out.error(DiagnosticKind::Unsupported, el.line, format!("unsupported SWRL construct `{what}`"));
}

fn atoms(out: &mut Parsed, parent: &Element) -> Vec<SourceAtom> {
    parent.children.iter().filter_map(|c| atom(out, c)).collect()
}

fn atom(out: &mut Parsed, el: &Element) -> Option<SourceAtom> {
    let line = el.line;
    match el.local() {
        "classAtom" => {
            let class = el
                .attr("class")
                .or_else(|| el.child("Class").and_then(|c| c.attr("name")));
            let Some(class) = class else {
                out.error(DiagnosticKind::Syntax, line, "classAtom without a class");
                return None;
            };
            let class = symbol(out, line, xml::fragment(class))?;
            let args = args(out, el);
            match args.as_slice() {
                [arg] => Some(SourceAtom::Class { class, arg: arg.clone() }),
                _ => {
                    out.error(DiagnosticKind::Syntax, line, format!("classAtom takes 1 argument, found {}", args.len()));
                    None
                }
            }
        }
        "individualPropertyAtom" => {
            let Some(property) = el.attr("property") else {
                out.error(DiagnosticKind::Syntax, line, "individualPropertyAtom without swrlx:property");
                return None;
            };
            let property = symbol(out, line, xml::fragment(property))?;
            let args = args(out, el);
            match args.as_slice() {
                [s, o] => Some(SourceAtom::Property { property, subject: s.clone(), object: o.clone() }),
                _ => {
                    out.error(
                        DiagnosticKind::Syntax,
                        line,
                        format!("individualPropertyAtom takes 2 arguments, found {}", args.len()),
                    );
                    None
                }
            }
        }
        l if UNSUPPORTED_ATOMS.contains(&l) => {
            unsupported(out, el, l);
            None
        }
        other => {
            unsupported(out, el, other);
            None
        }
    }
}

fn args(out: &mut Parsed, el: &Element) -> Vec<Term> {
    el.children
        .iter()
        .filter(|c| c.local() != "Class")
        .filter_map(|c| match c.local() {
            "var" | "Var" => Some(variable(c.trimmed_text())),
            "Individual" | "ind" | "Ind" => {
                let name = c.attr("name").unwrap_or_else(|| c.trimmed_text());
                symbol(out, c.line, xml::fragment(name)).map(Term::Const)
            }
            other => {
                out.error(DiagnosticKind::Syntax, c.line, format!("unexpected argument element `{other}`"));
                None
            }
        })
        .collect()
}

pub(super) fn symbol(out: &mut Parsed, line: usize, name: &str) -> Option<Symbol> {
    check_name(out, line, name).then(|| Symbol::new(name))
}

/// Source variables keep their name when it already reads as a variable;
/// others get an uppercase `V` prefix so the native form stays parseable.
pub(super) fn variable(name: &str) -> Term {
    let name = name.trim_start_matches('?');
    if name.starts_with(|c: char| c.is_uppercase() || c == '_') {
        Term::var(name)
    } else {
        Term::var(&format!("V{name}"))
    }
}

pub(super) fn horn(out: &mut Parsed, line: usize, head: Vec<SourceAtom>, body: Vec<SourceAtom>) {
    if head.is_empty() {
        out.error(DiagnosticKind::Syntax, line, "rule without head atoms");
        return;
    }
    out.rules.push(Located { item: SourceRule::Horn { head, body }, line });
}

/// A top-level atom: must be ground.
pub(super) fn fact(out: &mut Parsed, line: usize, atom: SourceAtom) {
    let axiom = match atom {
        SourceAtom::Class { class, arg: Term::Const(individual) } => {
            SourceAxiom::IndividualAssertion { individual, class }
        }
        SourceAtom::Property { property, subject: Term::Const(subject), object: Term::Const(value) } => {
            SourceAxiom::PropertyAssertion { subject, property, value }
        }
        _ => {
            out.error(DiagnosticKind::Semantic, line, "an atom outside a rule must be ground");
            return;
        }
    };
    out.axiom(line, axiom);
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEED_RULE_DOC: &str = r#"<swrlx:classAtom> <owlx:Class owlx:name = "sniper"/> <owlx:Individual owlx:name="smith"/> </swrlx:classAtom> <ruleml:imp> <ruleml:_body> <swrlx:individualPropertyAtom swrlx:property="isDescribedBy"> <ruleml:var>T</ruleml:var> <ruleml:var>G</ruleml:var> </swrlx:individualPropertyAtom> <swrlx:individualPropertyAtom swrlx:property="hasSpeedObservation"> <ruleml:var>G</ruleml:var> <ruleml:var>S</ruleml:var> </swrlx:individualPropertyAtom> </ruleml:_body> <ruleml:_head> <swrlx:individualPropertyAtom swrlx:property="hasSpeed"> <ruleml:var>T</ruleml:var> <ruleml:var>S</ruleml:var> </swrlx:individualPropertyAtom> </ruleml:_head> </ruleml:imp>"#;

    fn prop(p: &str, s: &str, o: &str) -> SourceAtom {
        SourceAtom::Property { property: Symbol::new(p), subject: Term::var(s), object: Term::var(o) }
    }

    #[test]
    fn fact_and_rule() {
        let p = parse(SPEED_RULE_DOC);
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        assert_eq!(
            p.axiom_items(),
            vec![SourceAxiom::IndividualAssertion { individual: Symbol::new("smith"), class: Symbol::new("sniper") }]
        );
        assert_eq!(
            p.rule_items(),
            vec![SourceRule::Horn {
                head: vec![prop("hasSpeed", "T", "S")],
                body: vec![prop("isDescribedBy", "T", "G"), prop("hasSpeedObservation", "G", "S")],
            }]
        );
    }

    #[test]
    fn lowercase_variables_are_prefixed() {
        assert_eq!(variable("x"), Term::var("Vx"));
        assert_eq!(variable("?y"), Term::var("Vy"));
        assert_eq!(variable("X"), Term::var("X"));
    }

    #[test]
    fn unsupported_atoms_and_nonground_facts() {
        let doc = r#"<swrlx:Ontology>
<swrlx:sameIndividualAtom/>
<swrlx:classAtom><owlx:Class owlx:name="a"/><ruleml:var>X</ruleml:var></swrlx:classAtom>
</swrlx:Ontology>"#;
        let p = parse(doc);
        assert_eq!(p.diagnostics.len(), 2, "{:?}", p.diagnostics);
        assert_eq!(p.diagnostics[0].kind, DiagnosticKind::Unsupported);
        assert_eq!(p.diagnostics[0].line, 2);
        assert_eq!(p.diagnostics[1].line, 3);
    }
}
