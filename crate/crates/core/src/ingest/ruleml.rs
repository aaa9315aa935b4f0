//! RuleML XML: `Implies` with `head`/`body` (or `then`/`if`, or positional
//! body-then-head), `Atom` with `opr`/`op` + `Rel`, and `Var`/`Ind`
//! arguments. Unary relations are class atoms, binary ones property atoms.

use super::swrl::{fact, horn, symbol, variable};
use super::xml::{self, Element};
use super::{DiagnosticKind, Parsed, SourceAtom};
use crate::term::Term;

const CONTAINERS: &[&str] = &["RuleML", "Assert", "Rulebase", "rulebase", "formula", "Query"];

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
        "Implies" | "Imp" => implies(out, el),
        "Fact" => {
            let holder = el.child("head").unwrap_or(el);
            for a in atoms(out, holder) {
                fact(out, el.line, a);
            }
        }
        "Atom" => {
            if let Some(a) = atom(out, el) {
                fact(out, el.line, a);
            }
        }
        "oid" | "label" => {}
        other => unsupported(out, el, other),
    }
}

fn unsupported(out: &mut Parsed, el: &Element, what: &str) {
    out.error(DiagnosticKind::Unsupported, el.line, format!("unsupported RuleML construct `{what}`"));
}

fn implies(out: &mut Parsed, el: &Element) {
    let role = |names: &[&str]| el.children.iter().find(|c| names.contains(&c.local()));
    let (body, head) = match (role(&["body", "if"]), role(&["head", "then"])) {
        (Some(b), Some(h)) => (atoms(out, b), atoms(out, h)),
        _ => {
            let parts: Vec<&Element> = el.children.iter().filter(|c| c.local() != "oid").collect();
            match parts.as_slice() {
                [b, h] => (atom_or_and(out, b), atom_or_and(out, h)),
                _ => {
                    out.error(DiagnosticKind::Syntax, el.line, "Implies needs a body and a head");
                    return;
                }
            }
        }
    };
    horn(out, el.line, head, body);
}

/// Atoms of a role element: its `Atom` children, or those of an `And`.
fn atoms(out: &mut Parsed, role: &Element) -> Vec<SourceAtom> {
    role.children.iter().flat_map(|c| atom_or_and(out, c)).collect()
}

fn atom_or_and(out: &mut Parsed, el: &Element) -> Vec<SourceAtom> {
    match el.local() {
        "And" => el.children.iter().flat_map(|c| atom_or_and(out, c)).collect(),
        "Atom" => atom(out, el).into_iter().collect(),
        other => {
            unsupported(out, el, other);
            Vec::new()
        }
    }
}

fn atom(out: &mut Parsed, el: &Element) -> Option<SourceAtom> {
    let rel = el
        .children
        .iter()
        .find_map(|c| match c.local() {
            "opr" | "op" => c.child("Rel"),
            "Rel" => Some(c),
            _ => None,
        })
        .map(|r| r.trimmed_text());
    let Some(rel) = rel else {
        out.error(DiagnosticKind::Syntax, el.line, "Atom without a relation");
        return None;
    };
    let rel = symbol(out, el.line, xml::fragment(rel))?;
    let mut args = Vec::new();
    for c in &el.children {
        match c.local() {
            "opr" | "op" | "Rel" => {}
            "Var" | "var" => args.push(variable(c.trimmed_text())),
            "Ind" | "ind" => args.push(Term::Const(symbol(out, c.line, c.trimmed_text())?)),
            other => {
                unsupported(out, c, other);
                return None;
            }
        }
    }
    match <[Term; 2]>::try_from(args) {
        Ok([subject, object]) => Some(SourceAtom::Property { property: rel, subject, object }),
        Err(args) if args.len() == 1 => Some(SourceAtom::Class { class: rel, arg: args[0].clone() }),
        Err(args) => {
            out.error(
                DiagnosticKind::Unsupported,
                el.line,
                format!("relation `{rel}` with {} arguments; only classes and properties are supported", args.len()),
            );
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{SourceAxiom, SourceRule};
    use crate::symbol::Symbol;

    #[test]
    fn self_loop_is_parsed_faithfully() {
        let doc = "<Implies> <head> <Atom> <opr> <Rel>redForceTheaterObject</Rel> </opr> <Var>X</Var> </Atom> </head> <body> <Atom> <opr> <Rel>redForceTheaterObject</Rel> </opr> <Var>X</Var> </Atom> </body> </Implies>";
        let p = parse(doc);
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        let a = SourceAtom::Class { class: Symbol::new("redForceTheaterObject"), arg: Term::var("X") };
        assert_eq!(p.rule_items(), vec![SourceRule::Horn { head: vec![a.clone()], body: vec![a] }]);
    }

    #[test]
    fn positional_form_and_facts() {
        let doc = r#"<RuleML><Assert>
<Implies><And><Atom><Rel>p</Rel><Var>x</Var><Var>y</Var></Atom></And><Atom><Rel>c</Rel><Var>x</Var></Atom></Implies>
<Atom><Rel>c</Rel><Ind>k</Ind></Atom>
</Assert></RuleML>"#;
        let p = parse(doc);
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        let SourceRule::Horn { head, body } = &p.rule_items()[0] else { panic!() };
        assert_eq!(head.len(), 1);
        assert_eq!(body.len(), 1);
        assert_eq!(
            p.axiom_items(),
            vec![SourceAxiom::IndividualAssertion { individual: Symbol::new("k"), class: Symbol::new("c") }]
        );
        assert_eq!(p.axioms[0].line, 3);
    }

    #[test]
    fn ternary_relations_are_unsupported() {
        let p = parse("<Atom><Rel>r</Rel><Ind>a</Ind><Ind>b</Ind><Ind>c</Ind></Atom>");
        assert_eq!(p.diagnostics[0].kind, DiagnosticKind::Unsupported);
    }
}
