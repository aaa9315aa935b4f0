//! Source axioms and rules to layered logic-program form.
//!
//! Class and property names always become arguments of the fixed
//! vocabulary, never predicates. Facts land in the Base layer with
//! declarations for every constant they mention; rule heads are Base and
//! rule bodies Derived.

use std::collections::BTreeSet;

use crate::ingest::{CardinalityKind, SourceAtom, SourceAxiom, SourceRule};
use crate::model::{Atom, BodyElement, Disjunct, Head, Literal, Rule, RuleOrigin};
use crate::predicate::{sorts_of, v, Layer, Predicate, Sort};
use crate::symbol::Symbol;
use crate::term::{Term, UNNAMED_CLASS};

fn c(s: Symbol) -> Term {
    Term::Const(s)
}

fn base(pred: Predicate, args: Vec<Term>) -> Literal {
    Literal::positive(Atom::new(pred, args))
}

fn declaration_predicate(sort: Sort) -> Option<Predicate> {
    match sort {
        Sort::Class => Some(v::class(Layer::Base)),
        Sort::Individual => Some(v::individual(Layer::Base)),
        Sort::Property => Some(v::is_property(Layer::Base)),
        Sort::Datatype => Some(v::datatype(Layer::Base)),
        Sort::List | Sort::Number | Sort::Any => None,
    }
}

fn is_declaration(pred: &Predicate) -> bool {
    [v::class, v::individual, v::is_property, v::datatype]
        .iter()
        .any(|f| f(Layer::Base).name == pred.name)
}

/// Sort of each argument of a vocabulary atom. The filler of a restriction
/// on an anonymous class is the property value, an individual.
pub fn argument_sorts(atom: &Atom) -> Option<Vec<Sort>> {
    let mut sorts = sorts_of(&atom.predicate)?.to_vec();
    let restriction = atom.predicate.name == v::all_values(Layer::Base).name
        || atom.predicate.name == v::some_values(Layer::Base).name;
    if restriction {
        if let Some(Term::Compound(cmp)) = atom.args.first() {
            if cmp.functor.as_str() == UNNAMED_CLASS {
                sorts[2] = Sort::Individual;
            }
        }
    }
    Some(sorts)
}

/// Base-layer declarations for the ground arguments of a vocabulary atom.
pub fn declarations_for(atom: &Atom) -> Vec<Literal> {
    if is_declaration(&atom.predicate) {
        return Vec::new();
    }
    let Some(sorts) = argument_sorts(atom) else { return Vec::new() };
    let mut out = Vec::new();
    for (t, sort) in atom.args.iter().zip(sorts) {
        match t {
            // Enumerated members are individuals.
            Term::List(items) if sort == Sort::List => {
                for m in items.iter().filter(|m| m.as_const().is_some()) {
                    out.push(base(v::individual(Layer::Base), vec![m.clone()]));
                }
            }
            Term::List(_) => {}
            t if t.is_ground() => {
                if let Some(p) = declaration_predicate(sort) {
                    out.push(base(p, vec![t.clone()]));
                }
            }
            _ => {}
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|l| seen.insert(l.clone()));
    out
}

/// Reified facts for one axiom, main fact first, then declarations.
/// Disjunctive facts are kept apart by the caller and yield no literals here.
pub fn translate_axiom(axiom: &SourceAxiom) -> Vec<Literal> {
    let b = Layer::Base;
    let main = match axiom {
        SourceAxiom::ClassDecl(x) => base(v::class(b), vec![c(*x)]),
        SourceAxiom::PropertyDecl(p) => base(v::is_property(b), vec![c(*p)]),
        SourceAxiom::IndividualAssertion { individual, class } => {
            base(v::member(b), vec![c(*individual), c(*class)])
        }
        SourceAxiom::PropertyAssertion { subject, property, value } => {
            base(v::property(b), vec![c(*subject), c(*property), c(*value)])
        }
        SourceAxiom::SubClassOf { sub, sup } => base(v::subclass(b), vec![c(*sub), c(*sup)]),
        SourceAxiom::ComplementOf { class, complement } => {
            base(v::complementary(b), vec![c(*class), c(*complement)])
        }
        SourceAxiom::DisjointWith { class, other } => base(v::disjoint(b), vec![c(*class), c(*other)]),
        SourceAxiom::EquivalentClasses { class, other } => {
            base(v::equivalent_classes(b), vec![c(*class), c(*other)])
        }
        SourceAxiom::OneOf { class, members } => {
            let list = Term::list(members.iter().map(|m| c(*m)).collect());
            base(v::set(b), vec![c(*class), list])
        }
        SourceAxiom::SomeValuesFrom { class, property, filler } => {
            base(v::some_values(b), vec![c(*class), c(*property), c(*filler)])
        }
        SourceAxiom::AllValuesFrom { class, property, filler } => {
            base(v::all_values(b), vec![c(*class), c(*property), c(*filler)])
        }
        SourceAxiom::Cardinality { kind, class, property, n } => {
            let pred = match kind {
                CardinalityKind::Min => v::min_card(b),
                CardinalityKind::Max => v::max_card(b),
                CardinalityKind::Exact => v::exact_card(b),
            };
            base(pred, vec![c(*class), c(*property), Term::constant(&n.to_string())])
        }
        SourceAxiom::AnonymousClass { property, value } => {
            let anon = Term::unnamed_class(c(*property), c(*value));
            base(v::all_values(b), vec![anon, c(*property), c(*value)])
        }
        SourceAxiom::Fact(l) => l.clone(),
        SourceAxiom::Disjunction(d) => {
            let mut out = Vec::new();
            for a in d.atoms() {
                out.extend(declarations_for(a));
            }
            return out;
        }
    };
    let mut out = declarations_for(&main.atom);
    out.insert(0, main);
    out
}

fn source_atom(a: &SourceAtom, layer: Layer) -> Atom {
    match a {
        SourceAtom::Class { class, arg } => Atom::new(v::member(layer), vec![arg.clone(), c(*class)]),
        SourceAtom::Property { property, subject, object } => {
            Atom::new(v::property(layer), vec![subject.clone(), c(*property), object.clone()])
        }
    }
}

/// One rule per head atom, head in the Base layer and body in the Derived
/// layer. Native clauses are already layered and pass through unchanged.
pub fn translate_rule(rule: &SourceRule) -> Vec<Rule> {
    match rule {
        SourceRule::Clause(r) => vec![r.clone()],
        SourceRule::Horn { head, body } => {
            let body: Vec<BodyElement> = body
                .iter()
                .map(|a| BodyElement::Literal(Literal::positive(source_atom(a, Layer::Derived))))
                .collect();
            head.iter()
                .map(|h| {
                    let head = Head::Literal(Literal::positive(source_atom(h, Layer::Base)));
                    Rule::new(head, body.clone(), RuleOrigin::User)
                })
                .collect()
        }
    }
}

/// A bodyless rule with a ground literal head is a fact.
pub fn as_fact(rule: &Rule) -> Option<&Literal> {
    match &rule.head {
        Head::Literal(l) if rule.body.is_empty() && l.atom.is_ground() => Some(l),
        _ => None,
    }
}

/// The declaration guard that would bind `var`, judged by the sort of the
/// first vocabulary position it occupies later in the body.
fn suggested_guard(rule: &Rule, var: Symbol) -> String {
    let sort = rule
        .body_literals()
        .find_map(|l| {
            let sorts = argument_sorts(&l.atom)?;
            l.atom
                .args
                .iter()
                .zip(sorts)
                .find(|(t, _)| **t == Term::Var(var))
                .map(|(_, s)| s)
        })
        .unwrap_or(Sort::Individual);
    let pred = match sort {
        Sort::Class => "isClass",
        Sort::Property => "isProperty",
        Sort::Datatype => "isDatatype",
        _ => "isIndividual",
    };
    format!("{pred}({var})")
}

/// Range restriction, checked left to right: a guard's variables must be
/// bound by the elements before it, and every head variable by the body.
/// Body literals of either polarity bind their variables, negative ones
/// being stored facts.
pub fn check_safety(rule: &Rule) -> Vec<String> {
    let mut issues = Vec::new();
    let mut bound: BTreeSet<Symbol> = BTreeSet::new();
    let vars_of = |t: &Term| t.vars();
    for el in &rule.body {
        match el {
            BodyElement::Literal(l) => bound.extend(l.atom.vars()),
            BodyElement::NotEqual(a, b) => {
                for x in vars_of(a).into_iter().chain(vars_of(b)) {
                    if !bound.contains(&x) {
                        issues.push(format!(
                            "unbound variable `{x}` in guard `{el}`; insert a declaration guard such as `{}` before it",
                            suggested_guard(rule, x)
                        ));
                    }
                }
            }
            BodyElement::Member(x, list) => {
                for y in vars_of(list) {
                    if !bound.contains(&y) {
                        issues.push(format!("unbound variable `{y}` in list of guard `{el}`"));
                    }
                }
                bound.extend(vars_of(x));
            }
            BodyElement::Equal(a, b) => {
                let a_bound = vars_of(a).iter().all(|x| bound.contains(x));
                let b_bound = vars_of(b).iter().all(|x| bound.contains(x));
                if a_bound || b_bound {
                    bound.extend(vars_of(a));
                    bound.extend(vars_of(b));
                } else {
                    let x = vars_of(a).into_iter().find(|x| !bound.contains(x)).expect("unbound");
                    issues.push(format!(
                        "unbound variable `{x}` in guard `{el}`; insert a declaration guard such as `{}` before it",
                        suggested_guard(rule, x)
                    ));
                }
            }
        }
    }
    let mut head_vars = Vec::new();
    match &rule.head {
        Head::Literal(l) => head_vars.extend(l.atom.vars()),
        Head::Or(ds) => {
            for d in ds {
                match d {
                    Disjunct::Atom(a) => head_vars.extend(a.vars()),
                    Disjunct::Each { var, list, atom } => {
                        head_vars.extend(list.vars());
                        head_vars.extend(atom.vars().into_iter().filter(|x| x != var));
                    }
                }
            }
        }
    }
    let mut reported = BTreeSet::new();
    for x in head_vars {
        if !bound.contains(&x) && reported.insert(x) {
            issues.push(format!("head variable `{x}` does not occur in the body"));
        }
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse, parse_rule_text, Dialect};
    use crate::predicate::PredicateTable;

    fn s(x: &str) -> Symbol {
        Symbol::new(x)
    }

    fn texts(ls: &[Literal]) -> Vec<String> {
        ls.iter().map(|l| l.to_string()).collect()
    }

    #[test]
    fn individual_assertion_with_declarations() {
        let out = translate_axiom(&SourceAxiom::IndividualAssertion { individual: s("smith"), class: s("sniper") });
        assert_eq!(texts(&out), ["ismemberof(smith, sniper)", "isindividual(smith)", "isclass(sniper)"]);
        assert!(out.iter().all(|l| l.atom.predicate.layer == Layer::Base));
    }

    #[test]
    fn enumeration_becomes_isset() {
        let out = translate_axiom(&SourceAxiom::OneOf {
            class: s("combatIntent"),
            members: vec![s("friendlyIntent"), s("hostileIntent"), s("unknownIntent")],
        });
        assert_eq!(out[0].to_string(), "isset(combatIntent, [friendlyIntent, hostileIntent, unknownIntent])");
        assert_eq!(out.len(), 5);
    }

    #[test]
    fn anonymous_class_restriction() {
        let out = translate_axiom(&SourceAxiom::AnonymousClass { property: s("hasCombatIntent"), value: s("friendlyIntent") });
        assert_eq!(
            out[0].to_string(),
            "hasallvaluesofpropertyfrom(unnamedClass(hasCombatIntent, friendlyIntent), hasCombatIntent, friendlyIntent)"
        );
        assert!(texts(&out).contains(&"isindividual(friendlyIntent)".to_string()));
        assert!(texts(&out).contains(&"isclass(unnamedClass(hasCombatIntent, friendlyIntent))".to_string()));
    }

    #[test]
    fn cardinality_fact() {
        let out = translate_axiom(&SourceAxiom::Cardinality {
            kind: CardinalityKind::Exact,
            class: s("theaterObject"),
            property: s("describedBy"),
            n: 1,
        });
        assert_eq!(out[0].to_string(), "exactcardinality(theaterObject, describedBy, 1)");
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn horn_rule_layers() {
        let p = parse(
            r#"<ruleml:imp><ruleml:_body><swrlx:individualPropertyAtom swrlx:property="isDescribedBy"><ruleml:var>T</ruleml:var><ruleml:var>G</ruleml:var></swrlx:individualPropertyAtom><swrlx:individualPropertyAtom swrlx:property="hasSpeedObservation"><ruleml:var>G</ruleml:var><ruleml:var>S</ruleml:var></swrlx:individualPropertyAtom></ruleml:_body><ruleml:_head><swrlx:individualPropertyAtom swrlx:property="hasSpeed"><ruleml:var>T</ruleml:var><ruleml:var>S</ruleml:var></swrlx:individualPropertyAtom></ruleml:_head></ruleml:imp>"#,
            Dialect::Swrl,
        );
        let rules = translate_rule(&p.rule_items()[0]);
        assert_eq!(
            rules[0].to_string(),
            "haspropertywith(T, hasSpeed, S) :- hasPropertyWith(T, isDescribedBy, G), hasPropertyWith(G, hasSpeedObservation, S)."
        );
    }

    #[test]
    fn conjunctive_head_splits() {
        let i = Term::var("I");
        let rule = SourceRule::Horn {
            head: vec![
                SourceAtom::Class { class: s("individual"), arg: i.clone() },
                SourceAtom::Class { class: s("thing"), arg: i.clone() },
            ],
            body: vec![SourceAtom::Class { class: s("person"), arg: i }],
        };
        assert_eq!(translate_rule(&rule).len(), 2);
    }

    #[test]
    fn self_loop_translates() {
        let x = Term::var("X");
        let a = SourceAtom::Class { class: s("redForceTheaterObject"), arg: x };
        let rules = translate_rule(&SourceRule::Horn { head: vec![a.clone()], body: vec![a] });
        assert_eq!(rules[0].to_string(), "ismemberof(X, redForceTheaterObject) :- isMemberOf(X, redForceTheaterObject).");
    }

    fn rule(text: &str) -> Rule {
        parse_rule_text(text, &mut PredicateTable::new()).unwrap()
    }

    #[test]
    fn guard_before_binding_is_unsafe() {
        let issues = check_safety(&rule("fact(X, Y, N) :- not(Y = c), fact(X, Y, N)."));
        assert_eq!(issues.len(), 1);
        assert!(issues[0].contains("unbound variable `Y` in guard"), "{issues:?}");
        assert!(check_safety(&rule("fact(X, Y, N) :- isLetter(Y), not(Y = c), fact(X, Y, N).")).is_empty());
    }

    #[test]
    fn suggestion_follows_sort() {
        let issues = check_safety(&rule("foo(C) :- not(C = d), isSubClassOf(C, d)."));
        assert!(issues[0].contains("isClass(C)"), "{issues:?}");
    }

    #[test]
    fn head_variable_absent_from_body() {
        let issues = check_safety(&rule("ismemberof(X, Y) :- isClass(Y)."));
        assert_eq!(issues, ["head variable `X` does not occur in the body"]);
    }

    #[test]
    fn negative_literals_bind_and_each_needs_bound_list() {
        assert!(check_safety(&rule("isMemberOf(I, C) :- complementaryClasses(C, D), logicNot(isMemberOf(I, D)).")).is_empty());
        assert!(check_safety(&rule("or(each(A, L, =(I, A))) :- isSet(C, L), isMemberOf(I, C).")).is_empty());
        assert!(!check_safety(&rule("or(each(A, L, =(I, A))) :- isMemberOf(I, C).")).is_empty());
    }
}
