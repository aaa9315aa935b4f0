//! The general rules every program carries, and the rules generated from
//! cardinality and existential restrictions.

use std::collections::BTreeSet;

use crate::ingest::{parse_rule_text, Diagnostic, DiagnosticKind};
use crate::model::{equality_atom, Atom, BodyElement, Disjunct, Head, Literal, Rule, RuleOrigin};
use crate::predicate::{sorts_of, v, Layer, Predicate, PredicateTable, Sort, VOCABULARY};
use crate::program::{Constraint, ConstraintAction, ExistentialStrategy, MaxCardStrategy, Pragmas};
use crate::symbol::Symbol;
use crate::term::Term;

pub const MSG_CONTRADICTION: &str = "A term cannot be both true and false.";
pub const MSG_EMPTY_CLASS: &str = "The empty class cannot contain anything.";
pub const MSG_EMPTY_DISJUNCTION: &str = "A disjunction has no satisfiable disjunct.";
pub const MSG_MAX_CARDINALITY: &str = "A maximum cardinality is exceeded.";
pub const MSG_MIN_CARDINALITY: &str = "A required property value is missing.";

/// The class no individual may belong to.
pub const NOTHING: &str = "nothing";
/// The class every individual belongs to; filler of unqualified restrictions.
pub const THING: &str = "thing";

const GENERAL: &[(&str, &str)] = &[
    ("GR2", "isSubClassOf(C, C) :- isClass(C)."),
    ("GR3", "isSubClassOf(C, D) :- is_sub_class_of_but_not_equal_to(C, D)."),
    ("GR3", "is_sub_class_of_but_not_equal_to(C, D) :- issubclassof(C, D)."),
    (
        "GR3",
        "is_sub_class_of_but_not_equal_to(C, E) :- isClass(C), isClass(E), not(C = E), issubclassof(C, D), is_sub_class_of_but_not_equal_to(D, E).",
    ),
    ("GR4", "isMemberOf(I, D) :- isSubClassOf(C, D), isMemberOf(I, C)."),
    ("GR5", "isIndividual(I) :- isMemberOf(I, C)."),
    ("GR5", "isClass(C) :- isMemberOf(I, C)."),
    ("GR6", "disjointClasses(C, D) :- complementaryClasses(C, D)."),
    ("GR6", "complementaryClasses(D, C) :- complementaryClasses(C, D)."),
    ("GR6", "disjointClasses(D, C) :- disjointClasses(C, D)."),
    ("GR6", "logicNot(isMemberOf(I, C)) :- disjointClasses(C, D), isMemberOf(I, D)."),
    ("GR6", "isMemberOf(I, C) :- complementaryClasses(C, D), logicNot(isMemberOf(I, D))."),
    ("GR7", "or(isMemberOf(I, C), isMemberOf(I, D)) :- complementaryClasses(C, D), isIndividual(I)."),
    ("GR8", "isMemberOf(A, C) :- isSet(C, L), member(A, L)."),
    ("GR8", "or(each(A, L, =(I, A))) :- isSet(C, L), isMemberOf(I, C)."),
    ("GR9", "equivalentIndividuals(J, I) :- equivalentIndividuals(I, J)."),
    ("GR9", "equivalentIndividuals(I, K) :- equivalentIndividuals(I, J), equivalentIndividuals(J, K)."),
    ("GR9", "isMemberOf(J, C) :- equivalentIndividuals(I, J), isMemberOf(I, C)."),
    ("GR9", "logicNot(isMemberOf(J, C)) :- equivalentIndividuals(I, J), logicNot(isMemberOf(I, C))."),
    ("GR9", "hasPropertyWith(J, P, V) :- equivalentIndividuals(I, J), hasPropertyWith(I, P, V)."),
    ("GR9", "hasPropertyWith(I, P, W) :- equivalentIndividuals(V, W), hasPropertyWith(I, P, V)."),
    ("GR10", "equivalentClasses(C, C) :- isClass(C)."),
    ("GR10", "equivalentClasses(D, C) :- equivalentClasses(C, D)."),
    ("GR10", "issubclassof(C, D) :- equivalentClasses(C, D), not(C = D)."),
];

const SKOLEM: &[&str] = &[
    "haspropertywith(I, P, unnamedIndividual(I, P, C2)) :- hassomevaluesofpropertyfrom(C1, P, C2), isMemberOf(I, C1).",
    "ismemberof(unnamedIndividual(I, P, C2), C2) :- hassomevaluesofpropertyfrom(C1, P, C2), isMemberOf(I, C1).",
];

const TAIL: &[(&str, &str)] = &[
    (
        "GR12",
        "isMemberOf(V, D) :- hasAllValuesOfPropertyFrom(C, P, D), isClass(D), isMemberOf(I, C), hasPropertyWith(I, P, V).",
    ),
    ("GR14", "equivalentIndividuals(I, I) :- isIndividual(I)."),
];

fn rule(text: &str, origin: RuleOrigin, label: &str) -> Rule {
    let mut r = parse_rule_text(text, &mut PredicateTable::new())
        .unwrap_or_else(|e| panic!("built-in rule `{text}`: {e}"));
    r.origin = origin;
    r.labeled(label)
}

fn vars(prefix: &str, n: usize) -> Vec<Term> {
    (1..=n).map(|i| Term::var(&format!("{prefix}{i}"))).collect()
}

fn text(s: &str) -> Term {
    Term::constant(s)
}

/// `error([msg, extra...])`.
pub fn error_atom(message: &str, extra: Vec<Term>) -> Atom {
    let mut payload = vec![text(message)];
    payload.extend(extra);
    Atom::new(v::error(), vec![Term::list(payload)])
}

fn lit(a: Atom) -> BodyElement {
    BodyElement::Literal(Literal::positive(a))
}

/// Variables named after argument sorts, as in `isMemberOf(I, C)`;
/// user predicates get `X1..Xn`.
fn sorted_vars(pred: Predicate) -> Vec<Term> {
    let Some(sorts) = sorts_of(&pred) else { return vars("X", pred.arity) };
    let mut used: Vec<String> = Vec::new();
    sorts
        .iter()
        .map(|sort| {
            let pool: &[&str] = match sort {
                Sort::Class => &["C", "D", "E"],
                Sort::Individual => &["I", "J", "K"],
                Sort::Property => &["P", "Q"],
                Sort::Datatype => &["T"],
                Sort::List => &["L"],
                Sort::Number => &["N"],
                Sort::Any => &["X"],
            };
            let name = pool
                .iter()
                .map(|s| s.to_string())
                .chain((1..).map(|i| format!("{}{i}", pool[0])))
                .find(|n| !used.contains(n))
                .unwrap();
            used.push(name.clone());
            Term::var(&name)
        })
        .collect()
}

/// Base-to-Derived conversion rules, one per polarity.
fn conversion(pred: Predicate) -> [Rule; 2] {
    let args = sorted_vars(pred);
    let b = Atom::new(pred.base(), args.clone());
    let d = Atom::new(pred.derived(), args);
    let pos = Rule::new(Head::Literal(Literal::positive(d.clone())), vec![lit(b.clone())], RuleOrigin::General);
    let neg = Rule::new(
        Head::Literal(Literal::negative(d)),
        vec![BodyElement::Literal(Literal::negative(b))],
        RuleOrigin::General,
    );
    [pos.labeled("GR1"), neg.labeled("GR1")]
}

fn contradiction(pred: Predicate) -> Rule {
    let args = sorted_vars(pred);
    let d = Atom::new(pred.derived(), args.clone());
    let mut payload = vec![Term::Const(pred.derived().spelling())];
    payload.extend(args);
    Rule::new(
        Head::Literal(Literal::positive(error_atom(MSG_CONTRADICTION, payload))),
        vec![lit(d.clone()), BodyElement::Literal(Literal::negative(d))],
        RuleOrigin::General,
    )
    .labeled("GR13")
}

/// GR1–GR14 for the vocabulary plus every user predicate in `table`.
pub fn general_rules(table: &PredicateTable, pragmas: &Pragmas) -> Vec<Rule> {
    let vocabulary: Vec<Predicate> = VOCABULARY
        .iter()
        .map(|e| crate::predicate::vocab(e.base, Layer::Derived))
        .collect();
    let users = table.user_predicates();
    let all: Vec<Predicate> = vocabulary.iter().chain(&users).copied().collect();

    let mut out = Vec::new();
    for p in all.iter().filter(|p| p.is_layered()) {
        out.extend(conversion(*p));
    }
    for (label, t) in GENERAL {
        out.push(rule(t, RuleOrigin::General, label));
    }
    if pragmas.existential == ExistentialStrategy::Skolemize {
        for t in SKOLEM {
            out.push(rule(t, RuleOrigin::General, "GR11"));
        }
    }
    for (label, t) in TAIL {
        out.push(rule(t, RuleOrigin::General, label));
    }
    if pragmas.consistency_check {
        for p in all.iter().filter(|p| p.name.as_str() != "error") {
            out.push(contradiction(*p));
        }
        let i = Term::var("I");
        out.push(
            Rule::new(
                Head::Literal(Literal::positive(error_atom(MSG_EMPTY_CLASS, vec![i.clone()]))),
                vec![lit(Atom::new(v::member(Layer::Derived), vec![i, text(NOTHING)]))],
                RuleOrigin::General,
            )
            .labeled("GR13"),
        );
    }
    out
}

/// A cardinality or existential restriction read from a fact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub class: Term,
    pub property: Term,
    /// Qualifying class of the values; `None` for plain cardinalities.
    pub filler: Option<Term>,
    pub min: Option<usize>,
    pub max: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct CardinalityOutput {
    pub rules: Vec<Rule>,
    pub constraints: Vec<Constraint>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Restrictions stated by positive cardinality and someValuesFrom facts,
/// in either layer. Non-numeric bounds are reported.
pub fn restrictions(facts: &[Literal], diagnostics: &mut Vec<Diagnostic>) -> Vec<Restriction> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for l in facts.iter().filter(|l| l.is_positive()) {
        let a = &l.atom;
        let name = a.predicate.name;
        if !seen.insert(Literal::positive(Atom::new(a.predicate.base(), a.args.clone()))) {
            continue;
        }
        let (min, max) = if name == v::min_card(Layer::Base).name {
            (true, false)
        } else if name == v::max_card(Layer::Base).name {
            (false, true)
        } else if name == v::exact_card(Layer::Base).name {
            (true, true)
        } else if name == v::some_values(Layer::Base).name {
            out.push(Restriction {
                class: a.args[0].clone(),
                property: a.args[1].clone(),
                filler: Some(a.args[2].clone()),
                min: Some(1),
                max: None,
            });
            continue;
        } else {
            continue;
        };
        let n = match a.args[2].as_const().and_then(|s| s.as_str().parse::<usize>().ok()) {
            Some(n) => n,
            None => {
                diagnostics.push(Diagnostic::error(
                    DiagnosticKind::Semantic,
                    0,
                    format!("cardinality bound in `{a}` is not a number"),
                ));
                continue;
            }
        };
        out.push(Restriction {
            class: a.args[0].clone(),
            property: a.args[1].clone(),
            filler: None,
            min: min.then_some(n),
            max: max.then_some(n),
        });
    }
    out
}

/// Rules and constraint-pass entries for every restriction, per pragma.
///
/// Existential (someValuesFrom) restrictions under the skolemize strategy
/// are covered by the general GR11 pair and produce nothing here.
pub fn generate_cardinality_rules(facts: &[Literal], pragmas: &Pragmas) -> CardinalityOutput {
    let mut out = CardinalityOutput::default();
    for r in restrictions(facts, &mut out.diagnostics) {
        let bound = r.min.into_iter().chain(r.max).max().unwrap_or(0);
        if bound > pragmas.cardinality_cap {
            out.diagnostics.push(Diagnostic::error(
                DiagnosticKind::Unsupported,
                0,
                format!(
                    "unsupported cardinality {bound} on `{}` for `{}`: the cap is {}",
                    r.class, r.property, pragmas.cardinality_cap
                ),
            ));
            continue;
        }
        if let Some(n) = r.max {
            out.rules.extend(max_rules(&r, n, pragmas.max_cardinality));
        }
        if let Some(n) = r.min.filter(|n| *n > 0) {
            min_part(&r, n, pragmas, &mut out);
        }
    }
    out
}

fn label(r: &Restriction, kind: &str) -> String {
    format!("card:{kind}:{}:{}", r.class, r.property)
}

fn member_of(i: &Term, class: &Term) -> BodyElement {
    lit(Atom::new(v::member(Layer::Derived), vec![i.clone(), class.clone()]))
}

fn property_value(i: &Term, p: &Term, val: &Term) -> BodyElement {
    lit(Atom::new(v::property(Layer::Derived), vec![i.clone(), p.clone(), val.clone()]))
}

fn max_rules(r: &Restriction, n: usize, strategy: MaxCardStrategy) -> Vec<Rule> {
    let i = Term::var("I");
    let values = vars("V", n + 1);
    let mut body = vec![member_of(&i, &r.class)];
    body.extend(values.iter().map(|val| property_value(&i, &r.property, val)));
    for a in 0..values.len() {
        for b in a + 1..values.len() {
            body.push(BodyElement::NotEqual(values[a].clone(), values[b].clone()));
        }
    }
    let error = || {
        let mut payload = vec![i.clone(), r.property.clone()];
        payload.extend(values.iter().cloned());
        Head::Literal(Literal::positive(error_atom(MSG_MAX_CARDINALITY, payload)))
    };
    let head = match (n, strategy) {
        (0, _) | (_, MaxCardStrategy::Error) => error(),
        (1, MaxCardStrategy::Merge) => Head::Literal(Literal::positive(Atom::new(
            v::equivalent(Layer::Base),
            values.clone(),
        ))),
        (_, MaxCardStrategy::Merge) => {
            let mut ds = Vec::new();
            for a in 0..values.len() {
                for b in a + 1..values.len() {
                    ds.push(Disjunct::Atom(equality_atom(values[a].clone(), values[b].clone())));
                }
            }
            Head::Or(ds)
        }
    };
    vec![Rule::new(head, body, RuleOrigin::CardinalityGenerated).labeled(&label(r, "max"))]
}

fn min_part(r: &Restriction, n: usize, pragmas: &Pragmas, out: &mut CardinalityOutput) {
    let constraint = |action| Constraint {
        class: r.class.clone(),
        property: r.property.clone(),
        filler: r.filler.clone(),
        min: n,
        action,
    };
    match pragmas.existential {
        ExistentialStrategy::Skolemize if r.filler.is_some() => {}
        ExistentialStrategy::Skolemize if n == 1 => {
            let i = Term::var("I");
            let thing = text(THING);
            let sk = Term::unnamed_individual(i.clone(), r.property.clone(), thing.clone());
            let body = vec![member_of(&i, &r.class)];
            let has = Atom::new(v::property(Layer::Base), vec![i.clone(), r.property.clone(), sk.clone()]);
            let member = Atom::new(v::member(Layer::Base), vec![sk, thing]);
            for head in [has, member] {
                out.rules.push(
                    Rule::new(Head::Literal(Literal::positive(head)), body.clone(), RuleOrigin::CardinalityGenerated)
                        .labeled(&label(r, "min")),
                );
            }
        }
        ExistentialStrategy::Skolemize => {
            out.diagnostics.push(Diagnostic::warning(
                0,
                format!(
                    "minimum cardinality {n} on `{}` for `{}` cannot be skolemized; checked as an error instead",
                    r.class, r.property
                ),
            ));
            out.constraints.push(constraint(ConstraintAction::Error));
        }
        ExistentialStrategy::Error => out.constraints.push(constraint(ConstraintAction::Error)),
        ExistentialStrategy::AssertFresh => out.constraints.push(constraint(ConstraintAction::AssertFresh)),
    }
}

/// Deterministic fresh constants `prefix1`, `prefix2`, ... skipping taken names.
#[derive(Clone, Debug)]
pub struct FreshConstants {
    prefix: String,
    next: usize,
    taken: BTreeSet<Symbol>,
}

impl FreshConstants {
    pub fn new(prefix: &str, taken: BTreeSet<Symbol>) -> FreshConstants {
        FreshConstants { prefix: prefix.to_owned(), next: 1, taken }
    }

    pub fn fresh(&mut self) -> Symbol {
        loop {
            let s = Symbol::new(&format!("{}{}", self.prefix, self.next));
            self.next += 1;
            if self.taken.insert(s) {
                return s;
            }
        }
    }
}
