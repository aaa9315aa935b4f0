#![allow(dead_code)]

use std::fmt::Write;

use owlhorn::compile::{compile, CompileOptions, Document};
use owlhorn::program::Program;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn compile_text(name: &str, text: &str, pragmas: &[(&str, &str)]) -> Program {
    let options = CompileOptions {
        pragmas: pragmas.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        ..Default::default()
    };
    match compile(&[Document::native(name, text)], &options) {
        Ok(c) => c.program,
        Err(diags) => panic!("{name} does not compile: {diags:?}\n{text}"),
    }
}

pub fn program(name: &str) -> Program {
    compile_text(name, &fixture(name), &[])
}

pub fn program_with(name: &str, pragmas: &[(&str, &str)]) -> Program {
    compile_text(name, &fixture(name), pragmas)
}

/// Every fixture that compiles on its own.
pub const FIXTURES: &[&str] = &[
    "extensional.pl",
    "reevaluation.pl",
    "cycle.pl",
    "truth_true.pl",
    "truth_false.pl",
    "truth_unknown.pl",
    "truth_inconsistent.pl",
    "disjoint.pl",
    "complement.pl",
    "contradiction.pl",
    "disjunction.pl",
    "enumerated.pl",
    "singleton.pl",
    "refuted.pl",
    "existential.pl",
    "existential_loop.pl",
    "cardinality.pl",
    "dead_rules.pl",
    "duplicates.pl",
];

const INDIVIDUALS: &[&str] = &["i0", "i1", "i2", "i3", "i4"];
const CLASSES: &[&str] = &["k0", "k1", "k2"];
const PROPERTIES: &[&str] = &["r0", "r1"];
const VARS: &[&str] = &["X", "Y", "Z"];

/// User predicates and their arities.
pub const USER: &[(&str, usize)] = &[("u0", 1), ("u1", 2), ("u2", 1), ("u3", 2)];

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).unwrap()
}

fn random_fact(rng: &mut ChaCha8Rng) -> String {
    let i = |rng: &mut ChaCha8Rng| pick(rng, INDIVIDUALS);
    let k = |rng: &mut ChaCha8Rng| pick(rng, CLASSES);
    match rng.gen_range(0..100) {
        0..=29 => format!("ismemberof({}, {})", i(rng), k(rng)),
        30..=44 => format!("issubclassof({}, {})", k(rng), k(rng)),
        45..=56 => format!("haspropertywith({}, {}, {})", i(rng), pick(rng, PROPERTIES), i(rng)),
        57..=61 => format!("disjointclasses({}, {})", k(rng), k(rng)),
        62..=63 => format!("complementaryclasses({}, {})", k(rng), k(rng)),
        64..=71 => format!("logicNot(ismemberof({}, {}))", i(rng), k(rng)),
        72..=79 => format!("u0({})", i(rng)),
        80..=87 => format!("u1({}, {})", i(rng), i(rng)),
        88..=93 => format!("or(ismemberof({0}, {1}), ismemberof({0}, {2}))", i(rng), k(rng), k(rng)),
        94..=95 => format!("isset({}, [{}, {}])", k(rng), i(rng), i(rng)),
        96..=97 => format!("hasallvaluesofpropertyfrom({}, {}, {})", k(rng), pick(rng, PROPERTIES), k(rng)),
        _ => format!("maxcardinality({}, {}, 1)", k(rng), pick(rng, PROPERTIES)),
    }
}

/// A body literal over Derived or user predicates, with its variables.
fn random_body_literal(rng: &mut ChaCha8Rng) -> (String, Vec<&'static str>) {
    let term = |rng: &mut ChaCha8Rng, consts: &[&'static str]| -> &'static str {
        if rng.gen_bool(0.75) {
            pick(rng, VARS)
        } else {
            pick(rng, consts)
        }
    };
    let (text, args): (String, Vec<&str>) = match rng.gen_range(0..7) {
        0 | 1 => {
            let (a, b) = (term(rng, INDIVIDUALS), pick(rng, CLASSES));
            (format!("isMemberOf({a}, {b})"), vec![a])
        }
        2 => {
            let (a, b) = (term(rng, INDIVIDUALS), term(rng, INDIVIDUALS));
            let p = pick(rng, PROPERTIES);
            (format!("hasPropertyWith({a}, {p}, {b})"), vec![a, b])
        }
        3 => {
            let (a, k) = (term(rng, INDIVIDUALS), pick(rng, CLASSES));
            (format!("logicNot(isMemberOf({a}, {k}))"), vec![a])
        }
        _ => {
            let (name, arity) = USER.choose(rng).unwrap();
            let args: Vec<&str> = (0..*arity).map(|_| term(rng, INDIVIDUALS)).collect();
            (format!("{name}({})", args.join(", ")), args)
        }
    };
    let vars = args.into_iter().filter(|a| VARS.contains(a)).collect();
    (text, vars)
}

fn random_rule(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(1..=3);
    let mut body = Vec::new();
    let mut bound: Vec<&str> = Vec::new();
    for _ in 0..n {
        let (lit, vars) = random_body_literal(rng);
        body.push(lit);
        for v in vars {
            if !bound.contains(&v) {
                bound.push(v);
            }
        }
    }
    if bound.len() >= 2 && rng.gen_bool(0.3) {
        body.push(format!("not({} = {})", bound[0], bound[1]));
    } else if !bound.is_empty() && rng.gen_bool(0.2) {
        body.push(format!("not({} = {})", bound[0], pick(rng, INDIVIDUALS)));
    }
    let arg = |rng: &mut ChaCha8Rng| -> &str {
        if bound.is_empty() || rng.gen_bool(0.1) {
            pick(rng, INDIVIDUALS)
        } else {
            bound.choose(rng).unwrap()
        }
    };
    let head = match rng.gen_range(0..10) {
        0 => format!("isMemberOf({}, {})", arg(rng), pick(rng, CLASSES)),
        1 => format!("logicNot(isMemberOf({}, {}))", arg(rng), pick(rng, CLASSES)),
        2 => format!("or(u0({}), u2({}))", arg(rng), arg(rng)),
        _ => {
            let (name, arity) = USER.choose(rng).unwrap();
            let args: Vec<&str> = (0..*arity).map(|_| arg(rng)).collect();
            format!("{name}({})", args.join(", "))
        }
    };
    format!("{head} :- {}.", body.join(", "))
}

/// A random native program: up to `max_facts` facts and `max_rules` rules
/// over a ten-constant vocabulary.
pub fn random_program(seed: u64, max_facts: usize, max_rules: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();
    for _ in 0..rng.gen_range(0..=max_facts) {
        writeln!(text, "{}.", random_fact(&mut rng)).unwrap();
    }
    for _ in 0..rng.gen_range(0..=max_rules) {
        writeln!(text, "{}", random_rule(&mut rng)).unwrap();
    }
    text
}

/// A random ground Base fact over the same vocabulary.
pub fn random_base_fact(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let f = random_fact(&mut rng);
        if !["or(", "isset", "maxcard", "u0", "u1"].iter().any(|p| f.starts_with(p)) {
            return f;
        }
    }
}

/// Predicates a random manifest may query.
pub const QUERYABLE: &[(&str, usize)] =
    &[("u0", 1), ("u1", 2), ("u2", 1), ("u3", 2), ("isMemberOf", 2), ("hasPropertyWith", 3)];

/// A random manifest: a subset of the [`QUERYABLE`] predicates `program`
/// mentions as queries, and the predicate of `dynamic` (a fact text) as the
/// only dynamic entry. Derived built-ins are always known.
pub fn random_manifest(seed: u64, program: &str, dynamic: Option<&str>) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();
    let known: Vec<_> = QUERYABLE
        .iter()
        .filter(|(name, _)| !name.starts_with('u') || program.contains(&format!("{name}(")))
        .collect();
    let first = rng.gen_range(0..known.len());
    for (i, (name, arity)) in known.into_iter().enumerate() {
        if i == first || rng.gen_bool(0.3) {
            writeln!(text, "query {name}/{arity}").unwrap();
        }
    }
    if let Some(fact) = dynamic {
        let inner = fact.strip_prefix("logicNot(").unwrap_or(fact);
        let (name, rest) = inner.split_once('(').unwrap();
        let arity = rest.matches(',').count() + 1;
        writeln!(text, "dynamic {name}/{arity}").unwrap();
    }
    text
}
