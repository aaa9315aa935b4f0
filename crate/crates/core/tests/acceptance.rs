//! Acceptance criteria, one PASS/FAIL line each. Every tolerance is a
//! constant below; the process fails if any criterion does.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{
    compile_text, fixture, program, program_with, random_base_fact, random_manifest, random_program, FIXTURES,
};
use owlhorn::compile::{compile, CompileOptions, Document};
use owlhorn::engine::{materialize, materialize_naive, InconsistencyKind, KnowledgeBase};
use owlhorn::ingest::{parse_fact, parse_query};
use owlhorn::minimizer::{minimize, parse_manifest, Manifest};
use owlhorn::predicate::{v, Layer, Predicate};
use owlhorn::program::Program;
use owlhorn::store::TruthValue;

const GOLDEN_BUDGET: Duration = Duration::from_secs(1);
const CYCLE_BUDGET: Duration = Duration::from_secs(1);
const CHAIN_BUDGET: Duration = Duration::from_secs(60);
const ASSERT_BUDGET: Duration = Duration::from_secs(1);
const RANDOM_PROGRAMS: u64 = 200;
const CHAIN_CLASSES: usize = 1_000;
const CHAIN_PAIRS: usize = CHAIN_CLASSES * (CHAIN_CLASSES + 1) / 2;
const LARGE_KB_FACTS: usize = 10_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    if ok {
        Ok(detail.into())
    } else {
        Err(detail.into())
    }
}

fn kb(name: &str) -> KnowledgeBase {
    KnowledgeBase::build(program(name)).unwrap()
}

fn truth(kb: &KnowledgeBase, text: &str) -> TruthValue {
    kb.truth_value(&parse_fact(text, &kb.program().predicates).unwrap().atom)
}

fn answers(kb: &KnowledgeBase, text: &str) -> Vec<String> {
    let q = parse_query(text, &kb.program().predicates).unwrap();
    kb.query(&q)
        .into_iter()
        .map(|a| a.iter().map(|(v, t)| format!("{v}={t}")).collect::<Vec<_>>().join(","))
        .collect()
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1000.0)
}

fn golden() -> Outcome {
    let start = Instant::now();
    let kb = kb("extensional.pl");
    let elapsed = start.elapsed();
    let mut got: Vec<String> = kb
        .store()
        .literals()
        .iter()
        .map(|l| l.to_string())
        .filter(|s| s.starts_with("isClass(") || s.starts_with("equivalentClasses("))
        .collect();
    got.sort();
    let mut want = vec![
        "equivalentClasses(regionOfInterest, regionOfInterest)",
        "equivalentClasses(regionOfInterest, roi)",
        "equivalentClasses(roi, regionOfInterest)",
        "equivalentClasses(roi, roi)",
        "isClass(regionOfInterest)",
        "isClass(roi)",
    ];
    want.sort();
    check(
        got == want && elapsed < GOLDEN_BUDGET,
        format!("{} derived facts, exact match {}, {} (budget {})", got.len(), got == want, ms(elapsed), ms(GOLDEN_BUDGET)),
    )
}

fn truth_table() -> Outcome {
    let cases = [
        ("truth_true.pl", TruthValue::True),
        ("truth_false.pl", TruthValue::False),
        ("truth_unknown.pl", TruthValue::Unknown),
        ("truth_inconsistent.pl", TruthValue::Inconsistent),
    ];
    let got: Vec<TruthValue> = cases.iter().map(|(n, _)| truth(&kb(n), "isMemberOf(convoy1, convoy)")).collect();
    let want: Vec<TruthValue> = cases.iter().map(|(_, t)| *t).collect();
    check(got == want, format!("got {got:?}"))
}

fn cycle() -> Outcome {
    let start = Instant::now();
    let kb = kb("cycle.pl");
    let pairs = answers(&kb, "isSubClassOf(X, Y)");
    let elapsed = start.elapsed();
    check(
        pairs.len() == 9 && elapsed < CYCLE_BUDGET,
        format!("{} subclass pairs, {} (budget {})", pairs.len(), ms(elapsed), ms(CYCLE_BUDGET)),
    )
}

fn inheritance() -> Outcome {
    let t = truth(&kb("reevaluation.pl"), "isMemberOf(convoy1, theaterobject)");
    check(t == TruthValue::True, format!("isMemberOf(convoy1, theaterobject) is {t}"))
}

fn negation() -> Outcome {
    let disjoint = truth(&kb("disjoint.pl"), "isMemberOf(unit7, friendly)");
    let complement = truth(&kb("complement.pl"), "isMemberOf(truck3, armed)");
    let c = kb("contradiction.pl");
    let errors = answers(&c, "error(X)").len();
    let contradiction = truth(&c, "isMemberOf(smith, civilian)");
    check(
        disjoint == TruthValue::False && complement == TruthValue::True && errors >= 1 && contradiction == TruthValue::Inconsistent,
        format!("disjoint {disjoint}, complement {complement}, {errors} error bindings, contradiction {contradiction}"),
    )
}

fn disjunction() -> Outcome {
    let unit = truth(&kb("disjunction.pl"), "isMemberOf(x, armored)");
    let e = kb("enumerated.pl");
    let members = ["friendlyIntent", "hostileIntent", "unknownIntent"]
        .iter()
        .filter(|m| truth(&e, &format!("isMemberOf({m}, combatIntent)")) == TruthValue::True)
        .count();
    let three_way = e.store().open_disjunctions().iter().any(|d| {
        d.len() == 3 && d.atoms().iter().all(|a| a.predicate == v::equivalent(Layer::Derived))
    });
    let singleton = truth(&kb("singleton.pl"), "equivalentIndividuals(base4, hq1)");
    let refuted = kb("refuted.pl").check_consistency();
    let refuted_ok = refuted.iter().any(|i| i.kind == InconsistencyKind::EmptyDisjunction);
    check(
        unit == TruthValue::True && members == 3 && three_way && singleton == TruthValue::True && refuted_ok,
        format!(
            "unit propagation {unit}, {members}/3 memberships, three-way equality disjunction {three_way}, \
             singleton {singleton}, refuted disjunction inconsistent {refuted_ok}"
        ),
    )
}

fn skolemization() -> Outcome {
    let kb = kb("existential.pl");
    let skolem: Vec<String> = kb
        .store()
        .literals()
        .iter()
        .filter(|l| l.atom.predicate.layer == Layer::Base && l.atom.skolem_depth() > 0)
        .map(|l| l.to_string())
        .collect();
    let want = [
        "haspropertywith(truck1, describedBy, unnamedIndividual(truck1, describedBy, observationArtifact))",
        "ismemberof(unnamedIndividual(truck1, describedBy, observationArtifact), observationArtifact)",
    ];
    let looped = KnowledgeBase::build(program("existential_loop.pl")).unwrap();
    let depth = looped.store().literals().iter().map(|l| l.atom.skolem_depth()).max().unwrap_or(0);
    check(
        skolem == want && depth <= 1,
        format!("{} skolem facts (want 2), self-referential fixture terminates at depth {depth}", skolem.len()),
    )
}

fn cardinality() -> Outcome {
    let merge = KnowledgeBase::build(program("cardinality.pl")).unwrap();
    let merged = truth(&merge, "equivalentIndividuals(report1, report2)");
    let error = KnowledgeBase::build(program_with("cardinality.pl", &[("max_cardinality", "error")])).unwrap();
    let errored = error.check_consistency().iter().any(|i| i.kind == InconsistencyKind::MaxCardinality);
    let fresh = KnowledgeBase::build(program_with("cardinality.pl", &[("existential", "assert-fresh")])).unwrap();
    let added = answers(&fresh, "hasPropertyWith(tank2, describedby, X)");
    check(
        merged == TruthValue::True && errored && added == ["X=newIndividual1"],
        format!("merge {merged}, error fact {errored}, fresh describers {added:?}"),
    )
}

fn observed(kb: &KnowledgeBase, manifest: &Manifest) -> BTreeSet<String> {
    let mut visible: BTreeSet<Predicate> = manifest.queries.clone();
    visible.insert(v::error());
    kb.store()
        .literals()
        .iter()
        .filter(|l| visible.contains(&l.atom.predicate))
        .map(|l| l.to_string())
        .collect()
}

fn minimizer_soundness() -> Outcome {
    let mut mismatched = Vec::new();
    let mut grew = 0;
    let mut smaller = 0;
    for seed in 0..RANDOM_PROGRAMS {
        let text = random_program(seed, 50, 30);
        let extra = random_base_fact(seed ^ 0x5eed);
        let p = compile_text("random", &text, &[]);
        let m = parse_manifest(&random_manifest(seed, &text, Some(&extra)), &p.predicates).unwrap();
        let min = minimize(&p, &m).program;
        grew += usize::from(min.rules.len() > p.rules.len());
        smaller += usize::from(min.rules.len() < p.rules.len());
        let mut full = KnowledgeBase::build(p).unwrap();
        let mut small = KnowledgeBase::build(min).unwrap();
        let mut same = observed(&full, &m) == observed(&small, &m);
        let f = parse_fact(&extra, &full.program().predicates).unwrap();
        full.assert(f.clone()).unwrap();
        small.assert(f).unwrap();
        same &= observed(&full, &m) == observed(&small, &m);
        if !same {
            mismatched.push(seed);
        }
    }
    let dead = program("dead_rules.pl");
    let m = parse_manifest("query recommendation/1\n", &dead.predicates).unwrap();
    let dead_min = minimize(&dead, &m).program;
    let strictly = dead_min.rules.len() < dead.rules.len();
    check(
        mismatched.is_empty() && grew == 0 && strictly,
        format!(
            "{} of {RANDOM_PROGRAMS} programs answer identically, {grew} grew, {smaller} shrank; \
             dead-rule fixture {} -> {} rules",
            RANDOM_PROGRAMS as usize - mismatched.len(),
            dead.rules.len(),
            dead_min.rules.len()
        ),
    )
}

fn oracle() -> Outcome {
    let mut differing = Vec::new();
    for seed in 0..RANDOM_PROGRAMS {
        let p = compile_text("random", &random_program(seed, 50, 15), &[]);
        let semi = materialize(&p).unwrap();
        let (naive, _) = materialize_naive(&p, "default").unwrap();
        if semi.store != naive {
            differing.push(seed);
        }
    }
    let p = program("reevaluation.pl");
    let semi = materialize(&p).unwrap().stats.rule_instances;
    let (_, naive) = materialize_naive(&p, "default").unwrap();
    check(
        differing.is_empty() && semi < naive.rule_instances,
        format!(
            "{} of {RANDOM_PROGRAMS} stores identical; reevaluation fixture {semi} vs {} rule instances",
            RANDOM_PROGRAMS as usize - differing.len(),
            naive.rule_instances
        ),
    )
}

fn with_variant(name: &str, text: &str, extra: &str) -> Program {
    let opts = CompileOptions {
        variants: vec![("low".into(), vec![Document::native("visibility_low.pl", &fixture("visibility_low.pl"))])],
        ..Default::default()
    };
    compile(&[Document::native(name, &format!("{text}{extra}"))], &opts).unwrap().program
}

fn confluence() -> Outcome {
    let new_fact = "ismemberof(newcomer, convoy)";
    let mut failures = Vec::new();
    for name in FIXTURES {
        let text = fixture(name);
        let mut kb = KnowledgeBase::build(with_variant(name, &text, "")).unwrap();
        let original = kb.store().clone();
        let f = parse_fact(new_fact, &kb.program().predicates).unwrap();
        kb.assert(f.clone()).unwrap();
        let recompiled = KnowledgeBase::build(with_variant(name, &text, &format!("{new_fact}.\n"))).unwrap();
        let assert_ok = kb.store() == recompiled.store()
            && kb.state("low").map(|s| &s.store) == recompiled.state("low").map(|s| &s.store);
        kb.retract(f).unwrap();
        let retract_ok = kb.store() == &original;
        kb.swap("low").unwrap();
        kb.swap("default").unwrap();
        let swap_ok = kb.store() == &original;
        if !(assert_ok && retract_ok && swap_ok) {
            failures.push(format!("{name} (assert {assert_ok}, retract {retract_ok}, swap {swap_ok})"));
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} fixtures confluent", FIXTURES.len())
        } else {
            failures.join("; ")
        },
    )
}

fn budgets() -> Outcome {
    let mut chain = String::new();
    for i in 0..CHAIN_CLASSES - 1 {
        chain.push_str(&format!("issubclassof(k{i}, k{}).\n", i + 1));
    }
    let start = Instant::now();
    let kb = KnowledgeBase::build(compile_text("chain", &chain, &[])).unwrap();
    let chain_time = start.elapsed();
    let sub = v::subclass(Layer::Derived);
    let pairs = kb.store().literals().iter().filter(|l| l.atom.predicate == sub && l.is_positive()).count();

    let mut large = String::new();
    for c in 0..10 {
        large.push_str(&format!("issubclassof(c{c}, top).\n"));
    }
    let mut i = 0;
    let mut kb_large = KnowledgeBase::build(compile_text("large", &large, &[])).unwrap();
    while kb_large.store().len() < LARGE_KB_FACTS {
        let batch = (LARGE_KB_FACTS - kb_large.store().len()) / 6 + 1;
        for _ in 0..batch {
            large.push_str(&format!("ismemberof(i{i}, c{}).\n", i % 10));
            i += 1;
        }
        kb_large = KnowledgeBase::build(compile_text("large", &large, &[])).unwrap();
    }
    let size = kb_large.store().len();
    let f = parse_fact("ismemberof(newcomer, c3)", &kb_large.program().predicates).unwrap();
    let start = Instant::now();
    kb_large.assert(f).unwrap();
    let assert_time = start.elapsed();
    check(
        pairs == CHAIN_PAIRS && chain_time < CHAIN_BUDGET && size >= LARGE_KB_FACTS && assert_time < ASSERT_BUDGET,
        format!(
            "chain: {pairs} of {CHAIN_PAIRS} pairs in {} (budget {}); assert into {size}-fact KB in {} (budget {})",
            ms(chain_time),
            ms(CHAIN_BUDGET),
            ms(assert_time),
            ms(ASSERT_BUDGET)
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("golden extensionalization", golden),
        ("four-valued truth table", truth_table),
        ("cycle safety", cycle),
        ("inheritance", inheritance),
        ("negation suite", negation),
        ("disjunction suite", disjunction),
        ("skolemization", skolemization),
        ("cardinality strategies", cardinality),
        ("minimizer soundness", minimizer_soundness),
        ("naive/semi-naive oracle", oracle),
        ("dynamic confluence", confluence),
        ("engineering budgets", budgets),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
