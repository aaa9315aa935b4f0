mod common;

use std::collections::BTreeSet;

use common::{compile_text, program, random_base_fact, random_manifest, random_program};
use owlhorn::engine::KnowledgeBase;
use owlhorn::ingest::parse_fact;
use owlhorn::minimizer::{minimize, parse_manifest, Manifest};
use owlhorn::model::RuleOrigin;
use owlhorn::predicate::{v, Predicate};
use owlhorn::program::Program;
use proptest::prelude::*;

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

fn user_heads(p: &Program) -> Vec<String> {
    p.rules
        .iter()
        .filter(|r| r.origin == RuleOrigin::User)
        .map(|r| r.head_atoms()[0].predicate.spelling().to_string())
        .collect()
}

#[test]
fn dead_rules_are_dropped() {
    let p = program("dead_rules.pl");
    let m = parse_manifest("query recommendation/1\n", &p.predicates).unwrap();
    let min = minimize(&p, &m).program;
    assert_eq!(user_heads(&min), ["alert", "recommendation"]);
    assert!(min.rules.len() < p.rules.len());
}

#[test]
fn dynamic_vocabulary_revives_a_rule() {
    let p = program("dead_rules.pl");
    let m = parse_manifest("query stale/1\ndynamic neverstated/1\n", &p.predicates).unwrap();
    assert_eq!(user_heads(&minimize(&p, &m).program), ["orphan", "stale"]);
}

#[test]
fn minimized_answers_match_on_dead_rules() {
    let p = program("dead_rules.pl");
    let m = parse_manifest("query recommendation/1\nquery alert/1\n", &p.predicates).unwrap();
    let full = KnowledgeBase::build(p.clone()).unwrap();
    let small = KnowledgeBase::build(minimize(&p, &m).program).unwrap();
    assert_eq!(observed(&full, &m), observed(&small, &m));
}

fn check_sound(seed: u64, fact_seed: u64) -> Result<(), TestCaseError> {
    let text = random_program(seed, 30, 10);
    let extra = random_base_fact(fact_seed);
    let p = compile_text("random", &text, &[]);
    let m = parse_manifest(&random_manifest(seed, &text, Some(&extra)), &p.predicates).unwrap();
    let min = minimize(&p, &m).program;
    let mut full = KnowledgeBase::build(p).unwrap();
    let mut small = KnowledgeBase::build(min).unwrap();
    prop_assert_eq!(observed(&full, &m), observed(&small, &m));
    let f = parse_fact(&extra, &full.program().predicates).unwrap();
    full.assert(f.clone()).unwrap();
    small.assert(f).unwrap();
    prop_assert_eq!(observed(&full, &m), observed(&small, &m));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minimization_preserves_observed_facts(seed in any::<u64>(), fact_seed in any::<u64>()) {
        check_sound(seed, fact_seed)?;
    }
}
