mod common;

use common::{compile_text, program, random_program, FIXTURES};
use owlhorn::emit::{emit, EmitOptions};
use owlhorn::engine::materialize;
use owlhorn::program::Program;
use proptest::prelude::*;

fn reparsed(p: &Program, all_rules: bool) -> Program {
    let text = emit(p, &EmitOptions { all_rules, ..Default::default() });
    compile_text("emitted", &text, &[])
}

fn same_store(p: &Program, all_rules: bool) -> Result<(), TestCaseError> {
    let q = reparsed(p, all_rules);
    prop_assert_eq!(&q.facts, &p.facts);
    prop_assert_eq!(q.rules.len(), p.rules.len());
    prop_assert_eq!(materialize(&q).unwrap().store, materialize(p).unwrap().store);
    Ok(())
}

#[test]
fn every_fixture_round_trips() {
    for name in FIXTURES {
        let p = program(name);
        for all_rules in [false, true] {
            same_store(&p, all_rules).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn emitted_text_is_a_fixed_point() {
    for name in FIXTURES {
        let p = program(name);
        let options = EmitOptions { all_rules: true, ..Default::default() };
        let once = emit(&p, &options);
        assert_eq!(emit(&reparsed(&p, true), &options), once, "{name}");
    }
}

#[test]
fn pragmas_survive() {
    let p = compile_text("cardinality.pl", &common::fixture("cardinality.pl"), &[("max_cardinality", "error")]);
    same_store(&p, true).unwrap();
    assert_eq!(reparsed(&p, false).pragmas, p.pragmas);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_programs_round_trip(seed in any::<u64>()) {
        let p = compile_text("random", &random_program(seed, 40, 12), &[]);
        same_store(&p, true)?;
    }
}
