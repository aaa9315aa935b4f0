//! Reference evaluator: every rule against the whole store each iteration,
//! body elements strictly in source order, substitution maps, full scans.

use std::collections::BTreeMap;

use super::{constraint_passes, effective_base, propagate_disjunctions, unify, EngineError, Stats};
use crate::axioms::{error_atom, MSG_EMPTY_DISJUNCTION};
use crate::model::{Atom, BodyElement, Disjunct, Disjunction, Head, Literal, Rule};
use crate::program::Program;
use crate::store::{FactStore, RelKey};
use crate::symbol::Symbol;
use crate::term::Term;

type Subst = BTreeMap<Symbol, Term>;

fn apply(t: &Term, s: &Subst) -> Term {
    t.substitute(&|v| s.get(&v).cloned())
}

fn solve(store: &FactStore, body: &[BodyElement], s: Subst, out: &mut Vec<Subst>) {
    let Some((first, rest)) = body.split_first() else {
        out.push(s);
        return;
    };
    match first {
        BodyElement::Literal(l) => {
            let Some(rel) = store.relation(&RelKey::of(l)) else { return };
            for tuple in rel.iter() {
                let mut s2 = s.clone();
                if l.atom.args.iter().zip(tuple.iter()).all(|(p, t)| unify(p, t, &mut s2)) {
                    solve(store, rest, s2, out);
                }
            }
        }
        BodyElement::NotEqual(a, b) => {
            let (a, b) = (apply(a, &s), apply(b, &s));
            if a.is_ground() && b.is_ground() && a != b {
                solve(store, rest, s, out);
            }
        }
        BodyElement::Equal(a, b) => {
            let (a, b) = (apply(a, &s), apply(b, &s));
            let mut s2 = s.clone();
            let ok = if a.is_ground() {
                unify(&b, &a, &mut s2)
            } else if b.is_ground() {
                unify(&a, &b, &mut s2)
            } else {
                false
            };
            if ok {
                solve(store, rest, s2, out);
            }
        }
        BodyElement::Member(x, list) => {
            if let Term::List(items) = apply(list, &s) {
                for item in items.iter() {
                    let mut s2 = s.clone();
                    if unify(&apply(x, &s), item, &mut s2) {
                        solve(store, rest, s2, out);
                    }
                }
            }
        }
    }
}

enum Out {
    Fact(Literal),
    Or(Vec<Atom>),
}

fn instantiate(rule: &Rule, s: &Subst, cap: usize) -> Option<Out> {
    let within = |a: &Atom| a.skolem_depth() <= cap;
    match &rule.head {
        Head::Literal(l) => {
            let atom = l.atom.substitute(&|v| s.get(&v).cloned());
            within(&atom).then_some(Out::Fact(Literal { polarity: l.polarity, atom }))
        }
        Head::Or(ds) => {
            let mut atoms = Vec::new();
            for d in ds {
                match d {
                    Disjunct::Atom(a) => atoms.push(a.substitute(&|v| s.get(&v).cloned())),
                    Disjunct::Each { var, list, atom } => {
                        if let Term::List(items) = apply(list, s) {
                            for item in items.iter() {
                                let mut s2 = s.clone();
                                s2.insert(*var, item.clone());
                                atoms.push(atom.substitute(&|v| s2.get(&v).cloned()));
                            }
                        }
                    }
                }
            }
            atoms.iter().all(within).then_some(Out::Or(atoms))
        }
    }
}

fn saturate(rules: &[Rule], cap: usize, store: &mut FactStore, stats: &mut Stats) {
    loop {
        stats.rounds += 1;
        let mut outs = Vec::new();
        for rule in rules {
            let mut substs = Vec::new();
            solve(store, &rule.body, Subst::new(), &mut substs);
            stats.rule_instances += substs.len() as u64;
            outs.extend(substs.iter().filter_map(|s| instantiate(rule, s, cap)));
        }
        let mut changed = false;
        for o in outs {
            changed |= match o {
                Out::Fact(l) => store.insert(&l),
                Out::Or(atoms) if atoms.is_empty() => {
                    store.insert(&Literal::positive(error_atom(MSG_EMPTY_DISJUNCTION, Vec::new())))
                }
                Out::Or(atoms) => Disjunction::from_atoms(atoms).is_ok_and(|d| store.insert_disjunction(d)),
            };
        }
        changed |= !propagate_disjunctions(store).is_empty();
        if !changed {
            break;
        }
    }
}

/// Materializes `ruleset` naively; the result must equal the semi-naive one.
pub fn materialize_naive(program: &Program, ruleset: &str) -> Result<(FactStore, Stats), EngineError> {
    let rules = program
        .rules_for(ruleset)
        .ok_or_else(|| EngineError::UnknownRuleset(ruleset.to_owned()))?;
    let cap = program.pragmas.skolem_depth_cap;
    let mut store = FactStore::new();
    for l in effective_base(program, &[]) {
        store.insert(&l);
    }
    for d in &program.disjunctions {
        store.insert_disjunction(d.clone());
    }
    let mut stats = Stats::default();
    saturate(rules, cap, &mut store, &mut stats);
    let mut extra = Stats::default();
    constraint_passes(program, &[], &mut store, &mut extra, &mut BTreeMap::new(), &mut |s| {
        saturate(rules, cap, s, &mut stats);
        Ok(())
    })?;
    stats.constraint_passes = extra.constraint_passes;
    Ok((store, stats))
}
