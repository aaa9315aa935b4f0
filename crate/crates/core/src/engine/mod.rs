//! Bottom-up materialization: semi-naive saturation interleaved with
//! disjunction propagation, then constraint passes.

mod kb;
pub mod kbfile;
mod naive;
mod plan;

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexSet;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::axioms::{error_atom, FreshConstants, MSG_EMPTY_DISJUNCTION, MSG_MIN_CARDINALITY};
use crate::model::{Atom, Disjunction, Literal, Polarity, Rule};
use crate::predicate::{v, Layer};
use crate::program::{Constraint, ConstraintAction, Program, DEFAULT_RULESET};
use crate::store::{FactStore, RelKey, Tuple};
use crate::symbol::Symbol;
use crate::term::Term;

pub use kb::{inconsistencies, Change, ChangeOutcome, Inconsistency, InconsistencyKind, KnowledgeBase};
pub use naive::materialize_naive;
use plan::{Bindings, CDisjunct, CHead, CRule, Evaluator, Limits, Version};

/// Prefix of individuals invented by the assert-fresh constraint pass.
pub const FRESH_PREFIX: &str = "newIndividual";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("fact cap of {limit} exceeded; most productive rule: {rule}")]
    Capacity { limit: usize, rule: String },
    #[error("unknown rule set `{0}`")]
    UnknownRuleset(String),
    #[error("{0}")]
    Rejected(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub rounds: usize,
    /// Complete rule-body matches evaluated.
    pub rule_instances: u64,
    /// Head instances discarded for exceeding the skolem depth cap.
    pub depth_dropped: u64,
    pub constraint_passes: usize,
}

impl Stats {
    fn absorb(&mut self, other: &Stats) {
        self.rounds += other.rounds;
        self.rule_instances += other.rule_instances;
        self.depth_dropped += other.depth_dropped;
        self.constraint_passes += other.constraint_passes;
    }
}

/// A saturated store with the rule that first derived each `error` fact.
#[derive(Clone, Debug, Default)]
pub struct Materialized {
    pub store: FactStore,
    pub provenance: BTreeMap<Atom, String>,
    pub stats: Stats,
}

fn error_key() -> RelKey {
    RelKey { predicate: v::error(), polarity: Polarity::Positive }
}

/// The `error` atom recorded for a disjunction whose disjuncts are all refuted.
pub fn empty_disjunction_error(d: &Disjunction) -> Atom {
    let parts = d
        .atoms()
        .iter()
        .map(|a| {
            let mut items = vec![Term::Const(a.predicate.spelling())];
            items.extend(a.args.iter().cloned());
            Term::list(items)
        })
        .collect();
    error_atom(MSG_EMPTY_DISJUNCTION, parts)
}

/// Unit propagation over every recorded disjunction: a disjunct is asserted
/// once every other disjunct is refuted, and an `error` fact is recorded when
/// all of them are refuted. A refuted disjunct can therefore become
/// inconsistent, which keeps propagation monotone. Returns the literals added.
pub fn propagate_disjunctions(store: &mut FactStore) -> Vec<Literal> {
    let mut added = Vec::new();
    let mut pending = Vec::new();
    for d in store.disjunctions() {
        let atoms = d.atoms();
        let refuted: Vec<bool> = atoms.iter().map(|a| store.contains_atom(a, Polarity::Negative)).collect();
        let open = refuted.iter().filter(|r| !**r).count();
        if open == 0 {
            pending.push(Literal::positive(empty_disjunction_error(d)));
        }
        for (a, r) in atoms.iter().zip(&refuted) {
            if open - usize::from(!*r) == 0 {
                pending.push(Literal::positive(a.clone()));
            }
        }
    }
    for l in pending {
        if store.insert(&l) {
            added.push(l);
        }
    }
    added
}

struct RoundLimits(FxHashMap<RelKey, (u32, u32)>);

impl Limits for RoundLimits {
    fn range(&self, key: &RelKey, version: Version) -> (u32, u32) {
        let Some(&(stable, len)) = self.0.get(key) else { return (0, 0) };
        match version {
            Version::Old => (0, stable),
            Version::Delta => (stable, len),
            Version::Full => (0, len),
        }
    }
}

enum Derived {
    Fact(RelKey, Tuple),
    Or(Vec<Atom>),
}

fn head_instance(rule: &CRule, b: &Bindings, depth_cap: usize) -> Option<Derived> {
    let within_cap = |t: &Term| !rule.head_has_compound || t.skolem_depth() <= depth_cap;
    match &rule.head {
        CHead::Lit { key, args } => {
            let tuple: Tuple = args.iter().map(|p| p.instantiate(b).expect("safe head")).collect();
            tuple.iter().all(within_cap).then_some(Derived::Fact(*key, tuple))
        }
        CHead::Or(ds) => {
            let mut atoms = Vec::new();
            let mut b = b.clone();
            for d in ds {
                match d {
                    CDisjunct::Atom(p, args) => {
                        atoms.push(Atom::new(*p, args.iter().map(|a| a.instantiate(&b).expect("safe head")).collect()))
                    }
                    CDisjunct::Each { var, list, predicate, args } => {
                        let Some(Term::List(items)) = list.instantiate(&b) else { continue };
                        for item in items.iter() {
                            b[*var] = Some(item.clone());
                            atoms.push(Atom::new(
                                *predicate,
                                args.iter().map(|a| a.instantiate(&b).expect("safe head")).collect(),
                            ));
                        }
                        b[*var] = None;
                    }
                }
            }
            atoms.iter().all(|a| a.args.iter().all(within_cap)).then_some(Derived::Or(atoms))
        }
    }
}

/// Semi-naive evaluator for one rule list.
pub(crate) struct Saturator {
    rules: Vec<CRule>,
    depth_cap: usize,
    fact_cap: usize,
    produced: Vec<u64>,
    pub stats: Stats,
    pub provenance: BTreeMap<Atom, String>,
}

impl Saturator {
    pub(crate) fn new(rules: &[Rule], program: &Program) -> Saturator {
        let rules: Vec<CRule> = rules.iter().enumerate().map(|(i, r)| CRule::compile(r, i)).collect();
        Saturator {
            produced: vec![0; rules.len()],
            rules,
            depth_cap: program.pragmas.skolem_depth_cap,
            fact_cap: program.pragmas.fact_cap,
            stats: Stats::default(),
            provenance: BTreeMap::new(),
        }
    }

    /// Saturates `store`. With `first` set every tuple is new and rules
    /// without stored literals fire once; otherwise only tuples past each
    /// relation's stable mark are joined.
    pub(crate) fn run(&mut self, store: &mut FactStore, mut first: bool) -> Result<(), EngineError> {
        loop {
            let limits = RoundLimits(
                store
                    .relation_keys_all()
                    .into_iter()
                    .map(|k| {
                        let r = store.relation(&k).expect("listed");
                        (k, (r.stable, r.len() as u32))
                    })
                    .collect(),
            );
            let pending_delta = limits.0.values().any(|(s, l)| s < l);
            if !first && !pending_delta {
                break;
            }
            self.stats.rounds += 1;
            let mut derived: Vec<(usize, Derived)> = Vec::new();
            let mut eval = Evaluator { store, limits: &limits, instances: 0 };
            let mut dropped = 0;
            let cap = self.depth_cap;
            for (ri, rule) in self.rules.iter().enumerate() {
                let mut emit = |b: &Bindings| match head_instance(rule, b, cap) {
                    Some(d) => derived.push((ri, d)),
                    None => dropped += 1,
                };
                if rule.stored.is_empty() {
                    if first {
                        eval.run(rule, &rule.plans[0], &mut emit);
                    }
                    continue;
                }
                for (k, &d) in rule.stored.iter().enumerate() {
                    let plan::CElem::Lit(lit) = &rule.body[d] else { unreachable!() };
                    let (lo, hi) = limits.range(&lit.key, Version::Delta);
                    if lo < hi {
                        eval.run(rule, &rule.plans[k], &mut emit);
                    }
                }
            }
            self.stats.rule_instances += eval.instances;
            self.stats.depth_dropped += dropped;
            store.mark_all_stable();
            for (ri, d) in derived {
                match d {
                    Derived::Fact(key, tuple) => {
                        let is_error = key == error_key();
                        let atom = is_error.then(|| Atom::new(key.predicate, tuple.to_vec()));
                        if store.insert_tuple(key, tuple) {
                            self.produced[ri] += 1;
                            if let Some(a) = atom {
                                self.provenance.entry(a).or_insert_with(|| self.rules[ri].label.clone());
                            }
                        }
                    }
                    Derived::Or(atoms) => {
                        if atoms.is_empty() {
                            let a = error_atom(MSG_EMPTY_DISJUNCTION, Vec::new());
                            if store.insert(&Literal::positive(a.clone())) {
                                self.produced[ri] += 1;
                                self.provenance.entry(a).or_insert_with(|| self.rules[ri].label.clone());
                            }
                        } else if let Ok(d) = Disjunction::from_atoms(atoms) {
                            if store.insert_disjunction(d) {
                                self.produced[ri] += 1;
                            }
                        }
                    }
                }
            }
            for l in propagate_disjunctions(store) {
                if l.atom.predicate == v::error() {
                    self.provenance.entry(l.atom).or_insert_with(|| "disjunction propagation".into());
                }
            }
            if store.len() > self.fact_cap {
                let best = (0..self.rules.len()).max_by_key(|&i| (self.produced[i], std::cmp::Reverse(i)));
                return Err(EngineError::Capacity {
                    limit: self.fact_cap,
                    rule: best.map(|i| self.rules[i].label.clone()).unwrap_or_default(),
                });
            }
            first = false;
        }
        Ok(())
    }
}

/// Stated facts after replaying `journal` over the program's facts.
pub fn stated_facts(program: &Program, journal: &[Change]) -> IndexSet<Literal> {
    let mut stated: IndexSet<Literal> = program.facts.iter().cloned().collect();
    for c in journal {
        match c {
            Change::Assert(l) => {
                stated.insert(l.clone());
            }
            Change::Retract(l) => {
                stated.shift_remove(l);
            }
        }
    }
    stated
}

/// Stated facts after the journal, with their declarations.
pub fn effective_base(program: &Program, journal: &[Change]) -> IndexSet<Literal> {
    program.with_declarations(stated_facts(program, journal))
}

fn member_key() -> RelKey {
    RelKey { predicate: v::member(Layer::Derived), polarity: Polarity::Positive }
}

fn property_key() -> RelKey {
    RelKey { predicate: v::property(Layer::Derived), polarity: Polarity::Positive }
}

/// Members of the constraint's class lacking values, with how many are missing.
pub(crate) fn violations(c: &Constraint, store: &FactStore) -> Vec<(Term, usize)> {
    let Some(members) = store.relation(&member_key()) else { return Vec::new() };
    let individuals: BTreeSet<Term> = members
        .ids_with(1, &c.class)
        .iter()
        .map(|&id| members.get(id)[0].clone())
        .collect();
    let props = store.relation(&property_key());
    let mut out = Vec::new();
    for i in individuals {
        let values: BTreeSet<&Term> = props
            .map(|r| {
                r.ids_with(0, &i)
                    .iter()
                    .map(|&id| r.get(id))
                    .filter(|t| t[1] == c.property)
                    .map(|t| &t[2])
                    .filter(|val| match &c.filler {
                        Some(f) => store.contains(&Literal::positive(Atom::new(
                            v::member(Layer::Derived),
                            vec![(*val).clone(), f.clone()],
                        ))),
                        None => true,
                    })
                    .collect()
            })
            .unwrap_or_default();
        if values.len() < c.min {
            out.push((i, c.min - values.len()));
        }
    }
    out
}

fn constraint_label(c: &Constraint) -> String {
    format!("constraint:{}:{}", c.class, c.property)
}

/// Runs the assert-fresh passes and then the error checks, re-saturating
/// after each change through `saturate`.
pub(crate) fn constraint_passes(
    program: &Program,
    journal: &[Change],
    store: &mut FactStore,
    stats: &mut Stats,
    provenance: &mut BTreeMap<Atom, String>,
    saturate: &mut dyn FnMut(&mut FactStore) -> Result<(), EngineError>,
) -> Result<(), EngineError> {
    if program.constraints.is_empty() {
        return Ok(());
    }
    let mut taken = program.constants();
    for c in journal {
        let (Change::Assert(l) | Change::Retract(l)) = c;
        let mut syms = Vec::new();
        l.atom.args.iter().for_each(|a| a.collect_constants(&mut syms));
        taken.extend(syms);
    }
    let mut fresh = FreshConstants::new(FRESH_PREFIX, taken);
    let b = Layer::Base;
    for _ in 0..program.pragmas.constraint_pass_cap {
        let mut additions = Vec::new();
        for c in program.constraints.iter().filter(|c| c.action == ConstraintAction::AssertFresh) {
            for (i, missing) in violations(c, store) {
                for _ in 0..missing {
                    let f = Term::Const(fresh.fresh());
                    additions.push(Atom::new(v::property(b), vec![i.clone(), c.property.clone(), f.clone()]));
                    additions.push(Atom::new(v::individual(b), vec![f.clone()]));
                    if let Some(filler) = &c.filler {
                        additions.push(Atom::new(v::member(b), vec![f.clone(), filler.clone()]));
                    }
                }
            }
        }
        if additions.is_empty() {
            break;
        }
        stats.constraint_passes += 1;
        for a in additions {
            store.insert(&Literal::positive(a));
        }
        saturate(store)?;
    }
    let mut errors = false;
    for c in program.constraints.iter().filter(|c| c.action == ConstraintAction::Error) {
        for (i, _) in violations(c, store) {
            let mut payload = vec![i, c.property.clone()];
            payload.extend(c.filler.clone());
            let a = error_atom(MSG_MIN_CARDINALITY, payload);
            if store.insert(&Literal::positive(a.clone())) {
                errors = true;
                provenance.entry(a).or_insert_with(|| constraint_label(c));
            }
        }
    }
    if errors {
        saturate(store)?;
    }
    Ok(())
}

/// Materializes `ruleset` over the program's facts with `journal` replayed.
pub fn materialize_with(program: &Program, ruleset: &str, journal: &[Change]) -> Result<Materialized, EngineError> {
    let rules = program
        .rules_for(ruleset)
        .ok_or_else(|| EngineError::UnknownRuleset(ruleset.to_owned()))?;
    let mut store = FactStore::new();
    for l in effective_base(program, journal) {
        store.insert(&l);
    }
    for d in &program.disjunctions {
        store.insert_disjunction(d.clone());
    }
    let mut sat = Saturator::new(rules, program);
    sat.run(&mut store, true)?;
    let mut stats = Stats::default();
    let mut provenance = BTreeMap::new();
    constraint_passes(program, journal, &mut store, &mut stats, &mut provenance, &mut |s| sat.run(s, false))?;
    store.mark_all_stable();
    stats.absorb(&sat.stats);
    provenance.extend(sat.provenance);
    Ok(Materialized { store, provenance, stats })
}

/// Materializes the default rule set.
pub fn materialize(program: &Program) -> Result<Materialized, EngineError> {
    materialize_with(program, DEFAULT_RULESET, &[])
}

/// Adds `facts` to a saturated store and propagates them semi-naively.
pub(crate) fn extend(program: &Program, ruleset: &str, m: &mut Materialized, facts: &[Literal]) -> Result<(), EngineError> {
    let rules = program
        .rules_for(ruleset)
        .ok_or_else(|| EngineError::UnknownRuleset(ruleset.to_owned()))?;
    let mut any = false;
    for f in facts {
        any |= m.store.insert(f);
    }
    if !any {
        return Ok(());
    }
    let mut sat = Saturator::new(rules, program);
    sat.run(&mut m.store, false)?;
    m.store.mark_all_stable();
    m.stats.absorb(&sat.stats);
    for (a, p) in sat.provenance {
        m.provenance.entry(a).or_insert(p);
    }
    Ok(())
}

/// One answer to a query: variable bindings in order of first occurrence.
pub type Answer = Vec<(Symbol, Term)>;

/// All bindings making `pattern` a stored literal, sorted and duplicate-free.
pub fn query(store: &FactStore, pattern: &Literal) -> Vec<Answer> {
    let vars = pattern.atom.vars();
    let Some(rel) = store.relation(&RelKey::of(pattern)) else { return Vec::new() };
    let ground_pos = pattern.atom.args.iter().position(Term::is_ground);
    let candidates: Vec<u32> = match ground_pos {
        Some(p) => rel.ids_with(p, &pattern.atom.args[p]).to_vec(),
        None => (0..rel.len() as u32).collect(),
    };
    let mut out = BTreeSet::new();
    for id in candidates {
        let tuple = rel.get(id);
        let mut binding: BTreeMap<Symbol, Term> = BTreeMap::new();
        if pattern.atom.args.iter().zip(tuple.iter()).all(|(p, t)| unify(p, t, &mut binding)) {
            out.insert(vars.iter().map(|v| (*v, binding[v].clone())).collect::<Answer>());
        }
    }
    out.into_iter().collect()
}

/// One-way matching of a pattern term against a ground term.
pub(crate) fn unify(p: &Term, t: &Term, b: &mut BTreeMap<Symbol, Term>) -> bool {
    match (p, t) {
        (Term::Var(v), _) => match b.get(v) {
            Some(x) => x == t,
            None => {
                b.insert(*v, t.clone());
                true
            }
        },
        (Term::Const(a), Term::Const(c)) => a == c,
        (Term::Compound(a), Term::Compound(c)) => {
            a.functor == c.functor && a.args.len() == c.args.len() && a.args.iter().zip(&c.args).all(|(x, y)| unify(x, y, b))
        }
        (Term::List(a), Term::List(c)) => a.len() == c.len() && a.iter().zip(c.iter()).all(|(x, y)| unify(x, y, b)),
        _ => false,
    }
}

