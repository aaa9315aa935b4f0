//! Rules compiled to slot-addressed patterns and static join plans.

use crate::model::{Atom, BodyElement, Disjunct, Head, Rule};
use crate::predicate::Predicate;
use crate::store::{FactStore, RelKey, Tuple};
use crate::symbol::Symbol;
use crate::term::Term;

pub(crate) type Bindings = Vec<Option<Term>>;

#[derive(Clone, Debug)]
pub(crate) enum Pat {
    Var(usize),
    Ground(Term),
    Compound(Symbol, Vec<Pat>),
    List(Vec<Pat>),
}

impl Pat {
    fn compile(t: &Term, vars: &mut Vec<Symbol>) -> Pat {
        if t.is_ground() {
            return Pat::Ground(t.clone());
        }
        match t {
            Term::Var(v) => Pat::Var(slot(vars, *v)),
            Term::Compound(c) => Pat::Compound(c.functor, c.args.iter().map(|a| Pat::compile(a, vars)).collect()),
            Term::List(items) => Pat::List(items.iter().map(|a| Pat::compile(a, vars)).collect()),
            Term::Const(_) => unreachable!("constants are ground"),
        }
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Pat::Var(i) => out.push(*i),
            Pat::Ground(_) => {}
            Pat::Compound(_, ps) | Pat::List(ps) => ps.iter().for_each(|p| p.collect_vars(out)),
        }
    }

    fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn has_compound(&self) -> bool {
        match self {
            Pat::Var(_) => false,
            Pat::Ground(t) => matches!(t, Term::Compound(_)),
            Pat::Compound(..) => true,
            Pat::List(ps) => ps.iter().any(Pat::has_compound),
        }
    }

    /// The term under `b`, or `None` while a variable in it is unbound.
    pub(crate) fn instantiate(&self, b: &Bindings) -> Option<Term> {
        match self {
            Pat::Var(i) => b[*i].clone(),
            Pat::Ground(t) => Some(t.clone()),
            Pat::Compound(f, ps) => {
                let args = ps.iter().map(|p| p.instantiate(b)).collect::<Option<Vec<_>>>()?;
                Some(Term::compound(f.as_str(), args))
            }
            Pat::List(ps) => Some(Term::list(ps.iter().map(|p| p.instantiate(b)).collect::<Option<Vec<_>>>()?)),
        }
    }

    /// Matches a ground term, binding free slots; newly bound slots go on `trail`.
    pub(crate) fn matches(&self, t: &Term, b: &mut Bindings, trail: &mut Vec<usize>) -> bool {
        match self {
            Pat::Var(i) => match &b[*i] {
                Some(x) => x == t,
                None => {
                    b[*i] = Some(t.clone());
                    trail.push(*i);
                    true
                }
            },
            Pat::Ground(g) => g == t,
            Pat::Compound(f, ps) => match t {
                Term::Compound(c) if c.functor == *f && c.args.len() == ps.len() => {
                    ps.iter().zip(&c.args).all(|(p, a)| p.matches(a, b, trail))
                }
                _ => false,
            },
            Pat::List(ps) => match t {
                Term::List(items) if items.len() == ps.len() => ps.iter().zip(items.iter()).all(|(p, a)| p.matches(a, b, trail)),
                _ => false,
            },
        }
    }
}

fn slot(vars: &mut Vec<Symbol>, v: Symbol) -> usize {
    match vars.iter().position(|x| *x == v) {
        Some(i) => i,
        None => {
            vars.push(v);
            vars.len() - 1
        }
    }
}

pub(crate) fn undo(b: &mut Bindings, trail: &mut Vec<usize>, mark: usize) {
    for i in trail.drain(mark..) {
        b[i] = None;
    }
}

#[derive(Clone, Debug)]
pub(crate) struct CLit {
    pub key: RelKey,
    pub args: Vec<Pat>,
}

#[derive(Clone, Debug)]
pub(crate) enum CElem {
    Lit(CLit),
    NotEqual(Pat, Pat),
    Equal(Pat, Pat),
    Member(Pat, Pat),
}

#[derive(Clone, Debug)]
pub(crate) enum CDisjunct {
    Atom(Predicate, Vec<Pat>),
    Each { var: usize, list: Pat, predicate: Predicate, args: Vec<Pat> },
}

#[derive(Clone, Debug)]
pub(crate) enum CHead {
    Lit { key: RelKey, args: Vec<Pat> },
    Or(Vec<CDisjunct>),
}

/// Which slice of a relation a scan reads during a semi-naive round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Version {
    /// Tuples joined in earlier rounds.
    Old,
    /// Tuples new in the previous round.
    Delta,
    /// Everything present when the round began.
    Full,
}

#[derive(Clone, Debug)]
pub(crate) enum Step {
    Scan { elem: usize, version: Version, bound: Vec<usize> },
    Guard(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct CRule {
    pub label: String,
    pub nvars: usize,
    pub head: CHead,
    pub body: Vec<CElem>,
    /// Body positions of stored literals.
    pub stored: Vec<usize>,
    /// One plan per stored literal taken as the delta; `plans[0]` alone
    /// when the body has no stored literal.
    pub plans: Vec<Vec<Step>>,
    pub head_has_compound: bool,
}

impl CRule {
    pub(crate) fn compile(rule: &Rule, index: usize) -> CRule {
        let mut vars = Vec::new();
        let body: Vec<CElem> = rule
            .body
            .iter()
            .map(|el| match el {
                BodyElement::Literal(l) => CElem::Lit(CLit {
                    key: RelKey::of(l),
                    args: l.atom.args.iter().map(|a| Pat::compile(a, &mut vars)).collect(),
                }),
                BodyElement::NotEqual(a, b) => CElem::NotEqual(Pat::compile(a, &mut vars), Pat::compile(b, &mut vars)),
                BodyElement::Equal(a, b) => CElem::Equal(Pat::compile(a, &mut vars), Pat::compile(b, &mut vars)),
                BodyElement::Member(x, l) => CElem::Member(Pat::compile(x, &mut vars), Pat::compile(l, &mut vars)),
            })
            .collect();
        let atom_pats = |a: &Atom, vars: &mut Vec<Symbol>| a.args.iter().map(|t| Pat::compile(t, vars)).collect::<Vec<_>>();
        let head = match &rule.head {
            Head::Literal(l) => CHead::Lit { key: RelKey::of(l), args: atom_pats(&l.atom, &mut vars) },
            Head::Or(ds) => CHead::Or(
                ds.iter()
                    .map(|d| match d {
                        Disjunct::Atom(a) => CDisjunct::Atom(a.predicate, atom_pats(a, &mut vars)),
                        Disjunct::Each { var, list, atom } => {
                            let list = Pat::compile(list, &mut vars);
                            let var = slot(&mut vars, *var);
                            CDisjunct::Each { var, list, predicate: atom.predicate, args: atom_pats(atom, &mut vars) }
                        }
                    })
                    .collect(),
            ),
        };
        let head_has_compound = match &head {
            CHead::Lit { args, .. } => args.iter().any(Pat::has_compound),
            CHead::Or(ds) => ds.iter().any(|d| match d {
                CDisjunct::Atom(_, args) | CDisjunct::Each { args, .. } => args.iter().any(Pat::has_compound),
            }),
        };
        let stored: Vec<usize> = body
            .iter()
            .enumerate()
            .filter(|(_, e)| matches!(e, CElem::Lit(_)))
            .map(|(i, _)| i)
            .collect();
        let plans = if stored.is_empty() {
            vec![plan(&body, None, vars.len())]
        } else {
            stored.iter().map(|d| plan(&body, Some(*d), vars.len())).collect()
        };
        let label = rule.label.map(|l| l.to_string()).unwrap_or_else(|| format!("rule {}", index + 1));
        CRule { label, nvars: vars.len(), head, body, stored, plans, head_has_compound }
    }
}

fn guard_ready(e: &CElem, bound: &[bool]) -> bool {
    let all = |p: &Pat| p.vars().iter().all(|v| bound[*v]);
    match e {
        CElem::Lit(_) => false,
        CElem::NotEqual(a, b) => all(a) && all(b),
        CElem::Equal(a, b) => all(a) || all(b),
        CElem::Member(_, l) => all(l),
    }
}

fn bound_positions(l: &CLit, bound: &[bool]) -> Vec<usize> {
    l.args
        .iter()
        .enumerate()
        .filter(|(_, p)| p.vars().iter().all(|v| bound[*v]))
        .map(|(i, _)| i)
        .collect()
}

/// Greedy static order: ready guards first, then the delta literal, then
/// the literal with the most bound arguments.
fn plan(body: &[CElem], delta: Option<usize>, nvars: usize) -> Vec<Step> {
    let mut bound = vec![false; nvars];
    let mut placed = vec![false; body.len()];
    let mut steps = Vec::with_capacity(body.len());
    let version = |i: usize| match delta {
        Some(d) if i < d => Version::Old,
        Some(d) if i == d => Version::Delta,
        _ => Version::Full,
    };
    for _ in 0..body.len() {
        let next = (0..body.len())
            .find(|&i| !placed[i] && guard_ready(&body[i], &bound))
            .or_else(|| delta.filter(|&d| !placed[d]))
            .or_else(|| {
                (0..body.len())
                    .filter(|&i| !placed[i])
                    .filter_map(|i| match &body[i] {
                        CElem::Lit(l) => Some((i, bound_positions(l, &bound).len())),
                        _ => None,
                    })
                    .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                    .map(|(i, _)| i)
            })
            .or_else(|| (0..body.len()).find(|&i| !placed[i]))
            .expect("an unplaced element");
        placed[next] = true;
        let positions = match &body[next] {
            CElem::Lit(l) => bound_positions(l, &bound),
            _ => Vec::new(),
        };
        let mut mark = |p: &Pat| p.vars().into_iter().for_each(|v| bound[v] = true);
        match &body[next] {
            CElem::Lit(l) => {
                l.args.iter().for_each(&mut mark);
                steps.push(Step::Scan { elem: next, version: version(next), bound: positions });
            }
            CElem::NotEqual(..) => steps.push(Step::Guard(next)),
            CElem::Equal(a, b) => {
                mark(a);
                mark(b);
                steps.push(Step::Guard(next));
            }
            CElem::Member(x, _) => {
                mark(x);
                steps.push(Step::Guard(next));
            }
        }
    }
    steps
}

/// Id range of each relation visible to one round: `[0, stable)` is old,
/// `[stable, len)` the delta.
pub(crate) trait Limits {
    fn range(&self, key: &RelKey, version: Version) -> (u32, u32);
}

pub(crate) struct Evaluator<'a, L: Limits> {
    pub store: &'a FactStore,
    pub limits: &'a L,
    pub instances: u64,
}

impl<L: Limits> Evaluator<'_, L> {
    /// Runs `plan` of `rule`, calling `emit` once per complete body match.
    pub(crate) fn run(&mut self, rule: &CRule, plan: &[Step], emit: &mut dyn FnMut(&Bindings)) {
        let mut b: Bindings = vec![None; rule.nvars];
        let mut trail = Vec::new();
        self.step(rule, plan, 0, &mut b, &mut trail, emit);
    }

    fn step(
        &mut self,
        rule: &CRule,
        plan: &[Step],
        k: usize,
        b: &mut Bindings,
        trail: &mut Vec<usize>,
        emit: &mut dyn FnMut(&Bindings),
    ) {
        let Some(step) = plan.get(k) else {
            self.instances += 1;
            emit(b);
            return;
        };
        match step {
            Step::Scan { elem, version, bound } => {
                let CElem::Lit(lit) = &rule.body[*elem] else { unreachable!() };
                let Some(rel) = self.store.relation(&lit.key) else { return };
                let (lo, hi) = self.limits.range(&lit.key, *version);
                if lo >= hi {
                    return;
                }
                let mut best: Option<&[u32]> = None;
                for &p in bound {
                    let value = lit.args[p].instantiate(b).expect("bound position");
                    let ids = rel.ids_with(p, &value);
                    if best.is_none_or(|x| ids.len() < x.len()) {
                        best = Some(ids);
                    }
                }
                match best {
                    Some(ids) => {
                        let start = ids.partition_point(|&i| i < lo);
                        for &id in &ids[start..] {
                            if id >= hi {
                                break;
                            }
                            self.try_tuple(rule, plan, k, lit, rel.get(id), b, trail, emit);
                        }
                    }
                    None => {
                        for id in lo..hi {
                            self.try_tuple(rule, plan, k, lit, rel.get(id), b, trail, emit);
                        }
                    }
                }
            }
            Step::Guard(i) => {
                let mark = trail.len();
                match &rule.body[*i] {
                    CElem::NotEqual(x, y) => {
                        if let (Some(x), Some(y)) = (x.instantiate(b), y.instantiate(b)) {
                            if x != y {
                                self.step(rule, plan, k + 1, b, trail, emit);
                            }
                        }
                    }
                    CElem::Equal(x, y) => {
                        let ok = match (x.instantiate(b), y.instantiate(b)) {
                            (Some(xv), Some(yv)) => xv == yv,
                            (Some(xv), None) => y.matches(&xv, b, trail),
                            (None, Some(yv)) => x.matches(&yv, b, trail),
                            (None, None) => false,
                        };
                        if ok {
                            self.step(rule, plan, k + 1, b, trail, emit);
                        }
                        undo(b, trail, mark);
                    }
                    CElem::Member(x, l) => {
                        if let Some(Term::List(items)) = l.instantiate(b) {
                            for item in items.iter() {
                                if x.matches(item, b, trail) {
                                    self.step(rule, plan, k + 1, b, trail, emit);
                                }
                                undo(b, trail, mark);
                            }
                        }
                    }
                    CElem::Lit(_) => unreachable!(),
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn try_tuple(
        &mut self,
        rule: &CRule,
        plan: &[Step],
        k: usize,
        lit: &CLit,
        tuple: &Tuple,
        b: &mut Bindings,
        trail: &mut Vec<usize>,
        emit: &mut dyn FnMut(&Bindings),
    ) {
        let mark = trail.len();
        if lit.args.iter().zip(tuple.iter()).all(|(p, t)| p.matches(t, b, trail)) {
            self.step(rule, plan, k + 1, b, trail, emit);
        }
        undo(b, trail, mark);
    }
}
