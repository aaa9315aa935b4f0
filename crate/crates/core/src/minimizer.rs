//! Code minimization: a rule is kept only if it can fire (satisfiable) and
//! something outside the rules can observe what it derives (testable).

use std::collections::BTreeSet;
use std::fmt;

use crate::ingest::{Diagnostic, DiagnosticKind};
use crate::model::{BodyElement, Head, Literal, Polarity, Rule};
use crate::predicate::{v, Layer, Predicate, PredicateTable};
use crate::program::{ConstraintAction, Program};

/// A predicate with a polarity; `logicNot` facts live in their own node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub predicate: Predicate,
    pub polarity: Polarity,
}

impl Node {
    pub fn positive(predicate: Predicate) -> Node {
        Node { predicate, polarity: Polarity::Positive }
    }

    pub fn negative(predicate: Predicate) -> Node {
        Node { predicate, polarity: Polarity::Negative }
    }

    fn of(l: &Literal) -> Node {
        Node { predicate: l.atom.predicate, polarity: l.polarity }
    }

    fn both(predicate: Predicate) -> [Node; 2] {
        [Node::positive(predicate), Node::negative(predicate)]
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "{}", self.predicate),
            Polarity::Negative => write!(f, "logicNot {}", self.predicate),
        }
    }
}

/// The predicates a deployment queries and changes at run time.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub queries: BTreeSet<Predicate>,
    pub dynamic: BTreeSet<Predicate>,
}

/// Parses `query p/n` and `dynamic p/n` lines; `#` starts a comment.
pub fn parse_manifest(text: &str, table: &PredicateTable) -> Result<Manifest, Vec<Diagnostic>> {
    let mut m = Manifest::default();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let (kind, spec) = (words.next().unwrap_or(""), words.next());
        let parsed = match (spec, words.next()) {
            (Some(spec), None) => spec
                .rsplit_once('/')
                .and_then(|(name, n)| Some((name, n.parse::<usize>().ok()?)))
                .ok_or_else(|| format!("expected `name/arity`, found `{spec}`")),
            _ => Err(format!("expected `query name/arity` or `dynamic name/arity`, found `{content}`")),
        };
        let resolved = parsed.and_then(|(name, arity)| table.resolve(name, arity).map_err(|e| e.to_string()));
        match (kind, resolved) {
            ("query", Ok(p)) => {
                m.queries.insert(p);
            }
            ("dynamic", Ok(p)) => {
                m.dynamic.insert(p);
            }
            (_, Err(e)) => errors.push(Diagnostic::error(DiagnosticKind::Semantic, line, e)),
            (other, Ok(_)) => errors.push(Diagnostic::error(
                DiagnosticKind::Syntax,
                line,
                format!("unknown manifest entry `{other}`; expected `query` or `dynamic`"),
            )),
        }
    }
    if errors.is_empty() {
        Ok(m)
    } else {
        Err(errors)
    }
}

/// One rule, or one constraint pass, as edges between nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleNode {
    pub heads: Vec<Node>,
    /// Nodes of the stored body literals; guards are always satisfiable.
    pub body: Vec<Node>,
    /// Nodes read on the rule's behalf when it is testable: the refutations
    /// that disjunction propagation consults.
    pub reads: Vec<Node>,
}

impl RuleNode {
    fn of_rule(rule: &Rule) -> RuleNode {
        let body: Vec<Node> = rule
            .body
            .iter()
            .filter_map(BodyElement::literal)
            .map(Node::of)
            .collect();
        match &rule.head {
            Head::Literal(l) => RuleNode { heads: vec![Node::of(l)], body, reads: Vec::new() },
            Head::Or(_) => {
                let preds: BTreeSet<Predicate> = rule.head_atoms().iter().map(|a| a.predicate).collect();
                let mut heads: Vec<Node> = preds.iter().map(|p| Node::positive(*p)).collect();
                heads.push(Node::positive(v::error()));
                RuleNode { heads, body, reads: preds.iter().map(|p| Node::negative(*p)).collect() }
            }
        }
    }
}

/// Predicate dependencies of one rule set, plus the facts and entry points.
#[derive(Clone, Debug)]
pub struct DependencyGraph {
    /// One entry per rule, in rule order.
    pub rules: Vec<RuleNode>,
    /// Constraint passes, which are never kept alive for their own sake.
    pub passes: Vec<RuleNode>,
    /// Nodes holding facts at compile time or at run time.
    pub facts: BTreeSet<Node>,
    /// Nodes observable from outside: queries and dynamic changes.
    pub entry: BTreeSet<Node>,
    /// Predicate sets of the stored disjunctions.
    pub disjunctions: Vec<BTreeSet<Predicate>>,
}

impl DependencyGraph {
    pub fn new(program: &Program, rules: &[Rule], manifest: &Manifest) -> DependencyGraph {
        let mut facts: BTreeSet<Node> = program.base_facts().iter().map(Node::of).collect();
        let mut entry = BTreeSet::new();
        for p in &manifest.queries {
            entry.extend(Node::both(*p));
        }
        for p in &manifest.dynamic {
            entry.extend(Node::both(*p));
            facts.extend(Node::both(*p));
        }
        if !manifest.dynamic.is_empty() {
            // Dynamic facts bring their own declarations.
            for d in [v::class(Layer::Base), v::individual(Layer::Base), v::is_property(Layer::Base), v::datatype(Layer::Base)] {
                facts.insert(Node::positive(d));
            }
        }
        if program.pragmas.consistency_check {
            entry.insert(Node::positive(v::error()));
        }
        let disjunctions: Vec<BTreeSet<Predicate>> = program
            .disjunctions
            .iter()
            .map(|d| d.atoms().iter().map(|a| a.predicate).collect())
            .collect();
        for d in &disjunctions {
            facts.extend(d.iter().map(|p| Node::positive(*p)));
            facts.insert(Node::positive(v::error()));
        }
        let member = Node::positive(v::member(Layer::Derived));
        let property = Node::positive(v::property(Layer::Derived));
        let passes = program
            .constraints
            .iter()
            .map(|c| {
                let heads = match c.action {
                    ConstraintAction::Error => vec![Node::positive(v::error())],
                    ConstraintAction::AssertFresh => vec![
                        Node::positive(v::property(Layer::Base)),
                        Node::positive(v::individual(Layer::Base)),
                        Node::positive(v::member(Layer::Base)),
                    ],
                };
                RuleNode { heads, body: vec![member, property], reads: Vec::new() }
            })
            .collect();
        DependencyGraph { rules: rules.iter().map(RuleNode::of_rule).collect(), passes, facts, entry, disjunctions }
    }

    /// Least fixpoint of the satisfiability cases. Returns the satisfiable
    /// nodes and, per rule, whether it is satisfiable.
    pub fn satisfiable(&self) -> (BTreeSet<Node>, Vec<bool>) {
        let mut nodes = self.facts.clone();
        let mut rules = vec![false; self.rules.len()];
        // A rule whose body mentions only its own head predicate.
        for (i, r) in self.rules.iter().enumerate() {
            if !r.body.is_empty() && r.body.iter().all(|b| r.heads.iter().any(|h| h.predicate == b.predicate)) {
                rules[i] = true;
                nodes.extend(r.heads.iter().copied());
            }
        }
        loop {
            let mut changed = false;
            for (i, r) in self.rules.iter().enumerate() {
                if !rules[i] && r.body.iter().all(|b| nodes.contains(b)) {
                    rules[i] = true;
                    changed = true;
                    nodes.extend(r.heads.iter().copied());
                }
            }
            for p in &self.passes {
                if p.body.iter().all(|b| nodes.contains(b)) && !p.heads.iter().all(|h| nodes.contains(h)) {
                    nodes.extend(p.heads.iter().copied());
                    changed = true;
                }
            }
            if !changed {
                return (nodes, rules);
            }
        }
    }

    /// Least fixpoint of the testability cases. Returns the testable nodes
    /// and, per rule, whether it is testable.
    /// Only rules marked in `live` propagate.
    pub fn testable(&self, live: &[bool]) -> (BTreeSet<Node>, Vec<bool>) {
        let mut nodes = self.entry.clone();
        let mut rules = vec![false; self.rules.len()];
        loop {
            let mut changed = false;
            let all = self.rules.iter().enumerate().filter(|(i, _)| live[*i]).map(|(i, r)| (Some(i), r));
            let passes = self.passes.iter().map(|p| (None, p));
            for (i, r) in all.chain(passes) {
                if i.is_some_and(|i| rules[i]) || !r.heads.iter().any(|h| nodes.contains(h)) {
                    continue;
                }
                if let Some(i) = i {
                    rules[i] = true;
                }
                for n in r.body.iter().chain(&r.reads) {
                    changed |= nodes.insert(*n);
                }
                changed |= i.is_some();
            }
            for d in &self.disjunctions {
                let observed = nodes.contains(&Node::positive(v::error()))
                    || d.iter().any(|p| nodes.contains(&Node::positive(*p)));
                if observed {
                    for p in d {
                        changed |= nodes.insert(Node::negative(*p));
                    }
                }
            }
            if !changed {
                return (nodes, rules);
            }
        }
    }
}

/// The analysis of one rule set.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub ruleset: String,
    pub satisfiable: BTreeSet<Node>,
    pub testable: BTreeSet<Node>,
    pub kept: Vec<Rule>,
    pub dropped: Vec<Rule>,
}

fn analyze(program: &Program, ruleset: &str, rules: &[Rule], manifest: &Manifest) -> Analysis {
    let graph = DependencyGraph::new(program, rules, manifest);
    let (satisfiable, sat_rules) = graph.satisfiable();
    let (testable, test_rules) = graph.testable(&sat_rules);
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        let consistency_rule = r.label.is_some_and(|l| l.as_str() == "GR13");
        if sat_rules[i] && test_rules[i] && (program.pragmas.consistency_check || !consistency_rule) {
            kept.push(r.clone());
        } else {
            dropped.push(r.clone());
        }
    }
    Analysis { ruleset: ruleset.to_owned(), satisfiable, testable, kept, dropped }
}

/// A program with only its necessary rules, and the analysis of each rule set.
#[derive(Clone, Debug)]
pub struct Minimized {
    pub program: Program,
    pub analyses: Vec<Analysis>,
}

/// Keeps the rules of every rule set that are both satisfiable and testable.
pub fn minimize(program: &Program, manifest: &Manifest) -> Minimized {
    let mut out = program.clone();
    let mut analyses = Vec::new();
    for name in program.ruleset_names() {
        let rules = program.rules_for(&name).unwrap_or_default();
        let a = analyze(program, &name, rules, manifest);
        if name == crate::program::DEFAULT_RULESET {
            out.rules = a.kept.clone();
        } else {
            out.variants.insert(name.clone(), a.kept.clone());
        }
        analyses.push(a);
    }
    Minimized { program: out, analyses }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::compile_native;

    fn program(text: &str) -> Program {
        compile_native(text).unwrap().program
    }

    fn manifest(p: &Program, text: &str) -> Manifest {
        parse_manifest(text, &p.predicates).unwrap()
    }

    fn names(nodes: &BTreeSet<Node>) -> BTreeSet<String> {
        nodes.iter().map(|n| n.to_string()).collect()
    }

    #[test]
    fn manifest_lines() {
        let p = program("alert(X) :- isMemberOf(X, convoy).\n");
        let m = manifest(&p, "# deployment\nquery alert/1\n\ndynamic ismemberof/2  # reports\nquery isMemberOf/2\n");
        assert_eq!(m.queries.len(), 2);
        assert_eq!(m.dynamic.iter().next().unwrap().layer, Layer::Base);
        let err = parse_manifest("query nosuch/3\nask alert/1\nquery alert\n", &p.predicates).unwrap_err();
        assert_eq!(err.iter().map(|d| d.line).collect::<Vec<_>>(), [1, 2, 3]);
    }

    #[test]
    fn fact_predicates_are_satisfiable() {
        let p = program("ismemberof(a, c).\n");
        let g = DependencyGraph::new(&p, &p.rules, &Manifest::default());
        let (sat, _) = g.satisfiable();
        assert!(sat.contains(&Node::positive(v::member(Layer::Base))));
        assert!(sat.contains(&Node::positive(v::member(Layer::Derived))));
        assert!(!sat.contains(&Node::negative(v::member(Layer::Base))));
    }

    #[test]
    fn broken_chain() {
        let p = program(
            "s0(a).\n\
             s1(X) :- s0(X).\ns2(X) :- s1(X).\ns3(X) :- s2(X), gap(X).\n\
             s4(X) :- s3(X).\ns5(X) :- s4(X).\ns6(X) :- s5(X).\n",
        );
        let user: Vec<Rule> = p.rules.iter().filter(|r| r.label.is_some_and(|l| l.as_str().starts_with("<input>"))).cloned().collect();
        let g = DependencyGraph::new(&p, &user, &Manifest::default());
        let (sat, rules) = g.satisfiable();
        let sat: BTreeSet<String> = names(&sat).into_iter().filter(|n| n.starts_with('s')).collect();
        assert_eq!(sat, ["s0/1", "s1/1", "s2/1"].map(String::from).into_iter().collect());
        assert_eq!(rules, [true, true, false, false, false, false]);
    }

    #[test]
    fn self_supporting_rule_is_satisfiable() {
        let p = program("loop(X) :- loop(X), loop(Y).\n");
        let user: Vec<Rule> = p.rules.iter().filter(|r| r.origin == crate::model::RuleOrigin::User).cloned().collect();
        let (sat, rules) = DependencyGraph::new(&p, &user, &Manifest::default()).satisfiable();
        assert_eq!(rules, [true]);
        assert!(names(&sat).contains("loop/1"));
    }

    #[test]
    fn member_entry_makes_subclass_testable() {
        let p = program("ismemberof(a, c).\nissubclassof(c, d).\n");
        let m = manifest(&p, "query isMemberOf/2\n");
        let g = DependencyGraph::new(&p, &p.rules, &m);
        let (t, _) = g.testable(&g.satisfiable().1);
        assert!(t.contains(&Node::positive(v::subclass(Layer::Derived))));
        assert!(t.contains(&Node::positive(v::member(Layer::Base))));
    }

    #[test]
    fn unqueried_heads_are_untestable() {
        let p = program("ismemberof(a, c).\nalert(X) :- isMemberOf(X, c).\n");
        let m = manifest(&p, "query isMemberOf/2\n");
        let min = minimize(&p, &m);
        assert!(min.program.rules.iter().all(|r| r.to_string() != "alert(X) :- isMemberOf(X, c)."));
        assert!(min.program.rules.len() < p.rules.len());
    }

    #[test]
    fn unsatisfiable_body_drops_the_rule() {
        let p = program("ismemberof(a, c).\nalert(X) :- isMemberOf(X, c), ghost(X).\n");
        let m = manifest(&p, "query alert/1\n");
        let min = minimize(&p, &m);
        assert!(min.analyses[0].dropped.iter().any(|r| r.to_string().starts_with("alert(X)")));
    }

    #[test]
    fn consistency_rules_go_when_checking_is_off() {
        let on = program("ismemberof(a, c).\n");
        let m = manifest(&on, "query isMemberOf/2\n");
        let kept = minimize(&on, &m).program;
        assert!(kept.rules.iter().any(|r| r.label.is_some_and(|l| l.as_str() == "GR13")));
        let mut off = on.clone();
        off.pragmas.consistency_check = false;
        let kept = minimize(&off, &m).program;
        assert!(!kept.rules.iter().any(|r| r.label.is_some_and(|l| l.as_str() == "GR13")));
    }

    #[test]
    fn minimizing_twice_changes_nothing() {
        let p = program("ismemberof(a, c).\nissubclassof(c, d).\nalert(X) :- isMemberOf(X, d).\n");
        let m = manifest(&p, "query alert/1\ndynamic ismemberof/2\n");
        let once = minimize(&p, &m).program;
        let twice = minimize(&once, &m).program;
        assert_eq!(once.rules, twice.rules);
    }

    #[test]
    fn larger_entry_keeps_at_least_as_much() {
        let p = program("ismemberof(a, c).\nissubclassof(c, d).\nalert(X) :- isMemberOf(X, d).\n");
        let small = minimize(&p, &manifest(&p, "query alert/1\n")).program;
        let big = minimize(&p, &manifest(&p, "query alert/1\nquery isSubClassOf/2\n")).program;
        assert!(small.rules.iter().all(|r| big.rules.contains(r)));
    }
}
