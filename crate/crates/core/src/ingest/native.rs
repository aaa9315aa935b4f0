//! The native logic-program text format.
//!
//! ```text
//! % comment
//! ismemberof(smith, sniper).
//! logicNot(ismemberof(jones, sniper)).
//! or(ismemberof(x, a), ismemberof(x, b)).
//! haspropertywith(T, hasSpeed, S) :- hasPropertyWith(T, isDescribedBy, G), hasPropertyWith(G, hasSpeedObservation, S).
//! :- pragma(existential, assert_fresh).
//! ```
//!
//! Parsing runs in two passes: every predicate spelling is registered first,
//! so a lowercase name resolves to the Base layer whenever its camelcase twin
//! appears anywhere in the document.

use super::{Diagnostic, DiagnosticKind, Located, Parsed, SourceAxiom, SourceRule};
use crate::model::{
    canonicalize_literal, equality_atom, Atom, BodyElement, Disjunct, Disjunction, Head, Literal,
    NestedLiteral, Rule, RuleOrigin,
};
use crate::predicate::PredicateTable;
use crate::symbol::Symbol;
use crate::term::{reserved_arity, Term};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Quoted(String),
    Var(String),
    Open,
    Close,
    LBracket,
    RBracket,
    Comma,
    End,
    Neck,
    Query,
    Eq,
    NotEq,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
}

fn lex(text: &str, diags: &mut Vec<Diagnostic>) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut line = 1;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start_line = line;
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: start_line });
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                push(&mut out, Tok::Open);
                i += 1;
            }
            ')' => {
                push(&mut out, Tok::Close);
                i += 1;
            }
            '[' => {
                push(&mut out, Tok::LBracket);
                i += 1;
            }
            ']' => {
                push(&mut out, Tok::RBracket);
                i += 1;
            }
            ',' => {
                push(&mut out, Tok::Comma);
                i += 1;
            }
            '.' => {
                push(&mut out, Tok::End);
                i += 1;
            }
            '=' => {
                push(&mut out, Tok::Eq);
                i += 1;
            }
            '\\' if chars.get(i + 1) == Some(&'=') => {
                push(&mut out, Tok::NotEq);
                i += 2;
            }
            ':' if chars.get(i + 1) == Some(&'-') => {
                push(&mut out, Tok::Neck);
                i += 2;
            }
            '?' if chars.get(i + 1) == Some(&'-') => {
                push(&mut out, Tok::Query);
                i += 2;
            }
            '\'' => {
                let mut s = String::new();
                i += 1;
                let mut closed = false;
                while i < chars.len() {
                    match chars[i] {
                        '\'' if chars.get(i + 1) == Some(&'\'') => {
                            s.push('\'');
                            i += 2;
                        }
                        '\'' => {
                            closed = true;
                            i += 1;
                            break;
                        }
                        '\\' if i + 1 < chars.len() => {
                            s.push(match chars[i + 1] {
                                'n' => '\n',
                                't' => '\t',
                                other => other,
                            });
                            i += 2;
                        }
                        '\n' => {
                            line += 1;
                            s.push('\n');
                            i += 1;
                        }
                        other => {
                            s.push(other);
                            i += 1;
                        }
                    }
                }
                if closed {
                    push(&mut out, Tok::Quoted(s));
                } else {
                    diags.push(Diagnostic::error(DiagnosticKind::Syntax, start_line, "unterminated quoted atom"));
                }
            }
            c if c.is_alphanumeric() || c == '_' => {
                let begin = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[begin..i].iter().collect();
                let tok = if c.is_uppercase() || c == '_' {
                    Tok::Var(word)
                } else {
                    Tok::Name(word)
                };
                push(&mut out, tok);
            }
            other => {
                diags.push(Diagnostic::error(
                    DiagnosticKind::Syntax,
                    line,
                    format!("unexpected character `{other}`"),
                ));
                i += 1;
            }
        }
    }
    out
}

/// Syntax tree of one term or body expression, before predicate resolution.
#[derive(Clone, Debug)]
enum Raw {
    Var(String),
    Name { name: String, quoted: bool },
    Compound { name: String, args: Vec<Raw> },
    List(Vec<Raw>),
    Eq(Box<Raw>, Box<Raw>),
    NotEq(Box<Raw>, Box<Raw>),
}

enum Statement {
    Clause { head: Raw, body: Vec<Raw> },
    Directive(Vec<Raw>),
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
}

type PResult<T> = Result<T, (usize, String)>;

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or(1, |t| t.line)
    }

    fn fail<T>(&self, what: &str) -> PResult<T> {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(t) => describe(t).to_string(),
        };
        Err((self.line(), format!("expected {what}, found {found}")))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        if self.eat(&Tok::Neck) {
            let goals = self.conjunction()?;
            self.expect(Tok::End, "`.`")?;
            return Ok(Statement::Directive(goals));
        }
        let head = self.expr()?;
        let body = if self.eat(&Tok::Neck) {
            self.conjunction()?
        } else {
            Vec::new()
        };
        self.expect(Tok::End, "`.`")?;
        Ok(Statement::Clause { head, body })
    }

    fn conjunction(&mut self) -> PResult<Vec<Raw>> {
        let mut out = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn expr(&mut self) -> PResult<Raw> {
        let left = self.term()?;
        if self.eat(&Tok::Eq) {
            let right = self.term()?;
            Ok(Raw::Eq(Box::new(left), Box::new(right)))
        } else if self.eat(&Tok::NotEq) {
            let right = self.term()?;
            Ok(Raw::NotEq(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn args(&mut self) -> PResult<Vec<Raw>> {
        let mut args = Vec::new();
        if self.eat(&Tok::Close) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(&Tok::Close) {
                return Ok(args);
            }
            self.expect(Tok::Comma, "`,` or `)`")?;
        }
    }

    fn term(&mut self) -> PResult<Raw> {
        let Some(tok) = self.peek().cloned() else {
            return self.fail("a term");
        };
        match tok {
            Tok::Var(v) => {
                self.pos += 1;
                Ok(Raw::Var(v))
            }
            Tok::Name(ref name) | Tok::Quoted(ref name) => {
                let quoted = matches!(tok, Tok::Quoted(_));
                let name = name.clone();
                self.pos += 1;
                if self.eat(&Tok::Open) {
                    Ok(Raw::Compound { name, args: self.args()? })
                } else {
                    Ok(Raw::Name { name, quoted })
                }
            }
            // `=(a, b)` in prefix form
            Tok::Eq if self.toks.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::Open) => {
                self.pos += 2;
                let args = self.args()?;
                Ok(Raw::Compound { name: "=".into(), args })
            }
            Tok::LBracket => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.eat(&Tok::RBracket) {
                    return Ok(Raw::List(items));
                }
                loop {
                    items.push(self.term()?);
                    if self.eat(&Tok::RBracket) {
                        return Ok(Raw::List(items));
                    }
                    self.expect(Tok::Comma, "`,` or `]`")?;
                }
            }
            _ => self.fail("a term"),
        }
    }

    /// Skips past the next `.` after an error.
    fn recover(&mut self) {
        while let Some(t) = self.peek() {
            let end = *t == Tok::End;
            self.pos += 1;
            if end {
                break;
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Name(n) => format!("`{n}`"),
        Tok::Quoted(n) => format!("'{n}'"),
        Tok::Var(v) => format!("variable `{v}`"),
        Tok::Open => "`(`".into(),
        Tok::Close => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "`.`".into(),
        Tok::Neck => "`:-`".into(),
        Tok::Query => "`?-`".into(),
        Tok::Eq => "`=`".into(),
        Tok::NotEq => "`\\=`".into(),
    }
}

const LOGIC_NOT: &str = "logicNot";
const OR: &str = "or";
const EACH: &str = "each";

/// Names with fixed meaning that never denote predicates.
fn is_builtin(name: &str, arity: usize) -> bool {
    matches!((name, arity), ("logicNot", 1) | ("not", 1) | ("member", 2) | ("=", 2) | ("each", 3) | ("pragma", 2))
        || name == OR
}

/// Pre-pass: registers every predicate spelling found in literal positions.
fn register(raw: &Raw, table: &mut PredicateTable, line: usize, diags: &mut Vec<Diagnostic>) {
    match raw {
        Raw::Compound { name, args } if name == LOGIC_NOT && args.len() == 1 => {
            register(&args[0], table, line, diags)
        }
        Raw::Compound { name, args } if name == OR => {
            args.iter().for_each(|a| register(a, table, line, diags))
        }
        Raw::Compound { name, args } if name == EACH && args.len() == 3 => {
            register(&args[2], table, line, diags)
        }
        Raw::Compound { name, args } if name == "not" && args.len() == 1 => {
            register(&args[0], table, line, diags)
        }
        Raw::Compound { name, args } => {
            if is_builtin(name, args.len()) || reserved_arity(name).is_some() {
                return;
            }
            if let Err(e) = table.register(name, args.len()) {
                diags.push(Diagnostic::error(DiagnosticKind::Semantic, line, e.to_string()));
            }
        }
        _ => {}
    }
}

/// Converts resolved syntax to model values for one statement.
struct Builder<'t> {
    table: &'t PredicateTable,
    line: usize,
    fresh: usize,
}

impl Builder<'_> {
    fn err<T>(&self, kind: DiagnosticKind, message: impl Into<String>) -> Result<T, Diagnostic> {
        Err(Diagnostic::error(kind, self.line, message))
    }

    fn term(&mut self, raw: &Raw) -> Result<Term, Diagnostic> {
        match raw {
            Raw::Var(v) if v == "_" => {
                self.fresh += 1;
                Ok(Term::var(&format!("_G{}", self.fresh)))
            }
            Raw::Var(v) => Ok(Term::var(v)),
            Raw::Name { name, quoted } => {
                if name.is_empty() {
                    return self.err(DiagnosticKind::Syntax, "empty name");
                }
                if !quoted && reserved_arity(name).is_some() {
                    return self.err(
                        DiagnosticKind::Reserved,
                        format!("`{name}` is reserved for system-generated terms"),
                    );
                }
                Ok(Term::constant(name))
            }
            Raw::Compound { name, args } => match reserved_arity(name) {
                Some(n) if n == args.len() => {
                    let args = args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?;
                    Ok(Term::compound(name, args))
                }
                Some(n) => self.err(
                    DiagnosticKind::Reserved,
                    format!("reserved functor `{name}` takes {n} arguments, found {}", args.len()),
                ),
                None => self.err(
                    DiagnosticKind::Unsupported,
                    format!("compound term `{name}/{}` is not supported as an argument", args.len()),
                ),
            },
            Raw::List(items) => {
                let items = items.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?;
                Ok(Term::list(items))
            }
            Raw::Eq(..) | Raw::NotEq(..) => self.err(DiagnosticKind::Syntax, "comparison used as a term"),
        }
    }

    fn atom(&mut self, raw: &Raw) -> Result<Atom, Diagnostic> {
        let (name, args): (&str, &[Raw]) = match raw {
            Raw::Compound { name, args } => (name, args),
            Raw::Name { name, .. } => (name, &[]),
            Raw::Var(v) => return self.err(DiagnosticKind::Syntax, format!("variable `{v}` used as a goal")),
            _ => return self.err(DiagnosticKind::Syntax, "expected an atom"),
        };
        if reserved_arity(name).is_some() {
            return self.err(
                DiagnosticKind::Reserved,
                format!("`{name}` is reserved for system-generated terms"),
            );
        }
        if is_builtin(name, args.len()) {
            return self.err(DiagnosticKind::Syntax, format!("`{name}/{}` is not allowed here", args.len()));
        }
        let predicate = self
            .table
            .resolve(name, args.len())
            .map_err(|e| Diagnostic::error(DiagnosticKind::Semantic, self.line, e.to_string()))?;
        let args = args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?;
        Ok(Atom::new(predicate, args))
    }

    fn literal(&mut self, raw: &Raw) -> Result<Literal, Diagnostic> {
        let mut negations = 0;
        let mut cur = raw;
        while let Raw::Compound { name, args } = cur {
            if name == LOGIC_NOT && args.len() == 1 {
                negations += 1;
                cur = &args[0];
            } else {
                break;
            }
        }
        let atom = self.atom(cur)?;
        Ok(canonicalize_literal(NestedLiteral { negations, atom }))
    }

    fn disjuncts(&mut self, raw: &Raw, out: &mut Vec<Disjunct>) -> Result<(), Diagnostic> {
        match raw {
            Raw::Compound { name, args } if name == OR => {
                for a in args {
                    self.disjuncts(a, out)?;
                }
                Ok(())
            }
            Raw::Compound { name, args } if name == "=" && args.len() == 2 => {
                out.push(Disjunct::Atom(equality_atom(self.term(&args[0])?, self.term(&args[1])?)));
                Ok(())
            }
            Raw::Eq(a, b) => {
                out.push(Disjunct::Atom(equality_atom(self.term(a)?, self.term(b)?)));
                Ok(())
            }
            Raw::Compound { name, args } if name == EACH && args.len() == 3 => {
                let Raw::Var(var) = &args[0] else {
                    return self.err(DiagnosticKind::Syntax, "each/3 expects a variable first");
                };
                let list = self.term(&args[1])?;
                let atom = self.each_atom(&args[2])?;
                out.push(Disjunct::Each { var: Symbol::new(var), list, atom });
                Ok(())
            }
            Raw::Compound { name, .. } if name == LOGIC_NOT => {
                self.err(DiagnosticKind::Unsupported, "disjuncts must be positive atoms")
            }
            other => {
                out.push(Disjunct::Atom(self.atom(other)?));
                Ok(())
            }
        }
    }

    fn each_atom(&mut self, raw: &Raw) -> Result<Atom, Diagnostic> {
        match raw {
            Raw::Compound { name, args } if name == "=" && args.len() == 2 => {
                Ok(equality_atom(self.term(&args[0])?, self.term(&args[1])?))
            }
            Raw::Eq(a, b) => Ok(equality_atom(self.term(a)?, self.term(b)?)),
            other => self.atom(other),
        }
    }

    fn head(&mut self, raw: &Raw) -> Result<Head, Diagnostic> {
        match raw {
            Raw::Compound { name, .. } if name == OR => {
                let mut ds = Vec::new();
                self.disjuncts(raw, &mut ds)?;
                if ds.is_empty() {
                    return self.err(DiagnosticKind::Syntax, "malformed disjunction: no disjuncts");
                }
                Ok(Head::Or(ds))
            }
            other => Ok(Head::Literal(self.literal(other)?)),
        }
    }

    fn body_element(&mut self, raw: &Raw) -> Result<BodyElement, Diagnostic> {
        match raw {
            Raw::Eq(a, b) => Ok(BodyElement::Equal(self.term(a)?, self.term(b)?)),
            Raw::NotEq(a, b) => Ok(BodyElement::NotEqual(self.term(a)?, self.term(b)?)),
            Raw::Compound { name, args } if name == "=" && args.len() == 2 => {
                Ok(BodyElement::Equal(self.term(&args[0])?, self.term(&args[1])?))
            }
            Raw::Compound { name, args } if name == "member" && args.len() == 2 => {
                Ok(BodyElement::Member(self.term(&args[0])?, self.term(&args[1])?))
            }
            Raw::Compound { name, args } if name == "not" && args.len() == 1 => match &args[0] {
                Raw::Eq(a, b) => Ok(BodyElement::NotEqual(self.term(a)?, self.term(b)?)),
                Raw::Compound { name, args } if name == "=" && args.len() == 2 => {
                    Ok(BodyElement::NotEqual(self.term(&args[0])?, self.term(&args[1])?))
                }
                _ => self.err(
                    DiagnosticKind::Unsupported,
                    "negation as failure is only supported on equality, `not(A = B)`; use logicNot for classical negation",
                ),
            },
            other => Ok(BodyElement::Literal(self.literal(other)?)),
        }
    }

    fn rule(&mut self, head: &Raw, body: &[Raw]) -> Result<Rule, Diagnostic> {
        let head = self.head(head)?;
        let mut elements = Vec::with_capacity(body.len());
        let mut first_err = None;
        for b in body {
            match self.body_element(b) {
                Ok(e) => elements.push(e),
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        match first_err {
            Some(e) => Err(e),
            None => Ok(Rule::new(head, elements, RuleOrigin::User)),
        }
    }
}

fn name_value(raw: &Raw) -> Option<String> {
    match raw {
        Raw::Name { name, .. } => Some(name.clone()),
        Raw::Var(v) => Some(v.clone()),
        _ => None,
    }
}

/// A bodyless ground statement becomes a fact or disjunctive fact.
fn ground_statement(rule: &Rule) -> Option<SourceAxiom> {
    if !rule.body.is_empty() {
        return None;
    }
    match &rule.head {
        Head::Literal(l) if l.atom.is_ground() => Some(SourceAxiom::Fact(l.clone())),
        Head::Or(ds) => {
            let mut atoms = Vec::new();
            for d in ds {
                match d {
                    Disjunct::Atom(a) => atoms.push(a.clone()),
                    Disjunct::Each { var, list: Term::List(items), atom } => {
                        for item in items.iter() {
                            atoms.push(atom.substitute(&|v| (v == *var).then(|| item.clone())));
                        }
                    }
                    Disjunct::Each { .. } => return None,
                }
            }
            Disjunction::from_atoms(atoms).ok().map(SourceAxiom::Disjunction)
        }
        Head::Literal(_) => None,
    }
}

fn statements(toks: &[Token], diags: &mut Vec<Diagnostic>) -> Vec<(usize, Statement)> {
    let mut p = Parser { toks, pos: 0 };
    let mut out = Vec::new();
    while p.peek().is_some() {
        let line = p.line();
        match p.statement() {
            Ok(s) => out.push((line, s)),
            Err((line, message)) => {
                diags.push(Diagnostic::error(DiagnosticKind::Syntax, line, message));
                p.recover();
            }
        }
    }
    out
}

pub(super) fn parse(text: &str, table: &mut PredicateTable) -> Parsed {
    let mut out = Parsed::default();
    let toks = lex(text, &mut out.diagnostics);
    let stmts = statements(&toks, &mut out.diagnostics);
    let mut clean = Vec::with_capacity(stmts.len());
    for (line, s) in &stmts {
        let before = out.diagnostics.len();
        if let Statement::Clause { head, body } = s {
            register(head, table, *line, &mut out.diagnostics);
            body.iter().for_each(|b| register(b, table, *line, &mut out.diagnostics));
        }
        clean.push(out.diagnostics.len() == before);
    }
    for ((line, s), ok) in stmts.into_iter().zip(clean) {
        if !ok {
            continue;
        }
        match s {
            Statement::Directive(goals) => directive(&mut out, line, &goals),
            Statement::Clause { head, body } => {
                let mut b = Builder { table, line, fresh: 0 };
                match b.rule(&head, &body) {
                    Ok(rule) => {
                        if let Some(axiom) = ground_statement(&rule) {
                            out.axiom(line, axiom);
                        } else {
                            out.rules.push(Located { item: SourceRule::Clause(rule), line });
                        }
                    }
                    Err(d) => out.diagnostics.push(d),
                }
            }
        }
    }
    out
}

fn directive(out: &mut Parsed, line: usize, goals: &[Raw]) {
    for g in goals {
        match g {
            Raw::Compound { name, args } if name == "pragma" && args.len() == 2 => {
                match (name_value(&args[0]), name_value(&args[1])) {
                    (Some(n), Some(v)) => out.pragmas.push(Located { item: (n, v), line }),
                    _ => out.error(DiagnosticKind::Syntax, line, "pragma/2 expects two names"),
                }
            }
            _ => out.error(DiagnosticKind::Unsupported, line, "only `:- pragma(Name, Value).` directives are supported"),
        }
    }
}

fn single_statement(text: &str) -> Result<(usize, Raw, Vec<Raw>), Diagnostic> {
    let mut diags = Vec::new();
    let mut toks = lex(text, &mut diags);
    if let Some(d) = diags.into_iter().next() {
        return Err(d);
    }
    if toks.first().map(|t| &t.tok) == Some(&Tok::Query) {
        toks.remove(0);
    }
    if toks.last().map(|t| &t.tok) != Some(&Tok::End) {
        let line = toks.last().map_or(1, |t| t.line);
        toks.push(Token { tok: Tok::End, line });
    }
    let mut p = Parser { toks: &toks, pos: 0 };
    let stmt = p.statement().map_err(|(line, m)| Diagnostic::error(DiagnosticKind::Syntax, line, m))?;
    if p.peek().is_some() {
        return Err(Diagnostic::error(DiagnosticKind::Syntax, p.line(), "expected a single statement"));
    }
    match stmt {
        Statement::Clause { head, body } => Ok((1, head, body)),
        Statement::Directive(_) => Err(Diagnostic::error(DiagnosticKind::Syntax, 1, "unexpected directive")),
    }
}

/// Parses a query pattern such as `isMemberOf(X, theaterObject)` or
/// `logicNot(isMemberOf(jones, sniper))`. A leading `?-` and a trailing `.`
/// are optional. The predicate must already be known to `table`.
pub fn parse_query(text: &str, table: &PredicateTable) -> Result<Literal, Diagnostic> {
    let (line, head, body) = single_statement(text)?;
    if !body.is_empty() {
        return Err(Diagnostic::error(DiagnosticKind::Syntax, line, "a query is a single atom"));
    }
    Builder { table, line, fresh: 0 }.literal(&head)
}

/// Parses one ground literal, as accepted by assert and retract.
pub fn parse_fact(text: &str, table: &PredicateTable) -> Result<Literal, Diagnostic> {
    let lit = parse_query(text, table)?;
    if !lit.atom.is_ground() {
        return Err(Diagnostic::error(
            DiagnosticKind::Semantic,
            1,
            format!("`{lit}` is not ground"),
        ));
    }
    Ok(lit)
}

/// Parses one clause, registering its predicate spellings in `table`.
pub fn parse_rule_text(text: &str, table: &mut PredicateTable) -> Result<Rule, Diagnostic> {
    let (line, head, body) = single_statement(text)?;
    let mut diags = Vec::new();
    register(&head, table, line, &mut diags);
    body.iter().for_each(|b| register(b, table, line, &mut diags));
    if let Some(d) = diags.into_iter().next() {
        return Err(d);
    }
    Builder { table, line, fresh: 0 }.rule(&head, &body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Polarity;
    use crate::predicate::{v, Layer};

    fn parse_doc(text: &str) -> Parsed {
        parse(text, &mut PredicateTable::new())
    }

    fn c(x: &str) -> Term {
        Term::constant(x)
    }

    #[test]
    fn facts_and_layers() {
        let p = parse_doc("ismemberof(smith, sniper).\nisMemberOf(jones, sniper).\n");
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        let items = p.axiom_items();
        assert_eq!(
            items[0],
            SourceAxiom::Fact(Literal::positive(Atom::new(v::member(Layer::Base), vec![c("smith"), c("sniper")])))
        );
        assert_eq!(
            items[1],
            SourceAxiom::Fact(Literal::positive(Atom::new(v::member(Layer::Derived), vec![c("jones"), c("sniper")])))
        );
        assert_eq!(p.axioms[1].line, 2);
    }

    #[test]
    fn nested_negation_collapses() {
        let p = parse_doc("logicNot(logicNot(isclass(theaterObject))).\nlogicNot(ismemberof(jones, sniper)).");
        let items = p.axiom_items();
        let SourceAxiom::Fact(a) = &items[0] else { panic!() };
        assert_eq!(a.polarity, Polarity::Positive);
        let SourceAxiom::Fact(b) = &items[1] else { panic!() };
        assert_eq!(b.polarity, Polarity::Negative);
    }

    #[test]
    fn rules_with_guards() {
        let p = parse_doc(
            "isletter(Y) :- isLetter(Y), not(Y = c).\nfoo(X, Y) :- bar(X), member(Y, [a, b]), X \\= Y, X = a.",
        );
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        let rules = p.rule_items();
        assert_eq!(rules.len(), 2);
        let SourceRule::Clause(r) = &rules[0] else { panic!() };
        assert_eq!(r.to_string(), "isletter(Y) :- isLetter(Y), not(Y = c).");
        let SourceRule::Clause(r) = &rules[1] else { panic!() };
        assert_eq!(r.to_string(), "foo(X, Y) :- bar(X), member(Y, [a, b]), not(X = Y), X = a.");
    }

    #[test]
    fn lowercase_resolves_to_base_only_with_a_camel_twin() {
        let p = parse_doc("isletter(a).\nisletter(Y) :- isLetter(Y).");
        let SourceAxiom::Fact(f) = &p.axiom_items()[0] else { panic!() };
        assert_eq!(f.atom.predicate.layer, Layer::Base);
        let p = parse_doc("alert(a).");
        let SourceAxiom::Fact(f) = &p.axiom_items()[0] else { panic!() };
        assert_eq!(f.atom.predicate.layer, Layer::Derived);
    }

    #[test]
    fn disjunctive_fact_is_canonical() {
        let p = parse_doc("or(or(ismemberof(x, b), ismemberof(x, a)), ismemberof(x, a)).");
        let SourceAxiom::Disjunction(d) = &p.axiom_items()[0] else { panic!() };
        assert_eq!(d.to_string(), "or(ismemberof(x, a), ismemberof(x, b))");
    }

    #[test]
    fn disjunctive_rule_head_with_each() {
        let p = parse_doc("or(each(A, L, =(I, A))) :- isSet(C, L), isMemberOf(I, C).");
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        let SourceRule::Clause(r) = &p.rule_items()[0] else { panic!() };
        assert_eq!(r.to_string(), "or(each(A, L, equivalentIndividuals(I, A))) :- isSet(C, L), isMemberOf(I, C).");
    }

    #[test]
    fn reserved_functors() {
        let p = parse_doc("ismemberof(unnamedIndividual(a, p, c), c).");
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        let p = parse_doc("ismemberof(unnamedIndividual(a, p), c).\nunnamedClass(a, b).");
        assert_eq!(p.diagnostics.len(), 2);
        assert!(p.diagnostics.iter().all(|d| d.kind == DiagnosticKind::Reserved));
    }

    #[test]
    fn errors_are_collected_with_lines() {
        let p = parse_doc("ismemberof(a, b).\nismemberof(a b).\nismemberof(a).\nfoo(X) :- not(bar(X)).\nisclass(c).");
        let lines: Vec<usize> = p.diagnostics.iter().map(|d| d.line).collect();
        assert_eq!(lines, vec![2, 3, 4], "{:?}", p.diagnostics);
        assert_eq!(p.axioms.len(), 2);
    }

    #[test]
    fn pragmas_and_comments() {
        let p = parse_doc("% header\n:- pragma(existential, assert_fresh).\nisclass(a). % trailing\n");
        assert_eq!(p.pragmas[0].item, ("existential".to_string(), "assert_fresh".to_string()));
        assert_eq!(p.pragmas[0].line, 2);
        assert_eq!(p.axioms.len(), 1);
    }

    #[test]
    fn quoted_atoms_round_trip() {
        let p = parse_doc("ismemberof('Smith Jr', 'it''s').");
        let SourceAxiom::Fact(f) = &p.axiom_items()[0] else { panic!() };
        assert_eq!(f.atom.args[0], c("Smith Jr"));
        assert_eq!(f.atom.args[1], c("it's"));
        let again = parse_doc(&format!("{f}."));
        assert_eq!(again.axiom_items(), p.axiom_items());
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let mut t = PredicateTable::new();
        let r = parse_rule_text("isclass(C) :- isMemberOf(_, C), isMemberOf(_, C).", &mut t).unwrap();
        let vars: Vec<_> = r.body_literals().map(|l| l.atom.args[0].clone()).collect();
        assert_ne!(vars[0], vars[1]);
    }

    #[test]
    fn queries() {
        let t = PredicateTable::new();
        let q = parse_query("isMemberOf(X, theaterobject)", &t).unwrap();
        assert_eq!(q.atom.predicate, v::member(Layer::Derived));
        assert!(q.atom.args[0].is_var());
        assert_eq!(parse_query("error(X)", &t).unwrap().atom.predicate, v::error());
        assert!(parse_query("?- isMemberOf(a, b).", &t).is_ok());
        let e = parse_query("isMemberOf(a, b, c)", &t).unwrap_err();
        assert!(e.message.contains("arity"), "{e}");
        let e = parse_query("frobnicate(a)", &t).unwrap_err();
        assert!(e.message.contains("unknown predicate"), "{e}");
        assert!(parse_fact("ismemberof(a, X)", &t).is_err());
    }
}
