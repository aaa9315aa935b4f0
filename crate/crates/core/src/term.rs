use std::fmt;
use std::sync::Arc;

use crate::symbol::Symbol;

/// Functor of system-generated individuals standing in for existential witnesses.
pub const UNNAMED_INDIVIDUAL: &str = "unnamedIndividual";
/// Functor of system-generated anonymous classes.
pub const UNNAMED_CLASS: &str = "unnamedClass";

/// Arity a reserved functor must be used with, if `functor` is reserved.
pub fn reserved_arity(functor: &str) -> Option<usize> {
    match functor {
        UNNAMED_INDIVIDUAL => Some(3),
        UNNAMED_CLASS => Some(2),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Compound {
    pub functor: Symbol,
    pub args: Vec<Term>,
}

/// A logic-program term.
///
/// `List` only occurs as the member list of `isset` and inside `error`
/// payloads; it never unifies element-wise with a variable list pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Symbol),
    Const(Symbol),
    Compound(Arc<Compound>),
    List(Arc<[Term]>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Symbol::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Symbol::new(name))
    }

    pub fn compound(functor: &str, args: Vec<Term>) -> Term {
        Term::Compound(Arc::new(Compound {
            functor: Symbol::new(functor),
            args,
        }))
    }

    pub fn list(items: Vec<Term>) -> Term {
        Term::List(items.into())
    }

    /// `unnamedIndividual(I, P, C)`: the witness individual `I` needs for `P` into `C`.
    pub fn unnamed_individual(subject: Term, property: Term, class: Term) -> Term {
        Term::compound(UNNAMED_INDIVIDUAL, vec![subject, property, class])
    }

    /// `unnamedClass(P, V)`: the anonymous class of things whose `P` is `V`.
    pub fn unnamed_class(property: Term, value: Term) -> Term {
        Term::compound(UNNAMED_CLASS, vec![property, value])
    }

    pub fn as_const(&self) -> Option<Symbol> {
        match self {
            Term::Const(s) => Some(*s),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::Compound(c) => c.args.iter().all(Term::is_ground),
            Term::List(items) => items.iter().all(Term::is_ground),
        }
    }

    /// Pushes every variable in the term, in order of first occurrence.
    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::Const(_) => {}
            Term::Compound(c) => c.args.iter().for_each(|a| a.collect_vars(out)),
            Term::List(items) => items.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    /// Nesting depth of `unnamedIndividual` terms; constants have depth 0.
    pub fn skolem_depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::Compound(c) => {
                let inner = c.args.iter().map(Term::skolem_depth).max().unwrap_or(0);
                if c.functor.as_str() == UNNAMED_INDIVIDUAL {
                    inner + 1
                } else {
                    inner
                }
            }
            Term::List(items) => items.iter().map(Term::skolem_depth).max().unwrap_or(0),
        }
    }

    /// Does this term mention a reserved functor anywhere?
    pub fn mentions_reserved(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(s) => reserved_arity(s.as_str()).is_some(),
            Term::Compound(c) => {
                reserved_arity(c.functor.as_str()).is_some()
                    || c.args.iter().any(Term::mentions_reserved)
            }
            Term::List(items) => items.iter().any(Term::mentions_reserved),
        }
    }

    /// Applies `lookup` to every variable; unbound variables are kept.
    pub fn substitute(&self, lookup: &dyn Fn(Symbol) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => lookup(*v).unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::Compound(c) => Term::Compound(Arc::new(Compound {
                functor: c.functor,
                args: c.args.iter().map(|a| a.substitute(lookup)).collect(),
            })),
            Term::List(items) => Term::List(items.iter().map(|a| a.substitute(lookup)).collect()),
        }
    }

    /// Pushes every constant symbol in the term.
    pub fn collect_constants(&self, out: &mut Vec<Symbol>) {
        match self {
            Term::Var(_) => {}
            Term::Const(s) => out.push(*s),
            Term::Compound(c) => c.args.iter().for_each(|a| a.collect_constants(out)),
            Term::List(items) => items.iter().for_each(|a| a.collect_constants(out)),
        }
    }
}

/// Is `name` a valid unquoted constant (lowercase-initial identifier)?
pub fn is_plain_atom(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() => {}
        _ => return false,
    }
    let digits_only = name.chars().all(|c| c.is_ascii_digit());
    let ident = name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    ident && (digits_only || !name.starts_with(|c: char| c.is_ascii_digit()))
}

pub(crate) fn write_quoted(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_plain_atom(name) {
        f.write_str(name)
    } else {
        f.write_str("'")?;
        for c in name.chars() {
            match c {
                '\'' => f.write_str("\\'")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                _ => write!(f, "{c}")?,
            }
        }
        f.write_str("'")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v.as_str()),
            Term::Const(c) => write_quoted(f, c.as_str()),
            Term::Compound(c) => {
                write_quoted(f, c.functor.as_str())?;
                f.write_str("(")?;
                for (i, a) in c.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::List(items) => {
                f.write_str("[")?;
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("]")
            }
        }
    }
}
