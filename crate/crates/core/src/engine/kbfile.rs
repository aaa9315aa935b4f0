//! The compiled knowledge-base file: a program, one materialized store per
//! rule set, and the journal, as deterministic JSON.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Change, KnowledgeBase, Materialized};
use crate::axioms::generate_cardinality_rules;
use crate::ingest::{parse_fact, parse_rule_text, Diagnostic};
use crate::model::{Disjunction, Literal, Rule, RuleOrigin};
use crate::predicate::{Predicate, PredicateTable, Layer};
use crate::program::{Pragmas, Program};
use crate::store::FactStore;
use crate::symbol::Symbol;

pub const FORMAT: &str = "owlhorn-kb";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum KbFileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed knowledge-base file: {0}")]
    Format(String),
}

impl KbFileError {
    fn io(path: &Path, source: io::Error) -> KbFileError {
        KbFileError::Io { path: path.to_owned(), source }
    }
}

#[derive(Serialize, Deserialize)]
struct RuleRecord {
    text: String,
    origin: RuleOrigin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ChangeRecord {
    Assert(String),
    Retract(String),
}

#[derive(Serialize, Deserialize)]
struct StoreRecord {
    literals: Vec<String>,
    disjunctions: Vec<Vec<String>>,
    /// `error` fact and the rule that first derived it.
    provenance: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct KbRecord {
    format: String,
    version: u32,
    pragmas: Pragmas,
    /// User predicates as (base spelling, derived spelling, arity).
    predicates: Vec<(String, String, usize)>,
    facts: Vec<String>,
    disjunctions: Vec<Vec<String>>,
    rules: Vec<RuleRecord>,
    variants: BTreeMap<String, Vec<RuleRecord>>,
    active: String,
    journal: Vec<ChangeRecord>,
    stores: BTreeMap<String, StoreRecord>,
}

fn rule_record(r: &Rule) -> RuleRecord {
    RuleRecord { text: r.to_string(), origin: r.origin, label: r.label.map(|l| l.to_string()) }
}

fn disjunction_record(d: &Disjunction) -> Vec<String> {
    d.atoms().iter().map(|a| a.to_string()).collect()
}

fn store_record(m: &Materialized) -> StoreRecord {
    StoreRecord {
        literals: m.store.literals().iter().map(|l| l.to_string()).collect(),
        disjunctions: m.store.disjunctions().iter().map(disjunction_record).collect(),
        provenance: m.provenance.iter().map(|(a, p)| (a.to_string(), p.clone())).collect(),
    }
}

/// Serializes `kb`; identical knowledge bases give identical bytes.
pub fn to_json(kb: &KnowledgeBase) -> String {
    let p = kb.program();
    let record = KbRecord {
        format: FORMAT.into(),
        version: VERSION,
        pragmas: p.pragmas.clone(),
        predicates: p
            .predicates
            .user_predicates()
            .iter()
            .map(|q| (q.name.to_string(), q.camel.to_string(), q.arity))
            .collect(),
        facts: p.facts.iter().map(|l| l.to_string()).collect(),
        disjunctions: p.disjunctions.iter().map(disjunction_record).collect(),
        rules: p.rules.iter().map(rule_record).collect(),
        variants: p.variants.iter().map(|(k, rs)| (k.clone(), rs.iter().map(rule_record).collect())).collect(),
        active: kb.active_ruleset().to_owned(),
        journal: kb
            .journal()
            .iter()
            .map(|c| match c {
                Change::Assert(l) => ChangeRecord::Assert(l.to_string()),
                Change::Retract(l) => ChangeRecord::Retract(l.to_string()),
            })
            .collect(),
        stores: p
            .ruleset_names()
            .into_iter()
            .filter_map(|name| kb.state(&name).map(|m| (name, store_record(m))))
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&record).expect("knowledge base serializes");
    out.push('\n');
    out
}

fn bad(what: &str, text: &str, d: Diagnostic) -> KbFileError {
    KbFileError::Format(format!("{what} `{text}`: {}", d.message))
}

fn literal(text: &str, table: &PredicateTable) -> Result<Literal, KbFileError> {
    parse_fact(text, table).map_err(|d| bad("fact", text, d))
}

fn disjunction(atoms: &[String], table: &PredicateTable) -> Result<Disjunction, KbFileError> {
    let atoms = atoms
        .iter()
        .map(|t| literal(t, table).map(|l| l.atom))
        .collect::<Result<Vec<_>, _>>()?;
    Disjunction::from_atoms(atoms).map_err(|e| KbFileError::Format(e.to_string()))
}

fn rules(records: &[RuleRecord], table: &mut PredicateTable) -> Result<Vec<Rule>, KbFileError> {
    records
        .iter()
        .map(|r| {
            let mut rule = parse_rule_text(&r.text, table).map_err(|d| bad("rule", &r.text, d))?;
            rule.origin = r.origin;
            rule.label = r.label.as_deref().map(Symbol::new);
            Ok(rule)
        })
        .collect()
}

/// Parses a knowledge base written by [`to_json`].
pub fn from_json(text: &str) -> Result<KnowledgeBase, KbFileError> {
    let record: KbRecord = serde_json::from_str(text).map_err(|e| KbFileError::Format(e.to_string()))?;
    if record.format != FORMAT {
        return Err(KbFileError::Format(format!("not a knowledge-base file (format `{}`)", record.format)));
    }
    if record.version != VERSION {
        return Err(KbFileError::Format(format!("unsupported version {}", record.version)));
    }
    let mut table = PredicateTable::new();
    for (name, camel, arity) in &record.predicates {
        table
            .insert(Predicate::new(name, camel, *arity, Layer::Base))
            .map_err(|e| KbFileError::Format(e.to_string()))?;
    }
    let facts = record.facts.iter().map(|t| literal(t, &table)).collect::<Result<Vec<_>, _>>()?;
    let disjunctions = record
        .disjunctions
        .iter()
        .map(|d| disjunction(d, &table))
        .collect::<Result<Vec<_>, _>>()?;
    let default_rules = rules(&record.rules, &mut table)?;
    let mut variants = BTreeMap::new();
    for (name, rs) in &record.variants {
        variants.insert(name.clone(), rules(rs, &mut table)?);
    }
    let constraints = generate_cardinality_rules(&facts, &record.pragmas).constraints;
    let program = Program {
        predicates: table,
        facts,
        disjunctions,
        rules: default_rules,
        constraints,
        pragmas: record.pragmas,
        variants,
    };

    let journal = record
        .journal
        .iter()
        .map(|c| match c {
            ChangeRecord::Assert(t) => literal(t, &program.predicates).map(Change::Assert),
            ChangeRecord::Retract(t) => literal(t, &program.predicates).map(Change::Retract),
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut states = BTreeMap::new();
    for name in program.ruleset_names() {
        let s = record
            .stores
            .get(&name)
            .ok_or_else(|| KbFileError::Format(format!("no store for rule set `{name}`")))?;
        let mut store = FactStore::new();
        for t in &s.literals {
            store.insert(&literal(t, &program.predicates)?);
        }
        for d in &s.disjunctions {
            store.insert_disjunction(disjunction(d, &program.predicates)?);
        }
        store.mark_all_stable();
        let mut provenance = BTreeMap::new();
        for (a, p) in &s.provenance {
            provenance.insert(literal(a, &program.predicates)?.atom, p.clone());
        }
        states.insert(name, Materialized { store, provenance, stats: Default::default() });
    }
    if !states.contains_key(&record.active) {
        return Err(KbFileError::Format(format!("active rule set `{}` is not compiled", record.active)));
    }
    Ok(KnowledgeBase::from_parts(program, states, record.active, journal))
}

/// An advisory lock on a knowledge-base file, held until dropped. It is
/// taken on a `.lock` file beside the knowledge base, since saving
/// replaces the file itself.
pub struct KbLock {
    _file: File,
}

fn lock_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".lock");
    path.with_file_name(name)
}

/// Blocks until the lock is held: shared for readers, exclusive for writers.
/// A shared lock requires the knowledge base to exist.
pub fn lock(path: &Path, exclusive: bool) -> Result<KbLock, KbFileError> {
    if !exclusive && !path.exists() {
        return Err(KbFileError::io(path, io::Error::from(io::ErrorKind::NotFound)));
    }
    let lp = lock_path(path);
    let file = OpenOptions::new()
        .create(true)
        .truncate(false)
        .write(true)
        .open(&lp)
        .map_err(|e| KbFileError::io(&lp, e))?;
    let locked = if exclusive { file.lock() } else { file.lock_shared() };
    locked.map_err(|e| KbFileError::io(&lp, e))?;
    Ok(KbLock { _file: file })
}

pub fn load(path: &Path) -> Result<KnowledgeBase, KbFileError> {
    let text = fs::read_to_string(path).map_err(|e| KbFileError::io(path, e))?;
    from_json(&text)
}

/// Writes to a temporary file in the same directory, then renames it over
/// `path`, so a failed save leaves the old file intact.
pub fn save(kb: &KnowledgeBase, path: &Path) -> Result<(), KbFileError> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let write = || -> io::Result<()> {
        let mut f = File::create(&tmp)?;
        f.write_all(to_json(kb).as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        KbFileError::io(path, e)
    })
}
