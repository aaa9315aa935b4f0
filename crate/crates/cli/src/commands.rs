use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use owlhorn::compile::{compile as compile_docs, CompileOptions, Compiled, Document};
use owlhorn::emit::{emit, EmitOptions};
use owlhorn::engine::kbfile::{self, KbFileError};
use owlhorn::engine::{EngineError, KnowledgeBase};
use owlhorn::ingest::{parse_fact, parse_query, Diagnostic, DiagnosticKind, Dialect};
use owlhorn::minimizer::{self, parse_manifest, Manifest};
use owlhorn::model::{Polarity, RuleOrigin};
use owlhorn::program::Program;
use owlhorn::store::TruthValue;

use crate::Sources;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

type Outcome = Result<(), Failure>;

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }

    fn inconsistent() -> Failure {
        Failure::new(1, "")
    }

    fn malformed(message: impl Into<String>) -> Failure {
        Failure::new(2, message)
    }

    fn io(path: &Path, e: std::io::Error) -> Failure {
        Failure::new(5, format!("{}: {e}", path.display()))
    }

    /// Prints every diagnostic; the code is 3 if any construct is
    /// unsupported and 2 otherwise.
    fn diagnostics(diags: &[Diagnostic]) -> Failure {
        for d in diags {
            eprintln!("{d}");
        }
        let unsupported = diags.iter().any(|d| d.kind == DiagnosticKind::Unsupported);
        let n = diags.len();
        let noun = if n == 1 { "error" } else { "errors" };
        Failure::new(if unsupported { 3 } else { 2 }, format!("{n} {noun}"))
    }
}

impl From<KbFileError> for Failure {
    fn from(e: KbFileError) -> Failure {
        Failure::new(5, e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Failure {
        let code = match e {
            EngineError::Capacity { .. } => 6,
            EngineError::UnknownRuleset(_) => 4,
            EngineError::Rejected(_) => 2,
        };
        Failure::new(code, e.to_string())
    }
}

fn ms(start: Instant) -> String {
    format!("{:.1} ms", start.elapsed().as_secs_f64() * 1000.0)
}

fn plural(n: usize, word: &str) -> String {
    match (n, word.strip_suffix('y')) {
        (1, _) => format!("1 {word}"),
        (_, Some(stem)) => format!("{n} {stem}ies"),
        _ => format!("{n} {word}s"),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn document(path: &Path, dialect: Option<Dialect>) -> Result<Document, Failure> {
    let text = read(path)?;
    let dialect = dialect
        .or_else(|| Dialect::from_extension(path))
        .unwrap_or_else(|| Dialect::sniff(&text));
    Ok(Document::new(&path.display().to_string(), &text, dialect))
}

fn split_pair<'a>(text: &'a str, what: &str) -> Result<(&'a str, &'a str), Failure> {
    text.split_once('=')
        .filter(|(k, v)| !k.is_empty() && !v.is_empty())
        .ok_or_else(|| Failure::malformed(format!("{what} `{text}` is not NAME=VALUE")))
}

fn build_program(sources: &Sources) -> Result<Compiled, Failure> {
    let docs = sources
        .inputs
        .iter()
        .map(|p| document(p, sources.dialect))
        .collect::<Result<Vec<_>, _>>()?;
    let mut options = CompileOptions::default();
    for p in &sources.pragmas {
        let (k, v) = split_pair(p, "pragma")?;
        options.pragmas.push((k.to_owned(), v.to_owned()));
    }
    for r in &sources.rulesets {
        let (name, files) = split_pair(r, "rule set")?;
        let vdocs = files
            .split(',')
            .map(|f| document(&PathBuf::from(f), sources.dialect))
            .collect::<Result<Vec<_>, _>>()?;
        options.variants.push((name.to_owned(), vdocs));
    }
    let compiled = compile_docs(&docs, &options).map_err(|d| Failure::diagnostics(&d))?;
    for d in &compiled.diagnostics {
        eprintln!("{d}");
    }
    Ok(compiled)
}

fn load_manifest(path: &Path, program: &Program) -> Result<Manifest, Failure> {
    let name = path.display().to_string();
    parse_manifest(&read(path)?, &program.predicates).map_err(|diags| {
        let diags: Vec<Diagnostic> = diags.into_iter().map(|d| d.in_file(&name)).collect();
        Failure::diagnostics(&diags)
    })
}

fn describe(program: &Program) -> String {
    let generated = program.count_by_origin(RuleOrigin::CardinalityGenerated);
    format!(
        "{}, {}, {} ({} user, {} generated)",
        plural(program.facts.len(), "fact"),
        plural(program.disjunctions.len(), "disjunction"),
        plural(program.rules.len(), "rule"),
        program.user_rule_count(),
        generated,
    )
}

fn report_inconsistencies(kb: &KnowledgeBase, ruleset: &str) -> usize {
    let mut view = kb.clone();
    if view.swap(ruleset).is_err() {
        return 0;
    }
    let found = view.check_consistency();
    for i in &found {
        eprintln!("{ruleset}: {i}");
    }
    found.len()
}

pub fn compile(sources: &Sources, output: &Path, manifest: Option<&Path>, strict: bool) -> Outcome {
    let start = Instant::now();
    let mut program = build_program(sources)?.program;
    println!("compiled {} in {}: {}", plural(sources.inputs.len(), "document"), ms(start), describe(&program));
    if let Some(path) = manifest {
        let m = load_manifest(path, &program)?;
        let min = minimizer::minimize(&program, &m);
        for a in &min.analyses {
            println!("minimized {}: {} -> {} rules", a.ruleset, a.kept.len() + a.dropped.len(), a.kept.len());
        }
        program = min.program;
    }
    let start = Instant::now();
    let names = program.ruleset_names();
    let kb = KnowledgeBase::build(program)?;
    println!("materialized {} in {}", plural(names.len(), "rule set"), ms(start));
    for name in &names {
        let state = kb.state(name).expect("every rule set is materialized");
        println!(
            "  {name}: {}, {} in {}",
            plural(state.store.len(), "fact"),
            plural(state.store.disjunctions().len(), "disjunction"),
            plural(state.stats.rounds, "round"),
        );
    }
    let inconsistent: usize = names.iter().map(|n| report_inconsistencies(&kb, n)).sum();
    if inconsistent > 0 {
        eprintln!("{} found", plural(inconsistent, "inconsistency"));
        if strict {
            return Err(Failure::inconsistent());
        }
    }
    let _lock = kbfile::lock(output, true)?;
    kbfile::save(&kb, output)?;
    println!("wrote {}", output.display());
    Ok(())
}

fn load_shared(path: &Path) -> Result<KnowledgeBase, Failure> {
    let _lock = kbfile::lock(path, false)?;
    Ok(kbfile::load(path)?)
}

fn bad_pattern(d: Diagnostic) -> Failure {
    Failure::malformed(d.message)
}

pub fn query(path: &Path, pattern: &str) -> Outcome {
    let kb = load_shared(path)?;
    let q = parse_query(pattern, &kb.program().predicates).map_err(bad_pattern)?;
    let answers = kb.query(&q);
    if q.atom.is_ground() {
        println!("{}", if answers.is_empty() { "no" } else { "yes" });
        return Ok(());
    }
    for a in answers {
        let parts: Vec<String> = a.iter().map(|(v, t)| format!("{v} = {t}")).collect();
        println!("{}", parts.join(", "));
    }
    Ok(())
}

pub fn truth(path: &Path, atom: &str) -> Outcome {
    let kb = load_shared(path)?;
    let l = parse_fact(atom, &kb.program().predicates).map_err(bad_pattern)?;
    let value = match (kb.truth_value(&l.atom), l.polarity) {
        (TruthValue::True, Polarity::Negative) => TruthValue::False,
        (TruthValue::False, Polarity::Negative) => TruthValue::True,
        (v, _) => v,
    };
    println!("{value}");
    Ok(())
}

pub fn change(path: &Path, fact: &str, assert: bool) -> Outcome {
    let _lock = kbfile::lock(path, true)?;
    let mut kb = kbfile::load(path)?;
    let l = parse_fact(fact, &kb.program().predicates).map_err(bad_pattern)?;
    let start = Instant::now();
    let outcome = if assert { kb.assert(l.clone())? } else { kb.retract(l.clone())? };
    let verb = if assert { "asserted" } else { "retracted" };
    if let Some(w) = &outcome.warning {
        eprintln!("warning: {w}");
    }
    if !outcome.applied {
        println!("{verb} nothing: `{l}` unchanged");
        return Ok(());
    }
    println!("{verb} `{l}`: {:+} facts in {}", outcome.delta, ms(start));
    kbfile::save(&kb, path)?;
    Ok(())
}

pub fn swap(path: &Path, ruleset: &str) -> Outcome {
    let _lock = kbfile::lock(path, true)?;
    let mut kb = kbfile::load(path)?;
    if kb.swap(ruleset)? {
        kbfile::save(&kb, path)?;
        println!("active rule set: {ruleset}");
    } else {
        println!("rule set {ruleset} is already active");
    }
    Ok(())
}

pub fn check(path: &Path) -> Outcome {
    let kb = load_shared(path)?;
    let found = kb.check_consistency();
    if found.is_empty() {
        println!("consistent");
        return Ok(());
    }
    for i in &found {
        println!("{i}");
    }
    Err(Failure::inconsistent())
}

pub fn minimize(sources: &Sources, manifest: &Path, verbose: bool) -> Outcome {
    let program = build_program(sources)?.program;
    let m = load_manifest(manifest, &program)?;
    let min = minimizer::minimize(&program, &m);
    for a in &min.analyses {
        println!("{}: kept {} of {} rules", a.ruleset, a.kept.len(), a.kept.len() + a.dropped.len());
        for r in &a.dropped {
            let label = r.label.map(|l| format!("  % {l}")).unwrap_or_default();
            println!("  - {r}{label}");
        }
        if verbose {
            for r in &a.kept {
                println!("  + {r}");
            }
        }
    }
    Ok(())
}

fn looks_like_kb(path: &Path) -> Result<bool, Failure> {
    Ok(read(path)?.trim_start().starts_with('{'))
}

pub fn emit_prolog(
    sources: &Sources,
    all_rules: bool,
    ruleset: Option<String>,
    three_case: bool,
    output: Option<&Path>,
) -> Outcome {
    let program = match sources.inputs.as_slice() {
        [one] if looks_like_kb(one)? => {
            let kb = load_shared(one)?;
            let mut p = kb.program().clone();
            p.facts = kb.stated_facts().into_iter().collect();
            p
        }
        _ => build_program(sources)?.program,
    };
    if let Some(name) = &ruleset {
        if program.rules_for(name).is_none() {
            return Err(EngineError::UnknownRuleset(name.clone()).into());
        }
    }
    let text = emit(&program, &EmitOptions { all_rules, ruleset, three_case_member: three_case });
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
