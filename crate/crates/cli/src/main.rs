//! `owlhorn`: compile ontologies and rules into a materialized knowledge
//! base, then query and change it.
//!
//! Exit codes: 0 success, 1 inconsistent (`check`, or `compile --strict`),
//! 2 malformed input, 3 unsupported construct, 4 unknown rule set,
//! 5 I/O or knowledge-base file error, 6 engine limit exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use owlhorn::ingest::Dialect;

#[derive(Parser)]
#[command(name = "owlhorn", version, about = "Compile OWL, SWRL and RuleML into a materialized Horn-clause knowledge base")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
pub struct Sources {
    /// Input files; the dialect follows the extension (.owl/.rdf, .swrl, .ruleml, .pl) or the content.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Read every input in this dialect: owl, swrl, ruleml or native.
    #[arg(long)]
    pub dialect: Option<Dialect>,
    /// Pragma override, as NAME=VALUE.
    #[arg(long = "pragma", value_name = "NAME=VALUE")]
    pub pragmas: Vec<String>,
    /// Rule-set variant, as NAME=FILE[,FILE...]; may be repeated.
    #[arg(long = "ruleset", value_name = "NAME=FILES")]
    pub rulesets: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compile inputs and write a materialized knowledge-base file.
    Compile {
        #[command(flatten)]
        sources: Sources,
        /// Knowledge-base file to write.
        #[arg(short, long)]
        output: PathBuf,
        /// Drop rules the manifest's queries can never observe.
        #[arg(long, requires = "manifest")]
        minimize: bool,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Fail with exit code 1, writing nothing, if any rule set is inconsistent.
        #[arg(long)]
        strict: bool,
    },
    /// Print the bindings that make a pattern true, one per line.
    Query { kb: PathBuf, pattern: String },
    /// Print TRUE, FALSE, UNKNOWN or INCONSISTENT for a ground atom.
    Truth { kb: PathBuf, atom: String },
    /// Add a Base-layer fact and rematerialize.
    Assert { kb: PathBuf, fact: String },
    /// Remove a Base-layer fact and rematerialize.
    Retract { kb: PathBuf, fact: String },
    /// Make another compiled rule set active.
    Swap { kb: PathBuf, ruleset: String },
    /// List the inconsistencies of the active rule set.
    Check { kb: PathBuf },
    /// Report which rules each rule set keeps under a manifest.
    Minimize {
        #[command(flatten)]
        sources: Sources,
        #[arg(long)]
        manifest: PathBuf,
        /// Also list the rules kept.
        #[arg(long)]
        verbose: bool,
    },
    /// Print a program, or a knowledge base's program, as logic-program text.
    EmitProlog {
        /// A knowledge-base file, or source files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        dialect: Option<Dialect>,
        #[arg(long = "pragma", value_name = "NAME=VALUE")]
        pragmas: Vec<String>,
        #[arg(long = "ruleset-file", value_name = "NAME=FILES")]
        rulesets: Vec<String>,
        /// Include general and generated rules.
        #[arg(long)]
        all_rules: bool,
        /// Rule set to write instead of the default.
        #[arg(long)]
        ruleset: Option<String>,
        /// Spell the member relation in three cases, as Prolog sources do.
        #[arg(long)]
        three_case: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compile { sources, output, minimize, manifest, strict } => {
            commands::compile(&sources, &output, manifest.as_deref().filter(|_| minimize), strict)
        }
        Command::Query { kb, pattern } => commands::query(&kb, &pattern),
        Command::Truth { kb, atom } => commands::truth(&kb, &atom),
        Command::Assert { kb, fact } => commands::change(&kb, &fact, true),
        Command::Retract { kb, fact } => commands::change(&kb, &fact, false),
        Command::Swap { kb, ruleset } => commands::swap(&kb, &ruleset),
        Command::Check { kb } => commands::check(&kb),
        Command::Minimize { sources, manifest, verbose } => commands::minimize(&sources, &manifest, verbose),
        Command::EmitProlog { inputs, dialect, pragmas, rulesets, all_rules, ruleset, three_case, output } => {
            let sources = Sources { inputs, dialect, pragmas, rulesets };
            commands::emit_prolog(&sources, all_rules, ruleset, three_case, output.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("owlhorn: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
