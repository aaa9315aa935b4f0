pub mod ingest;
pub mod model;
pub mod predicate;
pub mod program;
pub mod store;
pub mod symbol;
pub mod term;
pub mod translator;
pub mod axioms;
pub mod engine;
pub mod compile;
pub mod emit;
pub mod minimizer;
