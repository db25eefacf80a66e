//! Corpus ingestion, configuration, experiment runs and report files.

pub mod config;
pub mod experiment;
pub mod ingest;
pub mod report;
pub mod synth;

pub use config::{Engine, ExperimentConfig};
pub use experiment::{run_experiment, run_queries, Corpus, QueryRow, RunReport};
pub use ingest::{ingest, Ingested};
pub use report::{read_report, write_report, ReportPaths};
pub use synth::{generate, SynthConfig, SynthCorpus};
