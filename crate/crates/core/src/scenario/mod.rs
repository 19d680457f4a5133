//! JSON-configured runs of the inequality suites with JSON-lines and CSV
//! output.

pub mod config;
pub mod run;

pub use config::{parse_scenario, Scenario, Source, SUITES};
pub use run::{load_scenario, run_scenario, Record, RunOptions, ScenarioOutput, SummaryRow};
