//! Library surface of the `qduo` CLI: the scenario language, report
//! documents, and the runner. The binary in `main.rs` is a thin wrapper, so
//! integration tests drive everything through these modules.

pub mod report;
pub mod run;
pub mod scenario;

pub use report::Report;
pub use run::{exit_code_for, run_scenario_text, CliError, Flags};
