//! Batch front end: initial data, experiment plans, verification suites and reports.

mod initial;
mod plan;
mod run;
pub mod suites;
mod trace;

pub use initial::{generate_initial_data, InitialData, InitialKind};
pub use plan::{Assertions, ExperimentPlan, Overrides, Scenario};
pub use run::{run_plan, write_traceability, AssertionResult, RunReport};
pub use suites::{run_suite, suite_by_name, SuiteContext, SuiteInfo, SuiteOutcome, SUITES};
pub use trace::{traceability_report, TraceRow, TraceabilityReport, NOT_YET_RUN};
