//! Seeded experiment suites, their configuration and report emission.

pub mod config;
pub mod report;
mod suites;

use std::time::Instant;

pub use config::{BasisConfig, ExperimentConfig, SUITES};
pub use report::{
    canonical_json, digest_values, emit_report, format_g17, write_atomic, CaseRecord, Check, ExperimentReport,
    ReportFormat, Summary, CSV_FIXED_COLUMNS, SCHEMA_VERSION,
};
pub use suites::{
    BOUNDEDNESS_KEYS, COMPOSITION_SAMPLES, FRACTIONAL_ALPHA, H1B_ATOMS, H1B_RATIOS, IDENTITY_OPERATORS_1D,
    IDENTITY_OPERATORS_2D, KCLASS_B_COUNT, LAMBDA_BAND, MOLECULE_EPSILON, PDELTA_PAIRS, PROBE_EXPONENTS,
    SANDWICH_OPERATORS,
};

use crate::error::Result;

/// Runs the configured suite. Cases are deterministic in `root_seed`;
/// only `wall_time_s` varies between runs.
pub fn run_suite(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let out = match config.suite.as_str() {
        "reconstruction" => suites::reconstruction(config),
        "product_identity" => suites::product_identity(config),
        "commutator_identity" => suites::commutator_identity(config),
        "sandwich" => suites::sandwich(config),
        "boundedness_sweep" => suites::boundedness_sweep(config),
        "h1b_equivalence" => suites::h1b_equivalence(config),
        "unboundedness_probe" => suites::unboundedness_probe(config),
        "almost_diagonal" => suites::almost_diagonal(config),
        "molecule" => suites::molecule(config),
        "fractional" => suites::fractional(config),
        "atomic_decomposition" => suites::atomic_decomposition(config),
        _ => unreachable!("validated suite name"),
    }?;
    let mut report = ExperimentReport::empty(config.clone());
    report.cases = out.cases;
    report.summary = out.summary;
    let failed_cases = report.cases.iter().filter(|c| !c.pass).count();
    if failed_cases > 0 {
        report.summary.notes.push(format!("{failed_cases} of {} cases failed", report.cases.len()));
    }
    if report.cases.is_empty() {
        report.summary.notes.push("no cases".into());
    }
    report.summary.pass =
        !report.cases.is_empty() && failed_cases == 0 && report.summary.checks.iter().all(|c| c.pass);
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}
