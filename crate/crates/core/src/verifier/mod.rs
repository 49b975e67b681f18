//! Case analysis, bound checking, and fuzzing.

pub mod analyze;
pub mod checks;
pub mod fuzz;

use serde::Serialize;

pub use analyze::{analyze_case, EngineConfig, InvariantReport, Regime, SectionSummary};
pub use checks::{check_identities, check_inequalities, verify_report, CheckRecord, CheckStatus, Relation, VerificationVerdict};
pub use fuzz::{fuzz, fuzz_case, shrink, summarize, Fault, FuzzCaseResult, FuzzCaseStatus, FuzzParams, FuzzSummary};

use crate::bounds::BoundLedger;
use crate::error::Result;
use crate::hilbert::FiltrationSpec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseOutcome {
    pub report: InvariantReport,
    pub ledger: BoundLedger,
    pub verdict: VerificationVerdict,
}

/// Analyzes, builds the ledger, and checks one case.
pub fn verify_case(spec: &FiltrationSpec, cfg: &EngineConfig) -> Result<CaseOutcome> {
    verify_case_with(spec, cfg, None)
}

/// As [`verify_case`], corrupting the report with `fault` before checking.
pub fn verify_case_with(spec: &FiltrationSpec, cfg: &EngineConfig, fault: Option<Fault>) -> Result<CaseOutcome> {
    let mut report = analyze_case(spec, cfg)?;
    if let Some(f) = fault {
        f.apply(&mut report);
    }
    let ledger = BoundLedger::build(&report.bound_inputs())?;
    let verdict = verify_report(&report, &ledger);
    Ok(CaseOutcome { report, ledger, verdict })
}
