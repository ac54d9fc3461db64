//! Validation suites shared by the test harness and the CLI `verify`
//! subcommand. Each suite returns a structured report so callers can print
//! or assert on it.

mod audit;
mod conformance;
mod dispatch;
mod laws;
mod matrix;
mod taxonomy;
mod variants;

pub use audit::idempotency_audit;
pub use conformance::view_conformance;
pub use dispatch::dispatch_equivalence;
pub use laws::approximation_laws;
pub use matrix::{propagator_matrix, MatrixRow};
pub use taxonomy::taxonomy_reproduction;
pub use variants::{desk_instances, fails_ratio_range, variant_equivalence, VariantComparison};

/// Outcome of one validation suite.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: Vec<String>,
    /// Human-readable evidence lines (witnesses, per-edge summaries).
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn new(name: &str) -> SuiteReport {
        SuiteReport {
            name: name.to_string(),
            passed: true,
            cases: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn case(&mut self) {
        self.cases += 1;
    }

    pub fn fail(&mut self, msg: String) {
        self.passed = false;
        if self.failures.len() < 32 {
            self.failures.push(msg);
        }
    }

    pub fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(msg());
        }
    }

    pub fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }
}
