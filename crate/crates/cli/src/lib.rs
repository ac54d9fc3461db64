//! Library side of the command-line front end: building and solving
//! instances, the repeat-until-stable benchmark protocol, ratio summaries,
//! and the verification driver.

pub mod bench;
pub mod run;
pub mod suite;
pub mod verify;

pub use bench::{bench_suite, BenchConfig, BenchResults, RatioSummary};
pub use run::{run_instance, BrancherChoice, RunRecord, SolveConfig};
pub use suite::{default_suite, parse_suite, SuiteEntry};
pub use verify::{run_verify, VerifyOutcome};

/// Default seed for randomized verification tiers; the BOXVIEW_SEED
/// environment variable overrides it.
pub fn default_seed() -> u64 {
    std::env::var("BOXVIEW_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0x0b0e5eed)
}
