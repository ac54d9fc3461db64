//! The verification driver: runs every validation suite and renders the
//! machine-readable completeness matrix.

use boxview_core::verify::{
    approximation_laws, dispatch_equivalence, idempotency_audit, propagator_matrix,
    taxonomy_reproduction, variant_equivalence, view_conformance, MatrixRow, SuiteReport,
};
use serde::Serialize;

#[derive(Debug)]
pub struct VerifyOutcome {
    pub suites: Vec<SuiteReport>,
    pub matrix: Vec<MatrixRow>,
    pub failing: usize,
}

/// One JSON line per (propagator, constraint, phi, psi) combination.
#[derive(Serialize)]
struct MatrixLine<'a> {
    name: &'a str,
    phi: &'a str,
    psi: &'a str,
    contracting: bool,
    sound: bool,
    complete: bool,
    counterexample: Option<&'a str>,
}

pub fn matrix_json_line(row: &MatrixRow) -> String {
    let line = MatrixLine {
        name: &row.name,
        phi: &format!("{:?}", row.phi).to_lowercase(),
        psi: &format!("{:?}", row.psi).to_lowercase(),
        contracting: row.contracting,
        sound: row.sound,
        complete: row.complete,
        counterexample: row.counterexample.as_deref(),
    };
    serde_json::to_string(&line).expect("matrix line serializes")
}

/// Runs the full verification battery. `bound` scales the randomized tiers;
/// `seed` drives them.
pub fn run_verify(bound: u64, seed: u64) -> boxview_core::Result<VerifyOutcome> {
    let mut suites = Vec::new();

    suites.push(approximation_laws(bound.max(50), seed));
    suites.push(taxonomy_reproduction());
    suites.push(view_conformance());
    suites.push(dispatch_equivalence(bound.max(30).min(200), seed));

    // the completeness matrix, including the deliberately broken fixture
    // that proves the checker catches unsound propagation
    let rows = propagator_matrix(true)?;
    let mut matrix_suite = SuiteReport::new("propagator-matrix");
    for row in &rows {
        if row.name.contains("fixture") {
            matrix_suite.check(!row.sound, || {
                format!("{}: checker failed to flag the injected fault", row.name)
            });
            if let Some(ce) = &row.counterexample {
                matrix_suite.note(format!("fault fixture counterexample: {ce}"));
            }
        } else {
            matrix_suite.check(row.passed(), || {
                format!("{}: {:?}", row.name, row.counterexample)
            });
        }
    }
    suites.push(matrix_suite);

    suites.push(idempotency_audit((bound * 100).max(10_000), seed));

    let (variants_suite, _) = variant_equivalence();
    suites.push(variants_suite);

    let failing = suites.iter().filter(|s| !s.passed).count();
    Ok(VerifyOutcome { suites, matrix: rows, failing })
}
