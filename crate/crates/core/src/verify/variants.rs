//! Cross-variant equivalence on desk-scale instances: every decomposition of
//! the same instance must find exactly the same solutions; fail counts may
//! differ only within the small factor that weaker view propagation admits.

use std::collections::BTreeMap;

use crate::engine::{branch_and_bound_min, dfs, Brancher, SearchMode};
use crate::error::Result;
use crate::models::{BuildOptions, InstanceSpec, Metric, ModelVariant};
use crate::verify::SuiteReport;

#[derive(Clone, Debug)]
pub struct VariantComparison {
    pub instance: String,
    pub solutions: u64,
    pub fails: BTreeMap<&'static str, u64>,
    pub objective: Option<i64>,
}

pub fn desk_instances() -> Vec<InstanceSpec> {
    vec![
        InstanceSpec::Linear { n: 4, d: 3, c: 2, a: 2, seed: 5 },
        InstanceSpec::Linear { n: 5, d: 2, c: 3, a: 3, seed: 11 },
        InstanceSpec::Nonlinear { n: 4, d: 2, c: 1, a1: 2, a2: 2, seed: 7 },
        InstanceSpec::Nonlinear { n: 5, d: 2, c: 2, a1: 2, a2: 2, seed: 3 },
        InstanceSpec::Golfers { w: 2, g: 2, s: 2 },
        InstanceSpec::Golomb { m: 4, length: 6 },
        InstanceSpec::Golomb { m: 4, length: 5 },
        InstanceSpec::Labs { n: 5 },
        InstanceSpec::Ecc { a: 2, n: 2, l: 3, d: 2, metric: Metric::Hamming },
        InstanceSpec::Ecc { a: 3, n: 2, l: 2, d: 2, metric: Metric::Lee },
    ]
}

fn solve_all(
    spec: &InstanceSpec,
    variant: ModelVariant,
) -> Result<(Vec<Vec<i64>>, u64, Option<i64>)> {
    let mut m = spec.build(variant, &BuildOptions::default())?;
    let b = Brancher::input_order_min(m.decision_vars.clone());
    let vars = m.decision_vars.clone();
    if let Some(obj) = m.objective.clone() {
        let out = branch_and_bound_min(&mut m.store, &obj, &b, None)?;
        let sols = out.best_solution.map(|s| vec![s]).unwrap_or_default();
        Ok((sols, out.stats.fails, out.best_objective))
    } else {
        let mut sols = Vec::new();
        let out = dfs(&mut m.store, &b, SearchMode::AllSolutions, None, &mut |dom| {
            sols.push(vars.iter().map(|&v| dom.min(v)).collect::<Vec<i64>>());
        })?;
        sols.sort();
        Ok((sols, out.stats.fails, None))
    }
}

/// Solves every desk instance under every allowed variant and compares
/// solution sets (satisfaction) or optima (optimization).
pub fn variant_equivalence() -> (SuiteReport, Vec<VariantComparison>) {
    let mut r = SuiteReport::new("variant-equivalence");
    let mut comparisons = Vec::new();
    for spec in desk_instances() {
        let mut reference: Option<Vec<Vec<i64>>> = None;
        let mut ref_obj: Option<Option<i64>> = None;
        let mut fails = BTreeMap::new();
        let mut solutions = 0u64;
        for variant in spec.allowed_variants() {
            match solve_all(&spec, variant) {
                Ok((sols, f, obj)) => {
                    fails.insert(variant.name(), f);
                    solutions = sols.len() as u64;
                    if spec.is_optimization() {
                        match &ref_obj {
                            None => ref_obj = Some(obj),
                            Some(o) => r.check(*o == obj, || {
                                format!(
                                    "{}: optimum differs under {} ({o:?} vs {obj:?})",
                                    spec.id(),
                                    variant.name()
                                )
                            }),
                        }
                    } else {
                        match &reference {
                            None => reference = Some(sols),
                            Some(rs) => r.check(rs == &sols, || {
                                format!("{}: solutions differ under {}", spec.id(), variant.name())
                            }),
                        }
                    }
                }
                Err(e) => r.fail(format!("{} under {}: {e}", spec.id(), variant.name())),
            }
        }
        comparisons.push(VariantComparison {
            instance: spec.id(),
            solutions,
            fails,
            objective: ref_obj.flatten(),
        });
    }
    (r, comparisons)
}

/// Fail-count ratio between the view and the auxiliary-variable models on
/// instances where they differ: views never fail less, and not much more.
pub fn fails_ratio_range(comparisons: &[VariantComparison]) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for c in comparisons {
        let views = ["views-static", "views-static-global"]
            .iter()
            .filter_map(|n| c.fails.get(n))
            .min()
            .copied();
        let vars = ["vars", "vars-global"]
            .iter()
            .filter_map(|n| c.fails.get(n))
            .min()
            .copied();
        if let (Some(v), Some(a)) = (views, vars) {
            if v != a && a > 0 {
                out.push((c.instance.clone(), v as f64 / a as f64));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_desk_instances_agree_across_variants() {
        let (r, comparisons) = variant_equivalence();
        assert!(r.passed, "failures: {:?}", r.failures);
        // where fail counts differ, views fail at least as often but within
        // the documented margin
        for (instance, ratio) in fails_ratio_range(&comparisons) {
            assert!(
                (1.0..=1.25).contains(&ratio),
                "{instance}: views/vars fail ratio {ratio} outside [1.00, 1.25]"
            );
        }
    }
}
