//! Building and solving one (instance, variant) pair into a run record.

use std::time::{Duration, Instant};

use boxview_core::engine::{branch_and_bound_min, dfs, Brancher, SearchMode, ValRule, VarRule};
use boxview_core::models::{BuildOptions, InstanceSpec, ModelVariant};
use boxview_core::Result;
use serde::Serialize;

/// One solver run, mirroring the monitoring-table columns plus a status.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub problem: String,
    pub instance: String,
    pub variant: String,
    pub status: String,
    pub time_ms: u64,
    pub propagations: u64,
    pub fails: u64,
    pub domain_updates: u64,
    pub view_calls: u64,
    pub arith_ops: u64,
    pub solutions: u64,
    pub objective: Option<i64>,
}

impl RunRecord {
    pub fn csv_header() -> &'static str {
        "problem,instance,variant,status,time_ms,propagations,fails,domain_updates,view_calls,arith_ops,solutions,objective"
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.problem,
            self.instance,
            self.variant,
            self.status,
            self.time_ms,
            self.propagations,
            self.fails,
            self.domain_updates,
            self.view_calls,
            self.arith_ops,
            self.solutions,
            self.objective.map(|o| o.to_string()).unwrap_or_default(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BrancherChoice {
    InputMin,
    InputBisect,
    FirstFailMin,
    FirstFailBisect,
}

impl BrancherChoice {
    pub fn parse(s: &str) -> Option<BrancherChoice> {
        match s {
            "input-min" => Some(BrancherChoice::InputMin),
            "input-bisect" => Some(BrancherChoice::InputBisect),
            "firstfail-min" => Some(BrancherChoice::FirstFailMin),
            "firstfail-bisect" => Some(BrancherChoice::FirstFailBisect),
            _ => None,
        }
    }

    fn rules(self) -> (VarRule, ValRule) {
        match self {
            BrancherChoice::InputMin => (VarRule::InputOrder, ValRule::MinValue),
            BrancherChoice::InputBisect => (VarRule::InputOrder, ValRule::Bisect),
            BrancherChoice::FirstFailMin => (VarRule::FirstFail, ValRule::MinValue),
            BrancherChoice::FirstFailBisect => (VarRule::FirstFail, ValRule::Bisect),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub brancher: BrancherChoice,
    pub time_limit: Option<Duration>,
    pub build: BuildOptions,
    pub view_cache: bool,
    /// Collect every solution instead of stopping at the first.
    pub all_solutions: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            brancher: BrancherChoice::InputMin,
            time_limit: None,
            build: BuildOptions::default(),
            view_cache: true,
            all_solutions: false,
        }
    }
}

/// Builds and solves; returns the record plus the model dump (for the dump
/// flags).
pub fn run_instance(
    spec: &InstanceSpec,
    variant: ModelVariant,
    cfg: &SolveConfig,
) -> Result<(RunRecord, String)> {
    let mut model = spec.build(variant, &cfg.build)?;
    model.store.dom_mut().set_cache_enabled(cfg.view_cache);
    let (var_rule, val_rule) = cfg.brancher.rules();
    let brancher = Brancher { vars: model.decision_vars.clone(), var_rule, val_rule };
    let deadline = cfg.time_limit.map(|d| Instant::now() + d);

    let (status, stats, objective) = if let Some(obj) = model.objective.clone() {
        let out = branch_and_bound_min(&mut model.store, &obj, &brancher, deadline)?;
        let status = if !out.complete {
            "timeout"
        } else if out.best_objective.is_some() {
            "optimal"
        } else {
            "unsat"
        };
        (status, out.stats, out.best_objective)
    } else {
        let mode = if cfg.all_solutions {
            SearchMode::AllSolutions
        } else {
            SearchMode::FirstSolution
        };
        let out = dfs(&mut model.store, &brancher, mode, deadline, &mut |_| {})?;
        let status = if !out.complete {
            "timeout"
        } else if out.stats.solutions > 0 {
            "sat"
        } else {
            "unsat"
        };
        (status, out.stats, None)
    };

    let record = RunRecord {
        problem: spec.problem().to_string(),
        instance: spec.id(),
        variant: variant.name().to_string(),
        status: status.to_string(),
        time_ms: stats.time_ms,
        propagations: stats.propagations,
        fails: stats.fails,
        domain_updates: stats.domain_updates,
        view_calls: stats.view_calls,
        arith_ops: stats.arith_ops,
        solutions: stats.solutions,
        objective,
    };
    Ok((record, model.dump))
}

#[cfg(test)]
mod tests {
    use super::*;
    use boxview_core::models::Metric;

    #[test]
    fn golomb_decision_answers() {
        let sat = InstanceSpec::Golomb { m: 5, length: 11 };
        let (r, _) = run_instance(&sat, ModelVariant::ViewsStatic, &Default::default()).unwrap();
        assert_eq!(r.status, "sat");

        let unsat = InstanceSpec::Golomb { m: 5, length: 10 };
        let (r, _) = run_instance(&unsat, ModelVariant::Vars, &Default::default()).unwrap();
        assert_eq!(r.status, "unsat");
    }

    #[test]
    fn labs_reports_optimal_objective() {
        let spec = InstanceSpec::Labs { n: 5 };
        let (r, _) = run_instance(&spec, ModelVariant::ViewsStatic, &Default::default()).unwrap();
        assert_eq!(r.status, "optimal");
        assert_eq!(r.objective, Some(2));
    }

    #[test]
    fn record_serializes_with_fixed_field_order() {
        let spec = InstanceSpec::Ecc { a: 2, n: 2, l: 3, d: 2, metric: Metric::Hamming };
        let (r, _) = run_instance(&spec, ModelVariant::ViewsDynamic, &Default::default()).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let fields = [
            "\"problem\"",
            "\"instance\"",
            "\"variant\"",
            "\"status\"",
            "\"time_ms\"",
            "\"propagations\"",
            "\"fails\"",
            "\"domain_updates\"",
            "\"view_calls\"",
            "\"arith_ops\"",
            "\"solutions\"",
            "\"objective\"",
        ];
        let positions: Vec<usize> =
            fields.iter().map(|f| json.find(f).expect(f)).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "schema order stable: {json}");
    }
}
