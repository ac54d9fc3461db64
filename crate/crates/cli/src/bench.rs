//! The benchmark harness: every (instance, variant) pair is repeated until
//! its runtime is stable, the minimum runtime is kept, and pairwise ratio
//! tables are produced per problem family and overall.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Mutex;
use std::time::Duration;

use boxview_core::models::{InstanceSpec, ModelVariant};
use serde::Serialize;

use crate::run::{run_instance, RunRecord, SolveConfig};

#[derive(Clone, Debug)]
pub struct BenchConfig {
    /// Initial number of repeats per pair.
    pub repeats: u32,
    /// Keep repeating until stddev/mean of the runtimes drops below this.
    pub stability: f64,
    /// Hard cap on repeats so a noisy machine terminates.
    pub max_repeats: u32,
    pub time_limit: Option<Duration>,
    pub jobs: usize,
    pub solve: SolveConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            repeats: 10,
            stability: 0.02,
            max_repeats: 40,
            time_limit: None,
            jobs: 1,
            solve: SolveConfig::default(),
        }
    }
}

/// Geometric summary of per-instance ratios between two variants.
#[derive(Clone, Debug, Serialize)]
pub struct RatioSummary {
    pub label: String,
    pub count: usize,
    pub geometric_mean: f64,
    pub geometric_stddev: f64,
    pub min: f64,
    pub max: f64,
}

pub fn ratio_summary(label: &str, ratios: &[f64]) -> Option<RatioSummary> {
    if ratios.is_empty() {
        return None;
    }
    let logs: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    let var = logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / logs.len() as f64;
    Some(RatioSummary {
        label: label.to_string(),
        count: ratios.len(),
        geometric_mean: mean.exp(),
        geometric_stddev: var.sqrt().exp(),
        min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

#[derive(Debug, Default)]
pub struct BenchResults {
    /// One record per (instance, variant): counters from the first run and
    /// the minimum stable runtime.
    pub records: Vec<RunRecord>,
    /// Ratio tables in the shape of the runtime comparisons: static vs
    /// dynamic views, and best views vs best auxiliary variables.
    pub static_vs_dynamic: Vec<RatioSummary>,
    pub views_vs_vars: Vec<RatioSummary>,
}

fn best_time(records: &[&RunRecord], variants: &[&str]) -> Option<f64> {
    records
        .iter()
        .filter(|r| variants.contains(&r.variant.as_str()) && r.status != "timeout")
        .map(|r| r.time_ms.max(1) as f64)
        .fold(None, |acc, t| Some(acc.map_or(t, |a: f64| a.min(t))))
}

fn grouped_ratios(
    records: &[RunRecord],
    num_variants: &[&str],
    den_variants: &[&str],
) -> Vec<RatioSummary> {
    let mut by_instance: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        by_instance.entry(&r.instance).or_default().push(r);
    }
    let mut by_problem: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut all = Vec::new();
    for rs in by_instance.values() {
        let (Some(num), Some(den)) =
            (best_time(rs, num_variants), best_time(rs, den_variants))
        else {
            continue;
        };
        let ratio = num / den;
        by_problem.entry(rs[0].problem.clone()).or_default().push(ratio);
        all.push(ratio);
    }
    let mut out: Vec<RatioSummary> = by_problem
        .iter()
        .filter_map(|(p, rs)| ratio_summary(p, rs))
        .collect();
    if let Some(s) = ratio_summary("all", &all) {
        out.push(s);
    }
    out
}

/// Runs one pair under the stability protocol and returns the record with
/// the minimum runtime observed.
fn run_pair(
    spec: &InstanceSpec,
    variant: ModelVariant,
    cfg: &BenchConfig,
) -> boxview_core::Result<RunRecord> {
    let solve = SolveConfig { time_limit: cfg.time_limit, ..cfg.solve.clone() };
    let mut times: Vec<f64> = Vec::new();
    let mut base: Option<RunRecord> = None;
    loop {
        let (rec, _) = run_instance(spec, variant, &solve)?;
        times.push(rec.time_ms as f64);
        if base.is_none() {
            let timed_out = rec.status == "timeout";
            base = Some(rec);
            if timed_out {
                break; // no point repeating a run that hit the limit
            }
        }
        let n = times.len() as u32;
        if n >= cfg.repeats {
            let mean = times.iter().sum::<f64>() / times.len() as f64;
            let sd =
                (times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / times.len() as f64).sqrt();
            if mean <= f64::EPSILON || sd / mean <= cfg.stability || n >= cfg.max_repeats {
                break;
            }
        }
    }
    let mut rec = base.expect("at least one run");
    rec.time_ms = times.iter().copied().fold(f64::INFINITY, f64::min) as u64;
    Ok(rec)
}

/// Runs the full matrix of (instance, allowed variant) pairs, optionally on
/// several worker threads (instance granularity; each worker owns its
/// stores).
pub fn bench_suite(
    suite: &[(InstanceSpec, Vec<ModelVariant>)],
    cfg: &BenchConfig,
) -> BenchResults {
    let tasks: VecDeque<(InstanceSpec, ModelVariant)> = suite
        .iter()
        .flat_map(|(s, vs)| vs.iter().map(move |v| (s.clone(), *v)))
        .collect();
    let queue = Mutex::new(tasks);
    let results: Mutex<Vec<(usize, RunRecord)>> = Mutex::new(Vec::new());
    let errors: Mutex<Vec<String>> = Mutex::new(Vec::new());

    let workers = cfg.jobs.max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let task = { queue.lock().unwrap().pop_front() };
                let Some((spec, variant)) = task else { break };
                match run_pair(&spec, variant, cfg) {
                    Ok(rec) => {
                        let mut rs = results.lock().unwrap();
                        let order = rs.len();
                        rs.push((order, rec));
                    }
                    Err(e) => errors
                        .lock()
                        .unwrap()
                        .push(format!("{} {}: {e}", spec.id(), variant.name())),
                }
            });
        }
    });

    let mut records: Vec<RunRecord> =
        results.into_inner().unwrap().into_iter().map(|(_, r)| r).collect();
    records.sort_by(|a, b| (&a.instance, &a.variant).cmp(&(&b.instance, &b.variant)));
    let static_vs_dynamic = grouped_ratios(
        &records,
        &["views-static", "views-static-global"],
        &["views-dynamic", "views-dynamic-global"],
    );
    let views_vs_vars = grouped_ratios(
        &records,
        &["views-static", "views-static-global", "views-dynamic", "views-dynamic-global"],
        &["vars", "vars-global"],
    );
    BenchResults { records, static_vs_dynamic, views_vs_vars }
}

pub fn render_ratio_table(title: &str, summaries: &[RatioSummary]) -> String {
    let mut out = format!("{title}\n{:<24} {:>6} {:>8} {:>8} {:>8} {:>8}\n", "group", "n", "mean", "stddev", "min", "max");
    for s in summaries {
        out.push_str(&format!(
            "{:<24} {:>6} {:>8.2} {:>8.2} {:>8.2} {:>8.2}\n",
            s.label, s.count, s.geometric_mean, s.geometric_stddev, s.min, s.max
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use boxview_core::models::Metric;

    #[test]
    fn ratio_summary_math() {
        let s = ratio_summary("t", &[0.5, 2.0]).unwrap();
        assert!((s.geometric_mean - 1.0).abs() < 1e-9);
        assert_eq!(s.min, 0.5);
        assert_eq!(s.max, 2.0);
        assert!(ratio_summary("empty", &[]).is_none());
    }

    #[test]
    fn tiny_suite_produces_records_and_tables() {
        let suite = vec![
            (
                InstanceSpec::Golomb { m: 5, length: 11 },
                vec![ModelVariant::ViewsStatic, ModelVariant::ViewsDynamic, ModelVariant::Vars],
            ),
            (
                InstanceSpec::Ecc { a: 2, n: 2, l: 3, d: 2, metric: Metric::Hamming },
                vec![ModelVariant::ViewsStatic, ModelVariant::ViewsDynamic, ModelVariant::Vars],
            ),
        ];
        let cfg = BenchConfig { repeats: 2, max_repeats: 3, jobs: 2, ..Default::default() };
        let out = bench_suite(&suite, &cfg);
        assert_eq!(out.records.len(), 6);
        assert!(out.static_vs_dynamic.iter().any(|s| s.label == "all"));
        assert!(out.views_vs_vars.iter().any(|s| s.label == "all"));
    }

    #[test]
    fn deterministic_counters_across_repeated_single_job_runs() {
        let suite = vec![(
            InstanceSpec::Golomb { m: 6, length: 17 },
            vec![ModelVariant::ViewsStatic],
        )];
        let cfg = BenchConfig { repeats: 1, max_repeats: 1, jobs: 1, ..Default::default() };
        let a = bench_suite(&suite, &cfg);
        let b = bench_suite(&suite, &cfg);
        let (ra, rb) = (&a.records[0], &b.records[0]);
        assert_eq!(
            (ra.propagations, ra.fails, ra.domain_updates, ra.view_calls, ra.arith_ops),
            (rb.propagations, rb.fails, rb.domain_updates, rb.view_calls, rb.arith_ops)
        );
    }
}
