//! Acceptance criterion 10: performance direction on the shipped suite.
//!
//! Wall-clock ratios are hardware and compiler dependent, so the gate
//! asserts orderings, not magnitudes, over the benchmark protocol's stable
//! minimum runtimes:
//!   (a) statically composed views are no slower than dynamically
//!       dispatched ones on at least 80% of instances;
//!   (b) the best view model beats the best auxiliary-variable model on at
//!       least 80% of the nonlinear and LABS instances;
//!   (c) the view models execute fewer propagators and perform fewer domain
//!       updates than the auxiliary models on every nonlinear and Golomb
//!       instance.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use boxview_cli::{bench_suite, default_suite, BenchConfig, RunRecord};

fn best<'a>(records: &[&'a RunRecord], prefix: &str) -> Option<&'a RunRecord> {
    records
        .iter()
        .filter(|r| r.variant.starts_with(prefix) && r.status != "timeout")
        .copied()
        .min_by_key(|r| r.time_ms)
}

#[test]
fn criterion_10_performance_direction() {
    let t0 = Instant::now();
    let suite: Vec<_> = default_suite(false)
        .into_iter()
        .map(|spec| {
            let variants = spec.allowed_variants();
            (spec, variants)
        })
        .collect();
    let cfg = BenchConfig {
        repeats: 3,
        stability: 0.10,
        max_repeats: 8,
        time_limit: Some(Duration::from_secs(120)),
        jobs: 1,
        ..Default::default()
    };
    let results = bench_suite(&suite, &cfg);

    let mut by_instance: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in &results.records {
        assert_ne!(r.status, "timeout", "{} {} timed out", r.instance, r.variant);
        by_instance.entry(&r.instance).or_default().push(r);
    }

    let mut static_le_dynamic = (0usize, 0usize);
    let mut views_beat_vars = (0usize, 0usize);
    let mut counter_ordering_failures = Vec::new();

    for (instance, rs) in &by_instance {
        let vs = best(rs, "views-static").expect(instance);
        let vd = best(rs, "views-dynamic").expect(instance);
        static_le_dynamic.1 += 1;
        if vs.time_ms <= vd.time_ms {
            static_le_dynamic.0 += 1;
        }

        let problem = rs[0].problem.as_str();
        let bv = best(rs, "views").expect(instance);
        let ba = best(rs, "vars").expect(instance);
        if matches!(problem, "nonlinear" | "labs") {
            views_beat_vars.1 += 1;
            if bv.time_ms < ba.time_ms {
                views_beat_vars.0 += 1;
            }
        }
        if matches!(problem, "nonlinear" | "golomb") {
            let p_views = rs
                .iter()
                .filter(|r| r.variant.starts_with("views"))
                .map(|r| r.propagations)
                .min()
                .unwrap();
            let u_views = rs
                .iter()
                .filter(|r| r.variant.starts_with("views"))
                .map(|r| r.domain_updates)
                .min()
                .unwrap();
            let p_vars = rs
                .iter()
                .filter(|r| r.variant.starts_with("vars"))
                .map(|r| r.propagations)
                .min()
                .unwrap();
            let u_vars = rs
                .iter()
                .filter(|r| r.variant.starts_with("vars"))
                .map(|r| r.domain_updates)
                .min()
                .unwrap();
            if !(p_views < p_vars && u_views < u_vars) {
                counter_ordering_failures.push(format!(
                    "{instance}: p {p_views} vs {p_vars}, u {u_views} vs {u_vars}"
                ));
            }
        }
    }

    let (a_ok, a_n) = static_le_dynamic;
    assert!(
        a_ok * 10 >= a_n * 8,
        "static <= dynamic held on only {a_ok}/{a_n} instances"
    );
    let (b_ok, b_n) = views_beat_vars;
    assert!(
        b_ok * 10 >= b_n * 8,
        "best views < best vars held on only {b_ok}/{b_n} nonlinear+labs instances"
    );
    assert!(
        counter_ordering_failures.is_empty(),
        "propagation/update counter ordering violated: {counter_ordering_failures:?}"
    );
    let took = t0.elapsed();
    assert!(took < Duration::from_secs(900), "suite exceeded 15 minutes: {took:?}");
    println!(
        "criterion 10 (performance direction): PASS: static<=dynamic {a_ok}/{a_n}, views<vars {b_ok}/{b_n} (nonlinear+labs), counter orderings clean, suite in {took:?}"
    );
    for s in &results.static_vs_dynamic {
        println!(
            "  static/dynamic ratio [{}]: mean {:.2} (n={})",
            s.label, s.geometric_mean, s.count
        );
    }
    for s in &results.views_vs_vars {
        println!(
            "  views/vars ratio [{}]: mean {:.2} (n={})",
            s.label, s.geometric_mean, s.count
        );
    }
}
