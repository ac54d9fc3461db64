//! Micro-benchmarks contrasting the two view realizations and the
//! decomposition variants on small solver runs.

use boxview_bench::{chain_fixture, difference_fixture};
use boxview_core::engine::{dfs, Brancher, SearchMode};
use boxview_core::models::{BuildOptions, InstanceSpec, ModelVariant};
use boxview_core::propagators::{DistinctBounds, Propagator};
use boxview_core::views::{build_dynamic, build_static, BoxView};
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

fn bench_chain_eval(c: &mut Criterion) {
    let mut g = c.benchmark_group("chain_bounds_24");
    let (s, _, node) = chain_fixture(24, 6);
    let st = build_static(&node, s.dom()).unwrap();
    let dy = build_dynamic(&node, s.dom()).unwrap();
    g.bench_function("static", |b| {
        b.iter(|| {
            s.dom().begin_pass();
            black_box(st.get_min(s.dom()).unwrap() + st.get_max(s.dom()).unwrap())
        })
    });
    g.bench_function("dynamic", |b| {
        b.iter(|| {
            s.dom().begin_pass();
            black_box(dy.get_min(s.dom()).unwrap() + dy.get_max(s.dom()).unwrap())
        })
    });
    g.finish();
}

fn bench_distinct_execute(c: &mut Criterion) {
    let mut g = c.benchmark_group("distinct_diffs_m9");
    g.bench_function("static", |b| {
        let (mut s, diffs) = difference_fixture(9, 44);
        let views: Vec<_> = diffs.iter().map(|n| build_static(n, s.dom()).unwrap()).collect();
        let mut p = DistinctBounds::new(views);
        b.iter(|| {
            let _ = black_box(p.execute(s.dom_mut()).unwrap());
            s.dom_mut().take_events();
        })
    });
    g.bench_function("dynamic", |b| {
        let (mut s, diffs) = difference_fixture(9, 44);
        let views: Vec<_> = diffs.iter().map(|n| build_dynamic(n, s.dom()).unwrap()).collect();
        let mut p = DistinctBounds::new(views);
        b.iter(|| {
            let _ = black_box(p.execute(s.dom_mut()).unwrap());
            s.dom_mut().take_events();
        })
    });
    g.finish();
}

fn bench_golomb_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("golomb_7_25");
    g.sample_size(20);
    for variant in [ModelVariant::ViewsStatic, ModelVariant::ViewsDynamic, ModelVariant::VarsGlobal]
    {
        g.bench_function(variant.name(), |b| {
            b.iter_batched(
                || {
                    InstanceSpec::Golomb { m: 7, length: 25 }
                        .build(variant, &BuildOptions::default())
                        .unwrap()
                },
                |mut m| {
                    let br = Brancher::input_order_min(m.decision_vars.clone());
                    dfs(&mut m.store, &br, SearchMode::FirstSolution, None, &mut |_| {}).unwrap()
                },
                BatchSize::SmallInput,
            )
        });
    }
    g.finish();
}

criterion_group!(benches, bench_chain_eval, bench_distinct_execute, bench_golomb_solve);
criterion_main!(benches);
