use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use boxview_cli::{
    bench_suite, default_seed, default_suite, parse_suite, run_instance, run_verify, BenchConfig,
    BrancherChoice, SolveConfig,
};
use boxview_core::models::{InstanceSpec, Metric, ModelVariant};
use boxview_core::propagators::ChainShape;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "boxview", version, about = "Finite-domain solver with view-based propagation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build and solve one instance, printing a JSON record.
    Solve(SolveArgs),
    /// Run the benchmark matrix and print ratio tables.
    Bench(BenchArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Problem family: linear | nonlinear | golfers | golomb | labs | ecc.
    problem: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<i64>,
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    a1: Option<usize>,
    #[arg(long)]
    a2: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    length: Option<i64>,
    #[arg(long)]
    alphabet: Option<i64>,
    #[arg(long)]
    strings: Option<usize>,
    #[arg(long)]
    len: Option<usize>,
    #[arg(long)]
    dist: Option<i64>,
    /// hamming | lee (ecc only).
    #[arg(long)]
    metric: Option<String>,
    /// vars | vars-global | views-static | views-dynamic |
    /// views-static-global | views-dynamic-global.
    #[arg(long, default_value = "views-static")]
    variant: String,
    /// input-min | input-bisect | firstfail-min | firstfail-bisect.
    #[arg(long, default_value = "input-min")]
    brancher: String,
    /// Time limit in milliseconds; a limited run reports status "timeout".
    #[arg(long)]
    time_limit: Option<u64>,
    /// Print the constraint views in canonical prefix form.
    #[arg(long)]
    dump_views: bool,
    /// Print the full model dump (variables and constraints).
    #[arg(long)]
    dump_model: bool,
    /// Enumerate all solutions instead of stopping at the first.
    #[arg(long)]
    all_solutions: bool,
    /// Disable per-update bound caching in n-ary views.
    #[arg(long)]
    no_view_cache: bool,
    /// Fold n-ary sums into balanced trees instead of left chains.
    #[arg(long)]
    balanced_chains: bool,
    /// Duplicate the repeated |x-y| subexpression in auxiliary Lee models
    /// instead of sharing it within each distance constraint.
    #[arg(long)]
    no_share_subexpr: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite file (JSON array of instance specs); default: built-in suite.
    #[arg(long)]
    suite: Option<PathBuf>,
    /// Use the larger built-in suite shapes.
    #[arg(long)]
    full: bool,
    /// Comma-separated variant list to benchmark (default: all allowed).
    #[arg(long)]
    variants: Option<String>,
    /// Initial repeats per (instance, variant).
    #[arg(long, default_value_t = 10)]
    repeats: u32,
    /// Keep repeating until stddev/mean of runtimes is below this.
    #[arg(long, default_value_t = 0.02)]
    stability: f64,
    #[arg(long, default_value_t = 40)]
    max_repeats: u32,
    /// Worker threads (instance granularity).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    time_limit: Option<u64>,
    /// Write records (JSONL and CSV) into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scale of the randomized verification tiers.
    #[arg(long, default_value_t = 100)]
    exhaustive_bound: u64,
    /// Seed for randomized tiers (BOXVIEW_SEED overrides the default).
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_variant(name: &str) -> Result<ModelVariant, String> {
    ModelVariant::parse(name).ok_or_else(|| format!("unknown variant {name}"))
}

fn spec_from_args(a: &SolveArgs) -> Result<InstanceSpec, String> {
    let need = |v: Option<usize>, name: &str| v.ok_or(format!("missing --{name}"));
    let need_i = |v: Option<i64>, name: &str| v.ok_or(format!("missing --{name}"));
    match a.problem.as_str() {
        "linear" => Ok(InstanceSpec::Linear {
            n: need(a.n, "n")?,
            d: need_i(a.d, "d")?,
            c: need(a.c, "c")?,
            a: need(a.a, "a")?,
            seed: a.seed.unwrap_or(1),
        }),
        "nonlinear" => Ok(InstanceSpec::Nonlinear {
            n: need(a.n, "n")?,
            d: need_i(a.d, "d")?,
            c: need(a.c, "c")?,
            a1: need(a.a1, "a1")?,
            a2: need(a.a2, "a2")?,
            seed: a.seed.unwrap_or(1),
        }),
        "golfers" => Ok(InstanceSpec::Golfers {
            w: need(a.w, "w")?,
            g: need(a.g, "g")?,
            s: need(a.s, "s")?,
        }),
        "golomb" => Ok(InstanceSpec::Golomb {
            m: need(a.m, "m")?,
            length: need_i(a.length, "length")?,
        }),
        "labs" => Ok(InstanceSpec::Labs { n: need(a.n, "n")? }),
        "ecc" => {
            let metric = match a.metric.as_deref() {
                Some("hamming") | None => Metric::Hamming,
                Some("lee") => Metric::Lee,
                Some(other) => return Err(format!("unknown metric {other}")),
            };
            Ok(InstanceSpec::Ecc {
                a: need_i(a.alphabet, "alphabet")?,
                n: need(a.strings, "strings")?,
                l: need(a.len, "len")?,
                d: need_i(a.dist, "dist")?,
                metric,
            })
        }
        other => Err(format!("unknown problem {other}")),
    }
}

fn cmd_solve(a: SolveArgs) -> Result<ExitCode, String> {
    let spec = spec_from_args(&a)?;
    let variant = parse_variant(&a.variant)?;
    let brancher =
        BrancherChoice::parse(&a.brancher).ok_or(format!("unknown brancher {}", a.brancher))?;
    let mut cfg = SolveConfig {
        brancher,
        time_limit: a.time_limit.map(Duration::from_millis),
        view_cache: !a.no_view_cache,
        all_solutions: a.all_solutions,
        ..Default::default()
    };
    cfg.build.share_lee = !a.no_share_subexpr;
    if a.balanced_chains {
        cfg.build.chain = ChainShape::Balanced;
    }
    match run_instance(&spec, variant, &cfg) {
        Ok((record, dump)) => {
            if a.dump_model {
                print!("{dump}");
            } else if a.dump_views {
                for line in dump.lines().filter(|l| l.starts_with('(')) {
                    println!("{line}");
                }
            }
            println!("{}", serde_json::to_string(&record).expect("record serializes"));
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            eprintln!("internal error: {e}");
            Ok(ExitCode::from(2))
        }
    }
}

fn cmd_bench(a: BenchArgs) -> Result<ExitCode, String> {
    let restricted: Option<Vec<ModelVariant>> = match &a.variants {
        None => None,
        Some(list) => {
            Some(list.split(',').map(|v| parse_variant(v.trim())).collect::<Result<_, _>>()?)
        }
    };
    let suite: Vec<(InstanceSpec, Vec<ModelVariant>)> = match &a.suite {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let entries = parse_suite(&text)?;
            let mut out = Vec::new();
            for e in entries {
                let spec = e.to_spec()?;
                let mut vs = e.variants(&spec)?;
                if let Some(only) = &restricted {
                    vs.retain(|v| only.contains(v));
                }
                out.push((spec, vs));
            }
            out
        }
        None => default_suite(a.full)
            .into_iter()
            .map(|spec| {
                let mut vs = spec.allowed_variants();
                if let Some(only) = &restricted {
                    vs.retain(|v| only.contains(v));
                }
                (spec, vs)
            })
            .collect(),
    };

    let cfg = BenchConfig {
        repeats: a.repeats,
        stability: a.stability,
        max_repeats: a.max_repeats,
        time_limit: a.time_limit.map(Duration::from_millis),
        jobs: a.jobs,
        ..Default::default()
    };
    let results = bench_suite(&suite, &cfg);
    for r in &results.records {
        println!("{}", serde_json::to_string(r).expect("record serializes"));
    }
    print!(
        "{}",
        boxview_cli::bench::render_ratio_table(
            "runtime ratios: static views / dynamic views",
            &results.static_vs_dynamic
        )
    );
    print!(
        "{}",
        boxview_cli::bench::render_ratio_table(
            "runtime ratios: best views / best vars",
            &results.views_vs_vars
        )
    );

    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let mut jsonl = String::new();
        let mut csv = String::from(boxview_cli::RunRecord::csv_header());
        csv.push('\n');
        for r in &results.records {
            jsonl.push_str(&serde_json::to_string(r).expect("record serializes"));
            jsonl.push('\n');
            csv.push_str(&r.to_csv());
            csv.push('\n');
        }
        std::fs::write(dir.join("records.jsonl"), jsonl).map_err(|e| e.to_string())?;
        std::fs::write(dir.join("records.csv"), csv).map_err(|e| e.to_string())?;
        let tables = serde_json::json!({
            "static_vs_dynamic": results.static_vs_dynamic,
            "views_vs_vars": results.views_vs_vars,
        });
        std::fs::write(
            dir.join("ratios.json"),
            serde_json::to_string_pretty(&tables).expect("tables serialize"),
        )
        .map_err(|e| e.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode, String> {
    let seed = a.seed.unwrap_or_else(default_seed);
    match run_verify(a.exhaustive_bound, seed) {
        Ok(outcome) => {
            for row in &outcome.matrix {
                println!("{}", boxview_cli::verify::matrix_json_line(row));
            }
            for s in &outcome.suites {
                let status = if s.passed { "pass" } else { "FAIL" };
                println!("suite {:<24} {status} ({} cases)", s.name, s.cases);
                for n in &s.notes {
                    println!("  note: {n}");
                }
                for f in &s.failures {
                    println!("  failure: {f}");
                }
            }
            let failing = outcome.failing.min(100) as u8;
            Ok(ExitCode::from(failing))
        }
        Err(e) => {
            eprintln!("internal error: {e}");
            Ok(ExitCode::from(2))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help and version requests are not argument errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let run = match cli.cmd {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Verify(a) => cmd_verify(a),
    };
    match run {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
