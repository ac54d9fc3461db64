//! End-to-end checks of the installed binary: argument handling, exit
//! codes, output schema, and dump determinism.

use std::process::Command;

fn run(args: &[&str]) -> (String, String, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_boxview"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code(),
    )
}

#[test]
fn solve_prints_one_json_record() {
    let (stdout, _, code) =
        run(&["solve", "golomb", "--m", "5", "--length", "11", "--variant", "views-static"]);
    assert_eq!(code, Some(0));
    let rec: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(rec["status"], "sat");
    assert_eq!(rec["problem"], "golomb");
    for field in [
        "problem",
        "instance",
        "variant",
        "status",
        "time_ms",
        "propagations",
        "fails",
        "domain_updates",
        "view_calls",
        "arith_ops",
        "solutions",
        "objective",
    ] {
        assert!(rec.get(field).is_some(), "missing field {field}");
    }
}

#[test]
fn unsat_and_optimal_statuses() {
    let (stdout, _, code) =
        run(&["solve", "golomb", "--m", "5", "--length", "10", "--variant", "vars"]);
    assert_eq!(code, Some(0));
    let rec: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(rec["status"], "unsat");

    let (stdout, _, _) = run(&["solve", "labs", "--n", "5", "--variant", "views-static"]);
    let rec: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(rec["status"], "optimal");
    assert_eq!(rec["objective"], 2);
}

#[test]
fn invalid_arguments_exit_one() {
    let (_, _, code) = run(&["solve", "golomb", "--m", "5"]);
    assert_eq!(code, Some(1), "missing required flag");
    let (_, _, code) = run(&["solve", "golomb", "--m", "5", "--length", "11", "--variant", "bogus"]);
    assert_eq!(code, Some(1), "unknown variant");
    let (_, _, code) = run(&["solve", "unknown-problem"]);
    assert_eq!(code, Some(1));
}

#[test]
fn timeout_is_a_status_not_an_error() {
    let (stdout, _, code) = run(&[
        "solve",
        "golomb",
        "--m",
        "11",
        "--length",
        "72",
        "--variant",
        "vars",
        "--time-limit",
        "1",
    ]);
    assert_eq!(code, Some(0));
    let rec: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(rec["status"], "timeout");
}

#[test]
fn model_dump_is_deterministic_and_variant_independent() {
    let args = ["solve", "nonlinear", "--n", "6", "--d", "3", "--c", "2", "--a1", "2", "--a2",
        "2", "--seed", "9", "--dump-model"];
    let (a, _, _) = run(&{
        let mut v = args.to_vec();
        v.extend(["--variant", "views-static"]);
        v
    });
    let (b, _, _) = run(&{
        let mut v = args.to_vec();
        v.extend(["--variant", "vars-global"]);
        v
    });
    let strip = |s: &str| {
        s.lines()
            .filter(|l| l.starts_with("var ") || l.starts_with('('))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b), "dump must not depend on the variant");
    assert!(a.contains("var x0 1 3"));
    assert!(a.lines().any(|l| l.starts_with("(sum-eq")));
}

#[test]
fn verify_subcommand_passes_and_prints_matrix_lines() {
    let (stdout, _, code) = run(&["verify", "--exhaustive-bound", "20", "--seed", "7"]);
    assert_eq!(code, Some(0), "verify must exit clean:\n{stdout}");
    assert!(stdout.contains("\"name\":\"linear_eq(2,3,-1)\""));
    assert!(stdout.contains("suite taxonomy-reproduction    pass"));
    // the injected fault fixture must be caught by the checker
    assert!(stdout
        .lines()
        .any(|l| l.contains("mul_eq-faulty") && l.contains("\"sound\":false")));
}

#[test]
fn bench_writes_records_and_ratio_files() {
    let dir = std::env::temp_dir().join(format!("boxview-bench-{}", std::process::id()));
    let suite = dir.join("suite.json");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(
        &suite,
        r#"[{"problem":"golomb","m":6,"length":17,
            "variants":["views-static","views-dynamic","vars-global"]}]"#,
    )
    .unwrap();
    let (stdout, stderr, code) = run(&[
        "bench",
        "--suite",
        suite.to_str().unwrap(),
        "--repeats",
        "2",
        "--max-repeats",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, Some(0), "stderr: {stderr}");
    assert!(stdout.contains("runtime ratios"));
    let csv = std::fs::read_to_string(dir.join("records.csv")).unwrap();
    assert!(csv.starts_with(
        "problem,instance,variant,status,time_ms,propagations,fails,domain_updates,view_calls,arith_ops,solutions,objective"
    ));
    assert_eq!(csv.lines().count(), 4, "header plus one row per variant");
    let jsonl = std::fs::read_to_string(dir.join("records.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 3);
    for line in jsonl.lines() {
        let _: serde_json::Value = serde_json::from_str(line).unwrap();
    }
    std::fs::remove_dir_all(&dir).ok();
}
