//! End-to-end tests of the `ducg` binary: exit codes, output contracts, and
//! the generate → infer round trip.

use std::path::Path;
use std::process::{Command, Output};

fn ducg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ducg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn generate_compact(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("compact.ducg");
    let out = ducg(&[
        "generate",
        "--family",
        "compact",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    path
}

#[test]
fn exact_inference_prints_the_fixture_value() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate_compact(dir.path());
    let out = ducg(&[
        "infer",
        "--graph",
        graph.to_str().unwrap(),
        "--backend",
        "exact",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("7.939915e-2"), "missing exact value:\n{text}");
    assert!(text.contains("backend: exact"));
}

#[test]
fn sampling_inference_converges_with_report_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate_compact(dir.path());
    let report = dir.path().join("report.json");
    let trace = dir.path().join("trace.csv");
    let out = ducg(&[
        "infer",
        "--graph",
        graph.to_str().unwrap(),
        "--backend",
        "sampling",
        "--seed",
        "7",
        "--hypothesis",
        "1=1",
        "--out",
        report.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["backend"], "sampling");
    assert_eq!(json["config"]["burn_in"], 300);
    let row = &json["results"][0];
    assert_eq!(row["var"], 1);
    assert_eq!(row["converged"], true);
    let lik = row["likelihood"].as_f64().unwrap();
    assert!((lik - 7.939915e-2).abs() / 7.939915e-2 < 0.01);
    let cycles = row["cycles"].as_u64().unwrap();
    assert!((500..=10_000).contains(&cycles));

    let trace_text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = trace_text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,p_t,running_mean,window_mean,window_std,verdict"
    );
    assert_eq!(lines.count() as u64, cycles);
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate_compact(dir.path());
    // everything except the trailing wall-time column must be identical
    let run = || -> Vec<String> {
        stdout(&ducg(&[
            "infer",
            "--graph",
            graph.to_str().unwrap(),
            "--backend",
            "sampling",
            "--seed",
            "3",
        ]))
        .lines()
        .map(|l| {
            l.rsplit_once(' ')
                .map_or(l.to_string(), |(head, _)| head.trim_end().to_string())
        })
        .collect()
    };
    assert_eq!(run(), run());
}

#[test]
fn generated_files_are_deterministic() {
    let a = ducg(&[
        "generate",
        "--family",
        "full-joined",
        "--n",
        "4",
        "--seed",
        "1",
    ]);
    let b = ducg(&[
        "generate",
        "--family",
        "full-joined",
        "--n",
        "4",
        "--seed",
        "1",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = ducg(&[
        "generate",
        "--family",
        "full-joined",
        "--n",
        "4",
        "--seed",
        "2",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn three_wide_has_three_nodes_per_layer() {
    let out = ducg(&["generate", "--family", "three-wide", "--layers", "3"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let x_count = json["variables"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["kind"] == "X")
        .count();
    assert_eq!(x_count, 9);
}

#[test]
fn every_family_round_trips_through_infer() {
    let dir = tempfile::tempdir().unwrap();
    for (family, extra) in [
        ("full-joined", &["--n", "2"][..]),
        ("three-wide", &["--layers", "2"][..]),
        ("compact", &[][..]),
        ("diamond", &[][..]),
    ] {
        let path = dir.path().join(format!("{family}.ducg"));
        let mut args = vec![
            "generate",
            "--family",
            family,
            "--out",
            path.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let out = ducg(&args);
        assert!(out.status.success(), "{family}: {}", stderr(&out));
        let out = ducg(&[
            "infer",
            "--graph",
            path.to_str().unwrap(),
            "--backend",
            "exact",
        ]);
        assert!(out.status.success(), "{family}: {}", stderr(&out));
    }
}

#[test]
fn checked_in_fixtures_match_the_generators_and_infer() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for (file, family, extra) in [
        ("compact.ducg", "compact", &[][..]),
        ("diamond.ducg", "diamond", &["--seed", "0"][..]),
        (
            "three-wide-3.ducg",
            "three-wide",
            &["--layers", "3", "--seed", "0"][..],
        ),
        (
            "full-joined-3.ducg",
            "full-joined",
            &["--n", "3", "--k", "3", "--seed", "0"][..],
        ),
    ] {
        let path = fixtures.join(file);
        let mut args = vec!["generate", "--family", family];
        args.extend_from_slice(extra);
        let generated = ducg(&args);
        assert!(generated.status.success());
        let on_disk = std::fs::read(&path).unwrap();
        assert_eq!(
            generated.stdout, on_disk,
            "{file} drifted from its generator"
        );

        let out = ducg(&[
            "infer",
            "--graph",
            path.to_str().unwrap(),
            "--backend",
            "exact",
        ]);
        assert!(out.status.success(), "{file}: {}", stderr(&out));
    }
    // and the compact fixture still carries its exact value
    let out = ducg(&[
        "infer",
        "--graph",
        fixtures.join("compact.ducg").to_str().unwrap(),
        "--backend",
        "exact",
    ]);
    assert!(stdout(&out).contains("7.939915e-2"));
}

#[test]
fn usage_errors_exit_one() {
    let out = ducg(&["infer", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validation_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ducg");
    std::fs::write(
        &bad,
        r#"{"variables": [{"id": 0, "kind": "B", "states": 2, "prior": [0.5, 0.5]},
                          {"id": 1, "kind": "X", "states": 2, "observed": 1}],
            "links": [{"child": 1, "parent": 0, "r": 1.0, "matrix": [[0.4, 0.6], [0.4, 0.4]]}]}"#,
    )
    .unwrap();
    let out = ducg(&["infer", "--graph", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("column"));

    let missing = dir.path().join("missing.ducg");
    let out = ducg(&["infer", "--graph", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_runs_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate_compact(dir.path());
    // recursion term cap too small
    let out = ducg(&[
        "infer",
        "--graph",
        graph.to_str().unwrap(),
        "--backend",
        "recursive",
        "--term-cap",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    // layered assumptions do not hold on the fixture
    let out = ducg(&[
        "infer",
        "--graph",
        graph.to_str().unwrap(),
        "--backend",
        "layered",
    ]);
    assert_eq!(out.status.code(), Some(3));
    // enumeration cap exceeded
    let out = ducg(&[
        "infer",
        "--graph",
        graph.to_str().unwrap(),
        "--backend",
        "exact",
        "--enumeration-cap",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn non_convergence_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate_compact(dir.path());
    let out = ducg(&[
        "infer",
        "--graph",
        graph.to_str().unwrap(),
        "--backend",
        "sampling",
        "--epsilon",
        "0.000000001",
        "--cycle-max",
        "502",
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    // the table still prints before the failure is reported
    assert!(stdout(&out).contains("backend: sampling"));
}

#[test]
fn evidence_flags_override_the_document() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate_compact(dir.path());
    // move X7's observation to state 0; the likelihood must change
    let base = stdout(&ducg(&[
        "infer",
        "--graph",
        graph.to_str().unwrap(),
        "--hypothesis",
        "1=1",
    ]));
    let flipped = stdout(&ducg(&[
        "infer",
        "--graph",
        graph.to_str().unwrap(),
        "--hypothesis",
        "1=1",
        "--evidence",
        "7=0",
    ]));
    assert!(base.contains("7.939915e-2"));
    assert!(!flipped.contains("7.939915e-2"));
}

#[test]
fn evidence_file_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    // the diamond model with evidence stripped from the document, supplied by file
    let path = dir.path().join("diamond.ducg");
    let out = ducg(&[
        "generate",
        "--family",
        "diamond",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mut json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for v in json["variables"].as_array_mut().unwrap() {
        v.as_object_mut().unwrap().remove("observed");
    }
    let stripped = dir.path().join("diamond-plain.ducg");
    std::fs::write(&stripped, serde_json::to_string(&json).unwrap()).unwrap();

    let no_evidence = ducg(&["infer", "--graph", stripped.to_str().unwrap()]);
    assert_eq!(no_evidence.status.code(), Some(2));

    let evidence = dir.path().join("evidence.json");
    std::fs::write(&evidence, r#"{"2": 1, "4": 1, "6": 1}"#).unwrap();
    let out = ducg(&[
        "infer",
        "--graph",
        stripped.to_str().unwrap(),
        "--evidence-file",
        evidence.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn bench_emits_a_row_per_backend_and_size() {
    let out = ducg(&["bench", "--n-min", "2", "--n-max", "3", "--k", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,backend,feasible,time_ms,cycles,value,error_pct"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().any(|r| r.starts_with("2,exact,yes")));
    assert!(rows.iter().any(|r| r.starts_with("3,sampling,yes")));
}

#[test]
fn bench_marks_infeasible_sizes() {
    let out = ducg(&[
        "bench",
        "--n-min",
        "3",
        "--n-max",
        "3",
        "--k",
        "3",
        "--enumeration-cap",
        "10",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("3,exact,no"));
}

#[test]
fn posteriors_sum_to_one_over_the_hypothesis_set() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate_compact(dir.path());
    let report = dir.path().join("report.json");
    let out = ducg(&[
        "infer",
        "--graph",
        graph.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let total: f64 = json["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["posterior"].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
}
