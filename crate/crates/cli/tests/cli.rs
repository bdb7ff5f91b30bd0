use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn amplisat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amplisat"))
        .args(args)
        .output()
        .expect("spawning amplisat")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// The four-variable, 25-clause instance with a single solution.
fn single_solution(dir: &Path) -> String {
    let prefix = dir.join("single_solution");
    let out = amplisat(&[
        "gen",
        "-n",
        "4",
        "-M",
        "25",
        "-k",
        "3",
        "--target-L",
        "1",
        "--seed",
        "7",
        "--out",
        p(&prefix),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    format!("{}.cnf", p(&prefix))
}

#[test]
fn gen_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = amplisat(&[
            "gen",
            "-n",
            "10",
            "-M",
            "42",
            "--seed",
            "99",
            "--out",
            p(&dir.path().join(name)),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for ext in ["cnf", "json"] {
        let a = fs::read(dir.path().join(format!("a.{ext}"))).unwrap();
        let b = fs::read(dir.path().join(format!("b.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext} differs");
    }
    let sidecar: Value =
        serde_json::from_slice(&fs::read(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(sidecar["seed"], 99);
    assert!(sidecar["L"].as_u64().unwrap() >= 1);
}

#[test]
fn gen_rejects_width_above_variable_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = amplisat(&[
        "gen",
        "-n",
        "2",
        "-M",
        "1",
        "-k",
        "3",
        "--out",
        p(&dir.path().join("x")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("InvalidWidth"));
}

#[test]
fn gen_records_entropy_seed_for_replay() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("r");
    let out = amplisat(&["gen", "-n", "8", "-M", "30", "--out", p(&prefix)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let original = fs::read(dir.path().join("r.cnf")).unwrap();
    let manifest: Value =
        serde_json::from_slice(&fs::read(dir.path().join("r.manifest.json")).unwrap()).unwrap();
    assert!(manifest["seed"].is_u64());
    assert_eq!(manifest["complete"], true);
    fs::remove_file(dir.path().join("r.cnf")).unwrap();
    let out = amplisat(&["replay", p(&dir.path().join("r.manifest.json"))]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read(dir.path().join("r.cnf")).unwrap(), original);
}

#[test]
fn ledger_matches_the_four_variable_example() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = single_solution(dir.path());
    let out = amplisat(&["ledger", &cnf, "--f0", "clause-count", "--ell-max", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let ledger = json_stdout(&out);
    assert_eq!(ledger["L"], 1);
    assert_eq!(ledger["e_f0"], 21.875);
    assert_eq!(ledger["e_t"], 0.875);
    assert_eq!(ledger["e_w"][0], 18.75);
    assert_eq!(ledger["e_w"][1], 10.9375);
}

#[test]
fn ledger_rejects_zero_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = single_solution(dir.path());
    let out = amplisat(&["ledger", &cnf, "--L", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ledger_rejects_unsatisfiable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unsat.cnf");
    fs::write(&path, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let out = amplisat(&["ledger", p(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("NoSolutions"));
}

#[test]
fn landscape_writes_verified_sweeps_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = single_solution(dir.path());
    let prefix = dir.path().join("ls");
    let out = amplisat(&[
        "landscape",
        &cnf,
        "--ell",
        "0,auto",
        "--oracle",
        "min",
        "--verify",
        "--out",
        p(&prefix),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let stats = json_stdout(&out);
    assert_eq!(stats.as_array().unwrap().len(), 2);
    assert_eq!(stats[1]["ell"], 3);
    for ell in [0, 3] {
        let csv = fs::read_to_string(dir.path().join(format!("ls_ell{ell}.csv"))).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 17);
        assert_eq!(rows[0], "index,bits,value,is_solution");
        assert_eq!(rows.iter().filter(|r| r.ends_with(",true")).count(), 1);
        assert!(rows[6].starts_with("5,0101,"));
    }
    assert!(dir.path().join("ls_stats.json").exists());
    let manifest: Value =
        serde_json::from_slice(&fs::read(dir.path().join("ls.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["inputs"].as_object().unwrap().len(), 1);
}

#[test]
fn solve_trivial_instance_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.cnf");
    fs::write(&path, "p cnf 3 1\n1 -2 3 0\n").unwrap();
    for solver in ["anneal", "gradient"] {
        let out = amplisat(&["solve", p(&path), "--solver", solver, "--seed", "3"]);
        assert_eq!(out.status.code(), Some(0), "{solver}: {}", stderr(&out));
        assert_eq!(json_stdout(&out)["report"]["satisfied"], true);
    }
}

#[test]
fn solve_resolves_auto_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = single_solution(dir.path());
    let report = dir.path().join("report.json");
    let out = amplisat(&[
        "solve",
        &cnf,
        "--ell",
        "auto",
        "--seed",
        "1",
        "--out",
        p(&report),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json = json_stdout(&out);
    assert_eq!(json["ell"], 3);
    assert_eq!(fs::read(&report).unwrap(), out.stdout);
    assert!(dir.path().join("report.json.manifest.json").exists());
}

#[test]
fn solve_is_deterministic_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = single_solution(dir.path());
    let run = || {
        let out = amplisat(&["solve", &cnf, "--ell", "2", "--seed", "11"]);
        let mut json = json_stdout(&out);
        json["report"]["wall_time_ms"] = Value::Null;
        json
    };
    assert_eq!(run(), run());
}

#[test]
fn solve_uses_config_seed_when_no_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = single_solution(dir.path());
    let config = dir.path().join("sa.json");
    fs::write(&config, r#"{"initial_temperature": 1.0, "schedule": {"kind": "geometric", "alpha": 0.99}, "steps": 50, "seed": 77}"#).unwrap();
    let out = amplisat(&["solve", &cnf, "--config", p(&config)]);
    assert_eq!(json_stdout(&out)["report"]["seed"], 77);
}

#[test]
fn solve_rejects_malformed_config() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = single_solution(dir.path());
    let cases = [
        ("syntax.json", "{ not json"),
        (
            "unknown.json",
            r#"{"initial_temperature": 1.0, "schedule": {"kind": "geometric", "alpha": 0.9}, "steps": 10, "bogus": 1}"#,
        ),
        (
            "range.json",
            r#"{"initial_temperature": 1.0, "schedule": {"kind": "geometric", "alpha": 1.5}, "steps": 10}"#,
        ),
    ];
    for (name, text) in cases {
        let config = dir.path().join(name);
        fs::write(&config, text).unwrap();
        let out = amplisat(&["solve", &cnf, "--config", p(&config)]);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", stderr(&out));
    }
}

#[test]
fn solve_reports_budget_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = single_solution(dir.path());
    let config = dir.path().join("tiny.json");
    fs::write(&config, r#"{"initial_temperature": 0.0, "schedule": {"kind": "geometric", "alpha": 0.9}, "steps": 0}"#).unwrap();
    // with no steps only the start vertex is visited; seeds landing on the solution exit 0
    let codes: Vec<i32> = (0..8)
        .map(|seed| {
            amplisat(&[
                "solve",
                &cnf,
                "--config",
                p(&config),
                "--seed",
                &seed.to_string(),
            ])
            .status
            .code()
            .unwrap()
        })
        .collect();
    assert!(codes.iter().all(|&c| c == 0 || c == 3), "{codes:?}");
    assert!(codes.contains(&3));
}

#[test]
fn bench_emits_two_rows_per_instance_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let out = amplisat(&[
        "bench",
        "-n",
        "8",
        "--count",
        "100",
        "--seed",
        "5",
        "--no-wall-time",
        "--out",
        p(&csv),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let first = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines.len(), 1 + 200);
    assert_eq!(
        lines[0],
        "instance_id,n,M,k,L,ell,oracle,f0,solver,seed,satisfied,evaluations,best_value,wall_ms"
    );
    assert!(lines[1..].iter().all(|l| l.ends_with(",0.0")));

    let manifest_path = dir.path().join("bench.csv.manifest.json");
    let manifest: Value = serde_json::from_slice(&fs::read(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["complete"], true);
    fs::remove_file(&csv).unwrap();
    let out = amplisat(&["replay", p(&manifest_path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read_to_string(&csv).unwrap(), first);
}

#[test]
fn bench_accepts_instance_files() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = single_solution(dir.path());
    let csv = dir.path().join("files.csv");
    let out = amplisat(&[
        "bench",
        &cnf,
        &cnf,
        "--ell",
        "0,-1,2",
        "--solver",
        "gradient",
        "--seed",
        "1",
        "--out",
        p(&csv),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 6);
    let ells: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap())
        .collect();
    assert_eq!(ells, ["0", "3", "2", "0", "3", "2"]);
}

#[test]
fn validate_reports_summary_and_canonical_form() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("messy.cnf");
    fs::write(&path, "c comment\np cnf 3 2\n3 -1\n 0 2 1 0\n").unwrap();
    let out = amplisat(&["validate", p(&path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary = json_stdout(&out);
    assert_eq!(summary["n"], 3);
    assert_eq!(summary["M"], 2);
    assert_eq!(summary["uniform_k"], 2);
    let out = amplisat(&["validate", "--canonical", p(&path)]);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "p cnf 3 2\n-1 3 0\n1 2 0\n"
    );
}

#[test]
fn missing_input_is_an_io_error() {
    let out = amplisat(&["validate", "/nonexistent/file.cnf"]);
    assert_eq!(out.status.code(), Some(1));
}
