//! End-to-end checks of the command-line surface: round trips, exit codes,
//! deterministic output, and the JSON report forms.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pureprep"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn plan_simulate_round_trip_both_schemes() {
    let dir = tempfile::tempdir().unwrap();
    for scheme in ["general", "logical-label"] {
        for n in 2..=6usize {
            let file = format!("plan_{scheme}_{n}.json");
            let out = run(
                &[
                    "plan",
                    "-n",
                    &n.to_string(),
                    "--scheme",
                    scheme,
                    "-o",
                    &file,
                ],
                dir.path(),
            );
            assert_eq!(code(&out), 0, "{}", stdout(&out));
            let expected = if scheme == "general" {
                (1 << (n - 1)) + 1
            } else {
                2
            };
            assert!(
                stdout(&out).contains(&format!("experiments: {expected}")),
                "{}",
                stdout(&out)
            );

            let out = run(&["simulate", &file], dir.path());
            assert_eq!(code(&out), 0, "{}", stdout(&out));
            assert!(stdout(&out).contains("pass"));
        }
    }
}

#[test]
fn plan_compile_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for scheme in ["general", "logical-label"] {
        for n in 2..=6usize {
            let plan = format!("plan_{scheme}_{n}.json");
            let gates = format!("gates_{scheme}_{n}.json");
            assert_eq!(
                code(&run(
                    &[
                        "plan",
                        "-n",
                        &n.to_string(),
                        "--scheme",
                        scheme,
                        "-o",
                        &plan
                    ],
                    dir.path()
                )),
                0
            );
            let out = run(&["compile", &plan, "-o", &gates], dir.path());
            assert_eq!(code(&out), 0, "{}", stdout(&out));
            let expected = if scheme == "general" {
                (1 << (n - 1)) + 1
            } else {
                2
            };
            assert!(stdout(&out).contains(&format!("sequences: {expected}")));
            let out = run(&["check-compile", &gates], dir.path());
            assert_eq!(code(&out), 0, "{}", stdout(&out));
        }
    }
}

#[test]
fn corrupted_gate_angle_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(&["plan", "-n", "2", "-o", "p.json"], dir.path())),
        0
    );
    assert_eq!(
        code(&run(&["compile", "p.json", "-o", "g.json"], dir.path())),
        0
    );
    let path = dir.path().join("g.json");
    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // bend one angle in the second experiment's sequence
    let gate = &mut value["experiments"][1]["gate_sequence"]["gates"][0];
    let angle = gate["angle"].as_f64().unwrap();
    gate["angle"] = serde_json::json!(angle + 0.25);
    std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();

    let out = run(&["check-compile", "g.json"], dir.path());
    assert_eq!(code(&out), 1, "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn tampered_weight_fails_simulation() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(&["plan", "-n", "3", "-o", "p.json"], dir.path())),
        0
    );
    let path = dir.path().join("p.json");
    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    value["experiments"][2]["weight"] = serde_json::json!(-2.0);
    std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
    let out = run(&["simulate", "p.json"], dir.path());
    assert_eq!(code(&out), 1);
}

#[test]
fn empty_experiment_list_fails_against_nonzero_target() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(&["plan", "-n", "2", "-o", "p.json"], dir.path())),
        0
    );
    let path = dir.path().join("p.json");
    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    value["experiments"] = serde_json::json!([]);
    std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
    let out = run(&["simulate", "p.json"], dir.path());
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_and_format_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // spin count below the scheme minimum
    assert_eq!(code(&run(&["plan", "-n", "1"], dir.path())), 2);
    // unknown identity id
    assert_eq!(
        code(&run(
            &["verify", "--identity", "eq99", "-n", "2"],
            dir.path()
        )),
        2
    );
    // reflection check rejects an all-{E,X} term
    assert_eq!(
        code(&run(
            &["verify", "--identity", "eq13", "-n", "2", "--sigma", "XX"],
            dir.path()
        )),
        2
    );
    // missing file
    assert_eq!(code(&run(&["simulate", "nope.json"], dir.path())), 2);
    // malformed file
    std::fs::write(dir.path().join("junk.json"), "{not json").unwrap();
    assert_eq!(code(&run(&["simulate", "junk.json"], dir.path())), 2);
    // unknown subcommand / bad flags come back from the parser as 2
    assert_eq!(code(&run(&["frobnicate"], dir.path())), 2);
    // parity conversion needs even n
    assert_eq!(
        code(&run(
            &["verify", "--identity", "parity", "-n", "3"],
            dir.path()
        )),
        2
    );
    // non-positive tolerance
    assert_eq!(
        code(&run(&["plan", "-n", "2", "-o", "t.json"], dir.path())),
        0
    );
    assert_eq!(
        code(&run(&["simulate", "t.json", "--tol", "0"], dir.path())),
        2
    );
}

#[test]
fn tolerance_flag_gates_the_residual() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(&["plan", "-n", "2", "-o", "p.json"], dir.path())),
        0
    );
    // generous tolerance passes, an impossibly tight one fails
    assert_eq!(
        code(&run(&["simulate", "p.json", "--tol", "1e-3"], dir.path())),
        0
    );
    assert_eq!(
        code(&run(&["simulate", "p.json", "--tol", "1e-17"], dir.path())),
        1
    );
}

#[test]
fn verify_runs_each_identity() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&str, &str)] = &[
        ("eq3", "2"),
        ("eq4", "2"),
        ("eq5", "2"),
        ("eq8", "3"),
        ("eq9", "2"),
        ("eq10", "2"),
        ("eq11", "2"),
        ("eq13", "2"),
        ("eq17", "4"),
        ("parity", "4"),
        ("eq18", "3"),
    ];
    for (id, n) in cases {
        let out = run(&["verify", "--identity", id, "-n", n], dir.path());
        assert_eq!(code(&out), 0, "{id}: {}", stdout(&out));
        assert!(stdout(&out).contains("pass"), "{id}");
    }
    // explicit sigma variants
    let out = run(
        &["verify", "--identity", "eq13", "-n", "2", "--sigma", "YZ"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let out = run(
        &["verify", "--identity", "eq10", "-n", "2", "--sigma", "XX"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
}

#[test]
fn deterministic_plan_output() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(&["plan", "-n", "4", "-o", "a.json"], dir.path())),
        0
    );
    assert_eq!(
        code(&run(&["plan", "-n", "4", "-o", "b.json"], dir.path())),
        0
    );
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn expand_repetitions_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["plan", "-n", "3", "--expand-repetitions", "-o", "e.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("experiments: 7"));
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("e.json")).unwrap()).unwrap();
    assert_eq!(value["experiments"].as_array().unwrap().len(), 7);
    // still hits the target
    assert_eq!(code(&run(&["simulate", "e.json"], dir.path())), 0);
}

#[test]
fn json_reports_parse() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(&["plan", "-n", "2", "-o", "p.json"], dir.path())),
        0
    );
    let out = run(&["simulate", "p.json", "--json"], dir.path());
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["identity_id"], "plan-general");
    assert_eq!(value["passed"], true);
    assert_eq!(value["diagonal"].as_array().unwrap().len(), 4);
    // diagonal entries serialize as [re, im]
    let top = value["diagonal"][0][0].as_f64().unwrap();
    assert!((top - 1.5).abs() < 1e-9);

    let out = run(
        &["verify", "--identity", "eq17", "-n", "5", "--json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["identity_id"], "eq17");
    assert_eq!(value["n"], 5);

    let out = run(&["plan", "-n", "2", "-o", "q.json", "--json"], dir.path());
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["experiments"], 3);
}

#[test]
fn plan_without_output_path_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["plan", "-n", "2"], dir.path());
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["n"], 2);
    assert_eq!(value["scheme"], "general");
}
