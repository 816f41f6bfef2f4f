use std::process::{Command, Output};

fn gmt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmt"))
        .args(args)
        .output()
        .expect("run gmt")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn alpha_values() {
    let o = gmt(&["alpha", "--row", "2,4,5,8,9"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "16939\n");
    assert_eq!(stdout(&gmt(&["alpha", "--row", "7"])), "1\n");
    assert_eq!(stdout(&gmt(&["alpha", "--row", "-3,-1", "--method", "third"])), "3\n");

    let o = gmt(&["alpha", "--row", "4,2,1,3", "--all-methods"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "-2\n-2\n-2\n-2\n");
    let o = gmt(&["alpha", "--row", "1,2,3", "--all-methods"]);
    assert_eq!(stdout(&o), "7\n7\n7\n7\n7\n");
}

#[test]
fn alpha_cache_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("gmt-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("operator.txt");
    let path = file.to_str().unwrap();
    let first = gmt(&["alpha", "--row", "1,2,3,4", "--cache-file", path]);
    assert_eq!(stdout(&first), "42\n");
    let saved = std::fs::read_to_string(&file).unwrap();
    assert!(saved.lines().count() > 1);
    let second = gmt(&["alpha", "--row", "1,2,3,4", "--cache-file", path]);
    assert_eq!(stdout(&second), "42\n");
    assert!(String::from_utf8_lossy(&second.stderr).contains("loaded"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn enumeration_streams_and_totals() {
    assert_eq!(
        stdout(&gmt(&["enumerate", "gmt", "--row", "4,2,1,3", "--count"])),
        "4\n"
    );
    assert_eq!(
        stdout(&gmt(&["enumerate", "gmt", "--row", "4,2,1,3", "--signed"])),
        "-2\n"
    );
    assert_eq!(stdout(&gmt(&["enumerate", "mt", "--row", "1,2,3", "--count"])), "7\n");
    assert_eq!(
        stdout(&gmt(&["enumerate", "tn", "--row", "4,2,1,3", "--signed"])),
        "-2\n"
    );
    assert_eq!(
        stdout(&gmt(&["enumerate", "dmt", "--row", "3,2,1"])),
        "[[2],[2,2],[3,2,1]]\n"
    );

    let lines = stdout(&gmt(&["enumerate", "mt", "--row", "1,2"]));
    assert_eq!(lines, "[[1],[1,2]]\n[[2],[1,2]]\n");
    let tn = stdout(&gmt(&["enumerate", "tn", "--row", "1,2,3"]));
    assert!(tn
        .lines()
        .any(|l| l == r#"{"triangle":[[2],[2,2],[1,2,3]],"special":[[3,2]]}"#));
}

#[test]
fn exit_codes() {
    assert_eq!(gmt(&["alpha", "--row", "1,x"]).status.code(), Some(2));
    assert_eq!(gmt(&["alpha", "--row", "3,1", "--method", "mt"]).status.code(), Some(2));
    assert_eq!(gmt(&["enumerate", "mt", "--row", "3,1"]).status.code(), Some(2));
    assert_eq!(gmt(&["enumerate", "dmt", "--row", "1,3"]).status.code(), Some(2));
    assert_eq!(gmt(&["verify", "no-such-identity"]).status.code(), Some(2));
    assert_eq!(gmt(&["--jobs", "0", "alpha", "--row", "1"]).status.code(), Some(2));
    let o = gmt(&["enumerate", "mt", "--row", "1,2,3,4,5", "--max-triangles", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(
        gmt(&[
            "alpha",
            "--row",
            "1,2,3,4,5,6",
            "--method",
            "mt",
            "--max-triangles",
            "10"
        ])
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn verify_examples() {
    let o = gmt(&[
        "verify",
        "cyclic",
        "--n",
        "3",
        "--window",
        "-4..4",
        "--samples",
        "200",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["outcome"], "pass");
    assert_eq!(report["points"].as_array().unwrap().len(), 200);
    assert!(report.get("elapsed_ms").is_none());

    let o = gmt(&[
        "verify",
        "theorem1",
        "--n",
        "4",
        "--window",
        "0..3",
        "--exhaustive",
        "--format",
        "table",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("theorem1  proven            256  pass"));

    let o = gmt(&["verify", "rev-dup", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("conjecture consistent at tested scale"));

    let o = gmt(&[
        "verify",
        "ratio-raw",
        "--k",
        "7",
        "--n-min",
        "7",
        "--n",
        "8",
        "--timing",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["status"], "informational");
    assert!(report["elapsed_ms"].is_u64());
}

#[test]
fn failing_identity_exits_one_with_counterexample() {
    let o = gmt(&[
        "verify",
        "lemma1",
        "--n",
        "4",
        "--window",
        "0..0",
        "--exhaustive",
        "--functions",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["outcome"], "FAIL");
    assert!(report["counterexample"]["params"]
        .as_str()
        .unwrap()
        .starts_with("k=(0,0,0,0)"));

    let o = gmt(&[
        "verify",
        "lemma1-reduced",
        "--n",
        "4",
        "--window",
        "-1..1",
        "--exhaustive",
        "--functions",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_all_table_lists_every_identity() {
    let o = gmt(&["verify", "all", "--format", "table", "--time-budget-secs", "1"]);
    let table = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{table}");
    for id in ["theorem1", "lemma1-reduced", "comb-rec", "rev-dup", "ratio-k6"] {
        assert!(table.lines().any(|l| l.starts_with(id)), "{id} missing");
    }
}
