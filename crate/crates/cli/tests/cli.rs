use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn greedylab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greedylab"))
        .args(args)
        .current_dir(dir)
        .env_remove("GREEDYLAB_BUDGET")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn norm_prints_value() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "n.json", r#"{"op":"norm","space":{"kind":"lp","p":0.5,"dim":2},"f":[1,1]}"#);
    let o = greedylab(&["norm", "--config", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "4");
}

#[test]
fn partition_from_concave_example() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "p.json",
        r#"{"op":"partition_from_concave","phi":{"family":"affine","a":1,"b":1},"b":5,"r_max":4}"#,
    );
    let out = tmp.path().join("out");
    let o = greedylab(&["construct", "--config", &cfg, "--out", out.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&fs::read(out.join("partition.json")).unwrap()).unwrap();
    assert_eq!(v["M"], serde_json::json!([1, 5, 25, 125]));
    let manifest: Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["op"], "partition_from_concave");
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    let names: Vec<&str> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["config.json", "partition.json"]);
}

#[test]
fn validation_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown = write(tmp.path(), "u.json", r#"{"op":"norm","space":{"kind":"lp","p":0.5,"dim":2},"f":[1],"x":0}"#);
    assert_eq!(greedylab(&["norm", "--config", &unknown], tmp.path()).status.code(), Some(2));
    let wrong_op = write(tmp.path(), "w.json", r#"{"op":"tga","space":{"kind":"lp","p":1,"dim":2},"f":[1]}"#);
    assert_eq!(greedylab(&["norm", "--config", &wrong_op], tmp.path()).status.code(), Some(2));
    let bad_p = write(tmp.path(), "b.json", r#"{"space":{"kind":"lp","p":-1,"dim":2},"f":[1]}"#);
    assert_eq!(greedylab(&["norm", "--config", &bad_p], tmp.path()).status.code(), Some(2));
    let missing = tmp.path().join("no/such/dir");
    let o = greedylab(&["construct", "--out", missing.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_guard_exits_3_and_env_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "k.json",
        r#"{"basis":{"kind":"difference","p":0.5,"dim":8},"measure":{"m_max":3,"mode":{"mode":"exhaustive","budget":1000}}}"#,
    );
    assert_eq!(greedylab(&["params", "k_tilde", "--config", &cfg], tmp.path()).status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_greedylab"))
        .args(["params", "k_tilde", "--config", &cfg])
        .env("GREEDYLAB_BUDGET", "1000000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("3,9.0000000000000000e0,exact_on_grid"));
}

#[test]
fn params_outputs_are_identical_across_jobs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "q.json",
        r#"{"basis":{"kind":"dkk","space":{"s":{"kind":"lp","p":2,"dim":15},"x":{"kind":"difference","p":0.5,"dim":4},"partition":{"sizes":[1,2,4,8]}}},"measure":{"trials":400,"seed":3}}"#,
    );
    let mut runs = Vec::new();
    for jobs in ["1", "3"] {
        let out = tmp.path().join(format!("out{jobs}"));
        let o = greedylab(
            &["params", "quasi_greedy", "--config", &cfg, "--seed", "9", "--jobs", jobs, "--out", out.to_str().unwrap()],
            tmp.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        runs.push((fs::read(out.join("report.json")).unwrap(), fs::read(out.join("report.csv")).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
    let report: Value = serde_json::from_slice(&runs[0].0).unwrap();
    assert_eq!(report["search"]["seed"], 9);
}

#[test]
fn verify_rechecks_witnesses() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "e.json",
        r#"{"space":{"kind":"lp","p":0.5,"dim":4},"measure":{"name":"beta","r":4,"q":2,"mode":{"mode":"exhaustive","grid_levels":3}}}"#,
    );
    let out = tmp.path().join("out");
    let o = greedylab(&["params", "beta", "--config", &cfg, "--out", out.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let report_path = out.join("report.json");
    let check = |path: &Path| {
        let body = format!(
            r#"{{"report":{:?},"space":{{"kind":"lp","p":0.5,"dim":4}}}}"#,
            path.to_str().unwrap()
        );
        let v = write(tmp.path(), "v.json", &body);
        greedylab(&["verify", "--config", &v], tmp.path())
    };
    assert_eq!(check(&report_path).status.code(), Some(0));

    let mut report: Value = serde_json::from_slice(&fs::read(&report_path).unwrap()).unwrap();
    report["entries"][3]["value"] = serde_json::json!(9.0);
    let tampered = tmp.path().join("tampered.json");
    fs::write(&tampered, serde_json::to_vec(&report).unwrap()).unwrap();
    assert_eq!(check(&tampered).status.code(), Some(4));
}

#[test]
fn tga_and_construct_write_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "t.json",
        r#"{"space":{"kind":"lp","p":2,"dim":3},"f":[3,-4,0],"tie":"all-maximal"}"#,
    );
    let o = greedylab(&["tga", "--config", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "m,size,residual\n0,0,5.0000000000000000e0\n1,1,3.0000000000000000e0\n2,2,0.0000000000000000e0\n3,3,0.0000000000000000e0\n"
    );
    let o = greedylab(&["construct"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().count() > 5);
}

#[test]
fn reproduce_single_suite_and_unknown_suite() {
    let tmp = tempfile::tempdir().unwrap();
    let o = greedylab(&["reproduce", "regularity-sums"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("criterion 9 regularity-sums: PASS"));
    assert_eq!(greedylab(&["reproduce", "nope"], tmp.path()).status.code(), Some(2));
}

#[test]
fn verify_runs_invariants() {
    let tmp = tempfile::tempdir().unwrap();
    let o = greedylab(&["verify"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.contains("PASS")).count(), 4);
}
