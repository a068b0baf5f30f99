use std::path::Path;
use std::process::{Command, Output};

use conic_census::cli::{parse_config, run_report, RunConfig, Task};
use conic_census::exec::Exec;
use conic_census::Error;

const TRIVIAL: &str = r#"{"field":{"p":3,"n":1},"bundle":{"l":0,"a":[1],"b":[1],"c":[-1]},"task":"predict","params":{"d":2}}"#;

fn run(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let path = dir.join("config.json");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_conic-census"))
        .arg("--config")
        .arg(&path)
        .args(extra)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn parse_config_examples() {
    assert!(parse_config(TRIVIAL).is_ok());
    let p2 = TRIVIAL.replace("\"p\":3", "\"p\":2");
    match parse_config(&p2) {
        Err(Error::ConfigError { path, .. }) => assert_eq!(path, "field.p"),
        other => panic!("{other:?}"),
    }
    let typo = TRIVIAL.replace("\"d\":2", "\"d\":\"two\"");
    match parse_config(&typo) {
        Err(Error::ConfigError { path, .. }) => assert_eq!(path, "params.d"),
        other => panic!("{other:?}"),
    }
    let odd = r#"{"field":{"p":3},"bundle":{"l":1,"a":[0,1],"b":[1,0],"c":[1,1]},"task":"enumerate","params":{"d":1,"e":2}}"#;
    assert_eq!(parse_config(odd).unwrap_err(), Error::OddDegreeUnsupported(1));
    let shared = r#"{"field":{"p":3},"bundle":{"l":1,"a":[0,1],"b":[0,1],"c":[1,0]},"task":"classify"}"#;
    assert!(matches!(parse_config(shared), Err(Error::NonReducedFiber(_))));
    let digits = r#"{"field":{"p":3,"n":2},"bundle":{"l":0,"a":[[1,1]],"b":[[0,1]],"c":[[1]]},"task":"classify"}"#;
    assert!(parse_config(digits).is_ok());
}

#[test]
fn zeta_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = TRIVIAL.replace("\"predict\"", "\"zeta\"").replace("\"d\":2", "\"s\":3");
    let o = run(dir.path(), &cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"243/208\""));
}

#[test]
fn predict_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), TRIVIAL, &[]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"]["leading_coeff"]["exact"], "104/9");
    assert_eq!(v["results"]["a"]["exact"], "27");
    assert_eq!(v["config"]["params"]["precision"], 50);
    assert!(v.get("timings").is_none());
}

#[test]
fn classify_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"field":{"p":3},"bundle":{"l":1,"a":[0,1],"b":[1,0],"c":[1,1]},"task":"classify"}"#;
    let o = run(dir.path(), cfg, &[]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let classes: Vec<&str> = v["results"]["singular_fibers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["class"].as_str().unwrap())
        .collect();
    assert_eq!(classes, ["NonSplitPair", "NonSplitPair", "SplitPair"]);
    assert_eq!(v["results"]["total_degree"], 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &TRIVIAL.replace("\"p\":3", "\"p\":2"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("field.p"));
    let o = run(dir.path(), "{ not json", &[]);
    assert_eq!(o.status.code(), Some(2));
    let cmp = TRIVIAL.replace("\"d\":2", "\"d\":2,\"e_list\":[4,6]");
    let o = run(dir.path(), &cmp, &["--task", "compare", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["complete"], false);
    let o = run(dir.path(), &cmp, &["--task", "compare", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert!(csv.starts_with("d,e,predicted,"));
    assert!(csv.contains("2,4,8424,"));
}

#[test]
fn enumerate_report_embeds_threshold() {
    let cfg = TRIVIAL.replace("\"predict\"", "\"enumerate\"").replace("\"d\":2", "\"d\":2,\"e\":4");
    let cfg: RunConfig = RunConfig::from_json(&cfg).unwrap();
    assert_eq!(cfg.task, Task::Enumerate);
    let out = run_report(&cfg, Exec::Sequential, false);
    assert_eq!(out.exit_code(), 0);
    let r = &out.report["results"];
    assert_eq!(r["n_emp"]["value"], 0);
    assert_eq!(r["M_f"], "8424");
    assert_eq!(r["M"], "7260");
    assert_eq!(r["dims"][0]["dim"], r["dims"][0]["chi"]);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"field":{"p":3},"bundle":{"l":2,"a":[1,0,-1],"b":[1,0,1],"c":[0,1,0]},"task":"compare","params":{"d":2,"e_list":[2,4]}}"#;
    let a = run(dir.path(), cfg, &["--sequential"]);
    let b = run(dir.path(), cfg, &["--threads", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
