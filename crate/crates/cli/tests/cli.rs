use std::io::Write;
use std::process::{Command, Output, Stdio};

fn trajgroup(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_trajgroup"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn figure2_csv() -> String {
    let out = trajgroup(&["generate", "--model", "figure2"], None);
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn analyze_reports_the_four_groups() {
    let out = trajgroup(&["analyze", "--eps", "0.5", "--group-size", "2", "--duration", "1.5"], Some(&figure2_csv()));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let groups = v["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 4);
    assert_eq!(groups[3]["entities"], serde_json::json!(["x1", "x2", "x3", "x4"]));
    assert!(v["reduced_reeb"]["edges"].is_array());
}

#[test]
fn output_is_deterministic() {
    let csv = figure2_csv();
    let args = ["analyze", "--eps", "0.5", "--alpha", "0.4"];
    let a = trajgroup(&args, Some(&csv));
    let b = trajgroup(&args, Some(&csv));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn reads_files_and_writes_files() {
    let dir = std::env::temp_dir().join(format!("trajgroup-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("fig2.csv");
    let output = dir.join("groups.csv");
    std::fs::write(&input, figure2_csv()).unwrap();
    let out = trajgroup(
        &[
            "analyze",
            "--input",
            input.to_str().unwrap(),
            "--output",
            output.to_str().unwrap(),
            "--eps",
            "0.5",
            "--group-size",
            "2",
            "--duration",
            "1.5",
            "--format",
            "csv",
        ],
        None,
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(&output).unwrap();
    assert_eq!(text.lines().next(), Some("start,end,size,ids"));
    assert_eq!(text.lines().count(), 5);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn export_writes_dot() {
    let out = trajgroup(&["export", "--eps", "0.5", "--format", "dot", "--verbose"], Some(&figure2_csv()));
    assert!(out.status.success());
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("->"));
}

#[test]
fn query_largest_at() {
    let out = trajgroup(
        &["query", "--eps", "0.5", "--group-size", "2", "--kind", "largest-at", "--time", "1.5"],
        Some(&figure2_csv()),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["group"]["entities"], serde_json::json!(["x1", "x2", "x3", "x4"]));
}

#[test]
fn query_by_entity() {
    let out = trajgroup(
        &["query", "--eps", "0.5", "--group-size", "2", "--kind", "max-partners", "--entity", "x5"],
        Some(&figure2_csv()),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["partners"], 3);
}

#[test]
fn resamples_unsynchronized_input() {
    let rows = "a,0,0,0\na,2,2,0\nb,0,0,0.5\nb,1,1,0.5\nb,2,2,0.5\n";
    assert_eq!(trajgroup(&["analyze", "--eps", "0.5"], Some(rows)).status.code(), Some(2));
    let out = trajgroup(&["analyze", "--eps", "0.5", "--dt", "1", "--format", "csv"], Some(rows));
    assert!(out.status.success());
    assert_eq!(stdout(&out), "start,end,size,ids\n0,2,2,a;b\n");
}

#[test]
fn exit_codes() {
    let csv = figure2_csv();
    // usage errors
    assert_eq!(trajgroup(&["analyze", "--eps", "-1"], Some(&csv)).status.code(), Some(1));
    assert_eq!(trajgroup(&["analyze"], Some(&csv)).status.code(), Some(1));
    assert_eq!(trajgroup(&["query", "--eps", "0.5", "--kind", "nope"], Some(&csv)).status.code(), Some(1));
    assert_eq!(trajgroup(&["query", "--eps", "0.5", "--kind", "largest-at"], Some(&csv)).status.code(), Some(1));
    // data errors
    assert_eq!(trajgroup(&["analyze", "--eps", "0.5", "--input", "/nonexistent/x.csv"], None).status.code(), Some(2));
    assert_eq!(trajgroup(&["analyze", "--eps", "0.5"], Some("a,0,oops,0\n")).status.code(), Some(2));
    let out = trajgroup(&["query", "--eps", "0.5", "--kind", "largest-at", "--time", "99"], Some(&csv));
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(trajgroup(&["--help"], None).status.code(), Some(0));
}
