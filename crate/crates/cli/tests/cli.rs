use std::path::Path;
use std::process::{Command, Output};

fn sharpthresh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sharpthresh"))
        .args(args)
        .env_remove("SHARPTHRESH_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    csv::Reader::from_reader(body.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn majority_influences_are_one_half() {
    let out = sharpthresh(&["influence", "--function", "majority3", "--space", "v:p=0.5"]);
    assert!(out.status.success());
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 3);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (k + 1).to_string());
        assert_eq!(row[1], "0.5");
    }
}

#[test]
fn invalid_probability_is_a_schema_error() {
    let out = sharpthresh(&["influence", "--function", "majority3", "--space", "v:p=1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[schema]"));
    assert!(out.stdout.is_empty());
}

#[test]
fn error_categories_have_distinct_codes() {
    // Size limit: a lift wider than the transform allows.
    let size = sharpthresh(&["spectrum", "--function", "majority:n=9", "--p", "0.125"]);
    assert_eq!(size.status.code(), Some(3), "{}", String::from_utf8_lossy(&size.stderr));
    // Hypothesis: the trivial group has symmetry of order 1.
    let hyp = sharpthresh(&[
        "threshold", "verify", "--event", "at_least:k=1,n=4", "--group", "trivial", "--pm", "0.3", "--pp", "0.1",
        "--c3", "1",
    ]);
    assert_eq!(hyp.status.code(), Some(4), "{}", String::from_utf8_lossy(&hyp.stderr));
    assert!(String::from_utf8_lossy(&hyp.stderr).starts_with("error[hypothesis]"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["jm", "sweep", "--s", "8", "--trials", "40", "--p", "0.3:0.7:0.1", "--seed", "3"];
    let a = sharpthresh(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_sharpthresh"))
        .args(args)
        .env("SHARPTHRESH_WORKERS", "1")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mc = ["influence", "--function", "tribes(2,2)", "--space", "v:p=0.25", "--method", "mc", "--trials", "2000"];
    assert_eq!(sharpthresh(&mc).stdout, sharpthresh(&mc).stdout);
}

#[test]
fn failures_leave_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.csv");
    let out = sharpthresh(&[
        "--output",
        target.to_str().unwrap(),
        "influence",
        "--function",
        "majority3",
        "--space",
        "v:p=0",
    ]);
    assert!(!out.status.success());
    assert!(files_in(dir.path()).is_empty());

    let ok = sharpthresh(&[
        "--output",
        target.to_str().unwrap(),
        "influence",
        "--function",
        "majority3",
        "--space",
        "v:p=0.25",
    ]);
    assert!(ok.status.success());
    assert_eq!(files_in(dir.path()), vec!["out.csv".to_string()]);
    assert!(std::fs::read_to_string(&target).unwrap().contains("# config: "));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        r#"{"command": "influence", "function": "majority3",
            "space": {"kind": "two_point", "p": 0.25}, "format": "json"}"#,
    )
    .unwrap();
    let base = sharpthresh(&["--config", config.to_str().unwrap(), "influence"]);
    assert!(base.status.success(), "{}", String::from_utf8_lossy(&base.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&base.stdout).unwrap();
    assert_eq!(doc["config"]["space"], "v:n=3,p=0.25");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);

    let over = sharpthresh(&["--config", config.to_str().unwrap(), "influence", "--space", "v:p=0.5"]);
    let doc: serde_json::Value = serde_json::from_slice(&over.stdout).unwrap();
    assert_eq!(doc["config"]["space"], "v:n=3,p=0.5");
    assert_eq!(doc["rows"][0]["influence"], 0.5);

    std::fs::write(&config, r#"{"function": "majority3", "space": "v:p=0.5", "bogus": 1}"#).unwrap();
    let bad = sharpthresh(&["--config", config.to_str().unwrap(), "influence"]);
    assert_eq!(bad.status.code(), Some(2));

    std::fs::write(&config, r#"{"command": "spectrum", "function": "majority3"}"#).unwrap();
    let wrong = sharpthresh(&["--config", config.to_str().unwrap(), "influence"]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn threshold_verify_searches_c3() {
    let out = sharpthresh(&[
        "--format", "json", "threshold", "verify", "--event", "at_least:k=1,n=5", "--pm", "0.35", "--pp", "0.06",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["summary"]["verdict"], true);
    assert_eq!(doc["summary"]["orbit_constant"], true);
    assert!(doc["config"]["c3"].as_f64().unwrap() > 0.0);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 33);
}

#[test]
fn curve_is_nondecreasing() {
    let out = sharpthresh(&[
        "threshold", "curve", "--event", "at_least:k=2", "--space", "w:n=3,pm=0.3,pp=0.1", "--points", "9",
    ]);
    assert!(out.status.success());
    let g: Vec<f64> = data_rows(&stdout(&out)).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(g.len(), 9);
    assert!(g.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn ineq_check_and_frontier() {
    let check = sharpthresh(&[
        "ineq", "check", "--id", "t2", "--function", "majority3", "--space", "v:p=0.25", "--c", "0.5",
    ]);
    assert!(check.status.success());
    let row = &data_rows(&stdout(&check))[0];
    assert_eq!(row[0], "t2");
    assert_eq!(row[6], "holds");

    let frontier = sharpthresh(&["ineq", "frontier", "--id", "bkkkl", "--family", "monotone:n=2,p=0.5"]);
    assert!(frontier.status.success());
    let text = stdout(&frontier);
    let value: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# value: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(value > 0.0);

    let unknown = sharpthresh(&["ineq", "frontier", "--id", "kkl"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn render_writes_a_pixmap() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("jm.ppm");
    let out = sharpthresh(&["--output", target.to_str().unwrap(), "jm", "render", "--s", "4", "--resolution", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = std::fs::read(&target).unwrap();
    assert!(bytes.starts_with(b"P6\n# config: "));
    let header_end = bytes.windows(4).position(|w| w == b"255\n").unwrap() + 4;
    assert_eq!(bytes.len() - header_end, 16 * 16 * 3);

    let no_target = sharpthresh(&["jm", "render"]);
    assert_eq!(no_target.status.code(), Some(2));
}

#[test]
fn accept_reports_a_table() {
    let out = sharpthresh(&["accept", "--quick", "--criterion", "4", "--criterion", "8"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[2] == "PASS"));
    assert!(text.contains("# overall: PASS"));
}
