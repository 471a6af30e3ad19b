use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sirf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sirf")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn analyze(dir: &TempDir, spec: &str) -> (PathBuf, Value) {
    let model = write(dir, "model.json", spec);
    let out = dir.path().join("report.json");
    let res = sirf(&["analyze", "--model", s(&model), "--out", s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    (out, serde_json::from_str(&text).unwrap())
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/analysis-report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn stabilities(report: &Value) -> Vec<String> {
    report["endemic"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["stability"].as_str().unwrap().to_string())
        .collect()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|row| row.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn example2_report() {
    let dir = TempDir::new().unwrap();
    let (_, r) = analyze(&dir, r#"{"kind":"example2","k":5.0}"#);
    assert_eq!(stabilities(&r), ["stable"]);
    assert_eq!(r["disease_free"]["stability"], "saddle");
    assert_eq!(r["certificates"]["global"]["verdict"], "globally_stable_endemic");
    assert_eq!(r["certificates"]["global"]["criterion"], "endemic_global_stability");
    assert_eq!(r["certificates"]["existence"]["witness"], 0.0);
}

#[test]
fn example1_report() {
    let dir = TempDir::new().unwrap();
    let (_, r) = analyze(&dir, r#"{"kind":"example1","n":5,"k":5.0,"f0":2.5}"#);
    let st = stabilities(&r);
    assert_eq!(st.len(), 10);
    assert_eq!(st.iter().filter(|s| *s == "saddle").count(), 5);
    assert_eq!(st.iter().filter(|s| *s == "stable").count(), 5);
    assert_eq!(r["disease_free"]["stability"], "stable");
    assert_eq!(r["certificates"]["global"]["verdict"], "unknown");
    assert_eq!(r["certificates"]["successors"].as_array().unwrap().len(), 5);
}

#[test]
fn constant_below_threshold_report() {
    let dir = TempDir::new().unwrap();
    let (_, r) = analyze(&dir, r#"{"kind":"constant","beta_tilde":4.0,"k":5.0}"#);
    assert!(r["endemic"].as_array().unwrap().is_empty());
    assert_eq!(r["disease_free"]["stability"], "stable");
    assert_eq!(r["certificates"]["global"]["verdict"], "globally_stable_disease_free");
}

#[test]
fn reports_match_the_published_schema() {
    let v = validator();
    let specs = [
        r#"{"kind":"example1","n":5,"k":5.0}"#,
        r#"{"kind":"example2","k":5.0}"#,
        r#"{"kind":"constant","beta_tilde":5.0,"k":5.0}"#,
        r#"{"k": 3.0, "f": {"kind": "expr", "text": "6*exp(-2*R)"}}"#,
        r#"{"raw": {"mu": 0.02, "gamma": 0.08}, "f": {"kind": "constant", "beta": 0.2}}"#,
        r#"{"k": 2.5, "f": {"kind": "expr", "text": "2 + 3*sin(pi*R)^2"}}"#,
    ];
    for spec in specs {
        let dir = TempDir::new().unwrap();
        let (_, r) = analyze(&dir, spec);
        let errors: Vec<String> = v.iter_errors(&r).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{spec}: {errors:?}");
    }
}

#[test]
fn analysis_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"kind":"example1","n":5,"k":5.0}"#);
    let a = sirf(&["analyze", "--model", s(&model)]).stdout;
    let b = sirf(&["analyze", "--model", s(&model)]).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn invalid_inputs_exit_with_two() {
    let dir = TempDir::new().unwrap();
    for (name, spec) in [
        ("syntax.json", "{not json"),
        ("parse.json", r#"{"k": 5, "f": {"kind": "expr", "text": "2*(R"}}"#),
        ("k.json", r#"{"k": 0.5, "f": {"kind": "expr", "text": "R"}}"#),
        ("twice.json", r#"{"k": 5, "f": {"kind": "example2", "k": 5}}"#),
        ("f0.json", r#"{"kind": "example1", "n": 5, "k": 5, "f0": 7}"#),
    ] {
        let p = write(&dir, name, spec);
        let res = sirf(&["analyze", "--model", s(&p)]);
        assert_eq!(
            res.status.code(),
            Some(2),
            "{name}: {}",
            String::from_utf8_lossy(&res.stderr)
        );
        assert!(!res.stderr.is_empty());
    }
    let res = sirf(&["analyze", "--model", "/nonexistent/model.json"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn evaluation_failure_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "log.json", r#"{"k": 5, "f": {"kind": "expr", "text": "log(R)"}}"#);
    let res = sirf(&["analyze", "--model", s(&p)]);
    assert_eq!(res.status.code(), Some(3), "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn simulate_converges_to_endemic_state() {
    let dir = TempDir::new().unwrap();
    let (_, r) = analyze(&dir, r#"{"kind":"example2","k":5.0}"#);
    let model = dir.path().join("model.json");
    let out = dir.path().join("t.csv");
    let res = sirf(&[
        "simulate",
        "--model",
        s(&model),
        "--init",
        "0.01,0",
        "--t-end",
        "200",
        "--stride",
        "1000",
        "--out",
        s(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["tau", "I", "R"]);
    assert_eq!(rows.len(), 201);
    let last = rows.last().unwrap();
    assert_eq!(last[0], "200");
    let (i, rr): (f64, f64) = (last[1].parse().unwrap(), last[2].parse().unwrap());
    let e = &r["endemic"][0];
    let d = (i - e["i"].as_f64().unwrap()).hypot(rr - e["r"].as_f64().unwrap());
    assert!(d <= 1e-6, "{d}");
}

#[test]
fn simulate_recovered_decay() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"kind":"example2","k":5.0}"#);
    let out = dir.path().join("t.csv");
    let res = sirf(&[
        "simulate",
        "--model",
        s(&model),
        "--init",
        "0,0.5",
        "--t-end",
        "5",
        "--stride",
        "100",
        "--out",
        s(&out),
    ]);
    assert!(res.status.success());
    let (_, rows) = read_csv(&out);
    for row in rows {
        let t: f64 = row[0].parse().unwrap();
        let r: f64 = row[2].parse().unwrap();
        assert_eq!(row[1], "0");
        assert!((r - 0.5 * (-t).exp()).abs() <= 1e-8);
    }
}

#[test]
fn simulate_full_system() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"kind":"example2","k":5.0}"#);
    let out = dir.path().join("t.csv");
    let res = sirf(&[
        "simulate",
        "--model",
        s(&model),
        "--init",
        "0.3,0.3,0.4",
        "--t-end",
        "20",
        "--method",
        "rkf45",
        "--out",
        s(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["tau", "S", "I", "R"]);
    for row in rows {
        let sum: f64 = row[1..].iter().map(|v| v.parse::<f64>().unwrap()).sum();
        assert!((sum - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn simulate_rejects_bad_init() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"kind":"example2","k":5.0}"#);
    for init in ["0.6,0.5", "-0.1,0.2", "0.5,0.5,0.5", "a,b", "0.1"] {
        let res = sirf(&["simulate", "--model", s(&model), "--init", init, "--t-end", "1"]);
        assert_eq!(res.status.code(), Some(2), "{init}");
    }
}

#[test]
fn basin_for_unique_endemic_state() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"kind":"example2","k":5.0}"#);
    let out = dir.path().join("b.csv");
    let res = sirf(&[
        "basin",
        "--model",
        s(&model),
        "--grid",
        "20",
        "--t-end",
        "200",
        "--out",
        s(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["I0", "R0", "outcome_id"]);
    assert_eq!(rows.len(), 210);
    for row in &rows {
        let i0: f64 = row[0].parse().unwrap();
        let want = if i0 > 0.0 { "1" } else { "0" };
        assert_eq!(row[2], want, "{row:?}");
    }
    let again = dir.path().join("b2.csv");
    sirf(&[
        "basin",
        "--model",
        s(&model),
        "--grid",
        "20",
        "--t-end",
        "200",
        "--out",
        s(&again),
    ]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

fn count(svg: &str, needle: &str) -> usize {
    svg.matches(needle).count()
}

#[test]
fn plot_rate_overlays() {
    let dir = TempDir::new().unwrap();
    let (report, _) = analyze(&dir, r#"{"kind":"example1","n":5,"k":5.0}"#);
    let out = dir.path().join("f.svg");
    assert!(sirf(&["plot", "--report", s(&report), "--out", s(&out)])
        .status
        .success());
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(count(&svg, "marker saddle"), 5);
    assert_eq!(count(&svg, "marker stable"), 5);
    assert!(svg.contains("stroke-dasharray=\"6 4\""));
    // markers alternate along R
    let ids: Vec<&str> = svg
        .lines()
        .filter(|l| l.contains("class=\"marker"))
        .map(|l| if l.contains("saddle") { "d" } else { "c" })
        .collect();
    assert_eq!(ids.concat(), "dcdcdcdcdc");

    let dir = TempDir::new().unwrap();
    let (report, _) = analyze(&dir, r#"{"kind":"example2","k":5.0}"#);
    sirf(&["plot", "--report", s(&report), "--out", s(&out)]);
    let svg = std::fs::read_to_string(&out).unwrap();
    assert_eq!((count(&svg, "marker stable"), count(&svg, "marker saddle")), (1, 0));

    let dir = TempDir::new().unwrap();
    let (report, _) = analyze(&dir, r#"{"kind":"constant","beta_tilde":4.0,"k":5.0}"#);
    sirf(&["plot", "--report", s(&report), "--out", s(&out)]);
    let svg = std::fs::read_to_string(&out).unwrap();
    assert_eq!(count(&svg, "class=\"marker"), 0);
    assert!(svg.contains("class=\"f\"") && svg.contains("class=\"g\""));
}

#[test]
fn plot_basin_and_trajectories() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"kind":"example2","k":5.0}"#);
    let basin = dir.path().join("b.csv");
    sirf(&[
        "basin",
        "--model",
        s(&model),
        "--grid",
        "8",
        "--t-end",
        "100",
        "--out",
        s(&basin),
    ]);
    let out = dir.path().join("b.svg");
    assert!(sirf(&["plot", "--basin", s(&basin), "--out", s(&out)]).status.success());
    let svg = std::fs::read_to_string(&out).unwrap();
    assert_eq!(count(&svg, "class=\"cell\""), 36);

    let mut args = vec!["plot".to_string()];
    for (j, init) in ["0.01,0", "0.5,0.1", "0,0.9"].iter().enumerate() {
        let p = dir.path().join(format!("t{j}.csv"));
        sirf(&[
            "simulate",
            "--model",
            s(&model),
            "--init",
            init,
            "--t-end",
            "30",
            "--stride",
            "100",
            "--out",
            s(&p),
        ]);
        args.extend(["--traj".to_string(), s(&p).to_string()]);
    }
    args.extend(["--out".to_string(), s(&out).to_string()]);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    assert!(sirf(&args).status.success());
    let svg = std::fs::read_to_string(&out).unwrap();
    assert_eq!(count(&svg, "class=\"trajectory\""), 3);

    let res = sirf(&["plot", "--out", s(&out)]);
    assert_eq!(res.status.code(), Some(2));
}
