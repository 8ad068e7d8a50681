use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn equifact(scenario: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equifact"))
        .arg("check")
        .arg(scenario)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

const SPHERE: &str = r#"model = "sphere"
k_lift = 0
N = 256
K = 8
margin = 0.05
checks = ["full"]
l_range = [-2, 2]
"#;

#[test]
fn sphere_scan_factorises_at_zero_and_minus_one() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(tmp.path(), "sphere.toml", SPHERE);
    let out = tmp.path().join("out");
    let run = equifact(&scenario, &["--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));

    let doc = report(&out);
    assert_eq!(doc["schema_version"], 1);
    let verdicts: Vec<(i64, String)> = doc["scan"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["ell"][0].as_i64().unwrap(), r["factorises"].as_str().unwrap().to_string()))
        .collect();
    let expected: Vec<(i64, String)> =
        [(-2, "fail"), (-1, "pass"), (0, "pass"), (1, "fail"), (2, "fail")].iter().map(|(l, v)| (*l, v.to_string())).collect();
    assert_eq!(verdicts, expected);

    let text = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(text.contains("k−ℓ") && text.contains("parity"));
    assert_eq!(text.lines().filter(|l| l.starts_with("-1 ") || l.starts_with("0 ")).count(), 2);
    assert!(fs::read_to_string(out.join("run.log")).unwrap().starts_with("started "));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(tmp.path(), "sphere.toml", &SPHERE.replace("[-2, 2]", "[0, 1]"));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(equifact(&scenario, &["--out", a.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(equifact(&scenario, &["--out", b.to_str().unwrap()]).status.code(), Some(0));
    for file in ["report.json", "report.txt"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    let json = fs::read_to_string(a.join("report.json")).unwrap();
    assert!(!json.contains("started"));
    assert!(json.contains("e0"), "floats use exponent form");
}

#[test]
fn flat_torus_passes_everything() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(tmp.path(), "torus.toml", "model = \"torus\"\nn = 1\nK = 4\nchecks = [\"full\"]\noutput = \"res\"\n");
    let run = equifact(&scenario, &[]);
    assert_eq!(run.status.code(), Some(0));
    let doc = report(&tmp.path().join("res"));
    let row = &doc["scan"][0];
    for (name, v) in row["verdicts"].as_object().unwrap() {
        assert_eq!(v, "pass", "{name}");
    }
    assert_eq!(row["factorises"], "pass");
}

#[test]
fn warped_gap_slope_is_flagged() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        tmp.path(),
        "warped.toml",
        "model = \"warped_torus\"\nN = 32\nK = 5\nprofile = \"sin-bump\"\nchecks = [\"product_gap\"]\n",
    );
    let out = tmp.path().join("out");
    assert_eq!(equifact(&scenario, &["--out", out.to_str().unwrap()]).status.code(), Some(0));
    let gap = &report(&out)["reports"][0]["product_gap"];
    assert_eq!(gap["unbounded"], true);
    let slope = gap["slope"].as_f64().unwrap();
    assert!((slope - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-6);
    let text = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(text.contains("unbounded (nonzero slope)"));
    let gap_rows = text.lines().skip_while(|l| !l.contains("|k|")).skip(1).take_while(|l| !l.is_empty());
    assert_eq!(gap_rows.count(), 11);
}

#[test]
fn nc_torus_relations_are_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        tmp.path(),
        "nc.toml",
        "model = \"nc_torus\"\nN = 16\nK = 3\ntheta_matrix = [[\"0\", \"1/3\"], [\"-1/3\", \"0\"]]\nchecks = [\"ssa\", \"cond1\"]\nell = [0, 0]\n",
    );
    let out = tmp.path().join("out");
    assert_eq!(equifact(&scenario, &["--out", out.to_str().unwrap()]).status.code(), Some(0));
    let doc = report(&out);
    let rel = &doc["relations"][0];
    assert_eq!(rel["exact"], true);
    assert_eq!(rel["holds"], true);
    assert_eq!(doc["scenario"]["theta_matrix"][0][1], "1/3");
    // only two checks requested, so factorisation is not decided
    assert_eq!(doc["scan"][0]["factorises"], "skipped");
}

#[test]
fn flags_override_scenario_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(tmp.path(), "sphere.toml", &SPHERE.replace("[-2, 2]", "0"));
    let out = tmp.path().join("out");
    let run = equifact(&scenario, &["--out", out.to_str().unwrap(), "--window", "5", "--refinements", "2"]);
    assert_eq!(run.status.code(), Some(0));
    let doc = report(&out);
    assert_eq!(doc["scenario"]["K"], 5);
    assert_eq!(doc["scenario"]["refinements"], 2);
    assert_eq!(doc["reports"][0]["positivity"]["infima"].as_array().unwrap().len(), 3);
}

#[test]
fn configuration_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("model = \"klein\"\nK = 3\nchecks = [\"ssa\"]\n", "unknown model"),
        ("model = \"torus\"\nK = 1\nchecks = [\"ssa\"]\n", "K must be at least 2"),
        ("model = \"warped_torus\"\nN = 8\nK = 3\nchecks = [\"ssa\"]\n", "N must be at least 16"),
        ("model = \"torus\"\nK = 3\nchecks = []\n", "checks must not be empty"),
        (
            "model = \"nc_torus\"\nN = 16\nK = 3\nchecks = [\"ssa\"]\ntheta_matrix = [[0, 1], [1, 0]]\n",
            "skew-symmetry violated",
        ),
        ("model = \"torus\"\nK = 3\nchecks = [\"ssa\"]\nspeed = 2\n", "unknown field `speed`"),
    ];
    for (i, (body, needle)) in cases.iter().enumerate() {
        let scenario = write_scenario(tmp.path(), &format!("bad{i}.toml"), body);
        let run = equifact(&scenario, &["--out", tmp.path().join("never").to_str().unwrap()]);
        let stderr = String::from_utf8_lossy(&run.stderr);
        assert_eq!(run.status.code(), Some(1), "{body}");
        assert!(stderr.contains(needle), "{stderr}");
        assert!(stderr.contains(&format!("bad{i}.toml:")), "{stderr}");
    }
    assert!(!tmp.path().join("never").exists());

    let missing = equifact(&tmp.path().join("absent.toml"), &[]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("absent.toml"));
}

#[test]
fn inconclusive_run_exits_with_two() {
    // a 1e-9 analytic tolerance is below the grid error of the condition-2 norms
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        tmp.path(),
        "tight.toml",
        &format!("{}analytic_tolerance = 1e-9\n", SPHERE.replace("[-2, 2]", "0").replace("[\"full\"]", "[\"cond2\"]")),
    );
    let out = tmp.path().join("out");
    let run = equifact(&scenario, &["--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    let doc = report(&out);
    assert_eq!(doc["scan"][0]["verdicts"]["condition2"], "inconclusive");
    assert_eq!(doc["conclusive"], false);
    assert!(fs::read_to_string(out.join("report.txt")).unwrap().contains("some checks inconclusive"));
}

#[test]
fn shipped_scenarios_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let tmp = tempfile::tempdir().unwrap();
    let mut count = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let out = tmp.path().join(path.file_stem().unwrap());
            let run = equifact(&path, &["--out", out.to_str().unwrap()]);
            assert_eq!(run.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&run.stderr));
            count += 1;
        }
    }
    assert_eq!(count, 4);
}
