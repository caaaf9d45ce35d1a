use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn obraid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obraid"))
        .args(args)
        .env_remove("OBRAID_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn re_parts(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|z| z[0].as_f64().unwrap())
        .collect()
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(code(&obraid(&["verify", "ybe", "--N", "2"])), 2);
    assert_eq!(code(&obraid(&["verify"])), 2);
    assert_eq!(code(&obraid(&["verify", "ybe", "--q", "-1"])), 2);
    assert_eq!(code(&obraid(&["verify", "ybe", "--tol-ybe", "0"])), 2);
    assert_eq!(code(&obraid(&["spectrum", "--N", "3", "--r", "12"])), 2);
    assert_eq!(
        code(&obraid(&["spectrum", "--r", "2", "--omega", "1/3"])),
        2
    );
    assert_eq!(code(&obraid(&["frobnicate"])), 2);
    let out = obraid(&["verify", "trace", "--N", "2"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--N must be at least 3"));
}

#[test]
fn failing_check_exits_with_1() {
    let out = obraid(&[
        "verify",
        "ybe",
        "--N",
        "3",
        "--q",
        "1.3",
        "--tol-ybe",
        "1e-300",
    ]);
    assert_eq!(code(&out), 1);
    let doc = json_of(&out);
    assert_eq!(doc["passed"], false);
    assert_eq!(doc["checks"][0]["status"], "fail");
}

#[test]
fn symbolic_trace_for_five_states() {
    let out = obraid(&["verify", "trace", "--N", "5", "--r", "3"]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    let row = &doc["checks"][0]["detail"]["rows"][0];
    assert_eq!(row["exact"], true);
    assert_eq!(row["trace"], "5*K^3 + 15*K^2 + 15*K + 5");
}

#[test]
fn full_suite_passes() {
    let out = obraid(&["verify", "--all", "--N", "3", "--r", "3", "--q", "1.3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_of(&out);
    let names: Vec<&str> = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            assert_eq!(c["status"], "pass");
            c["name"].as_str().unwrap()
        })
        .collect();
    assert_eq!(names, ["ybe", "trace", "commute", "rtt", "cayley"]);
}

#[test]
fn ybe_report_fields() {
    let out = obraid(&[
        "verify", "ybe", "--N", "4", "--q", "0.7,1.6", "--grid", "3", "--random", "5", "--seed",
        "9",
    ]);
    assert_eq!(code(&out), 0);
    let d = &json_of(&out)["checks"][0]["detail"];
    assert!(d["residual_max"].as_f64().unwrap() < 1e-10);
    assert_eq!(d["grid"].as_array().unwrap().len(), 3);
    assert_eq!(d["params"]["N"], 4);
}

#[test]
fn spectrum_two_site_coefficients() {
    let out = obraid(&["spectrum", "--N", "3", "--r", "2", "--q", "1", "--n", "4"]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    let mut fs: Vec<Vec<i64>> = doc["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| re_parts(&r["f"]).iter().map(|x| x.round() as i64).collect())
        .collect();
    fs.sort();
    assert_eq!(fs, vec![vec![-1, 0, -1], vec![1, 0, 1], vec![1, 6, 1]]);
    let rec = &doc["records"][0];
    for key in [
        "N",
        "r",
        "n",
        "omega",
        "f",
        "multiplicity",
        "eigvec",
        "basis",
    ] {
        assert!(rec.get(key).is_some(), "missing {key}");
    }
    assert_eq!(rec["omega"]["den"], 1);
}

#[test]
fn hamiltonian_two_sites_at_q_one() {
    let out = obraid(&["hamiltonian", "--N", "3", "--r", "2", "--q", "1"]);
    assert_eq!(code(&out), 0);
    let row = &json_of(&out)["hamiltonians"][0];
    let mut ev = re_parts(&row["eigenvalues_over_kdot0"]);
    ev.sort_by(f64::total_cmp);
    assert!(ev[..8].iter().all(|x| x.abs() < 1e-10));
    assert!((ev[8] - 6.0).abs() < 1e-10);
    assert!((row["trace_over_kdot0"].as_f64().unwrap() - 6.0).abs() < 1e-10);
    assert_eq!(row["selection_violations"].as_array().unwrap().len(), 0);
}

#[test]
fn dims_match_golden_file() {
    let out = obraid(&["dims", "--N", "3", "--r", "3"]);
    assert_eq!(code(&out), 0);
    let golden = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/dims_N3_r3.json"),
    )
    .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);

    let doc = json_of(&obraid(&["dims", "--N", "3", "--r", "5"]));
    let row = doc["tables"][0]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["n"] == 10)
        .unwrap()
        .clone();
    assert_eq!(row["dim"], 51);
    assert_eq!(doc["consistent"], true);
}

#[test]
fn output_is_deterministic_and_versioned() {
    let args = ["spectrum", "--N", "3", "--r", "3", "--q", "0.7,1.6"];
    let a = obraid(&args);
    let b = obraid(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let doc = json_of(&a);
    assert_eq!(doc["schema_version"], 1);
    let hash = doc["oracle_sha256"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));

    let a = obraid(&[
        "verify", "--all", "--N", "3", "--r", "2", "--random", "3", "--seed", "4",
    ]);
    let b = obraid(&[
        "verify", "--all", "--N", "3", "--r", "2", "--random", "3", "--seed", "4",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cayley_emits_v_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v.csv");
    let out = obraid(&[
        "cayley",
        "--q",
        "1.1",
        "--theta",
        "0.3",
        "--lambda",
        "0.5",
        "--emit-v",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    assert!(doc["closed_form_deviation"].as_f64().unwrap() < 1e-10);
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "a,b,c,d,re,im");
    assert_eq!(rows.len(), 82);

    assert_eq!(
        code(&obraid(&["cayley", "--q", "1.1", "--lambda", "-1"])),
        2
    );
    assert_eq!(
        code(&obraid(&["cayley", "--q", "1.1", "--lambda", "zz"])),
        2
    );
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_obraid"))
        .args(["hamiltonian", "--N", "3", "--r", "2", "--q", "1.4"])
        .env("OBRAID_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("hamiltonian.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(doc["command"], "hamiltonian");
    let csv = std::fs::read_to_string(dir.path().join("hamiltonian.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn report_bundles_oracle_comparison() {
    let out = obraid(&["report", "--N", "3", "--r", "2", "--q", "1.6"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_of(&out);
    let oracle = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "oracle")
        .unwrap();
    assert_eq!(oracle["status"], "pass");
    assert!(!oracle["detail"]["rows"][0]["sectors"]
        .as_array()
        .unwrap()
        .is_empty());
    assert!(!doc["spectra"].as_array().unwrap().is_empty());
    assert!(!doc["dims"].as_array().unwrap().is_empty());
}

#[test]
fn oracle_skips_unknown_chains() {
    let out = obraid(&["verify", "oracle", "--N", "5", "--r", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["checks"][0]["status"], "skip");
}

#[test]
fn triplet_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.txt");
    let out = obraid(&[
        "spectrum",
        "--r",
        "2",
        "--n",
        "2",
        "--dump-t",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# dim 9\n"));
    assert!(text.lines().any(|l| l == "0 0 K^2 + 1"));
}
