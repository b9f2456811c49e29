use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.json"));
    p.to_string_lossy().into_owned()
}

fn pgc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgc")).args(args).output().expect("run pgc")
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn circle_reconstructs_to_parabola() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let out = pgc(&["reconstruct", &fixture("circle_intrinsic"), "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("s,x,y,z\n"));
    for r in rows(&text) {
        let s = r[0];
        assert!((r[1] - s).abs() < 1e-12 && r[2].abs() < 1e-12 && (r[3] - s * s / 2.0).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn reconstruct_refuses_graph_input() {
    assert_eq!(pgc(&["reconstruct", &fixture("cr_example")]).status.code(), Some(2));
}

#[test]
fn mcoeffs_refuses_torsion_sign_change() {
    let out = pgc(&["reconstruct", &fixture("sign_change"), "--mcoeffs"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("torsion"));
}

#[test]
fn mcoeffs_reports_closed_forms() {
    let out = pgc(&["reconstruct", &fixture("salkowski"), "--mcoeffs"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let forms = v["mcoeffs"]["closed_forms"].as_array().unwrap();
    assert_eq!(forms.len(), 3);
    assert!(forms[0]["middle"].as_f64().unwrap() < 1e-5);
}

#[test]
fn verify_table_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("v.json");
    let out = pgc(&["verify", &fixture("cr_example"), "--out", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.lines().next().unwrap().starts_with("identity"));
    assert!(!table.contains(" fail"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert!(v.to_string().contains("pass"));
}

#[test]
fn circle_verify_skips_torsion_rows() {
    let out = pgc(&["verify", &fixture("circle")]);
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.lines().filter(|l| l.contains("skip") && l.contains("torsion vanishes")).count() >= 2);
}

#[test]
fn plot_writes_svg_even_for_inadmissible_curves() {
    let out = pgc(&["plot", &fixture("line"), "--projection", "xy"]);
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8_lossy(&out.stdout);
    assert!(svg.starts_with("<svg") && svg.contains("frame undefined"));
}

#[test]
fn origin_search_finds_salkowski_center() {
    let out = pgc(&["analyze", &fixture("salkowski"), "--origin", "search"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["origin"]["mode"], "search");
    let p: Vec<f64> = v["origin"]["point"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(p.iter().all(|c| c.abs() < 1e-6), "{p:?}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(pgc(&["analyze", &fixture("circle"), "--projection", "bogus"]).status.code(), Some(2));
    assert_eq!(pgc(&["analyze", "/nonexistent/spec.json"]).status.code(), Some(2));
    assert_eq!(pgc(&["analyze", &fixture("circle"), "--origin", "1,2"]).status.code(), Some(2));
}
