use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn klrw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klrw")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn enumerate_prints_the_regime() {
    let o = klrw(&["enumerate-sequences", "--quiver", &fixture("kronecker.json"), "--weight", "α=0;β=1/2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("α[0] < β[1/2] < e[1] < f[3/2]"), "{}", stdout(&o));
}

#[test]
fn equivalence_of_tied_orders() {
    let q = fixture("kronecker.json");
    let o = klrw(&["--format", "json", "check-equivalence", "--quiver", &q, "[(α,0),(β,0)] order=[1,2,e@1,f@2]", "[(β,0),(α,0)] order=[1,2,e@2,f@1]"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["equivalent"], true, "{v}");
}

#[test]
fn satake_table_and_total() {
    let o = klrw(&["--format", "json", "--bound", "3", "satake", "--quiver", &fixture("a2.json")]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let dims: u64 = v["table"]["rows"].as_array().unwrap().iter().map(|r| r["dim"].as_u64().unwrap()).sum();
    assert_eq!(dims, 8);
}

#[test]
fn render_writes_svg() {
    let o = klrw(&["--format", "svg", "render-diagram", "--quiver", &fixture("kronecker2.json"), &fixture("kronecker2_diagram.json")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 9);
    assert_eq!(svg.matches(r#"class="dot""#).count(), 1);
}

#[test]
fn monopole_product_in_rank_one() {
    let o = klrw(&["monopole-mul", "--rank", "1", "--matter", "1", "r[-1]", "r[1]"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!stdout(&o).trim().is_empty());
}

#[test]
fn small_restriction_suite_passes() {
    let o = klrw(&["suite", "restriction", "--cases", "5"]);
    assert!(o.status.success(), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
}

#[test]
fn errors_exit_with_two() {
    let o = klrw(&["enumerate-sequences", "--quiver", "no-such-file.json", "--weight", "α=0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no-such-file.json"));
    let o = klrw(&["is-unsteady", "--quiver", &fixture("kronecker.json"), "[(γ,0)]"]);
    assert_eq!(o.status.code(), Some(2));
}
