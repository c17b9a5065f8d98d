use std::path::PathBuf;
use std::process::{Command, Output};

use chromatic::ssq::PageDump;

fn chromatic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chromatic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = chromatic(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).expect("golden file present")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

const CHART: &[&str] = &["chart", "-p", "5", "--stem-min", "-1", "--stem-max", "8", "-N", "8", "--format", "svg-chart"];
const RUN: &[&str] = &["run", "-p", "3", "-N", "4", "--stem-min", "-1", "--stem-max", "8", "--format", "json"];

#[test]
fn svg_chart_matches_golden() {
    let first = stdout(CHART);
    assert_eq!(first, stdout(CHART));
    assert_eq!(first, golden("chart_p5_n8.svg"));
}

#[test]
fn json_dump_matches_golden_and_round_trips() {
    let text = stdout(RUN);
    assert_eq!(text, golden("run_p3_n4.json"));
    let dump: PageDump = serde_json::from_str(&text).expect("schema");
    assert_eq!(dump.prime, 3);
    assert_eq!(dump.pages.first().map(|p| p.r), Some(2));
    assert_eq!(serde_json::to_string_pretty(&dump).unwrap(), text.trim_end());
    let keys: Vec<String> = serde_json::from_str::<serde_json::Value>(&text)
        .unwrap()
        .as_object()
        .unwrap()
        .keys()
        .cloned()
        .collect();
    for key in ["prime", "precision", "window", "pages", "differentials", "e_infinity", "precision_horizon"] {
        assert!(keys.iter().any(|k| k == key), "missing {key}");
    }
}

#[test]
fn exit_codes_are_stable() {
    let code = |args: &[&str]| chromatic(args).status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["run", "-p", "4"]), Some(1));
    assert_eq!(code(&["chart", "--format", "json"]), Some(1));
    assert_eq!(code(&["run", "-p", "3", "-N", "4", "--stem-min", "36", "--stem-max", "36"]), Some(2));
    assert_eq!(code(&["run", "--stem-min", "5", "--stem-max", "2"]), Some(3));
    assert_eq!(code(&["e2", "--stem-min", "0", "--stem-max", "1000000"]), Some(3));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let path = scratch("prime5.conf");
    std::fs::write(&path, "# settings\nprime = 5\nprecision = 6\n").unwrap();
    let conf = path.to_str().unwrap();
    let from_file = stdout(&["abutment", "--config", conf]);
    assert_eq!(from_file, stdout(&["abutment", "-p", "5", "-N", "6"]));
    let overridden = stdout(&["abutment", "--config", conf, "-p", "7"]);
    assert_eq!(overridden, stdout(&["abutment", "-p", "7", "-N", "6"]));
    std::fs::write(&path, "prime = five\n").unwrap();
    assert_eq!(chromatic(&["abutment", "--config", conf]).status.code(), Some(1));
}

#[test]
fn output_flag_writes_file() {
    let path = scratch("chart.svg");
    let mut args = CHART.to_vec();
    args.extend(["-o", path.to_str().unwrap()]);
    assert!(stdout(&args).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), golden("chart_p5_n8.svg"));
}

#[test]
fn subcommands_are_deterministic() {
    let commands: [&[&str]; 6] = [
        &["e2", "-p", "3", "--format", "json"],
        &["abutment", "-p", "3", "-N", "6", "--check"],
        &["cohomology", "-p", "5", "--format", "json"],
        &["mahler", "-p", "3", "-N", "8", "-L", "16"],
        &["limits", "--support", "0,2,3"],
        &["cobar", "-n", "2", "--smax", "3", "-q", "9"],
    ];
    for args in commands {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}

#[test]
fn subcommand_examples() {
    let abutment = stdout(&["abutment", "-p", "3", "-N", "6", "--check"]);
    assert!(abutment.lines().any(|l| l == "1 4 Z/3"));
    assert!(abutment.lines().any(|l| l == "1 0 Z_3"));
    assert!(abutment.contains("E_infinity agrees"));

    let cobar = stdout(&["cobar", "-n", "2", "--smax", "3", "-q", "9"]);
    assert!(cobar.lines().any(|l| l == "3 -3 4 4"));

    let moore = stdout(&["limits", "--moore", "-p", "3"]);
    assert!(moore.starts_with("lim = 0, lim¹ ≠ 0"));

    let mahler = stdout(&["mahler", "-p", "3", "-N", "8", "-L", "16"]);
    assert!(mahler.contains("rank of ker(id - psi): 1"));

    let ascii = stdout(&["chart", "-p", "3", "-N", "4", "--stem-max", "8"]);
    assert!(ascii.contains('*') && ascii.contains('\\'));
}
