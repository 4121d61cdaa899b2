use std::path::PathBuf;
use std::process::Command;

use pcoupling_cli::defs::parse;

fn defs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("defs")
}

fn pcoupling(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pcoupling")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, serde_json::Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let (code, out, err) = pcoupling(&all);
    assert!(err.is_empty(), "{}", err);
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn shipped_definition_files_parse_and_satisfy_jacobi() {
    for entry in std::fs::read_dir(defs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let file = parse(&text).unwrap();
        let printed = file.to_string();
        assert_eq!(parse(&printed).unwrap().to_string(), printed);
        for s in file.sections.iter().filter(|s| s.kind == pcoupling_cli::defs::SectionKind::Tensor) {
            let (code, out, err) = pcoupling(&["--file", path.to_str().unwrap(), "verify", "jacobi", &s.name]);
            assert_eq!(code, 0, "{} {}: {}{}", path.display(), s.name, out, err);
        }
    }
}

#[test]
fn builtin_examples_pass_jacobi() {
    for name in pcoupling_cli::commands::EXAMPLES {
        let (code, v) = json(&["verify", "jacobi", name]);
        assert_eq!(code, 0);
        assert_eq!(v["status"], "pass");
        assert_eq!(v["checks"][0]["name"], "jacobi");
        assert!(v["checks"][0].get("residual").is_none());
    }
}

#[test]
fn open_book_h1_dims_table() {
    let (code, v) = json(&["cohomology", "h1", "open-book", "--degree-bound", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["dims"], serde_json::json!({"w0": 1, "w1": 3, "w2": 0}));
    assert_eq!(v["truncation"]["degree_bound"], 2);
}

#[test]
fn cylinder_example_split_matches() {
    let (code, v) = json(&["example", "run", "cylinder", "--rho", "0", "--degree-bound", "2"]);
    assert_eq!(code, 0);
    assert_eq!((v["dims"]["left"].as_u64(), v["dims"]["right"].as_u64()), (Some(5), Some(5)));
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "split-match" && c["status"] == "pass"));
}

#[test]
fn failing_check_exits_with_two_and_reports_residual() {
    let dir = std::env::temp_dir().join(format!("pcoupling-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.pc");
    std::fs::write(&path, "[chart]\nfiber = x y z\n[tensor B]\n(y,z) = z\n(x,y) = y\n").unwrap();
    let (code, v) = json(&["--file", path.to_str().unwrap(), "verify", "jacobi", "B"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "fail");
    let r = v["residuals"][0]["value"].as_str().unwrap();
    assert!(!r.is_empty() && r != "0");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unresolved_solve_exits_with_three() {
    let args =
        ["automorphism", "extend", "cylinder", "--rho", "x2,t*x1", "--vertical", "(x1)=1", "--degree-bound", "0"];
    let (code, v) = json(&args);
    assert_eq!(code, 3);
    assert_eq!(v["status"], "undecided-at-D");
    assert_eq!(v["truncation"]["degree_bound"], 0);
    let (code, v) = json(&{
        let mut a = args;
        a[8] = "1";
        a
    });
    assert_eq!(code, 0);
    assert!(v["representatives"].as_array().unwrap().iter().any(|r| r["label"] == "X_Y"));
}

#[test]
fn errors_exit_with_one() {
    let (code, out, err) = pcoupling(&["verify", "jacobi", "nope"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("unknown example"));
    let (code, _, err) = pcoupling(&["frobnicate"]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());
}

#[test]
fn set_substitutes_symbolic_constant() {
    let (code, v) = json(&["example", "run", "so3-leaf"]);
    assert_eq!(code, 0);
    assert!(v["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("--set")));
    let (code, v) = json(&["example", "run", "so3-leaf", "--set", "c=0", "--degree-bound", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["dims"]["left"], v["dims"]["right"]);
    let (code, _, err) = pcoupling(&["verify", "jacobi", "so3-leaf", "--set", "x1=1"]);
    assert_eq!(code, 1);
    assert!(err.contains("not a constant"));
}

#[test]
fn data_build_from_sections() {
    let path = defs_dir().join("curved_cylinder.pc");
    let args = ["--file", path.to_str().unwrap(), "data", "build", "--connection", "G", "--sigma", "SIGMA", "--vertical", "P"];
    let (code, v) = json(&args);
    assert_eq!(code, 0, "{}", v);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["CC1", "CC2", "CC3", "CC4", "jacobi"]);
}
