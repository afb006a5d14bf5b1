use std::process::{Command, Output};

fn chang(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chang")).args(args).env_remove("CHANG_TABLE_PATH").output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    chang(args).status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["homology", "C(1,5,2)"]), 0);
    assert_eq!(code(&["verify", "M(2^2,3)", "Cbot(3,5)", "M(2^2,6) v M(2^2,7) v M(2^2,8)"]), 1);
    assert_eq!(code(&["verify", "M(2^2,3)", "Cbot(3,5)", "M(2^2,3)^Ceta(5) v M(2^2,7)"]), 0);
    assert_eq!(code(&["homology", "S(3) +"]), 2);
    assert_eq!(code(&["homology", "S(2)"]), 2);
    assert_eq!(code(&["bogus"]), 2);
    assert_eq!(code(&["smash", "M(2^2,3)^Ceta(5)", "Ceta(5)"]), 3);
    assert_eq!(code(&["pi", "20", "Ceta(5)"]), 3);
}

#[test]
fn parse_errors_report_offsets() {
    let out = chang(&["homology", "S(3) v Cx(2)"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("byte 7"), "{err}");
}

#[test]
fn structured_output_is_stable() {
    let args = ["--format", "structured", "smash", "C(1,5,3)", "C(3,5,2)"];
    let a = chang(&args).stdout;
    assert_eq!(a, chang(&args).stdout);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["output"], "Ctop(5,2)^C(1,5,3) v C(1,9,3)");
    assert_eq!(v["verification"]["homology_match"], true);
}

#[test]
fn reduce_auto_and_params() {
    let out = chang(&["reduce", "moore_pair_above.json", "--auto", "--param", "r=3", "--param", "u=1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("script moore_pair_above.steps"), "{text}");
    assert_eq!(code(&["reduce", "moore_pair_above.json", "--param", "q=1"]), 2);
}

#[test]
fn table_path_override() {
    let dir = std::env::temp_dir().join(format!("chang-empty-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("hom_tables.toml"), "entry = []\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_chang"))
        .args(["pi", "9", "Ceta(5)^C(2,5,3)"])
        .env("CHANG_TABLE_PATH", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let cov = chang(&["table", "--branch-coverage"]);
    let cov = String::from_utf8(cov.stdout).unwrap();
    // Only the point rule needs a factor outside the table.
    let uncovered: Vec<&str> = cov.lines().skip(1).filter(|l| l.trim_start().starts_with("0 ")).collect();
    assert_eq!(uncovered, ["    0  point"], "{cov}");
}
