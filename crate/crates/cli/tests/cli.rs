use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    let args: Vec<String> = args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(f) => data(f).display().to_string(),
            None => a.to_string(),
        })
        .collect();
    Command::new(env!("CARGO_BIN_EXE_isochron")).args(&args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn cub2_first_three_conditions_are_zero() {
    let o = run(&["conditions", "@cub2.txt", "--k", "3"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<String> = stdout(&o).lines().take(3).map(String::from).collect();
    assert_eq!(lines, ["c1 = 0", "c2 = 0", "c3 = 0"]);
}

#[test]
fn linear_center_period() {
    let o = run(&["period", "@linear.txt", "--x0", "0.1", "--tol", "1e-12"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("T = 6.283185307"), "{}", stdout(&o));
}

#[test]
fn groebner_hand_fixture() {
    let o = run(&["groebner", "@ideal_xy.txt", "--order", "lex"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "x - y\ny^2 - 1\n");
    let o = run(&["groebner", "@ideal_xy.txt", "--order", "grevlex"]);
    assert_eq!(stdout(&o), "y^2 - 1\nx - y\n");
}

#[test]
fn groebner_condition_ideal_with_auto_weights() {
    let o = run(&["groebner", "@cub2.txt", "--k", "3", "--weights", "auto"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("weighted-homogeneous: yes"));
    assert!(stdout(&o).contains("# zero ideal"));
}

#[test]
fn mathematical_failures_exit_one() {
    let o = run(&["conditions", "@st13_perturbed.txt", "--k", "4"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL: c3"));
    let o = run(&["zero-urabe", "@cub2.txt", "--param", "b20=1"]);
    assert_eq!(code(&o), 1);
    let o = run(&["reversible", "@quarun3.txt", "--param", "b02=1/4"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("not reversible"));
}

#[test]
fn passes_exit_zero() {
    for args in [
        vec!["reduce", "@st13.txt"],
        vec!["zero-urabe", "@quarun3.txt"],
        vec!["reversible", "@st13.txt"],
        vec!["urabe", "@st13.txt", "--n", "12", "--h", "1/2*xi^3 - 1/16*xi^9"],
        vec!["linearize", "@quarun3.txt", "--n", "12"],
        vec!["period", "@quarun42a.txt", "--x0", "0.01,0.03", "--threshold", "1e-4"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 0, "{:?}\n{}", args, stdout(&o));
    }
}

#[test]
fn st13_urabe_series() {
    let o = run(&["urabe", "@st13.txt", "--n", "9"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("h = 1/2*xi^3 - 1/16*xi^9"));
    let o = run(&["urabe", "@st13.txt", "--n", "12", "--h", "1/2*xi^3"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn usage_and_io_errors_exit_two() {
    for args in [
        vec!["reduce", "@missing.txt"],
        vec!["reduce", "@empty.txt"],
        vec!["reduce", "@bad_syntax.txt"],
        vec!["reduce", "@bad_shape.txt"],
        vec!["reduce"],
        vec!["conditions", "@cub2.txt", "--k", "many"],
        vec!["conditions", "@cub2.txt", "--param", "b99=1"],
        vec!["period", "@cub2.txt"],
        vec!["groebner", "@ideal_xy.txt", "--order", "deglex"],
        vec!["catalog", "verify", "--id", "ST99"],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 2, "{:?}", args);
    }
}

#[test]
fn parse_errors_carry_position() {
    let o = run(&["reduce", "@bad_syntax.txt"]);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad_syntax.txt:1:"), "{}", err);
}

#[test]
fn catalog_show_round_trips() {
    let o = run(&["catalog", "show", "ST13"]);
    assert_eq!(code(&o), 0);
    let file = std::fs::read_to_string(data("st13.txt")).unwrap();
    assert_eq!(stdout(&o), file);
}

#[test]
fn catalog_verify_is_deterministic_across_jobs() {
    let args = ["catalog", "verify", "--id", "ST13", "--id", "CUB2", "--id", "QUARUN3", "--json"];
    let a = run(&[&args[..], &["--jobs", "1"]].concat());
    let b = run(&[&args[..], &["--jobs", "3"]].concat());
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let entries = v.as_array().unwrap();
    let ids: Vec<&str> = entries.iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["CUB2", "QUARUN3", "ST13"]);
    for e in entries {
        assert_eq!(e["status"], "PASS");
        assert!(e["checks"].as_array().unwrap().len() >= 3);
        assert!(e.get("max_period_dev").is_some());
    }
}

#[test]
fn catalog_text_report() {
    let o = run(&["catalog", "verify", "--id", "ST11+"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("ST11+ PASS"), "{}", out);
    assert!(out.ends_with("1 entries: 1 PASS, 0 FAIL, 0 ERROR\n"));
}
