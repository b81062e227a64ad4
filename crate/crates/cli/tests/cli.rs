use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_freemon"));
    for a in args {
        if a.ends_with(".json") {
            cmd.arg(fixture(a));
        } else {
            cmd.arg(a);
        }
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn temp_file(content: &str, tag: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("freemon-cli-{}-{tag}.json", std::process::id()));
    std::fs::write(&p, content).unwrap();
    p
}

#[test]
fn dims_match_goldens() {
    for (fixture, gold) in [
        ("empty.json", "dims_empty.csv"),
        ("binary_operad.json", "dims_binary_operad.csv"),
        ("binary_cobinary.json", "dims_binary_cobinary.csv"),
        ("regular_binary.json", "dims_regular_binary.csv"),
    ] {
        let o = run(&["dims", fixture]);
        assert_eq!(code(&o), 0, "{fixture}");
        assert_eq!(stdout(&o), golden(gold), "{fixture}");
    }
    let o = run(&["dims", "--variant", "dioperad", "binary_cobinary.json"]);
    assert_eq!(stdout(&o), golden("dims_binary_cobinary_dioperad.csv"));
}

#[test]
fn empty_presentation_is_the_unit() {
    let o = run(&["dims", "empty.json"]);
    assert_eq!(stdout(&o), "m,n,weight,dim_colimit,dim_direct,match\n1,1,0,1,1,match\n");
}

#[test]
fn genus_one_class_separates_variants() {
    let row = |variant: &str| {
        let o = run(&["dims", "--variant", variant, "binary_cobinary.json"]);
        stdout(&o).lines().find(|l| l.starts_with("1,1,2,")).map(str::to_string)
    };
    assert_eq!(row("properad").as_deref(), Some("1,1,2,1,1,match"));
    assert_eq!(row("dioperad"), None);
}

#[test]
fn basis_matches_goldens() {
    for (args, gold) in [
        (["basis", "binary_operad.json", "1", "3", "2"], "basis_binary_operad_1_3_2.gfm"),
        (["basis", "binary_cobinary.json", "1", "1", "2"], "basis_binary_cobinary_1_1_2.gfm"),
        (["basis", "regular_binary.json", "1", "3", "2"], "basis_regular_binary_1_3_2.gfm"),
        (["basis", "empty.json", "1", "1", "0"], "basis_empty_1_1_0.gfm"),
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 0, "{args:?}");
        assert_eq!(stdout(&o), golden(gold), "{args:?}");
    }
}

#[test]
fn basis_line_counts() {
    let lines = |args: &[&str]| stdout(&run(args)).lines().count() - 1;
    assert_eq!(lines(&["basis", "empty.json", "1", "1", "0"]), 1);
    assert_eq!(lines(&["basis", "regular_binary.json", "1", "2", "1"]), 2);
    assert_eq!(lines(&["basis", "binary_operad.json", "1", "3", "2"]), 3);
    assert_eq!(lines(&["basis", "binary_operad.json", "1", "4", "3"]), 15);
}

#[test]
fn output_independent_of_jobs_and_runs() {
    for args in [
        vec!["dims", "binary_cobinary.json"],
        vec!["dims", "regular_binary.json"],
        vec!["basis", "binary_cobinary.json", "2", "2", "2"],
    ] {
        let reference = stdout(&run(&args));
        for jobs in ["1", "2", "4"] {
            let mut a = args.clone();
            a.extend(["--jobs", jobs]);
            assert_eq!(stdout(&run(&a)), reference, "{args:?} --jobs {jobs}");
        }
    }
}

#[test]
fn single_construction_leaves_other_column_blank() {
    let o = run(&["dims", "--single", "direct", "binary_operad.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("1,4,3,-,15,-\n"));
    let o = run(&["dims", "--single", "colimit", "binary_operad.json"]);
    assert!(stdout(&o).contains("1,4,3,15,-,-\n"));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("freemon-cli-{}-out.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let o = run(&["dims", "binary_operad.json", "--out", p]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), golden("dims_binary_operad.csv"));
    let _ = std::fs::remove_file(path);
}

#[test]
fn parse_errors_exit_2() {
    let cases = [
        ("{", "truncated"),
        (r#"{"presentation_version": 2, "generators": []}"#, "version"),
        (r#"{"presentation_version": 1, "variant": "prop", "generators": []}"#, "variant"),
        (
            r#"{"presentation_version": 1, "generators": [{"name": "x", "outputs": 1, "inputs": 2, "dim": 1, "right": [[["2"]]]}]}"#,
            "not an involution",
        ),
        (
            r#"{"presentation_version": 1, "generators": [{"name": "x", "outputs": 1, "inputs": 2, "dim": 2, "right": [[["1"]]]}]}"#,
            "wrong size",
        ),
        (
            r#"{"presentation_version": 1, "generators": [{"name": "x", "outputs": 1, "inputs": 2, "dim": 1, "right": [[["1/0"]]]}]}"#,
            "zero denominator",
        ),
        (
            r#"{"presentation_version": 1, "generators": [{"name": "x", "outputs": 1, "inputs": 2, "dim": 1}, {"name": "x", "outputs": 2, "inputs": 1, "dim": 1}]}"#,
            "duplicate name",
        ),
        (
            r#"{"presentation_version": 1, "variant": "operad", "generators": [{"name": "x", "outputs": 2, "inputs": 1, "dim": 1}]}"#,
            "biarity not allowed",
        ),
    ];
    for (text, tag) in cases {
        let p = temp_file(text, tag.replace(' ', "-").as_str());
        let o = run(&["dims", p.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{tag}");
        assert!(o.stdout.is_empty(), "{tag}: partial output");
        let _ = std::fs::remove_file(p);
    }
    assert_eq!(code(&run(&["dims", "no-such-file.json"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn bit_cap_is_enforced() {
    let text = r#"{"presentation_version": 1, "generators": [{"name": "x", "outputs": 1, "inputs": 2, "dim": 2,
        "right": [[["0", "123456789/987654321"], ["987654321/123456789", "0"]]]}]}"#;
    let p = temp_file(text, "bits");
    let path = p.to_str().unwrap();
    assert_eq!(code(&run_env(&["dims", "--single", "direct", path], &[("GFM_MAX_BITS", "8")])), 2);
    assert_eq!(code(&run_env(&["dims", "--single", "direct", path], &[("GFM_MAX_BITS", "64")])), 0);
    let _ = std::fs::remove_file(p);
}

#[test]
fn truncation_errors_exit_3() {
    let o = run(&["basis", "small_operad.json", "1", "4", "1"]);
    assert_eq!(code(&o), 3);
    let o = run(&["basis", "small_operad.json", "1", "3", "3"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn verify_passes_on_stock_inputs() {
    for args in [
        vec!["verify", "empty.json"],
        vec!["verify", "binary_cobinary.json"],
        vec!["verify", "small_operad.json", "assoc.json"],
        vec!["verify", "small_operad.json", "assoc_regular.json", "--seed", "7"],
    ] {
        let o = run(&args);
        let text = stdout(&o);
        assert_eq!(code(&o), 0, "{args:?}\n{text}");
        let verdicts: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert!(verdicts.iter().all(|l| l.starts_with("PASS ")), "{text}");
        let expected = if args.len() > 2 { 5 } else { 4 };
        assert_eq!(verdicts.len(), expected, "{text}");
    }
}

#[test]
fn verify_flags_corrupted_monoid() {
    let o = run(&["verify", "small_operad.json", "assoc_corrupt.json"]);
    assert_eq!(code(&o), 4);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("FAIL monoid-axioms")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("PASS stabilization")), "{text}");
}

#[test]
fn extend_binary_into_associative() {
    let o = run(&["extend", "binary_operad.json", "assoc.json", "map_binary.json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), golden("extend_binary_operad.csv"));
    // every composite of the binary generator lands on the one element of arity n
    for line in stdout(&o).lines().skip(1).filter(|l| !l.starts_with('#')) {
        assert!(line.ends_with(",1"), "{line}");
    }
}

#[test]
fn extend_zero_map() {
    let o = run(&["extend", "small_operad.json", "assoc.json", "map_zero.json"]);
    assert_eq!(code(&o), 0);
    for line in stdout(&o).lines().skip(1).filter(|l| !l.starts_with('#')) {
        let fields: Vec<&str> = line.split(',').collect();
        let expect = if fields[2] == "0" { "1" } else { "0" };
        assert_eq!(fields[4], expect, "{line}");
    }
}

#[test]
fn extend_into_regular_monoid() {
    let o = run(&["extend", "small_operad.json", "assoc_regular.json", "map_symmetric.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("1,2,1,0,1 1\n"));
    let o = run(&["extend", "small_operad.json", "assoc_regular.json", "map_not_equivariant.json"]);
    assert_eq!(code(&o), 2);
    let o = run(&["extend", "small_operad.json", "assoc_corrupt.json", "map_binary.json"]);
    assert_eq!(code(&o), 4);
    let o = run(&["extend", "small_operad.json", "assoc_regular.json", "map_binary.json"]);
    assert_eq!(code(&o), 2);
}
