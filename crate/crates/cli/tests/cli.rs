// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::process::{Command, Output};

use twin_selmer::report::SelmerDoc;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twin-selmer"))
        .args(args)
        .env_remove("TWIN_SELMER_TIME_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const F61: [&str; 8] = ["--epsilon", "+1", "--p", "3", "--q", "5", "--D", "61"];

#[test]
fn compute_golden_text() {
    let mut args = vec!["compute"];
    args.extend(F61);
    args.extend(["--kind", "phi"]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dim2=1, elements={1, 61}"));
}

#[test]
fn compute_json_round_trips() {
    for table in [false, true] {
        let mut args = vec!["compute"];
        args.extend(F61);
        args.extend(["--kind", "phi_hat", "--format", "json"]);
        if table {
            args.push("--seed-table");
        }
        let out = stdout(&run(&args));
        let doc: SelmerDoc = serde_json::from_str(&out).unwrap();
        assert_eq!(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()), out);
        assert_eq!(doc.classes.len() == 32, table);
        if table {
            assert_eq!(doc.into_group().unwrap().elements.len(), 8);
        }
    }
}

#[test]
fn compute_csv_has_versioned_header() {
    let mut args = vec!["compute"];
    args.extend(F61);
    args.extend(["--kind", "phi", "--format", "csv", "--seed-table"]);
    let out = stdout(&run(&args));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("# twin-selmer selmer csv v1"));
    assert!(lines.next().unwrap().starts_with("epsilon,p,q,D,kind,d,member,place"));
}

#[test]
fn verify_example_passes() {
    let o = run(&["verify", "--theorem", "1.4ex", "--epsilon", "+1", "--p", "3", "--q", "5", "--D", "41"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row = out.lines().find(|l| l.starts_with("1.4ex")).unwrap();
    assert!(row.contains("pass") && row.contains("size=16"), "{row}");
}

#[test]
fn verify_strictness_controls_not_applicable() {
    let base = ["verify", "--theorem", "1.7A", "--epsilon", "-1", "--p", "3", "--q", "5", "--D", "41"];
    let o = run(&base);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not-applicable"));
    let mut strict = base.to_vec();
    strict.push("--strict");
    assert_eq!(run(&strict).status.code(), Some(1));
}

#[test]
fn audit_agrees() {
    let o = run(&["audit", "--epsilon", "-1", "--p", "5", "--q", "7", "--D", "11,13", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    // header comment and column names only
    assert_eq!(out.lines().count(), 2);
    let o = run(&["audit", "--epsilon", "-1", "--p", "5", "--q", "7", "--D", "11,13"]);
    assert!(stdout(&o).contains("0 discrepancies"));
}

#[test]
fn search_by_statement_and_dimension() {
    let o = run(&["search", "--epsilon", "+1", "--corollary", "1.2B", "--bound", "100", "--quiet", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["p"], serde_json::json!(3));

    let o = run(&["search", "--epsilon", "+1", "--corollary", "1.2C", "--bound", "10", "--quiet"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "none\n");

    let o = run(&["search", "--epsilon", "+1", "--target-dim", "4", "--kind", "phi_hat", "--quiet"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("D=41 phi_hat dim2=4"));
}

#[test]
fn invalid_parameters_exit_2() {
    let o = run(&["compute", "--epsilon", "+1", "--p", "3", "--q", "7", "--D", "61", "--kind", "phi"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("twin"));
    let o = run(&["compute", "--epsilon", "+1", "--p", "3", "--q", "5", "--D", "7,11", "--kind", "phi", "--max-n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["compute", "--epsilon", "2", "--p", "3", "--q", "5", "--D", "7", "--kind", "phi"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_limits_exit_3() {
    let o = run(&["compute", "--epsilon", "+1", "--p", "3", "--q", "5", "--D", "4294967311,4294967357", "--kind", "phi"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("too large"));
}

#[test]
fn config_file_overrides_flags() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# instance\nepsilon = +1\nD = 61\nkind = phi\nformat = text").unwrap();
    let path = file.path().to_str().unwrap();
    let o = run(&["compute", "--epsilon", "-1", "--p", "3", "--q", "5", "--D", "41", "--kind", "phi_hat", "--config", path]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("eps=+1 p=3 q=5 D=61 phi\ndim2=1, elements={1, 61}"));

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "no equals sign").unwrap();
    let o = run(&["compute", "--config", bad.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn time_budget_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_twin-selmer"))
        .args(["search", "--epsilon", "+1", "--corollary", "1.2C", "--n", "3", "--quiet"])
        .env("TWIN_SELMER_TIME_BUDGET", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "none\n");
}
