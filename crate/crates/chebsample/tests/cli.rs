//! Black-box tests of the command-line interface: output formats, exit
//! codes, and determinism.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chebsample"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sample_csv_format_and_seed_comment() {
    let out = run(&[
        "sample", "--expr", "exp(-x^2/2)", "--x", "-4", "4", "-n", "10", "--seed", "42",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# seed=42"));
    assert_eq!(lines.next(), Some("x"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 10);
    for row in rows {
        let x: f64 = row.parse().expect("numeric sample");
        assert!((-4.0..=4.0).contains(&x));
    }
}

#[test]
fn sample_2d_has_two_columns() {
    let out = run(&[
        "sample", "--expr", "exp(-x^2-2*y^2)", "--x", "-2", "2", "--y", "-2", "2", "-n", "5",
        "--seed", "3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# seed=3\nx,y\n"));
    assert_eq!(text.lines().count(), 2 + 5);
}

#[test]
fn same_seed_same_bytes() {
    let args = [
        "sample", "--expr", "2+cos(100*x)", "--x", "-1", "1", "-n", "100", "--seed", "9",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn jobs_partition_is_deterministic() {
    let args = [
        "sample", "--expr", "exp(-x^2/2)", "--x", "-4", "4", "-n", "101", "--seed", "5",
        "--jobs", "4",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 2 + 101);
}

#[test]
fn parse_error_exits_2() {
    let out = run(&["sample", "--expr", "exp(-x^2", "--x", "-1", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error"));
}

#[test]
fn unknown_identifier_exits_2() {
    let out = run(&["sample", "--expr", "foo(x)", "--x", "-1", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn negative_density_exits_3() {
    let out = run(&["sample", "--expr", "cos(10*x)", "--x", "-1", "1", "-n", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bivariate_expr_without_y_domain_is_rejected() {
    let out = run(&["sample", "--expr", "x+y", "--x", "-1", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rejection_method_samples() {
    let out = run(&[
        "sample", "--expr", "2+cos(100*x)", "--x", "-1", "1", "-n", "20", "--seed", "8",
        "--method", "rs",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 2 + 20);
}

#[test]
fn evalcount_its_column_constant() {
    let out = run(&[
        "evalcount", "--expr", "exp(-x^2/2)", "--x", "-4", "4", "--ns", "10,100,1000",
        "--seed", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,evals_its,evals_rs"));
    let rows: Vec<Vec<u64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[1] == rows[0][1]));
    assert!(rows[2][2] > rows[0][2]);
}

#[test]
fn hist_writes_csv_and_svg() {
    let dir = std::env::temp_dir().join(format!("chebsample-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let samples = dir.join("s.csv");
    let out_csv = dir.join("h.csv");
    let out_svg = dir.join("h.svg");

    let out = run(&[
        "sample", "--expr", "exp(-x^2/2)", "--x", "-4", "4", "-n", "500", "--seed", "1",
        "--out", samples.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = run(&[
        "hist", "--input", samples.to_str().unwrap(), "--bins", "10", "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_csv).unwrap();
    assert!(text.starts_with("bin_lo,bin_hi,count\n"));
    let total: u64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 500);

    let out = run(&[
        "hist", "--input", samples.to_str().unwrap(), "--bins", "10", "--expr",
        "exp(-x^2/2)", "--x", "-4", "4", "--out", out_svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(&out_svg).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("</svg>"));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bench_1d_suite_emits_records() {
    let out = run(&["bench", "--suite", "1d", "-n", "2000", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("density,method,n,construct_s,sample_s,total_s,evals,rank,gof_stat,gof_pass")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8); // 4 densities x {ITS, RS}
    for row in rows {
        assert!(row.ends_with(",true"), "gate failed in {row}");
    }
}
