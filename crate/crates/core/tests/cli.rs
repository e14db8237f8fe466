use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wolstenholme"))
        .args(args)
        .env("WOLSTENHOLME_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    fs::read_to_string(format!(
        "{}/tests/golden/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap()
}

#[test]
fn eval_worked_examples_match_golden() {
    for (args, file) in [
        (
            vec![
                "eval",
                "-p",
                "17",
                "(7+k)^9 / ((3+k)^13 (8+k)^8)",
                "--strategy",
                "all",
            ],
            "eval_17_ratio.txt",
        ),
        (
            vec![
                "eval",
                "-p",
                "17",
                "(14+k)^3 (10+k)^8 (4+k)^9",
                "--strategy",
                "all",
            ],
            "eval_17_product.txt",
        ),
        (
            vec!["eval", "-p", "23", "1/((7+k)^16 (13+k)^17 (18+k)^19)"],
            "eval_23_triple_ratio.txt",
        ),
    ] {
        let out = run(&args);
        assert!(out.status.success(), "{args:?}");
        assert_eq!(stdout(&out), golden(file), "{file}");
    }
}

#[test]
fn eval_single_strategy_prints_residue() {
    let out = run(&[
        "eval",
        "-p",
        "17",
        "(14+k)^3 (10+k)^8 (4+k)^9",
        "--strategy",
        "esp",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "15\n");
}

#[test]
fn eval_errors_exit_two() {
    let out = run(&["eval", "-p", "17", "(7+k"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["eval", "-p", "15", "(1+k)^2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "eval",
        "-p",
        "11",
        "(2+k)^3/(5+k)^10 (1+k)",
        "--strategy",
        "coeff",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["eval", "-p", "11", "k", "--strategy", "fast"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tables_match_golden() {
    for (kind, m, n, file) in [
        ("coeff-table", "7", "7", "coeff_7_7.txt"),
        ("coeff-table", "6", "9", "coeff_6_9.txt"),
        ("sum-table", "7", "7", "sum_7_7.txt"),
        ("sum-table", "6", "9", "sum_6_9.txt"),
    ] {
        let out = run(&["table", kind, "-p", "11", "-m", m, "-n", n, "-f", "text"]);
        assert!(out.status.success());
        assert_eq!(stdout(&out), golden(file), "{file}");
    }
}

#[test]
fn table_formats() {
    let out = run(&[
        "table",
        "residue-matrix",
        "-p",
        "11",
        "-a",
        "1",
        "-f",
        "csv",
    ]);
    let text = stdout(&out);
    let rows: Vec<Vec<u64>> = text
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.len() == 11));
    for (i, j) in [(0, 0), (0, 10), (10, 0), (10, 10)] {
        assert_eq!(rows[i][j], 9);
    }

    let out = run(&[
        "table",
        "sum-table",
        "-p",
        "11",
        "-m",
        "6",
        "-n",
        "9",
        "-f",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
    assert_eq!(v["rows"][0]["index"], 1);

    let out = run(&[
        "table",
        "coeff-table",
        "-p",
        "11",
        "-m",
        "7",
        "-n",
        "7",
        "-f",
        "csv",
    ]);
    assert!(stdout(&out).starts_with("index,a_degree,b_degree,coeff\n"));

    let out = run(&[
        "table",
        "coeff-table",
        "-p",
        "11",
        "-m",
        "7",
        "-n",
        "7",
        "--signed",
    ]);
    assert!(stdout(&out).contains("-1"));

    let out = run(&["table", "residue-matrix", "-p", "11", "-a", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_writes_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.jsonl");
    let out = run(&[
        "verify",
        "--theorems",
        "thm2.1",
        "--primes",
        "5,7,11,13",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    let grids: Vec<u64> = text
        .lines()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["grid_size"]
                .as_u64()
                .unwrap()
        })
        .collect();
    assert_eq!(grids, [4 * 25, 6 * 49, 10 * 121, 12 * 169]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn verify_is_deterministic() {
    let args = [
        "verify",
        "--theorems",
        "thm4.1",
        "--primes",
        "7",
        "--budget",
        "500",
        "--seed",
        "9",
    ];
    let strip = |o: Output| -> Vec<serde_json::Value> {
        stdout(&o)
            .lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v.as_object_mut().unwrap().remove("elapsed_ms");
                v
            })
            .collect()
    };
    assert_eq!(strip(run(&args)), strip(run(&args)));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(
        run(&[
            "verify",
            "--theorems",
            "thm1.3",
            "--primes",
            "5..13",
            "--mod",
            "p2"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        run(&[
            "verify",
            "--theorems",
            "thm1.3-interior",
            "--primes",
            "5..13",
            "--mod",
            "p2"
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        run(&["verify", "--theorems", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "--primes", "3,5"]).status.code(), Some(2));
    let list = run(&["verify", "--list"]);
    assert!(list.status.success());
    assert!(stdout(&list).lines().any(|l| l.starts_with("thm2.1\t")));
}
