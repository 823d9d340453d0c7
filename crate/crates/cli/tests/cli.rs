use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn scpdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scpdc"))
        .args(args)
        .env("SCPDC_LOG", "quiet")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Fields of `status, f*, iter, time_s, error, feasgap`.
fn summary_fields(o: &Output) -> Vec<String> {
    stdout(o).trim().split(", ").map(str::to_string).collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn small_example_iteration_counts() {
    for (case, iters) in [("1", "2"), ("2", "4")] {
        let o = scpdc(&[
            "solve",
            "--gen",
            "small-example",
            "--case",
            case,
            "--algorithm",
            "scp",
            "--eps",
            "1e-5",
            "--x0",
            "zeros",
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let f = summary_fields(&o);
        assert_eq!(f[0], "ConvergedStationary");
        assert_eq!(f[2], iters);
        let fstar: f64 = f[1].parse().unwrap();
        assert!((fstar - (-8.0 * 2f64.sqrt() - 2.0)).abs() < 1e-6);
    }
}

#[test]
fn ncvqcqp_rscp_converges_quickly() {
    let o = scpdc(&[
        "solve",
        "--gen",
        "ncvqcqp",
        "--n",
        "10",
        "--m2",
        "5",
        "--seed",
        "1",
        "--algorithm",
        "rscp",
        "--mu",
        "0.1",
        "--eps",
        "1e-6",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let f = summary_fields(&o);
    assert_eq!(f[0], "ConvergedStationary");
    assert!(f[2].parse::<usize>().unwrap() <= 20);
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("bad.json");
    std::fs::write(&file, "{\n  \"dim\": 2,\n  \"objective\": [1,\n").unwrap();
    let o = scpdc(&["solve", "--problem", path_str(&file)]);
    assert_eq!(code(&o), 2);
    let msg = stderr(&o);
    assert!(msg.contains("line") && msg.contains("column"), "{msg}");
}

#[test]
fn unknown_flag_exits_2() {
    assert_eq!(
        code(&scpdc(&["solve", "--gen", "small-example", "--bogus"])),
        2
    );
    assert_eq!(code(&scpdc(&["solve"])), 2);
}

const NOT_PSD: &str = r#"{
  "dim": 2,
  "objective": {"f1": {"Q": [[1, 0], [0, -1]], "q": [0, 0], "r": 0}},
  "constraints": [],
  "omega": {"lb": [-1, -1], "ub": [1, 1]}
}"#;

const BAD_DIM: &str = r#"{
  "dim": 2,
  "objective": {"f1": {"q": [0, 0, 1], "r": 0}},
  "omega": {"lb": [-1, -1], "ub": [1, 1]}
}"#;

#[test]
fn validation_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [("psd.json", NOT_PSD), ("dim.json", BAD_DIM)] {
        let file = dir.path().join(name);
        std::fs::write(&file, text).unwrap();
        let o = scpdc(&["solve", "--problem", path_str(&file)]);
        assert_eq!(code(&o), 3, "{name}: {}", stderr(&o));
    }
    // start point of the wrong length
    let o = scpdc(&["solve", "--gen", "small-example", "--x0", "1,2,3"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn infeasible_subproblem_exits_4() {
    // the linearized constraint at the origin reads 2 <= 0
    let o = scpdc(&[
        "solve",
        "--gen",
        "dca-comparison",
        "--algorithm",
        "scp",
        "--x0",
        "0,0",
    ]);
    assert_eq!(code(&o), 4, "{}", stdout(&o));
    assert_eq!(summary_fields(&o)[0], "SubproblemInfeasible");
}

#[test]
fn iteration_cap_exits_5() {
    let o = scpdc(&[
        "solve",
        "--gen",
        "small-example",
        "--case",
        "2",
        "--eps",
        "1e-5",
        "--max-iter",
        "1",
    ]);
    assert_eq!(code(&o), 5);
    assert_eq!(summary_fields(&o)[0], "MaxIter");
}

#[test]
fn trace_matches_summary() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("trace.csv");
    let summary = dir.path().join("summary.csv");
    let o = scpdc(&[
        "solve",
        "--gen",
        "ncvqcqp",
        "--n",
        "20",
        "--m2",
        "10",
        "--seed",
        "3",
        "--algorithm",
        "rscp",
        "--trace",
        path_str(&trace),
        "--summary",
        path_str(&summary),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let mut r = csv::Reader::from_path(&trace).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        header.join(","),
        "iter,f,f_mu,error,feasgap,mu,rho,descent_lhs,descent_rhs,inner_iters,inner_status"
    );
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0].parse::<usize>().unwrap(), i);
        assert_eq!(&row[10], "Optimal");
    }

    let mut s = csv::Reader::from_path(&summary).unwrap();
    let srow = s.records().next().unwrap().unwrap();
    let iter: usize = srow[2].parse().unwrap();
    // one row per subproblem solve, numbered from 0
    assert_eq!(rows.len(), iter + 1);
    let f_last: f64 = rows.last().unwrap()[1].parse().unwrap();
    let f_star: f64 = srow[1].parse().unwrap();
    assert!((f_last - f_star).abs() <= 1e-12);
}

#[test]
fn gen_round_trips_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let cases: [&[&str]; 5] = [
        &["--gen", "small-example", "--case", "1"],
        &["--gen", "small-example", "--case", "2"],
        &["--gen", "ncvqcqp", "--n", "12", "--m2", "4", "--seed", "5"],
        &["--gen", "mpcc", "--nx", "3", "--ny", "2", "--seed", "4"],
        &["--gen", "dca-comparison"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let first = dir.path().join(format!("p{i}.json"));
        let second = dir.path().join(format!("q{i}.json"));
        let mut a = vec!["gen", "--out", path_str(&first)];
        a.extend_from_slice(args);
        assert_eq!(code(&scpdc(&a)), 0);
        assert_eq!(
            code(&scpdc(&[
                "gen",
                "--problem",
                path_str(&first),
                "--out",
                path_str(&second)
            ])),
            0
        );
        assert_eq!(
            std::fs::read(&first).unwrap(),
            std::fs::read(&second).unwrap(),
            "{args:?}"
        );
    }
}

#[test]
fn gen_is_deterministic() {
    let a = scpdc(&["gen", "--gen", "ncvqcqp", "--seed", "7"]);
    let b = scpdc(&["gen", "--gen", "ncvqcqp", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let c = scpdc(&["gen", "--gen", "ncvqcqp", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn mpcc_data_file_gives_lifted_dimension() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("mpcc.json");
    let o = scpdc(&[
        "gen",
        "--gen",
        "mpcc",
        "--format",
        "data",
        "--nx",
        "3",
        "--ny",
        "2",
        "--seed",
        "11",
        "--out",
        path_str(&data),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = scpdc(&["gen", "--gen", "mpcc", "--data", path_str(&data)]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 2 * 3 + 2);
    // the data file itself is canonical
    let again = scpdc(&[
        "gen",
        "--gen",
        "mpcc",
        "--format",
        "data",
        "--data",
        path_str(&data),
    ]);
    assert_eq!(again.stdout, std::fs::read(&data).unwrap());
}

#[test]
fn unbounded_sides_serialize_as_inf() {
    let o = scpdc(&[
        "gen", "--gen", "mpcc", "--nx", "2", "--ny", "1", "--seed", "2",
    ]);
    let text = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let ub = v["omega"]["ub"].as_array().unwrap();
    assert!(ub.iter().any(|b| b == "inf"), "{text}");
}

#[test]
fn check_reports_stationarity() {
    let x = format!("{},{}", 2.0 * 2f64.sqrt(), -2.0);
    let o = scpdc(&["check", "--gen", "small-example", "--x", &x]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    let residual: f64 = out
        .lines()
        .next()
        .unwrap()
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual <= 1e-6);
    let g1 = out.lines().find(|l| l.starts_with("g1")).unwrap();
    assert!(g1.ends_with("strictly-active"), "{g1}");
    let lambda: f64 = g1.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!(lambda > 0.0);

    let o = scpdc(&["check", "--gen", "small-example", "--x", "0,0"]);
    assert_eq!(code(&o), 1);
    let residual: f64 = stdout(&o)
        .lines()
        .next()
        .unwrap()
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((residual - 2.0 * 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn check_outside_box_reports_feasgap() {
    let o = scpdc(&["check", "--gen", "small-example", "--x", "5,0"]);
    assert_ne!(code(&o), 0);
    let out = stdout(&o);
    let gap: f64 = out
        .lines()
        .find(|l| l.starts_with("feasgap"))
        .and_then(|l| l.split_whitespace().nth(1))
        .unwrap()
        .parse()
        .unwrap();
    assert!(gap > 0.0);
}

#[test]
fn check_reads_solve_output() {
    let dir = TempDir::new().unwrap();
    let result = dir.path().join("result.json");
    let o = scpdc(&[
        "solve",
        "--gen",
        "ncvqcqp",
        "--n",
        "10",
        "--seed",
        "2",
        "--algorithm",
        "rscp",
        "--out",
        path_str(&result),
    ]);
    assert_eq!(code(&o), 0);
    let o = scpdc(&[
        "check",
        "--gen",
        "ncvqcqp",
        "--n",
        "10",
        "--seed",
        "2",
        "--x",
        path_str(&result),
        "--eps",
        "1e-5",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn bench_small_example_table() {
    let dir = TempDir::new().unwrap();
    let o = scpdc(&[
        "bench",
        "--suite",
        "small-example",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut r = csv::Reader::from_path(dir.path().join("small-example.csv")).unwrap();
    let h = r.headers().unwrap().clone();
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    let iters: Vec<&str> = rows.iter().map(|r| &r[col("iter")]).collect();
    assert_eq!(iters, ["2", "4"]);
    for row in &rows {
        assert_eq!(&row[col("descent_fail")], "0");
        assert_eq!(&row[col("feas_fail")], "0");
    }
    // per-row files are merged and removed
    assert!(!dir.path().join("small-example.rows").exists());
}

#[test]
fn bench_dca_vs_scp_counts() {
    let dir = TempDir::new().unwrap();
    let o = scpdc(&[
        "bench",
        "--suite",
        "dca-vs-scp",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut r = csv::Reader::from_path(dir.path().join("dca-vs-scp.csv")).unwrap();
    let h = r.headers().unwrap().clone();
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    for row in &rows {
        assert_eq!(&row[col("iter_dca_ge_scp")], "true");
        assert_eq!(&row[col("phi_monotone")], "true");
    }
}

#[test]
fn quiet_log_leaves_stderr_empty() {
    let o = scpdc(&["solve", "--gen", "small-example"]);
    assert_eq!(code(&o), 0);
    assert!(o.stderr.is_empty(), "{}", stderr(&o));
}
