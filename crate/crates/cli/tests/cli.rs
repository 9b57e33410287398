use std::process::{Command, Output};

use fracorder::norms::error_sweep;
use fracorder::{Interval, NormKind, OperatorKind, TestFunction};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracorder"))
        .args(args)
        .env_remove("FRACORDER_THREADS")
        .output()
        .expect("run fracorder")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn table1_has_header_and_four_rows() {
    let text = stdout(&["table1"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,ratio_T1,ratio_Tm1");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("3,1.592207522,0.888146023"));
    let cells: Vec<f64> = lines[4].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(cells[0], 6.0);
    assert!((cells[1] - 2.669821563).abs() < 1e-8);
    assert!((cells[2] - 0.7594559202).abs() < 1e-8);
}

#[test]
fn ratio_limit_and_finite_beta() {
    let text = stdout(&["ratio", "--m", "4", "--T", "1"]);
    assert_eq!(text, "m,T,beta,ratio\n4,1,,1.991876241\n");
    let text = stdout(&["ratio", "--m", "3", "--T", "2", "--beta", "1e-4"]);
    let value: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 0.8881460240).abs() < 1e-2);
}

#[test]
fn zero_error_row_for_constant_function() {
    let text = stdout(&[
        "error",
        "-f",
        "affine:0,1",
        "-k",
        "C",
        "-p",
        "1",
        "--beta",
        "0.3",
        "--interval",
        "0,1",
    ]);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("C,0.3,1,0,1,0.0,"), "{row}");
}

#[test]
fn derive_single_value() {
    let text = stdout(&[
        "derive", "-f", "power:1", "-k", "CF", "-a", "0.5", "-t", "1",
    ]);
    let value: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 2.0 * (1.0 - (-1f64).exp())).abs() < 1e-14);
}

#[test]
fn order_rows_round_trip_to_library_values() {
    let text = stdout(&[
        "order",
        "-f",
        "exp",
        "-k",
        "CF",
        "-p",
        "1",
        "--betas",
        "0.1,0.03,0.01,0.003,0.001",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "kind,beta,p,a,b,value,error_estimate,n_eval_points"
    );
    let betas = [0.1, 0.03, 0.01, 0.003, 0.001];
    let lib = error_sweep(
        &TestFunction::Exponential,
        OperatorKind::CaputoFabrizio,
        NormKind::One,
        &betas,
        Interval::new(0.0, 1.0).unwrap(),
    )
    .unwrap();
    for (line, report) in lines[1..=5].iter().zip(&lib) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0], "CF");
        assert_eq!(cells[1].parse::<f64>().unwrap(), report.beta);
        assert_eq!(cells[5].parse::<f64>().unwrap(), report.value);
        assert_eq!(cells[6].parse::<f64>().unwrap(), report.error_estimate);
    }
    assert_eq!(lines[6], "r_hat,log_c_hat,residual");
    let r_hat: f64 = lines[7].split(',').next().unwrap().parse().unwrap();
    assert!((0.95..=1.05).contains(&r_hat));
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = [
        "order",
        "-f",
        "cos",
        "-k",
        "C",
        "-p",
        "inf",
        "--grid",
        "2001",
        "--betas",
        "geometric:1e-1,1e-3,3",
    ];
    let one = run(&[&["--threads", "1"], &args[..]].concat());
    let many = Command::new(env!("CARGO_BIN_EXE_fracorder"))
        .args(args)
        .env("FRACORDER_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(one.status.code(), many.status.code());
    let fig = [
        "figures", "-f", "cos", "--alphas", "0.5,0.9", "--points", "40",
    ];
    assert_eq!(
        run(&[&["--threads", "1"], &fig[..]].concat()).stdout,
        run(&[&["--threads", "3"], &fig[..]].concat()).stdout
    );
}

#[test]
fn writes_to_out_file() {
    let dir = std::env::temp_dir().join(format!("fracorder-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.csv");
    let out = run(&["table1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&["table1"]));
    std::fs::remove_dir_all(&dir).unwrap();
}

fn assert_failure(args: &[&str], code: i32, needle: &str) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains(needle), "{err}");
}

#[test]
fn argument_errors_exit_2_with_flag_name() {
    assert_failure(
        &["error", "-f", "exp", "-k", "C", "-p", "1", "--beta", "1.5"],
        2,
        "--beta",
    );
    assert_failure(
        &["error", "-f", "exp", "-k", "XX", "-p", "1", "--beta", "0.5"],
        2,
        "--kind",
    );
    assert_failure(
        &["error", "-f", "nope", "-k", "C", "-p", "1", "--beta", "0.5"],
        2,
        "--function",
    );
    assert_failure(
        &["derive", "-f", "exp", "-k", "C", "-a", "0.5", "-t", "2"],
        2,
        "-t",
    );
    assert_failure(&["ratio", "--m", "3", "--T", "5"], 2, "--T");
    assert_failure(
        &[
            "order", "-f", "exp", "-k", "C", "-p", "1", "--betas", "0.01,0.1",
        ],
        2,
        "--betas",
    );
    assert_failure(&["table1", "--threads", "0"], 2, "--threads");
    assert_failure(&["frobnicate"], 2, "frobnicate");
}

#[test]
fn numerical_errors_exit_3() {
    // RL error of a constant does not decay: the order fit is refused
    assert_failure(
        &[
            "order",
            "-f",
            "affine:0,1",
            "-k",
            "RL",
            "-p",
            "1",
            "--betas",
            "0.1,0.01,0.001,0.0001",
        ],
        3,
        "degenerate fit",
    );
    // a tolerance below what the evaluation budget can reach
    assert_failure(
        &[
            "error", "-f", "cos", "-k", "C", "-p", "1", "--beta", "0.5", "--tol", "1e-300",
            "--nodes", "2",
        ],
        3,
        "budget",
    );
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("table1"));
}
