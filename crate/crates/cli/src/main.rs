use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use fracorder::analysis::{self, DEFAULT_PER_DECADE};
use fracorder::funcat::Side;
use fracorder::norms::{error_norm, error_sweep_with, DEFAULT_GRID, DEFAULT_TOL};
use fracorder::operators::{fractional_derivative, DEFAULT_NODES};
use fracorder::{
    Error, ErrorReport, FractionalOrder, Interval, NormKind, NormOptions, OperatorKind,
    QuadratureScheme, TestFunction,
};

#[derive(Parser, Debug)]
#[command(
    name = "fracorder",
    version,
    about = "Fractional derivatives of order near one: values, error norms, convergence orders"
)]
struct Cli {
    /// Worker threads for sweeps and figure data.
    #[arg(long, global = true, env = "FRACORDER_THREADS", value_parser = parse_threads)]
    threads: Option<usize>,
    /// Write CSV here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one fractional derivative.
    Derive(DeriveArgs),
    /// Error norm of D^{1-β} f against f' for one β.
    Error(ErrorArgs),
    /// β sweep of the error norm followed by a log-log order fit.
    Order(OrderArgs),
    /// Caputo-Fabrizio over Caputo L1 error ratio for t^m on (0, T).
    Ratio(RatioArgs),
    /// Limit ratios for m = 3..6 at T = 1 and T = m - 1.
    Table1,
    /// Long-format curves of f', RL, C and CF for several orders.
    Figures(FiguresArgs),
}

#[derive(Args, Debug)]
struct FunctionArgs {
    /// Test function id, e.g. `power:2`, `affine:1,1`, `exp`, `cos`, `abs:1`, `step:0.2,0.5,1`.
    #[arg(short = 'f', long = "function", value_parser = parse_function)]
    function: TestFunction,
    /// Interval `a,b`.
    #[arg(long, default_value = "0,1", value_parser = parse_interval)]
    interval: Interval,
    /// Quadrature nodes per operator evaluation.
    #[arg(long, default_value_t = DEFAULT_NODES, value_parser = parse_nodes)]
    nodes: usize,
}

#[derive(Args, Debug)]
struct DeriveArgs {
    #[command(flatten)]
    common: FunctionArgs,
    #[arg(short = 'k', long = "kind", value_parser = parse_kind)]
    kind: OperatorKind,
    /// Order α in (0, 1).
    #[arg(short = 'a', long = "alpha", value_parser = parse_unit_open)]
    alpha: f64,
    /// Evaluation point t in (a, b].
    #[arg(short = 't', long = "t", allow_negative_numbers = true)]
    t: f64,
}

#[derive(Args, Debug)]
struct NormArgs {
    #[command(flatten)]
    common: FunctionArgs,
    #[arg(short = 'k', long = "kind", value_parser = parse_kind)]
    kind: OperatorKind,
    /// Norm: `1` or `inf`.
    #[arg(short = 'p', long = "norm", value_parser = parse_norm)]
    p: NormKind,
    /// Absolute tolerance of the L1 integration.
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse_positive)]
    tol: f64,
    /// Grid size of the L-infinity search.
    #[arg(long, default_value_t = DEFAULT_GRID, value_parser = parse_nodes)]
    grid: usize,
}

#[derive(Args, Debug)]
struct ErrorArgs {
    #[command(flatten)]
    norm: NormArgs,
    /// β = 1 - α in (0, 1).
    #[arg(long, value_parser = parse_unit_open)]
    beta: f64,
}

#[derive(Args, Debug)]
struct OrderArgs {
    #[command(flatten)]
    norm: NormArgs,
    /// `geometric:start,end,per_decade` or a decreasing list `b1,b2,...`.
    #[arg(long, default_value = "geometric:1e-1,1e-4,12", value_parser = parse_betas)]
    betas: Grid,
}

#[derive(Args, Debug)]
struct RatioArgs {
    #[arg(long)]
    m: u32,
    #[arg(long = "T")]
    t: f64,
    /// Finite β; the β → 0 limit when omitted.
    #[arg(long, value_parser = parse_unit_open)]
    beta: Option<f64>,
}

#[derive(Args, Debug)]
struct FiguresArgs {
    #[command(flatten)]
    common: FunctionArgs,
    /// Orders α, comma separated.
    #[arg(long, default_value = "0.5,0.75,0.9,0.99", value_parser = parse_alphas)]
    alphas: Grid,
    /// Sample points in (a, b].
    #[arg(long, default_value_t = 500, value_parser = parse_nodes)]
    points: usize,
}

fn parse_function(s: &str) -> Result<TestFunction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<OperatorKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_norm(s: &str) -> Result<NormKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_float(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("`{s}` is not a number"))
}

fn parse_unit_open(s: &str) -> Result<f64, String> {
    let x = parse_float(s)?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(format!("{x} is not in (0, 1)"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x = parse_float(s)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{x} is not positive"))
    }
}

fn parse_nodes(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        _ => Err(format!("`{s}` is not an integer >= 2")),
    }
}

fn parse_threads(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

/// Comma-separated list of orders.
#[derive(Debug, Clone)]
struct Grid(Vec<f64>);

fn parse_alphas(s: &str) -> Result<Grid, String> {
    s.split(',')
        .map(parse_unit_open)
        .collect::<Result<_, _>>()
        .map(Grid)
}

fn parse_betas(s: &str) -> Result<Grid, String> {
    if let Some(spec) = s.strip_prefix("geometric:") {
        let parts: Vec<&str> = spec.split(',').collect();
        let (start, end, per_decade) = match parts.as_slice() {
            [a, b] => (parse_float(a)?, parse_float(b)?, DEFAULT_PER_DECADE),
            [a, b, k] => (
                parse_float(a)?,
                parse_float(b)?,
                k.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("`{k}` is not a positive integer"))?,
            ),
            _ => return Err("expected geometric:start,end[,per_decade]".into()),
        };
        analysis::geometric_betas(start, end, per_decade)
            .map(Grid)
            .map_err(|e| e.to_string())
    } else {
        let betas = s
            .split(',')
            .map(parse_unit_open)
            .collect::<Result<Vec<_>, _>>()?;
        if betas.windows(2).any(|w| w[1] >= w[0]) {
            return Err("betas must be strictly decreasing".into());
        }
        Ok(Grid(betas))
    }
}

/// Shortest decimal that parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Ten significant digits, fixed notation.
fn sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:?}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (9 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let inner = match &e {
            Error::Sweep { source, .. } => source.as_ref(),
            other => other,
        };
        match inner {
            Error::Domain(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

const REPORT_HEADER: &str = "kind,beta,p,a,b,value,error_estimate,n_eval_points";

fn report_row(out: &mut String, r: &ErrorReport) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        r.operator_kind,
        r.beta,
        r.p,
        r.interval.a(),
        r.interval.b(),
        num(r.value),
        num(r.error_estimate),
        r.n_eval_points
    );
}

fn scheme(nodes: usize) -> Result<QuadratureScheme, Failure> {
    QuadratureScheme::product_trapezoid(nodes).map_err(|e| Failure::Usage(format!("--nodes: {e}")))
}

fn norm_options(n: &NormArgs) -> Result<NormOptions, Failure> {
    Ok(NormOptions {
        tol: n.tol,
        n_grid: n.grid,
        scheme: scheme(n.common.nodes)?,
    })
}

/// Writes CSV into `out`; on a numerical failure part of it may already be written.
fn run(command: &Command, out: &mut String) -> Result<(), Failure> {
    match command {
        Command::Derive(d) => {
            let iv = d.common.interval;
            if !(d.t > iv.a() && d.t <= iv.b()) {
                return Err(Failure::Usage(format!(
                    "-t: {} is not in ({}, {}]",
                    d.t,
                    iv.a(),
                    iv.b()
                )));
            }
            let order = FractionalOrder::new(d.alpha)?;
            let v = fractional_derivative(
                &d.common.function,
                d.kind,
                order,
                iv.a(),
                d.t,
                scheme(d.common.nodes)?,
            )?;
            out.push_str("function,kind,alpha,a,t,value\n");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                d.common.function,
                d.kind,
                d.alpha,
                iv.a(),
                d.t,
                num(v)
            );
        }
        Command::Error(e) => {
            let n = &e.norm;
            let r = error_norm(
                &n.common.function,
                n.kind,
                n.p,
                e.beta,
                n.common.interval,
                &norm_options(n)?,
            )?;
            out.push_str(REPORT_HEADER);
            out.push('\n');
            report_row(out, &r);
        }
        Command::Order(o) => {
            let n = &o.norm;
            let reports = error_sweep_with(
                &n.common.function,
                n.kind,
                n.p,
                &o.betas.0,
                n.common.interval,
                &norm_options(n)?,
            )?;
            out.push_str(REPORT_HEADER);
            out.push('\n');
            for r in &reports {
                report_row(out, r);
            }
            let fit =
                analysis::fit_order(&reports).map_err(|e| Failure::Numerical(e.to_string()))?;
            out.push_str("r_hat,log_c_hat,residual\n");
            let _ = writeln!(
                out,
                "{},{},{}",
                num(fit.r_hat),
                num(fit.log_c_hat),
                num(fit.residual)
            );
        }
        Command::Ratio(r) => {
            let res = match r.beta {
                Some(beta) => analysis::ratio_cf_over_c_l1(r.m, r.t, beta),
                None => analysis::ratio_limit(r.m, r.t),
            }
            .map_err(|e| match e {
                Error::Domain(msg) => Failure::Usage(format!("--m/--T: {msg}")),
                other => Failure::from(other),
            })?;
            out.push_str("m,T,beta,ratio\n");
            let beta = res.beta.map(|b| b.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", res.m, res.t, beta, sig10(res.value));
        }
        Command::Table1 => {
            out.push_str("m,ratio_T1,ratio_Tm1\n");
            for row in analysis::table1() {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    row.m,
                    sig10(row.ratio_t1),
                    sig10(row.ratio_tm1)
                );
            }
        }
        Command::Figures(fig) => figures(fig, out)?,
    }
    Ok(())
}

fn figures(fig: &FiguresArgs, out: &mut String) -> Result<(), Failure> {
    let f = &fig.common.function;
    let iv = fig.common.interval;
    let sch = scheme(fig.common.nodes)?;
    let (a, b) = (iv.a(), iv.b());
    let ts: Vec<f64> = (1..=fig.points)
        .map(|i| {
            if i == fig.points {
                b
            } else {
                a + (b - a) * i as f64 / fig.points as f64
            }
        })
        .collect();
    let rows = ts
        .par_iter()
        .map(|&t| -> Result<String, Error> {
            let side = if t == b { Side::Left } else { Side::Right };
            let fprime = f.derivative_limit(t, side)?;
            let mut s = String::new();
            for &alpha in &fig.alphas.0 {
                let order = FractionalOrder::new(alpha)?;
                let _ = writeln!(s, "{},{},fprime,{}", num(t), alpha, num(fprime));
                for kind in OperatorKind::ALL {
                    let v = fractional_derivative(f, kind, order, a, t, sch)?;
                    let _ = writeln!(s, "{},{},{},{}", num(t), alpha, kind, num(v));
                }
            }
            Ok(s)
        })
        .collect::<Vec<_>>();
    out.push_str("t,alpha,kind,value\n");
    for row in rows {
        out.push_str(&row?);
    }
    Ok(())
}

fn emit(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{line}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }

    let mut out = String::new();
    let status = run(&cli.command, &mut out);
    if let Err(e) = emit(cli.out.as_ref(), &out) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(3);
    }
    match status {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
