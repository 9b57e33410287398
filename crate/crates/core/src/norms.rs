//! Error functionals `E_{f,p}(β) = ‖D^{1−β} f − f'‖_{L^p(a,b)}` for p = 1, ∞.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::funcat::{Interval, Side, TestFunction};
use crate::operators::{fractional_derivative, FractionalOrder, OperatorKind, QuadratureScheme};
use crate::quad::{self, AdaptiveOptions};
use crate::specfun::recip_gamma;

/// Default absolute tolerance of the L¹ integration.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default grid size for the L∞ search.
pub const DEFAULT_GRID: usize = 20_001;
/// Evaluation budget of the adaptive L¹ integration.
pub const MAX_EVALUATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    One,
    Infinity,
}

impl NormKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::One => "1",
            Self::Infinity => "inf",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Self::One),
            "inf" | "Inf" | "infinity" => Ok(Self::Infinity),
            _ => Err(domain(format!("norm must be `1` or `inf`, got `{s}`"))),
        }
    }
}

/// One evaluation of `E_{f,p}(β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub operator_kind: OperatorKind,
    pub beta: f64,
    pub p: NormKind,
    pub interval: Interval,
    pub value: f64,
    /// Operator evaluations spent (quadrature nodes or grid points).
    pub n_eval_points: usize,
    /// Estimated absolute error of `value` (L¹ only; zero for L∞).
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    pub tol: f64,
    pub n_grid: usize,
    pub scheme: QuadratureScheme,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            n_grid: DEFAULT_GRID,
            scheme: QuadratureScheme::default(),
        }
    }
}

/// `|D^{1−β} f(t) − f'(t)|` at an interior point, taking `f'` from the side of `toward`.
fn pointwise_error(
    f: &TestFunction,
    kind: OperatorKind,
    order: FractionalOrder,
    a: f64,
    t: f64,
    side: Side,
    scheme: QuadratureScheme,
) -> Result<f64> {
    let d = fractional_derivative(f, kind, order, a, t, scheme)?;
    Ok((d - f.derivative_limit(t, side)?).abs())
}

fn interior_points(f: &TestFunction, interval: &Interval) -> Vec<f64> {
    let (a, b) = (interval.a(), interval.b());
    let mut pts = vec![a];
    pts.extend(f.split_points().into_iter().filter(|&x| x > a && x < b));
    pts.push(b);
    pts
}

/// Levels of geometric grading to the right of each breakpoint.
const GRADING_LEVELS: i32 = 30;

/// Adds `p + (q−p)·4^{−k}`, `k = 1..=30`, inside every panel `[p, q]`.
///
/// Boundary layers of width β (Caputo-Fabrizio) or `e^{−1/β}` (Caputo)
/// start at the left end of each panel; graded panels make them visible to
/// the adaptive rule.
fn graded(points: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(points.len() * (GRADING_LEVELS as usize + 1));
    for w in points.windows(2) {
        let (p, q) = (w[0], w[1]);
        out.push(p);
        for k in (1..=GRADING_LEVELS).rev() {
            out.push(p + (q - p) * 0.25f64.powi(k));
        }
    }
    out.push(*points.last().expect("non-empty"));
    out.dedup();
    out
}

fn check_beta(beta: f64) -> Result<FractionalOrder> {
    FractionalOrder::from_complement(beta)
}

/// `E_{f,1}(β)` by adaptive Gauss–Kronrod, split at the kinks of `f`.
///
/// When the Riemann-Liouville integrand carries the `(t−a)^{β−1}` singularity
/// (f(a) ≠ 0) the integration runs in `w = ((t−a)/(b−a))^β`, where that term
/// becomes the constant `f(a)(b−a)^β/Γ(1+β)`.
pub fn error_l1(
    f: &TestFunction,
    kind: OperatorKind,
    beta: f64,
    interval: Interval,
    tol: f64,
) -> Result<ErrorReport> {
    let opts = NormOptions {
        tol,
        ..NormOptions::default()
    };
    error_l1_with(f, kind, beta, interval, &opts)
}

pub fn error_l1_with(
    f: &TestFunction,
    kind: OperatorKind,
    beta: f64,
    interval: Interval,
    opts: &NormOptions,
) -> Result<ErrorReport> {
    let order = check_beta(beta)?;
    if !(opts.tol > 0.0) {
        return Err(domain(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let (a, b) = (interval.a(), interval.b());
    let len = b - a;
    let pts = interior_points(f, &interval);
    let adaptive = AdaptiveOptions {
        abs_tol: opts.tol,
        rel_tol: 0.0,
        max_evaluations: MAX_EVALUATIONS,
    };
    let fa = f.eval(a)?;
    let scheme = opts.scheme;

    let result = if kind == OperatorKind::RiemannLiouville && fa != 0.0 {
        // boundary term times dt/dw, constant in w
        let boundary = fa * len.powf(beta) * recip_gamma(1.0 + beta);
        let w_pts: Vec<f64> = graded(
            &pts.iter()
                .map(|&x| ((x - a) / len).powf(beta))
                .collect::<Vec<_>>(),
        );
        quad::integrate(
            |w| {
                let s = len * (w.ln() / beta).exp();
                let t = a + s;
                if s == 0.0 || t == a {
                    // t underflows onto a: the Caputo part carries the vanishing factor dt/dw
                    return Ok(boundary.abs());
                }
                let jac = s / (beta * w);
                let c = fractional_derivative(f, OperatorKind::Caputo, order, a, t, scheme)?;
                let d = f.derivative_limit(t, Side::Right)?;
                Ok((boundary + (c - d) * jac).abs())
            },
            &w_pts,
            &adaptive,
        )?
    } else {
        quad::integrate(
            |t| pointwise_error(f, kind, order, a, t, Side::Right, scheme),
            &graded(&pts),
            &adaptive,
        )?
    };
    Ok(ErrorReport {
        operator_kind: kind,
        beta,
        p: NormKind::One,
        interval,
        value: result.value.max(0.0),
        n_eval_points: result.evaluations,
        error_estimate: result.error_estimate,
    })
}

/// `E_{f,∞}(β)`: essential supremum over `(a, b]`.
///
/// Candidates are a uniform grid, a golden-section refinement around the
/// grid maximum, the limit `t → a⁺` (where Caputo and Caputo-Fabrizio
/// vanish, leaving `|f'(a⁺)|`) and both one-sided limits at each kink. A
/// Riemann-Liouville error with `f(a) ≠ 0` is unbounded and reported as `∞`.
pub fn error_linf(
    f: &TestFunction,
    kind: OperatorKind,
    beta: f64,
    interval: Interval,
    n_grid: usize,
) -> Result<ErrorReport> {
    let opts = NormOptions {
        n_grid,
        ..NormOptions::default()
    };
    error_linf_with(f, kind, beta, interval, &opts)
}

pub fn error_linf_with(
    f: &TestFunction,
    kind: OperatorKind,
    beta: f64,
    interval: Interval,
    opts: &NormOptions,
) -> Result<ErrorReport> {
    let order = check_beta(beta)?;
    if opts.n_grid < 2 {
        return Err(domain(format!(
            "L-infinity grid needs at least 2 points, got {}",
            opts.n_grid
        )));
    }
    let (a, b) = (interval.a(), interval.b());
    let scheme = opts.scheme;
    let report = |value: f64, n: usize| ErrorReport {
        operator_kind: kind,
        beta,
        p: NormKind::Infinity,
        interval,
        value,
        n_eval_points: n,
        error_estimate: 0.0,
    };

    if kind == OperatorKind::RiemannLiouville && f.eval(a)? != 0.0 {
        return Ok(report(f64::INFINITY, 0));
    }
    // limit t → a⁺: the operator vanishes, |f'(a⁺)| remains
    let start = match f.derivative_limit(a, Side::Right) {
        Ok(d) if d.is_finite() => d.abs(),
        _ => return Ok(report(f64::INFINITY, 0)),
    };

    let kinks = f.kinks();
    let error_at = |t: f64| -> Result<f64> {
        if t == b {
            pointwise_error(f, kind, order, a, t, Side::Left, scheme)
        } else if kinks.contains(&t) {
            let l = pointwise_error(f, kind, order, a, t, Side::Left, scheme)?;
            let r = pointwise_error(f, kind, order, a, t, Side::Right, scheme)?;
            Ok(l.max(r))
        } else {
            pointwise_error(f, kind, order, a, t, Side::Right, scheme)
        }
    };

    let n = opts.n_grid - 1;
    let h = (b - a) / n as f64;
    let mut grid: Vec<f64> = (1..=n)
        .map(|i| if i == n { b } else { a + i as f64 * h })
        .collect();
    grid.extend(
        graded(&interior_points(f, &interval))
            .into_iter()
            .filter(|&x| x > a),
    );
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let values = grid
        .par_iter()
        .map(|&t| error_at(t))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let mut evaluations = values.len();

    let (imax, &vmax) = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty grid");
    let lo = if imax == 0 { a } else { grid[imax - 1] };
    let hi = grid.get(imax + 1).copied().unwrap_or(b);
    let (refined, used) = golden_max(&error_at, lo, hi, a)?;
    evaluations += used;

    let mut best = vmax.max(refined).max(start);
    for &c in kinks.iter().filter(|&&c| c > a && c <= b) {
        best = best.max(error_at(c)?);
        evaluations += 2;
    }
    Ok(report(best, evaluations))
}

/// Golden-section maximisation on `(lo, hi]`, never evaluating at `a`.
fn golden_max<F>(g: &F, lo: f64, hi: f64, a: f64) -> Result<(f64, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut lo = lo;
    let mut hi = hi;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let eval = |x: f64| if x > a { g(x) } else { Ok(f64::NEG_INFINITY) };
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    let mut used = 2;
    let mut best = f1.max(f2);
    while hi - lo > 1e-13 * (1.0 + hi.abs()) && used < 200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1)?;
        }
        used += 1;
        best = best.max(f1).max(f2);
    }
    Ok((best, used))
}

/// `E_{f,p}(β)` for either norm.
pub fn error_norm(
    f: &TestFunction,
    kind: OperatorKind,
    p: NormKind,
    beta: f64,
    interval: Interval,
    opts: &NormOptions,
) -> Result<ErrorReport> {
    match p {
        NormKind::One => error_l1_with(f, kind, beta, interval, opts),
        NormKind::Infinity => error_linf_with(f, kind, beta, interval, opts),
    }
}

/// One report per β (strictly decreasing, non-empty), computed in parallel;
/// output order matches `betas`.
pub fn error_sweep(
    f: &TestFunction,
    kind: OperatorKind,
    p: NormKind,
    betas: &[f64],
    interval: Interval,
) -> Result<Vec<ErrorReport>> {
    error_sweep_with(f, kind, p, betas, interval, &NormOptions::default())
}

pub fn error_sweep_with(
    f: &TestFunction,
    kind: OperatorKind,
    p: NormKind,
    betas: &[f64],
    interval: Interval,
    opts: &NormOptions,
) -> Result<Vec<ErrorReport>> {
    if betas.is_empty() {
        return Err(domain("beta sweep is empty"));
    }
    if betas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(domain("beta sweep must be strictly decreasing"));
    }
    betas
        .par_iter()
        .map(|&beta| {
            error_norm(f, kind, p, beta, interval, opts).map_err(|e| Error::Sweep {
                beta,
                source: Box::new(e),
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}
