//! Order-of-convergence fits, the Caputo-Fabrizio/Caputo L¹ ratio for
//! `t^m`, the crossing points `t*`, `s*`, and the limit ratio table.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::norms::ErrorReport;
use crate::specfun::{digamma, gamma, ln_gamma, mittag_leffler_one};

/// Fits with a larger maximum log-residual are rejected.
pub const MAX_FIT_RESIDUAL: f64 = 0.5;
/// Fitted exponents below this mean the error does not decay with β.
pub const MIN_FIT_ORDER: f64 = 0.1;
/// Default density of geometric β grids.
pub const DEFAULT_PER_DECADE: usize = 12;
/// Upper end of the bracket search for `t*`.
pub const T_STAR_MAX_BRACKET: f64 = 1e6;

/// Least-squares fit `ln E ≈ log_c_hat + r_hat ln β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    pub r_hat: f64,
    pub log_c_hat: f64,
    /// Maximum absolute log-residual.
    pub residual: f64,
    pub n_points: usize,
}

/// Straight-line fit through `(ln β, ln E)` with no acceptance checks.
pub fn fit_log_log(betas: &[f64], values: &[f64]) -> Result<OrderFit> {
    if betas.len() != values.len() {
        return Err(domain("betas and values differ in length"));
    }
    if betas.len() < 2 {
        return Err(Error::DegenerateFit("need at least 2 points".into()));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateFit(format!(
            "error value {v} has no logarithm; the error does not follow a power law"
        )));
    }
    if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
        return Err(domain(format!("beta must be positive, got {b}")));
    }
    let xs: Vec<f64> = betas.iter().map(|b| b.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all betas are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let r_hat = sxy / sxx;
    let log_c_hat = my - r_hat * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - log_c_hat - r_hat * x).abs())
        .fold(0.0, f64::max);
    Ok(OrderFit {
        r_hat,
        log_c_hat,
        residual,
        n_points: xs.len(),
    })
}

/// Empirical order of convergence of a β sweep.
///
/// Requires at least 4 reports sharing operator, norm and interval, with
/// strictly decreasing β. Refuses the fit when the points are not on a line
/// (residual above [`MAX_FIT_RESIDUAL`]) or when the slope shows no decay
/// (below [`MIN_FIT_ORDER`]).
pub fn fit_order(reports: &[ErrorReport]) -> Result<OrderFit> {
    if reports.len() < 4 {
        return Err(domain(format!(
            "order fit needs at least 4 reports, got {}",
            reports.len()
        )));
    }
    let first = &reports[0];
    if reports.iter().any(|r| {
        r.operator_kind != first.operator_kind || r.p != first.p || r.interval != first.interval
    }) {
        return Err(domain("reports mix operators, norms or intervals"));
    }
    if reports.windows(2).any(|w| !(w[1].beta < w[0].beta)) {
        return Err(domain("report betas must be strictly decreasing"));
    }
    let betas: Vec<f64> = reports.iter().map(|r| r.beta).collect();
    let values: Vec<f64> = reports.iter().map(|r| r.value).collect();
    let fit = fit_log_log(&betas, &values)?;
    if fit.residual > MAX_FIT_RESIDUAL {
        return Err(Error::DegenerateFit(format!(
            "log-residual {:.3} exceeds {MAX_FIT_RESIDUAL}",
            fit.residual
        )));
    }
    if fit.r_hat < MIN_FIT_ORDER {
        return Err(Error::DegenerateFit(format!(
            "slope {:.4} below {MIN_FIT_ORDER}: error does not vanish as beta -> 0",
            fit.r_hat
        )));
    }
    Ok(fit)
}

/// `start, start·10^{-1/k}, …, end` with `k` points per decade.
pub fn geometric_betas(start: f64, end: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(start < 1.0 && end > 0.0 && end < start) {
        return Err(domain(format!(
            "geometric grid needs 1 > start > end > 0, got start={start}, end={end}"
        )));
    }
    if per_decade == 0 {
        return Err(domain("per_decade must be positive"));
    }
    let decades = (start / end).log10();
    let steps = ((decades * per_decade as f64).round() as usize).max(1);
    let (ls, le) = (start.ln(), end.ln());
    let mut out: Vec<f64> = (0..=steps)
        .map(|k| (ls + (le - ls) * k as f64 / steps as f64).exp())
        .collect();
    out[0] = start;
    out[steps] = end;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioResult {
    pub m: u32,
    pub t: f64,
    /// `None` for the β → 0 limit.
    pub beta: Option<f64>,
    pub value: f64,
}

fn check_m_t(m: u32, t: f64) -> Result<()> {
    if m < 2 {
        return Err(domain(format!("m must be at least 2, got {m}")));
    }
    if !(t > 0.0 && t <= (m - 1) as f64) {
        return Err(domain(format!("T must lie in (0, {}], got {t}", m - 1)));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(domain(format!("beta must lie in (0,1), got {beta}")));
    }
    Ok(())
}

/// L¹ error of the Caputo-Fabrizio derivative of `t^m` on `(0, T)`, `T ≤ m−1`.
pub fn cf_power_l1(m: u32, t: f64, beta: f64) -> Result<f64> {
    check_m_t(m, t)?;
    check_beta(beta)?;
    let rate = (1.0 - beta) / beta;
    let e = mittag_leffler_one(f64::from(m + 1), -rate * t)?;
    let fact = gamma(f64::from(m) + 1.0)?;
    Ok(t.powi(m as i32) / (1.0 - beta) * (fact * e - beta))
}

/// L¹ error of the Caputo derivative of `t^m` on `(0, T)`, `T ≤ m−1`.
pub fn caputo_power_l1(m: u32, t: f64, beta: f64) -> Result<f64> {
    check_m_t(m, t)?;
    check_beta(beta)?;
    let mf = f64::from(m);
    // Γ(m+β+1) − Γ(m+1)T^β = Γ(m+1)(expm1(a) − expm1(b))
    let a = ln_gamma(mf + 1.0 + beta)? - ln_gamma(mf + 1.0)?;
    let b = beta * t.ln();
    let diff = a.exp_m1() - b.exp_m1();
    Ok(t.powi(m as i32) * (ln_gamma(mf + 1.0)? - ln_gamma(mf + 1.0 + beta)?).exp() * diff)
}

/// Ratio of the Caputo-Fabrizio to the Caputo L¹ error for `t^m` on `(0, T)`.
pub fn ratio_cf_over_c_l1(m: u32, t: f64, beta: f64) -> Result<RatioResult> {
    let num = cf_power_l1(m, t, beta)?;
    let den = caputo_power_l1(m, t, beta)?;
    if den == 0.0 {
        return Err(Error::DegenerateFit(format!(
            "Caputo error vanishes at m={m}, T={t}, beta={beta}"
        )));
    }
    Ok(RatioResult {
        m,
        t,
        beta: Some(beta),
        value: num / den,
    })
}

/// `lim_{β→0} ratio = ((m−T)/T) / (Ψ(m+1) − ln T)`.
pub fn ratio_limit(m: u32, t: f64) -> Result<RatioResult> {
    check_m_t(m, t)?;
    let denom = digamma(f64::from(m) + 1.0)? - t.ln();
    debug_assert!(denom > 0.0);
    let value = (f64::from(m) - t) / t / denom;
    Ok(RatioResult {
        m,
        t,
        beta: None,
        value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub m: u32,
    pub ratio_t1: f64,
    pub ratio_tm1: f64,
}

/// Limit ratios at `T = 1` and `T = m−1` for `m = 3, …, 6`.
pub fn table1() -> Vec<Table1Row> {
    (3u32..=6)
        .into_par_iter()
        .map(|m| Table1Row {
            m,
            ratio_t1: ratio_limit(m, 1.0).expect("valid cell").value,
            ratio_tm1: ratio_limit(m, f64::from(m - 1)).expect("valid cell").value,
        })
        .collect()
}

fn check_m_beta(m: u32, beta: f64) -> Result<()> {
    if m < 2 {
        return Err(domain(format!("m must be at least 2, got {m}")));
    }
    check_beta(beta)
}

/// `Γ(m) E_{1,m}(−((1−β)/β) v) − β`.
pub fn t_star_residual(m: u32, beta: f64, v: f64) -> Result<f64> {
    check_m_beta(m, beta)?;
    let rate = (1.0 - beta) / beta;
    Ok(gamma(f64::from(m))? * mittag_leffler_one(f64::from(m), -rate * v)? - beta)
}

/// Root `v ≥ m−1` of [`t_star_residual`].
///
/// The bracket `[m−1, V]` is doubled until a sign change (V ≤ 10⁶); the
/// bracket is then scanned and more than one sign change is an error.
pub fn t_star(m: u32, beta: f64) -> Result<f64> {
    check_m_beta(m, beta)?;
    let g = |v: f64| t_star_residual(m, beta, v);
    let lo0 = f64::from(m - 1);
    let g_lo = g(lo0)?;
    if g_lo == 0.0 {
        return Ok(lo0);
    }
    let mut hi = 2.0 * lo0;
    while g(hi)?.signum() == g_lo.signum() {
        hi *= 2.0;
        if hi > T_STAR_MAX_BRACKET {
            return Err(Error::Bracketing {
                lo: lo0,
                hi: T_STAR_MAX_BRACKET,
            });
        }
    }

    const SCAN: usize = 512;
    let mut prev = g_lo;
    let mut brackets = Vec::new();
    let mut prev_x = lo0;
    for i in 1..=SCAN {
        let x = lo0 + (hi - lo0) * i as f64 / SCAN as f64;
        let gx = g(x)?;
        if gx == 0.0 || gx.signum() != prev.signum() {
            brackets.push((prev_x, x));
        }
        if gx != 0.0 {
            prev = gx;
        }
        prev_x = x;
    }
    if brackets.len() != 1 {
        return Err(Error::MultipleRoots {
            count: brackets.len(),
            lo: lo0,
            hi,
        });
    }
    let (mut a, mut b) = brackets[0];
    let mut ga = g(a)?;
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Ok(if ga.abs() <= g(b)?.abs() { a } else { b })
}

/// `w^β Γ(m)/Γ(m+β) − 1`.
pub fn s_star_residual(m: u32, beta: f64, w: f64) -> Result<f64> {
    check_m_beta(m, beta)?;
    let mf = f64::from(m);
    Ok((beta * w.ln() + ln_gamma(mf)? - ln_gamma(mf + beta)?).exp_m1())
}

/// `(Γ(m+β)/Γ(m))^{1/β}`.
pub fn s_star(m: u32, beta: f64) -> Result<f64> {
    check_m_beta(m, beta)?;
    let mf = f64::from(m);
    Ok(((ln_gamma(mf + beta)? - ln_gamma(mf)?) / beta).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcat::Interval;
    use crate::norms::NormKind;
    use crate::operators::OperatorKind;
    use crate::specfun::EULER_GAMMA;

    fn synthetic(betas: &[f64], values: &[f64]) -> Vec<ErrorReport> {
        betas
            .iter()
            .zip(values)
            .map(|(&beta, &value)| ErrorReport {
                operator_kind: OperatorKind::Caputo,
                beta,
                p: NormKind::One,
                interval: Interval::new(0.0, 1.0).unwrap(),
                value,
                n_eval_points: 0,
                error_estimate: 0.0,
            })
            .collect()
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let betas = [0.1, 0.05, 0.02, 0.01];
        let values: Vec<f64> = betas.iter().map(|b: &f64| 3.0 * b.powf(0.7)).collect();
        let fit = fit_order(&synthetic(&betas, &values)).unwrap();
        assert!((fit.r_hat - 0.7).abs() < 1e-12);
        assert!((fit.log_c_hat - 3f64.ln()).abs() < 1e-12);
        assert!(fit.residual <= 1e-12);
        assert_eq!(fit.n_points, 4);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let betas = [0.1, 0.05, 0.02, 0.01];
        assert!(fit_order(&synthetic(&betas[..3], &[1.0, 1.0, 1.0])).is_err());
        assert!(matches!(
            fit_order(&synthetic(&betas, &[1.0, 0.5, 0.0, 0.1])),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_order(&synthetic(&[0.1, 0.2, 0.02, 0.01], &[1.0; 4])).is_err());
        // flat error: no decay
        assert!(matches!(
            fit_order(&synthetic(&betas, &[1.0; 4])),
            Err(Error::DegenerateFit(_))
        ));
        // scattered
        assert!(matches!(
            fit_order(&synthetic(&betas, &[1.0, 1e-3, 1.0, 1e-4])),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn geometric_grid() {
        let g = geometric_betas(1e-1, 1e-4, 12).unwrap();
        assert_eq!(g.len(), 37);
        assert_eq!(g[0], 1e-1);
        assert_eq!(g[36], 1e-4);
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        assert!((g[12] - 1e-2).abs() < 1e-15);
        assert!(geometric_betas(1e-4, 1e-1, 12).is_err());
    }

    #[test]
    fn table_values() {
        let rows = table1();
        let want = [
            (3, 1.592207522, 0.8881460240),
            (4, 1.991876242, 0.8179851126),
            (5, 2.344504178, 0.7816816178),
            (6, 2.669821563, 0.7594559202),
        ];
        assert_eq!(rows.len(), 4);
        for (row, (m, t1, tm1)) in rows.iter().zip(want) {
            assert_eq!(row.m, m);
            assert!((row.ratio_t1 - t1).abs() < 1e-8, "{row:?}");
            assert!((row.ratio_tm1 - tm1).abs() < 1e-8, "{row:?}");
        }
    }

    #[test]
    fn finite_beta_ratio_approaches_limit() {
        let r = ratio_cf_over_c_l1(3, 1.0, 1e-4).unwrap();
        assert!((r.value - 1.592207522).abs() < 1e-2);
        let r = ratio_cf_over_c_l1(3, 2.0, 1e-4).unwrap();
        assert!((r.value - 0.8881460240).abs() < 1e-2);
        assert!(ratio_cf_over_c_l1(3, 2.5, 0.1).is_err());
        assert!(ratio_limit(3, 0.0).is_err());
    }

    #[test]
    fn t_star_known_root() {
        let v = t_star(2, 0.5).unwrap();
        // (1 − e^{−v})/v = 1/2
        let x = v;
        assert!(((1.0 - (-x).exp()) / x - 0.5).abs() < 1e-14);
        assert!((v - 1.593_624_260_040_040_6).abs() < 1e-9);
        assert!(t_star_residual(2, 0.5, v).unwrap().abs() < 1e-12);
    }

    #[test]
    fn s_star_values() {
        let w = s_star(2, 0.5).unwrap();
        assert!((w - 1.767_145_867_644_259).abs() < 1e-12);
        let w0 = s_star(2, 1e-6).unwrap();
        assert!((w0 - (1.0 - EULER_GAMMA).exp()).abs() < 1e-4);
        assert!(s_star_residual(2, 0.5, w).unwrap().abs() < 1e-14);
    }
}
