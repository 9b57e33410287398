//! One-parameter-offset Mittag-Leffler function
//! E_{1,ω}(z) = Σ_k z^k / Γ(k + ω).
//!
//! Three evaluation paths:
//! - power series summed in double-double (any ω, moderate |z|),
//! - the finite closed form z^{-m}(e^z − Σ_{k<m} z^k/k!) for ω = m + 1 integer,
//! - the algebraic asymptotic expansion for non-integer ω and z ≪ 0.

use super::ddouble::DoubleDouble;
use super::gamma::{gamma, recip_gamma};
use crate::error::{domain, Error, Result};

/// Series terms are summed until they drop below this fraction of the running sum.
pub const SERIES_REL_CUTOFF: f64 = 1e-18;

/// Hard cap on series terms.
pub const MAX_SERIES_TERMS: usize = 100_000;

/// Below this argument, non-integer ω switches to the asymptotic expansion.
pub const ASYMPTOTIC_THRESHOLD: f64 = -40.0;

/// Parameters (ρ, ω) of the two-parameter Mittag-Leffler function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    rho: f64,
    omega: f64,
}

impl MLParams {
    pub fn new(rho: f64, omega: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) || !(omega > 0.0 && omega.is_finite()) {
            return Err(domain(format!(
                "Mittag-Leffler parameters must be positive, got rho = {rho}, omega = {omega}"
            )));
        }
        Ok(Self { rho, omega })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// E_{ρ,ω}(z). The ρ = 1 case dispatches to [`mittag_leffler_one`];
    /// other ρ use the plain truncated series.
    pub fn eval(&self, z: f64) -> Result<f64> {
        if self.rho == 1.0 {
            return mittag_leffler_one(self.omega, z);
        }
        check_arg(z)?;
        let mut sum = DoubleDouble::ZERO;
        let mut pow = DoubleDouble::ONE;
        for k in 0..MAX_SERIES_TERMS {
            let term = pow * recip_gamma(self.rho * k as f64 + self.omega);
            sum = sum + term;
            let growing = (self.rho * k as f64).powf(self.rho) < z.abs();
            if !growing && term.abs_f64() <= SERIES_REL_CUTOFF * sum.abs_f64() {
                return Ok(sum.to_f64());
            }
            if !sum.is_finite() {
                return Ok(sum.to_f64());
            }
            pow = pow * z;
        }
        Err(Error::NonConvergence {
            terms: MAX_SERIES_TERMS,
        })
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(domain(format!(
            "Mittag-Leffler omega must be positive, got {omega}"
        )));
    }
    Ok(())
}

fn check_arg(z: f64) -> Result<()> {
    if !z.is_finite() {
        return Err(domain(format!(
            "Mittag-Leffler argument must be finite, got {z}"
        )));
    }
    Ok(())
}

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0
}

/// E_{1,ω}(z) with automatic choice of evaluation path.
pub fn mittag_leffler_one(omega: f64, z: f64) -> Result<f64> {
    check_omega(omega)?;
    check_arg(z)?;
    if z < -1.0 && is_integer(omega) {
        return mittag_leffler_one_closed(omega as u32, z);
    }
    if z < ASYMPTOTIC_THRESHOLD {
        return Ok(asymptotic(omega, z));
    }
    mittag_leffler_one_series(omega, z)
}

/// Power series Σ z^k / Γ(k + ω), accumulated in double-double.
///
/// Term ratios are formed from the exact offset `k + ω` so that the
/// cancellation for z ≪ 0 is absorbed by the extra precision.
pub fn mittag_leffler_one_series(omega: f64, z: f64) -> Result<f64> {
    check_omega(omega)?;
    check_arg(z)?;
    let omega_dd = DoubleDouble::new(omega);
    let mut term = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ONE;
    for k in 0..MAX_SERIES_TERMS {
        let denom = omega_dd + k as f64;
        term = (term * z) / denom;
        sum = sum + term;
        let past_peak = k as f64 + omega >= z.abs();
        if past_peak && term.abs_f64() <= SERIES_REL_CUTOFF * sum.abs_f64() {
            return Ok(sum.to_f64() / gamma(omega)?);
        }
        if !sum.is_finite() {
            return Ok(sum.to_f64());
        }
    }
    Err(Error::NonConvergence {
        terms: MAX_SERIES_TERMS,
    })
}

/// Closed form for integer ω = m + 1:
/// E_{1,m+1}(z) = z^{-m} (e^z − Σ_{k=0}^{m−1} z^k / k!).
///
/// The finite sum is carried in double-double; `omega = 1` is plain `exp`.
pub fn mittag_leffler_one_closed(omega: u32, z: f64) -> Result<f64> {
    if omega == 0 {
        return Err(domain("Mittag-Leffler omega must be positive, got 0"));
    }
    check_arg(z)?;
    let m = omega - 1;
    if m == 0 {
        return Ok(z.exp());
    }
    if z == 0.0 {
        return Ok(1.0 / gamma(f64::from(omega))?);
    }
    // u_k = z^{k−m} / k!, built downward from u_{m−1} = 1 / (z (m−1)!)
    let mut u = DoubleDouble::ONE / (DoubleDouble::new(z) * gamma(f64::from(m))?);
    let mut partial = u;
    for k in (1..m).rev() {
        u = (u * f64::from(k)) / z;
        partial = partial + u;
    }
    let head = z.exp() / z.powi(m as i32);
    Ok((DoubleDouble::new(head) - partial).to_f64())
}

/// E_{1,ω}(z) ≈ −Σ_{k≥1} z^{−k} / Γ(ω − k) for z → −∞, optimally truncated.
fn asymptotic(omega: f64, z: f64) -> f64 {
    let inv = 1.0 / z;
    let mut rg = recip_gamma(omega);
    let mut pow = 1.0;
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for k in 1..(z.abs() as usize) {
        rg *= omega - k as f64;
        pow *= inv;
        let term = pow * rg;
        if term.abs() > last {
            break;
        }
        sum -= term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        if term != 0.0 {
            last = term.abs();
        }
    }
    sum
}
