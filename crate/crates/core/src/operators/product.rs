//! Product integration of `∫_a^t g(τ) w(t − τ) dτ`.
//!
//! `g` is replaced by its piecewise-linear interpolant on a uniform grid
//! (per smooth segment) and every cell is integrated exactly against the
//! weight `w`, which is either a weakly singular power `u^{−θ}` or the
//! exponential `e^{−λu}`.

use crate::error::Result;
use crate::funcat::Side;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Weight {
    /// `u^{−θ}`, `0 < θ < 1`.
    Power { theta: f64 },
    /// `e^{−λ u}`, `λ ≥ 0`.
    Exponential { rate: f64 },
}

/// Switch from exact moments to the 1/v series at this cell distance.
const FAR_CELL: f64 = 8.0;

/// Moments `(∫_0^1 (1−s)(v−s)^{−θ} ds, ∫_0^1 s (v−s)^{−θ} ds)` for `v ≥ 1`.
pub(crate) fn power_moments(v: f64, theta: f64) -> (f64, f64) {
    if v >= FAR_CELL {
        // (v−s)^{−θ} = v^{−θ} Σ (θ)_n/n! (s/v)^n
        let mut c = 1.0;
        let mut p = 1.0;
        let inv = 1.0 / v;
        let mut a = 0.0;
        let mut b = 0.0;
        for n in 0..64 {
            let nf = n as f64;
            let ta = c * p / ((nf + 1.0) * (nf + 2.0));
            a += ta;
            b += c * p / (nf + 2.0);
            if ta < 1e-18 * a {
                break;
            }
            c *= (theta + nf) / (nf + 1.0);
            p *= inv;
        }
        let scale = v.powf(-theta);
        return (a * scale, b * scale);
    }
    let e = 1.0 - theta;
    let w = (v - 1.0).max(0.0);
    // m0 = (v^e − w^e)/e, formed without cancellation when e is tiny
    let m0 = if w == 0.0 {
        v.powf(e) / e
    } else {
        (e * w.ln()).exp() * (e * (1.0 / w).ln_1p()).exp_m1() / e
    };
    let m1 = (v.powf(e + 1.0) - w.powf(e + 1.0)) / (e + 1.0);
    (m1 - w * m0, v * m0 - m1)
}

/// `((1 − e^{−μ}(1+μ))/μ², (μ − 1 + e^{−μ})/μ²)`, series for small μ.
pub(crate) fn exponential_moments(mu: f64) -> (f64, f64) {
    if mu < 0.1 {
        let mut a = 0.0;
        let mut b = 0.0;
        let mut fact = 2.0; // n!
        let mut p = 1.0; // (−μ)^{n−2}
        for n in 2..20 {
            let nf = n as f64;
            a += (nf - 1.0) * p / fact;
            b += p / fact;
            p *= -mu;
            fact *= nf + 1.0;
        }
        return (a, b);
    }
    let em = (-mu).exp();
    let mu2 = mu * mu;
    ((1.0 - em * (1.0 + mu)) / mu2, (mu - 1.0 + em) / mu2)
}

/// Splits `[a, t]` at the interior `breaks` and distributes `n_cells` cells
/// over the segments in proportion to their length (at least one each).
pub(crate) fn segments(a: f64, t: f64, breaks: &[f64], n_cells: usize) -> Vec<(f64, f64, usize)> {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < t));
    pts.push(t);
    let total = t - a;
    pts.windows(2)
        .map(|w| {
            let cells = ((n_cells as f64) * (w[1] - w[0]) / total).round().max(1.0) as usize;
            (w[0], w[1], cells)
        })
        .collect()
}

/// `∫_a^t g(τ) w(t − τ) dτ` with `g` sampled through `g(τ, side)`; the side
/// tells which one-sided limit to take at a segment end.
pub(crate) fn convolve<G>(
    g: G,
    a: f64,
    t: f64,
    breaks: &[f64],
    n_cells: usize,
    weight: Weight,
) -> Result<f64>
where
    G: Fn(f64, Side) -> Result<f64>,
{
    let mut total = 0.0;
    for (s0, s1, m) in segments(a, t, breaks, n_cells) {
        let h = (s1 - s0) / m as f64;
        // distance from t to the segment end, in cells
        let tail = (t - s1) / h;
        let mut g_lo = g(s0, Side::Right)?;
        for j in 0..m {
            let g_hi = if j + 1 == m {
                g(s1, Side::Left)?
            } else {
                g(s0 + (j + 1) as f64 * h, Side::Right)?
            };
            // cell spans u ∈ [h·w, h·(w+1)], w = distance of its right end from t
            let w = tail + (m - j - 1) as f64;
            let (ca, cb) = match weight {
                Weight::Power { theta } => {
                    let (ma, mb) = power_moments(w + 1.0, theta);
                    (ma * h.powf(1.0 - theta), mb * h.powf(1.0 - theta))
                }
                Weight::Exponential { rate } => {
                    let (pa, pb) = exponential_moments(rate * h);
                    let decay = (-rate * h * w).exp() * h;
                    (pa * decay, pb * decay)
                }
            };
            total += g_lo * ca + g_hi * cb;
            g_lo = g_hi;
        }
    }
    Ok(total)
}
