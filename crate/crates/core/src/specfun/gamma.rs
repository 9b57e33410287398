use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

// zeta(k) for k = 2..=30, coefficients of the Taylor series of ln Γ(1 + ε).
const ZETA: [f64; 29] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_370_0,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307_0,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265_0,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_926_0,
    1.000_000_059_608_189_1,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
    1.000_000_003_725_334_0,
    1.000_000_001_862_659_7,
    1.000_000_000_931_327_4,
];

// B_{2k} / (2k (2k - 1)) for the Stirling series of ln Γ.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

// B_{2k} / (2k) for the asymptotic series of Ψ.
const DIGAMMA_ASYMPTOTIC: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43_867.0 / 14_364.0,
    -174_611.0 / 6600.0,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// ln Γ(1 + ε) for small |ε| via its Taylor series, free of cancellation near 0.
fn ln_gamma_1p(eps: f64) -> f64 {
    let mut acc = 0.0;
    let mut pow = -eps;
    for (i, z) in ZETA.iter().enumerate() {
        pow *= -eps;
        let k = (i + 2) as f64;
        acc += z * pow / k;
    }
    -EULER_GAMMA * eps + acc
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + corr
}

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(ln_gamma_positive(x))
}

fn ln_gamma_positive(x: f64) -> f64 {
    const WINDOW: f64 = 0.25;
    if (x - 1.0).abs() <= WINDOW {
        return ln_gamma_1p(x - 1.0);
    }
    if (x - 2.0).abs() <= WINDOW {
        let eps = x - 2.0;
        return ln_gamma_1p(eps) + eps.ln_1p();
    }
    if x >= 10.0 {
        return ln_gamma_stirling(x);
    }
    if x < 0.75 {
        // Γ(x) = Γ(x + 1) / x keeps small arguments away from the pole.
        return ln_gamma_positive(x + 1.0) - x.ln();
    }
    let mut y = x;
    let mut prod = 1.0;
    while y < 10.0 {
        prod *= y;
        y += 1.0;
    }
    ln_gamma_stirling(y) - prod.ln()
}

/// Gamma function for `x > 0`.
///
/// Integer arguments up to 171 use the exact running product of factorials.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain(format!("gamma requires x > 0, got {x}")));
    }
    if x.fract() == 0.0 && x <= 171.0 {
        let n = x as u32;
        return Ok((1..n).fold(1.0, |acc, k| acc * f64::from(k)));
    }
    if x < 1.0 {
        // keep the leading 1/x exact for tiny arguments
        return Ok(ln_gamma_positive(x + 1.0).exp() / x);
    }
    Ok(ln_gamma_positive(x).exp())
}

/// Reciprocal Gamma 1/Γ(x) for any finite real `x`, zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if x > 0.0 {
        return 1.0 / gamma(x).expect("positive argument");
    }
    if x.fract() == 0.0 {
        return 0.0;
    }
    // reflection: 1/Γ(x) = sin(πx) Γ(1 − x) / π
    (PI * x).sin() * gamma(1.0 - x).expect("positive argument") / PI
}

/// Digamma Ψ(x) = Γ′(x)/Γ(x) for `x > 0`.
///
/// Recurrence shifts the argument to `x >= 6`, then the asymptotic series.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut y = x;
    let mut shift = 0.0;
    while y < 6.0 {
        shift -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut series = 0.0;
    let mut p = inv2;
    for c in DIGAMMA_ASYMPTOTIC {
        series += c * p;
        p *= inv2;
    }
    Ok(shift + y.ln() - 0.5 / y - series)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    // Reference values from a 40-digit arbitrary-precision evaluation.
    const LN_GAMMA_REF: &[(f64, f64)] = &[
        (0.5, 0.572_364_942_924_700_087),
        (1.5, -0.120_782_237_635_245_222),
        (2.5, 0.284_682_870_472_919_160),
        (0.1, 2.252_712_651_734_205_960),
        (1e-8, 18.420_680_738_180_208_905),
        (3.7, 1.428_072_326_665_387_922),
        (9.99, 12.779_315_214_350_192_88),
        (33.3, 82.603_723_581_654_952_93),
        (170.0, 701.437_263_808_737_085_35),
        (0.9, 0.066_376_239_734_742_971),
        (1.1, -0.049_872_441_259_839_724),
        (1.8, -0.071_083_872_914_372_167),
    ];

    #[test]
    fn ln_gamma_trivial_points() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        assert!(rel(ln_gamma(5.0).unwrap(), 24f64.ln()) < 1e-14);
    }

    #[test]
    fn ln_gamma_matches_reference() {
        for &(x, want) in LN_GAMMA_REF {
            let got = ln_gamma(x).unwrap();
            assert!(rel(got, want) < 1e-13, "x = {x}: {got} vs {want}");
        }
    }

    #[test]
    fn ln_gamma_near_its_zeros_keeps_relative_accuracy() {
        // ln Γ(1 + ε) ≈ −γ ε for tiny ε
        let eps = 1e-9;
        let got = ln_gamma(1.0 + eps).unwrap();
        let want = -EULER_GAMMA * eps + ZETA[0] / 2.0 * eps * eps;
        assert!(rel(got, want) < 1e-6);
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(4.0).unwrap(), 6.0);
        assert!(rel(gamma(2.5).unwrap(), 1.329_340_388_179_137) < 1e-14);
        let mut fact = 1.0f64;
        for n in 1..=20u32 {
            assert_eq!(gamma(f64::from(n)).unwrap(), fact, "{n}");
            fact *= f64::from(n);
        }
    }

    #[test]
    fn non_positive_arguments_are_rejected() {
        for x in [0.0, -1.0, -0.5, f64::NAN] {
            assert!(matches!(ln_gamma(x), Err(crate::Error::Domain(_))));
            assert!(matches!(gamma(x), Err(crate::Error::Domain(_))));
            assert!(matches!(digamma(x), Err(crate::Error::Domain(_))));
        }
    }

    #[test]
    fn reciprocal_gamma_across_the_poles() {
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-3.0), 0.0);
        // Γ(−0.5) = −2√π
        let want = -1.0 / (2.0 * PI.sqrt());
        assert!(rel(recip_gamma(-0.5), want) < 1e-14);
    }

    #[test]
    fn digamma_values() {
        let g = EULER_GAMMA;
        assert!((digamma(1.0).unwrap() + g).abs() < 1e-14);
        assert!((digamma(2.0).unwrap() - (1.0 - g)).abs() < 1e-14);
        assert!((digamma(4.0).unwrap() - (11.0 / 6.0 - g)).abs() < 1e-14);
        // Ψ(1/2) = −γ − 2 ln 2
        assert!((digamma(0.5).unwrap() + g + 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!((digamma(200.0).unwrap() - 5.295_815_283_219_911_6).abs() < 1e-12);
    }
}
