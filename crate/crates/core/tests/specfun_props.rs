use fracorder::specfun::{
    digamma, gamma, mittag_leffler_one, mittag_leffler_one_closed, mittag_leffler_one_series,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

/// `Σ_{k<terms} z^k/(k+ω−1)!` in exact rational arithmetic.
fn exact_series(omega: u32, z: f64, terms: u32) -> f64 {
    let zr = BigRational::from_float(z).expect("finite");
    let (p, q) = (zr.numer().clone(), zr.denom().clone());
    // common denominator q^{n−1}(n+ω−2)!
    let n = terms;
    let mut fact_ratio = vec![BigInt::one(); n as usize];
    // fact_ratio[k] = (n+ω−2)!/(k+ω−1)!
    let mut acc = BigInt::one();
    for k in (0..n).rev() {
        fact_ratio[k as usize] = acc.clone();
        acc *= BigInt::from(k + omega - 1).max(BigInt::one());
    }
    let mut num = BigInt::from(0);
    let mut p_pow = BigInt::one();
    let mut q_pows = vec![BigInt::one(); n as usize];
    for k in 1..n as usize {
        q_pows[k] = &q_pows[k - 1] * &q;
    }
    for k in 0..n as usize {
        num += &p_pow * &q_pows[n as usize - 1 - k] * &fact_ratio[k];
        p_pow *= &p;
    }
    let mut den = q_pows[n as usize - 1].clone();
    let mut f = BigInt::one();
    for j in 1..=(n + omega - 2) {
        f *= BigInt::from(j);
    }
    den *= f;
    BigRational::new(num, den).to_f64().expect("representable")
}

#[test]
fn exact_series_oracle_sanity() {
    // E_{1,1}(−1) = e^{−1}
    assert!((exact_series(1, -1.0, 200) - (-1f64).exp()).abs() < 1e-16);
    // E_{1,2}(−5) = (1 − e^{−5})/5
    assert!((exact_series(2, -5.0, 200) - (1.0 - (-5f64).exp()) / 5.0).abs() < 1e-16);
}

#[test]
fn closed_form_matches_exact_series_on_grid() {
    for omega in 2..=8u32 {
        for i in 0..=29 {
            let z = -1.0 - f64::from(i);
            let want = exact_series(omega, z, 200);
            let got = mittag_leffler_one_closed(omega, z).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-8,
                "ω={omega} z={z}: {got} vs {want}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_exact_series(omega in 2u32..=8, z in -30.0f64..=-1.0) {
        let want = exact_series(omega, z, 200);
        let got = mittag_leffler_one_closed(omega, z).unwrap();
        prop_assert!(((got - want) / want).abs() < 1e-8, "ω={} z={}: {} vs {}", omega, z, got, want);
    }

    #[test]
    fn dispatch_matches_exact_series(omega in 2u32..=8, z in -30.0f64..=-1.0) {
        let want = exact_series(omega, z, 200);
        let got = mittag_leffler_one(f64::from(omega), z).unwrap();
        prop_assert!(((got - want) / want).abs() < 1e-8);
    }

    #[test]
    fn series_and_closed_form_agree(omega in 2u32..=8, z in -30.0f64..=-1.0) {
        let s = mittag_leffler_one_series(f64::from(omega), z).unwrap();
        let c = mittag_leffler_one_closed(omega, z).unwrap();
        prop_assert!(((s - c) / c).abs() < 1e-8, "ω={} z={}: {} vs {}", omega, z, s, c);
    }

    #[test]
    fn digamma_recurrence(x in 0.5f64..=100.0) {
        let d = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
        prop_assert!(d.abs() <= 1e-11, "x={}: {}", x, d);
    }

    #[test]
    fn gamma_ratio(x in 0.5f64..=100.0) {
        let r = gamma(x + 1.0).unwrap() / gamma(x).unwrap();
        prop_assert!(((r - x) / x).abs() <= 1e-11, "x={}: {}", x, r);
    }

    #[test]
    fn mittag_leffler_at_zero(omega in 0.1f64..=10.0) {
        let e = mittag_leffler_one(omega, 0.0).unwrap();
        let g = 1.0 / gamma(omega).unwrap();
        prop_assert!(((e - g) / g).abs() <= 4.0 * f64::EPSILON);
    }
}
