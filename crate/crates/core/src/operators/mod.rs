//! Fractional operators: Riemann-Liouville integral and derivative, Caputo,
//! Caputo-Fabrizio, and the generic convolution operator `f' * h(·, β)`.
//!
//! Every derivative first asks the catalog for a closed form and falls back
//! to product integration otherwise. The `*_quadrature` variants skip the
//! closed form.

mod product;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::funcat::{rl_boundary_term, Side, TestFunction};
use crate::quad::{self, AdaptiveOptions};
use crate::specfun::recip_gamma;
use product::{convolve, Weight};

/// Default number of grid cells for product quadrature.
pub const DEFAULT_NODES: usize = 4096;

/// A fractional order `α ∈ (0, 1)`. The complement `1 − α` (the `β` of the
/// convergence study) is stored separately so that small β stay exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    alpha: f64,
    complement: f64,
}

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain(format!(
                "fractional order must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            complement: 1.0 - alpha,
        })
    }

    /// The order `1 − β`.
    pub fn from_complement(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(domain(format!("beta must lie in (0, 1), got {beta}")));
        }
        Ok(Self {
            alpha: 1.0 - beta,
            complement: beta,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `1 − α`.
    pub fn complement(&self) -> f64 {
        self.complement
    }

    /// Decay rate `α / (1 − α)` of the Caputo-Fabrizio kernel.
    pub fn cf_rate(&self) -> f64 {
        self.alpha / self.complement
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    RiemannLiouville,
    Caputo,
    CaputoFabrizio,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 3] = [Self::RiemannLiouville, Self::Caputo, Self::CaputoFabrizio];

    pub fn label(&self) -> &'static str {
        match self {
            Self::RiemannLiouville => "RL",
            Self::Caputo => "C",
            Self::CaputoFabrizio => "CF",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "RL" | "rl" => Ok(Self::RiemannLiouville),
            "C" | "c" => Ok(Self::Caputo),
            "CF" | "cf" => Ok(Self::CaputoFabrizio),
            _ => Err(domain(format!(
                "operator kind must be RL, C or CF, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    /// Piecewise-linear integrand against exact power-weight moments.
    ProductTrapezoid,
    /// Piecewise-linear integrand against exact exponential-weight moments.
    ExactExponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureScheme {
    n_nodes: usize,
    kind: QuadratureKind,
}

impl QuadratureScheme {
    pub fn new(n_nodes: usize, kind: QuadratureKind) -> Result<Self> {
        if n_nodes < 2 {
            return Err(domain(format!(
                "quadrature needs at least 2 nodes, got {n_nodes}"
            )));
        }
        Ok(Self { n_nodes, kind })
    }

    pub fn product_trapezoid(n_nodes: usize) -> Result<Self> {
        Self::new(n_nodes, QuadratureKind::ProductTrapezoid)
    }

    pub fn exact_exponential(n_nodes: usize) -> Result<Self> {
        Self::new(n_nodes, QuadratureKind::ExactExponential)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    fn cells(&self) -> usize {
        self.n_nodes - 1
    }
}

impl Default for QuadratureScheme {
    fn default() -> Self {
        Self {
            n_nodes: DEFAULT_NODES,
            kind: QuadratureKind::ProductTrapezoid,
        }
    }
}

/// User kernel `h(t, β)` for the generic operator.
pub type KernelFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

#[derive(Clone)]
pub struct CustomKernel {
    h: Arc<KernelFn>,
    singular_at_zero: bool,
}

impl CustomKernel {
    pub fn new<H>(h: H, singular_at_zero: bool) -> Self
    where
        H: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            h: Arc::new(h),
            singular_at_zero,
        }
    }

    pub fn singular_at_zero(&self) -> bool {
        self.singular_at_zero
    }

    pub fn eval(&self, t: f64, beta: f64) -> f64 {
        (self.h)(t, beta)
    }

    /// `∫_0^horizon |h(u, β)| du`; fails if the integral is not finite.
    pub fn smoke_test(&self, beta: f64, horizon: f64) -> Result<f64> {
        let opts = AdaptiveOptions {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            max_evaluations: 200_000,
        };
        let r = quad::integrate(
            |u| {
                let v = self.eval(u, beta);
                if v.is_finite() {
                    Ok(v.abs())
                } else {
                    Err(Error::NonFiniteKernel { t: u })
                }
            },
            &[0.0, horizon.min(1.0), horizon],
            &opts,
        )?;
        Ok(r.value)
    }
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel")
            .field("singular_at_zero", &self.singular_at_zero)
            .finish_non_exhaustive()
    }
}

/// The convolution kernel `h(·, β)` of the generic operator.
#[derive(Debug, Clone)]
pub enum KernelSpec {
    /// `t^{−(1−β)} / Γ(β)`.
    Caputo,
    /// `e^{−((1−β)/β) t} / β`.
    CaputoFabrizio,
    Custom(CustomKernel),
}

impl KernelSpec {
    pub fn eval(&self, t: f64, beta: f64) -> f64 {
        match self {
            Self::Caputo => t.powf(beta - 1.0) * recip_gamma(beta),
            Self::CaputoFabrizio => (-(1.0 - beta) / beta * t).exp() / beta,
            Self::Custom(k) => k.eval(t, beta),
        }
    }
}

fn check_terminal(a: f64, t: f64) -> Result<()> {
    if !(t > a) || !t.is_finite() || !a.is_finite() {
        return Err(domain(format!(
            "evaluation point must satisfy t > a, got a = {a}, t = {t}"
        )));
    }
    Ok(())
}

fn derivative_sampler(f: &TestFunction) -> impl Fn(f64, Side) -> Result<f64> + '_ {
    move |x, side| f.derivative_limit(x, side)
}

/// Riemann-Liouville integral `(1/Γ(α)) ∫_a^t f(τ)(t−τ)^{α−1} dτ` by product trapezoid.
pub fn rl_integral(
    f: &TestFunction,
    order: FractionalOrder,
    a: f64,
    t: f64,
    scheme: QuadratureScheme,
) -> Result<f64> {
    check_terminal(a, t)?;
    let integral = convolve(
        |x, _| f.eval(x),
        a,
        t,
        &f.split_points(),
        scheme.cells(),
        Weight::Power {
            theta: order.complement(),
        },
    )?;
    Ok(integral * recip_gamma(order.alpha()))
}

/// Caputo derivative `(1/Γ(1−α)) ∫_a^t f'(τ)(t−τ)^{−α} dτ`.
pub fn caputo(
    f: &TestFunction,
    order: FractionalOrder,
    a: f64,
    t: f64,
    scheme: QuadratureScheme,
) -> Result<f64> {
    check_terminal(a, t)?;
    match f.closed_form_fractional(OperatorKind::Caputo, order, a, t) {
        Some(v) => Ok(v),
        None => caputo_quadrature(f, order, a, t, scheme),
    }
}

/// Caputo derivative by product trapezoid only.
pub fn caputo_quadrature(
    f: &TestFunction,
    order: FractionalOrder,
    a: f64,
    t: f64,
    scheme: QuadratureScheme,
) -> Result<f64> {
    check_terminal(a, t)?;
    let integral = convolve(
        derivative_sampler(f),
        a,
        t,
        &f.split_points(),
        scheme.cells(),
        Weight::Power {
            theta: order.alpha(),
        },
    )?;
    Ok(integral * recip_gamma(order.complement()))
}

/// Caputo-Fabrizio derivative `(1/(1−α)) ∫_a^t f'(τ) e^{−(α/(1−α))(t−τ)} dτ`
/// on the default grid.
pub fn caputo_fabrizio(f: &TestFunction, order: FractionalOrder, a: f64, t: f64) -> Result<f64> {
    caputo_fabrizio_with(
        f,
        order,
        a,
        t,
        QuadratureScheme::exact_exponential(DEFAULT_NODES)?,
    )
}

/// Caputo-Fabrizio derivative with an explicit fallback grid.
pub fn caputo_fabrizio_with(
    f: &TestFunction,
    order: FractionalOrder,
    a: f64,
    t: f64,
    scheme: QuadratureScheme,
) -> Result<f64> {
    check_terminal(a, t)?;
    match f.closed_form_fractional(OperatorKind::CaputoFabrizio, order, a, t) {
        Some(v) => Ok(v),
        None => caputo_fabrizio_quadrature(f, order, a, t, scheme),
    }
}

/// Caputo-Fabrizio derivative by exact exponential moments only.
pub fn caputo_fabrizio_quadrature(
    f: &TestFunction,
    order: FractionalOrder,
    a: f64,
    t: f64,
    scheme: QuadratureScheme,
) -> Result<f64> {
    check_terminal(a, t)?;
    let integral = convolve(
        derivative_sampler(f),
        a,
        t,
        &f.split_points(),
        scheme.cells(),
        Weight::Exponential {
            rate: order.cf_rate(),
        },
    )?;
    Ok(integral / order.complement())
}

/// Riemann-Liouville derivative through `f(a)(t−a)^{−α}/Γ(1−α) + ᶜD^α f(t)`.
pub fn riemann_liouville(
    f: &TestFunction,
    order: FractionalOrder,
    a: f64,
    t: f64,
    scheme: QuadratureScheme,
) -> Result<f64> {
    check_terminal(a, t)?;
    let boundary = rl_boundary_term(f.eval(a)?, order, t - a);
    Ok(boundary + caputo(f, order, a, t, scheme)?)
}

/// Any of the three derivatives selected by `kind`.
pub fn fractional_derivative(
    f: &TestFunction,
    kind: OperatorKind,
    order: FractionalOrder,
    a: f64,
    t: f64,
    scheme: QuadratureScheme,
) -> Result<f64> {
    match kind {
        OperatorKind::RiemannLiouville => riemann_liouville(f, order, a, t, scheme),
        OperatorKind::Caputo => caputo(f, order, a, t, scheme),
        OperatorKind::CaputoFabrizio => caputo_fabrizio_with(f, order, a, t, scheme),
    }
}

/// Generic operator `(f' * h(·, β))(t) = ∫_a^t f'(τ) h(t−τ, β) dτ`.
///
/// The Caputo and Caputo-Fabrizio kernels route to [`caputo`] and
/// [`caputo_fabrizio_with`] at order `1 − β`; custom kernels are integrated
/// adaptively in `u = t − τ`, split at the mapped kinks of `f`.
pub fn generic_kernel_derivative(
    f: &TestFunction,
    h: &KernelSpec,
    beta: f64,
    a: f64,
    t: f64,
    scheme: QuadratureScheme,
) -> Result<f64> {
    check_terminal(a, t)?;
    let order = FractionalOrder::from_complement(beta)?;
    match h {
        KernelSpec::Caputo => caputo(f, order, a, t, scheme),
        KernelSpec::CaputoFabrizio => caputo_fabrizio_with(f, order, a, t, scheme),
        KernelSpec::Custom(k) => custom_kernel_derivative(f, k, beta, a, t),
    }
}

fn custom_kernel_derivative(
    f: &TestFunction,
    k: &CustomKernel,
    beta: f64,
    a: f64,
    t: f64,
) -> Result<f64> {
    let span = t - a;
    let mut points = vec![0.0];
    points.extend(
        f.split_points()
            .into_iter()
            .filter(|&x| x > a && x < t)
            .map(|x| t - x)
            .rev(),
    );
    points.push(span);
    if k.singular_at_zero && points[1] > 1e-3 * span {
        // a short first panel concentrates refinement at the singular end
        points.insert(1, 1e-3 * span);
    }
    let opts = AdaptiveOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_evaluations: 1_000_000,
    };
    let r = quad::integrate(
        |u| {
            let hv = k.eval(u, beta);
            if !hv.is_finite() {
                return Err(Error::NonFiniteKernel { t: u });
            }
            if hv == 0.0 {
                return Ok(0.0);
            }
            Ok(f.derivative_limit(t - u, Side::Left)? * hv)
        },
        &points,
        &opts,
    )?;
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(g: f64) -> TestFunction {
        TestFunction::power(g, 0.0).unwrap()
    }

    #[test]
    fn fractional_order_rejects_endpoints() {
        for bad in [0.0, 1.0, -0.1, 1.1, f64::NAN] {
            assert!(FractionalOrder::new(bad).is_err());
            assert!(FractionalOrder::from_complement(bad).is_err());
        }
        let o = FractionalOrder::from_complement(1e-5).unwrap();
        assert_eq!(o.complement(), 1e-5);
    }

    #[test]
    fn scheme_needs_two_nodes() {
        assert!(QuadratureScheme::product_trapezoid(1).is_err());
        assert!(QuadratureScheme::product_trapezoid(2).is_ok());
    }

    #[test]
    fn evaluation_at_the_terminal_is_rejected() {
        let o = FractionalOrder::new(0.5).unwrap();
        let s = QuadratureScheme::default();
        let f = TestFunction::Exponential;
        assert!(caputo(&f, o, 0.0, 0.0, s).is_err());
        assert!(caputo_fabrizio(&f, o, 1.0, 0.5).is_err());
        assert!(riemann_liouville(&f, o, 0.0, 0.0, s).is_err());
        assert!(rl_integral(&f, o, 0.0, -1.0, s).is_err());
    }

    #[test]
    fn rl_integral_examples() {
        let o = FractionalOrder::new(0.5).unwrap();
        let s = QuadratureScheme::default();
        let one = rl_integral(&TestFunction::constant(1.0), o, 0.0, 1.0, s).unwrap();
        assert!((one - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-8);
        let zero = rl_integral(&TestFunction::constant(0.0), o, 0.0, 1.0, s).unwrap();
        assert_eq!(zero, 0.0);
        let lin = rl_integral(&power(1.0), o, 0.0, 1.0, s).unwrap();
        assert!((lin - 0.752_252_778_063_675_1).abs() < 1e-8);
    }

    #[test]
    fn caputo_examples() {
        let s = QuadratureScheme::default();
        let o = FractionalOrder::new(0.3).unwrap();
        let v = caputo(&power(1.0), o, 0.0, 1.0, s).unwrap();
        assert!((v - 1.100_547_405_523_665_7).abs() < 1e-12);
        assert_eq!(
            caputo(&TestFunction::constant(2.0), o, 0.0, 1.0, s).unwrap(),
            0.0
        );
        let g = TestFunction::abs_shift(1.0);
        let o = FractionalOrder::from_complement(0.4).unwrap();
        let v = caputo(&g, o, 0.0, 1.5, s).unwrap();
        assert!((v - 0.382_792_059_459_302).abs() < 1e-12);
        let q = caputo_quadrature(&g, o, 0.0, 1.5, s).unwrap();
        assert!((q - v).abs() < 1e-12, "{q} vs {v}");
    }

    #[test]
    fn caputo_fabrizio_examples() {
        let o = FractionalOrder::new(0.5).unwrap();
        let v = caputo_fabrizio(&power(1.0), o, 0.0, 1.0).unwrap();
        assert!((v - 1.264_241_117_657_115_4).abs() < 1e-13);
        let v = caputo_fabrizio(&power(2.0), o, 0.0, 1.0).unwrap();
        assert!((v - 1.471_517_764_685_769_3).abs() < 1e-13);
        assert_eq!(
            caputo_fabrizio(&TestFunction::constant(5.0), o, 0.0, 1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn riemann_liouville_examples() {
        let s = QuadratureScheme::default();
        let o = FractionalOrder::from_complement(0.5).unwrap();
        let v = riemann_liouville(&TestFunction::constant(1.0), o, 0.0, 0.25, s).unwrap();
        assert!((v - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-13);
        let o = FractionalOrder::new(0.5).unwrap();
        let v = riemann_liouville(&TestFunction::affine(1.0, 1.0), o, 0.0, 1.0, s).unwrap();
        assert!((v - 1.692_568_750_643_268_9).abs() < 1e-13);
        let f = power(1.0);
        assert_eq!(
            riemann_liouville(&f, o, 0.0, 0.7, s).unwrap(),
            caputo(&f, o, 0.0, 0.7, s).unwrap()
        );
    }

    #[test]
    fn generic_kernel_examples() {
        let s = QuadratureScheme::default();
        let v =
            generic_kernel_derivative(&power(1.0), &KernelSpec::Caputo, 0.7, 0.0, 1.0, s).unwrap();
        assert!((v - 1.100_547_405_523_665_7).abs() < 1e-12);
        let step = TestFunction::step(&[(0.0, 0.5)], &[1.0]).unwrap();
        let v = generic_kernel_derivative(&step, &KernelSpec::CaputoFabrizio, 0.5, 0.0, 0.25, s)
            .unwrap();
        assert!((v - 0.442_398_433_857_190_26).abs() < 1e-14);
        for h in [KernelSpec::Caputo, KernelSpec::CaputoFabrizio] {
            let v = generic_kernel_derivative(&TestFunction::constant(3.0), &h, 0.3, 0.0, 1.0, s)
                .unwrap();
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn custom_kernels_reproduce_the_named_ones() {
        let s = QuadratureScheme::default();
        let caputo_like = KernelSpec::Custom(CustomKernel::new(
            |t, b| t.powf(b - 1.0) * recip_gamma(b),
            true,
        ));
        let cf_like = KernelSpec::Custom(CustomKernel::new(
            |t, b| (-(1.0 - b) / b * t).exp() / b,
            false,
        ));
        let g = TestFunction::abs_shift(0.4);
        for (custom, named) in [
            (&caputo_like, KernelSpec::Caputo),
            (&cf_like, KernelSpec::CaputoFabrizio),
        ] {
            for beta in [0.3, 0.6] {
                let want = generic_kernel_derivative(&g, &named, beta, 0.0, 1.0, s).unwrap();
                let got = generic_kernel_derivative(&g, custom, beta, 0.0, 1.0, s).unwrap();
                assert!((got - want).abs() < 1e-8, "β={beta}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn custom_kernel_failures() {
        let s = QuadratureScheme::default();
        let bad = KernelSpec::Custom(CustomKernel::new(|_, _| f64::NAN, false));
        let err = generic_kernel_derivative(&TestFunction::Exponential, &bad, 0.5, 0.0, 1.0, s);
        assert!(matches!(err, Err(Error::NonFiniteKernel { .. })));
        let ok = CustomKernel::new(|t, b| (-t / b).exp(), false);
        assert!((ok.smoke_test(0.5, 50.0).unwrap() - 0.5).abs() < 1e-8);
        let blowup = CustomKernel::new(|t, _| 1.0 / t, true);
        assert!(blowup.smoke_test(0.5, 1.0).is_err());
    }

    #[test]
    fn kernel_spec_values() {
        let b = 0.25;
        assert!((KernelSpec::CaputoFabrizio.eval(1.0, b) - 4.0 * (-3f64).exp()).abs() < 1e-15);
        let want = 2f64.powf(b - 1.0) * recip_gamma(b);
        assert!((KernelSpec::Caputo.eval(2.0, b) - want).abs() < 1e-15);
    }

    #[test]
    fn operator_kind_round_trip() {
        for k in OperatorKind::ALL {
            assert_eq!(k.label().parse::<OperatorKind>().unwrap(), k);
        }
        assert!("X".parse::<OperatorKind>().is_err());
    }
}
