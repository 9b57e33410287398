//! Catalog of test functions: exact values, exact derivatives and the
//! closed-form fractional derivatives that exist for them.
//!
//! Catalog entries are nameable by a short string id, e.g. `power:2`,
//! `power:0.5,1` (exponent, origin), `affine:1,1`, `exp`, `cos`, `abs:1`
//! and `step:0,1,2;2,3,-1` (pieces `start,end,height` separated by `;`).

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::operators::{FractionalOrder, OperatorKind};
use crate::specfun::{gamma, ln_gamma, mittag_leffler_one, recip_gamma};

/// Bounded interval `(a, b)` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(domain(format!(
                "interval requires finite a < b, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// Parses `a,b`.
    fn from_str(s: &str) -> Result<Self> {
        let nums = parse_numbers(s)?;
        match nums.as_slice() {
            [a, b] => Interval::new(*a, *b),
            _ => Err(domain(format!("interval must be `a,b`, got `{s}`"))),
        }
    }
}

/// `(t − origin)^exponent` with `exponent > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    exponent: f64,
    origin: f64,
}

impl PowerLaw {
    pub fn new(exponent: f64, origin: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) || !origin.is_finite() {
            return Err(domain(format!(
                "power exponent must be positive and origin finite, got ({exponent}, {origin})"
            )));
        }
        Ok(Self { exponent, origin })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    fn integer_exponent(&self) -> Option<i32> {
        (self.exponent.fract() == 0.0 && self.exponent <= 64.0).then_some(self.exponent as i32)
    }
}

/// One piece `height · χ_[start, end]` of a simple function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPiece {
    pub start: f64,
    pub end: f64,
    pub height: f64,
}

/// Ordered, non-overlapping pieces of a simple function; the test function is
/// its antiderivative `t ↦ Σ q_i |[a_i, b_i] ∩ (−∞, t]|`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepProfile {
    pieces: Vec<StepPiece>,
}

impl StepProfile {
    pub fn new(pieces: Vec<StepPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(domain("step profile needs at least one piece"));
        }
        for p in &pieces {
            if !(p.start.is_finite()
                && p.end.is_finite()
                && p.height.is_finite()
                && p.start < p.end)
            {
                return Err(domain(format!(
                    "step piece must satisfy start < end with finite values, got {p:?}"
                )));
            }
        }
        for w in pieces.windows(2) {
            if w[0].end > w[1].start {
                return Err(domain(format!(
                    "step pieces must be ordered and non-overlapping: {:?} then {:?}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { pieces })
    }

    /// Builds a profile from parallel lists of breaks `[a_i, b_i]` and heights `q_i`.
    pub fn from_lists(breaks: &[(f64, f64)], heights: &[f64]) -> Result<Self> {
        if breaks.len() != heights.len() {
            return Err(domain(format!(
                "step lists differ in length: {} intervals, {} heights",
                breaks.len(),
                heights.len()
            )));
        }
        let pieces = breaks
            .iter()
            .zip(heights)
            .map(|(&(start, end), &height)| StepPiece { start, end, height })
            .collect();
        Self::new(pieces)
    }

    pub fn pieces(&self) -> &[StepPiece] {
        &self.pieces
    }
}

/// Which one-sided limit to take at a point where `f'` jumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A catalog entry. All variants belong to W^{1,1} on bounded intervals.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Power(PowerLaw),
    Affine { slope: f64, intercept: f64 },
    Exponential,
    Cosine,
    AbsShift { center: f64 },
    StepAntiderivative(StepProfile),
}

impl TestFunction {
    pub fn power(exponent: f64, origin: f64) -> Result<Self> {
        Ok(Self::Power(PowerLaw::new(exponent, origin)?))
    }

    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::Affine { slope, intercept }
    }

    pub fn constant(c: f64) -> Self {
        Self::Affine {
            slope: 0.0,
            intercept: c,
        }
    }

    pub fn abs_shift(center: f64) -> Self {
        Self::AbsShift { center }
    }

    pub fn step(breaks: &[(f64, f64)], heights: &[f64]) -> Result<Self> {
        Ok(Self::StepAntiderivative(StepProfile::from_lists(
            breaks, heights,
        )?))
    }

    /// Exact value `f(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            Self::Power(p) => {
                let s = t - p.origin;
                if s >= 0.0 {
                    Ok(s.powf(p.exponent))
                } else if let Some(n) = p.integer_exponent() {
                    Ok(s.powi(n))
                } else {
                    Err(domain(format!(
                        "power with non-integer exponent {} is undefined at t = {t} < {}",
                        p.exponent, p.origin
                    )))
                }
            }
            Self::Affine { slope, intercept } => Ok(slope * t + intercept),
            Self::Exponential => Ok(t.exp()),
            Self::Cosine => Ok(t.cos()),
            Self::AbsShift { center } => Ok((t - center).abs()),
            Self::StepAntiderivative(profile) => Ok(profile
                .pieces
                .iter()
                .map(|p| p.height * (t - p.start).clamp(0.0, p.end - p.start))
                .sum()),
        }
    }

    /// Exact classical derivative; fails at points where it does not exist.
    pub fn eval_derivative(&self, t: f64) -> Result<f64> {
        if self.kinks().contains(&t) {
            return Err(Error::NonDifferentiable { t });
        }
        self.derivative_limit(t, Side::Right)
    }

    /// One-sided limit of `f'` at `t`. Equals [`Self::eval_derivative`] away from kinks.
    pub fn derivative_limit(&self, t: f64, side: Side) -> Result<f64> {
        match self {
            Self::Power(p) => {
                let s = t - p.origin;
                let g = p.exponent;
                if s > 0.0 {
                    return Ok(g * s.powf(g - 1.0));
                }
                if s == 0.0 && (side == Side::Right || p.integer_exponent().is_some()) {
                    return match g {
                        1.0 => Ok(1.0),
                        g if g > 1.0 => Ok(0.0),
                        _ => Err(domain(format!(
                            "derivative of t^{g} is unbounded at its origin"
                        ))),
                    };
                }
                match p.integer_exponent() {
                    Some(n) => Ok(g * s.powi(n - 1)),
                    None => Err(domain(format!(
                        "power with non-integer exponent {g} is undefined left of {}",
                        p.origin
                    ))),
                }
            }
            Self::Affine { slope, .. } => Ok(*slope),
            Self::Exponential => Ok(t.exp()),
            Self::Cosine => Ok(-t.sin()),
            Self::AbsShift { center } => Ok(match (t.partial_cmp(center), side) {
                (Some(std::cmp::Ordering::Greater), _)
                | (Some(std::cmp::Ordering::Equal), Side::Right) => 1.0,
                _ => -1.0,
            }),
            Self::StepAntiderivative(profile) => Ok(profile
                .pieces
                .iter()
                .filter(|p| match side {
                    Side::Right => p.start <= t && t < p.end,
                    Side::Left => p.start < t && t <= p.end,
                })
                .map(|p| p.height)
                .sum()),
        }
    }

    /// Points where `f'` is undefined (jumps), sorted ascending.
    pub fn kinks(&self) -> Vec<f64> {
        let mut pts = match self {
            Self::AbsShift { center } => vec![*center],
            Self::StepAntiderivative(profile) => profile
                .pieces
                .iter()
                .flat_map(|p| [p.start, p.end])
                .collect(),
            _ => Vec::new(),
        };
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Points where quadrature panels should be split: the kinks plus the
    /// origin of a non-integer power, where `f'` loses smoothness.
    pub fn split_points(&self) -> Vec<f64> {
        match self {
            Self::Power(p) if p.integer_exponent().is_none() => vec![p.origin],
            _ => self.kinks(),
        }
    }

    /// Closed-form fractional derivative `D^α f(t)` with lower terminal `a`,
    /// or `None` when the catalog has no closed form for this pair.
    pub fn closed_form_fractional(
        &self,
        kind: OperatorKind,
        order: FractionalOrder,
        a: f64,
        t: f64,
    ) -> Option<f64> {
        if !(t > a) {
            return None;
        }
        match kind {
            OperatorKind::Caputo => self.caputo_closed(order, a, t),
            OperatorKind::CaputoFabrizio => self.caputo_fabrizio_closed(order, a, t),
            OperatorKind::RiemannLiouville => {
                let fa = self.eval(a).ok()?;
                let c = self.caputo_closed(order, a, t)?;
                Some(rl_boundary_term(fa, order, t - a) + c)
            }
        }
    }

    fn caputo_closed(&self, order: FractionalOrder, a: f64, t: f64) -> Option<f64> {
        let ramp = |start: f64| caputo_ramp(order, t - start.max(a));
        match self {
            Self::Power(p) if p.origin == a => {
                let g = p.exponent;
                let al = order.alpha();
                let coeff = (ln_gamma(g + 1.0).ok()? - ln_gamma(g + 1.0 - al).ok()?).exp();
                Some(coeff * (t - a).powf(g - al))
            }
            Self::Power(_) | Self::Cosine => None,
            Self::Affine { slope, .. } => Some(slope * ramp(a)),
            Self::Exponential => {
                // e^a (t−a)^{1−α} E_{1,2−α}(t−a)
                let s = t - a;
                let e = mittag_leffler_one(1.0 + order.complement(), s).ok()?;
                Some(a.exp() * s.powf(order.complement()) * e)
            }
            Self::AbsShift { center } => {
                if *center <= a {
                    Some(ramp(a))
                } else {
                    Some(2.0 * ramp(*center) - ramp(a))
                }
            }
            Self::StepAntiderivative(profile) => Some(
                profile
                    .pieces
                    .iter()
                    .filter(|p| p.end > a)
                    .map(|p| p.height * (ramp(p.start) - ramp(p.end)))
                    .sum(),
            ),
        }
    }

    fn caputo_fabrizio_closed(&self, order: FractionalOrder, a: f64, t: f64) -> Option<f64> {
        let ramp = |start: f64| cf_ramp(order, t - start.max(a));
        match self {
            Self::Power(p) if p.origin == a => {
                // Γ(γ+1)/(1−α) (t−a)^γ E_{1,γ+1}(−λ(t−a)); algebraically equal to
                // (γ/α)(t−a)^{γ−1}[1 − Γ(γ) E_{1,γ}(−λ(t−a))] without the 0/0 at t → a.
                let g = p.exponent;
                let s = t - a;
                let e = mittag_leffler_one(g + 1.0, -order.cf_rate() * s).ok()?;
                Some(gamma(g + 1.0).ok()? / order.complement() * s.powf(g) * e)
            }
            Self::Power(_) | Self::Cosine => None,
            Self::Affine { slope, .. } => Some(slope * ramp(a)),
            Self::Exponential => {
                // e^t − e^a e^{−λ(t−a)}
                Some(t.exp() - (a - order.cf_rate() * (t - a)).exp())
            }
            Self::AbsShift { center } => {
                if *center <= a {
                    Some(ramp(a))
                } else {
                    Some(2.0 * ramp(*center) - ramp(a))
                }
            }
            Self::StepAntiderivative(profile) => Some(
                profile
                    .pieces
                    .iter()
                    .filter(|p| p.end > a)
                    .map(|p| p.height * (ramp(p.start) - ramp(p.end)))
                    .sum(),
            ),
        }
    }
}

/// `f(a) (t−a)^{−α} / Γ(1−α)`, the term separating Riemann-Liouville from Caputo.
pub(crate) fn rl_boundary_term(fa: f64, order: FractionalOrder, s: f64) -> f64 {
    if fa == 0.0 {
        return 0.0;
    }
    fa * s.powf(-order.alpha()) * recip_gamma(order.complement())
}

/// Caputo derivative of the unit ramp `(t − start)_+`: `s^{1−α} / Γ(2−α)`.
fn caputo_ramp(order: FractionalOrder, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    s.powf(order.complement()) * recip_gamma(1.0 + order.complement())
}

/// Caputo-Fabrizio derivative of the unit ramp: `(1 − e^{−λ s}) / α`.
fn cf_ramp(order: FractionalOrder, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    -(-order.cf_rate() * s).exp_m1() / order.alpha()
}

fn parse_numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| domain(format!("not a number: `{x}`")))
        })
        .collect()
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s.trim(), None),
        };
        match (name, args) {
            ("exp", None) => Ok(Self::Exponential),
            ("cos", None) => Ok(Self::Cosine),
            ("power", Some(args)) => match parse_numbers(args)?.as_slice() {
                [g] => Self::power(*g, 0.0),
                [g, o] => Self::power(*g, *o),
                _ => Err(domain(format!(
                    "power expects `power:γ[,origin]`, got `{s}`"
                ))),
            },
            ("affine", Some(args)) => match parse_numbers(args)?.as_slice() {
                [m, c] => Ok(Self::affine(*m, *c)),
                _ => Err(domain(format!(
                    "affine expects `affine:slope,intercept`, got `{s}`"
                ))),
            },
            ("abs", Some(args)) => match parse_numbers(args)?.as_slice() {
                [c] => Ok(Self::abs_shift(*c)),
                _ => Err(domain(format!("abs expects `abs:center`, got `{s}`"))),
            },
            ("step", Some(args)) => {
                let pieces = args
                    .split(';')
                    .map(|piece| match parse_numbers(piece)?.as_slice() {
                        [start, end, height] => Ok(StepPiece {
                            start: *start,
                            end: *end,
                            height: *height,
                        }),
                        _ => Err(domain(format!("step piece must be `a,b,q`, got `{piece}`"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::StepAntiderivative(StepProfile::new(pieces)?))
            }
            _ => Err(domain(format!("unknown test function id `{s}`"))),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power(p) if p.origin == 0.0 => write!(f, "power:{}", p.exponent),
            Self::Power(p) => write!(f, "power:{},{}", p.exponent, p.origin),
            Self::Affine { slope, intercept } => write!(f, "affine:{slope},{intercept}"),
            Self::Exponential => write!(f, "exp"),
            Self::Cosine => write!(f, "cos"),
            Self::AbsShift { center } => write!(f, "abs:{center}"),
            Self::StepAntiderivative(profile) => {
                write!(f, "step:")?;
                for (i, p) in profile.pieces.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{},{},{}", p.start, p.end, p.height)?;
                }
                Ok(())
            }
        }
    }
}
