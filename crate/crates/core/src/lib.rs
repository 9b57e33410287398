//! Numerical laboratory for fractional derivatives of order close to one.
//!
//! The crate evaluates Riemann-Liouville, Caputo and Caputo-Fabrizio
//! operators by closed form or product quadrature, measures how far
//! `D^{1-β} f` is from `f'` in L¹ and L∞, and fits empirical convergence
//! orders as `β → 0⁺`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analysis;
pub mod error;
pub mod funcat;
pub mod norms;
pub mod operators;
pub mod quad;
pub mod specfun;

pub use analysis::{OrderFit, RatioResult, Table1Row};
pub use error::{Error, Result};
pub use funcat::{Interval, TestFunction};
pub use norms::{ErrorReport, NormKind, NormOptions};
pub use operators::{FractionalOrder, KernelSpec, OperatorKind, QuadratureKind, QuadratureScheme};
