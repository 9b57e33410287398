//! Special functions: Gamma, log-Gamma, Digamma and the Mittag-Leffler function.

mod ddouble;
mod gamma;
mod mittag_leffler;

pub use gamma::{digamma, gamma, ln_gamma, recip_gamma, EULER_GAMMA};
pub use mittag_leffler::{
    mittag_leffler_one, mittag_leffler_one_closed, mittag_leffler_one_series, MLParams,
    ASYMPTOTIC_THRESHOLD, MAX_SERIES_TERMS, SERIES_REL_CUTOFF,
};
