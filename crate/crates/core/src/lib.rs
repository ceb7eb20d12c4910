#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Omnibus goodness-of-fit testing for count distributions.
//!
//! The test compares the fitted null probability of zero, `ψ₀(μ̂)`, with the
//! observed proportion of zeros. Its studentized form is asymptotically
//! standard normal under the null and diverges under any fixed alternative.
//!
//! Modules:
//! - [`specfun`]: Lambert W, Bell numbers, Stirling rows, Touchard polynomials.
//! - [`models`]: the four null families and the alternative-law catalog.
//! - [`gof`]: the statistic, its plug-in variance and the decision rule.
//! - [`chisq`]: the chi-squared comparator with its fixed binning rule.
//! - [`contiguous`]: shrinking-mixture and thinning alternatives.
//! - [`harness`]: reproducible Monte Carlo level and power studies.
//! - [`cli`]: the command-line front end.

pub mod chisq;
pub mod cli;
pub mod contiguous;
mod error;
pub mod gof;
pub mod harness;
pub mod models;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};

/// Formats a number with six significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=14).contains(&exp) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
