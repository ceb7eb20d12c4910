//! Chi-squared comparator `Qₙ` with a fixed class construction.
//!
//! With `μ` the fitted mean, the classes are the left tail
//! `{n < ⌊μ − 3√μ⌋}` (dropped when empty), the singletons from
//! `max(⌊μ − 3√μ⌋, 0)` to `⌈μ + 3√μ⌉`, and the right tail
//! `{n > ⌈μ + 3√μ⌉}`. No further merging of sparse classes is done.

use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};
use crate::gof::{check_alpha, summarize, TestReport};
use crate::models::{CountLaw, NullFamily, NullLaw};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountClass {
    /// `{n : n < bound}`.
    Below(u64),
    Singleton(u64),
    /// `{n : n > bound}`.
    Above(u64),
}

impl CountClass {
    pub fn contains(&self, x: u64) -> bool {
        match *self {
            CountClass::Below(b) => x < b,
            CountClass::Singleton(v) => x == v,
            CountClass::Above(b) => x > b,
        }
    }
}

/// Ordered classes covering ℕ, with their probabilities under the fitted null.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPartition {
    classes: Vec<CountClass>,
    probs: Vec<f64>,
    first_singleton: u64,
    upper: u64,
    has_left_tail: bool,
}

/// The class layout for fitted mean `mu`; probabilities are left at zero.
pub fn class_layout(mu: f64) -> ClassPartition {
    let spread = 3.0 * mu.max(0.0).sqrt();
    let lower = (mu - spread).floor();
    let upper = (mu + spread).ceil().max(0.0) as u64;
    let has_left_tail = lower >= 1.0;
    let first_singleton = if lower > 0.0 { lower as u64 } else { 0 };
    let mut classes = Vec::with_capacity((upper - first_singleton) as usize + 3);
    if has_left_tail {
        classes.push(CountClass::Below(first_singleton));
    }
    classes.extend((first_singleton..=upper).map(CountClass::Singleton));
    classes.push(CountClass::Above(upper));
    let probs = vec![0.0; classes.len()];
    ClassPartition { classes, probs, first_singleton, upper, has_left_tail }
}

/// Class layout at the law's mean, with probabilities from its p.m.f.; the
/// right tail takes the exact complement.
pub fn build_classes<L: CountLaw + ?Sized>(law: &L) -> ClassPartition {
    let mut part = class_layout(law.mean());
    let mut covered = 0.0;
    let last = part.classes.len() - 1;
    for (i, class) in part.classes[..last].iter().enumerate() {
        let p = match *class {
            CountClass::Below(b) => (0..b).map(|k| law.pmf(k)).sum(),
            CountClass::Singleton(v) => law.pmf(v),
            CountClass::Above(_) => unreachable!("right tail is always last"),
        };
        part.probs[i] = p;
        covered += p;
    }
    part.probs[last] = (1.0 - covered).max(0.0);
    part
}

impl ClassPartition {
    pub fn classes(&self) -> &[CountClass] {
        &self.classes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_index(&self, x: u64) -> usize {
        let offset = usize::from(self.has_left_tail);
        if x < self.first_singleton {
            0
        } else if x <= self.upper {
            offset + (x - self.first_singleton) as usize
        } else {
            self.classes.len() - 1
        }
    }

    pub fn observed_counts(&self, xs: &[u64]) -> Vec<u64> {
        let mut counts = vec![0u64; self.classes.len()];
        for &x in xs {
            counts[self.class_index(x)] += 1;
        }
        counts
    }
}

/// Pearson's `Σ (O − n p)² / (n p)`; an observed count in a zero-probability
/// class makes the statistic infinite.
pub fn pearson_statistic(observed: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = observed.iter().sum();
    let nf = n as f64;
    observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = nf * p;
            if e > 0.0 {
                let d = o as f64 - e;
                d * d / e
            } else if o == 0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .sum()
}

/// Upper tail `P(χ²_df > q)`.
pub fn chi2_sf(q: f64, df: u64) -> f64 {
    if q <= 0.0 {
        return 1.0;
    }
    if q.is_infinite() {
        return 0.0;
    }
    gamma_ur(df as f64 / 2.0, q / 2.0)
}

/// Fits the null by moments and runs the chi-squared test with
/// `df = #classes − 1 − #estimated parameters`.
pub fn q_test(fam: NullFamily, xs: &[u64], alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let s = summarize(xs)?;
    if s.mu_hat == 0.0 {
        return Err(Error::Degenerate(format!("all {} observations are zero", s.n)));
    }
    let law = match fam {
        NullFamily::One(f) => NullLaw::one(f, s.mu_hat)?,
        NullFamily::Two(f) => NullLaw::two(f, s.mu_hat, s.mu2_hat)?,
    };
    let part = build_classes(&law);
    let df = part.len() as i64 - 1 - fam.n_params() as i64;
    if df <= 0 {
        return Err(Error::NonPositiveDf { df });
    }
    let observed = part.observed_counts(xs);
    let q = pearson_statistic(&observed, part.probabilities());
    let p_value = chi2_sf(q, df as u64);
    Ok(TestReport {
        statistic: q,
        raw_numerator: q,
        sigma_hat: f64::NAN,
        p_value,
        reject: p_value < alpha,
        alpha,
        diagnostics: vec![format!("classes = {}, df = {df}", part.len())],
    })
}
