//! The probability-of-zero goodness-of-fit test.
//!
//! For a sample `X₁..Xₙ` the raw statistic is
//! `T̂₀ = √n (ψ₀(μ̂ₙ) − P̂ₙ(0))`, where `ψ₀` maps the fitted moments to the
//! null probability of zero. Studentizing by a plug-in standard error gives
//! `Zₙ = T̂₀ / σ̂ₙ`, rejected two-sided against `z_{1−α/2}`.
//!
//! One-parameter families use the delta-method variance
//! `σ² = ψ₀′(μ)² v(μ) + 2μ ψ₀(μ) ψ₀′(μ) + ψ₀(μ)(1 − ψ₀(μ))`, i.e.
//! `Var[ψ₀′(μ) X − I{X=0}]`. Two-parameter families estimate the variance of
//! `∂ψ₀/∂μ·X + ∂ψ₀/∂μ₂·X²` empirically and add the analytic cross and
//! Bernoulli terms.

use std::collections::BTreeMap;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::models::{NullFamily, OneParamFamily, TwoParamFamily};

/// Plug-in variances at or below this are treated as degenerate.
pub const DEGENERATE_SIGMA2: f64 = 1e-14;

/// The sufficient inputs of every statistic: size, first two sample moments
/// and the proportion of zeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub n: usize,
    pub mu_hat: f64,
    pub mu2_hat: f64,
    pub p0_hat: f64,
    pub zeros: usize,
}

/// Exact moments of a sample; sums are accumulated in integers.
pub fn summarize(xs: &[u64]) -> Result<SampleSummary> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    let (mut s1, mut s2, mut zeros) = (0u128, 0u128, 0usize);
    for &x in xs {
        let x = x as u128;
        s1 += x;
        s2 += x * x;
        if x == 0 {
            zeros += 1;
        }
    }
    let n = xs.len();
    let nf = n as f64;
    Ok(SampleSummary {
        n,
        mu_hat: s1 as f64 / nf,
        mu2_hat: s2 as f64 / nf,
        p0_hat: zeros as f64 / nf,
        zeros,
    })
}

/// Outcome of a single test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    /// `Zₙ` for the p.g.f. test, `Qₙ` for the chi-squared comparator.
    pub statistic: f64,
    /// `T̂₀` (equal to the statistic for `Qₙ`).
    pub raw_numerator: f64,
    pub sigma_hat: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub diagnostics: Vec<String>,
}

impl TestReport {
    fn from_z(t0: f64, sigma2: f64, alpha: f64) -> Self {
        let sigma = sigma2.sqrt();
        let z = t0 / sigma;
        let p_value = normal_two_sided_p(z);
        TestReport {
            statistic: z,
            raw_numerator: t0,
            sigma_hat: sigma,
            p_value,
            reject: p_value < alpha,
            alpha,
            diagnostics: Vec::new(),
        }
    }
}

/// `2(1 − Φ(|z|))`, computed as `erfc(|z|/√2)` so tiny p-values keep precision.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn check_not_all_zero(s: &SampleSummary) -> Result<()> {
    if s.mu_hat == 0.0 {
        Err(Error::Degenerate(format!(
            "all {} observations are zero; the fitted law is a point mass",
            s.n
        )))
    } else {
        Ok(())
    }
}

/// `√n (ψ₀(μ̂ₙ) − P̂ₙ(0))` for a one-parameter family.
pub fn t0_one_param(fam: OneParamFamily, s: &SampleSummary) -> Result<f64> {
    let psi = fam.psi0(s.mu_hat)?;
    Ok((s.n as f64).sqrt() * (psi - s.p0_hat))
}

/// Plug-in `σ²(μ)` assembled from `ψ₀`, `ψ₀′` and the family variance.
pub fn sigma2_one_param(fam: OneParamFamily, mu: f64) -> Result<f64> {
    let psi = fam.psi0(mu)?;
    let dpsi = fam.psi0_prime(mu)?;
    let v = fam.variance(mu)?;
    Ok(dpsi * dpsi * v + 2.0 * mu * psi * dpsi + psi * (1.0 - psi))
}

pub fn z_test_one_param(fam: OneParamFamily, xs: &[u64], alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let s = summarize(xs)?;
    check_not_all_zero(&s)?;
    let t0 = t0_one_param(fam, &s)?;
    let sigma2 = sigma2_one_param(fam, s.mu_hat)?;
    if !(sigma2 > DEGENERATE_SIGMA2) {
        return Err(Error::Degenerate(format!(
            "plug-in variance {sigma2:e} at mu_hat = {}",
            s.mu_hat
        )));
    }
    let mut report = TestReport::from_z(t0, sigma2, alpha);
    if s.zeros == 0 {
        report.diagnostics.push("no zeros observed".to_string());
    }
    Ok(report)
}

/// `√n (ψ₀(μ̂ₙ, μ̂₂,ₙ) − P̂ₙ(0))` for a two-parameter family.
pub fn t0_two_param(fam: TwoParamFamily, s: &SampleSummary) -> Result<f64> {
    let psi = fam.psi0(s.mu_hat, s.mu2_hat)?;
    Ok((s.n as f64).sqrt() * (psi - s.p0_hat))
}

/// Sample variance (divisor `n − 1`) of `Wₗ = a·Xₗ + b·Xₗ²`.
///
/// Summation runs over the distinct values in increasing order so the result
/// does not depend on the order of `xs`.
pub fn vhat_with_partials(xs: &[u64], a: f64, b: f64) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::SampleTooSmall { n: xs.len(), min: 2 });
    }
    let mut hist: BTreeMap<u64, usize> = BTreeMap::new();
    for &x in xs {
        *hist.entry(x).or_default() += 1;
    }
    let n = xs.len() as f64;
    let w = |x: u64| {
        let xf = x as f64;
        a * xf + b * xf * xf
    };
    let mean = hist.iter().map(|(&x, &c)| c as f64 * w(x)).sum::<f64>() / n;
    let ss: f64 = hist
        .iter()
        .map(|(&x, &c)| {
            let d = w(x) - mean;
            c as f64 * d * d
        })
        .sum();
    Ok(ss / (n - 1.0))
}

/// `v̂ₙ` with the partials of `ψ₀` evaluated at the sample moments.
pub fn vhat_two_param(fam: TwoParamFamily, xs: &[u64], s: &SampleSummary) -> Result<f64> {
    let a = fam.dpsi0_dmu(s.mu_hat, s.mu2_hat)?;
    let b = fam.dpsi0_dmu2(s.mu_hat, s.mu2_hat)?;
    vhat_with_partials(xs, a, b)
}

/// `ŝₙ = 2(∂ψ₀/∂μ·μ + ∂ψ₀/∂μ₂·μ₂)ψ₀` at `(μ, μ₂)`.
pub fn s_hat_two_param(fam: TwoParamFamily, mu: f64, mu2: f64) -> Result<f64> {
    let psi = fam.psi0(mu, mu2)?;
    let a = fam.dpsi0_dmu(mu, mu2)?;
    let b = fam.dpsi0_dmu2(mu, mu2)?;
    Ok(2.0 * (a * mu + b * mu2) * psi)
}

/// `σ̂ₙ² = v̂ₙ + ŝₙ + ψ₀(1 − ψ₀)`.
pub fn sigma2_two_param(fam: TwoParamFamily, xs: &[u64], s: &SampleSummary) -> Result<f64> {
    let psi = fam.psi0(s.mu_hat, s.mu2_hat)?;
    let v = vhat_two_param(fam, xs, s)?;
    let sh = s_hat_two_param(fam, s.mu_hat, s.mu2_hat)?;
    Ok(v + sh + psi * (1.0 - psi))
}

pub fn z_test_two_param(fam: TwoParamFamily, xs: &[u64], alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let s = summarize(xs)?;
    check_not_all_zero(&s)?;
    let t0 = t0_two_param(fam, &s)?;
    let sigma2 = sigma2_two_param(fam, xs, &s)?;
    if !(sigma2 > DEGENERATE_SIGMA2) {
        return Err(Error::Degenerate(format!(
            "plug-in variance {sigma2:e} at (mu_hat, mu2_hat) = ({}, {})",
            s.mu_hat, s.mu2_hat
        )));
    }
    Ok(TestReport::from_z(t0, sigma2, alpha))
}

/// Runs the test against any null family.
pub fn z_test(fam: NullFamily, xs: &[u64], alpha: f64) -> Result<TestReport> {
    match fam {
        NullFamily::One(f) => z_test_one_param(f, xs, alpha),
        NullFamily::Two(f) => z_test_two_param(f, xs, alpha),
    }
}

/// `|ψ₀(μ) − p₀| / ψ₀(μ)`, the L¹ distance on `[0,1]` between the
/// normalized-variation derivative of `f/g_μ` and zero, when it has constant
/// sign.
pub fn l1_discrepancy(fam: OneParamFamily, mu: f64, p0_true: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p0_true) {
        return Err(Error::Domain(format!("p0_true must lie in [0, 1], got {p0_true}")));
    }
    let psi = fam.psi0(mu)?;
    if psi <= 0.0 {
        return Err(Error::Domain(format!("psi0({mu}) = 0")));
    }
    Ok((psi - p0_true).abs() / psi)
}
