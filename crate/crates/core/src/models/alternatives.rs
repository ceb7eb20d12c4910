//! Alternative count laws used in power studies.
//!
//! Every law is addressed by a stable lowercase id plus a comma-separated
//! parameter list, e.g. `poisson:1`, `binomial:4,0.25`, `zip:1,0.2`.
//! For zero-inflated laws the last parameter is the inflation weight `π`.

use std::fmt;
use std::str::FromStr;

use super::sampler::InversionSampler;
use super::CountLaw;
use crate::error::{Error, Result};
use crate::specfun::{ln_factorial, log_add_exp};

/// One of the eleven alternative laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AltDistribution {
    Poisson { lambda: f64 },
    /// Equal-weight mixture of two Poissons.
    MixedPoisson { lambda1: f64, lambda2: f64 },
    Binomial { trials: u64, p: f64 },
    /// `p` is the success probability: `pmf(n) = C(n+k−1, n) pᵏ (1−p)ⁿ`.
    NegativeBinomial { k: f64, p: f64 },
    /// `Y₁ + k·Y₂` with `Y₁ ~ Poisson(a)`, `Y₂ ~ Poisson(b)`.
    GeneralizedHermite { a: f64, b: f64, k: u64 },
    /// Uniform on `{0, …, ν}`.
    DiscreteUniform { nu: u64 },
    /// Logarithmic series on `{1, 2, …}`.
    LogSeries { theta: f64 },
    /// Consul's generalized Poisson.
    GeneralizedPoisson { lambda1: f64, lambda2: f64 },
    ZeroInflatedBinomial { trials: u64, p: f64, pi: f64 },
    ZeroInflatedNegBinomial { k: f64, p: f64, pi: f64 },
    ZeroInflatedPoisson { lambda: f64, pi: f64 },
}

fn ln_poisson(n: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    n as f64 * lambda.ln() - lambda - ln_factorial(n)
}

/// `x·ln(y)` with the `0·ln 0 = 0` convention.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

fn ln_binomial(n: u64, trials: u64, p: f64) -> f64 {
    if n > trials {
        return f64::NEG_INFINITY;
    }
    let ln_c = ln_factorial(trials) - ln_factorial(n) - ln_factorial(trials - n);
    ln_c + xlny(n as f64, p) + xlny((trials - n) as f64, 1.0 - p)
}

fn ln_negbin(n: u64, k: f64, p: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let nf = n as f64;
    ln_gamma(nf + k) - ln_gamma(k) - ln_factorial(n) + k * p.ln() + xlny(nf, 1.0 - p)
}

fn zero_inflate(ln_base: f64, n: u64, pi: f64) -> f64 {
    let keep = (1.0 - pi).ln() + ln_base;
    if n == 0 {
        log_add_exp(pi.ln(), keep)
    } else {
        keep
    }
}

impl AltDistribution {
    pub fn id(&self) -> &'static str {
        match self {
            AltDistribution::Poisson { .. } => "poisson",
            AltDistribution::MixedPoisson { .. } => "mixpoisson",
            AltDistribution::Binomial { .. } => "binomial",
            AltDistribution::NegativeBinomial { .. } => "negbinomial",
            AltDistribution::GeneralizedHermite { .. } => "genhermite",
            AltDistribution::DiscreteUniform { .. } => "dunif",
            AltDistribution::LogSeries { .. } => "logseries",
            AltDistribution::GeneralizedPoisson { .. } => "genpoisson",
            AltDistribution::ZeroInflatedBinomial { .. } => "zib",
            AltDistribution::ZeroInflatedNegBinomial { .. } => "zinb",
            AltDistribution::ZeroInflatedPoisson { .. } => "zip",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            AltDistribution::Poisson { lambda } => vec![lambda],
            AltDistribution::MixedPoisson { lambda1, lambda2 } => vec![lambda1, lambda2],
            AltDistribution::Binomial { trials, p } => vec![trials as f64, p],
            AltDistribution::NegativeBinomial { k, p } => vec![k, p],
            AltDistribution::GeneralizedHermite { a, b, k } => vec![a, b, k as f64],
            AltDistribution::DiscreteUniform { nu } => vec![nu as f64],
            AltDistribution::LogSeries { theta } => vec![theta],
            AltDistribution::GeneralizedPoisson { lambda1, lambda2 } => vec![lambda1, lambda2],
            AltDistribution::ZeroInflatedBinomial { trials, p, pi } => vec![trials as f64, p, pi],
            AltDistribution::ZeroInflatedNegBinomial { k, p, pi } => vec![k, p, pi],
            AltDistribution::ZeroInflatedPoisson { lambda, pi } => vec![lambda, pi],
        }
    }

    /// Builds a law from its id and parameter list, validating the domain.
    pub fn from_parts(id: &str, params: &[f64]) -> Result<Self> {
        let arity = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "`{id}` takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let count = |x: f64, what: &str| -> Result<u64> {
            if x >= 0.0 && x.fract() == 0.0 && x.is_finite() {
                Ok(x as u64)
            } else {
                Err(Error::InvalidSpec(format!("`{id}`: {what} must be a nonnegative integer, got {x}")))
            }
        };
        let dist = match id {
            "poisson" => {
                arity(1)?;
                AltDistribution::Poisson { lambda: params[0] }
            }
            "mixpoisson" => {
                arity(2)?;
                AltDistribution::MixedPoisson { lambda1: params[0], lambda2: params[1] }
            }
            "binomial" => {
                arity(2)?;
                AltDistribution::Binomial { trials: count(params[0], "trials")?, p: params[1] }
            }
            "negbinomial" => {
                arity(2)?;
                AltDistribution::NegativeBinomial { k: params[0], p: params[1] }
            }
            "genhermite" => {
                arity(3)?;
                AltDistribution::GeneralizedHermite {
                    a: params[0],
                    b: params[1],
                    k: count(params[2], "k")?,
                }
            }
            "dunif" => {
                arity(1)?;
                AltDistribution::DiscreteUniform { nu: count(params[0], "nu")? }
            }
            "logseries" => {
                arity(1)?;
                AltDistribution::LogSeries { theta: params[0] }
            }
            "genpoisson" => {
                arity(2)?;
                AltDistribution::GeneralizedPoisson { lambda1: params[0], lambda2: params[1] }
            }
            "zib" => {
                arity(3)?;
                AltDistribution::ZeroInflatedBinomial {
                    trials: count(params[0], "trials")?,
                    p: params[1],
                    pi: params[2],
                }
            }
            "zinb" => {
                arity(3)?;
                AltDistribution::ZeroInflatedNegBinomial { k: params[0], p: params[1], pi: params[2] }
            }
            "zip" => {
                arity(2)?;
                AltDistribution::ZeroInflatedPoisson { lambda: params[0], pi: params[1] }
            }
            other => return Err(Error::UnknownId(other.to_string())),
        };
        dist.validate()?;
        Ok(dist)
    }

    fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        let ok = match *self {
            AltDistribution::Poisson { lambda } => lambda >= 0.0 && lambda.is_finite(),
            AltDistribution::MixedPoisson { lambda1, lambda2 } => {
                lambda1 >= 0.0 && lambda2 >= 0.0 && lambda1.is_finite() && lambda2.is_finite()
            }
            AltDistribution::Binomial { p, .. } => prob(p),
            AltDistribution::NegativeBinomial { k, p } => k > 0.0 && p > 0.0 && p <= 1.0,
            AltDistribution::GeneralizedHermite { a, b, k } => a >= 0.0 && b >= 0.0 && k >= 1,
            AltDistribution::DiscreteUniform { .. } => true,
            AltDistribution::LogSeries { theta } => theta > 0.0 && theta < 1.0,
            AltDistribution::GeneralizedPoisson { lambda1, lambda2 } => {
                lambda1 > 0.0 && (0.0..1.0).contains(&lambda2)
            }
            AltDistribution::ZeroInflatedBinomial { p, pi, .. } => prob(p) && prob(pi) && pi < 1.0,
            AltDistribution::ZeroInflatedNegBinomial { k, p, pi } => {
                k > 0.0 && p > 0.0 && p <= 1.0 && prob(pi) && pi < 1.0
            }
            AltDistribution::ZeroInflatedPoisson { lambda, pi } => {
                lambda >= 0.0 && lambda.is_finite() && prob(pi) && pi < 1.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("parameters out of domain for {self}")))
        }
    }

    pub fn ln_pmf(&self, n: u64) -> f64 {
        match *self {
            AltDistribution::Poisson { lambda } => ln_poisson(n, lambda),
            AltDistribution::MixedPoisson { lambda1, lambda2 } => {
                log_add_exp(ln_poisson(n, lambda1), ln_poisson(n, lambda2)) - std::f64::consts::LN_2
            }
            AltDistribution::Binomial { trials, p } => ln_binomial(n, trials, p),
            AltDistribution::NegativeBinomial { k, p } => ln_negbin(n, k, p),
            AltDistribution::GeneralizedHermite { a, b, k } => {
                let mut acc = f64::NEG_INFINITY;
                let mut j = 0u64;
                while j * k <= n {
                    acc = log_add_exp(acc, ln_poisson(n - j * k, a) + ln_poisson(j, b));
                    j += 1;
                }
                acc
            }
            AltDistribution::DiscreteUniform { nu } => {
                if n <= nu {
                    -((nu + 1) as f64).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            AltDistribution::LogSeries { theta } => {
                if n == 0 {
                    f64::NEG_INFINITY
                } else {
                    let nf = n as f64;
                    nf * theta.ln() - nf.ln() - (-(-theta).ln_1p()).ln()
                }
            }
            AltDistribution::GeneralizedPoisson { lambda1, lambda2 } => {
                let nf = n as f64;
                let rate = lambda1 + nf * lambda2;
                lambda1.ln() + (nf - 1.0) * rate.ln() - rate - ln_factorial(n)
            }
            AltDistribution::ZeroInflatedBinomial { trials, p, pi } => {
                zero_inflate(ln_binomial(n, trials, p), n, pi)
            }
            AltDistribution::ZeroInflatedNegBinomial { k, p, pi } => {
                zero_inflate(ln_negbin(n, k, p), n, pi)
            }
            AltDistribution::ZeroInflatedPoisson { lambda, pi } => {
                zero_inflate(ln_poisson(n, lambda), n, pi)
            }
        }
    }

    /// Second raw moment `E[X²]`.
    pub fn second_moment(&self) -> f64 {
        let m = self.mean();
        self.variance() + m * m
    }

    fn base_moments(&self) -> (f64, f64) {
        match *self {
            AltDistribution::Poisson { lambda } => (lambda, lambda),
            AltDistribution::MixedPoisson { lambda1, lambda2 } => {
                let m = 0.5 * (lambda1 + lambda2);
                let ex2 = 0.5 * (lambda1 + lambda1 * lambda1) + 0.5 * (lambda2 + lambda2 * lambda2);
                (m, ex2 - m * m)
            }
            AltDistribution::Binomial { trials, p } => {
                let t = trials as f64;
                (t * p, t * p * (1.0 - p))
            }
            AltDistribution::NegativeBinomial { k, p } => (k * (1.0 - p) / p, k * (1.0 - p) / (p * p)),
            AltDistribution::GeneralizedHermite { a, b, k } => {
                let kf = k as f64;
                (a + kf * b, a + kf * kf * b)
            }
            AltDistribution::DiscreteUniform { nu } => {
                let v = nu as f64;
                (v / 2.0, v * (v + 2.0) / 12.0)
            }
            AltDistribution::LogSeries { theta } => {
                let l = (-theta).ln_1p();
                let m = -theta / ((1.0 - theta) * l);
                let var = -theta * (theta + l) / ((1.0 - theta) * (1.0 - theta) * l * l);
                (m, var)
            }
            AltDistribution::GeneralizedPoisson { lambda1, lambda2 } => {
                let q = 1.0 - lambda2;
                (lambda1 / q, lambda1 / (q * q * q))
            }
            AltDistribution::ZeroInflatedBinomial { trials, p, pi } => {
                let b = AltDistribution::Binomial { trials, p }.base_moments();
                inflate_moments(b, pi)
            }
            AltDistribution::ZeroInflatedNegBinomial { k, p, pi } => {
                let b = AltDistribution::NegativeBinomial { k, p }.base_moments();
                inflate_moments(b, pi)
            }
            AltDistribution::ZeroInflatedPoisson { lambda, pi } => inflate_moments((lambda, lambda), pi),
        }
    }

    /// The alternatives used in the n = 30 / n = 50 power tables, in row order.
    pub fn power_table() -> Vec<AltDistribution> {
        [
            "poisson:0.5",
            "poisson:1",
            "poisson:2",
            "mixpoisson:1,2",
            "mixpoisson:1,3",
            "mixpoisson:1,4",
            "binomial:4,0.25",
            "binomial:30,0.1",
            "negbinomial:4,0.75",
            "negbinomial:10,0.9",
            "genhermite:1,1.25,2",
            "genhermite:1,1.5,2",
            "dunif:3",
            "logseries:0.6",
            "logseries:0.8",
            "genpoisson:1,0.1",
            "genpoisson:3,0.25",
            "zib:5,0.9,0.2",
            "zinb:5,0.9,0.1",
            "zip:1,0.2",
        ]
        .iter()
        .map(|s| s.parse().expect("static table entry"))
        .collect()
    }
}

fn inflate_moments((m, v): (f64, f64), pi: f64) -> (f64, f64) {
    let ex2 = (1.0 - pi) * (v + m * m);
    let mean = (1.0 - pi) * m;
    (mean, ex2 - mean * mean)
}

impl CountLaw for AltDistribution {
    fn pmf(&self, k: u64) -> f64 {
        self.ln_pmf(k).exp()
    }

    fn mean(&self) -> f64 {
        self.base_moments().0
    }

    fn variance(&self) -> f64 {
        self.base_moments().1
    }

    fn sampler(&self) -> InversionSampler {
        let law = *self;
        InversionSampler::from_pmf(move |k| law.pmf(k), self.mean())
    }
}

impl fmt::Display for AltDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params().iter().map(|p| format!("{p}")).collect();
        write!(f, "{}:{}", self.id(), params.join(","))
    }
}

impl FromStr for AltDistribution {
    type Err = Error;

    /// Parses `id:p1,p2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (id, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidSpec(format!("expected `id:params`, got `{s}`")))?;
        let params = rest
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidSpec(format!("bad parameter `{t}` in `{s}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        AltDistribution::from_parts(id.trim(), &params)
    }
}

/// Catalog lookup by id and parameters.
pub fn alt_catalog(id: &str, params: &[f64]) -> Result<AltDistribution> {
    AltDistribution::from_parts(id, params)
}
