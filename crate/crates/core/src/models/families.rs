//! Null families reparametrized by their moments.

use std::fmt;
use std::str::FromStr;

use super::sampler::InversionSampler;
use super::CountLaw;
use crate::error::{Error, Result};
use crate::specfun::{bell_number_log, lambert_w0, ln_factorial, touchard_log};

/// One-parameter null families, indexed by their mean `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OneParamFamily {
    /// Borel total-progeny law shifted to start at zero.
    ShiftedBorel,
    Geometric,
    /// One-parameter Bell law with `μ = θeᶿ`.
    Bell,
}

impl OneParamFamily {
    pub const ALL: [OneParamFamily; 3] = [
        OneParamFamily::ShiftedBorel,
        OneParamFamily::Geometric,
        OneParamFamily::Bell,
    ];

    pub fn id(self) -> &'static str {
        match self {
            OneParamFamily::ShiftedBorel => "shifted-borel",
            OneParamFamily::Geometric => "geometric",
            OneParamFamily::Bell => "bell1",
        }
    }

    pub fn check_mean(self, mu: f64) -> Result<()> {
        let ok = match self {
            OneParamFamily::ShiftedBorel | OneParamFamily::Geometric => mu >= 0.0,
            OneParamFamily::Bell => mu > 0.0,
        };
        if ok && mu.is_finite() {
            Ok(())
        } else {
            let bound = if self == OneParamFamily::Bell { "> 0" } else { ">= 0" };
            Err(Error::Domain(format!(
                "{} requires mean {bound}, got {mu}",
                self.id()
            )))
        }
    }

    /// Natural parameter from the mean: `λ` (Borel), `p` (Geometric) or `θ` (Bell).
    pub fn h_inverse(self, mu: f64) -> Result<f64> {
        self.check_mean(mu)?;
        Ok(match self {
            OneParamFamily::ShiftedBorel => mu / (1.0 + mu),
            OneParamFamily::Geometric => 1.0 / (mu + 1.0),
            OneParamFamily::Bell => lambert_w0(mu)?,
        })
    }

    /// Probability of zero as a function of the mean.
    pub fn psi0(self, mu: f64) -> Result<f64> {
        let t = self.h_inverse(mu)?;
        Ok(match self {
            OneParamFamily::ShiftedBorel => (-t).exp(),
            OneParamFamily::Geometric => t,
            OneParamFamily::Bell => (-t.exp_m1()).exp(),
        })
    }

    pub fn psi0_prime(self, mu: f64) -> Result<f64> {
        let psi = self.psi0(mu)?;
        Ok(match self {
            OneParamFamily::ShiftedBorel => -psi / ((1.0 + mu) * (1.0 + mu)),
            OneParamFamily::Geometric => -psi * psi,
            OneParamFamily::Bell => -psi / (1.0 + self.h_inverse(mu)?),
        })
    }

    /// Variance of the law with mean `μ`.
    pub fn variance(self, mu: f64) -> Result<f64> {
        self.check_mean(mu)?;
        Ok(match self {
            OneParamFamily::ShiftedBorel => mu * (1.0 + mu) * (1.0 + mu),
            OneParamFamily::Geometric => mu * (1.0 + mu),
            OneParamFamily::Bell => mu * (1.0 + lambert_w0(mu)?),
        })
    }

    pub fn ln_pmf(self, k: u64, mu: f64) -> Result<f64> {
        if k == 0 {
            return Ok(self.psi0(mu)?.ln());
        }
        let t = self.h_inverse(mu)?;
        let kf = k as f64;
        Ok(match self {
            OneParamFamily::ShiftedBorel => {
                if t == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    let m = kf + 1.0;
                    -t * m + kf * (t * m).ln() - ln_factorial(k + 1)
                }
            }
            OneParamFamily::Geometric => t.ln() + kf * (-t).ln_1p(),
            OneParamFamily::Bell => {
                kf * t.ln() + bell_number_log(k as usize).ln() - t.exp_m1() - ln_factorial(k)
            }
        })
    }

    /// P.m.f. at `k`; `pmf(0, μ)` is `psi0(μ)` through the same code path.
    pub fn pmf(self, k: u64, mu: f64) -> Result<f64> {
        if k == 0 {
            return self.psi0(mu);
        }
        Ok(self.ln_pmf(k, mu)?.exp())
    }

    /// The family-specific simplified form of `Var[ψ₀′(μ)X − I{X=0}]`.
    pub fn sigma2_closed_form(self, mu: f64) -> Result<f64> {
        self.check_mean(mu)?;
        Ok(match self {
            OneParamFamily::ShiftedBorel => {
                let l = mu / (1.0 + mu);
                (-2.0 * l).exp() * (l.exp() - 1.0 - mu / ((1.0 + mu) * (1.0 + mu)))
            }
            OneParamFamily::Geometric => mu * mu / ((mu + 1.0) * (mu + 1.0) * (mu + 1.0)),
            OneParamFamily::Bell => {
                let th = lambert_w0(mu)?;
                let psi = (1.0 - th.exp()).exp();
                psi * (1.0 - th * (1.0 + th - th.exp()).exp() / (1.0 + th) - psi)
            }
        })
    }

    pub fn at(self, mu: f64) -> Result<NullLaw> {
        NullLaw::one(self, mu)
    }
}

impl fmt::Display for OneParamFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Two-parameter null families, indexed by `(μ, μ₂)` with `μ₂ = E[X²]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoParamFamily {
    /// Bell–Touchard law with `(μ, μ₂) = (αθeᶿ, αθeᶿ(αθeᶿ + 1 + θ))`.
    Bell,
}

impl TwoParamFamily {
    pub fn id(self) -> &'static str {
        match self {
            TwoParamFamily::Bell => "bell2",
        }
    }

    /// Checks `μ > 0` and over-dispersion `μ₂ − μ² − μ > 0`.
    pub fn check_moments(self, mu: f64, mu2: f64) -> Result<()> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::MomentDomain(format!(
                "{} requires mu > 0, got mu = {mu}",
                self.id()
            )));
        }
        let excess = mu2 - mu * mu - mu;
        if !(excess > 0.0) || !mu2.is_finite() {
            return Err(Error::MomentDomain(format!(
                "{} requires mu2 - mu^2 - mu > 0, got {excess:e} (mu = {mu}, mu2 = {mu2})",
                self.id()
            )));
        }
        Ok(())
    }

    /// Moments from natural parameters `(α, θ)`.
    pub fn h(self, alpha: f64, theta: f64) -> Result<(f64, f64)> {
        if !(alpha > 0.0 && theta > 0.0) {
            return Err(Error::Domain(format!(
                "bell2 requires alpha, theta > 0, got ({alpha}, {theta})"
            )));
        }
        let mu = alpha * theta * theta.exp();
        Ok((mu, mu * (mu + 1.0 + theta)))
    }

    /// Natural parameters `(α, θ)` from moments.
    pub fn h_inverse(self, mu: f64, mu2: f64) -> Result<(f64, f64)> {
        self.check_moments(mu, mu2)?;
        let theta = (mu2 - mu * mu - mu) / mu;
        let alpha = mu / (theta * theta.exp());
        Ok((alpha, theta))
    }

    pub fn psi0(self, mu: f64, mu2: f64) -> Result<f64> {
        self.check_moments(mu, mu2)?;
        let d = mu2 - mu * mu - mu;
        let theta = d / mu;
        Ok((mu * mu / d * (-theta).exp_m1()).exp())
    }

    pub fn dpsi0_dmu(self, mu: f64, mu2: f64) -> Result<f64> {
        let psi = self.psi0(mu, mu2)?;
        let d = mu2 - mu * mu - mu;
        let rm1 = (-d / mu).exp_m1();
        let r = rm1 + 1.0;
        Ok(psi * (mu * (2.0 * mu2 - mu) / (d * d) * rm1 + (mu2 + mu * mu) * r / d))
    }

    pub fn dpsi0_dmu2(self, mu: f64, mu2: f64) -> Result<f64> {
        let psi = self.psi0(mu, mu2)?;
        let d = mu2 - mu * mu - mu;
        let rm1 = (-d / mu).exp_m1();
        let r = rm1 + 1.0;
        Ok(psi * (-mu * mu / (d * d) * rm1 - mu * r / d))
    }

    /// The simplified cross term `2(∂ψ₀/∂μ·μ + ∂ψ₀/∂μ₂·μ₂)ψ₀` written with
    /// `r = e^{(−μ₂+μ²+μ)/μ}`. Both partials carry a factor `ψ₀`, so the
    /// bracket is multiplied by `ψ₀²`.
    pub fn s_closed_form(self, mu: f64, mu2: f64) -> Result<f64> {
        let psi = self.psi0(mu, mu2)?;
        let d = mu2 - mu * mu - mu;
        let rm1 = (-d / mu).exp_m1();
        let r = rm1 + 1.0;
        Ok(2.0 * psi * psi * (mu * mu * (mu2 - mu) / (d * d) * rm1 + mu * mu * mu * r / d))
    }

    pub fn ln_pmf(self, k: u64, mu: f64, mu2: f64) -> Result<f64> {
        if k == 0 {
            return Ok(self.psi0(mu, mu2)?.ln());
        }
        let (alpha, theta) = self.h_inverse(mu, mu2)?;
        let kf = k as f64;
        Ok(kf * theta.ln() + touchard_log(k as usize, alpha)?.ln()
            - alpha * theta.exp_m1()
            - ln_factorial(k))
    }

    pub fn pmf(self, k: u64, mu: f64, mu2: f64) -> Result<f64> {
        if k == 0 {
            return self.psi0(mu, mu2);
        }
        Ok(self.ln_pmf(k, mu, mu2)?.exp())
    }

    pub fn at(self, mu: f64, mu2: f64) -> Result<NullLaw> {
        NullLaw::two(self, mu, mu2)
    }

    pub fn at_natural(self, alpha: f64, theta: f64) -> Result<NullLaw> {
        let (mu, mu2) = self.h(alpha, theta)?;
        NullLaw::two(self, mu, mu2)
    }
}

impl fmt::Display for TwoParamFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Any null family the test can be run against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NullFamily {
    One(OneParamFamily),
    Two(TwoParamFamily),
}

impl NullFamily {
    pub const ALL: [NullFamily; 4] = [
        NullFamily::One(OneParamFamily::ShiftedBorel),
        NullFamily::One(OneParamFamily::Geometric),
        NullFamily::One(OneParamFamily::Bell),
        NullFamily::Two(TwoParamFamily::Bell),
    ];

    pub fn id(self) -> &'static str {
        match self {
            NullFamily::One(f) => f.id(),
            NullFamily::Two(f) => f.id(),
        }
    }

    /// Number of parameters estimated from the sample.
    pub fn n_params(self) -> usize {
        match self {
            NullFamily::One(_) => 1,
            NullFamily::Two(_) => 2,
        }
    }
}

impl FromStr for NullFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NullFamily::ALL
            .iter()
            .copied()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

impl fmt::Display for NullFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl From<OneParamFamily> for NullFamily {
    fn from(f: OneParamFamily) -> Self {
        NullFamily::One(f)
    }
}

impl From<TwoParamFamily> for NullFamily {
    fn from(f: TwoParamFamily) -> Self {
        NullFamily::Two(f)
    }
}

/// A null family fixed at a validated parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NullLaw {
    One { family: OneParamFamily, mu: f64 },
    Two { family: TwoParamFamily, mu: f64, mu2: f64 },
}

impl NullLaw {
    pub fn one(family: OneParamFamily, mu: f64) -> Result<Self> {
        family.check_mean(mu)?;
        Ok(NullLaw::One { family, mu })
    }

    pub fn two(family: TwoParamFamily, mu: f64, mu2: f64) -> Result<Self> {
        family.check_moments(mu, mu2)?;
        Ok(NullLaw::Two { family, mu, mu2 })
    }

    pub fn family(&self) -> NullFamily {
        match *self {
            NullLaw::One { family, .. } => NullFamily::One(family),
            NullLaw::Two { family, .. } => NullFamily::Two(family),
        }
    }

    pub fn psi0(&self) -> f64 {
        self.pmf(0)
    }

    /// Human-readable parameter point, e.g. `mu=1` or `mu=2.7;mu2=12.8`.
    pub fn point_label(&self) -> String {
        match *self {
            NullLaw::One { mu, .. } => format!("mu={}", crate::fmt_sig(mu)),
            NullLaw::Two { mu, mu2, .. } => {
                format!("mu={};mu2={}", crate::fmt_sig(mu), crate::fmt_sig(mu2))
            }
        }
    }
}

impl CountLaw for NullLaw {
    fn pmf(&self, k: u64) -> f64 {
        // parameters were validated at construction
        match *self {
            NullLaw::One { family, mu } => family.pmf(k, mu).unwrap_or(0.0),
            NullLaw::Two { family, mu, mu2 } => family.pmf(k, mu, mu2).unwrap_or(0.0),
        }
    }

    fn mean(&self) -> f64 {
        match *self {
            NullLaw::One { mu, .. } | NullLaw::Two { mu, .. } => mu,
        }
    }

    fn variance(&self) -> f64 {
        match *self {
            NullLaw::One { family, mu } => family.variance(mu).unwrap_or(f64::NAN),
            NullLaw::Two { mu, mu2, .. } => mu2 - mu * mu,
        }
    }

    fn sampler(&self) -> InversionSampler {
        let law = *self;
        InversionSampler::from_pmf(move |k| law.pmf(k), self.mean())
    }
}
