//! Local alternatives drifting toward the null at rate `λ/√n`.
//!
//! Two constructions are provided: shrinking mixtures, where each draw comes
//! from a contaminant `Y` with probability `λ/√n`, and binomial thinning,
//! where each unit of a null draw survives with probability `1 − λ/√n`.
//! The `*_shift` functions return the asymptotic centering of `T̃₀` under
//! each construction.

use rand::Rng;

use crate::error::{Error, Result};
use crate::models::{AltDistribution, CountLaw, InversionSampler, NullLaw, OneParamFamily, TwoParamFamily};

fn contamination_rate(lambda: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidSpec("sample size must be positive".into()));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidSpec(format!("lambda must be >= 0, got {lambda}")));
    }
    let rate = lambda / (n as f64).sqrt();
    if rate > 1.0 {
        return Err(Error::InvalidSpec(format!(
            "lambda / sqrt(n) = {rate} exceeds 1 (lambda = {lambda}, n = {n})"
        )));
    }
    Ok(rate)
}

fn check_mean_match(base: f64, contaminant: f64) -> Result<()> {
    if (base - contaminant).abs() <= 1e-12 * base.abs().max(1.0) {
        Ok(())
    } else {
        Err(Error::MeanMismatch { base, contaminant })
    }
}

/// `X′ₗ = I{Aₗ} Xₗ + I{Aₗᶜ} Yₗ` with `P(Aₗᶜ) = λ/√n`.
#[derive(Debug, Clone)]
pub struct MixtureContigSpec {
    base: NullLaw,
    contaminant: AltDistribution,
    lambda: f64,
    n: usize,
    rate: f64,
}

impl MixtureContigSpec {
    /// Validates `λ/√n ≤ 1` and `E[Y] = E[X]`.
    pub fn new(base: NullLaw, contaminant: AltDistribution, lambda: f64, n: usize) -> Result<Self> {
        let rate = contamination_rate(lambda, n)?;
        check_mean_match(base.mean(), contaminant.mean())?;
        Ok(MixtureContigSpec { base, contaminant, lambda, n, rate })
    }

    pub fn base(&self) -> &NullLaw {
        &self.base
    }

    pub fn contaminant(&self) -> &AltDistribution {
        &self.contaminant
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Probability that a draw comes from the contaminant.
    pub fn contamination(&self) -> f64 {
        self.rate
    }

    /// Samplers for the base and contaminant, for repeated draws.
    pub fn samplers(&self) -> MixtureSamplers {
        MixtureSamplers {
            base: self.base.sampler(),
            contaminant: self.contaminant.sampler(),
            rate: self.rate,
            n: self.n,
        }
    }
}

/// Prebuilt samplers for a [`MixtureContigSpec`].
#[derive(Debug, Clone)]
pub struct MixtureSamplers {
    base: InversionSampler,
    contaminant: InversionSampler,
    rate: f64,
    n: usize,
}

impl MixtureSamplers {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        (0..self.n)
            .map(|_| {
                let from_y = rng.random::<f64>() < self.rate;
                if from_y {
                    self.contaminant.sample(rng)
                } else {
                    self.base.sample(rng)
                }
            })
            .collect()
    }
}

pub fn sample_mixture_contig<R: Rng + ?Sized>(spec: &MixtureContigSpec, rng: &mut R) -> Vec<u64> {
    spec.samplers().sample(rng)
}

/// `X′ₗ = Σ_{j ≤ Xₗ} Y_{j,l}` with `Y_{j,l} ~ Bernoulli(1 − λ/√n)`.
#[derive(Debug, Clone)]
pub struct ThinningContigSpec {
    base: NullLaw,
    lambda: f64,
    n: usize,
    retain: f64,
}

impl ThinningContigSpec {
    pub fn new(base: NullLaw, lambda: f64, n: usize) -> Result<Self> {
        let rate = contamination_rate(lambda, n)?;
        Ok(ThinningContigSpec { base, lambda, n, retain: 1.0 - rate })
    }

    pub fn base(&self) -> &NullLaw {
        &self.base
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Survival probability `α = 1 − λ/√n` of each unit.
    pub fn retain(&self) -> f64 {
        self.retain
    }

    pub fn samplers(&self) -> ThinningSamplers {
        ThinningSamplers { base: self.base.sampler(), retain: self.retain, n: self.n }
    }
}

#[derive(Debug, Clone)]
pub struct ThinningSamplers {
    base: InversionSampler,
    retain: f64,
    n: usize,
}

impl ThinningSamplers {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        (0..self.n)
            .map(|_| {
                let x = self.base.sample(rng);
                if self.retain >= 1.0 {
                    return x;
                }
                (0..x).filter(|_| rng.random::<f64>() < self.retain).count() as u64
            })
            .collect()
    }
}

pub fn sample_thinning_contig<R: Rng + ?Sized>(spec: &ThinningContigSpec, rng: &mut R) -> Vec<u64> {
    spec.samplers().sample(rng)
}

/// Centering `λ(P(X=0) − P(Y=0))` of `T̃₀` under shrinking mixtures.
pub fn prop2_shift(fam: OneParamFamily, mu: f64, y: &AltDistribution, lambda: f64) -> Result<f64> {
    fam.check_mean(mu)?;
    check_mean_match(mu, y.mean())?;
    Ok(lambda * (fam.psi0(mu)? - y.pmf(0)))
}

/// `−λ(P(X=1) + μ)`, the thinning centering as displayed for the α-fraction
/// construction.
///
/// This omits the `ψ₀′(μ)` factor on the mean drift; [`thinning_shift`] is the
/// first-order expansion that the Monte Carlo behaviour follows.
pub fn remark1_shift(fam: OneParamFamily, mu: f64, lambda: f64) -> Result<f64> {
    Ok(-lambda * (fam.pmf(1, mu)? + mu))
}

/// First-order centering of `T̃₀` under binomial thinning:
/// `λ(−ψ₀′(μ)·μ − P(X=1))`.
///
/// The mean drifts by `−λμ/√n` and the zero probability by `+λP(X=1)/√n`.
/// For the Geometric family the two cancel exactly, as thinning maps
/// Geometric laws onto Geometric laws.
pub fn thinning_shift(fam: OneParamFamily, mu: f64, lambda: f64) -> Result<f64> {
    Ok(lambda * (-fam.psi0_prime(mu)? * mu - fam.pmf(1, mu)?))
}

/// Centering `λ(P(X=0) − P(Y=0) + ∂ψ₀/∂μ₂·(E[Y²] − E[X²]))` for
/// two-parameter families under shrinking mixtures.
pub fn prop3_shift(
    fam: TwoParamFamily,
    mu: f64,
    mu2: f64,
    y: &AltDistribution,
    lambda: f64,
) -> Result<f64> {
    fam.check_moments(mu, mu2)?;
    check_mean_match(mu, y.mean())?;
    let psi = fam.psi0(mu, mu2)?;
    let b = fam.dpsi0_dmu2(mu, mu2)?;
    Ok(lambda * (psi - y.pmf(0) + b * (y.second_moment() - mu2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gof::summarize;
    use crate::rng::stream_rng;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn b425() -> AltDistribution {
        "binomial:4,0.25".parse().unwrap()
    }

    #[test]
    fn spec_validation() {
        let base = OneParamFamily::ShiftedBorel.at(1.0).unwrap();
        assert!(MixtureContigSpec::new(base, b425(), 2.0, 100).is_ok());
        assert!(matches!(
            MixtureContigSpec::new(base, "poisson:2".parse().unwrap(), 2.0, 100),
            Err(Error::MeanMismatch { .. })
        ));
        assert!(MixtureContigSpec::new(base, b425(), 11.0, 100).is_err());
        assert!(MixtureContigSpec::new(base, b425(), 10.0, 100).is_ok());
        assert!(ThinningContigSpec::new(base, 10.5, 100).is_err());
        assert!(ThinningContigSpec::new(base, -1.0, 100).is_err());
    }

    #[test]
    fn full_contamination_draws_only_from_y() {
        let base = OneParamFamily::Geometric.at(2.0).unwrap();
        let y: AltDistribution = "dunif:4".parse().unwrap();
        let spec = MixtureContigSpec::new(base, y, 10.0, 100).unwrap();
        let mut rng = stream_rng(3, "full", 0);
        let xs = sample_mixture_contig(&spec, &mut rng);
        assert_eq!(xs.len(), 100);
        assert!(xs.iter().all(|&x| x <= 4));
    }

    #[test]
    fn zero_lambda_thinning_is_identity() {
        let base = OneParamFamily::ShiftedBorel.at(3.0).unwrap();
        let spec = ThinningContigSpec::new(base, 0.0, 50).unwrap();
        let a = sample_thinning_contig(&spec, &mut stream_rng(9, "t", 0));
        let b = base.sampler().sample_n(&mut stream_rng(9, "t", 0), 50);
        assert_eq!(a, b);
    }

    fn zero_share(spec: &MixtureContigSpec, reps: u64) -> (f64, f64) {
        let samplers = spec.samplers();
        let mut zeros = 0usize;
        for r in 0..reps {
            let xs = samplers.sample(&mut stream_rng(5, "mix", r));
            zeros += xs.iter().filter(|&&x| x == 0).count();
        }
        let total = reps as f64 * spec.n() as f64;
        (zeros as f64 / total, total)
    }

    #[test]
    fn mixture_zero_proportion() {
        let base = OneParamFamily::ShiftedBorel.at(1.0).unwrap();
        let p_y = 0.75f64.powi(4);
        // contamination weight λ/√n = 0.02 at n = 10⁴, 0.2 at n = 100
        for (n, reps, w) in [(10_000usize, 20u64, 0.02), (100, 2000, 0.2)] {
            let spec = MixtureContigSpec::new(base, b425(), 2.0, n).unwrap();
            assert_relative_eq!(spec.contamination(), w, max_relative = 1e-14);
            let expected = (1.0 - w) * (-0.5f64).exp() + w * p_y;
            if n == 10_000 {
                assert_relative_eq!(expected, 0.60073, epsilon = 1e-5);
            }
            let (share, total) = zero_share(&spec, reps);
            let band = 3.0 * (expected * (1.0 - expected) / total).sqrt();
            assert!((share - expected).abs() < band, "n = {n}: {share} vs {expected}");
        }
    }

    #[test]
    fn thinning_mean() {
        let base = OneParamFamily::ShiftedBorel.at(2.0).unwrap();
        let spec = ThinningContigSpec::new(base, 3.0, 100).unwrap();
        let xs: Vec<u64> = (0..1000)
            .flat_map(|r| sample_thinning_contig(&spec, &mut stream_rng(11, "thin", r)))
            .collect();
        let s = summarize(&xs).unwrap();
        let a = 0.7;
        // Var of thinned = α² v + α(1−α) μ
        let var = a * a * 18.0 + a * (1.0 - a) * 2.0;
        let band = 3.0 * (var / xs.len() as f64).sqrt();
        assert!((s.mu_hat - a * 2.0).abs() < band, "{} vs {}", s.mu_hat, a * 2.0);
    }

    #[test]
    fn mixture_shift_examples() {
        let f = OneParamFamily::ShiftedBorel;
        assert_eq!(prop2_shift(f, 1.0, &b425(), 0.0).unwrap(), 0.0);
        let s = prop2_shift(f, 1.0, &b425(), 2.0).unwrap();
        assert_relative_eq!(s, 2.0 * ((-0.5f64).exp() - 0.75f64.powi(4)), max_relative = 1e-13);
        assert_relative_eq!(s, 0.58025, epsilon = 1e-5);
        assert!(prop2_shift(f, 2.0, &b425(), 1.0).is_err());
    }

    #[test]
    fn mixture_shift_matched_zero_probability() {
        // ZIP(λ, π) with mean 1 and P(Y=0) = ψ₀(1) for the Geometric law:
        // (1−π)λ = 1 and π + (1−π)e^{−λ} = 1/2; solve for λ by bisection.
        let g = |l: f64| {
            let pi = 1.0 - 1.0 / l;
            pi + (1.0 - pi) * (-l).exp() - 0.5
        };
        let (mut lo, mut hi) = (1.0001, 20.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let l = 0.5 * (lo + hi);
        let y = AltDistribution::ZeroInflatedPoisson { lambda: l, pi: 1.0 - 1.0 / l };
        let s = prop2_shift(OneParamFamily::Geometric, 1.0, &y, 3.0).unwrap();
        assert!(s.abs() < 1e-10);
    }

    #[test]
    fn displayed_thinning_shift_examples() {
        assert_eq!(remark1_shift(OneParamFamily::Geometric, 1.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(remark1_shift(OneParamFamily::Geometric, 1.0, 2.0).unwrap(), -2.5);
        // shifted Borel at μ = 1: P(X=1) = e^{−1}·(1/2·2)/2!
        let p1 = (-1f64).exp() * 0.5;
        assert_relative_eq!(
            remark1_shift(OneParamFamily::ShiftedBorel, 1.0, 1.0).unwrap(),
            -(p1 + 1.0),
            max_relative = 1e-14
        );
    }

    #[test]
    fn thinning_shift_vanishes_for_geometric() {
        for &mu in &[0.5, 1.0, 5.0, 15.0] {
            assert!(thinning_shift(OneParamFamily::Geometric, mu, 2.0).unwrap().abs() < 1e-14);
        }
        assert!(thinning_shift(OneParamFamily::ShiftedBorel, 15.0, 2.0).unwrap().abs() > 1e-3);
    }

    #[test]
    fn two_param_mixture_shift_examples() {
        let f = TwoParamFamily::Bell;
        let (mu, mu2) = (E, E * (E + 2.0));
        let y: AltDistribution = AltDistribution::Poisson { lambda: E };
        assert_eq!(prop3_shift(f, mu, mu2, &y, 0.0).unwrap(), 0.0);
        let s = prop3_shift(f, mu, mu2, &y, 1.0).unwrap();
        let b = f.dpsi0_dmu2(mu, mu2).unwrap();
        let expected = (1.0 - E).exp() - (-E).exp() + b * (E + E * E - mu2);
        assert_relative_eq!(s, expected, max_relative = 1e-12);
    }
}
