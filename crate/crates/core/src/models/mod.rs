//! Null families, the alternative-law catalog and their samplers.

mod alternatives;
mod families;
mod sampler;

use rand::Rng;

pub use alternatives::{alt_catalog, AltDistribution};
pub use families::{NullFamily, NullLaw, OneParamFamily, TwoParamFamily};
pub use sampler::InversionSampler;

/// A fully specified law on the nonnegative integers.
pub trait CountLaw {
    fn pmf(&self, k: u64) -> f64;
    fn mean(&self) -> f64;
    fn variance(&self) -> f64;
    /// An inversion sampler with the cumulative table prebuilt.
    fn sampler(&self) -> InversionSampler;

    fn second_moment(&self) -> f64 {
        let m = self.mean();
        self.variance() + m * m
    }
}

/// `n` independent draws from `law`; deterministic given the RNG state.
pub fn sample_iid<L, R>(law: &L, n: usize, rng: &mut R) -> Vec<u64>
where
    L: CountLaw + ?Sized,
    R: Rng + ?Sized,
{
    law.sampler().sample_n(rng, n)
}
