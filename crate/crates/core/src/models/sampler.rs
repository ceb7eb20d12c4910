//! Inversion sampling for count laws through a tabulated cumulative p.m.f.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

/// Table stops once past the mean and the p.m.f. has dropped below this.
const TABLE_PMF_FLOOR: f64 = 1e-17;
const TABLE_HARD_CAP: u64 = 2_000_000;

type PmfFn = dyn Fn(u64) -> f64 + Send + Sync;

/// Draws from a count law by inverting its cumulative distribution.
///
/// The cumulative table is built once; uniforms landing beyond the table
/// (probability below ~1e-14) continue the search with direct p.m.f. calls.
#[derive(Clone)]
pub struct InversionSampler {
    cdf: Vec<f64>,
    pmf: Arc<PmfFn>,
}

impl fmt::Debug for InversionSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InversionSampler")
            .field("table_len", &self.cdf.len())
            .field("table_mass", &self.cdf.last())
            .finish()
    }
}

impl InversionSampler {
    pub fn from_pmf<F>(pmf: F, mean: f64) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        let mut k = 0u64;
        loop {
            let p = pmf(k);
            acc += p;
            cdf.push(acc);
            if (k as f64 > mean && p < TABLE_PMF_FLOOR) || k >= TABLE_HARD_CAP {
                break;
            }
            k += 1;
        }
        InversionSampler {
            cdf,
            pmf: Arc::new(pmf),
        }
    }

    /// Probability mass covered by the cumulative table.
    pub fn table_mass(&self) -> f64 {
        *self.cdf.last().unwrap_or(&0.0)
    }

    pub fn table_len(&self) -> usize {
        self.cdf.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|&c| c <= u);
        if idx < self.cdf.len() {
            return idx as u64;
        }
        let mut acc = self.table_mass();
        let mut k = self.cdf.len() as u64;
        let limit = k.saturating_mul(4).saturating_add(10_000);
        while k < limit {
            acc += (self.pmf)(k);
            if acc > u {
                return k;
            }
            k += 1;
        }
        k - 1
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<u64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}
