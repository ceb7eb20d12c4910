//! Scalar special functions used by the Bell families.
//!
//! Bell numbers, Stirling numbers of the second kind and Touchard
//! polynomials grow faster than any double can hold (B₂₀₀ ≈ 10²⁷⁵,
//! B₄₀₀ ≈ 10⁶⁵⁰), so everything here lives in natural-log scale.
//! Rows up to [`STIRLING_CAP`] come from cached triangle recurrences; above
//! the cap the Bell/Touchard values fall back to the Dobinski series.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest row index served by the cached Stirling/Bell triangles.
pub const STIRLING_CAP: usize = 400;

const HALLEY_MAX_ITER: usize = 64;

/// A nonnegative quantity stored as its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogScale(f64);

impl LogScale {
    pub const ZERO: LogScale = LogScale(f64::NEG_INFINITY);
    pub const ONE: LogScale = LogScale(0.0);

    pub fn from_ln(ln: f64) -> Self {
        LogScale(ln)
    }

    pub fn from_value(v: f64) -> Self {
        debug_assert!(v >= 0.0);
        LogScale(v.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    /// The represented quantity; overflows to `inf` outside double range.
    pub fn value(self) -> f64 {
        self.0.exp()
    }
}

/// `ln(eᵃ + eᵇ)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ exp(xᵢ)` over a slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    let s: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    statrs::function::factorial::ln_factorial(n)
}

/// Principal branch of the Lambert W function on `[0, ∞)`: the `w ≥ 0` with
/// `w·eʷ = x`.
///
/// Halley iteration from a logarithmic starting guess; converges in a handful
/// of steps over the whole nonnegative axis.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!(
            "lambert_w0 requires x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x < 1e-300 {
        return Ok(x);
    }

    let mut w = if x <= std::f64::consts::E {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..HALLEY_MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if !(step.abs() > 1e-14 * w.abs()) {
            break;
        }
    }
    Ok(w)
}

fn bell_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Bell triangle: each row opens with the last entry of the previous
        // row, and every entry adds its left neighbour to the one above-left.
        let mut out = Vec::with_capacity(STIRLING_CAP + 1);
        let mut prev = vec![0.0_f64];
        out.push(0.0);
        for _ in 1..=STIRLING_CAP {
            let mut row = Vec::with_capacity(prev.len() + 1);
            row.push(*prev.last().unwrap());
            for k in 0..prev.len() {
                let next = log_add_exp(row[k], prev[k]);
                row.push(next);
            }
            out.push(row[0]);
            prev = row;
        }
        out
    })
}

fn stirling_table() -> &'static [Vec<f64>] {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLE.get_or_init(|| log_stirling_rows(STIRLING_CAP))
}

fn log_stirling_rows(max_n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(max_n + 1);
    rows.push(vec![0.0]);
    for n in 1..=max_n {
        let prev = &rows[n - 1];
        let mut row = vec![f64::NEG_INFINITY; n + 1];
        for (j, slot) in row.iter_mut().enumerate().skip(1) {
            let stay = if j < n {
                (j as f64).ln() + prev[j]
            } else {
                f64::NEG_INFINITY
            };
            *slot = log_add_exp(stay, prev[j - 1]);
        }
        rows.push(row);
    }
    rows
}

/// `ln Tₙ(α)` from the Dobinski-type series `e^{-α} Σₖ kⁿ αᵏ / k!`,
/// truncated once terms fall 40 nats below the running maximum past the peak.
fn touchard_series_log(n: u64, alpha: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let ln_alpha = alpha.ln();
    let nf = n as f64;
    let mut terms = Vec::new();
    let mut max = f64::NEG_INFINITY;
    let mut k: u64 = 1;
    loop {
        let kf = k as f64;
        let t = nf * kf.ln() + kf * ln_alpha - ln_factorial(k);
        terms.push(t);
        if t > max {
            max = t;
        } else if t < max - 40.0 {
            break;
        }
        k += 1;
    }
    log_sum_exp(&terms) - alpha
}

/// `ln Bₙ`, the log of the number of partitions of an `n`-element set.
pub fn bell_number_log(n: usize) -> LogScale {
    if n <= STIRLING_CAP {
        LogScale(bell_table()[n])
    } else {
        LogScale(touchard_series_log(n as u64, 1.0))
    }
}

/// `ln Tₙ(α)` where `Tₙ(α) = Σⱼ αʲ S(n, j)`.
pub fn touchard_log(n: usize, alpha: f64) -> Result<LogScale> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "touchard polynomial requires alpha > 0, got {alpha}"
        )));
    }
    if n > STIRLING_CAP {
        return Ok(LogScale(touchard_series_log(n as u64, alpha)));
    }
    let row = &stirling_table()[n];
    let ln_alpha = alpha.ln();
    let terms: Vec<f64> = row
        .iter()
        .enumerate()
        .map(|(j, &ls)| ls + j as f64 * ln_alpha)
        .collect();
    Ok(LogScale(log_sum_exp(&terms)))
}

/// Row `n` of the Stirling numbers of the second kind, `S(n, 0..=n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stirling2Row {
    ln_values: Vec<f64>,
    exact: Option<Vec<u128>>,
}

impl Stirling2Row {
    /// `ln S(n, j)` for every `j`; `-inf` for the zero entries.
    pub fn ln_values(&self) -> &[f64] {
        &self.ln_values
    }

    /// The exact integers, when every entry of the row fits in a `u128`.
    pub fn exact(&self) -> Option<&[u128]> {
        self.exact.as_deref()
    }

    pub fn len(&self) -> usize {
        self.ln_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_values.is_empty()
    }
}

/// `S(n, 0..=n)` with the default cap.
pub fn stirling2_row(n: usize) -> Result<Stirling2Row> {
    stirling2_row_with_cap(n, STIRLING_CAP)
}

/// `S(n, 0..=n)` via `S(n,j) = j·S(n−1,j) + S(n−1,j−1)`, refusing `n > cap`.
pub fn stirling2_row_with_cap(n: usize, cap: usize) -> Result<Stirling2Row> {
    if n > cap {
        return Err(Error::Capacity { n, cap });
    }
    let ln_values = if n <= STIRLING_CAP {
        stirling_table()[n].clone()
    } else {
        log_stirling_rows(n).pop().unwrap()
    };
    Ok(Stirling2Row {
        ln_values,
        exact: exact_stirling_row(n),
    })
}

fn exact_stirling_row(n: usize) -> Option<Vec<u128>> {
    let mut row: Vec<u128> = vec![1];
    for m in 1..=n {
        let mut next = vec![0u128; m + 1];
        for j in 1..=m {
            let stay = if j < m {
                (j as u128).checked_mul(row[j])?
            } else {
                0
            };
            next[j] = stay.checked_add(row[j - 1])?;
        }
        row = next;
    }
    Some(row)
}
