#![allow(dead_code)]

use pgf_gof::chisq::{chi2_sf, pearson_statistic};

/// Pearson goodness-of-fit p-value of integer draws against a p.m.f.
///
/// Classes are built left to right, each closed once its expected count
/// reaches 5; the right tail takes the remaining mass.
pub fn pmf_gof_pvalue(draws: &[u64], pmf: impl Fn(u64) -> f64) -> f64 {
    let n = draws.len() as f64;
    let mut bounds = Vec::new(); // inclusive upper ends
    let mut probs = Vec::new();
    let (mut acc, mut covered, mut k) = (0.0, 0.0, 0u64);
    while 1.0 - covered - acc > 5.0 / n && k < 1_000_000 {
        acc += pmf(k);
        if acc * n >= 5.0 && (1.0 - covered - acc) * n >= 5.0 {
            bounds.push(k);
            probs.push(acc);
            covered += acc;
            acc = 0.0;
        }
        k += 1;
    }
    probs.push((1.0 - covered).max(0.0));
    let mut obs = vec![0u64; probs.len()];
    for &x in draws {
        let i = bounds.partition_point(|&b| b < x);
        obs[i] += 1;
    }
    let df = probs.len() as u64 - 1;
    if df == 0 {
        return 1.0;
    }
    chi2_sf(pearson_statistic(&obs, &probs), df)
}

/// Two-sample chi-squared homogeneity p-value, pooling sparse values.
pub fn two_sample_pvalue(a: &[u64], b: &[u64]) -> f64 {
    use std::collections::BTreeMap;
    let mut counts: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for &x in a {
        counts.entry(x).or_default().0 += 1;
    }
    for &x in b {
        counts.entry(x).or_default().1 += 1;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for (_, (ca, cb)) in counts {
        cur.0 += ca as f64;
        cur.1 += cb as f64;
        if cur.0 + cur.1 >= 20.0 {
            cells.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.0 + cur.1 > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => cells.push(cur),
        }
    }
    let total = na + nb;
    let mut q = 0.0;
    for &(ca, cb) in &cells {
        let col = ca + cb;
        for (obs, row) in [(ca, na), (cb, nb)] {
            let e = row * col / total;
            q += (obs - e) * (obs - e) / e;
        }
    }
    let df = cells.len() as u64 - 1;
    if df == 0 {
        return 1.0;
    }
    chi2_sf(q, df)
}
