//! Two-parameter Bell law: moments, zero probability and the test.

use pgf_gof::gof::{summarize, z_test_two_param};
use pgf_gof::models::{CountLaw, TwoParamFamily};
use pgf_gof::rng::stream_rng;

fn main() -> pgf_gof::Result<()> {
    let fam = TwoParamFamily::Bell;
    let (alpha, theta) = (0.9, 0.7);
    let (mu, mu2) = fam.h(alpha, theta)?;
    println!("alpha = {alpha}, theta = {theta}: mu = {mu:.4}, mu2 = {mu2:.4}, P(X=0) = {:.4}", fam.psi0(mu, mu2)?);
    let pmf: Vec<String> = (0..6).map(|k| format!("{:.4}", fam.pmf(k, mu, mu2).unwrap())).collect();
    println!("pmf(0..6) = [{}]", pmf.join(", "));

    let law = fam.at(mu, mu2)?;
    for (rep, n) in [200usize, 1000, 5000].into_iter().enumerate() {
        let xs = law.sampler().sample_n(&mut stream_rng(3, "bell2", rep as u64), n);
        let s = summarize(&xs)?;
        let (a_hat, t_hat) = fam.h_inverse(s.mu_hat, s.mu2_hat)?;
        let r = z_test_two_param(fam, &xs, 0.05)?;
        println!(
            "n = {n:4}: alpha_hat = {a_hat:.3}, theta_hat = {t_hat:.3}, Z = {:+.3}, p = {:.3}",
            r.statistic, r.p_value
        );
    }

    // an under-dispersed sample falls outside the family
    let err = z_test_two_param(fam, &[1, 1, 2, 1, 1, 1], 0.05).unwrap_err();
    println!("under-dispersed sample: {err}");
    Ok(())
}
