//! Run the p.g.f. test and the chi-squared comparator on a sample.
//!
//! `cargo run --example test_sample`

use pgf_gof::chisq::q_test;
use pgf_gof::gof::{summarize, z_test};
use pgf_gof::models::{CountLaw, NullFamily, OneParamFamily};
use pgf_gof::rng::stream_rng;

fn main() -> pgf_gof::Result<()> {
    // accident-style counts: 120 draws from a Geometric law with mean 1.4
    let law = OneParamFamily::Geometric.at(1.4)?;
    let xs = law.sampler().sample_n(&mut stream_rng(2024, "example", 0), 120);
    let s = summarize(&xs)?;
    println!("n = {}, mean = {:.3}, P(X=0) = {:.3}", s.n, s.mu_hat, s.p0_hat);

    for fam in NullFamily::ALL {
        match z_test(fam, &xs, 0.05) {
            Ok(z) => {
                let q = q_test(fam, &xs, 0.05)
                    .map(|q| format!("Q = {:7.3} (p = {:.3})", q.statistic, q.p_value))
                    .unwrap_or_else(|e| format!("Q unavailable: {e}"));
                println!(
                    "{:>13}: Z = {:+.3} (p = {:.3}, {}), {q}",
                    fam.id(),
                    z.statistic,
                    z.p_value,
                    if z.reject { "reject" } else { "keep" },
                );
            }
            Err(e) => println!("{:>13}: {e}", fam.id()),
        }
    }
    Ok(())
}
