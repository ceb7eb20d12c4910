//! The alternative-law catalog with moments and zero probabilities.

use pgf_gof::models::{AltDistribution, CountLaw};

fn main() {
    println!("{:<22} {:>8} {:>9} {:>8}", "law", "mean", "variance", "P(X=0)");
    for d in AltDistribution::power_table() {
        println!("{:<22} {:>8.4} {:>9.4} {:>8.4}", d.to_string(), d.mean(), d.variance(), d.pmf(0));
    }
    let custom: AltDistribution = "zinb:3,0.6,0.25".parse().expect("valid spec");
    println!("custom {custom}: mean {:.4}, P(X=0) {:.4}", custom.mean(), custom.pmf(0));
}
