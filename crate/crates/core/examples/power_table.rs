//! Power of both tests against the 20 catalog alternatives, three nulls.
//!
//! `cargo run --release --example power_table [n] [reps]`

use pgf_gof::harness::{power_table_cells, run_cells};

fn main() -> pgf_gof::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(30);
    let reps = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let results = run_cells(&power_table_cells(n, reps, 1), |_, _, _| {})?;

    println!("{:<22} {:>15} {:>15} {:>15}", "alternative", "shifted-borel", "geometric", "bell1");
    for row in results.chunks(3) {
        let cols: Vec<String> = row
            .iter()
            .map(|r| format!("{:5.1} / {:5.1}", 100.0 * r.rejection_rate_z, 100.0 * r.rejection_rate_q))
            .collect();
        println!("{:<22} {:>15} {:>15} {:>15}", row[0].cell.law.label(), cols[0], cols[1], cols[2]);
    }
    println!("(Z / Q power in percent, n = {n}, {reps} replications)");
    Ok(())
}
