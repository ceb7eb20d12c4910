//! Empirical significance level across a grid of means.
//!
//! `cargo run --release --example level_study [reps]`

use pgf_gof::harness::{run_cells, write_csv, ExperimentGrid, GridLaw, ParamPoint};
use pgf_gof::models::OneParamFamily;

fn main() -> pgf_gof::Result<()> {
    let reps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let grid = ExperimentGrid::new(OneParamFamily::ShiftedBorel.into(), GridLaw::Null)
        .points([0.5, 2.5, 5.5, 10.5, 14.5].into_iter().map(ParamPoint::Mean).collect())
        .sizes(vec![30, 50])
        .reps(reps)
        .seed(1);
    let results = run_cells(&grid.cells()?, |i, total, r| {
        eprintln!("[{i}/{total}] {} n={}", r.cell.param_label(), r.cell.n);
    })?;
    for r in &results {
        println!(
            "{:<8} n={}  Z level {:.3} ± {:.3}   Q level {:.3}",
            r.cell.param_label(),
            r.cell.n,
            r.rejection_rate_z,
            r.monte_carlo_se,
            r.rejection_rate_q
        );
    }
    write_csv(&results, std::io::stdout().lock())
}
