//! Binomial thinning: Geometric laws stay Geometric, shifted Borel laws do not.

use pgf_gof::contiguous::{remark1_shift, thinning_shift};
use pgf_gof::harness::{run_cells, ExperimentGrid, GridLaw, ParamPoint};
use pgf_gof::models::OneParamFamily;

fn main() -> pgf_gof::Result<()> {
    let lambdas: Vec<f64> = (0..=13).map(|i| 0.5 * i as f64).collect();
    for fam in [OneParamFamily::Geometric, OneParamFamily::ShiftedBorel] {
        let grid = ExperimentGrid::new(fam.into(), GridLaw::Thinning { lambdas: lambdas.clone() })
            .points(vec![ParamPoint::Mean(15.0)])
            .sizes(vec![50])
            .reps(1000)
            .seed(1);
        let results = run_cells(&grid.cells()?, |_, _, _| {})?;
        println!("{fam}, mu = 15");
        for (r, &l) in results.iter().zip(&lambdas) {
            println!(
                "  lambda {l:3.1}: Z {:.3}  Q {:.3}  shift {:+.4} (displayed form {:+.3})",
                r.rejection_rate_z,
                r.rejection_rate_q,
                thinning_shift(fam, 15.0, l)?,
                remark1_shift(fam, 15.0, l)?,
            );
        }
    }
    Ok(())
}
