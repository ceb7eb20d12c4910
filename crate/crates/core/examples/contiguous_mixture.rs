//! Power along shrinking mixtures, with the predicted centering of T0.

use pgf_gof::contiguous::prop2_shift;
use pgf_gof::gof::sigma2_one_param;
use pgf_gof::harness::{run_cells, DataLaw, ExperimentGrid, GridLaw, ParamPoint};
use pgf_gof::models::{AltDistribution, OneParamFamily};
use statrs::function::erf::erfc;

fn main() -> pgf_gof::Result<()> {
    let n = 50;
    let y: AltDistribution = "binomial:4,0.25".parse()?;
    let lambdas: Vec<f64> = (0..=14).map(|i| 0.5 * i as f64).collect();
    for fam in OneParamFamily::ALL {
        let sigma = sigma2_one_param(fam, 1.0)?.sqrt();
        let grid = ExperimentGrid::new(fam.into(), GridLaw::Mixture { contaminant: y, lambdas: lambdas.clone() })
            .points(vec![ParamPoint::Mean(1.0)])
            .sizes(vec![n])
            .reps(1000)
            .seed(1);
        println!("{fam}, mu = 1, contaminant {y}");
        for r in run_cells(&grid.cells()?, |_, _, _| {})? {
            let DataLaw::Mixture { lambda, .. } = r.cell.law else { unreachable!() };
            // limiting power of a two-sided 5% test when Z is N(shift/σ, 1)
            let delta = prop2_shift(fam, 1.0, &y, lambda)? / sigma;
            let phi = |x: f64| 0.5 * erfc(-x / std::f64::consts::SQRT_2);
            let limit = phi(-1.959964 - delta) + 1.0 - phi(1.959964 - delta);
            println!(
                "  lambda {lambda:3.1}: Z {:.3}  Q {:.3}  asymptotic Z {:.3}",
                r.rejection_rate_z, r.rejection_rate_q, limit
            );
        }
    }
    Ok(())
}
