//! Lambert W, Bell numbers, Stirling rows and Touchard polynomials.

use pgf_gof::specfun::{bell_number_log, lambert_w0, stirling2_row, touchard_log};

fn main() -> pgf_gof::Result<()> {
    for x in [0.5, 1.0, std::f64::consts::E, 100.0, 1e10] {
        let w = lambert_w0(x)?;
        println!("W({x}) = {w:.12}   W e^W - x = {:.2e}", w * w.exp() - x);
    }

    let bells: Vec<String> = (0..12).map(|n| format!("{:.0}", bell_number_log(n).value())).collect();
    println!("Bell numbers: {}", bells.join(", "));
    // too large for f64, but fine on the log scale
    println!("ln B_1000 = {:.6}", bell_number_log(1000).ln());

    let row = stirling2_row(6)?;
    println!("S(6, k) exact: {:?}", row.exact().unwrap());
    println!("T_6(0.5) = {:.6}", touchard_log(6, 0.5)?.value());
    Ok(())
}
