//! Locate the lowest resonance of the double-well oscillator at g = 0.22
//! and print the per-dimension history of the Hankel sequence.

use riccati_pade::problem::parse_coupling;
use riccati_pade::solver::{solve_adaptive, SolveConfig};
use riccati_pade::ProblemSpec;

fn main() -> riccati_pade::Result<()> {
    let spec = ProblemSpec::double_well(parse_coupling("0.22")?)?;
    let cfg = SolveConfig::default();
    let report = solve_adaptive(&spec, &cfg)?;

    println!("D   E^[D,0]");
    for entry in &report.entries {
        println!("{:2}  {}", entry.dim, entry.root.energy.render_decimal(20));
    }
    println!(
        "verdict: {} ({} working digits, stable to {}/{} digits)",
        report.verdict.as_str(),
        report.digits_used,
        report.stable_digits_re,
        report.stable_digits_im,
    );
    Ok(())
}
