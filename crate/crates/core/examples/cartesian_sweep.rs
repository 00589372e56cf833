//! Grid sweep over three parameters, as in the Lorenz example setup.
//!
//! cargo run --example cartesian_sweep

use paramsweep::{linspace, preview, CartesianSweep, NamerConfig, ParameterValue, SweepDefinition};

fn axis(start: f64, stop: f64, count: usize) -> paramsweep::Result<Vec<ParameterValue>> {
    Ok(linspace(start, stop, count)?
        .into_iter()
        .map(ParameterValue::Real)
        .collect())
}

fn main() -> paramsweep::Result<()> {
    let sweep: SweepDefinition = CartesianSweep::new([
        ("beta", axis(2.0, 4.0, 3)?),
        ("sigma", axis(2.0, 20.0, 10)?),
        ("rho", axis(2.0, 30.0, 10)?),
    ])?
    .into();

    println!("{} simulations", sweep.len()?);
    print!("{}", preview(&sweep, &NamerConfig::default(), 5)?);

    // Last declared parameter varies fastest.
    let sets = sweep.generate()?;
    println!("last set: {}", sets.last().unwrap());
    Ok(())
}
