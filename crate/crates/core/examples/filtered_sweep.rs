//! Filtered grid: keep only the combinations a predicate accepts.
//!
//! cargo run --example filtered_sweep

use paramsweep::filter::{evaluate, free_variables, parse};
use paramsweep::{CartesianSweep, FilteredSweep, ParameterSet, SweepDefinition};

fn main() -> paramsweep::Result<()> {
    let grid = CartesianSweep::new([
        ("x", (1..=4).map(Into::into).collect()),
        ("y", (1..=4).map(Into::into).collect()),
        ("mode", vec!["fast".into(), "slow".into()]),
    ])?;

    let expr = parse("x > y and (mode == 'fast' or x - y >= 2)")?;
    println!("filter: {expr}");
    println!("reads: {:?}", free_variables(&expr));

    let sweep: SweepDefinition = FilteredSweep::new(grid, expr.clone())?.into();
    for set in sweep.generate()? {
        println!("  {set}");
    }

    // Errors carry byte offsets.
    match parse("x > y > 1") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    let env = ParameterSet::from_pairs([("x", 1), ("y", 0)])?;
    println!(
        "x / y > 0 with y = 0: {:?}",
        evaluate(&parse("x / y > 0")?, &env)
            .unwrap_err()
            .to_string()
    );
    Ok(())
}
