//! Reading per-simulation outputs back into the sweep's shape.
//!
//! cargo run --example collect_results

use paramsweep::{build_mapping, collect_scalars, CartesianSweep, SweepDefinition};

fn main() -> paramsweep::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let sweep: SweepDefinition = CartesianSweep::new([
        ("a", vec![1.into(), 2.into()]),
        ("b", vec![10.into(), 20.into()]),
    ])?
    .into();
    let sets = sweep.generate()?;
    let ids: Vec<String> = (0..sets.len()).map(|i| i.to_string()).collect();
    let mapping = build_mapping("demo", &sweep, &sets, &ids)?;

    // Pretend three of the four simulations wrote a result.
    for (id, text) in [("0", "0.5"), ("1", "1.25D+00"), ("3", "-4e-2 extra tokens")] {
        std::fs::write(dir.path().join(format!("out_{id}.dat")), text).expect("write");
    }
    let collected = collect_scalars(&mapping, "out_{sim_id}.dat", dir.path())?;
    println!("value at a=2, b=20: {:?}", collected.get(&[1, 1]));
    println!("missing: {:?}", collected.report().missing_ids());
    print!("{}", collected.to_csv());
    Ok(())
}
