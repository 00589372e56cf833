//! The ID <-> parameter mapping: lookups and the JSON file format.
//!
//! cargo run --example mapping_roundtrip

use paramsweep::{
    build_mapping, CartesianSweep, FilteredSweep, ParameterSet, SweepDefinition, SweepMapping,
};

fn main() -> paramsweep::Result<()> {
    let grid = CartesianSweep::new([
        ("x", vec![1.into(), 2.into()]),
        ("y", vec![1.into(), 2.into()]),
    ])?;

    let cartesian: SweepDefinition = grid.clone().into();
    let sets = cartesian.generate()?;
    let ids: Vec<String> = ["a0", "a1", "a2", "a3"].map(String::from).into();
    let mapping = build_mapping("grid", &cartesian, &sets, &ids)?;
    print!("{}", mapping.to_json());

    let filtered: SweepDefinition = FilteredSweep::with_source(grid, "x > y")?.into();
    let survivors = filtered.generate()?;
    let assoc = build_mapping("filtered", &filtered, &survivors, &["f0".to_string()])?;
    print!("{}", assoc.to_json());

    println!("a2 -> {}", mapping.lookup_by_id("a2")?);
    let query = ParameterSet::from_pairs([("y", 1), ("x", 2)])?;
    println!("{query} -> {}", mapping.lookup_by_params(&query)?);

    let back = SweepMapping::from_json(&mapping.to_json())?;
    assert_eq!(back, mapping);
    Ok(())
}
