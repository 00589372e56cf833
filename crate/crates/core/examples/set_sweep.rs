//! Explicit list of parameter sets, run verbatim.
//!
//! cargo run --example set_sweep

use paramsweep::{parse_sweep_spec, ParameterSet, ParameterValue, SetSweep, SweepDefinition};

fn main() -> paramsweep::Result<()> {
    let sweep: SweepDefinition = SetSweep::new(vec![
        ParameterSet::from_pairs([
            ("dt", ParameterValue::Real(0.01)),
            ("steps", ParameterValue::Integer(1000)),
        ])?,
        ParameterSet::from_pairs([
            ("dt", ParameterValue::Real(0.001)),
            ("steps", ParameterValue::Integer(10000)),
        ])?,
    ])?
    .into();
    for set in sweep.generate()? {
        println!("{set}");
    }

    // The same thing from a sweep file.
    let from_json = parse_sweep_spec(
        r#"{"type":"set","sets":[{"dt":0.01,"steps":1000},{"dt":0.001,"steps":10000}]}"#,
        None,
    )?;
    assert_eq!(from_json.generate()?, sweep.generate()?);

    // Every set must name the same parameters in the same order.
    let err =
        parse_sweep_spec(r#"{"type":"set","sets":[{"dt":0.01},{"steps":5}]}"#, None).unwrap_err();
    println!("rejected: {err}");
    Ok(())
}
