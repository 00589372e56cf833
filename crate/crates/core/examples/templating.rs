//! Filling a Fortran namelist template.
//!
//! cargo run --example templating

use paramsweep::template::check_coverage;
use paramsweep::{ParameterSet, ParameterValue, Template};

fn main() -> paramsweep::Result<()> {
    let template = Template::parse("&params\nbeta = {beta},\nsigma = {sigma},\nrho = {rho}\n/\n")?;
    println!("placeholders: {:?}", template.placeholders());

    let set = ParameterSet::from_pairs([
        ("beta", ParameterValue::Real(2.67)),
        ("sigma", ParameterValue::Real(10.0)),
        ("rho", ParameterValue::Integer(28)),
    ])?;
    // Reals always keep a decimal point so namelist readers see a real.
    print!("{}", template.render(&set, "000")?);

    let paths = Template::parse("runs/{sim_id}/params.nml")?;
    println!("{}", paths.render(&set, "017")?);

    let escaped = Template::parse("{{literal}} {sim_id}")?;
    println!("{}", escaped.render(&ParameterSet::new(), "5")?);

    let warnings = check_coverage(
        &[Template::parse("beta = {beta}")?],
        &["beta", "unused"],
        false,
    )?;
    println!("{warnings:?}");
    println!("{}", Template::parse("oops {unclosed").unwrap_err());
    Ok(())
}
