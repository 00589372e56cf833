//! A complete sweep on the local machine with the bundled stub model.
//!
//! cargo run --example local_run

use paramsweep::{
    read_sweep_file, run_sweep, stub, DispatcherConfig, DispatcherKind, RunOptions, Template,
};

fn main() -> paramsweep::Result<()> {
    if cfg!(not(unix)) {
        eprintln!("the stub model needs a POSIX shell");
        return Ok(());
    }
    let dir = tempfile::tempdir().expect("temp dir");
    let work = dir.path();
    stub::write_stub_model(work)?;
    let spec = work.join("sweep.json");
    std::fs::write(
        &spec,
        r#"{"type":"cartesian","parameters":{"beta":{"linspace":[2,4,3]},"sigma":[10.0],"rho":[28, 30]}}"#,
    )
    .expect("write spec");

    let mut options = RunOptions::new("./stub_model {sim_id}", read_sweep_file(&spec, None)?);
    options.add_config(
        "params_{sim_id}.nml",
        Template::parse("&params\nbeta = {beta},\nsigma = {sigma},\nrho = {rho}\n/\n")?,
    );
    options.sweep_name = "lorenz".into();
    options.workdir = work.to_path_buf();
    options.dispatcher = DispatcherConfig::new(DispatcherKind::Local);
    options.dispatcher.max_parallel = 2;
    options.collect_pattern = Some("results_{sim_id}.txt".into());

    let outcome = run_sweep(&options)?;
    println!("{:?}, exit code {}", outcome.counts, outcome.exit_code());
    for (id, set, value) in outcome.collected.as_ref().unwrap().rows() {
        println!("{id}  {set}  ->  {value:?}");
    }
    println!(
        "{}",
        std::fs::read_to_string(&outcome.summary_path)
            .expect("summary")
            .lines()
            .take(12)
            .collect::<Vec<_>>()
            .join("\n")
    );
    Ok(())
}
