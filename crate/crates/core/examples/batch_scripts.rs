//! Slurm and PBS script generation, dry run (nothing is submitted).
//!
//! cargo run --example batch_scripts

use paramsweep::{dispatch_all, render_batch_script, DispatcherConfig, DispatcherKind, JobSpec};

fn main() -> paramsweep::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let jobs: Vec<JobSpec> = (0..3)
        .map(|i| JobSpec::new(format!("00{i}"), format!("./lorenz 00{i}"), dir.path()))
        .collect::<paramsweep::Result<_>>()?;

    for kind in [DispatcherKind::Slurm, DispatcherKind::Pbs] {
        let mut config = DispatcherConfig::new(kind);
        config.directives = vec![match kind {
            DispatcherKind::Slurm => "--time=00:10:00".into(),
            _ => "-l walltime=00:10:00".into(),
        }];
        println!("--- {}", kind.name());
        print!("{}", render_batch_script(&jobs[0], &config, "lorenz")?);

        config.dry_run = true;
        let records = dispatch_all(&jobs, &config, "lorenz")?;
        for r in records {
            println!(
                "{} -> {:?} ({})",
                r.sim_id,
                r.status,
                r.script_path.unwrap().display()
            );
        }
    }
    println!(
        "{}",
        paramsweep::dispatch::parse_scheduler_job_id("Submitted batch job 81234").unwrap()
    );
    Ok(())
}
