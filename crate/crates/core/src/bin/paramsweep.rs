//! Command-line front end: `run`, `preview` and `collect`.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 dispatch or
//! scheduler failure, 3 a local simulation failed, 4 collection incomplete.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use paramsweep::{
    collect_scalars, preview, read_sweep_file, DispatcherConfig, DispatcherKind, Error,
    NamerConfig, RunOptions, SweepMapping, Template,
};

#[derive(Parser)]
#[command(
    name = "paramsweep",
    version,
    about = "Run parameter sweeps over an external model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render configs, write the mapping and dispatch one job per parameter set.
    Run(RunArgs),
    /// Show a sweep's size and first parameter sets without touching files.
    Preview(PreviewArgs),
    /// Harvest one scalar per simulation into CSV.
    Collect(CollectArgs),
}

#[derive(Args)]
struct NamingArgs {
    /// Text placed before every simulation ID.
    #[arg(long, default_value = "")]
    id_prefix: String,
    /// Number of the first simulation.
    #[arg(long, default_value_t = 0)]
    id_start: u64,
    /// Minimum number of digits in an ID.
    #[arg(long, default_value_t = 1)]
    id_width: usize,
}

impl NamingArgs {
    fn config(&self) -> NamerConfig {
        NamerConfig {
            start_index: self.id_start,
            min_width: self.id_width,
            prefix: self.id_prefix.clone(),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Command run per simulation; must contain {sim_id}.
    #[arg(long)]
    command: String,
    /// Config path pattern containing {sim_id}; pairs with the --template at the same position.
    #[arg(long = "config")]
    configs: Vec<String>,
    #[arg(long = "template")]
    templates: Vec<PathBuf>,
    /// JSON sweep specification.
    #[arg(long)]
    sweep_file: PathBuf,
    /// Sweep name, used for the mapping, summary, script and log files.
    #[arg(long, default_value = "sweep")]
    name: String,
    /// local, slurm, pbs or dry.
    #[arg(long, default_value = "local")]
    dispatcher: DispatcherKind,
    /// Write configs, mapping and scripts but start or submit nothing.
    #[arg(long)]
    dry_run: bool,
    /// Concurrent local jobs (default: logical CPU count).
    #[arg(long)]
    max_parallel: Option<usize>,
    /// Overrides the seed of a random sweep.
    #[arg(long)]
    seed: Option<u64>,
    /// Fail when a parameter is used by no template.
    #[arg(long)]
    strict: bool,
    /// Replace existing configs, scripts and mapping.
    #[arg(long)]
    overwrite: bool,
    /// Send local job output to <name>_<id>.out / .err.
    #[arg(long)]
    capture: bool,
    /// Mapping file (default: <name>_mapping.json).
    #[arg(long)]
    mapping_out: Option<PathBuf>,
    /// Extra batch-script header line, without the #SBATCH / #PBS prefix.
    #[arg(long = "directive", allow_hyphen_values = true)]
    directives: Vec<String>,
    /// Replaces sbatch / qsub.
    #[arg(long, allow_hyphen_values = true)]
    submit_command: Option<String>,
    /// After a local run, read one scalar per simulation from this pattern.
    #[arg(long)]
    collect: Option<String>,
    /// Directory to run in (default: current directory).
    #[arg(long, default_value = ".")]
    workdir: PathBuf,
    #[command(flatten)]
    naming: NamingArgs,
}

#[derive(Args)]
struct PreviewArgs {
    #[arg(long)]
    sweep_file: PathBuf,
    /// Number of parameter sets to list.
    #[arg(long, default_value_t = 10)]
    limit: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    naming: NamingArgs,
}

#[derive(Args)]
struct CollectArgs {
    /// Mapping file written by `run`.
    #[arg(long)]
    mapping: PathBuf,
    /// Output file pattern containing {sim_id}, relative to --workdir.
    #[arg(long, default_value = "results_{sim_id}.txt")]
    output_pattern: String,
    /// CSV destination (default: stdout).
    #[arg(long)]
    csv_out: Option<PathBuf>,
    /// JSON report of missing or unreadable outputs.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    workdir: PathBuf,
}

fn write(path: &PathBuf, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        context: format!("writing {}", path.display()),
        source: e,
    })
}

fn run(args: RunArgs) -> Result<i32, Error> {
    let sweep = read_sweep_file(&args.sweep_file, args.seed)?;
    let templates = args
        .templates
        .iter()
        .map(Template::from_file)
        .collect::<Result<Vec<_>, _>>()?;
    let mut options = RunOptions::new(args.command, sweep);
    options.set_configs(args.configs, templates)?;
    options.sweep_name = args.name;
    options.strict = args.strict;
    options.workdir = args.workdir;
    options.mapping_out = args.mapping_out;
    options.collect_pattern = args.collect;
    options.naming = args.naming.config();
    let mut dispatcher = DispatcherConfig::new(args.dispatcher);
    if let Some(n) = args.max_parallel {
        dispatcher.max_parallel = n;
    }
    dispatcher.dry_run = args.dry_run;
    dispatcher.capture = args.capture;
    dispatcher.overwrite = args.overwrite;
    dispatcher.directives = args.directives;
    dispatcher.submit_command = args.submit_command;
    options.dispatcher = dispatcher;

    let outcome = paramsweep::run_sweep(&options)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    let c = outcome.counts;
    eprintln!(
        "{} simulations: {} succeeded, {} failed, {} submitted, {} dry run",
        outcome.records.len(),
        c.succeeded,
        c.failed,
        c.submitted,
        c.dry_run
    );
    for record in outcome.records.iter().filter(|r| r.failed()) {
        eprintln!("failed: {} ({:?})", record.sim_id, record.status);
    }
    if let Some(collected) = &outcome.collected {
        let report = collected.report();
        eprintln!("collected {}/{} results", report.collected, report.total);
    }
    eprintln!("mapping: {}", outcome.mapping_path.display());
    eprintln!("summary: {}", outcome.summary_path.display());
    Ok(outcome.exit_code())
}

fn preview_cmd(args: PreviewArgs) -> Result<i32, Error> {
    let sweep = read_sweep_file(&args.sweep_file, args.seed)?;
    print!("{}", preview(&sweep, &args.naming.config(), args.limit)?);
    Ok(0)
}

fn collect(args: CollectArgs) -> Result<i32, Error> {
    let mapping = SweepMapping::read_file(&args.mapping)?;
    let collected = collect_scalars(&mapping, &args.output_pattern, &args.workdir)?;
    let csv = collected.to_csv();
    match &args.csv_out {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    let report = collected.report();
    if let Some(path) = &args.report {
        let doc = json!({
            "mapping": args.mapping,
            "output_pattern": args.output_pattern,
            "report": report,
        });
        write(
            path,
            &(serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"),
        )?;
    }
    for problem in &report.problems {
        eprintln!(
            "missing result for {}: {}",
            problem.sim_id,
            problem.path.display()
        );
    }
    Ok(if collected.is_complete() { 0 } else { 4 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Preview(args) => preview_cmd(args),
        Command::Collect(args) => collect(args),
    };
    let code = result.unwrap_or_else(|err| {
        eprintln!("error: {err}");
        err.exit_code()
    });
    ExitCode::from(code as u8)
}
