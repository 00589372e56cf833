//! Parallel parameter sweeps over external models.
//!
//! A sweep turns a [`SweepDefinition`] into an ordered list of
//! [`ParameterSet`]s, gives each one a simulation ID, renders configuration
//! files from [`Template`]s, runs one command per set through a
//! [`Dispatcher`], and records a [`SweepMapping`] from IDs back to
//! parameters. [`run_sweep`] wires the whole pipeline together;
//! [`collect_scalars`] reads the results back.
//!
//! ```no_run
//! use paramsweep::{linspace, CartesianSweep, DispatcherConfig, DispatcherKind, RunOptions, Template};
//!
//! let grid = CartesianSweep::new([
//!     ("beta", linspace(2.0, 4.0, 3)?.into_iter().map(Into::into).collect()),
//!     ("rho", vec![28.into()]),
//! ])?;
//! let template = Template::parse("beta = {beta}\nrho = {rho}\n")?;
//! let mut options = RunOptions::new("./model {sim_id}", grid.into());
//! options.add_config("params_{sim_id}.nml", template);
//! options.dispatcher = DispatcherConfig::new(DispatcherKind::Local);
//! let outcome = paramsweep::run_sweep(&options)?;
//! std::process::exit(outcome.exit_code());
//! # Ok::<(), paramsweep::Error>(())
//! ```

pub mod collect;
pub mod dispatch;
pub mod error;
pub mod filter;
pub mod mapping;
pub mod naming;
pub mod random;
pub mod run;
pub mod stub;
pub mod sweep;
pub mod sweep_file;
pub mod template;
pub mod value;

pub use collect::{
    collect_scalars, export_csv, CollectProblem, CollectReport, Collected, ProblemKind,
};
pub use dispatch::{
    dispatch_all, render_batch_script, BatchDispatcher, Dispatcher, DispatcherConfig,
    DispatcherKind, DryDispatcher, JobRecord, JobSpec, JobStatus, LocalDispatcher, Scheduler,
};
pub use error::{Error, Result};
pub use filter::FilterExpr;
pub use mapping::{
    build_mapping, AssociationMapping, CartesianMapping, SweepMapping, MAPPING_SCHEMA,
};
pub use naming::{make_namer, Namer, NamerConfig, SequentialNamer};
pub use random::{Distribution, SweepRng};
pub use run::{preview, run_sweep, Preview, RunOptions, RunOutcome, SUMMARY_SCHEMA};
pub use sweep::{
    generate, linspace, sweep_length, CartesianSweep, FilteredSweep, RandomSweep, SetSweep,
    SweepDefinition,
};
pub use sweep_file::{parse_sweep_spec, read_sweep_file};
pub use template::Template;
pub use value::{format_value, ParameterSet, ParameterValue, SIM_ID};
