//! The end-to-end sweep pipeline: generate, name, render, record, dispatch.
//!
//! [`run_sweep`] validates everything it can before touching the
//! filesystem. All configuration files are written before the first job
//! starts, so a template mistake never leaves a half-dispatched sweep.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::collect::{collect_scalars, Collected};
use crate::dispatch::{
    dispatch_all, script_file_name, DispatcherConfig, JobRecord, JobSpec, JobStatus,
};
use crate::error::{Error, Result};
use crate::mapping::{build_mapping, SweepMapping};
use crate::naming::{assign_ids, make_namer, NamerConfig};
use crate::sweep::SweepDefinition;
use crate::template::{check_coverage, Template};
use crate::value::{ParameterSet, SIM_ID};

pub const SUMMARY_SCHEMA: &str = "sweep-summary/1";

/// Everything [`run_sweep`] needs.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Shell command, with `{sim_id}` and optionally parameter placeholders.
    pub command: String,
    /// `(path pattern, template)` pairs. Each pattern must contain `{sim_id}`.
    pub configs: Vec<(String, Template)>,
    pub sweep: SweepDefinition,
    /// Prefix of the mapping, summary, script and log files.
    pub sweep_name: String,
    pub dispatcher: DispatcherConfig,
    pub naming: NamerConfig,
    /// Treat parameters no template uses as an error.
    pub strict: bool,
    /// Directory commands run in; relative paths are resolved against it.
    pub workdir: PathBuf,
    /// Defaults to `<workdir>/<sweep_name>_mapping.json`.
    pub mapping_out: Option<PathBuf>,
    /// Harvest one scalar per simulation from this pattern after a local run.
    pub collect_pattern: Option<String>,
}

impl RunOptions {
    pub fn new(command: impl Into<String>, sweep: SweepDefinition) -> Self {
        RunOptions {
            command: command.into(),
            configs: Vec::new(),
            sweep,
            sweep_name: "sweep".into(),
            dispatcher: DispatcherConfig::default(),
            naming: NamerConfig::default(),
            strict: false,
            workdir: PathBuf::from("."),
            mapping_out: None,
            collect_pattern: None,
        }
    }

    pub fn add_config(&mut self, path_pattern: impl Into<String>, template: Template) -> &mut Self {
        self.configs.push((path_pattern.into(), template));
        self
    }

    /// Pairs up parallel lists of config paths and templates.
    pub fn set_configs(&mut self, paths: Vec<String>, templates: Vec<Template>) -> Result<()> {
        if paths.len() != templates.len() {
            return Err(Error::Usage(format!(
                "{} config paths but {} templates; they pair up one to one",
                paths.len(),
                templates.len()
            )));
        }
        self.configs = paths.into_iter().zip(templates).collect();
        Ok(())
    }

    pub fn mapping_path(&self) -> PathBuf {
        match &self.mapping_out {
            Some(path) => self.resolve(path),
            None => self.resolve(Path::new(&format!("{}_mapping.json", self.sweep_name))),
        }
    }

    pub fn summary_path(&self) -> PathBuf {
        self.resolve(Path::new(&format!("{}_summary.json", self.sweep_name)))
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.workdir.join(path)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct RunCounts {
    pub succeeded: usize,
    pub failed: usize,
    pub submitted: usize,
    pub dry_run: usize,
}

impl RunCounts {
    fn tally(records: &[JobRecord]) -> Self {
        let mut counts = RunCounts::default();
        for record in records {
            match record.status {
                JobStatus::Completed { exit_code: 0 } => counts.succeeded += 1,
                JobStatus::Completed { .. } | JobStatus::SpawnFailed { .. } => counts.failed += 1,
                JobStatus::Submitted { .. } => counts.submitted += 1,
                JobStatus::DryRun => counts.dry_run += 1,
            }
        }
        counts
    }
}

/// What a finished [`run_sweep`] produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub mapping: SweepMapping,
    pub records: Vec<JobRecord>,
    pub counts: RunCounts,
    pub warnings: Vec<String>,
    pub config_paths: Vec<PathBuf>,
    pub mapping_path: PathBuf,
    pub summary_path: PathBuf,
    pub collected: Option<Collected>,
}

impl RunOutcome {
    /// 0 on success, 3 if a local simulation failed, 4 if requested
    /// collection came back incomplete.
    pub fn exit_code(&self) -> i32 {
        if self.counts.failed > 0 {
            3
        } else if self.collected.as_ref().is_some_and(|c| !c.is_complete()) {
            4
        } else {
            0
        }
    }
}

fn check_sweep_name(name: &str) -> Result<()> {
    if name.is_empty()
        || !name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
    {
        return Err(Error::Usage(format!(
            "sweep name `{name}` may only contain letters, digits, `_`, `.` and `-`"
        )));
    }
    Ok(())
}

struct Plan {
    ids: Vec<String>,
    sets: Vec<ParameterSet>,
    warnings: Vec<String>,
    files: Vec<(PathBuf, String)>,
    jobs: Vec<JobSpec>,
    mapping: SweepMapping,
}

/// Everything up to the first write: all errors the user can fix surface here.
fn plan(options: &RunOptions) -> Result<Plan> {
    check_sweep_name(&options.sweep_name)?;
    options.dispatcher.validate()?;
    let command = Template::parse(options.command.as_str())?;
    if !command.uses_sim_id() {
        return Err(Error::Usage(format!(
            "command `{}` must contain {{{SIM_ID}}}",
            options.command
        )));
    }
    let mut patterns = Vec::with_capacity(options.configs.len());
    for (pattern, _) in &options.configs {
        let parsed = Template::parse(pattern.as_str())?;
        if !parsed.uses_sim_id() {
            return Err(Error::Usage(format!(
                "config path `{pattern}` must contain {{{SIM_ID}}}"
            )));
        }
        patterns.push(parsed);
    }
    if let Some(p) = &options.collect_pattern {
        if !Template::parse(p.as_str())?.uses_sim_id() {
            return Err(Error::Usage(format!(
                "output pattern `{p}` must contain {{{SIM_ID}}}"
            )));
        }
    }

    let sets = options.sweep.generate()?;
    let mut namer = make_namer(&options.naming, sets.len())?;
    let ids = assign_ids(&mut namer, sets.len())?;

    let names = options.sweep.parameter_names();
    let mut all: Vec<Template> = options.configs.iter().map(|(_, t)| t.clone()).collect();
    all.push(command.clone());
    all.extend(patterns.iter().cloned());
    let warnings = check_coverage(&all, &names, options.strict)?;

    let mut files = Vec::with_capacity(sets.len() * options.configs.len());
    let mut seen = HashSet::new();
    let mut jobs = Vec::with_capacity(sets.len());
    for (id, set) in ids.iter().zip(&sets) {
        for ((_, template), pattern) in options.configs.iter().zip(&patterns) {
            let path = options.resolve(Path::new(&pattern.render(set, id)?));
            if !seen.insert(path.clone()) {
                return Err(Error::Usage(format!(
                    "two configuration files would be written to {}",
                    path.display()
                )));
            }
            files.push((path, template.render(set, id)?));
        }
        let mut job = JobSpec::new(
            id.clone(),
            command.render(set, id)?,
            options.workdir.clone(),
        )?;
        if options.dispatcher.kind.scheduler().is_some() {
            job.script_path = Some(
                options
                    .workdir
                    .join(script_file_name(&options.sweep_name, id)),
            );
        }
        jobs.push(job);
    }

    let mapping = build_mapping(&options.sweep_name, &options.sweep, &sets, &ids)?;
    Ok(Plan {
        ids,
        sets,
        warnings,
        files,
        jobs,
        mapping,
    })
}

fn check_conflicts(options: &RunOptions, plan: &Plan) -> Result<()> {
    if options.dispatcher.overwrite {
        return Ok(());
    }
    let mut conflicts: Vec<PathBuf> = plan
        .files
        .iter()
        .map(|(p, _)| p)
        .chain(plan.jobs.iter().filter_map(|j| j.script_path.as_ref()))
        .filter(|p| p.exists())
        .cloned()
        .collect();
    let mapping = options.mapping_path();
    if mapping.exists() {
        conflicts.push(mapping);
    }
    if conflicts.is_empty() {
        Ok(())
    } else {
        Err(Error::Conflict(conflicts))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| Error::io(format!("creating directory {}", parent.display()), e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Runs a whole sweep.
///
/// Order of events: validate and render everything in memory, check for
/// existing files, write the configuration files and the mapping, dispatch,
/// optionally collect, then write `<sweep_name>_summary.json`.
///
/// Job failures do not make this return an error; they show up in the
/// outcome's counts and exit code. A failed scheduler submission does.
pub fn run_sweep(options: &RunOptions) -> Result<RunOutcome> {
    let plan = plan(options)?;
    check_conflicts(options, &plan)?;

    for (path, contents) in &plan.files {
        write_file(path, contents)?;
    }
    let mapping_path = options.mapping_path();
    write_file(&mapping_path, &plan.mapping.to_json())?;

    let records = dispatch_all(&plan.jobs, &options.dispatcher, &options.sweep_name)?;
    let counts = RunCounts::tally(&records);

    let collected = match &options.collect_pattern {
        Some(pattern)
            if !options.dispatcher.is_dry() && options.dispatcher.kind.scheduler().is_none() =>
        {
            Some(collect_scalars(&plan.mapping, pattern, &options.workdir)?)
        }
        _ => None,
    };

    let outcome = RunOutcome {
        mapping: plan.mapping,
        records,
        counts,
        warnings: plan.warnings,
        config_paths: plan.files.into_iter().map(|(p, _)| p).collect(),
        mapping_path,
        summary_path: options.summary_path(),
        collected,
    };
    debug_assert_eq!(outcome.records.len(), plan.ids.len());
    debug_assert_eq!(outcome.mapping.len(), plan.sets.len());
    write_file(&outcome.summary_path, &summary_json(options, &outcome))?;
    Ok(outcome)
}

fn summary_json(options: &RunOptions, outcome: &RunOutcome) -> String {
    let mut doc = json!({
        "schema": SUMMARY_SCHEMA,
        "sweep_name": options.sweep_name,
        "sweep_type": options.sweep.kind(),
        "dispatcher": options.dispatcher.kind.name(),
        "dry_run": options.dispatcher.is_dry(),
        "total": outcome.records.len(),
        "counts": outcome.counts,
        "exit_code": outcome.exit_code(),
        "mapping": outcome.mapping_path,
        "warnings": outcome.warnings,
        "records": outcome.records,
    });
    if let Some(collected) = &outcome.collected {
        doc["collection"] = serde_json::to_value(collected.report()).expect("report serializes");
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("summary serializes");
    text.push('\n');
    text
}

/// A dry look at a sweep: no files are touched.
#[derive(Debug, Clone, PartialEq)]
pub struct Preview {
    pub kind: &'static str,
    pub parameter_names: Vec<String>,
    pub total: usize,
    /// The first few sets with the IDs they would get.
    pub head: Vec<(String, ParameterSet)>,
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

impl fmt::Display for Preview {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}, {}, {}",
            self.kind,
            plural(self.parameter_names.len(), "parameter"),
            plural(self.total, "simulation")
        )?;
        writeln!(f, "parameters: {}", self.parameter_names.join(", "))?;
        for (id, set) in &self.head {
            writeln!(f, "{id}  {set}")?;
        }
        if self.total > self.head.len() {
            writeln!(f, "... {} more", self.total - self.head.len())?;
        }
        Ok(())
    }
}

/// Generates the sweep and lists its first `limit` sets with their IDs.
pub fn preview(sweep: &SweepDefinition, naming: &NamerConfig, limit: usize) -> Result<Preview> {
    let sets = sweep.generate()?;
    let mut namer = make_namer(naming, sets.len())?;
    let ids = assign_ids(&mut namer, sets.len())?;
    Ok(Preview {
        kind: sweep.kind(),
        parameter_names: sweep.parameter_names(),
        total: sets.len(),
        head: ids.into_iter().zip(sets).take(limit).collect(),
    })
}
