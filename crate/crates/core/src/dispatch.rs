//! Running one job per simulation.
//!
//! Three back ends share the [`Dispatcher`] trait:
//!
//! * [`LocalDispatcher`] runs each command through the platform shell with
//!   at most `max_parallel` children alive at once. A failing job is
//!   recorded and the sweep carries on.
//! * [`BatchDispatcher`] writes one Slurm or PBS script per job and hands
//!   it to the submit command (`sbatch` / `qsub` by default). It does not
//!   wait for the scheduler. A failing submission aborts the dispatch,
//!   since it usually means the cluster setup is wrong.
//! * [`DryDispatcher`] does nothing and reports every job as a dry run.
//!
//! Batch scripts have this exact layout (PBS uses `#PBS -N` / `#PBS -o`):
//!
//! ```text
//! #!/bin/sh
//! #SBATCH --job-name=<sweep>_<id>
//! #SBATCH --output=<sweep>_<id>.out
//! #SBATCH <directive>        (zero or more)
//!
//! <command>
//! ```

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitStatus, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::value::SIM_ID;

/// One simulation ready to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub sim_id: String,
    /// Shell command with every placeholder already substituted.
    pub command: String,
    pub workdir: PathBuf,
    /// Batch script location, set for scheduler back ends.
    pub script_path: Option<PathBuf>,
}

impl JobSpec {
    pub fn new(
        sim_id: impl Into<String>,
        command: impl Into<String>,
        workdir: impl Into<PathBuf>,
    ) -> Result<Self> {
        let command = command.into();
        if command.trim().is_empty() {
            return Err(Error::InvalidArgument("job command is empty".into()));
        }
        if command.contains(&format!("{{{SIM_ID}}}")) {
            return Err(Error::InvalidArgument(format!(
                "job command `{command}` still contains {{{SIM_ID}}}"
            )));
        }
        Ok(JobSpec {
            sim_id: sim_id.into(),
            command,
            workdir: workdir.into(),
            script_path: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum JobStatus {
    /// The process ran to completion. Death by signal `n` is reported as
    /// exit code `128 + n`, as shells do.
    Completed {
        exit_code: i32,
    },
    Submitted {
        scheduler_job_id: String,
    },
    DryRun,
    SpawnFailed {
        reason: String,
    },
}

/// Outcome of dispatching one job.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobRecord {
    pub sim_id: String,
    pub command: String,
    pub status: JobStatus,
    /// Seconds since the Unix epoch.
    pub started_at: Option<f64>,
    pub finished_at: Option<f64>,
    pub duration: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub script_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stdout_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr_path: Option<PathBuf>,
}

impl JobRecord {
    fn bare(job: &JobSpec, status: JobStatus) -> Self {
        JobRecord {
            sim_id: job.sim_id.clone(),
            command: job.command.clone(),
            status,
            started_at: None,
            finished_at: None,
            duration: None,
            script_path: job.script_path.clone(),
            stdout_path: None,
            stderr_path: None,
        }
    }

    pub fn succeeded(&self) -> bool {
        matches!(self.status, JobStatus::Completed { exit_code: 0 })
    }

    /// Local job that exited non-zero or never started.
    pub fn failed(&self) -> bool {
        matches!(
            self.status,
            JobStatus::Completed { exit_code } if exit_code != 0
        ) || matches!(self.status, JobStatus::SpawnFailed { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheduler {
    Slurm,
    Pbs,
}

impl Scheduler {
    pub fn default_submit_command(self) -> &'static str {
        match self {
            Scheduler::Slurm => "sbatch",
            Scheduler::Pbs => "qsub",
        }
    }

    fn header(self, job_name: &str) -> [String; 2] {
        match self {
            Scheduler::Slurm => [
                format!("#SBATCH --job-name={job_name}"),
                format!("#SBATCH --output={job_name}.out"),
            ],
            Scheduler::Pbs => [
                format!("#PBS -N {job_name}"),
                format!("#PBS -o {job_name}.out"),
            ],
        }
    }

    fn directive_prefix(self) -> &'static str {
        match self {
            Scheduler::Slurm => "#SBATCH",
            Scheduler::Pbs => "#PBS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DispatcherKind {
    Local,
    Slurm,
    Pbs,
    Dry,
}

impl DispatcherKind {
    pub fn scheduler(self) -> Option<Scheduler> {
        match self {
            DispatcherKind::Slurm => Some(Scheduler::Slurm),
            DispatcherKind::Pbs => Some(Scheduler::Pbs),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DispatcherKind::Local => "local",
            DispatcherKind::Slurm => "slurm",
            DispatcherKind::Pbs => "pbs",
            DispatcherKind::Dry => "dry",
        }
    }
}

impl std::str::FromStr for DispatcherKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local" => Ok(DispatcherKind::Local),
            "slurm" => Ok(DispatcherKind::Slurm),
            "pbs" => Ok(DispatcherKind::Pbs),
            "dry" => Ok(DispatcherKind::Dry),
            other => Err(Error::Usage(format!(
                "unknown dispatcher `{other}` (expected local, slurm, pbs or dry)"
            ))),
        }
    }
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DispatcherConfig {
    pub kind: DispatcherKind,
    /// Upper bound on concurrent local children.
    pub max_parallel: usize,
    /// Replaces `sbatch` / `qsub`.
    pub submit_command: Option<String>,
    /// Extra header lines for batch scripts, without the `#SBATCH`/`#PBS` prefix.
    pub directives: Vec<String>,
    /// With a scheduler kind: write scripts but do not submit.
    pub dry_run: bool,
    /// Local jobs: redirect output to `<sweep>_<id>.out` / `.err`.
    pub capture: bool,
    pub overwrite: bool,
}

impl Default for DispatcherConfig {
    fn default() -> Self {
        DispatcherConfig {
            kind: DispatcherKind::Local,
            max_parallel: default_parallelism(),
            submit_command: None,
            directives: Vec::new(),
            dry_run: false,
            capture: false,
            overwrite: false,
        }
    }
}

impl DispatcherConfig {
    pub fn new(kind: DispatcherKind) -> Self {
        DispatcherConfig {
            kind,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_parallel == 0 {
            return Err(Error::InvalidArgument(
                "max_parallel must be at least 1".into(),
            ));
        }
        if let Some(cmd) = &self.submit_command {
            if cmd.trim().is_empty() {
                return Err(Error::InvalidArgument("submit command is empty".into()));
            }
        }
        if let Some(bad) = self.directives.iter().find(|d| d.contains('\n')) {
            return Err(Error::InvalidArgument(format!(
                "scheduler directive `{bad}` spans several lines"
            )));
        }
        Ok(())
    }

    /// True when no job will actually be started or submitted.
    pub fn is_dry(&self) -> bool {
        self.kind == DispatcherKind::Dry || self.dry_run
    }
}

/// `<sweep>_<id>`, shared by script, job and log names.
pub fn job_name(sweep_name: &str, sim_id: &str) -> String {
    format!("{sweep_name}_{sim_id}")
}

/// Script filename for a job, relative to the working directory.
pub fn script_file_name(sweep_name: &str, sim_id: &str) -> String {
    format!("{}.sh", job_name(sweep_name, sim_id))
}

/// Exact batch-script text for `job`. Local and dry kinds have no script and
/// produce an invalid-argument error.
pub fn render_batch_script(
    job: &JobSpec,
    config: &DispatcherConfig,
    sweep_name: &str,
) -> Result<String> {
    let scheduler = config.kind.scheduler().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "`{}` dispatch has no batch scripts",
            config.kind.name()
        ))
    })?;
    Ok(batch_script(scheduler, job, &config.directives, sweep_name))
}

fn batch_script(
    scheduler: Scheduler,
    job: &JobSpec,
    directives: &[String],
    sweep_name: &str,
) -> String {
    let name = job_name(sweep_name, &job.sim_id);
    let mut script = String::from("#!/bin/sh\n");
    for line in scheduler.header(&name) {
        script.push_str(&line);
        script.push('\n');
    }
    for directive in directives {
        script.push_str(scheduler.directive_prefix());
        script.push(' ');
        script.push_str(directive);
        script.push('\n');
    }
    script.push('\n');
    script.push_str(&job.command);
    script.push('\n');
    script
}

/// A back end that runs or submits jobs.
pub trait Dispatcher {
    /// Returns exactly one record per job, ordered by `sim_id`.
    fn dispatch(&self, jobs: &[JobSpec]) -> Result<Vec<JobRecord>>;
}

pub struct DryDispatcher;

impl Dispatcher for DryDispatcher {
    fn dispatch(&self, jobs: &[JobSpec]) -> Result<Vec<JobRecord>> {
        Ok(sorted(
            jobs.iter()
                .map(|j| JobRecord::bare(j, JobStatus::DryRun))
                .collect(),
        ))
    }
}

fn sorted(mut records: Vec<JobRecord>) -> Vec<JobRecord> {
    records.sort_by(|a, b| a.sim_id.cmp(&b.sim_id));
    records
}

fn shell(command: &str) -> Command {
    #[cfg(windows)]
    {
        let mut cmd = Command::new("cmd");
        cmd.arg("/C").arg(command);
        cmd
    }
    #[cfg(not(windows))]
    {
        let mut cmd = Command::new("sh");
        cmd.arg("-c").arg(command);
        cmd
    }
}

fn exit_code(status: ExitStatus) -> i32 {
    if let Some(code) = status.code() {
        return code;
    }
    #[cfg(unix)]
    {
        use std::os::unix::process::ExitStatusExt;
        if let Some(signal) = status.signal() {
            return 128 + signal;
        }
    }
    -1
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

/// Bounded pool of local shell processes.
#[derive(Debug, Clone)]
pub struct LocalDispatcher {
    pub max_parallel: usize,
    /// Sweep name used for captured output files; `None` inherits stdio.
    pub capture: Option<String>,
}

impl LocalDispatcher {
    fn run_one(&self, job: &JobSpec) -> JobRecord {
        let mut record = JobRecord::bare(job, JobStatus::DryRun);
        let mut cmd = shell(&job.command);
        cmd.current_dir(&job.workdir).stdin(Stdio::null());
        if let Some(sweep) = &self.capture {
            let base = job_name(sweep, &job.sim_id);
            let out = job.workdir.join(format!("{base}.out"));
            let err = job.workdir.join(format!("{base}.err"));
            match (File::create(&out), File::create(&err)) {
                (Ok(o), Ok(e)) => {
                    cmd.stdout(o).stderr(e);
                }
                (Err(e), _) | (_, Err(e)) => {
                    record.status = JobStatus::SpawnFailed {
                        reason: format!("cannot create output file: {e}"),
                    };
                    return record;
                }
            }
            record.stdout_path = Some(out);
            record.stderr_path = Some(err);
        }

        let started = Instant::now();
        record.started_at = Some(unix_now());
        let status = cmd.spawn().and_then(|mut child| child.wait());
        record.finished_at = Some(unix_now());
        record.duration = Some(started.elapsed().as_secs_f64());
        record.status = match status {
            Ok(status) => JobStatus::Completed {
                exit_code: exit_code(status),
            },
            Err(e) => JobStatus::SpawnFailed {
                reason: e.to_string(),
            },
        };
        record
    }
}

impl Dispatcher for LocalDispatcher {
    fn dispatch(&self, jobs: &[JobSpec]) -> Result<Vec<JobRecord>> {
        if self.max_parallel == 0 {
            return Err(Error::InvalidArgument(
                "max_parallel must be at least 1".into(),
            ));
        }
        let next = AtomicUsize::new(0);
        let (done_tx, done_rx) = mpsc::channel();
        let workers = self.max_parallel.min(jobs.len());
        std::thread::scope(|scope| {
            for _ in 0..workers {
                let done_tx = done_tx.clone();
                let next = &next;
                scope.spawn(move || loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(job) = jobs.get(i) else { break };
                    if done_tx.send(self.run_one(job)).is_err() {
                        break;
                    }
                });
            }
        });
        drop(done_tx);
        Ok(sorted(done_rx.into_iter().collect()))
    }
}

/// Script-and-submit back end for Slurm and PBS.
#[derive(Debug, Clone)]
pub struct BatchDispatcher {
    pub scheduler: Scheduler,
    pub sweep_name: String,
    pub submit_command: String,
    pub directives: Vec<String>,
    /// Write scripts only.
    pub dry_run: bool,
}

/// First whitespace-separated token that contains a digit.
///
/// Matches `Submitted batch job 1234` (Slurm) and `1234.server` (PBS).
pub fn parse_scheduler_job_id(stdout: &str) -> Option<&str> {
    stdout
        .split_whitespace()
        .find(|tok| tok.bytes().any(|b| b.is_ascii_digit()))
}

impl BatchDispatcher {
    fn script_path(&self, job: &JobSpec) -> PathBuf {
        job.script_path.clone().unwrap_or_else(|| {
            job.workdir
                .join(script_file_name(&self.sweep_name, &job.sim_id))
        })
    }

    fn submit(&self, job: &JobSpec, script: &Path) -> Result<String> {
        let scheduler_err = |message: String| Error::Scheduler {
            sim_id: job.sim_id.clone(),
            message,
        };
        let script_arg = script
            .file_name()
            .filter(|_| script.parent() == Some(job.workdir.as_path()))
            .map(PathBuf::from)
            .unwrap_or_else(|| script.to_path_buf());
        let output = shell(&format!("{} {}", self.submit_command, script_arg.display()))
            .current_dir(&job.workdir)
            .stdin(Stdio::null())
            .output()
            .map_err(|e| scheduler_err(format!("could not run `{}`: {e}", self.submit_command)))?;
        if !output.status.success() {
            return Err(scheduler_err(format!(
                "`{}` exited with code {}: {}",
                self.submit_command,
                exit_code(output.status),
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let stdout = String::from_utf8_lossy(&output.stdout);
        parse_scheduler_job_id(&stdout)
            .map(str::to_owned)
            .ok_or_else(|| scheduler_err(format!("no job id in submit output `{}`", stdout.trim())))
    }
}

impl Dispatcher for BatchDispatcher {
    fn dispatch(&self, jobs: &[JobSpec]) -> Result<Vec<JobRecord>> {
        let mut records = Vec::with_capacity(jobs.len());
        for job in jobs {
            let path = self.script_path(job);
            let text = batch_script(self.scheduler, job, &self.directives, &self.sweep_name);
            std::fs::write(&path, text)
                .map_err(|e| Error::io(format!("writing batch script {}", path.display()), e))?;
            let mut record = JobRecord::bare(job, JobStatus::DryRun);
            record.script_path = Some(path.clone());
            if !self.dry_run {
                record.started_at = Some(unix_now());
                let id = self.submit(job, &path)?;
                record.status = JobStatus::Submitted {
                    scheduler_job_id: id,
                };
            }
            records.push(record);
        }
        Ok(sorted(records))
    }
}

/// Picks the back end described by `config` and runs every job through it.
pub fn dispatch_all(
    jobs: &[JobSpec],
    config: &DispatcherConfig,
    sweep_name: &str,
) -> Result<Vec<JobRecord>> {
    config.validate()?;
    match config.kind {
        DispatcherKind::Dry => DryDispatcher.dispatch(jobs),
        DispatcherKind::Local if config.dry_run => DryDispatcher.dispatch(jobs),
        DispatcherKind::Local => LocalDispatcher {
            max_parallel: config.max_parallel,
            capture: config.capture.then(|| sweep_name.to_owned()),
        }
        .dispatch(jobs),
        DispatcherKind::Slurm | DispatcherKind::Pbs => {
            let scheduler = config.kind.scheduler().expect("scheduler kind");
            BatchDispatcher {
                scheduler,
                sweep_name: sweep_name.to_owned(),
                submit_command: config
                    .submit_command
                    .clone()
                    .unwrap_or_else(|| scheduler.default_submit_command().to_owned()),
                directives: config.directives.clone(),
                dry_run: config.dry_run,
            }
            .dispatch(jobs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(id: &str, command: &str) -> JobSpec {
        JobSpec::new(id, command, ".").unwrap()
    }

    #[test]
    fn job_spec_invariants() {
        assert!(JobSpec::new("0", "", ".").is_err());
        assert!(JobSpec::new("0", "./lorenz {sim_id}", ".").is_err());
    }

    #[test]
    fn slurm_script_layout() {
        let mut config = DispatcherConfig::new(DispatcherKind::Slurm);
        let script = render_batch_script(&job("000", "./lorenz 000"), &config, "lorenz").unwrap();
        assert_eq!(
            script,
            "#!/bin/sh\n#SBATCH --job-name=lorenz_000\n#SBATCH --output=lorenz_000.out\n\n./lorenz 000\n"
        );
        config.directives = vec!["--time=00:10:00".into()];
        let script = render_batch_script(&job("000", "./lorenz 000"), &config, "lorenz").unwrap();
        let lines: Vec<&str> = script.lines().collect();
        assert_eq!(
            lines,
            [
                "#!/bin/sh",
                "#SBATCH --job-name=lorenz_000",
                "#SBATCH --output=lorenz_000.out",
                "#SBATCH --time=00:10:00",
                "",
                "./lorenz 000"
            ]
        );
    }

    #[test]
    fn pbs_script_layout() {
        let mut config = DispatcherConfig::new(DispatcherKind::Pbs);
        config.directives = vec!["-l walltime=00:10:00".into()];
        let script = render_batch_script(&job("000", "./lorenz 000"), &config, "lorenz").unwrap();
        assert_eq!(
            script,
            "#!/bin/sh\n#PBS -N lorenz_000\n#PBS -o lorenz_000.out\n#PBS -l walltime=00:10:00\n\n./lorenz 000\n"
        );
        assert!(render_batch_script(
            &job("0", "x"),
            &DispatcherConfig::new(DispatcherKind::Local),
            "s"
        )
        .is_err());
    }

    #[test]
    fn job_id_heuristic() {
        assert_eq!(
            parse_scheduler_job_id("Submitted batch job 4242\n"),
            Some("4242")
        );
        assert_eq!(
            parse_scheduler_job_id("17.pbs-server\n"),
            Some("17.pbs-server")
        );
        assert_eq!(parse_scheduler_job_id("ok\n"), None);
    }

    #[test]
    fn dry_dispatch_touches_nothing() {
        let records = dispatch_all(
            &[job("000", "./lorenz 000")],
            &DispatcherConfig::new(DispatcherKind::Dry),
            "lorenz",
        )
        .unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].sim_id, "000");
        assert_eq!(records[0].status, JobStatus::DryRun);
    }

    #[test]
    fn rejects_zero_parallelism() {
        let mut config = DispatcherConfig::new(DispatcherKind::Local);
        config.max_parallel = 0;
        assert!(dispatch_all(&[job("0", "true")], &config, "s").is_err());
    }

    #[cfg(unix)]
    #[test]
    fn local_exit_codes_and_isolation() {
        let dir = tempfile::tempdir().unwrap();
        let jobs: Vec<JobSpec> = [("0", "exit 0"), ("1", "exit 3"), ("2", "touch ok_2")]
            .iter()
            .map(|(id, cmd)| JobSpec::new(*id, *cmd, dir.path()).unwrap())
            .collect();
        let mut config = DispatcherConfig::new(DispatcherKind::Local);
        config.max_parallel = 2;
        let records = dispatch_all(&jobs, &config, "s").unwrap();
        let statuses: Vec<&JobStatus> = records.iter().map(|r| &r.status).collect();
        assert_eq!(
            statuses,
            [
                &JobStatus::Completed { exit_code: 0 },
                &JobStatus::Completed { exit_code: 3 },
                &JobStatus::Completed { exit_code: 0 },
            ]
        );
        assert!(dir.path().join("ok_2").exists());
        assert!(records[1].failed());
        assert!(records.iter().all(|r| r.duration.is_some()));
    }

    #[cfg(unix)]
    #[test]
    fn capture_redirects_output() {
        let dir = tempfile::tempdir().unwrap();
        let jobs = [JobSpec::new("7", "echo hello; echo oops >&2", dir.path()).unwrap()];
        let mut config = DispatcherConfig::new(DispatcherKind::Local);
        config.capture = true;
        let records = dispatch_all(&jobs, &config, "sw").unwrap();
        assert!(records[0].succeeded());
        assert_eq!(
            std::fs::read_to_string(dir.path().join("sw_7.out")).unwrap(),
            "hello\n"
        );
        assert_eq!(
            std::fs::read_to_string(dir.path().join("sw_7.err")).unwrap(),
            "oops\n"
        );
    }

    #[cfg(unix)]
    #[test]
    fn missing_workdir_is_spawn_failure() {
        let jobs = [JobSpec::new("0", "true", "/nonexistent/dir/for/sure").unwrap()];
        let records =
            dispatch_all(&jobs, &DispatcherConfig::new(DispatcherKind::Local), "s").unwrap();
        assert!(matches!(records[0].status, JobStatus::SpawnFailed { .. }));
    }

    #[cfg(unix)]
    #[test]
    fn batch_submission_with_fake_scheduler() {
        let dir = tempfile::tempdir().unwrap();
        let fake = dir.path().join("fake_sbatch");
        std::fs::write(
            &fake,
            "#!/bin/sh\necho \"Submitted batch job 10$(basename $1 .sh | tr -dc 0-9)\"\n",
        )
        .unwrap();
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(&fake, std::fs::Permissions::from_mode(0o755)).unwrap();

        let jobs: Vec<JobSpec> = ["1", "0"]
            .iter()
            .map(|id| JobSpec::new(*id, format!("./model {id}"), dir.path()).unwrap())
            .collect();
        let mut config = DispatcherConfig::new(DispatcherKind::Slurm);
        config.submit_command = Some(fake.display().to_string());
        let records = dispatch_all(&jobs, &config, "sw").unwrap();
        assert_eq!(records[0].sim_id, "0");
        assert_eq!(
            records[0].status,
            JobStatus::Submitted {
                scheduler_job_id: "100".into()
            }
        );
        assert!(dir.path().join("sw_1.sh").exists());

        config.submit_command = Some("false".into());
        let err = dispatch_all(&jobs, &config, "sw").unwrap_err();
        assert!(matches!(err, Error::Scheduler { ref sim_id, .. } if sim_id == "1"));
    }
}
