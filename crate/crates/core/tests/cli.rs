#![cfg(unix)]

mod common;

use std::path::Path;

use common::*;
use paramsweep::SweepMapping;

fn stderr(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn is_empty_dir(dir: &Path, except: &[&str]) -> bool {
    std::fs::read_dir(dir)
        .unwrap()
        .all(|e| except.contains(&e.unwrap().file_name().to_str().unwrap()))
}

#[test]
fn preview_lorenz_spec() {
    let dir = tempfile::tempdir().unwrap();
    lorenz_workspace(dir.path());
    let out = cli(
        dir.path(),
        &["preview", "--sweep-file", "sweep.json", "--limit", "2"],
    );
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "cartesian, 3 parameters, 300 simulations\n\
         parameters: beta, sigma, rho\n\
         000  {beta: 2.0, sigma: 2.0, rho: 2.0}\n\
         001  {beta: 2.0, sigma: 2.0, rho: 5.111111111111111}\n\
         ... 298 more\n"
    );
    assert!(is_empty_dir(
        dir.path(),
        &["sweep.json", "template.txt", "stub_model"]
    ));
}

#[test]
fn preview_filtered_and_set() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("f.json"),
        r#"{"type":"filtered","parameters":{"x":[1,2],"y":[1,2]},"filter":"x > y"}"#,
    )
    .unwrap();
    let out = cli(d, &["preview", "--sweep-file", "f.json"]);
    assert_eq!(
        stdout(&out),
        "filtered, 2 parameters, 1 simulation\nparameters: x, y\n0  {x: 2, y: 1}\n"
    );

    std::fs::write(
        d.join("s.json"),
        r#"{"type":"set","sets":[{"x":1,"s":"a"},{"x":2.5,"s":"b"}]}"#,
    )
    .unwrap();
    let out = cli(
        d,
        &["preview", "--sweep-file", "s.json", "--id-prefix", "run_"],
    );
    assert_eq!(
        stdout(&out),
        "set, 2 parameters, 2 simulations\nparameters: x, s\nrun_0  {x: 1, s: 'a'}\nrun_1  {x: 2.5, s: 'b'}\n"
    );
}

#[test]
fn preview_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("r.json"),
        r#"{"type":"random","count":3,"seed":1,"distributions":{"x":{"uniform":[0,1]}}}"#,
    )
    .unwrap();
    let a = stdout(&cli(d, &["preview", "--sweep-file", "r.json"]));
    let b = stdout(&cli(
        d,
        &["preview", "--sweep-file", "r.json", "--seed", "1"],
    ));
    let c = stdout(&cli(
        d,
        &["preview", "--sweep-file", "r.json", "--seed", "2"],
    ));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn dry_run_writes_files_but_starts_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    lorenz_workspace(d);
    let out = cli(
        d,
        &[
            "run",
            "--command",
            "touch spawned; ./stub_model {sim_id}",
            "--config",
            "params_{sim_id}.nml",
            "--template",
            "template.txt",
            "--sweep-file",
            "sweep.json",
            "--dry-run",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(count_files(d, "params_", ".nml"), 300);
    assert_eq!(count_files(d, "results_", ".txt"), 0);
    assert!(!d.join("spawned").exists());
    let mapping = SweepMapping::read_file(d.join("sweep_mapping.json")).unwrap();
    assert_eq!(mapping.len(), 300);
    assert_eq!(
        std::fs::read_to_string(d.join("params_000.nml")).unwrap(),
        "&params\nbeta = 2.0,\nsigma = 2.0,\nrho = 2.0\n/\n"
    );
}

#[test]
fn usage_errors_exit_one_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    lorenz_workspace(d);
    let base = ["--sweep-file", "sweep.json", "--template", "template.txt"];
    for extra in [
        vec![
            "--command",
            "./stub_model",
            "--config",
            "params_{sim_id}.nml",
        ],
        vec![
            "--command",
            "./stub_model {sim_id}",
            "--config",
            "params.nml",
        ],
        vec!["--command", "./stub_model {sim_id}"],
        vec![
            "--command",
            "./stub_model {sim_id}",
            "--config",
            "params_{sim_id}.nml",
            "--max-parallel",
            "0",
        ],
        vec![
            "--command",
            "./stub_model {sim_id}",
            "--config",
            "params_{sim_id}.nml",
            "--dispatcher",
            "sge",
        ],
    ] {
        let mut args = vec!["run"];
        args.extend(base);
        args.extend(&extra);
        let out = cli(d, &args);
        assert_eq!(out.status.code(), Some(1), "{extra:?}: {}", stderr(&out));
        assert!(
            is_empty_dir(d, &["sweep.json", "template.txt", "stub_model"]),
            "{extra:?} wrote files"
        );
    }
    std::fs::write(
        d.join("bad.json"),
        r#"{"type":"filtered","parameters":{"x":[1]},"filter":"x >"}"#,
    )
    .unwrap();
    let out = cli(
        d,
        &["run", "--command", "m {sim_id}", "--sweep-file", "bad.json"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("offset 3"), "{}", stderr(&out));
}

#[test]
fn second_run_needs_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    lorenz_workspace(d);
    let args = [
        "run",
        "--command",
        "./stub_model {sim_id}",
        "--config",
        "params_{sim_id}.nml",
        "--template",
        "template.txt",
        "--sweep-file",
        "sweep.json",
        "--dispatcher",
        "dry",
    ];
    assert!(cli(d, &args).status.success());
    let out = cli(d, &args);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("params_000.nml"));
    let mut again = args.to_vec();
    again.push("--overwrite");
    assert!(cli(d, &again).status.success());
}

#[test]
fn submit_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("set.json"),
        r#"{"type":"set","sets":[{"x":1},{"x":2}]}"#,
    )
    .unwrap();
    let out = cli(
        d,
        &[
            "run",
            "--command",
            "./model {sim_id} {x}",
            "--sweep-file",
            "set.json",
            "--dispatcher",
            "slurm",
            "--submit-command",
            "false",
        ],
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("simulation 0"));
}

#[test]
fn fake_scheduler_submission() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("set.json"),
        r#"{"type":"set","sets":[{"x":1},{"x":2}]}"#,
    )
    .unwrap();
    std::fs::write(
        d.join("fake_qsub"),
        "#!/bin/sh\necho \"$1\" >> submitted\necho 4242.pbs-server\n",
    )
    .unwrap();
    std::process::Command::new("chmod")
        .arg("+x")
        .arg(d.join("fake_qsub"))
        .status()
        .unwrap();
    let out = cli(
        d,
        &[
            "run",
            "--command",
            "./model {sim_id} {x}",
            "--sweep-file",
            "set.json",
            "--dispatcher",
            "pbs",
            "--submit-command",
            "./fake_qsub",
            "--name",
            "job",
            "--directive",
            "-l walltime=00:01:00",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        std::fs::read_to_string(d.join("submitted")).unwrap(),
        "job_0.sh\njob_1.sh\n"
    );
    assert_eq!(
        std::fs::read_to_string(d.join("job_1.sh")).unwrap(),
        "#!/bin/sh\n#PBS -N job_1\n#PBS -o job_1.out\n#PBS -l walltime=00:01:00\n\n./model 1 2\n"
    );
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("job_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["counts"]["submitted"], 2);
    assert_eq!(
        summary["records"][0]["status"]["scheduler_job_id"],
        "4242.pbs-server"
    );
}

fn ab_workspace(d: &Path) {
    std::fs::write(
        d.join("ab.json"),
        r#"{"type":"cartesian","parameters":{"a":[1,2],"b":[10]}}"#,
    )
    .unwrap();
    let out = cli(
        d,
        &[
            "run",
            "--command",
            "true {sim_id}",
            "--sweep-file",
            "ab.json",
            "--dispatcher",
            "dry",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    std::fs::write(d.join("results_0.txt"), "0.5\n").unwrap();
}

#[test]
fn collect_command_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ab_workspace(d);
    std::fs::write(d.join("results_1.txt"), "-0.25\n").unwrap();
    let out = cli(
        d,
        &[
            "collect",
            "--mapping",
            "sweep_mapping.json",
            "--csv-out",
            "out.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        std::fs::read_to_string(d.join("out.csv")).unwrap(),
        "a,b,value\n1,10,0.5\n2,10,-0.25\n"
    );
}

#[test]
fn collect_with_missing_result() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ab_workspace(d);
    let out = cli(
        d,
        &[
            "collect",
            "--mapping",
            "sweep_mapping.json",
            "--report",
            "report.json",
        ],
    );
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stdout(&out), "a,b,value\n1,10,0.5\n2,10,\n");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["problems"][0]["sim_id"], "1");
    assert_eq!(report["report"]["problems"][0]["kind"], "missing");
}

#[test]
fn collect_rejects_unknown_schema() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("m.json"),
        r#"{"schema":"sweep-mapping/2","kind":"association","sweep_name":"s","parameter_names":["x"],"assignments":{"0":{"x":1}}}"#,
    )
    .unwrap();
    let out = cli(d, &["collect", "--mapping", "m.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("sweep-mapping/2"), "{}", stderr(&out));
}

#[test]
fn run_with_collect_flag() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    paramsweep::stub::write_stub_model(d).unwrap();
    std::fs::write(
        d.join("s.json"),
        r#"{"type":"set","sets":[{"a":1,"b":0.5},{"a":2,"b":0.25}]}"#,
    )
    .unwrap();
    std::fs::write(d.join("t.txt"), "a = {a}\nb = {b}\n").unwrap();
    let args = [
        "run",
        "--command",
        "./stub_model {sim_id}",
        "--config",
        "params_{sim_id}.nml",
        "--template",
        "t.txt",
        "--sweep-file",
        "s.json",
        "--collect",
        "results_{sim_id}.txt",
        "--capture",
    ];
    let out = cli(d, &args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("sweep_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["collection"]["collected"], 2);
    assert!(d.join("sweep_0.out").exists() && d.join("sweep_1.err").exists());

    // A model that writes nothing leaves the collection incomplete.
    let out = cli(
        d,
        &[
            "run",
            "--command",
            "true {sim_id}",
            "--config",
            "params_{sim_id}.nml",
            "--template",
            "t.txt",
            "--sweep-file",
            "s.json",
            "--collect",
            "missing_{sim_id}.txt",
            "--overwrite",
        ],
    );
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn mismatched_config_and_template_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    lorenz_workspace(d);
    let out = cli(
        d,
        &[
            "run",
            "--command",
            "./stub_model {sim_id}",
            "--config",
            "a_{sim_id}",
            "--config",
            "b_{sim_id}",
            "--template",
            "template.txt",
            "--sweep-file",
            "sweep.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("pair up"));
}
