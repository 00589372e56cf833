// Shared helpers for the integration and acceptance tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use paramsweep::{
    CartesianSweep, Distribution, ParameterSet, ParameterValue, RandomSweep, SetSweep,
    SweepDefinition,
};

pub const LORENZ_SPEC: &str = r#"{"type":"cartesian","parameters":{"beta":{"linspace":[2,4,3]},"sigma":{"linspace":[2,20,10]},"rho":{"linspace":[2,30,10]}}}"#;
pub const LORENZ_TEMPLATE: &str = "&params\nbeta = {beta},\nsigma = {sigma},\nrho = {rho}\n/\n";

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_paramsweep"))
}

/// Runs the CLI in `dir`.
pub fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("running paramsweep")
}

pub fn cli_env(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    Command::new(bin())
        .args(args)
        .envs(env.iter().copied())
        .current_dir(dir)
        .output()
        .expect("running paramsweep")
}

/// Stub model, the Lorenz sweep spec and the namelist template in `dir`.
pub fn lorenz_workspace(dir: &Path) {
    paramsweep::stub::write_stub_model(dir).unwrap();
    std::fs::write(dir.join("sweep.json"), LORENZ_SPEC).unwrap();
    std::fs::write(dir.join("template.txt"), LORENZ_TEMPLATE).unwrap();
}

pub fn count_files(dir: &Path, prefix: &str, suffix: &str) -> usize {
    std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| {
            let name = e.file_name();
            let name = name.to_string_lossy();
            name.starts_with(prefix) && name.ends_with(suffix)
        })
        .count()
}

/// SplitMix64, used only to generate test inputs.
pub struct Gen(u64);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n` (slightly biased, fine for test inputs).
    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as usize) as i64
    }

    pub fn coin(&mut self) -> bool {
        self.next() & 1 == 1
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

const NAMES: [&str; 5] = ["x", "y", "z", "w", "v"];

/// Distinct values of one kind: small integers, halves, or short words.
fn axis_values(g: &mut Gen, kind: usize, len: usize) -> Vec<ParameterValue> {
    let mut out: Vec<ParameterValue> = Vec::new();
    while out.len() < len {
        let v = match kind {
            0 => ParameterValue::Integer(g.range(-4, 4)),
            1 => ParameterValue::Real(g.range(-8, 8) as f64 * 0.5),
            _ => ParameterValue::Text(g.pick(&["a", "b", "c", "ab", "ba", "z"]).to_string()),
        };
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Grid of 1..=max_params parameters with 1..=max_len distinct values each.
/// Returns the axes and the kind of each axis (0 int, 1 real, 2 text).
pub fn random_grid(
    g: &mut Gen,
    max_params: usize,
    max_len: usize,
    allow_text: bool,
) -> (Vec<(String, Vec<ParameterValue>)>, Vec<usize>) {
    let n = 1 + g.below(max_params);
    let mut axes = Vec::new();
    let mut kinds = Vec::new();
    for name in &NAMES[..n] {
        let kind = g.below(if allow_text { 3 } else { 2 });
        let len = 1 + g.below(max_len);
        axes.push((name.to_string(), axis_values(g, kind, len)));
        kinds.push(kind);
    }
    (axes, kinds)
}

/// Independent enumeration: last axis fastest.
pub fn brute_force(axes: &[(String, Vec<ParameterValue>)]) -> Vec<ParameterSet> {
    let mut out = vec![ParameterSet::new()];
    for (name, values) in axes {
        let mut next = Vec::new();
        for prefix in &out {
            for v in values {
                let mut set = prefix.clone();
                set.push(name.clone(), v.clone()).unwrap();
                next.push(set);
            }
        }
        out = next;
    }
    out
}

fn numeric_term(g: &mut Gen, numeric: &[&str], depth: u32) -> String {
    if depth == 0 || g.below(3) == 0 {
        return match g.below(3) {
            0 if !numeric.is_empty() => g.pick(numeric).to_string(),
            1 => g.range(-3, 5).to_string(),
            _ => format!("{}.5", g.range(-2, 3)),
        };
    }
    let op = *g.pick(&["+", "-", "*", "/"]);
    let l = numeric_term(g, numeric, depth - 1);
    let r = numeric_term(g, numeric, depth - 1);
    match g.below(4) {
        0 => format!("-({l})"),
        1 => format!("({l} {op} {r})"),
        _ => format!("{l} {op} {r}"),
    }
}

fn predicate(g: &mut Gen, numeric: &[&str], text: &[&str], depth: u32) -> String {
    if depth == 0 || g.below(3) == 0 {
        if !text.is_empty() && g.below(3) == 0 {
            let op = *g.pick(&["<", "<=", ">", ">=", "==", "!="]);
            let lit = *g.pick(&["'a'", "'b'", "'ab'", "''"]);
            return format!("{} {op} {lit}", g.pick(text));
        }
        let op = *g.pick(&["<", "<=", ">", ">=", "==", "!="]);
        return format!(
            "{} {op} {}",
            numeric_term(g, numeric, 2),
            numeric_term(g, numeric, 2)
        );
    }
    match g.below(3) {
        0 => format!("not ({})", predicate(g, numeric, text, depth - 1)),
        1 => format!(
            "{} and {}",
            predicate(g, numeric, text, depth - 1),
            predicate(g, numeric, text, depth - 1)
        ),
        _ => format!(
            "({}) or {}",
            predicate(g, numeric, text, depth - 1),
            predicate(g, numeric, text, depth - 1)
        ),
    }
}

/// Random filter source over the given grid, built from the filter grammar.
pub fn random_filter(
    g: &mut Gen,
    axes: &[(String, Vec<ParameterValue>)],
    kinds: &[usize],
) -> String {
    let numeric: Vec<&str> = axes
        .iter()
        .zip(kinds)
        .filter(|(_, &k)| k < 2)
        .map(|(a, _)| a.0.as_str())
        .collect();
    let text: Vec<&str> = axes
        .iter()
        .zip(kinds)
        .filter(|(_, &k)| k == 2)
        .map(|(a, _)| a.0.as_str())
        .collect();
    predicate(g, &numeric, &text, 3)
}

/// A random valid sweep of the given type (0 cartesian, 1 filtered, 2 set, 3 random).
///
/// Filtered sweeps are retried until at least one set survives.
pub fn random_sweep(g: &mut Gen, kind: usize) -> SweepDefinition {
    match kind {
        0 => CartesianSweep::new(random_grid(g, 4, 4, true).0)
            .unwrap()
            .into(),
        1 => loop {
            let (axes, kinds) = random_grid(g, 3, 4, true);
            let filter = random_filter(g, &axes, &kinds);
            let sweep: SweepDefinition =
                paramsweep::FilteredSweep::with_source(CartesianSweep::new(axes).unwrap(), &filter)
                    .unwrap()
                    .into();
            if sweep.generate().is_ok() {
                break sweep;
            }
        },
        2 => {
            let (axes, _) = random_grid(g, 3, 4, true);
            let mut all = brute_force(&axes);
            let keep = 1 + g.below(all.len());
            let mut sets = Vec::new();
            for _ in 0..keep {
                sets.push(all.remove(g.below(all.len())));
            }
            SetSweep::new(sets).unwrap().into()
        }
        _ => {
            let count = 1 + g.below(60);
            let mut dists = vec![(
                "x".to_string(),
                Distribution::uniform(-1.0 - g.below(5) as f64, 1.0 + g.below(5) as f64).unwrap(),
            )];
            if g.coin() {
                dists.push((
                    "n".into(),
                    Distribution::integer_uniform(-5, g.range(-5, 50)).unwrap(),
                ));
            }
            if g.coin() {
                dists.push((
                    "m".into(),
                    Distribution::normal(g.range(-3, 3) as f64, 0.5).unwrap(),
                ));
            }
            if g.coin() {
                dists.push(("r".into(), Distribution::log_uniform(1e-3, 10.0).unwrap()));
            }
            if g.coin() {
                let options = vec![
                    ParameterValue::Text("a".into()),
                    ParameterValue::Integer(3),
                    ParameterValue::Real(0.25),
                ];
                dists.push(("s".into(), Distribution::choice(options).unwrap()));
            }
            RandomSweep::new(count, dists, g.next()).unwrap().into()
        }
    }
}
