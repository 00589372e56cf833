//! Harvesting one scalar per simulation into the mapping's layout.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mapping::SweepMapping;
use crate::template::Template;
use crate::value::{format_real, format_value, ParameterSet, SIM_ID};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemKind {
    Missing,
    Unparseable { detail: String },
}

/// One simulation whose output could not be harvested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollectProblem {
    pub sim_id: String,
    pub path: PathBuf,
    #[serde(flatten)]
    pub kind: ProblemKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollectReport {
    pub total: usize,
    pub collected: usize,
    pub problems: Vec<CollectProblem>,
}

impl CollectReport {
    pub fn is_complete(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn missing_ids(&self) -> Vec<&str> {
        self.problems.iter().map(|p| p.sim_id.as_str()).collect()
    }
}

/// Scalar results laid out like the mapping they came from.
///
/// `values[k]` belongs to the `k`-th simulation in mapping order; `None`
/// marks an output that was missing or unreadable.
#[derive(Debug, Clone, PartialEq)]
pub struct Collected {
    mapping: SweepMapping,
    values: Vec<Option<f64>>,
    report: CollectReport,
}

impl Collected {
    pub fn mapping(&self) -> &SweepMapping {
        &self.mapping
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn report(&self) -> &CollectReport {
        &self.report
    }

    pub fn is_complete(&self) -> bool {
        self.report.is_complete()
    }

    pub fn value(&self, sim_id: &str) -> Option<f64> {
        self.mapping.position(sim_id).and_then(|k| self.values[k])
    }

    /// Value at a multi-index of a Cartesian result.
    pub fn get(&self, index: &[usize]) -> Option<f64> {
        match &self.mapping {
            SweepMapping::Cartesian(m) => m.flat_index(index).and_then(|k| self.values[k]),
            SweepMapping::Association(_) => None,
        }
    }

    /// `(sim_id, parameters, value)` rows in mapping order.
    pub fn rows(&self) -> Vec<(&str, ParameterSet, Option<f64>)> {
        self.mapping
            .entries()
            .into_iter()
            .zip(&self.values)
            .map(|((id, set), v)| (id, set, *v))
            .collect()
    }

    /// CSV with one column per parameter plus `value`; missing values are
    /// empty fields.
    pub fn to_csv(&self) -> String {
        export_csv(self)
    }
}

/// Reads the first whitespace-delimited token as a real.
///
/// Fortran `D` exponents (`1.5D+00`) are accepted.
pub fn parse_scalar(text: &str) -> std::result::Result<f64, String> {
    let token = text
        .split_whitespace()
        .next()
        .ok_or_else(|| "file is empty".to_owned())?;
    token
        .parse::<f64>()
        .or_else(|_| token.replace(['D', 'd'], "e").parse::<f64>())
        .map_err(|_| format!("`{token}` is not a number"))
}

/// Reads one scalar per simulation from `output_pattern` (relative to
/// `base_dir`), with `{sim_id}` substituted.
///
/// Missing or unreadable outputs do not abort collection; they are left as
/// `None` and listed in the report.
pub fn collect_scalars(
    mapping: &SweepMapping,
    output_pattern: &str,
    base_dir: &Path,
) -> Result<Collected> {
    let pattern = Template::parse(output_pattern)?;
    if !pattern.uses_sim_id() {
        return Err(Error::Usage(format!(
            "output pattern `{output_pattern}` must contain {{{SIM_ID}}}"
        )));
    }
    let empty = ParameterSet::new();
    let mut values = Vec::with_capacity(mapping.len());
    let mut problems = Vec::new();
    for id in mapping.sim_ids() {
        let path = base_dir.join(pattern.render(&empty, id)?);
        let outcome = match std::fs::read_to_string(&path) {
            Ok(text) => parse_scalar(&text).map_err(|detail| ProblemKind::Unparseable { detail }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(ProblemKind::Missing),
            Err(e) => Err(ProblemKind::Unparseable {
                detail: e.to_string(),
            }),
        };
        match outcome {
            Ok(v) => values.push(Some(v)),
            Err(kind) => {
                values.push(None);
                problems.push(CollectProblem {
                    sim_id: id.to_owned(),
                    path,
                    kind,
                });
            }
        }
    }
    let report = CollectReport {
        total: values.len(),
        collected: values.len() - problems.len(),
        problems,
    };
    Ok(Collected {
        mapping: mapping.clone(),
        values,
        report,
    })
}

/// Renders collected results as CSV: `param1,...,paramN,value`.
pub fn export_csv(collected: &Collected) -> String {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header: Vec<&str> = collected
        .mapping
        .parameter_names()
        .iter()
        .map(String::as_str)
        .collect();
    header.push("value");
    writer.write_record(&header).expect("writing to memory");
    for (_, set, value) in collected.rows() {
        let mut record: Vec<String> = set.values().map(format_value).collect();
        record.push(value.map(format_real).unwrap_or_default());
        writer.write_record(&record).expect("writing to memory");
    }
    let bytes = writer.into_inner().expect("flushing to memory");
    String::from_utf8(bytes).expect("csv output is utf-8")
}
