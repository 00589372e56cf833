//! JSON sweep-specification files.
//!
//! ```json
//! {"type": "cartesian",
//!  "parameters": {"beta": {"linspace": [2, 4, 3]}, "mode": ["fast", "slow"]}}
//!
//! {"type": "filtered", "parameters": {"x": [1, 2], "y": [1, 2]}, "filter": "x > y"}
//!
//! {"type": "set", "sets": [{"x": 1, "y": 2}, {"x": 3, "y": 4}]}
//!
//! {"type": "random", "count": 100, "seed": 42,
//!  "distributions": {"x": {"uniform": [0, 1]}, "n": {"int_uniform": [1, 10]},
//!                    "m": {"normal": [0, 1]}, "s": {"choice": ["a", "b"]},
//!                    "r": {"log_uniform": [0.001, 1]}}}
//! ```
//!
//! Parameter values may be a plain array, `{"values": [...]}` or
//! `{"linspace": [start, stop, count]}`. JSON integers are integer
//! parameters; numbers with a fraction or exponent are reals. A `cartesian`
//! spec that carries a `filter` is treated as `filtered`. Object key order
//! is the declaration order.

use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::mapping::value_from_json;
use crate::random::Distribution;
use crate::sweep::{
    linspace, CartesianSweep, FilteredSweep, RandomSweep, SetSweep, SweepDefinition,
};
use crate::value::{ParameterSet, ParameterValue};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSweep(msg.into())
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| invalid(format!("{what} must be a JSON object")))
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(invalid(format!("unknown key `{k}` in {what}"))),
        None => Ok(()),
    }
}

fn value(v: &Value) -> Result<ParameterValue> {
    value_from_json(v).map_err(|e| invalid(e.to_string()))
}

fn number(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .filter(|f| f.is_finite())
        .ok_or_else(|| invalid(format!("{what} must be a finite number")))
}

fn integer(v: &Value, what: &str) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| invalid(format!("{what} must be an integer")))
}

fn args<'a>(v: &'a Value, n: usize, what: &str) -> Result<&'a [Value]> {
    match v.as_array() {
        Some(a) if a.len() == n => Ok(a),
        _ => Err(invalid(format!("{what} takes an array of {n} numbers"))),
    }
}

fn parameter_values(name: &str, spec: &Value) -> Result<Vec<ParameterValue>> {
    let list = match spec {
        Value::Array(items) => items,
        Value::Object(obj) if obj.len() == 1 => {
            let (key, arg) = obj.iter().next().expect("one entry");
            match key.as_str() {
                "values" => arg
                    .as_array()
                    .ok_or_else(|| invalid(format!("`values` of `{name}` must be an array")))?,
                "linspace" => {
                    let a = args(arg, 3, &format!("linspace of `{name}`"))?;
                    let count = a[2]
                        .as_u64()
                        .ok_or_else(|| invalid(format!("linspace count of `{name}` must be a positive integer")))?;
                    let start = number(&a[0], "linspace start")?;
                    let stop = number(&a[1], "linspace stop")?;
                    return linspace(start, stop, count as usize)
                        .map_err(|e| invalid(format!("`{name}`: {e}")))
                        .map(|v| v.into_iter().map(ParameterValue::Real).collect());
                }
                other => return Err(invalid(format!("unknown value generator `{other}` for `{name}`"))),
            }
        }
        _ => {
            return Err(invalid(format!(
                "`{name}` needs an array of values, {{\"values\": [...]}} or {{\"linspace\": [start, stop, count]}}"
            )))
        }
    };
    list.iter().map(value).collect()
}

fn distribution(name: &str, spec: &Value) -> Result<Distribution> {
    let obj = as_object(spec, &format!("distribution of `{name}`"))?;
    if obj.len() != 1 {
        return Err(invalid(format!(
            "distribution of `{name}` must have exactly one key"
        )));
    }
    let (key, arg) = obj.iter().next().expect("one entry");
    let what = format!("{key} of `{name}`");
    match key.as_str() {
        "uniform" => {
            let a = args(arg, 2, &what)?;
            Distribution::uniform(number(&a[0], &what)?, number(&a[1], &what)?)
        }
        "log_uniform" => {
            let a = args(arg, 2, &what)?;
            Distribution::log_uniform(number(&a[0], &what)?, number(&a[1], &what)?)
        }
        "normal" => {
            let a = args(arg, 2, &what)?;
            Distribution::normal(number(&a[0], &what)?, number(&a[1], &what)?)
        }
        "int_uniform" => {
            let a = args(arg, 2, &what)?;
            Distribution::integer_uniform(integer(&a[0], &what)?, integer(&a[1], &what)?)
        }
        "choice" => {
            let options = arg
                .as_array()
                .ok_or_else(|| invalid(format!("{what} takes an array of options")))?
                .iter()
                .map(value)
                .collect::<Result<Vec<_>>>()?;
            Distribution::choice(options)
        }
        other => Err(invalid(format!(
            "unknown distribution `{other}` for `{name}`"
        ))),
    }
}

fn grid(obj: &Map<String, Value>) -> Result<CartesianSweep> {
    let params = as_object(
        obj.get("parameters")
            .ok_or_else(|| invalid("sweep needs `parameters`"))?,
        "`parameters`",
    )?;
    let axes = params
        .iter()
        .map(|(name, spec)| Ok((name.clone(), parameter_values(name, spec)?)))
        .collect::<Result<Vec<_>>>()?;
    CartesianSweep::new(axes)
}

/// Parses a sweep specification. `seed_override` replaces a random sweep's
/// seed (and supplies it when the file has none).
pub fn parse_sweep_spec(text: &str, seed_override: Option<u64>) -> Result<SweepDefinition> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| invalid(format!("sweep file is not valid JSON: {e}")))?;
    let obj = as_object(&doc, "sweep specification")?;
    let kind = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| invalid("sweep specification needs a string `type`"))?;
    match kind {
        "cartesian" | "filtered" | "filtered_cartesian" => {
            check_keys(obj, &["type", "parameters", "filter"], "cartesian sweep")?;
            let grid = grid(obj)?;
            match obj.get("filter") {
                Some(filter) => {
                    let source = filter
                        .as_str()
                        .ok_or_else(|| invalid("`filter` must be a string"))?;
                    Ok(FilteredSweep::with_source(grid, source)?.into())
                }
                None if kind == "cartesian" => Ok(grid.into()),
                None => Err(invalid("filtered sweep needs a `filter`")),
            }
        }
        "set" => {
            check_keys(obj, &["type", "sets"], "set sweep")?;
            let sets = obj
                .get("sets")
                .and_then(Value::as_array)
                .ok_or_else(|| invalid("set sweep needs a `sets` array"))?
                .iter()
                .enumerate()
                .map(|(i, entry)| {
                    let entry = as_object(entry, &format!("set {i}"))?;
                    let mut set = ParameterSet::new();
                    for (name, v) in entry {
                        set.push(name.clone(), value(v)?)?;
                    }
                    Ok(set)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SetSweep::new(sets)?.into())
        }
        "random" => {
            check_keys(
                obj,
                &["type", "count", "seed", "distributions"],
                "random sweep",
            )?;
            let count = obj
                .get("count")
                .and_then(Value::as_u64)
                .ok_or_else(|| invalid("random sweep needs a positive integer `count`"))?;
            let seed = match (seed_override, obj.get("seed")) {
                (Some(seed), _) => seed,
                (None, Some(v)) => v
                    .as_u64()
                    .ok_or_else(|| invalid("`seed` must be an unsigned 64-bit integer"))?,
                (None, None) => {
                    return Err(invalid(
                        "random sweep needs a `seed` (or pass one explicitly)",
                    ))
                }
            };
            let dists = as_object(
                obj.get("distributions")
                    .ok_or_else(|| invalid("random sweep needs `distributions`"))?,
                "`distributions`",
            )?
            .iter()
            .map(|(name, spec)| Ok((name.clone(), distribution(name, spec)?)))
            .collect::<Result<Vec<_>>>()?;
            Ok(RandomSweep::new(count as usize, dists, seed)?.into())
        }
        other => Err(invalid(format!(
            "unknown sweep type `{other}` (expected cartesian, filtered, set or random)"
        ))),
    }
}

pub fn read_sweep_file(
    path: impl AsRef<Path>,
    seed_override: Option<u64>,
) -> Result<SweepDefinition> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading sweep file {}", path.display()), e))?;
    parse_sweep_spec(&text, seed_override)
}
