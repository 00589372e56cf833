//! Mapping between simulation IDs and parameter sets.
//!
//! Cartesian sweeps map naturally onto an n-dimensional labeled array: one
//! dimension per parameter, the parameter's values as coordinates, and the
//! simulation IDs as the data (row-major, last dimension fastest). Every
//! other sweep type gets a plain ID → parameter set table.
//!
//! Both kinds serialize to one JSON document tagged `"sweep-mapping/1"`:
//!
//! ```json
//! {"schema": "sweep-mapping/1", "kind": "cartesian", "sweep_name": "lorenz",
//!  "dims": ["a", "b"], "coords": {"a": [1, 2], "b": [10]}, "shape": [2, 1],
//!  "sim_ids": ["0", "1"]}
//!
//! {"schema": "sweep-mapping/1", "kind": "association", "sweep_name": "s",
//!  "parameter_names": ["x", "y"], "assignments": {"0": {"x": 2, "y": 1}}}
//! ```
//!
//! Integers are written as JSON integers and reals always with a decimal
//! point or exponent, so the value type survives a round trip.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::sweep::SweepDefinition;
use crate::value::{is_identifier, ParameterSet, ParameterValue};

pub const MAPPING_SCHEMA: &str = "sweep-mapping/1";

fn is_valid_sim_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

fn check_ids(ids: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if !is_valid_sim_id(id) {
            return Err(Error::Parse(format!("invalid simulation id `{id}`")));
        }
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::Parse(format!(
                "simulation id `{id}` appears more than once"
            )));
        }
    }
    Ok(index)
}

/// Labeled n-dimensional array of simulation IDs.
#[derive(Debug, Clone)]
pub struct CartesianMapping {
    sweep_name: String,
    dims: Vec<String>,
    coords: Vec<Vec<ParameterValue>>,
    shape: Vec<usize>,
    sim_ids: Vec<String>,
    by_id: HashMap<String, usize>,
}

impl PartialEq for CartesianMapping {
    fn eq(&self, other: &Self) -> bool {
        self.sweep_name == other.sweep_name
            && self.dims == other.dims
            && self.coords == other.coords
            && self.sim_ids == other.sim_ids
    }
}

impl CartesianMapping {
    /// `coords[k]` holds the coordinate values of `dims[k]`; `sim_ids` is
    /// row-major.
    pub fn new(
        sweep_name: impl Into<String>,
        dims: Vec<String>,
        coords: Vec<Vec<ParameterValue>>,
        sim_ids: Vec<String>,
    ) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Parse("mapping needs at least one dimension".into()));
        }
        if dims.len() != coords.len() {
            return Err(Error::Parse(format!(
                "{} dims but {} coordinate lists",
                dims.len(),
                coords.len()
            )));
        }
        let mut seen = HashSet::new();
        for (dim, values) in dims.iter().zip(&coords) {
            if !is_identifier(dim) || !seen.insert(dim.as_str()) {
                return Err(Error::Parse(format!(
                    "invalid or duplicate dimension `{dim}`"
                )));
            }
            if values.is_empty() {
                return Err(Error::Parse(format!(
                    "dimension `{dim}` has no coordinates"
                )));
            }
            let distinct: HashSet<&ParameterValue> = values.iter().collect();
            if distinct.len() != values.len() {
                return Err(Error::Parse(format!(
                    "dimension `{dim}` repeats a coordinate"
                )));
            }
        }
        let shape: Vec<usize> = coords.iter().map(Vec::len).collect();
        let size = shape
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::Parse("shape overflows".into()))?;
        if size != sim_ids.len() {
            return Err(Error::Parse(format!(
                "shape {shape:?} holds {size} cells but {} sim_ids were given",
                sim_ids.len()
            )));
        }
        let by_id = check_ids(&sim_ids)?;
        Ok(CartesianMapping {
            sweep_name: sweep_name.into(),
            dims,
            coords,
            shape,
            sim_ids,
            by_id,
        })
    }

    pub fn sweep_name(&self) -> &str {
        &self.sweep_name
    }

    pub fn dims(&self) -> &[String] {
        &self.dims
    }

    /// Coordinates of dimension `dim`.
    pub fn coords(&self, dim: &str) -> Option<&[ParameterValue]> {
        let k = self.dims.iter().position(|d| d == dim)?;
        Some(&self.coords[k])
    }

    pub fn coords_by_axis(&self) -> &[Vec<ParameterValue>] {
        &self.coords
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn sim_ids(&self) -> &[String] {
        &self.sim_ids
    }

    /// Row-major flat offset of a multi-index.
    pub fn flat_index(&self, index: &[usize]) -> Option<usize> {
        if index.len() != self.shape.len() {
            return None;
        }
        let mut flat = 0;
        for (&i, &n) in index.iter().zip(&self.shape) {
            if i >= n {
                return None;
            }
            flat = flat * n + i;
        }
        Some(flat)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut index = vec![0; self.shape.len()];
        for (slot, &n) in index.iter_mut().zip(&self.shape).rev() {
            *slot = flat % n;
            flat /= n;
        }
        index
    }

    /// Simulation ID at a multi-index.
    pub fn get(&self, index: &[usize]) -> Option<&str> {
        self.flat_index(index).map(|k| self.sim_ids[k].as_str())
    }

    fn set_at(&self, flat: usize) -> ParameterSet {
        let mut set = ParameterSet::new();
        for ((dim, values), i) in self
            .dims
            .iter()
            .zip(&self.coords)
            .zip(self.multi_index(flat))
        {
            set.push_unchecked(dim.clone(), values[i].clone());
        }
        set
    }
}

/// Plain table from simulation ID to parameter set.
#[derive(Debug, Clone)]
pub struct AssociationMapping {
    sweep_name: String,
    parameter_names: Vec<String>,
    assignments: Vec<(String, ParameterSet)>,
    by_id: HashMap<String, usize>,
}

impl PartialEq for AssociationMapping {
    fn eq(&self, other: &Self) -> bool {
        self.sweep_name == other.sweep_name
            && self.parameter_names == other.parameter_names
            && self.assignments == other.assignments
    }
}

impl AssociationMapping {
    pub fn new(
        sweep_name: impl Into<String>,
        assignments: Vec<(String, ParameterSet)>,
    ) -> Result<Self> {
        let first = assignments
            .first()
            .ok_or_else(|| Error::Parse("mapping has no assignments".into()))?;
        let parameter_names: Vec<String> = first.1.names().map(str::to_owned).collect();
        if parameter_names.is_empty() {
            return Err(Error::Parse("mapping has no parameters".into()));
        }
        for (id, set) in &assignments {
            if !set.names().eq(parameter_names.iter().map(String::as_str)) {
                return Err(Error::Parse(format!(
                    "simulation `{id}` has a different parameter list than the rest"
                )));
            }
        }
        let ids: Vec<String> = assignments.iter().map(|(id, _)| id.clone()).collect();
        let by_id = check_ids(&ids)?;
        Ok(AssociationMapping {
            sweep_name: sweep_name.into(),
            parameter_names,
            assignments,
            by_id,
        })
    }

    pub fn sweep_name(&self) -> &str {
        &self.sweep_name
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.parameter_names
    }

    pub fn assignments(&self) -> &[(String, ParameterSet)] {
        &self.assignments
    }
}

/// Either mapping kind.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepMapping {
    Cartesian(CartesianMapping),
    Association(AssociationMapping),
}

impl SweepMapping {
    pub fn kind(&self) -> &'static str {
        match self {
            SweepMapping::Cartesian(_) => "cartesian",
            SweepMapping::Association(_) => "association",
        }
    }

    pub fn sweep_name(&self) -> &str {
        match self {
            SweepMapping::Cartesian(m) => m.sweep_name(),
            SweepMapping::Association(m) => m.sweep_name(),
        }
    }

    pub fn parameter_names(&self) -> &[String] {
        match self {
            SweepMapping::Cartesian(m) => m.dims(),
            SweepMapping::Association(m) => m.parameter_names(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SweepMapping::Cartesian(m) => m.sim_ids.len(),
            SweepMapping::Association(m) => m.assignments.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Simulation IDs in mapping order.
    pub fn sim_ids(&self) -> Vec<&str> {
        match self {
            SweepMapping::Cartesian(m) => m.sim_ids.iter().map(String::as_str).collect(),
            SweepMapping::Association(m) => {
                m.assignments.iter().map(|(id, _)| id.as_str()).collect()
            }
        }
    }

    /// `(sim_id, parameter set)` pairs in mapping order.
    pub fn entries(&self) -> Vec<(&str, ParameterSet)> {
        match self {
            SweepMapping::Cartesian(m) => m
                .sim_ids
                .iter()
                .enumerate()
                .map(|(k, id)| (id.as_str(), m.set_at(k)))
                .collect(),
            SweepMapping::Association(m) => m
                .assignments
                .iter()
                .map(|(id, set)| (id.as_str(), set.clone()))
                .collect(),
        }
    }

    /// Position of `sim_id` in mapping order.
    pub fn position(&self, sim_id: &str) -> Option<usize> {
        match self {
            SweepMapping::Cartesian(m) => m.by_id.get(sim_id).copied(),
            SweepMapping::Association(m) => m.by_id.get(sim_id).copied(),
        }
    }

    /// The parameter set dispatched under `sim_id`.
    pub fn lookup_by_id(&self, sim_id: &str) -> Result<ParameterSet> {
        let k = self
            .position(sim_id)
            .ok_or_else(|| Error::UnknownSimId(sim_id.to_owned()))?;
        Ok(match self {
            SweepMapping::Cartesian(m) => m.set_at(k),
            SweepMapping::Association(m) => m.assignments[k].1.clone(),
        })
    }

    /// The simulation ID whose parameter set equals `params`.
    ///
    /// Names may be given in any order but must match the sweep's names
    /// exactly. Random sweeps can draw the same set twice; the first ID in
    /// mapping order is returned then.
    pub fn lookup_by_params(&self, params: &ParameterSet) -> Result<&str> {
        let names = self.parameter_names();
        if params.len() != names.len() {
            return Err(Error::NoMatchingSet);
        }
        match self {
            SweepMapping::Cartesian(m) => {
                let mut index = Vec::with_capacity(m.dims.len());
                for (dim, values) in m.dims.iter().zip(&m.coords) {
                    let v = params.get(dim).ok_or(Error::NoMatchingSet)?;
                    index.push(
                        values
                            .iter()
                            .position(|c| c == v)
                            .ok_or(Error::NoMatchingSet)?,
                    );
                }
                let k = m.flat_index(&index).ok_or(Error::NoMatchingSet)?;
                Ok(&m.sim_ids[k])
            }
            SweepMapping::Association(m) => {
                let wanted: Vec<&ParameterValue> = names
                    .iter()
                    .map(|n| params.get(n).ok_or(Error::NoMatchingSet))
                    .collect::<Result<_>>()?;
                m.assignments
                    .iter()
                    .find(|(_, set)| set.values().eq(wanted.iter().copied()))
                    .map(|(id, _)| id.as_str())
                    .ok_or(Error::NoMatchingSet)
            }
        }
    }

    pub fn to_json_value(&self) -> Value {
        match self {
            SweepMapping::Cartesian(m) => {
                let mut coords = Map::new();
                for (dim, values) in m.dims.iter().zip(&m.coords) {
                    coords.insert(
                        dim.clone(),
                        Value::Array(values.iter().map(value_to_json).collect()),
                    );
                }
                json!({
                    "schema": MAPPING_SCHEMA,
                    "kind": "cartesian",
                    "sweep_name": m.sweep_name,
                    "dims": m.dims,
                    "coords": coords,
                    "shape": m.shape,
                    "sim_ids": m.sim_ids,
                })
            }
            SweepMapping::Association(m) => {
                let mut assignments = Map::new();
                for (id, set) in &m.assignments {
                    assignments.insert(id.clone(), set_to_json(set));
                }
                json!({
                    "schema": MAPPING_SCHEMA,
                    "kind": "association",
                    "sweep_name": m.sweep_name,
                    "parameter_names": m.parameter_names,
                    "assignments": assignments,
                })
            }
        }
    }

    /// Pretty-printed JSON with a trailing newline; key order is fixed.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value())
            .expect("JSON values always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("mapping is not valid JSON: {e}")))?;
        Self::from_json_value(&doc)
    }

    pub fn from_json_value(doc: &Value) -> Result<Self> {
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::Parse("mapping document must be a JSON object".into()))?;
        match obj.get("schema").and_then(Value::as_str) {
            Some(MAPPING_SCHEMA) => {}
            Some(other) => {
                return Err(Error::Parse(format!(
                    "unsupported mapping schema `{other}` (expected `{MAPPING_SCHEMA}`)"
                )))
            }
            None => return Err(Error::Parse("mapping document has no `schema` tag".into())),
        }
        let sweep_name = str_field(obj, "sweep_name")?;
        match str_field(obj, "kind")?.as_str() {
            "cartesian" => {
                let dims = string_list(field(obj, "dims")?, "dims")?;
                let coords_obj = field(obj, "coords")?
                    .as_object()
                    .ok_or_else(|| Error::Parse("`coords` must be an object".into()))?;
                if coords_obj.len() != dims.len()
                    || !dims.iter().all(|d| coords_obj.contains_key(d))
                {
                    return Err(Error::Parse("`coords` keys must match `dims`".into()));
                }
                let coords = dims
                    .iter()
                    .map(|d| {
                        coords_obj[d]
                            .as_array()
                            .ok_or_else(|| {
                                Error::Parse(format!("coords of `{d}` must be an array"))
                            })?
                            .iter()
                            .map(value_from_json)
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let shape: Vec<usize> = field(obj, "shape")?
                    .as_array()
                    .ok_or_else(|| Error::Parse("`shape` must be an array".into()))?
                    .iter()
                    .map(|v| {
                        v.as_u64().map(|n| n as usize).ok_or_else(|| {
                            Error::Parse("`shape` entries must be non-negative integers".into())
                        })
                    })
                    .collect::<Result<_>>()?;
                let implied: Vec<usize> = coords.iter().map(Vec::len).collect();
                if shape != implied {
                    return Err(Error::Parse(format!(
                        "`shape` {shape:?} disagrees with coordinate lengths {implied:?}"
                    )));
                }
                let sim_ids = string_list(field(obj, "sim_ids")?, "sim_ids")?;
                let product: usize = shape.iter().product();
                if product != sim_ids.len() {
                    return Err(Error::Parse(format!(
                        "`shape` {shape:?} holds {product} cells but `sim_ids` has {} entries",
                        sim_ids.len()
                    )));
                }
                Ok(SweepMapping::Cartesian(CartesianMapping::new(
                    sweep_name, dims, coords, sim_ids,
                )?))
            }
            "association" => {
                let names = string_list(field(obj, "parameter_names")?, "parameter_names")?;
                let table = field(obj, "assignments")?
                    .as_object()
                    .ok_or_else(|| Error::Parse("`assignments` must be an object".into()))?;
                let mut assignments = Vec::with_capacity(table.len());
                for (id, entry) in table {
                    let entry = entry.as_object().ok_or_else(|| {
                        Error::Parse(format!("assignment `{id}` must be an object"))
                    })?;
                    if entry.len() != names.len() {
                        return Err(Error::Parse(format!(
                            "assignment `{id}` does not match `parameter_names`"
                        )));
                    }
                    let mut set = ParameterSet::new();
                    for name in &names {
                        let v = entry.get(name).ok_or_else(|| {
                            Error::Parse(format!("assignment `{id}` is missing `{name}`"))
                        })?;
                        set.push(name.clone(), value_from_json(v)?)
                            .map_err(|e| Error::Parse(e.to_string()))?;
                    }
                    assignments.push((id.clone(), set));
                }
                let mapping = AssociationMapping::new(sweep_name, assignments)?;
                if mapping.parameter_names != names {
                    return Err(Error::Parse(
                        "`parameter_names` does not match assignments".into(),
                    ));
                }
                Ok(SweepMapping::Association(mapping))
            }
            other => Err(Error::Parse(format!("unknown mapping kind `{other}`"))),
        }
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::io(format!("writing mapping {}", path.display()), e))
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading mapping {}", path.display()), e))?;
        Self::from_json(&text)
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Parse(format!("mapping document is missing `{key}`")))
}

fn str_field(obj: &Map<String, Value>, key: &str) -> Result<String> {
    field(obj, key)?
        .as_str()
        .map(str::to_owned)
        .ok_or_else(|| Error::Parse(format!("`{key}` must be a string")))
}

fn string_list(v: &Value, key: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("`{key}` must be an array of strings")))?
        .iter()
        .map(|s| {
            s.as_str()
                .map(str::to_owned)
                .ok_or_else(|| Error::Parse(format!("`{key}` must be an array of strings")))
        })
        .collect()
}

pub(crate) fn value_to_json(v: &ParameterValue) -> Value {
    match v {
        ParameterValue::Integer(i) => Value::from(*i),
        ParameterValue::Real(r) => Value::from(*r),
        ParameterValue::Text(t) => Value::from(t.as_str()),
    }
}

/// JSON integers become integers, other numbers reals, strings text.
pub(crate) fn value_from_json(v: &Value) -> Result<ParameterValue> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(ParameterValue::Integer(i))
            } else if n.is_u64() {
                Err(Error::Parse(format!("integer {n} is out of range")))
            } else {
                let r = n
                    .as_f64()
                    .ok_or_else(|| Error::Parse(format!("bad number {n}")))?;
                ParameterValue::real(r).map_err(|e| Error::Parse(e.to_string()))
            }
        }
        Value::String(s) => Ok(ParameterValue::Text(s.clone())),
        other => Err(Error::Parse(format!(
            "parameter values must be numbers or strings, got {other}"
        ))),
    }
}

fn set_to_json(set: &ParameterSet) -> Value {
    let mut obj = Map::new();
    for (name, value) in set.iter() {
        obj.insert(name.to_owned(), value_to_json(value));
    }
    Value::Object(obj)
}

/// Builds the mapping for a generated sweep.
///
/// `sets` and `ids` must be in generation order and of equal length.
/// Cartesian sweeps give a [`CartesianMapping`]; everything else, including
/// filtered sweeps (which are ragged), an [`AssociationMapping`].
pub fn build_mapping(
    sweep_name: &str,
    sweep: &SweepDefinition,
    sets: &[ParameterSet],
    ids: &[String],
) -> Result<SweepMapping> {
    if sets.len() != ids.len() {
        return Err(Error::Consistency(format!(
            "{} parameter sets but {} simulation ids",
            sets.len(),
            ids.len()
        )));
    }
    let consistency = |e: Error| Error::Consistency(e.to_string());
    match sweep {
        SweepDefinition::Cartesian(grid) => {
            if grid.len() != Some(sets.len()) {
                return Err(Error::Consistency(format!(
                    "cartesian sweep has {:?} cells but {} sets were given",
                    grid.len(),
                    sets.len()
                )));
            }
            let dims = grid.names().map(str::to_owned).collect();
            let coords = grid.axes().iter().map(|(_, v)| v.clone()).collect();
            let mapping = CartesianMapping::new(sweep_name, dims, coords, ids.to_vec())
                .map_err(consistency)?;
            // Sets must be the row-major enumeration the array assumes.
            for (k, set) in sets.iter().enumerate() {
                if mapping.set_at(k) != *set {
                    return Err(Error::Consistency(format!(
                        "parameter set {k} is not in row-major order"
                    )));
                }
            }
            Ok(SweepMapping::Cartesian(mapping))
        }
        _ => {
            let assignments = ids.iter().cloned().zip(sets.iter().cloned()).collect();
            AssociationMapping::new(sweep_name, assignments)
                .map(SweepMapping::Association)
                .map_err(consistency)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{CartesianSweep, FilteredSweep};

    fn ab_sweep() -> (SweepDefinition, Vec<ParameterSet>) {
        let sweep: SweepDefinition = CartesianSweep::new([
            (
                "a",
                vec![ParameterValue::Integer(1), ParameterValue::Integer(2)],
            ),
            ("b", vec![ParameterValue::Integer(10)]),
        ])
        .unwrap()
        .into();
        let sets = sweep.generate().unwrap();
        (sweep, sets)
    }

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn cartesian_packing_and_lookups() {
        let (sweep, sets) = ab_sweep();
        let m = build_mapping("ab", &sweep, &sets, &ids(&["0", "1"])).unwrap();
        let SweepMapping::Cartesian(c) = &m else {
            panic!("expected cartesian")
        };
        assert_eq!(c.dims(), ["a", "b"]);
        assert_eq!(c.shape(), [2, 1]);
        assert_eq!(c.sim_ids(), ["0", "1"]);
        assert_eq!(c.get(&[1, 0]), Some("1"));

        let a2b10 = ParameterSet::from_pairs([("a", 2), ("b", 10)]).unwrap();
        assert_eq!(m.lookup_by_id("1").unwrap(), a2b10);
        assert_eq!(m.lookup_by_params(&a2b10).unwrap(), "1");
        let reversed = ParameterSet::from_pairs([("b", 10), ("a", 2)]).unwrap();
        assert_eq!(m.lookup_by_params(&reversed).unwrap(), "1");
        let a3 = ParameterSet::from_pairs([("a", 3), ("b", 10)]).unwrap();
        assert!(matches!(m.lookup_by_params(&a3), Err(Error::NoMatchingSet)));
        assert!(matches!(m.lookup_by_id("zzz"), Err(Error::UnknownSimId(_))));
        // integer 2 and real 2.0 are different values
        let real =
            ParameterSet::from_pairs([("a", ParameterValue::Real(2.0)), ("b", 10.into())]).unwrap();
        assert!(m.lookup_by_params(&real).is_err());
    }

    #[test]
    fn filtered_gives_association() {
        let grid = CartesianSweep::new([
            ("x", vec![1.into(), 2.into()]),
            ("y", vec![1.into(), 2.into()]),
        ])
        .unwrap();
        let sweep: SweepDefinition = FilteredSweep::with_source(grid, "x > y").unwrap().into();
        let sets = sweep.generate().unwrap();
        let m = build_mapping("f", &sweep, &sets, &ids(&["0"])).unwrap();
        assert_eq!(m.kind(), "association");
        assert_eq!(
            m.lookup_by_id("0").unwrap(),
            ParameterSet::from_pairs([("x", 2), ("y", 1)]).unwrap()
        );
    }

    #[test]
    fn length_mismatch_is_consistency_error() {
        let (sweep, sets) = ab_sweep();
        assert!(matches!(
            build_mapping("ab", &sweep, &sets, &ids(&["0"])),
            Err(Error::Consistency(_))
        ));
        assert!(matches!(
            build_mapping("ab", &sweep, &sets, &ids(&["0", "0"])),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn cartesian_document_layout() {
        let (sweep, sets) = ab_sweep();
        let m = build_mapping("ab", &sweep, &sets, &ids(&["0", "1"])).unwrap();
        let compact = serde_json::to_string(&m.to_json_value()).unwrap();
        assert_eq!(
            compact,
            r#"{"schema":"sweep-mapping/1","kind":"cartesian","sweep_name":"ab","dims":["a","b"],"coords":{"a":[1,2],"b":[10]},"shape":[2,1],"sim_ids":["0","1"]}"#
        );
        assert_eq!(SweepMapping::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn association_round_trip_keeps_types() {
        let sets = vec![
            ParameterSet::from_pairs([("x", ParameterValue::Real(2.0)), ("s", "a".into())])
                .unwrap(),
            ParameterSet::from_pairs([("x", ParameterValue::Integer(2)), ("s", "b".into())])
                .unwrap(),
        ];
        let m = SweepMapping::Association(
            AssociationMapping::new("s", ids(&["07", "08"]).into_iter().zip(sets).collect())
                .unwrap(),
        );
        let text = m.to_json();
        assert!(text.contains("\"x\": 2.0"));
        let back = SweepMapping::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.sim_ids(), ["07", "08"]);
    }

    #[test]
    fn seventeen_digit_reals_read_back_exactly() {
        let awkward = [
            -2.9608634644216614,
            -2.6875427968616474,
            -1.9031185205879662,
            5e-324,
            f64::MAX,
        ];
        let sets = awkward
            .iter()
            .map(|&x| ParameterSet::from_pairs([("x", ParameterValue::Real(x))]).unwrap())
            .collect::<Vec<_>>();
        let names = (0..sets.len()).map(|i| i.to_string()).collect::<Vec<_>>();
        let m = SweepMapping::Association(
            AssociationMapping::new("s", names.into_iter().zip(sets).collect()).unwrap(),
        );
        assert_eq!(SweepMapping::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn rejects_malformed_documents() {
        let bad_shape = r#"{"schema":"sweep-mapping/1","kind":"cartesian","sweep_name":"x","dims":["a","b"],"coords":{"a":[1,2],"b":[1,2]},"shape":[2,2],"sim_ids":["0","1","2"]}"#;
        assert!(
            matches!(SweepMapping::from_json(bad_shape), Err(Error::Parse(m)) if m.contains("sim_ids"))
        );
        let bad_schema = r#"{"schema":"sweep-mapping/2","kind":"cartesian"}"#;
        assert!(
            matches!(SweepMapping::from_json(bad_schema), Err(Error::Parse(m)) if m.contains("schema"))
        );
        let dup_ids = r#"{"schema":"sweep-mapping/1","kind":"cartesian","sweep_name":"x","dims":["a"],"coords":{"a":[1,2]},"shape":[2],"sim_ids":["0","0"]}"#;
        assert!(SweepMapping::from_json(dup_ids).is_err());
        let coord_mismatch = r#"{"schema":"sweep-mapping/1","kind":"cartesian","sweep_name":"x","dims":["a"],"coords":{"a":[1,2]},"shape":[3],"sim_ids":["0","1","2"]}"#;
        assert!(SweepMapping::from_json(coord_mismatch).is_err());
        let ragged = r#"{"schema":"sweep-mapping/1","kind":"association","sweep_name":"x","parameter_names":["a"],"assignments":{"0":{"a":1},"1":{"b":1}}}"#;
        assert!(SweepMapping::from_json(ragged).is_err());
        assert!(SweepMapping::from_json("[]").is_err());
        assert!(SweepMapping::from_json("{").is_err());
    }

    #[test]
    fn multi_index_inverts_flat_index() {
        let coords = vec![
            vec![1.into(), 2.into(), 3.into()],
            vec![1.into(), 2.into()],
            vec![1.into(), 2.into(), 3.into(), 4.into()],
        ];
        let sim_ids: Vec<String> = (0..24).map(|i| i.to_string()).collect();
        let m = CartesianMapping::new("m", ids(&["a", "b", "c"]), coords, sim_ids).unwrap();
        for k in 0..24 {
            assert_eq!(m.flat_index(&m.multi_index(k)), Some(k));
        }
        assert_eq!(m.flat_index(&[0, 2, 0]), None);
    }
}
