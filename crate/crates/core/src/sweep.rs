//! Sweep definitions and parameter-set generation.
//!
//! Cartesian enumeration is row-major over declaration order: the last
//! declared parameter varies fastest. The same order is used for the
//! labeled mapping array, so flat index `k` of the generated list and flat
//! index `k` of the mapping refer to the same simulation.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::filter::{self, FilterExpr};
use crate::random::{Distribution, SweepRng};
use crate::value::{check_parameter_name, ParameterSet, ParameterValue};

/// `count` evenly spaced values from `start` to `stop`, both included.
///
/// Element `i` is `start + i * step` with `step = (stop - start) / (count - 1)`;
/// the last element is set to `stop` exactly.
pub fn linspace(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidArgument(format!(
            "linspace needs at least 2 points, got {count}"
        )));
    }
    if !(start.is_finite() && stop.is_finite()) || start >= stop {
        return Err(Error::InvalidArgument(format!(
            "linspace needs finite start < stop, got {start} and {stop}"
        )));
    }
    let step = (stop - start) / (count - 1) as f64;
    let mut out: Vec<f64> = (0..count).map(|i| i as f64 * step + start).collect();
    out[count - 1] = stop;
    Ok(out)
}

/// Every combination of per-parameter value lists.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianSweep {
    axes: Vec<(String, Vec<ParameterValue>)>,
}

impl CartesianSweep {
    pub fn new<I, K>(parameters: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, Vec<ParameterValue>)>,
        K: Into<String>,
    {
        let axes: Vec<(String, Vec<ParameterValue>)> =
            parameters.into_iter().map(|(k, v)| (k.into(), v)).collect();
        if axes.is_empty() {
            return Err(Error::InvalidSweep(
                "a sweep needs at least one parameter".into(),
            ));
        }
        let mut names = HashSet::new();
        for (name, values) in &axes {
            check_parameter_name(name)?;
            if !names.insert(name.as_str()) {
                return Err(Error::InvalidSweep(format!("duplicate parameter `{name}`")));
            }
            if values.is_empty() {
                return Err(Error::InvalidSweep(format!(
                    "parameter `{name}` has no values"
                )));
            }
            if !values.iter().all(ParameterValue::is_finite) {
                return Err(Error::InvalidSweep(format!(
                    "parameter `{name}` has a non-finite value"
                )));
            }
            let distinct: HashSet<&ParameterValue> = values.iter().collect();
            if distinct.len() != values.len() {
                return Err(Error::InvalidSweep(format!(
                    "parameter `{name}` lists the same value more than once"
                )));
            }
        }
        Ok(CartesianSweep { axes })
    }

    pub fn axes(&self) -> &[(String, Vec<ParameterValue>)] {
        &self.axes
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.axes.iter().map(|(n, _)| n.as_str())
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|(_, v)| v.len()).collect()
    }

    /// Product of axis lengths; `None` on overflow.
    pub fn len(&self) -> Option<usize> {
        self.axes
            .iter()
            .try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len()))
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lazily enumerates all combinations, last axis fastest.
    pub fn iter(&self) -> CartesianIter<'_> {
        CartesianIter {
            axes: &self.axes,
            index: Some(vec![0; self.axes.len()]),
        }
    }

    /// Parameter set at a multi-index.
    pub fn at(&self, index: &[usize]) -> ParameterSet {
        let mut set = ParameterSet::new();
        for ((name, values), &i) in self.axes.iter().zip(index) {
            set.push_unchecked(name.clone(), values[i].clone());
        }
        set
    }
}

/// Odometer over a Cartesian grid.
pub struct CartesianIter<'a> {
    axes: &'a [(String, Vec<ParameterValue>)],
    index: Option<Vec<usize>>,
}

impl Iterator for CartesianIter<'_> {
    type Item = ParameterSet;

    fn next(&mut self) -> Option<ParameterSet> {
        let index = self.index.as_mut()?;
        let mut set = ParameterSet::new();
        for ((name, values), &i) in self.axes.iter().zip(index.iter()) {
            set.push_unchecked(name.clone(), values[i].clone());
        }
        let mut axis = self.axes.len();
        loop {
            if axis == 0 {
                self.index = None;
                break;
            }
            axis -= 1;
            index[axis] += 1;
            if index[axis] < self.axes[axis].1.len() {
                break;
            }
            index[axis] = 0;
        }
        Some(set)
    }
}

/// Cartesian sweep restricted to the sets satisfying a predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSweep {
    grid: CartesianSweep,
    filter: FilterExpr,
}

impl FilteredSweep {
    pub fn new(grid: CartesianSweep, filter: FilterExpr) -> Result<Self> {
        let declared: HashSet<&str> = grid.names().collect();
        if let Some(unknown) = filter
            .free_variables()
            .into_iter()
            .find(|v| !declared.contains(v.as_str()))
        {
            return Err(Error::InvalidSweep(format!(
                "filter refers to `{unknown}`, which is not a swept parameter"
            )));
        }
        Ok(FilteredSweep { grid, filter })
    }

    /// Parses `filter` and builds the sweep.
    pub fn with_source(grid: CartesianSweep, filter: &str) -> Result<Self> {
        Self::new(grid, filter::parse(filter)?)
    }

    pub fn grid(&self) -> &CartesianSweep {
        &self.grid
    }

    pub fn filter(&self) -> &FilterExpr {
        &self.filter
    }
}

/// Explicit list of parameter sets, run verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSweep {
    sets: Vec<ParameterSet>,
}

impl SetSweep {
    pub fn new(sets: Vec<ParameterSet>) -> Result<Self> {
        let first = sets
            .first()
            .ok_or_else(|| Error::InvalidSweep("a set sweep needs at least one set".into()))?;
        if first.is_empty() {
            return Err(Error::InvalidSweep(
                "a sweep needs at least one parameter".into(),
            ));
        }
        for (i, set) in sets.iter().enumerate() {
            if !set.same_names(first) {
                return Err(Error::InvalidSweep(format!(
                    "set {i} has parameters [{}] but set 0 has [{}]",
                    set.names().collect::<Vec<_>>().join(", "),
                    first.names().collect::<Vec<_>>().join(", ")
                )));
            }
            for name in set.names() {
                check_parameter_name(name)?;
            }
        }
        let distinct: HashSet<&ParameterSet> = sets.iter().collect();
        if distinct.len() != sets.len() {
            return Err(Error::InvalidSweep(
                "a set sweep lists the same set more than once".into(),
            ));
        }
        Ok(SetSweep { sets })
    }

    pub fn sets(&self) -> &[ParameterSet] {
        &self.sets
    }
}

/// `count` sets drawn from independent per-parameter distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSweep {
    count: usize,
    distributions: Vec<(String, Distribution)>,
    seed: u64,
}

impl RandomSweep {
    pub fn new<I, K>(count: usize, distributions: I, seed: u64) -> Result<Self>
    where
        I: IntoIterator<Item = (K, Distribution)>,
        K: Into<String>,
    {
        if count == 0 {
            return Err(Error::InvalidSweep(
                "random sweep count must be positive".into(),
            ));
        }
        let distributions: Vec<(String, Distribution)> = distributions
            .into_iter()
            .map(|(k, d)| (k.into(), d))
            .collect();
        if distributions.is_empty() {
            return Err(Error::InvalidSweep(
                "a sweep needs at least one parameter".into(),
            ));
        }
        let mut names = HashSet::new();
        for (name, dist) in &distributions {
            check_parameter_name(name)?;
            if !names.insert(name.as_str()) {
                return Err(Error::InvalidSweep(format!("duplicate parameter `{name}`")));
            }
            dist.validate()?;
        }
        Ok(RandomSweep {
            count,
            distributions,
            seed,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn distributions(&self) -> &[(String, Distribution)] {
        &self.distributions
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// The four supported sweep types.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepDefinition {
    Cartesian(CartesianSweep),
    FilteredCartesian(FilteredSweep),
    Set(SetSweep),
    Random(RandomSweep),
}

impl From<CartesianSweep> for SweepDefinition {
    fn from(s: CartesianSweep) -> Self {
        SweepDefinition::Cartesian(s)
    }
}

impl From<FilteredSweep> for SweepDefinition {
    fn from(s: FilteredSweep) -> Self {
        SweepDefinition::FilteredCartesian(s)
    }
}

impl From<SetSweep> for SweepDefinition {
    fn from(s: SetSweep) -> Self {
        SweepDefinition::Set(s)
    }
}

impl From<RandomSweep> for SweepDefinition {
    fn from(s: RandomSweep) -> Self {
        SweepDefinition::Random(s)
    }
}

impl SweepDefinition {
    /// Short type tag: `cartesian`, `filtered`, `set` or `random`.
    pub fn kind(&self) -> &'static str {
        match self {
            SweepDefinition::Cartesian(_) => "cartesian",
            SweepDefinition::FilteredCartesian(_) => "filtered",
            SweepDefinition::Set(_) => "set",
            SweepDefinition::Random(_) => "random",
        }
    }

    /// Parameter names in declaration order.
    pub fn parameter_names(&self) -> Vec<String> {
        match self {
            SweepDefinition::Cartesian(c) => c.names().map(str::to_owned).collect(),
            SweepDefinition::FilteredCartesian(f) => f.grid.names().map(str::to_owned).collect(),
            SweepDefinition::Set(s) => s.sets[0].names().map(str::to_owned).collect(),
            SweepDefinition::Random(r) => r.distributions.iter().map(|(n, _)| n.clone()).collect(),
        }
    }

    /// Number of simulations the sweep will run. Filtered sweeps are
    /// enumerated to count survivors.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Result<usize> {
        match self {
            SweepDefinition::Cartesian(c) => c
                .len()
                .ok_or_else(|| Error::InvalidSweep("sweep size overflows".into())),
            SweepDefinition::FilteredCartesian(f) => {
                let mut n = 0;
                for set in f.grid.iter() {
                    if filter::evaluate(&f.filter, &set)? {
                        n += 1;
                    }
                }
                Ok(n)
            }
            SweepDefinition::Set(s) => Ok(s.sets.len()),
            SweepDefinition::Random(r) => Ok(r.count),
        }
    }

    /// Generates the ordered parameter sets.
    pub fn generate(&self) -> Result<Vec<ParameterSet>> {
        match self {
            SweepDefinition::Cartesian(c) => {
                self.len()?;
                Ok(c.iter().collect())
            }
            SweepDefinition::FilteredCartesian(f) => {
                let mut out = Vec::new();
                for set in f.grid.iter() {
                    if filter::evaluate(&f.filter, &set)? {
                        out.push(set);
                    }
                }
                if out.is_empty() {
                    return Err(Error::EmptySweep(format!(
                        "filter `{}` rejects every parameter set",
                        f.filter
                    )));
                }
                Ok(out)
            }
            SweepDefinition::Set(s) => Ok(s.sets.clone()),
            SweepDefinition::Random(r) => {
                let mut rng = SweepRng::seed_from_u64(r.seed);
                let sets = (0..r.count)
                    .map(|_| {
                        let mut set = ParameterSet::new();
                        for (name, dist) in &r.distributions {
                            set.push_unchecked(name.clone(), rng.sample(dist));
                        }
                        set
                    })
                    .collect();
                Ok(sets)
            }
        }
    }
}

/// Free function form of [`SweepDefinition::len`].
pub fn sweep_length(sweep: &SweepDefinition) -> Result<usize> {
    sweep.len()
}

/// Free function form of [`SweepDefinition::generate`].
pub fn generate(sweep: &SweepDefinition) -> Result<Vec<ParameterSet>> {
    sweep.generate()
}
