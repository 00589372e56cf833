//! Simulation ID assignment.

use crate::error::{Error, Result};

/// Source of simulation IDs for one sweep.
pub trait Namer {
    /// Next ID, or an error once the sweep's IDs are used up.
    fn next_id(&mut self) -> Result<String>;
}

/// Settings for [`SequentialNamer`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamerConfig {
    pub start_index: u64,
    pub min_width: usize,
    pub prefix: String,
}

impl Default for NamerConfig {
    fn default() -> Self {
        NamerConfig {
            start_index: 0,
            min_width: 1,
            prefix: String::new(),
        }
    }
}

fn is_id_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-')
}

/// Zero-padded sequential IDs: `prefix` followed by `start_index + k`.
///
/// Every ID of a sweep has the same width, so lexicographic order matches
/// numeric order.
#[derive(Debug, Clone)]
pub struct SequentialNamer {
    prefix: String,
    next: u64,
    end: u64,
    width: usize,
    total: usize,
}

impl SequentialNamer {
    pub fn new(config: &NamerConfig, total: usize) -> Result<Self> {
        if total == 0 {
            return Err(Error::InvalidArgument(
                "namer needs a positive total".into(),
            ));
        }
        if config.min_width == 0 {
            return Err(Error::InvalidArgument(
                "namer min_width must be positive".into(),
            ));
        }
        if !config.prefix.chars().all(is_id_char) {
            return Err(Error::InvalidArgument(format!(
                "id prefix `{}` may only contain letters, digits, `_`, `.` and `-`",
                config.prefix
            )));
        }
        let last = config
            .start_index
            .checked_add(total as u64 - 1)
            .ok_or_else(|| Error::InvalidArgument("simulation index overflows".into()))?;
        let width = config.min_width.max(last.to_string().len());
        Ok(SequentialNamer {
            prefix: config.prefix.clone(),
            next: config.start_index,
            end: last + 1,
            width,
            total,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

impl Namer for SequentialNamer {
    fn next_id(&mut self) -> Result<String> {
        if self.next >= self.end {
            return Err(Error::NamerExhausted(self.total));
        }
        let id = format!("{}{:0width$}", self.prefix, self.next, width = self.width);
        self.next += 1;
        Ok(id)
    }
}

impl Iterator for SequentialNamer {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        self.next_id().ok()
    }
}

/// Builds the default namer for a sweep of `total` simulations.
pub fn make_namer(config: &NamerConfig, total: usize) -> Result<SequentialNamer> {
    SequentialNamer::new(config, total)
}

/// Draws exactly `total` IDs from a namer.
pub fn assign_ids(namer: &mut dyn Namer, total: usize) -> Result<Vec<String>> {
    (0..total).map(|_| namer.next_id()).collect()
}
