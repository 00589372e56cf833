//! Parameter values and parameter sets.

use std::fmt;

use crate::error::{Error, Result};

/// Name reserved for the simulation identifier in templates and commands.
pub const SIM_ID: &str = "sim_id";

/// A single parameter value substituted into configuration templates.
///
/// Equality is structural: integers compare to integers, reals compare by
/// bit pattern, text by content. Real values are always finite.
#[derive(Debug, Clone)]
pub enum ParameterValue {
    Integer(i64),
    Real(f64),
    Text(String),
}

impl ParameterValue {
    /// Builds a real value, rejecting NaN and infinities.
    pub fn real(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(ParameterValue::Real(v))
        } else {
            Err(Error::InvalidArgument(format!("non-finite real value {v}")))
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            ParameterValue::Integer(i) => Some(i as f64),
            ParameterValue::Real(r) => Some(r),
            ParameterValue::Text(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            ParameterValue::Real(r) => r.is_finite(),
            _ => true,
        }
    }
}

impl PartialEq for ParameterValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ParameterValue::Integer(a), ParameterValue::Integer(b)) => a == b,
            (ParameterValue::Real(a), ParameterValue::Real(b)) => a.to_bits() == b.to_bits(),
            (ParameterValue::Text(a), ParameterValue::Text(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for ParameterValue {}

impl std::hash::Hash for ParameterValue {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            ParameterValue::Integer(i) => (0u8, i).hash(state),
            ParameterValue::Real(r) => (1u8, r.to_bits()).hash(state),
            ParameterValue::Text(t) => (2u8, t).hash(state),
        }
    }
}

impl From<i64> for ParameterValue {
    fn from(v: i64) -> Self {
        ParameterValue::Integer(v)
    }
}

impl From<i32> for ParameterValue {
    fn from(v: i32) -> Self {
        ParameterValue::Integer(v.into())
    }
}

/// Panics on non-finite input; use [`ParameterValue::real`] for fallible
/// construction.
impl From<f64> for ParameterValue {
    fn from(v: f64) -> Self {
        assert!(v.is_finite(), "parameter values must be finite, got {v}");
        ParameterValue::Real(v)
    }
}

impl From<&str> for ParameterValue {
    fn from(v: &str) -> Self {
        ParameterValue::Text(v.to_owned())
    }
}

impl From<String> for ParameterValue {
    fn from(v: String) -> Self {
        ParameterValue::Text(v)
    }
}

impl fmt::Display for ParameterValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_value(self))
    }
}

/// Renders a value the way it is written into configuration files.
///
/// Integers are plain base-10. Reals use the shortest decimal string that
/// parses back to the same `f64`, and always carry a decimal point or an
/// exponent so that `2.0` never turns into the integer-looking `2`. Text is
/// verbatim.
pub fn format_value(v: &ParameterValue) -> String {
    match v {
        ParameterValue::Integer(i) => i.to_string(),
        ParameterValue::Real(r) => format_real(*r),
        ParameterValue::Text(t) => t.clone(),
    }
}

pub(crate) fn format_real(r: f64) -> String {
    // `Debug` for f64 is shortest-round-trip and keeps a `.0` or an exponent.
    let s = format!("{r:?}");
    debug_assert!(s.contains(['.', 'e', 'E']) || !r.is_finite());
    s
}

/// True when `name` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Validates a parameter name: identifier grammar, not the reserved `sim_id`.
pub fn check_parameter_name(name: &str) -> Result<()> {
    if !is_identifier(name) {
        return Err(Error::InvalidSweep(format!(
            "parameter name `{name}` is not a valid identifier"
        )));
    }
    if name == SIM_ID {
        return Err(Error::InvalidSweep(format!(
            "`{SIM_ID}` is reserved and cannot be used as a parameter name"
        )));
    }
    Ok(())
}

/// One simulation's inputs: an ordered list of uniquely named values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ParameterSet {
    entries: Vec<(String, ParameterValue)>,
}

impl ParameterSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from ordered pairs, validating names and values.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<ParameterValue>,
    {
        let mut set = ParameterSet::new();
        for (k, v) in pairs {
            set.push(k, v)?;
        }
        Ok(set)
    }

    /// Appends a value. Fails on invalid or duplicate names and non-finite reals.
    pub fn push(
        &mut self,
        name: impl Into<String>,
        value: impl Into<ParameterValue>,
    ) -> Result<()> {
        let name = name.into();
        let value = value.into();
        check_parameter_name(&name)?;
        if self.get(&name).is_some() {
            return Err(Error::InvalidSweep(format!("duplicate parameter `{name}`")));
        }
        if !value.is_finite() {
            return Err(Error::InvalidSweep(format!(
                "parameter `{name}` has a non-finite value"
            )));
        }
        self.entries.push((name, value));
        Ok(())
    }

    // Used by generators that have already validated names.
    pub(crate) fn push_unchecked(&mut self, name: String, value: ParameterValue) {
        self.entries.push((name, value));
    }

    pub fn get(&self, name: &str) -> Option<&ParameterValue> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn values(&self) -> impl Iterator<Item = &ParameterValue> {
        self.entries.iter().map(|(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ParameterValue)> {
        self.entries.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub(crate) fn same_names(&self, other: &ParameterSet) -> bool {
        self.names().eq(other.names())
    }
}

impl fmt::Display for ParameterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (name, value)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match value {
                ParameterValue::Text(t) => write!(f, "{name}: '{t}'")?,
                other => write!(f, "{name}: {other}")?,
            }
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_values() {
        assert_eq!(format_value(&ParameterValue::Integer(28)), "28");
        assert_eq!(format_value(&ParameterValue::Real(2.0)), "2.0");
        assert_eq!(format_value(&ParameterValue::Real(2.67)), "2.67");
        assert_eq!(format_value(&ParameterValue::Real(-0.25)), "-0.25");
        assert_eq!(format_value(&ParameterValue::Text("abc".into())), "abc");
        let big = format_value(&ParameterValue::Real(1e300));
        assert!(big.contains('e'));
        assert_eq!(big.parse::<f64>().unwrap(), 1e300);
    }

    #[test]
    fn real_equality_is_bitwise() {
        assert_eq!(
            ParameterValue::Real(0.1 + 0.2),
            ParameterValue::Real(0.1 + 0.2)
        );
        assert_ne!(ParameterValue::Real(0.3), ParameterValue::Real(0.1 + 0.2));
        assert_ne!(ParameterValue::Real(0.0), ParameterValue::Real(-0.0));
        assert_ne!(ParameterValue::Real(2.0), ParameterValue::Integer(2));
    }

    #[test]
    fn rejects_bad_names() {
        assert!(is_identifier("_a1"));
        assert!(!is_identifier("1a"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("a-b"));
        let mut set = ParameterSet::new();
        assert!(set.push("sim_id", 1).is_err());
        set.push("x", 1).unwrap();
        assert!(set.push("x", 2).is_err());
        assert!(ParameterValue::real(f64::NAN).is_err());
    }

    proptest::proptest! {
        #[test]
        fn real_formatting_round_trips(bits in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = format_value(&ParameterValue::Real(bits));
            proptest::prop_assert!(s.contains(['.', 'e']));
            proptest::prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), bits.to_bits());
        }
    }
}
