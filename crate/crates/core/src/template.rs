//! Configuration templates with `{name}` placeholders.
//!
//! A placeholder is an identifier wrapped in single braces. `{{` and `}}`
//! stand for literal braces. There is no expression or format syntax
//! inside the braces; values are rendered with [`format_value`].

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::value::{format_value, is_identifier, ParameterSet, SIM_ID};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Literal(String),
    Placeholder(String),
}

/// A parsed configuration template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    source: String,
    segments: Vec<Segment>,
    placeholders: Vec<String>,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::TemplateSyntax {
        offset,
        message: message.into(),
    }
}

fn parse_segments(source: &str) -> Result<Vec<Segment>> {
    let bytes = source.as_bytes();
    let mut segments = Vec::new();
    let mut literal = String::new();
    let mut i = 0;
    let mut run_start = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'{' if bytes.get(i + 1) == Some(&b'{') => {
                literal.push_str(&source[run_start..i]);
                literal.push('{');
                i += 2;
                run_start = i;
            }
            b'}' if bytes.get(i + 1) == Some(&b'}') => {
                literal.push_str(&source[run_start..i]);
                literal.push('}');
                i += 2;
                run_start = i;
            }
            b'{' => {
                literal.push_str(&source[run_start..i]);
                let close = source[i + 1..]
                    .find(['}', '{'])
                    .map(|p| p + i + 1)
                    .filter(|&p| bytes[p] == b'}')
                    .ok_or_else(|| syntax(i, "unclosed `{`; write `{{` for a literal brace"))?;
                let name = &source[i + 1..close];
                if !is_identifier(name) {
                    return Err(syntax(
                        i,
                        format!("`{{{name}}}` is not a valid placeholder"),
                    ));
                }
                if !literal.is_empty() {
                    segments.push(Segment::Literal(std::mem::take(&mut literal)));
                }
                segments.push(Segment::Placeholder(name.to_owned()));
                i = close + 1;
                run_start = i;
            }
            b'}' => return Err(syntax(i, "unmatched `}`; write `}}` for a literal brace")),
            _ => i += 1,
        }
    }
    literal.push_str(&source[run_start..]);
    if !literal.is_empty() {
        segments.push(Segment::Literal(literal));
    }
    Ok(segments)
}

impl Template {
    pub fn parse(source: impl Into<String>) -> Result<Self> {
        let source = source.into();
        let segments = parse_segments(&source)?;
        let mut seen = HashSet::new();
        let placeholders = segments
            .iter()
            .filter_map(|s| match s {
                Segment::Placeholder(name) if seen.insert(name.clone()) => Some(name.clone()),
                _ => None,
            })
            .collect();
        Ok(Template {
            source,
            segments,
            placeholders,
        })
    }

    /// Reads and parses a template file (UTF-8).
    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading template {}", path.display()), e))?;
        Self::parse(source)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Placeholder names in first-occurrence order, without duplicates.
    pub fn placeholders(&self) -> &[String] {
        &self.placeholders
    }

    pub fn uses_sim_id(&self) -> bool {
        self.placeholders.iter().any(|p| p == SIM_ID)
    }

    /// Fills every placeholder from `params`, and `{sim_id}` from `sim_id`.
    pub fn render(&self, params: &ParameterSet, sim_id: &str) -> Result<String> {
        let mut out = String::with_capacity(self.source.len());
        for segment in &self.segments {
            match segment {
                Segment::Literal(text) => out.push_str(text),
                Segment::Placeholder(name) if name == SIM_ID => out.push_str(sim_id),
                Segment::Placeholder(name) => {
                    let value = params
                        .get(name)
                        .ok_or_else(|| Error::UnfilledPlaceholder(name.clone()))?;
                    out.push_str(&format_value(value));
                }
            }
        }
        Ok(out)
    }
}

/// Placeholder names of `source`, first-occurrence order.
pub fn extract_placeholders(source: &str) -> Result<Vec<String>> {
    Ok(Template::parse(source)?.placeholders)
}

/// Free function form of [`Template::render`].
pub fn render(template: &Template, params: &ParameterSet, sim_id: &str) -> Result<String> {
    template.render(params, sim_id)
}

/// Checks that a group of templates can be filled from `parameter_names`.
///
/// Any placeholder not covered by the parameters or `sim_id` is an error.
/// Parameters no template uses are returned as warnings, or turned into an
/// error when `strict` is set.
pub fn check_coverage<S: AsRef<str>>(
    templates: &[Template],
    parameter_names: &[S],
    strict: bool,
) -> Result<Vec<String>> {
    let names: HashSet<&str> = parameter_names.iter().map(AsRef::as_ref).collect();
    let mut used = HashSet::new();
    for template in templates {
        for placeholder in template.placeholders() {
            if placeholder != SIM_ID && !names.contains(placeholder.as_str()) {
                return Err(Error::UnfilledPlaceholder(placeholder.clone()));
            }
            used.insert(placeholder.as_str());
        }
    }
    let mut warnings = Vec::new();
    for name in parameter_names.iter().map(AsRef::as_ref) {
        if !used.contains(name) {
            if strict {
                return Err(Error::UnusedParameter(name.to_owned()));
            }
            warnings.push(format!("parameter `{name}` is not used by any template"));
        }
    }
    Ok(warnings)
}
