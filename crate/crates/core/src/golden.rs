//! Reference values stored as `name, value, resolution, tolerance` lines.

use std::fmt::Write as _;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Golden {
    pub name: String,
    pub value: f64,
    /// Number of grid cells the value was computed at.
    pub resolution: usize,
    /// Absolute tolerance for comparisons at that resolution.
    pub tolerance: f64,
}

impl Golden {
    pub fn matches(&self, value: f64) -> bool {
        (value - self.value).abs() <= self.tolerance
    }
}

/// Parses golden records; blank lines and `#` comments are skipped.
pub fn parse_goldens(text: &str) -> Result<Vec<Golden>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = |what: &str| LabError::Parse(format!("golden line {}: {what}", k + 1));
        if fields.len() != 4 {
            return Err(bad("expected 4 comma-separated fields"));
        }
        out.push(Golden {
            name: fields[0].to_owned(),
            value: fields[1].parse().map_err(|_| bad("bad value"))?,
            resolution: fields[2].parse().map_err(|_| bad("bad resolution"))?,
            tolerance: fields[3].parse().map_err(|_| bad("bad tolerance"))?,
        });
    }
    Ok(out)
}

pub fn format_goldens(records: &[Golden]) -> String {
    let mut s = String::from("# name, value, resolution, tolerance\n");
    for g in records {
        let _ = writeln!(s, "{}, {}, {}, {}", g.name, g.value, g.resolution, g.tolerance);
    }
    s
}

pub fn find<'a>(records: &'a [Golden], name: &str) -> Option<&'a Golden> {
    records.iter().find(|g| g.name == name)
}
