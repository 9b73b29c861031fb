//! Initial data families and the `radial-field v1` text format.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{LabError, Result};
use crate::grid::{RadialField, RadialGrid};

pub const RADIAL_FIELD_HEADER: &str = "# radial-field v1";

/// Relative level below which data count as vanished at the outer boundary.
pub const SUPPORT_LEVEL: f64 = 1e-14;

/// Relative level defining the support radius of Gaussian data.
pub const GAUSSIAN_TAIL: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileFamily {
    Gaussian,
    SmoothBump,
    FromFile(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    ToU0,
    ToU1,
    /// Half of the amplitude to each of `u₀` and `u₁`.
    Split,
}

impl std::str::FromStr for Assignment {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "to_u0" | "u0" => Ok(Assignment::ToU0),
            "to_u1" | "u1" => Ok(Assignment::ToU1),
            "split" => Ok(Assignment::Split),
            other => Err(LabError::Parse(format!("unknown assignment '{other}'"))),
        }
    }
}

impl Assignment {
    pub fn as_str(self) -> &'static str {
        match self {
            Assignment::ToU0 => "to_u0",
            Assignment::ToU1 => "to_u1",
            Assignment::Split => "split",
        }
    }
}

/// Amplitude `ε`, shape and placement of the initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct DataProfile {
    pub family: ProfileFamily,
    pub epsilon: f64,
    pub width: f64,
    pub center: f64,
    pub assigns: Assignment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub u0: RadialField,
    pub u1: RadialField,
}

impl InitialData {
    pub fn zeros(grid: RadialGrid) -> Self {
        Self { u0: RadialField::zeros(grid), u1: RadialField::zeros(grid) }
    }

    pub fn grid(&self) -> &RadialGrid {
        self.u0.grid()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { u0: self.u0.scaled(c), u1: self.u1.scaled(c) }
    }

    pub fn is_zero(&self) -> bool {
        self.u0.is_zero() && self.u1.is_zero()
    }

    /// Largest node radius where either field exceeds `GAUSSIAN_TAIL` of
    /// the data's peak.
    pub fn support_radius(&self) -> f64 {
        let peak = self.u0.max_abs().max(self.u1.max_abs());
        if peak == 0.0 {
            return 0.0;
        }
        let level = GAUSSIAN_TAIL * peak;
        let grid = self.grid();
        let last = (0..grid.len())
            .rev()
            .find(|&j| self.u0.values()[j].abs() > level || self.u1.values()[j].abs() > level)
            .unwrap_or(0);
        grid.node(last)
    }
}

impl DataProfile {
    pub fn gaussian(epsilon: f64, width: f64, assigns: Assignment) -> Self {
        Self { family: ProfileFamily::Gaussian, epsilon, width, center: 0.0, assigns }
    }

    pub fn smooth_bump(epsilon: f64, width: f64, center: f64, assigns: Assignment) -> Self {
        Self { family: ProfileFamily::SmoothBump, epsilon, width, center, assigns }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(LabError::precondition(format!("epsilon = {} must be finite and >= 0", self.epsilon)));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(LabError::precondition(format!("width = {} must be > 0", self.width)));
        }
        if !(self.center.is_finite() && self.center >= 0.0) {
            return Err(LabError::precondition(format!("center = {} must be >= 0", self.center)));
        }
        Ok(())
    }

    /// Radius beyond which the profile is (numerically) zero.
    pub fn support_radius(&self) -> Option<f64> {
        match self.family {
            ProfileFamily::Gaussian => Some(self.center + self.width * (-GAUSSIAN_TAIL.ln()).sqrt()),
            ProfileFamily::SmoothBump => Some(self.center + self.width),
            ProfileFamily::FromFile(_) => None,
        }
    }
}

/// Samples `profile` on `grid`.
pub fn make_profile(profile: &DataProfile, grid: &RadialGrid) -> Result<InitialData> {
    profile.validate()?;
    let eps = profile.epsilon;
    let shape = match &profile.family {
        ProfileFamily::Gaussian => {
            let (c, w) = (profile.center, profile.width);
            RadialField::from_fn(*grid, |r| {
                let x = (r - c) / w;
                (-x * x).exp()
            })
        }
        ProfileFamily::SmoothBump => {
            let (c, w) = (profile.center, profile.width);
            RadialField::from_fn(*grid, |r| {
                let x = (r - c) / w;
                if x.abs() < 1.0 {
                    (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            })
        }
        ProfileFamily::FromFile(path) => {
            let (rs, vs) = read_radial_field(path)?;
            resample_monotone(&rs, &vs, grid)?
        }
    };
    let peak = shape.max_abs();
    let edge = shape.values()[grid.num_cells()].abs();
    if peak > 0.0 && edge > SUPPORT_LEVEL * peak {
        return Err(LabError::SupportOverflow { r: grid.r_max(), r_max: grid.r_max(), value: eps * edge });
    }
    let amplitude = |c: f64| shape.scaled(c * eps);
    Ok(match profile.assigns {
        Assignment::ToU0 => InitialData { u0: amplitude(1.0), u1: RadialField::zeros(*grid) },
        Assignment::ToU1 => InitialData { u0: RadialField::zeros(*grid), u1: amplitude(1.0) },
        Assignment::Split => InitialData { u0: amplitude(0.5), u1: amplitude(0.5) },
    })
}

/// Parses a two-column `r value` file with the `radial-field v1` header.
pub fn read_radial_field(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    parse_radial_field(&text)
}

pub fn parse_radial_field(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == RADIAL_FIELD_HEADER => {}
        other => {
            return Err(LabError::Parse(format!(
                "expected header '{RADIAL_FIELD_HEADER}', found {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let (mut rs, mut vs) = (Vec::new(), Vec::new());
    for (k, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let parse = |c: Option<&str>| -> Result<f64> {
            c.ok_or_else(|| LabError::Parse(format!("line {}: expected two columns", k + 2)))?
                .parse::<f64>()
                .map_err(|e| LabError::Parse(format!("line {}: {e}", k + 2)))
        };
        let r = parse(cols.next())?;
        let v = parse(cols.next())?;
        if cols.next().is_some() {
            return Err(LabError::Parse(format!("line {}: more than two columns", k + 2)));
        }
        if !(r.is_finite() && v.is_finite()) {
            return Err(LabError::Parse(format!("line {}: non-finite entry", k + 2)));
        }
        if let Some(&prev) = rs.last() {
            if r <= prev {
                return Err(LabError::Parse(format!("line {}: radii must be strictly increasing", k + 2)));
            }
        } else if r < 0.0 {
            return Err(LabError::Parse("radii must be non-negative".into()));
        }
        rs.push(r);
        vs.push(v);
    }
    if rs.len() < 2 {
        return Err(LabError::Parse("need at least two samples".into()));
    }
    Ok((rs, vs))
}

pub fn format_radial_field(f: &RadialField) -> String {
    let mut out = String::from(RADIAL_FIELD_HEADER);
    out.push('\n');
    for (r, v) in f.grid().nodes().zip(f.values()) {
        let _ = writeln!(out, "{r} {v}");
    }
    out
}

/// Monotone piecewise-cubic Hermite (Fritsch–Carlson) resampling onto the
/// grid. Points past the last sample are zero when the samples have
/// vanished there.
pub fn resample_monotone(rs: &[f64], vs: &[f64], grid: &RadialGrid) -> Result<RadialField> {
    let k = rs.len();
    let h: Vec<f64> = rs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..k - 1).map(|i| (vs[i + 1] - vs[i]) / h[i]).collect();
    let mut slope = vec![0.0; k];
    slope[0] = delta[0];
    slope[k - 1] = delta[k - 2];
    for i in 1..k - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            slope[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            slope[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    let peak = vs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tail_vanishes = vs[k - 1].abs() <= SUPPORT_LEVEL * peak;
    let mut out = RadialField::zeros(*grid);
    for (j, o) in out.values_mut().iter_mut().enumerate() {
        let r = grid.node(j);
        if r < rs[0] - 1e-12 * rs[0].abs().max(1.0) {
            return Err(LabError::RangeViolation { point: r, limit: rs[k - 1] });
        }
        if r > rs[k - 1] {
            if tail_vanishes {
                *o = 0.0;
                continue;
            }
            return Err(LabError::RangeViolation { point: r, limit: rs[k - 1] });
        }
        let i = match rs.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(k - 2),
            Err(i) => i.saturating_sub(1).min(k - 2),
        };
        let t = ((r - rs[i]) / h[i]).clamp(0.0, 1.0);
        let (t2, t3) = (t * t, t * t * t);
        *o = (2.0 * t3 - 3.0 * t2 + 1.0) * vs[i]
            + (t3 - 2.0 * t2 + t) * h[i] * slope[i]
            + (-2.0 * t3 + 3.0 * t2) * vs[i + 1]
            + (t3 - t2) * h[i] * slope[i + 1];
    }
    Ok(out)
}
