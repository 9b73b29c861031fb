//! Uniform radial grids and the values that live on them.

use crate::error::{LabError, Result};
use crate::problem::ProblemSpec;

pub const MIN_CELLS: usize = 16;

/// Nodes `r_j = j·Δr`, `j = 0..=num_cells`, on `[0, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_max: f64,
    num_cells: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, num_cells: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(LabError::precondition(format!("r_max = {r_max} must be finite and > 0")));
        }
        if num_cells < MIN_CELLS {
            return Err(LabError::precondition(format!("num_cells = {num_cells} must be >= {MIN_CELLS}")));
        }
        Ok(Self { r_max, num_cells })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn len(&self) -> usize {
        self.num_cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.num_cells as f64
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let dr = self.spacing();
        (0..self.len()).map(move |j| j as f64 * dr)
    }

    /// Same domain with twice as many cells.
    pub fn refined(&self) -> Self {
        Self { r_max: self.r_max, num_cells: 2 * self.num_cells }
    }
}

/// Nodal samples of a radial function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::precondition(format!(
                "field has {} values but the grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: RadialGrid, f: impl FnMut(f64) -> f64) -> Self {
        Self { grid, values: grid.nodes().map(f).collect() }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn check_finite(&self, what: &str) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(LabError::NonFinite { what: what.to_string(), index }),
            None => Ok(()),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|x| c * x)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&x| f(x)).collect() }
    }

    /// Nodewise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&x, &y)| f(x, y)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub(crate) fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(LabError::precondition("fields live on different grids"));
        }
        Ok(())
    }
}

/// `(u, ∂ₜu)` at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub time: f64,
    pub u: RadialField,
    pub v: RadialField,
}

impl WaveState {
    pub fn new(time: f64, u: RadialField, v: RadialField) -> Result<Self> {
        if !time.is_finite() {
            return Err(LabError::precondition(format!("state time {time} is not finite")));
        }
        u.ensure_same_grid(&v)?;
        Ok(Self { time, u, v })
    }

    pub fn grid(&self) -> &RadialGrid {
        self.u.grid()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { time: self.time, u: self.u.scaled(c), v: self.v.scaled(c) }
    }

    pub fn check_finite(&self) -> Result<()> {
        self.u.check_finite("u")?;
        self.v.check_finite("v")
    }
}

/// Relative tolerance on equal sampling gaps.
pub const STRIDE_TOLERANCE: f64 = 1e-12;

/// Time-ordered states at a fixed sampling interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    problem: ProblemSpec,
    states: Vec<WaveState>,
    dt_sample: f64,
}

impl Trajectory {
    pub fn new(problem: ProblemSpec, states: Vec<WaveState>, dt_sample: f64) -> Result<Self> {
        if states.is_empty() {
            return Err(LabError::precondition("trajectory needs at least one state"));
        }
        if states.len() > 1 && !(dt_sample.is_finite() && dt_sample > 0.0) {
            return Err(LabError::precondition(format!("dt_sample = {dt_sample} must be > 0")));
        }
        let grid = *states[0].grid();
        for (k, pair) in states.windows(2).enumerate() {
            let gap = pair[1].time - pair[0].time;
            if !(gap > 0.0) || (gap - dt_sample).abs() > STRIDE_TOLERANCE * dt_sample.max(pair[1].time.abs()) {
                return Err(LabError::precondition(format!(
                    "sample gap {gap} after state {k} differs from dt_sample = {dt_sample}"
                )));
            }
        }
        if states.iter().any(|s| *s.grid() != grid) {
            return Err(LabError::precondition("trajectory states live on different grids"));
        }
        Ok(Self { problem, states, dt_sample })
    }

    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    pub fn states(&self) -> &[WaveState] {
        &self.states
    }

    pub fn dt_sample(&self) -> f64 {
        self.dt_sample
    }

    pub fn grid(&self) -> &RadialGrid {
        self.states[0].grid()
    }

    pub fn first(&self) -> &WaveState {
        &self.states[0]
    }

    pub fn last(&self) -> &WaveState {
        self.states.last().expect("non-empty by construction")
    }

    pub fn start_time(&self) -> f64 {
        self.first().time
    }

    pub fn end_time(&self) -> f64 {
        self.last().time
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Zero trajectory on the same sample times.
    pub fn zeros_like(&self) -> Self {
        let states = self
            .states
            .iter()
            .map(|s| WaveState { time: s.time, u: RadialField::zeros(*s.grid()), v: RadialField::zeros(*s.grid()) })
            .collect();
        Self { problem: self.problem, states, dt_sample: self.dt_sample }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            problem: self.problem,
            states: self.states.iter().map(|s| s.scaled(c)).collect(),
            dt_sample: self.dt_sample,
        }
    }

    /// Statewise `self - other`; both must share sample times and grid.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.states.len() != other.states.len() {
            return Err(LabError::precondition(format!(
                "trajectories have {} and {} states",
                self.states.len(),
                other.states.len()
            )));
        }
        let mut states = Vec::with_capacity(self.states.len());
        for (a, b) in self.states.iter().zip(&other.states) {
            if (a.time - b.time).abs() > STRIDE_TOLERANCE * a.time.abs().max(1.0) {
                return Err(LabError::precondition("trajectories are sampled at different times"));
            }
            states.push(WaveState { time: a.time, u: a.u.sub(&b.u)?, v: a.v.sub(&b.v)? });
        }
        Ok(Self { problem: self.problem, states, dt_sample: self.dt_sample })
    }

    pub fn check_finite(&self) -> Result<()> {
        self.states.iter().try_for_each(WaveState::check_finite)
    }
}
