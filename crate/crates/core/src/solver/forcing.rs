use crate::error::{LabError, Result};
use crate::grid::{RadialField, RadialGrid, STRIDE_TOLERANCE};

/// A time-dependent radial source term `F(t, r)`.
pub trait Forcing: Sync {
    /// Writes `F(t, r_j)` into `out` (one value per grid node).
    fn eval_into(&self, t: f64, grid: &RadialGrid, out: &mut [f64]);
}

/// Forcing given by a closure of `(t, r)`.
pub struct FnForcing<F>(pub F);

impl<F> Forcing for FnForcing<F>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    fn eval_into(&self, t: f64, grid: &RadialGrid, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = (self.0)(t, grid.node(j));
        }
    }
}

/// Forcing sampled at a fixed stride, linear in time between samples and
/// held constant past the last sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingHistory {
    start: f64,
    dt_sample: f64,
    samples: Vec<RadialField>,
}

impl ForcingHistory {
    pub fn new(start: f64, dt_sample: f64, samples: Vec<RadialField>) -> Result<Self> {
        if samples.is_empty() {
            return Err(LabError::precondition("forcing history needs at least one sample"));
        }
        if samples.len() > 1 && !(dt_sample > 0.0 && dt_sample.is_finite()) {
            return Err(LabError::precondition(format!("dt_sample = {dt_sample} must be > 0")));
        }
        let grid = *samples[0].grid();
        for s in &samples {
            if *s.grid() != grid {
                return Err(LabError::precondition("forcing samples live on different grids"));
            }
            s.check_finite("forcing")?;
        }
        Ok(Self { start, dt_sample, samples })
    }

    /// Samples a forcing at `start + k·dt_sample`, `k = 0..count`.
    pub fn sample(forcing: &dyn Forcing, grid: RadialGrid, start: f64, dt_sample: f64, count: usize) -> Result<Self> {
        let samples = (0..count)
            .map(|k| {
                let mut f = RadialField::zeros(grid);
                forcing.eval_into(start + k as f64 * dt_sample, &grid, f.values_mut());
                f
            })
            .collect();
        Self::new(start, dt_sample, samples)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn dt_sample(&self) -> f64 {
        self.dt_sample
    }

    pub fn samples(&self) -> &[RadialField] {
        &self.samples
    }

    pub fn grid(&self) -> &RadialGrid {
        self.samples[0].grid()
    }

    pub fn end_time(&self) -> f64 {
        self.start + (self.samples.len() - 1) as f64 * self.dt_sample
    }

    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.dt_sample
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { start: self.start, dt_sample: self.dt_sample, samples: self.samples.iter().map(|s| s.scaled(c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.samples.len() != other.samples.len()
            || (self.dt_sample - other.dt_sample).abs() > STRIDE_TOLERANCE * self.dt_sample
        {
            return Err(LabError::precondition("forcing histories are sampled differently"));
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(Self { start: self.start, dt_sample: self.dt_sample, samples })
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(RadialField::is_zero)
    }
}

impl Forcing for ForcingHistory {
    fn eval_into(&self, t: f64, _grid: &RadialGrid, out: &mut [f64]) {
        let last = self.samples.len() - 1;
        let x = if last == 0 { 0.0 } else { ((t - self.start) / self.dt_sample).clamp(0.0, last as f64) };
        let k = (x.floor() as usize).min(last);
        let theta = x - k as f64;
        let lo = self.samples[k].values();
        if theta <= 0.0 || k == last {
            out.copy_from_slice(lo);
        } else {
            let hi = self.samples[k + 1].values();
            for ((o, a), b) in out.iter_mut().zip(lo).zip(hi) {
                *o = a + theta * (b - a);
            }
        }
    }
}
