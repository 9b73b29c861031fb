//! Method-of-lines evolution of `□u = a|∂ₜu|ᵖ + b|∂ᵣu|ᵖ + F` for radial
//! data with classical RK4.

use crate::calculus::{derivative_into, laplacian_into, radial_derivative};
use crate::error::{LabError, Result};
use crate::grid::{RadialField, RadialGrid, Trajectory, WaveState};
use crate::norms::NormWeights;
use crate::problem::ProblemSpec;

use super::forcing::{Forcing, ForcingHistory};
use super::profile::InitialData;

/// Blow-up is declared once `max(|∂ₜu|, |∂ᵣu|)` exceeds this.
pub const BLOWUP_THRESHOLD: f64 = 1e6;

/// Extra radius kept between the light cone of the data and `r_max`.
pub const CAUSALITY_MARGIN: f64 = 2.0;

pub const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// `Δt = cfl·Δr` (upper bound; the step is shrunk to land on samples).
    pub cfl: f64,
    /// Solver steps between recorded states when `sample_interval` is unset.
    pub steps_per_sample: usize,
    /// Fixed recording interval; `t_end` must be a multiple of it.
    pub sample_interval: Option<f64>,
    pub blowup_threshold: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { cfl: 0.25, steps_per_sample: 10, sample_interval: None, blowup_threshold: BLOWUP_THRESHOLD }
    }
}

impl EvolveOptions {
    pub fn with_sample_interval(self, interval: f64) -> Self {
        Self { sample_interval: Some(interval), ..self }
    }

    pub fn with_cfl(self, cfl: f64) -> Self {
        Self { cfl, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Completed,
    BlewUp,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Completed => "completed",
            SolveStatus::BlewUp => "blew_up",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Recorded states up to `t_end` or the last sample before detection.
    pub trajectory: Trajectory,
    pub t_blowup: Option<f64>,
    /// Largest `max(|∂ₜu|, |∂ᵣu|)` seen at any step.
    pub peak_gradient: f64,
    /// Forcing sampled at the trajectory's times, when a forcing was given.
    pub forcing: Option<ForcingHistory>,
}

/// Nodewise `a|v|ᵖ + b|∂ᵣu|ᵖ`, with `0ᵖ = 0`.
pub fn nonlinearity(state: &WaveState, spec: &ProblemSpec) -> Result<RadialField> {
    state.check_finite()?;
    let ur = radial_derivative(&state.u);
    let mut out = RadialField::zeros(*state.grid());
    nonlinearity_into(state.v.values(), ur.values(), spec, out.values_mut());
    Ok(out)
}

#[inline]
fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        0.0
    } else if p == 2.0 {
        a * a
    } else {
        (p * a.ln()).exp()
    }
}

pub(crate) fn nonlinearity_into(v: &[f64], ur: &[f64], spec: &ProblemSpec, out: &mut [f64]) {
    let (a, b, p) = (spec.a, spec.b, spec.p);
    for ((o, &vj), &dj) in out.iter_mut().zip(v).zip(ur) {
        let mut acc = 0.0;
        if a != 0.0 {
            acc += a * abs_pow(vj, p);
        }
        if b != 0.0 {
            acc += b * abs_pow(dj, p);
        }
        *o = acc;
    }
}

/// `½|S^{n-1}| ∫ (v² + (∂ᵣu)²) r^{n-1} dr`.
pub fn energy(state: &WaveState, n: usize) -> Result<f64> {
    state.check_finite()?;
    let plain = NormWeights::new(state.grid(), n, 0.0, 0.0)?;
    let ur = radial_derivative(&state.u);
    Ok(0.5 * (plain.norm_sq(state.v.values()) + plain.norm_sq(ur.values())))
}

struct Rhs<'a> {
    spec: &'a ProblemSpec,
    grid: RadialGrid,
    nonlinear: bool,
    forcing: Option<&'a dyn Forcing>,
    ur: Vec<f64>,
    nl: Vec<f64>,
    src: Vec<f64>,
}

impl Rhs<'_> {
    /// `u̇ = v`, `v̇ = Δu + N + F`; the outer node is held fixed.
    fn eval(&mut self, t: f64, u: &[f64], v: &[f64], du: &mut [f64], dv: &mut [f64]) {
        let m = u.len() - 1;
        let dr = self.grid.spacing();
        du.copy_from_slice(v);
        du[m] = 0.0;
        laplacian_into(u, dr, self.spec.n_dim, dv);
        if self.nonlinear {
            derivative_into(u, dr, &mut self.ur);
            // the radial derivative vanishes at the origin for smooth radial u
            self.ur[0] = 0.0;
            nonlinearity_into(v, &self.ur, self.spec, &mut self.nl);
            for (d, n) in dv.iter_mut().zip(&self.nl) {
                *d += n;
            }
        }
        if let Some(f) = self.forcing {
            f.eval_into(t, &self.grid, &mut self.src);
            for (d, s) in dv.iter_mut().zip(&self.src) {
                *d += s;
            }
        }
        dv[m] = 0.0;
    }
}

/// Plans `(dt, steps_per_sample, samples)` so that samples land exactly on
/// `k·dt_sample` and the last one on `t_end`.
fn plan_steps(t_end: f64, dr: f64, opts: &EvolveOptions) -> Result<(f64, usize, usize)> {
    if !(opts.cfl > 0.0 && opts.cfl.is_finite()) {
        return Err(LabError::precondition(format!("cfl = {} must be > 0", opts.cfl)));
    }
    let max_dt = opts.cfl * dr;
    if t_end == 0.0 {
        return Ok((max_dt, 1, 0));
    }
    let (dt_sample, samples) = match opts.sample_interval {
        Some(si) => {
            if !(si > 0.0 && si.is_finite()) {
                return Err(LabError::precondition(format!("sample interval {si} must be > 0")));
            }
            let count = (t_end / si).round();
            if count < 1.0 || (count * si - t_end).abs() > 1e-9 * t_end {
                return Err(LabError::precondition(format!(
                    "t_end = {t_end} is not a multiple of the sample interval {si}"
                )));
            }
            (t_end / count, count as usize)
        }
        None => {
            if opts.steps_per_sample == 0 {
                return Err(LabError::precondition("steps_per_sample must be >= 1"));
            }
            let stride = opts.steps_per_sample as f64 * max_dt;
            let count = (t_end / stride).ceil().max(1.0);
            (t_end / count, count as usize)
        }
    };
    let per_sample = (dt_sample / max_dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let dt = dt_sample / per_sample as f64;
    if dt < MIN_STEP {
        return Err(LabError::StepUnderflow { dt });
    }
    Ok((dt, per_sample, samples))
}

/// Evolves `data` from `t = 0` to `t_end`.
///
/// With `linear_only` the nonlinearity is dropped (the forcing, if any, is
/// kept). The run stops early with [`SolveStatus::BlewUp`] once
/// `max(|v|, |∂ᵣu|)` exceeds the threshold or a non-finite value appears.
pub fn evolve(
    spec: &ProblemSpec,
    data: &InitialData,
    grid: &RadialGrid,
    t_end: f64,
    forcing: Option<&dyn Forcing>,
    linear_only: bool,
    opts: &EvolveOptions,
) -> Result<SolveOutcome> {
    if data.grid() != grid {
        return Err(LabError::precondition("initial data live on a different grid"));
    }
    data.u0.check_finite("u0")?;
    data.u1.check_finite("u1")?;
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(LabError::precondition(format!("t_end = {t_end} must be finite and >= 0")));
    }
    let reach = data.support_radius() + t_end + CAUSALITY_MARGIN;
    if reach > grid.r_max() {
        return Err(LabError::precondition(format!(
            "causality: support {} + t_end {t_end} + {CAUSALITY_MARGIN} exceeds r_max = {}",
            data.support_radius(),
            grid.r_max()
        )));
    }
    let (dt, per_sample, samples) = plan_steps(t_end, grid.spacing(), opts)?;
    let dt_sample = dt * per_sample as f64;
    let len = grid.len();
    let mut rhs = Rhs {
        spec,
        grid: *grid,
        nonlinear: !linear_only && !spec.is_linear(),
        forcing,
        ur: vec![0.0; len],
        nl: vec![0.0; len],
        src: vec![0.0; len],
    };

    let mut u = data.u0.values().to_vec();
    let mut v = data.u1.values().to_vec();
    let mut k = [(); 4].map(|_| (vec![0.0; len], vec![0.0; len]));
    let mut tu = vec![0.0; len];
    let mut tv = vec![0.0; len];
    let mut ur = vec![0.0; len];

    let record = |t: f64, u: &[f64], v: &[f64]| WaveState {
        time: t,
        u: RadialField::new(*grid, u.to_vec()).expect("grid length"),
        v: RadialField::new(*grid, v.to_vec()).expect("grid length"),
    };
    let sample_forcing = |t: f64| {
        forcing.map(|f| {
            let mut s = RadialField::zeros(*grid);
            f.eval_into(t, grid, s.values_mut());
            s
        })
    };
    let mut states = vec![record(0.0, &u, &v)];
    let mut forcing_samples: Vec<RadialField> = sample_forcing(0.0).into_iter().collect();

    let gradient_peak = |u: &[f64], v: &[f64], ur: &mut [f64]| -> f64 {
        derivative_into(u, grid.spacing(), ur);
        ur[0] = 0.0;
        let mut m = 0.0_f64;
        for (a, b) in v.iter().zip(ur.iter()) {
            let x = a.abs().max(b.abs());
            if x.is_nan() {
                return f64::INFINITY;
            }
            m = m.max(x);
        }
        m
    };
    let mut peak = gradient_peak(&u, &v, &mut ur);
    let mut status = SolveStatus::Completed;
    let mut t_blowup = None;

    'outer: for s in 0..samples {
        for step in 0..per_sample {
            let t = (s * per_sample + step) as f64 * dt;
            rhs.eval(t, &u, &v, &mut k[0].0, &mut k[0].1);
            for i in 0..len {
                tu[i] = u[i] + 0.5 * dt * k[0].0[i];
                tv[i] = v[i] + 0.5 * dt * k[0].1[i];
            }
            rhs.eval(t + 0.5 * dt, &tu, &tv, &mut k[1].0, &mut k[1].1);
            for i in 0..len {
                tu[i] = u[i] + 0.5 * dt * k[1].0[i];
                tv[i] = v[i] + 0.5 * dt * k[1].1[i];
            }
            rhs.eval(t + 0.5 * dt, &tu, &tv, &mut k[2].0, &mut k[2].1);
            for i in 0..len {
                tu[i] = u[i] + dt * k[2].0[i];
                tv[i] = v[i] + dt * k[2].1[i];
            }
            rhs.eval(t + dt, &tu, &tv, &mut k[3].0, &mut k[3].1);
            for i in 0..len {
                u[i] += dt / 6.0 * (k[0].0[i] + 2.0 * k[1].0[i] + 2.0 * k[2].0[i] + k[3].0[i]);
                v[i] += dt / 6.0 * (k[0].1[i] + 2.0 * k[1].1[i] + 2.0 * k[2].1[i] + k[3].1[i]);
            }
            let g = gradient_peak(&u, &v, &mut ur);
            peak = peak.max(g);
            if !(g <= opts.blowup_threshold) {
                status = SolveStatus::BlewUp;
                t_blowup = Some(t + dt);
                break 'outer;
            }
        }
        let t = if s + 1 == samples { t_end } else { (s + 1) as f64 * dt_sample };
        states.push(record(t, &u, &v));
        if let Some(f) = sample_forcing(t) {
            forcing_samples.push(f);
        }
    }

    let trajectory = Trajectory::new(*spec, states, dt_sample)?;
    let forcing = if forcing.is_some() {
        Some(ForcingHistory::new(0.0, dt_sample, forcing_samples)?)
    } else {
        None
    };
    Ok(SolveOutcome { status, trajectory, t_blowup, peak_gradient: peak, forcing })
}

/// `I[F]`: zero data, linear propagation with source `F`.
pub fn duhamel(
    forcing: &dyn Forcing,
    t_end: f64,
    spec: &ProblemSpec,
    grid: &RadialGrid,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    let out = evolve(spec, &InitialData::zeros(*grid), grid, t_end, Some(forcing), true, opts)?;
    Ok(out.trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::forcing::FnForcing;
    use crate::solver::profile::{make_profile, Assignment, DataProfile};

    #[test]
    fn nonlinearity_pointwise_cases() {
        let g = RadialGrid::new(4.0, 40).unwrap();
        let spec = ProblemSpec::new(3, 1.7, 1.0, 0.0).unwrap();
        let st = WaveState::new(0.0, RadialField::zeros(g), RadialField::from_fn(g, |_| 2.0)).unwrap();
        let n = nonlinearity(&st, &spec).unwrap();
        assert!(n.values().iter().all(|&x| (x - 2f64.powf(1.7)).abs() < 1e-12));
        let zero = ProblemSpec::new(3, 1.7, 0.0, 0.0).unwrap();
        assert!(nonlinearity(&st, &zero).unwrap().is_zero());
    }

    #[test]
    fn nonlinearity_bounded_by_max_gradient() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let g = RadialGrid::new(4.0, 64).unwrap();
        for _ in 0..50 {
            let spec = ProblemSpec::new(3, rng.gen_range(1.1..4.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)).unwrap();
            let u = RadialField::from_fn(g, |_| rng.gen_range(-3.0..3.0));
            let v = RadialField::from_fn(g, |_| rng.gen_range(-3.0..3.0));
            let ur = radial_derivative(&u);
            let st = WaveState::new(0.0, u, v.clone()).unwrap();
            let n = nonlinearity(&st, &spec).unwrap();
            for j in 0..g.len() {
                let m = v.values()[j].abs().max(ur.values()[j].abs());
                let bound = (spec.a.abs() + spec.b.abs()) * m.powf(spec.p);
                assert!(n.values()[j].abs() <= bound * (1.0 + 1e-12) + 1e-300);
            }
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = RadialGrid::new(10.0, 200).unwrap();
        let spec = ProblemSpec::new(3, 2.0, 1.0, 1.0).unwrap();
        let out = evolve(&spec, &InitialData::zeros(g), &g, 2.0, None, false, &EvolveOptions::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Completed);
        assert!(out.trajectory.states().iter().all(|s| s.u.is_zero() && s.v.is_zero()));
    }

    #[test]
    fn causality_precondition_enforced() {
        let g = RadialGrid::new(10.0, 200).unwrap();
        let data = make_profile(&DataProfile::gaussian(1.0, 1.0, Assignment::ToU0), &g).unwrap();
        let err = evolve(&ProblemSpec::linear(3), &data, &g, 5.0, None, true, &EvolveOptions::default()).unwrap_err();
        assert!(matches!(err, LabError::PreconditionViolation(_)));
    }

    #[test]
    fn samples_on_fixed_stride() {
        let g = RadialGrid::new(12.0, 200).unwrap();
        let data = make_profile(&DataProfile::gaussian(1.0, 1.0, Assignment::ToU0), &g).unwrap();
        let opts = EvolveOptions::default().with_sample_interval(0.25);
        let out = evolve(&ProblemSpec::linear(3), &data, &g, 2.0, None, true, &opts).unwrap();
        assert_eq!(out.trajectory.len(), 9);
        assert_eq!(out.trajectory.end_time(), 2.0);
        assert!(evolve(&ProblemSpec::linear(3), &data, &g, 2.1, None, true, &opts).is_err());
    }

    #[test]
    fn step_underflow_reported() {
        let g = RadialGrid::new(12.0, 200).unwrap();
        let data = make_profile(&DataProfile::gaussian(1.0, 1.0, Assignment::ToU0), &g).unwrap();
        let opts = EvolveOptions::default().with_cfl(1e-13);
        let err = evolve(&ProblemSpec::linear(3), &data, &g, 1.0, None, true, &opts).unwrap_err();
        assert!(matches!(err, LabError::StepUnderflow { .. }));
    }

    #[test]
    fn duhamel_zero_forcing_is_zero() {
        let g = RadialGrid::new(8.0, 160).unwrap();
        let f = FnForcing(|_: f64, _: f64| 0.0);
        let traj = duhamel(&f, 2.0, &ProblemSpec::linear(3), &g, &EvolveOptions::default()).unwrap();
        assert!(traj.states().iter().all(|s| s.u.is_zero() && s.v.is_zero()));
    }

    #[test]
    fn energy_is_quadratic() {
        let g = RadialGrid::new(8.0, 400).unwrap();
        let d = make_profile(&DataProfile::gaussian(1.0, 1.0, Assignment::Split), &g).unwrap();
        let st = WaveState::new(0.0, d.u0, d.u1).unwrap();
        let e = energy(&st, 3).unwrap();
        let e3 = energy(&st.scaled(3.0), 3).unwrap();
        assert!((e3 - 9.0 * e).abs() <= 1e-13 * e3);
        assert_eq!(energy(&st.scaled(0.0), 3).unwrap(), 0.0);
    }
}
