//! Empirical checks of the weighted Hardy, trace and local-energy
//! inequalities on sampled radial functions and computed waves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::calculus::radial_derivative;
use crate::error::{LabError, Result};
use crate::grid::{RadialField, RadialGrid, Trajectory};
use crate::norms::{
    e_norms, e_norms_until, lambda_norms, le_norm, lestar_upper, sup_weighted, state_energy_sq, weighted_l2,
    NormWeights,
};
use crate::problem::{ProblemSpec, WeightParams};
use crate::quadrature::{japanese, time_trapezoid};
use crate::solver::{evolve, EvolveOptions, Forcing, ForcingHistory, InitialData};

/// Relative slack before a ratio above its bound counts as a violation.
pub const DEFAULT_TOL: f64 = 1e-3;

/// Width of the uniformity band for the local-energy estimates.
pub const KSS_BAND: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaId {
    Hardy,
    Trace,
    TraceVariant,
    Decay,
    KssHom,
    KssInhom,
    EnergyIneq,
}

impl LemmaId {
    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::Hardy => "hardy",
            LemmaId::Trace => "trace",
            LemmaId::TraceVariant => "trace_variant",
            LemmaId::Decay => "decay",
            LemmaId::KssHom => "kss_hom",
            LemmaId::KssInhom => "kss_inhom",
            LemmaId::EnergyIneq => "energy_ineq",
        }
    }
}

impl std::str::FromStr for LemmaId {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hardy" => LemmaId::Hardy,
            "trace" => LemmaId::Trace,
            "trace_variant" => LemmaId::TraceVariant,
            "decay" => LemmaId::Decay,
            "kss_hom" => LemmaId::KssHom,
            "kss_inhom" => LemmaId::KssInhom,
            "energy_ineq" => LemmaId::EnergyIneq,
            other => return Err(LabError::Parse(format!("unknown lemma '{other}'"))),
        })
    }
}

/// Parameters a check was run with; unset entries do not apply.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IneqParams {
    pub n: usize,
    pub s: Option<f64>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub delta: Option<f64>,
    pub delta_prime: Option<f64>,
    pub horizon: Option<f64>,
}

impl IneqParams {
    fn dim(n: usize) -> Self {
        Self { n, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IneqSample {
    pub lemma: LemmaId,
    pub params: IneqParams,
    /// LHS / RHS.
    pub ratio: f64,
    pub bound: Option<f64>,
    pub tol: f64,
    pub seed: u64,
    /// Labeled pieces of the left side, kept for audit.
    pub detail: Vec<(&'static str, f64)>,
}

impl IneqSample {
    fn new(lemma: LemmaId, params: IneqParams, ratio: f64, bound: Option<f64>) -> Self {
        Self { lemma, params, ratio, bound, tol: DEFAULT_TOL, seed: 0, detail: Vec::new() }
    }

    pub fn violation(&self) -> bool {
        self.bound.is_some_and(|b| self.ratio > b * (1.0 + self.tol))
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Sum of `num_terms` Gaussians with centers in `[0, r_max/2]`, widths in
/// `[0.2, 2]` and amplitudes in `[-1, 1]`, drawn from `seed`.
pub fn random_radial(seed: u64, grid: &RadialGrid, num_terms: usize) -> Result<RadialField> {
    let terms = draw_terms(seed, grid, num_terms)?;
    Ok(RadialField::from_fn(*grid, |r| {
        terms.iter().map(|&(c, w, a)| a * (-((r - c) / w).powi(2)).exp()).sum()
    }))
}

/// Like [`random_radial`] with smooth compactly supported bumps
/// `exp(-1/(1-x²))`, `x = (r-c)/w`, in place of the Gaussians.
pub fn random_compact_radial(seed: u64, grid: &RadialGrid, num_terms: usize) -> Result<RadialField> {
    let terms = draw_terms(seed, grid, num_terms)?;
    Ok(RadialField::from_fn(*grid, |r| {
        terms
            .iter()
            .map(|&(c, w, a)| {
                let x = (r - c) / w;
                if x.abs() < 1.0 {
                    a * (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            })
            .sum()
    }))
}

fn draw_terms(seed: u64, grid: &RadialGrid, num_terms: usize) -> Result<Vec<(f64, f64, f64)>> {
    if !(1..=20).contains(&num_terms) {
        return Err(LabError::precondition(format!("num_terms = {num_terms} must lie in [1, 20]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = grid.r_max() / 2.0;
    Ok((0..num_terms)
        .map(|_| (rng.gen_range(0.0..=half), rng.gen_range(0.2..=2.0), rng.gen_range(-1.0..=1.0)))
        .collect())
}

fn nonzero(f: &RadialField, what: &str) -> Result<()> {
    f.check_finite(what)?;
    if f.is_zero() {
        return Err(LabError::DegenerateInput(format!("{what} vanishes identically")));
    }
    Ok(())
}

fn interpolated(f: &RadialField, n: usize, s: f64) -> Result<f64> {
    let plain = weighted_l2(f, n, 0.0, 0.0)?;
    let grad = weighted_l2(&radial_derivative(f), n, 0.0, 0.0)?;
    let den = plain.powf(1.0 - s) * grad.powf(s);
    if den == 0.0 {
        return Err(LabError::DegenerateInput("vanishing right-hand side".into()));
    }
    Ok(den)
}

/// Constant in `‖r^{-s}f‖ ≤ C‖f‖^{1-s}‖∂ᵣf‖^s`: `(2/(n-2s))^s` for
/// `s ≥ 1/2`, and `(2/(n-1))^s` below, where the bound is obtained by
/// interpolating with the `s = 1/2` case.
pub fn hardy_constant(n: usize, s: f64) -> f64 {
    let n = n as f64;
    if s >= 0.5 {
        (2.0 / (n - 2.0 * s)).powf(s)
    } else {
        (2.0 / (n - 1.0)).powf(s)
    }
}

fn check_s_range(n: usize, s: f64, lo: f64) -> Result<()> {
    if !(lo..=1.0).contains(&s) || (n == 2 && s >= 1.0) {
        return Err(LabError::precondition(format!("s = {s} outside [{lo}, 1] (s < 1 when n = 2), n = {n}")));
    }
    Ok(())
}

pub fn hardy_check(f: &RadialField, n: usize, s: f64) -> Result<IneqSample> {
    check_s_range(n, s, 0.0)?;
    nonzero(f, "hardy input")?;
    let lhs = weighted_l2(f, n, -s, 0.0)?;
    let ratio = lhs / interpolated(f, n, s)?;
    let params = IneqParams { s: Some(s), ..IneqParams::dim(n) };
    Ok(IneqSample::new(LemmaId::Hardy, params, ratio, Some(hardy_constant(n, s))))
}

/// `‖r^{n/2-s}f‖_{L^∞_r L²_ω} / (‖f‖^{1-s}‖∂ᵣf‖^s)`; no bound is asserted.
pub fn trace_check(f: &RadialField, n: usize, s: f64) -> Result<IneqSample> {
    check_s_range(n, s, 0.5)?;
    nonzero(f, "trace input")?;
    let lhs = sup_weighted(f, n, n as f64 / 2.0 - s)?;
    let ratio = lhs / interpolated(f, n, s)?;
    let params = IneqParams { s: Some(s), ..IneqParams::dim(n) };
    Ok(IneqSample::new(LemmaId::Trace, params, ratio, None))
}

/// `‖rˢf‖_{L^∞_r L²_ω} ≤ √2 ‖r^{s-(n-1)/2}f‖^{1/2} ‖r^{s-(n-1)/2}∂ᵣf‖^{1/2}`.
pub fn trace_variant_check(f: &RadialField, n: usize, s: f64) -> Result<IneqSample> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(LabError::precondition(format!("s = {s} must be >= 0")));
    }
    nonzero(f, "trace_variant input")?;
    let mu = s - (n as f64 - 1.0) / 2.0;
    if mu <= -(n as f64) / 2.0 {
        return Err(LabError::NonIntegrable(format!("r^{mu} is not square integrable at the origin in {n} dimensions")));
    }
    let lhs = sup_weighted(f, n, s)?;
    let a = weighted_l2(f, n, mu, 0.0)?;
    let b = weighted_l2(&radial_derivative(f), n, mu, 0.0)?;
    let den = (a * b).sqrt();
    if den == 0.0 {
        return Err(LabError::DegenerateInput("vanishing right-hand side".into()));
    }
    let params = IneqParams { s: Some(s), ..IneqParams::dim(n) };
    Ok(IneqSample::new(LemmaId::TraceVariant, params, lhs / den, Some(2f64.sqrt())))
}

/// Empirical constant in `|∂u| ≤ C r^{s₂-n/2}⟨r⟩^{s₁-s₂}(E₁^{1-s₁}E₂^{s₁} + E₁^{1-s₂}E₂^{s₂})`
/// over all samples and nodes `r > 0`.
pub fn decay_envelope_check(traj: &Trajectory, s1: f64, s2: f64) -> Result<IneqSample> {
    if !(0.5 <= s1 && s1 < s2 && s2 <= 1.0) {
        return Err(LabError::precondition(format!("need 1/2 <= s1 < s2 <= 1, got s1 = {s1}, s2 = {s2}")));
    }
    let n = traj.problem().n_dim;
    let e = e_norms(traj)?;
    let den = e.e1.powf(1.0 - s1) * e.e2.powf(s1) + e.e1.powf(1.0 - s2) * e.e2.powf(s2);
    if den == 0.0 {
        return Err(LabError::DegenerateInput("zero trajectory".into()));
    }
    let grid = traj.grid();
    let weight: Vec<f64> =
        grid.nodes().map(|r| r.powf(n as f64 / 2.0 - s2) * japanese(r).powf(s2 - s1)).collect();
    let mut sup = 0.0_f64;
    for st in traj.states() {
        let ur = radial_derivative(&st.u);
        for j in 1..grid.len() {
            let d = st.v.values()[j].hypot(ur.values()[j]);
            sup = sup.max(d * weight[j]);
        }
    }
    let params = IneqParams { s1: Some(s1), s2: Some(s2), ..IneqParams::dim(n) };
    Ok(IneqSample::new(LemmaId::Decay, params, sup / den, None))
}

fn kss_params(n: usize, w: &WeightParams, horizon: f64) -> IneqParams {
    IneqParams { delta: Some(w.delta()), delta_prime: Some(w.delta_prime()), horizon: Some(horizon), ..IneqParams::dim(n) }
}

fn sorted_horizons(t_list: &[f64]) -> Result<Vec<f64>> {
    if t_list.is_empty() || t_list.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(LabError::precondition("T list must be non-empty with finite positive entries"));
    }
    let mut ts = t_list.to_vec();
    ts.sort_by(f64::total_cmp);
    Ok(ts)
}

/// `(E₁ + LE₁)` and the LE breakdown on `[0, T]` for each `T`, read from one
/// trajectory reaching `max T`.
fn le_family(traj: &Trajectory, w: &WeightParams, ts: &[f64]) -> Result<Vec<(f64, Vec<(&'static str, f64)>)>> {
    let n = traj.problem().n_dim;
    ts.iter()
        .map(|&t| {
            let wt = w.with_horizon(t)?;
            let le = le_norm(traj, &wt, n)?;
            let e1 = e_norms_until(traj, t)?.e1;
            let mut detail = vec![("e1", e1), ("le1", le.total)];
            detail.extend(le.components.iter().map(|(k, v)| (*k, *v)));
            Ok((e1 + le.total, detail))
        })
        .collect()
}

/// Attaches the uniformity band `KSS_BAND × ratio(T_min)` as each sample's bound.
fn banded(mut samples: Vec<IneqSample>) -> Vec<IneqSample> {
    if let Some(first) = samples.first().map(|s| s.ratio) {
        for s in &mut samples {
            s.bound = Some(KSS_BAND * first);
            s.tol = 0.0;
        }
    }
    samples
}

/// `(E₁ + LE₁(T)) / (‖∂ᵣu₀‖ + ‖u₁‖)` for the free wave, one sample per `T`
/// in increasing order, each bounded by `1.25 × ratio(T_min)`.
pub fn kss_hom_check(
    data: &InitialData,
    n: usize,
    w: &WeightParams,
    t_list: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<IneqSample>> {
    let ts = sorted_horizons(t_list)?;
    let den = lambda_norms(&data.u0, &data.u1, n)?.lambda1;
    if den == 0.0 {
        return Err(LabError::DegenerateInput("zero data".into()));
    }
    let spec = ProblemSpec::linear(n);
    let t_max = *ts.last().unwrap();
    let out = evolve(&spec, data, data.grid(), t_max, None, true, opts)?;
    let family = le_family(&out.trajectory, w, &ts)?;
    let samples = ts
        .iter()
        .zip(family)
        .map(|(&t, (num, detail))| IneqSample {
            detail,
            ..IneqSample::new(LemmaId::KssHom, kss_params(n, w, t), num / den, None)
        })
        .collect();
    Ok(banded(samples))
}

/// Smooth space-time bump `A·exp(-1/(1-x))`, `x = ((t-t₀)/τ)² + (r/ρ)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpForcing {
    pub amplitude: f64,
    pub t_center: f64,
    pub t_width: f64,
    pub r_width: f64,
}

impl BumpForcing {
    /// Supported in `(0, 1/2) × {r < 1}`.
    pub fn unit(amplitude: f64) -> Self {
        Self { amplitude, t_center: 0.25, t_width: 0.25, r_width: 1.0 }
    }

    pub fn value(&self, t: f64, r: f64) -> f64 {
        let x = ((t - self.t_center) / self.t_width).powi(2) + (r / self.r_width).powi(2);
        if x < 1.0 {
            self.amplitude * (-1.0 / (1.0 - x)).exp()
        } else {
            0.0
        }
    }
}

impl Forcing for BumpForcing {
    fn eval_into(&self, t: f64, grid: &RadialGrid, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.value(t, grid.node(j));
        }
    }
}

/// `(E₁ + LE₁(T)) / LE*-upper(F)` for the wave with zero data driven by `F`.
/// The denominator overestimates `‖F‖_{LE*}`, so the ratio understates the
/// true quotient. The sampling stride in `opts` must resolve `F` in time,
/// since the `LE*` integral is taken over the recorded samples.
pub fn kss_inhom_check(
    forcing: &dyn Forcing,
    grid: &RadialGrid,
    n: usize,
    w: &WeightParams,
    t_list: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<IneqSample>> {
    if n < 3 {
        return Err(LabError::precondition(format!(
            "the inhomogeneous local-energy estimate is only available for n >= 3, got n = {n}"
        )));
    }
    let ts = sorted_horizons(t_list)?;
    let t_max = *ts.last().unwrap();
    let spec = ProblemSpec::linear(n);
    let out = evolve(&spec, &InitialData::zeros(*grid), grid, t_max, Some(forcing), true, opts)?;
    let history = out.forcing.expect("forcing history recorded");
    if history.is_zero() {
        return Err(LabError::DegenerateInput("forcing vanishes identically".into()));
    }
    let family = le_family(&out.trajectory, w, &ts)?;
    let samples = ts
        .iter()
        .zip(family)
        .map(|(&t, (num, mut detail))| {
            let den = lestar_upper(&history, &w.with_horizon(t)?, n)?;
            detail.push(("lestar_upper", den));
            Ok(IneqSample { detail, ..IneqSample::new(LemmaId::KssInhom, kss_params(n, w, t), num / den, None) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(banded(samples))
}

/// `sup_t ‖∂u(t)‖² / (‖∂u(0)‖² + ∫₀ᵀ∫|∂u||F| dx dt)`, bounded by 2.
///
/// `forcing` must be sampled at the trajectory's times, as recorded by
/// [`evolve`].
pub fn energy_ineq_check(traj: &Trajectory, forcing: Option<&ForcingHistory>) -> Result<IneqSample> {
    traj.check_finite()?;
    let n = traj.problem().n_dim;
    let plain = NormWeights::new(traj.grid(), n, 0.0, 0.0)?;
    let weights = plain.weights();
    let energies: Vec<f64> = traj.states().iter().map(|s| state_energy_sq(s, n, &plain).0).collect();
    let lhs = energies.iter().copied().fold(0.0, f64::max);
    let mut work = 0.0;
    if let Some(h) = forcing {
        if h.samples().len() != traj.len() || h.grid() != traj.grid() {
            return Err(LabError::precondition("forcing history is not sampled on the trajectory"));
        }
        let g: Vec<f64> = traj
            .states()
            .iter()
            .zip(h.samples())
            .map(|(st, f)| {
                let ur = radial_derivative(&st.u);
                (0..weights.len())
                    .map(|j| weights[j] * st.v.values()[j].hypot(ur.values()[j]) * f.values()[j].abs())
                    .sum()
            })
            .collect();
        work = time_trapezoid(traj.start_time(), traj.dt_sample(), &g, traj.end_time());
    }
    let rhs = energies[0] + work;
    if rhs == 0.0 {
        return Err(LabError::DegenerateInput("zero data and zero forcing".into()));
    }
    let params = IneqParams { horizon: Some(traj.end_time()), ..IneqParams::dim(n) };
    let sample = IneqSample::new(LemmaId::EnergyIneq, params, lhs / rhs, Some(2.0));
    Ok(IneqSample { tol: 0.025, detail: vec![("lhs", lhs), ("initial", energies[0]), ("work", work)], ..sample })
}

/// Number of terms used for the suite sample with a given seed.
pub fn suite_terms(seed: u64) -> usize {
    1 + (seed % 6) as usize
}

/// Runs one of the function-space checks on `samples` random fields with
/// seeds `seed, seed+1, …`, in parallel; results come back in seed order.
pub fn run_suite(lemma: LemmaId, n: usize, s: f64, samples: usize, seed: u64, grid: &RadialGrid) -> Result<Vec<IneqSample>> {
    let check: fn(&RadialField, usize, f64) -> Result<IneqSample> = match lemma {
        LemmaId::Hardy => hardy_check,
        LemmaId::Trace => trace_check,
        LemmaId::TraceVariant => trace_variant_check,
        other => {
            return Err(LabError::precondition(format!("{} has no random-field suite", other.as_str())));
        }
    };
    let compact = lemma == LemmaId::TraceVariant;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let sd = seed + i;
            let f = if compact {
                random_compact_radial(sd, grid, suite_terms(sd))?
            } else {
                random_radial(sd, grid, suite_terms(sd))?
            };
            Ok(check(&f, n, s)?.with_seed(sd))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteSummary {
    pub samples: usize,
    pub violations: usize,
    pub max_ratio: f64,
}

pub fn summarize(samples: &[IneqSample]) -> SuiteSummary {
    SuiteSummary {
        samples: samples.len(),
        violations: samples.iter().filter(|s| s.violation()).count(),
        max_ratio: samples.iter().map(|s| s.ratio).fold(0.0, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> RadialGrid {
        RadialGrid::new(20.0, 4000).unwrap()
    }

    #[test]
    fn random_radial_deterministic() {
        let g = RadialGrid::new(10.0, 200).unwrap();
        assert_eq!(random_radial(3, &g, 4).unwrap(), random_radial(3, &g, 4).unwrap());
        assert_ne!(random_radial(3, &g, 4).unwrap(), random_radial(4, &g, 4).unwrap());
        assert!(random_radial(3, &g, 0).is_err());
        assert!(random_radial(3, &g, 21).is_err());
    }

    #[test]
    fn hardy_gaussian_closed_form() {
        let f = RadialField::from_fn(grid(), |r| (-r * r).exp());
        let s = hardy_check(&f, 3, 1.0).unwrap();
        assert!((s.ratio - 2.0 / 3f64.sqrt()).abs() < 1e-3);
        assert_eq!(s.bound, Some(2.0));
        // the two closed-form pieces
        let a = weighted_l2(&f, 3, -1.0, 0.0).unwrap().powi(2);
        assert!((a - 2f64.sqrt() * PI.powf(1.5)).abs() < 1e-3);
    }

    #[test]
    fn hardy_s_zero_is_one() {
        let f = random_radial(1, &grid(), 3).unwrap();
        let s = hardy_check(&f, 3, 0.0).unwrap();
        assert!((s.ratio - 1.0).abs() < 1e-14);
        assert_eq!(s.bound, Some(1.0));
    }

    #[test]
    fn degenerate_inputs_rejected() {
        let z = RadialField::zeros(grid());
        assert!(matches!(hardy_check(&z, 3, 0.5), Err(LabError::DegenerateInput(_))));
        assert!(matches!(trace_check(&z, 3, 0.5), Err(LabError::DegenerateInput(_))));
        assert!(matches!(trace_variant_check(&z, 3, 0.0), Err(LabError::DegenerateInput(_))));
        let f = random_radial(1, &grid(), 3).unwrap();
        assert!(hardy_check(&f, 2, 1.0).unwrap_err().is_precondition());
    }

    #[test]
    fn trace_ratio_scale_invariant() {
        let f = random_radial(9, &grid(), 4).unwrap();
        let a = trace_check(&f, 3, 0.5).unwrap().ratio;
        let b = trace_check(&f.scaled(7.0), 3, 0.5).unwrap().ratio;
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn trace_variant_use_site() {
        let g = RadialGrid::new(4.0, 4000).unwrap();
        let f = RadialField::from_fn(g, |r| if r < 1.0 { (-1.0 / (1.0 - r * r)).exp() } else { 0.0 });
        let s = trace_variant_check(&f, 2, (3.0 - 2.5) / 4.0).unwrap();
        assert!(!s.violation(), "{}", s.ratio);
    }

    #[test]
    fn energy_ineq_zero_forcing_is_conservation() {
        let g = RadialGrid::new(12.0, 1200).unwrap();
        let data = InitialData {
            u0: RadialField::from_fn(g, |r| (-r * r).exp()),
            u1: RadialField::zeros(g),
        };
        let out = evolve(&ProblemSpec::linear(3), &data, &g, 2.0, None, true, &EvolveOptions::default()).unwrap();
        let s = energy_ineq_check(&out.trajectory, None).unwrap();
        assert!((s.ratio - 1.0).abs() < 1e-5);
    }
}
