//! Full-space norms of radial functions and trajectories: weighted `L²`,
//! data sizes `Λᵢ`, trace norms, energy norms `E₁, E₂`, the local-energy
//! norms `LE₁, LE₂` and an upper bound for the dual norm `LE*`.
//!
//! Angular integrals reduce to the factor `|S^{n-1}|` for radial functions,
//! and `|∇ₓu| = |∂ᵣu|`.

use std::collections::BTreeMap;

use crate::calculus::{derivative_into, laplacian_into, radial_derivative, radial_laplacian};
use crate::error::{LabError, Result};
use crate::grid::{RadialField, RadialGrid, Trajectory, WaveState};
use crate::problem::{sphere_area, WeightParams};
use crate::quadrature::{radial_weights, time_trapezoid, weighted_sum_sq};
use crate::solver::forcing::ForcingHistory;

/// Quadrature weights for `‖r^μ ⟨r⟩^ν f‖²_{L²(ℝⁿ)} = Σ w_j f_j²`.
#[derive(Debug, Clone)]
pub struct NormWeights {
    weights: Vec<f64>,
}

impl NormWeights {
    pub fn new(grid: &RadialGrid, n: usize, mu: f64, nu: f64) -> Result<Self> {
        let nf = n as f64;
        if !(mu > -nf / 2.0) {
            return Err(LabError::precondition(format!(
                "radial power mu = {mu} is not integrable at the origin in {n} dimensions (need mu > {})",
                -nf / 2.0
            )));
        }
        let alpha = 2.0 * mu + nf - 1.0;
        let mut weights = radial_weights(grid, alpha, nu);
        let area = sphere_area(n);
        weights.iter_mut().for_each(|w| *w *= area);
        Ok(Self { weights })
    }

    #[inline]
    pub fn norm_sq(&self, f: &[f64]) -> f64 {
        weighted_sum_sq(&self.weights, f)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `‖r^μ ⟨r⟩^ν f‖_{L²(ℝⁿ)}` with `⟨r⟩ = √(1+r²)`.
pub fn weighted_l2(f: &RadialField, n: usize, mu: f64, nu: f64) -> Result<f64> {
    f.check_finite("weighted_l2 input")?;
    let w = NormWeights::new(f.grid(), n, mu, nu)?;
    Ok(w.norm_sq(f.values()).sqrt())
}

/// `|S^{n-1}|^{1/2} · sup_r r^power |f(r)|`. The origin counts only when
/// `power == 0`.
pub fn sup_weighted(f: &RadialField, n: usize, power: f64) -> Result<f64> {
    f.check_finite("sup_weighted input")?;
    let dr = f.grid().spacing();
    let start = if power == 0.0 { 0 } else { 1 };
    let m = f
        .values()
        .iter()
        .enumerate()
        .skip(start)
        .map(|(j, v)| (j as f64 * dr).powf(power) * v.abs())
        .fold(0.0, f64::max);
    Ok(sphere_area(n).sqrt() * m)
}

/// `‖r^{n/2-s} f‖_{L_r^∞ L_ω²}` over nodes `r_j > 0`.
pub fn sup_trace_norm(f: &RadialField, n: usize, s: f64) -> Result<f64> {
    f.check_finite("sup_trace_norm input")?;
    let dr = f.grid().spacing();
    let power = n as f64 / 2.0 - s;
    let m = f.values().iter().enumerate().skip(1).map(|(j, v)| (j as f64 * dr).powf(power) * v.abs()).fold(0.0, f64::max);
    Ok(sphere_area(n).sqrt() * m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaNorms {
    pub lambda1: f64,
    pub lambda2: f64,
}

/// `Λ₁ = ‖∂ᵣu₀‖ + ‖u₁‖`, `Λ₂ = ‖Δu₀‖ + ‖∂ᵣu₁‖`.
pub fn lambda_norms(u0: &RadialField, u1: &RadialField, n: usize) -> Result<LambdaNorms> {
    u0.ensure_same_grid(u1)?;
    u0.check_finite("u0")?;
    u1.check_finite("u1")?;
    let d0 = radial_derivative(u0);
    let l0 = radial_laplacian(u0, n);
    let d1 = radial_derivative(u1);
    let plain = NormWeights::new(u0.grid(), n, 0.0, 0.0)?;
    let norm = |f: &RadialField| -> Result<f64> {
        f.check_finite("derivative of data")?;
        Ok(plain.norm_sq(f.values()).sqrt())
    };
    Ok(LambdaNorms { lambda1: norm(&d0)? + norm(u1)?, lambda2: norm(&l0)? + norm(&d1)? })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyNorms {
    pub e1: f64,
    pub e2: f64,
}

/// Squared `(‖∂u‖², ‖∂ₓ∂u‖²)` of one state, realized as
/// `(‖v‖² + ‖∂ᵣu‖², ‖∂ᵣv‖² + ‖Δu‖²)`.
pub fn state_energy_sq(state: &WaveState, n: usize, plain: &NormWeights) -> (f64, f64) {
    let dr = state.grid().spacing();
    let len = state.grid().len();
    let mut ur = vec![0.0; len];
    let mut vr = vec![0.0; len];
    derivative_into(state.u.values(), dr, &mut ur);
    derivative_into(state.v.values(), dr, &mut vr);
    let lap = radial_laplacian(&state.u, n);
    let e1 = plain.norm_sq(state.v.values()) + plain.norm_sq(&ur);
    let e2 = plain.norm_sq(&vr) + plain.norm_sq(lap.values());
    (e1, e2)
}

/// `E₁ = sup_t ‖∂u‖`, `E₂ = sup_t ‖∂ₓ∂u‖` over the sampled states.
pub fn e_norms(traj: &Trajectory) -> Result<EnergyNorms> {
    e_norms_until(traj, f64::INFINITY)
}

/// `E₁, E₂` over the states with `t ≤ horizon`.
pub fn e_norms_until(traj: &Trajectory, horizon: f64) -> Result<EnergyNorms> {
    traj.check_finite()?;
    let n = traj.problem().n_dim;
    let plain = NormWeights::new(traj.grid(), n, 0.0, 0.0)?;
    let limit = horizon + 1e-9 * traj.dt_sample().max(1e-300);
    let (mut e1, mut e2) = (0.0_f64, 0.0_f64);
    for s in traj.states().iter().filter(|s| s.time <= limit) {
        let (a, b) = state_energy_sq(s, n, &plain);
        e1 = e1.max(a);
        e2 = e2.max(b);
    }
    Ok(EnergyNorms { e1: e1.sqrt(), e2: e2.sqrt() })
}

/// Labels of the local-energy summands, in display order.
pub const LE_LABELS: [&str; 4] = ["du", "u_over_r", "log", "power"];

/// The four LE summands; the `u`-terms are absent in two dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct LeBreakdown {
    pub total: f64,
    pub components: BTreeMap<&'static str, f64>,
}

impl LeBreakdown {
    pub fn component(&self, label: &str) -> f64 {
        self.components.get(label).copied().unwrap_or(0.0)
    }
}

/// Order of the LE norm: `LE₁` acts on `u`, `LE₂` on `∂ₓu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeOrder {
    First,
    Second,
}

struct LeWeights {
    /// `r^{-δ}⟨r⟩^{-1/2+δ′}` applied to `∂u`
    du: NormWeights,
    /// `r^{-1-δ}⟨r⟩^{-1/2+δ′}` applied to `u` (n ≥ 3)
    u: Option<NormWeights>,
    /// `r^{-δ}⟨r⟩^{-1/2+δ}` (or `r^{-1-δ}` on `r|∂u| + |u|` when n ≥ 3)
    log: NormWeights,
    /// `r^{-δ}` (or `r^{-1-δ}` on `r|∂u| + |u|`)
    power: NormWeights,
}

impl LeWeights {
    fn new(grid: &RadialGrid, n: usize, w: &WeightParams) -> Result<Self> {
        let (d, dp) = (w.delta(), w.delta_prime());
        let with_u = n >= 3;
        let combined_mu = if with_u { -1.0 - d } else { -d };
        Ok(Self {
            du: NormWeights::new(grid, n, -d, -0.5 + dp)?,
            u: if with_u { Some(NormWeights::new(grid, n, -1.0 - d, -0.5 + dp)?) } else { None },
            log: NormWeights::new(grid, n, combined_mu, -0.5 + d)?,
            power: NormWeights::new(grid, n, combined_mu, 0.0)?,
        })
    }
}

/// Per-state squared spatial norms of the four summands.
fn le_state_terms(state: &WaveState, n: usize, order: LeOrder, lw: &LeWeights, scratch: &mut LeScratch) -> [f64; 4] {
    let grid = state.grid();
    let dr = grid.spacing();
    let len = grid.len();
    let u = state.u.values();
    let v = state.v.values();
    let s = scratch;
    derivative_into(u, dr, &mut s.ur);
    let with_u = lw.u.is_some();
    match order {
        LeOrder::First => {
            // |∂u|² = v² + (∂ᵣu)²
            for j in 0..len {
                s.grad[j] = (v[j] * v[j] + s.ur[j] * s.ur[j]).sqrt();
                s.low[j] = u[j];
            }
        }
        LeOrder::Second => {
            // |∂∂ₓu|² = (∂ᵣv)² + (∂ᵣ²u)² + (n-1)(∂ᵣu/r)²
            derivative_into(v, dr, &mut s.vr);
            laplacian_into(u, dr, n, &mut s.lap);
            let k = n as f64 - 1.0;
            for j in 0..len {
                let (urr, ur_over_r) = if j == 0 {
                    let urr = s.lap[0] / n as f64;
                    (urr, urr)
                } else {
                    let r = j as f64 * dr;
                    (s.lap[j] - k * s.ur[j] / r, s.ur[j] / r)
                };
                s.grad[j] = (s.vr[j] * s.vr[j] + urr * urr + k * ur_over_r * ur_over_r).sqrt();
                s.low[j] = s.ur[j];
            }
        }
    }
    let du = lw.du.norm_sq(&s.grad);
    let low = lw.u.as_ref().map_or(0.0, |w| w.norm_sq(&s.low));
    if with_u {
        // r^{-δ}(|∂u| + |u|/r) = r^{-1-δ}(r|∂u| + |u|)
        for j in 0..len {
            s.combined[j] = j as f64 * dr * s.grad[j] + s.low[j].abs();
        }
    } else {
        s.combined.copy_from_slice(&s.grad);
    }
    [du, low, lw.log.norm_sq(&s.combined), lw.power.norm_sq(&s.combined)]
}

struct LeScratch {
    ur: Vec<f64>,
    vr: Vec<f64>,
    lap: Vec<f64>,
    grad: Vec<f64>,
    low: Vec<f64>,
    combined: Vec<f64>,
}

impl LeScratch {
    fn new(len: usize) -> Self {
        Self {
            ur: vec![0.0; len],
            vr: vec![0.0; len],
            lap: vec![0.0; len],
            grad: vec![0.0; len],
            low: vec![0.0; len],
            combined: vec![0.0; len],
        }
    }
}

/// `‖u‖_{LE}` (or `‖∂ₓu‖_{LE}`) on `[0, T]`, `T = w.horizon()`.
///
/// Each summand is a time trapezoid of squared spatial norms over the
/// trajectory samples, truncated at `T`.
pub fn le_norm_order(traj: &Trajectory, w: &WeightParams, n: usize, order: LeOrder) -> Result<LeBreakdown> {
    let horizon = w.horizon();
    let reached = traj.end_time();
    if reached < horizon - 1e-9 * horizon.max(1.0) {
        return Err(LabError::HorizonMismatch { reached, horizon });
    }
    traj.check_finite()?;
    let grid = traj.grid();
    let lw = LeWeights::new(grid, n, w)?;
    let mut scratch = LeScratch::new(grid.len());
    let limit = horizon + traj.dt_sample();
    let mut series: [Vec<f64>; 4] = Default::default();
    for s in traj.states().iter().take_while(|s| s.time <= limit) {
        let terms = le_state_terms(s, n, order, &lw, &mut scratch);
        for (acc, t) in series.iter_mut().zip(terms) {
            acc.push(t);
        }
    }
    let start = traj.start_time();
    let dt = traj.dt_sample();
    let integral = |g: &[f64]| time_trapezoid(start, dt, g, horizon).max(0.0).sqrt();
    let d = w.delta();
    let mut components = BTreeMap::new();
    components.insert(LE_LABELS[0], integral(&series[0]));
    if n >= 3 {
        components.insert(LE_LABELS[1], integral(&series[1]));
    }
    components.insert(LE_LABELS[2], (2.0 + horizon).ln().powf(-0.5) * integral(&series[2]));
    components.insert(LE_LABELS[3], horizon.powf(d - 0.5) * integral(&series[3]));
    let total = components.values().sum();
    Ok(LeBreakdown { total, components })
}

/// `‖u‖_{LE₁}` on `[0, T]`.
pub fn le_norm(traj: &Trajectory, w: &WeightParams, n: usize) -> Result<LeBreakdown> {
    le_norm_order(traj, w, n, LeOrder::First)
}

/// Energy and local-energy norms of one trajectory on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub e1: f64,
    pub e2: f64,
    pub le1: f64,
    pub le2: f64,
    pub components: BTreeMap<&'static str, f64>,
    /// Set in the critical instance (`δ′ = δ`), where the log-weighted
    /// summand carries the `T`-growth.
    pub governing_component: Option<&'static str>,
}

pub fn norm_report(traj: &Trajectory, w: &WeightParams) -> Result<NormReport> {
    let n = traj.problem().n_dim;
    let e = e_norms_until(traj, w.horizon())?;
    let le1 = le_norm_order(traj, w, n, LeOrder::First)?;
    let le2 = le_norm_order(traj, w, n, LeOrder::Second)?;
    Ok(NormReport {
        e1: e.e1,
        e2: e.e2,
        le1: le1.total,
        le2: le2.total,
        components: le1.components,
        governing_component: (w.delta_prime() == w.delta()).then_some(LE_LABELS[2]),
    })
}

/// The three single-term decompositions of `F ∈ LE*`:
/// `‖r^δ⟨r⟩^{1/2-δ′}F‖`, `log(2+T)^{1/2}‖r^δ⟨r⟩^{1/2-δ}F‖`,
/// `T^{1/2-δ}‖r^δ F‖`, each in `L²([0,T]×ℝⁿ)`.
pub fn lestar_terms(forcing: &ForcingHistory, w: &WeightParams, n: usize) -> Result<[f64; 3]> {
    let grid = forcing.grid();
    let (d, dp, horizon) = (w.delta(), w.delta_prime(), w.horizon());
    let weights = [
        NormWeights::new(grid, n, d, 0.5 - dp)?,
        NormWeights::new(grid, n, d, 0.5 - d)?,
        NormWeights::new(grid, n, d, 0.0)?,
    ];
    let mut out = [0.0; 3];
    for (o, wts) in out.iter_mut().zip(&weights) {
        let g: Vec<f64> = forcing.samples().iter().map(|f| wts.norm_sq(f.values())).collect();
        *o = if forcing.samples().len() == 1 {
            (g[0] * horizon).sqrt()
        } else {
            time_trapezoid(forcing.start(), forcing.dt_sample(), &g, horizon).max(0.0).sqrt()
        };
    }
    out[1] *= (2.0 + horizon).ln().sqrt();
    out[2] *= horizon.powf(0.5 - d);
    Ok(out)
}

/// Upper bound on `‖F‖_{LE*}`: the smallest single-term decomposition.
pub fn lestar_upper(forcing: &ForcingHistory, w: &WeightParams, n: usize) -> Result<f64> {
    Ok(lestar_terms(forcing, w, n)?.into_iter().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ProblemSpec;
    use std::f64::consts::PI;

    fn gauss(grid: RadialGrid) -> RadialField {
        RadialField::from_fn(grid, |r| (-r * r).exp())
    }

    #[test]
    fn weighted_l2_gaussian_closed_forms() {
        let g = RadialGrid::new(12.0, 4000).unwrap();
        let f = gauss(g);
        // 4π ∫ r² e^{-2r²} dr = 4π √(2π)/16
        let exact = (PI * (2.0 * PI).sqrt() / 4.0).sqrt();
        assert!((weighted_l2(&f, 3, 0.0, 0.0).unwrap() - exact).abs() < 1e-3);
        assert!((exact - 1.4026).abs() < 1e-3);
        // 4π ∫ e^{-2r²} dr = 4π (1/2)√(π/2)
        let exact = (4.0 * PI * 0.5 * (PI / 2.0).sqrt()).sqrt();
        assert!((weighted_l2(&f, 3, -1.0, 0.0).unwrap() - exact).abs() < 1e-3);
    }

    #[test]
    fn weighted_l2_zero_and_precondition() {
        let g = RadialGrid::new(5.0, 100).unwrap();
        assert_eq!(weighted_l2(&RadialField::zeros(g), 3, 0.0, 0.0).unwrap(), 0.0);
        assert!(matches!(weighted_l2(&gauss(g), 3, -1.5, 0.0), Err(LabError::PreconditionViolation(_))));
        let mut bad = gauss(g);
        bad.values_mut()[4] = f64::INFINITY;
        assert!(matches!(weighted_l2(&bad, 3, 0.0, 0.0), Err(LabError::NonFinite { .. })));
    }

    #[test]
    fn weighted_l2_converges_at_second_order() {
        // f = (1+r)e^{-r²} has an odd part, so the trapezoid rule is only second order
        let moments = 0.5 * (PI / 2.0).sqrt() + 0.5 + (2.0 * PI).sqrt() / 16.0;
        for &(n, mu, exact) in &[(3usize, -1.0, 4.0 * PI * moments), (2usize, -0.5, 2.0 * PI * moments)] {
            let errs: Vec<f64> = [100usize, 200, 400]
                .iter()
                .map(|&m| {
                    let f = RadialField::from_fn(RadialGrid::new(10.0, m).unwrap(), |r| (1.0 + r) * (-r * r).exp());
                    (weighted_l2(&f, n, mu, 0.0).unwrap().powi(2) - exact).abs()
                })
                .collect();
            for w in errs.windows(2) {
                assert!((w[0] / w[1]).log2() >= 1.8, "{errs:?}");
            }
        }
    }

    #[test]
    fn sup_trace_gaussian() {
        let g = RadialGrid::new(6.0, 60000).unwrap();
        let got = sup_trace_norm(&gauss(g), 3, 0.5).unwrap();
        let exact = (4.0 * PI).sqrt() * (0.5f64).sqrt() * (-0.5f64).exp();
        assert!((got - exact).abs() < 1e-4);
        let doubled = sup_trace_norm(&gauss(g).scaled(2.0), 3, 0.5).unwrap();
        assert_eq!(doubled, 2.0 * got);
    }

    #[test]
    fn lambda_norms_zero_and_homogeneous() {
        let g = RadialGrid::new(8.0, 400).unwrap();
        let z = lambda_norms(&RadialField::zeros(g), &RadialField::zeros(g), 3).unwrap();
        assert_eq!((z.lambda1, z.lambda2), (0.0, 0.0));
        let u0 = gauss(g);
        let u1 = RadialField::from_fn(g, |r| r * (-r * r).exp());
        let base = lambda_norms(&u0, &u1, 3).unwrap();
        let scaled = lambda_norms(&u0.scaled(4.0), &u1.scaled(4.0), 3).unwrap();
        assert!((scaled.lambda1 - 4.0 * base.lambda1).abs() <= 1e-14 * base.lambda1);
        assert!((scaled.lambda2 - 4.0 * base.lambda2).abs() <= 1e-14 * base.lambda2);
    }

    fn static_traj(grid: RadialGrid, n: usize, f: impl Fn(f64) -> f64 + Copy, times: usize, dt: f64) -> Trajectory {
        let states = (0..times)
            .map(|k| {
                let t = k as f64 * dt;
                WaveState::new(
                    t,
                    RadialField::from_fn(grid, |r| f(r) * (1.0 + 0.1 * t)),
                    RadialField::from_fn(grid, |r| 0.1 * f(r)),
                )
                .unwrap()
            })
            .collect();
        Trajectory::new(ProblemSpec::linear(n), states, dt).unwrap()
    }

    #[test]
    fn le_components_sum_to_total() {
        let g = RadialGrid::new(10.0, 400).unwrap();
        for n in [2usize, 3, 4] {
            let traj = static_traj(g, n, |r| (-r * r).exp(), 11, 0.1);
            let w = WeightParams::new(0.3, 0.2, 1.0).unwrap();
            let le = le_norm(&traj, &w, n).unwrap();
            let sum: f64 = le.components.values().sum();
            assert!((sum - le.total).abs() <= 1e-12 * le.total);
            assert_eq!(le.components.len(), if n == 2 { 3 } else { 4 });
        }
    }

    #[test]
    fn le_zero_and_homogeneous() {
        let g = RadialGrid::new(10.0, 400).unwrap();
        let traj = static_traj(g, 3, |r| (-r * r).exp(), 11, 0.1);
        let w = WeightParams::new(0.3, 0.2, 1.0).unwrap();
        let zero = le_norm(&traj.zeros_like(), &w, 3).unwrap();
        assert_eq!(zero.total, 0.0);
        assert!(zero.components.values().all(|&c| c == 0.0));
        let base = le_norm(&traj, &w, 3).unwrap().total;
        let scaled = le_norm(&traj.scaled(3.0), &w, 3).unwrap().total;
        assert!((scaled - 3.0 * base).abs() <= 1e-13 * base);
    }

    #[test]
    fn le_horizon_mismatch() {
        let g = RadialGrid::new(10.0, 100).unwrap();
        let traj = static_traj(g, 3, |r| (-r * r).exp(), 11, 0.1);
        let w = WeightParams::new(0.3, 0.2, 2.0).unwrap();
        assert!(matches!(le_norm(&traj, &w, 3), Err(LabError::HorizonMismatch { .. })));
    }

    #[test]
    fn e_norms_single_state_matches_lambda() {
        let g = RadialGrid::new(8.0, 800).unwrap();
        let u0 = gauss(g);
        let u1 = RadialField::from_fn(g, |r| 0.5 * (-2.0 * r * r).exp());
        let traj = Trajectory::new(ProblemSpec::linear(3), vec![WaveState::new(0.0, u0.clone(), u1.clone()).unwrap()], 1.0).unwrap();
        let e = e_norms(&traj).unwrap();
        let plain = NormWeights::new(&g, 3, 0.0, 0.0).unwrap();
        let a = plain.norm_sq(radial_derivative(&u0).values());
        let b = plain.norm_sq(u1.values());
        assert!((e.e1 - (a + b).sqrt()).abs() <= 1e-12 * e.e1);
        assert_eq!(e_norms(&traj.zeros_like()).unwrap().e1, 0.0);
    }

    #[test]
    fn lestar_is_min_of_terms() {
        let g = RadialGrid::new(4.0, 200).unwrap();
        let bump = |t: f64, r: f64| {
            let x = 2.0 * t - 1.0;
            if t <= 0.0 || t >= 1.0 || r >= 1.0 {
                0.0
            } else {
                (-1.0 / (1.0 - x * x)).exp() * (-1.0 / (1.0 - r * r)).exp()
            }
        };
        let f = crate::solver::forcing::FnForcing(bump);
        let h = ForcingHistory::sample(&f, g, 0.0, 0.05, 41).unwrap();
        let w = WeightParams::new(0.3, 0.2, 2.0).unwrap();
        let terms = lestar_terms(&h, &w, 3).unwrap();
        let up = lestar_upper(&h, &w, 3).unwrap();
        assert!(terms.iter().all(|&t| up <= t));
        assert!(up > 0.0 && up.is_finite());
        assert_eq!(lestar_upper(&h.scaled(0.0), &w, 3).unwrap(), 0.0);
    }
}
