//! The iteration `u⁽ᵏ⁺¹⁾ = u⁽⁰⁾ + I[N[u⁽ᵏ⁾]]`, with contraction measured in
//! `ρ(u, v) = ‖u − v‖_{E₁} + ‖u − v‖_{LE₁}`.

use crate::error::{LabError, Result};
use crate::grid::Trajectory;
use crate::norms::{e_norms, lambda_norms, le_norm_order, LeOrder};
use crate::problem::{weight_exponents, ProblemSpec, Regime, WeightExponents, WeightParams};
use crate::solver::{evolve, nonlinearity, EvolveOptions, ForcingHistory, InitialData, SolveStatus};

/// `ρ_{k+1} ≥ DIVERGENCE_GROWTH · ρ_{k-1}` aborts the iteration.
pub const DIVERGENCE_GROWTH: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PicardTrace {
    pub iteration: usize,
    /// `ρ(u⁽ᵏ⁺¹⁾, u⁽ᵏ⁾)`
    pub rho_step: f64,
    pub e1: f64,
    pub e2: f64,
    pub le1: f64,
    pub le2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub weights: WeightExponents,
    pub opts: EvolveOptions,
}

impl PicardConfig {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        Ok(Self { max_iters: 30, tol: 1e-10, weights: default_weights(spec)?, opts: EvolveOptions::default() })
    }
}

/// `(s₁, s₂)` used when none are given: `(1/2, 1)` in three or more
/// dimensions; in two, `s₂` sits halfway between `1 − 1/(p−1)` and `1`.
pub fn default_s_pair(spec: &ProblemSpec) -> (f64, f64) {
    let n = spec.n_dim as f64;
    if spec.n_dim >= 3 {
        (0.5, 1.0)
    } else {
        let mid = n / 2.0 - 1.0 / (spec.p - 1.0);
        (0.5, 0.5 * (mid.max(0.5) + 1.0))
    }
}

/// Weight exponents of the equation's regime at the default `(s₁, s₂)`.
pub fn default_weights(spec: &ProblemSpec) -> Result<WeightExponents> {
    let (s1, s2) = default_s_pair(spec);
    weight_exponents(spec.regime(), spec, s1, s2)
}

/// `Φ[u]`: the linear wave with the original data and source `N[u(t)]`,
/// sampled at the stride of `u`.
pub fn phi_map(u: &Trajectory, data: &InitialData, spec: &ProblemSpec, horizon: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    if u.end_time() < horizon * (1.0 - 1e-12) {
        return Err(LabError::HorizonMismatch { reached: u.end_time(), horizon });
    }
    if u.grid() != data.grid() {
        return Err(LabError::precondition("iterate and data live on different grids"));
    }
    let samples = u.states().iter().map(|s| nonlinearity(s, spec)).collect::<Result<Vec<_>>>()?;
    let source = ForcingHistory::new(u.start_time(), u.dt_sample(), samples)?;
    let opts = opts.with_sample_interval(u.dt_sample());
    let out = evolve(spec, data, data.grid(), horizon, Some(&source), true, &opts)?;
    if out.status == SolveStatus::BlewUp {
        return Err(LabError::Divergence { iteration: 0, rho: f64::INFINITY, trace: Vec::new() });
    }
    Ok(out.trajectory)
}

/// `‖u − v‖_{E₁} + ‖u − v‖_{LE₁}` on `[0, T]`.
pub fn rho(u: &Trajectory, v: &Trajectory, w: &WeightParams) -> Result<f64> {
    let d = u.difference(v)?;
    let n = u.problem().n_dim;
    Ok(e_norms(&d)?.e1 + le_norm_order(&d, w, n, LeOrder::First)?.total)
}

#[derive(Debug, Clone)]
pub struct PicardRun {
    pub final_iterate: Trajectory,
    pub trace: Vec<PicardTrace>,
    pub converged: bool,
    pub lambda1: f64,
    pub weights: WeightParams,
}

impl PicardRun {
    /// `ρ_{k+1}/ρ_k` for consecutive recorded steps.
    pub fn ratios(&self) -> Vec<f64> {
        self.trace.windows(2).map(|w| w[1].rho_step / w[0].rho_step).collect()
    }
}

fn trace_row(k: usize, rho_step: f64, u: &Trajectory, w: &WeightParams) -> Result<PicardTrace> {
    let n = u.problem().n_dim;
    let e = e_norms(u)?;
    Ok(PicardTrace {
        iteration: k,
        rho_step,
        e1: e.e1,
        e2: e.e2,
        le1: le_norm_order(u, w, n, LeOrder::First)?.total,
        le2: le_norm_order(u, w, n, LeOrder::Second)?.total,
    })
}

/// Iterates from the free solution until `ρ ≤ tol·Λ₁` or `max_iters`
/// corrections. Row `k` of the trace holds `ρ(u⁽ᵏ⁺¹⁾, u⁽ᵏ⁾)` and the norms
/// of `u⁽ᵏ⁾`.
pub fn picard_run(spec: &ProblemSpec, data: &InitialData, horizon: f64, cfg: &PicardConfig) -> Result<PicardRun> {
    if !(2..=50).contains(&cfg.max_iters) {
        return Err(LabError::precondition(format!("max_iters = {} must lie in [2, 50]", cfg.max_iters)));
    }
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(LabError::precondition(format!("tol = {} must be > 0", cfg.tol)));
    }
    let w = cfg.weights.at_horizon(horizon)?;
    let n = spec.n_dim;
    let lambda1 = lambda_norms(&data.u0, &data.u1, n)?.lambda1;
    let threshold = cfg.tol * (lambda1 + 1e-300);
    let free = evolve(spec, data, data.grid(), horizon, None, true, &cfg.opts)?.trajectory;
    let mut current = free;
    let mut trace: Vec<PicardTrace> = Vec::new();
    for k in 0..cfg.max_iters {
        let next = phi_map(&current, data, spec, horizon, &cfg.opts).map_err(|e| match e {
            LabError::Divergence { .. } => LabError::Divergence { iteration: k, rho: f64::INFINITY, trace: trace.clone() },
            other => other,
        })?;
        let step = rho(&next, &current, &w)?;
        trace.push(trace_row(k, step, &current, &w)?);
        if step <= threshold {
            return Ok(PicardRun { final_iterate: next, trace, converged: true, lambda1, weights: w });
        }
        if k >= 2 && step >= DIVERGENCE_GROWTH * trace[k - 2].rho_step {
            return Err(LabError::Divergence { iteration: k, rho: step, trace });
        }
        current = next;
    }
    Ok(PicardRun { final_iterate: current, trace, converged: false, lambda1, weights: w })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallnessReport {
    pub regime: Regime,
    pub lambda1: f64,
    pub lambda2: f64,
    /// The regime's multiplicative data size.
    pub quantity: f64,
}

/// Data size in multiplicative form:
/// supercritical `Λ₁^{1-s₁}Λ₂^{s₁} + Λ₁^{1-s₂}Λ₂^{s₂}`,
/// critical `Λ₁^{1/2}Λ₂^{1/2} + Λ₁^{1-s₂}Λ₂^{s₂}`,
/// subcritical `Λ₁^{1/2}Λ₂^{1/2}`.
pub fn smallness_report(spec: &ProblemSpec, data: &InitialData, s1: f64, s2: f64) -> Result<SmallnessReport> {
    let regime = spec.regime();
    weight_exponents(regime, spec, s1, s2)?;
    let l = lambda_norms(&data.u0, &data.u1, spec.n_dim)?;
    let mix = |s: f64| l.lambda1.powf(1.0 - s) * l.lambda2.powf(s);
    let quantity = match regime {
        Regime::Supercritical => mix(s1) + mix(s2),
        Regime::Critical => mix(0.5) + mix(s2),
        Regime::Subcritical => mix(0.5),
    };
    Ok(SmallnessReport { regime, lambda1: l.lambda1, lambda2: l.lambda2, quantity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use crate::solver::{duhamel, make_profile, Assignment, DataProfile};

    fn setup(eps: f64) -> (RadialGrid, InitialData) {
        let g = RadialGrid::new(14.0, 280).unwrap();
        let d = make_profile(&DataProfile::gaussian(eps, 1.0, Assignment::ToU0), &g).unwrap();
        (g, d)
    }

    #[test]
    fn vanishing_nonlinearity_converges_at_once() {
        let (_, data) = setup(0.1);
        let spec = ProblemSpec::new(3, 2.5, 0.0, 0.0).unwrap();
        let run = picard_run(&spec, &data, 4.0, &PicardConfig::new(&spec).unwrap()).unwrap();
        assert!(run.converged);
        assert_eq!(run.trace.len(), 1);
        assert!(run.trace[0].rho_step <= 1e-12);
    }

    #[test]
    fn zero_data_zero_output() {
        let (g, _) = setup(0.1);
        let spec = ProblemSpec::new(3, 2.5, 1.0, 0.0).unwrap();
        let zero = InitialData::zeros(g);
        let free = evolve(&spec, &zero, &g, 4.0, None, true, &EvolveOptions::default()).unwrap().trajectory;
        let out = phi_map(&free, &zero, &spec, 4.0, &EvolveOptions::default()).unwrap();
        assert!(out.states().iter().all(|s| s.u.is_zero() && s.v.is_zero()));
    }

    #[test]
    fn phi_is_free_plus_duhamel() {
        let (g, data) = setup(0.5);
        let spec = ProblemSpec::new(3, 2.5, 1.0, 0.5).unwrap();
        let opts = EvolveOptions::default();
        let free = evolve(&spec, &data, &g, 4.0, None, true, &opts).unwrap().trajectory;
        let phi = phi_map(&free, &data, &spec, 4.0, &opts).unwrap();
        let source = ForcingHistory::new(
            0.0,
            free.dt_sample(),
            free.states().iter().map(|s| nonlinearity(s, &spec).unwrap()).collect(),
        )
        .unwrap();
        let inh = duhamel(&source, 4.0, &spec, &g, &opts.with_sample_interval(free.dt_sample())).unwrap();
        let lhs = phi.difference(&free).unwrap();
        for (a, b) in lhs.states().iter().zip(inh.states()) {
            let scale = b.u.max_abs().max(1e-300);
            assert!(a.u.sub(&b.u).unwrap().max_abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn smallness_homogeneous() {
        let (_, data) = setup(0.1);
        let spec = ProblemSpec::new(3, 2.5, 1.0, 0.0).unwrap();
        let a = smallness_report(&spec, &data, 0.5, 1.0).unwrap();
        let b = smallness_report(&spec, &data.scaled(3.0), 0.5, 1.0).unwrap();
        assert!((b.quantity - 3.0 * a.quantity).abs() <= 1e-12 * b.quantity);
        let z = smallness_report(&spec, &data.scaled(0.0), 0.5, 1.0).unwrap();
        assert_eq!(z.quantity, 0.0);
    }

    #[test]
    fn max_iters_gate() {
        let (_, data) = setup(0.1);
        let spec = ProblemSpec::new(3, 2.5, 1.0, 0.0).unwrap();
        let cfg = PicardConfig { max_iters: 1, ..PicardConfig::new(&spec).unwrap() };
        assert!(picard_run(&spec, &data, 4.0, &cfg).unwrap_err().is_precondition());
    }
}
