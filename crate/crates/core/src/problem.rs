//! The equation under study, its critical exponents and the weight
//! exponents that select a concrete local-energy norm.

use std::f64::consts::PI;

use crate::error::{LabError, Result};

/// `□u = a|∂ₜu|ᵖ + b|∇ₓu|ᵖ` in `n_dim` space dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub n_dim: usize,
    pub p: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalExponents {
    /// Glassey exponent `1 + 2/(n-1)`.
    pub p_c: f64,
    /// Scale-invariant Sobolev order `n/2 + 1 - 1/(p-1)`.
    pub s_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Supercritical,
    Critical,
    Subcritical,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Supercritical => "supercritical",
            Regime::Critical => "critical",
            Regime::Subcritical => "subcritical",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "supercritical" => Ok(Regime::Supercritical),
            "critical" => Ok(Regime::Critical),
            "subcritical" => Ok(Regime::Subcritical),
            other => Err(LabError::Parse(format!("unknown regime '{other}'"))),
        }
    }
}

/// Relative tolerance used to decide `p == p_c`.
const CRITICAL_MATCH: f64 = 1e-12;

impl ProblemSpec {
    pub fn new(n_dim: usize, p: f64, a: f64, b: f64) -> Result<Self> {
        if n_dim < 2 {
            return Err(LabError::precondition(format!("n_dim = {n_dim} must be >= 2")));
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(LabError::precondition(format!("p = {p} must be finite and > 1")));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(LabError::precondition(format!("coefficients a = {a}, b = {b} must be finite")));
        }
        Ok(Self { n_dim, p, a, b })
    }

    /// Same equation without the nonlinearity.
    pub fn linear(n_dim: usize) -> Self {
        Self { n_dim, p: 2.0, a: 0.0, b: 0.0 }
    }

    pub fn is_linear(&self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }

    pub fn regime(&self) -> Regime {
        let p_c = critical_exponents(self).p_c;
        if (self.p - p_c).abs() <= CRITICAL_MATCH * p_c {
            Regime::Critical
        } else if self.p > p_c {
            Regime::Supercritical
        } else {
            Regime::Subcritical
        }
    }
}

pub fn critical_exponents(spec: &ProblemSpec) -> CriticalExponents {
    let n = spec.n_dim as f64;
    CriticalExponents {
        p_c: 1.0 + 2.0 / (n - 1.0),
        s_c: n / 2.0 + 1.0 - 1.0 / (spec.p - 1.0),
    }
}

/// Surface area `|S^{n-1}| = 2π^{n/2}/Γ(n/2)` of the unit sphere in ℝⁿ.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        5 => 8.0 * PI * PI / 3.0,
        6 => PI * PI * PI,
        7 => 16.0 * PI * PI * PI / 15.0,
        8 => PI.powi(4) / 3.0,
        _ => {
            let half = n as f64 / 2.0;
            2.0 * PI.powf(half) / statrs::function::gamma::gamma(half)
        }
    }
}

/// `(δ, δ′, T)` selecting one instance of the LE / LE* norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    delta: f64,
    delta_prime: f64,
    horizon: f64,
}

impl WeightParams {
    pub fn new(delta: f64, delta_prime: f64, horizon: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(LabError::precondition(format!("delta = {delta} must lie in (0, 1/2)")));
        }
        if !(delta_prime.is_finite() && delta_prime < delta) {
            return Err(LabError::precondition(format!(
                "delta' = {delta_prime} must be finite and < delta = {delta}"
            )));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(LabError::precondition(format!("horizon T = {horizon} must be > 0")));
        }
        Ok(Self { delta, delta_prime, horizon })
    }

    /// The critical-regime instance, where the log-weighted term uses `δ`
    /// itself and `δ′ = δ` is reported.
    pub fn critical(delta: f64, horizon: f64) -> Result<Self> {
        let w = Self::new(delta, delta / 2.0, horizon)?;
        Ok(Self { delta_prime: delta, ..w })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn delta_prime(&self) -> f64 {
        self.delta_prime
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(LabError::precondition(format!("horizon T = {horizon} must be > 0")));
        }
        Ok(Self { horizon, ..*self })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightExponents {
    pub delta: f64,
    pub delta_prime: f64,
}

impl WeightExponents {
    pub fn at_horizon(&self, horizon: f64) -> Result<WeightParams> {
        if self.delta_prime == self.delta {
            WeightParams::critical(self.delta, horizon)
        } else {
            WeightParams::new(self.delta, self.delta_prime, horizon)
        }
    }
}

/// Weight exponents `(δ, δ′)` attached to each existence regime.
///
/// * supercritical: `δ = (n-2s₂)(p-1)/4`, `δ′ = (1-(s₂-s₁)(p-1))/2` on the
///   window `1/2 ≤ s₁ < n/2 - 1/(p-1) < s₂ ≤ 1`;
/// * critical: `δ = (n-2s₂)(p-1)/4` with `1/2 < s₂ ≤ 1`, reported with `δ′ = δ`;
/// * subcritical: `δ = (n-1)(p-1)/2` below `1 + 1/(n-1)`, `(n-1)(p-1)/4` above.
///   No `δ′` enters there; it is fixed at `0`.
pub fn weight_exponents(regime: Regime, spec: &ProblemSpec, s1: f64, s2: f64) -> Result<WeightExponents> {
    let n = spec.n_dim as f64;
    let p = spec.p;
    let out = match regime {
        Regime::Supercritical => {
            let mid = n / 2.0 - 1.0 / (p - 1.0);
            if !(0.5 <= s1 && s1 < mid && mid < s2 && s2 <= 1.0) {
                return Err(LabError::precondition(format!(
                    "supercritical window requires 1/2 <= s1 < {mid} < s2 <= 1, got s1 = {s1}, s2 = {s2}"
                )));
            }
            WeightExponents {
                delta: (n - 2.0 * s2) * (p - 1.0) / 4.0,
                delta_prime: (1.0 - (s2 - s1) * (p - 1.0)) / 2.0,
            }
        }
        Regime::Critical => {
            if !(0.5 < s2 && s2 <= 1.0) {
                return Err(LabError::precondition(format!("critical regime requires 1/2 < s <= 1, got s = {s2}")));
            }
            let delta = (n - 2.0 * s2) * (p - 1.0) / 4.0;
            WeightExponents { delta, delta_prime: delta }
        }
        Regime::Subcritical => {
            let p_c = 1.0 + 2.0 / (n - 1.0);
            if p >= p_c {
                return Err(LabError::precondition(format!("subcritical regime requires p < p_c = {p_c}, got {p}")));
            }
            let delta = if p < 1.0 + 1.0 / (n - 1.0) {
                (n - 1.0) * (p - 1.0) / 2.0
            } else {
                (n - 1.0) * (p - 1.0) / 4.0
            };
            WeightExponents { delta, delta_prime: 0.0 }
        }
    };
    if !(out.delta > 0.0 && out.delta < 0.5) {
        return Err(LabError::precondition(format!("delta = {} falls outside (0, 1/2)", out.delta)));
    }
    if regime != Regime::Critical && out.delta_prime >= out.delta {
        return Err(LabError::precondition(format!(
            "delta' = {} is not below delta = {}",
            out.delta_prime, out.delta
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec(n: usize, p: f64) -> ProblemSpec {
        ProblemSpec::new(n, p, 1.0, 0.0).unwrap()
    }

    #[test]
    fn critical_exponent_values() {
        assert_abs_diff_eq!(critical_exponents(&spec(3, 1.7)).p_c, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(critical_exponents(&spec(2, 1.7)).p_c, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(critical_exponents(&spec(3, 2.0)).s_c, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn regime_classification() {
        assert_eq!(spec(3, 2.0).regime(), Regime::Critical);
        assert_eq!(spec(3, 2.5).regime(), Regime::Supercritical);
        assert_eq!(spec(3, 1.5).regime(), Regime::Subcritical);
        assert_eq!(spec(2, 3.0).regime(), Regime::Critical);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(ProblemSpec::new(1, 2.0, 1.0, 0.0).is_err());
        assert!(ProblemSpec::new(3, 1.0, 1.0, 0.0).is_err());
        assert!(ProblemSpec::new(3, f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn sphere_area_matches_gamma_formula() {
        for n in 2..=8 {
            let half = n as f64 / 2.0;
            let general = 2.0 * PI.powf(half) / statrs::function::gamma::gamma(half);
            assert!((sphere_area(n) - general).abs() < 1e-12 * general, "n = {n}");
        }
    }

    #[test]
    fn supercritical_weights() {
        let w = weight_exponents(Regime::Supercritical, &spec(3, 2.2), 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(w.delta, 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(w.delta_prime, 0.2, epsilon = 1e-14);
    }

    #[test]
    fn subcritical_weight_branches() {
        let w = weight_exponents(Regime::Subcritical, &spec(3, 1.5), 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(w.delta, 0.25, epsilon = 1e-14);
        let w = weight_exponents(Regime::Subcritical, &spec(3, 1.3), 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(w.delta, 0.3, epsilon = 1e-14);
    }

    #[test]
    fn critical_reports_delta_prime_equal_delta() {
        let w = weight_exponents(Regime::Critical, &spec(3, 2.0), 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(w.delta, 0.25, epsilon = 1e-14);
        assert_eq!(w.delta, w.delta_prime);
        let params = w.at_horizon(10.0).unwrap();
        assert_eq!(params.delta_prime(), params.delta());
    }

    #[test]
    fn empty_window_rejected() {
        // n/2 - 1/(p-1) = 0.667 for n=3, p=2.2: s1 above it is invalid
        assert!(weight_exponents(Regime::Supercritical, &spec(3, 2.2), 0.7, 1.0).is_err());
        assert!(weight_exponents(Regime::Supercritical, &spec(3, 2.2), 0.5, 0.6).is_err());
        assert!(weight_exponents(Regime::Critical, &spec(3, 2.0), 0.5, 0.5).is_err());
    }

    #[test]
    fn weight_params_invariants() {
        assert!(WeightParams::new(0.5, 0.1, 1.0).is_err());
        assert!(WeightParams::new(0.3, 0.3, 1.0).is_err());
        assert!(WeightParams::new(0.3, 0.2, 0.0).is_err());
        assert!(WeightParams::new(0.3, -1.0, 1.0).is_ok());
    }

    proptest::proptest! {
        #[test]
        fn supercritical_delta_always_admissible(n in 3usize..8, t1 in 0.01f64..0.99, t2 in 0.0f64..1.0, u in 0.0f64..1.0) {
            // p strictly inside (p_c, 1 + 2/(n-2))
            let nf = n as f64;
            let lo = 1.0 + 2.0 / (nf - 1.0);
            let hi = 1.0 + 2.0 / (nf - 2.0);
            let p = lo + t1 * (hi - lo);
            let mid = nf / 2.0 - 1.0 / (p - 1.0);
            if mid > 0.5 && mid < 1.0 {
                let s1 = 0.5 + t2 * (mid - 0.5) * 0.999;
                let s2 = mid + (1.0 - mid) * (0.001 + 0.999 * u);
                let w = weight_exponents(Regime::Supercritical, &spec(n, p), s1, s2).unwrap();
                proptest::prop_assert!(w.delta > 0.0 && w.delta < 0.5);
                proptest::prop_assert!(w.delta_prime < w.delta);
            }
        }
    }
}
