//! Lifespan measurements over an amplitude ladder and their fits against
//! the power and exponential laws.

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::grid::RadialGrid;
use crate::problem::{ProblemSpec, Regime};
use crate::solver::{evolve, make_profile, DataProfile, EvolveOptions, SolveStatus};

/// Largest relative gap between the two finest rungs for a record to be fit.
pub const MAX_DISAGREEMENT: f64 = 0.10;

/// Relative tolerance on the fitted power-law slope.
pub const SLOPE_TOLERANCE: f64 = 0.20;

pub const MIN_FIT_RECORDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LawKind {
    /// Global existence, no finite lifespan law.
    Global,
    /// `log T ∝ ε^{1-p}`.
    Exponential { rate_power: f64 },
    /// `T ∝ ε^{exponent}`.
    PowerLaw { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedLaw {
    pub regime: Regime,
    pub kind: LawKind,
}

/// Exponent `-2(p-1)/(2-(n-1)(p-1))` of the subcritical law.
pub fn power_exponent(n: usize, p: f64) -> f64 {
    -2.0 * (p - 1.0) / (2.0 - (n as f64 - 1.0) * (p - 1.0))
}

pub fn predicted_law(spec: &ProblemSpec) -> PredictedLaw {
    let regime = spec.regime();
    let kind = match regime {
        Regime::Supercritical => LawKind::Global,
        Regime::Critical => LawKind::Exponential { rate_power: 1.0 - spec.p },
        Regime::Subcritical => LawKind::PowerLaw { exponent: power_exponent(spec.n_dim, spec.p) },
    };
    PredictedLaw { regime, kind }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifespanRecord {
    pub epsilon: f64,
    /// Blow-up time at the finest rung, or the horizon when censored.
    pub t_observed: f64,
    pub censored: bool,
    pub num_cells: usize,
    /// `|t_fine − t_next| / t_fine`.
    pub agreement: f64,
}

impl LifespanRecord {
    pub fn resolved(&self) -> bool {
        self.agreement <= MAX_DISAGREEMENT
    }

    fn fit_eligible(&self) -> bool {
        !self.censored && self.resolved()
    }
}

fn check_ladder(ladder: &[RadialGrid]) -> Result<()> {
    if !(2..=3).contains(&ladder.len()) {
        return Err(LabError::precondition(format!("resolution ladder needs 2 or 3 grids, got {}", ladder.len())));
    }
    if ladder.windows(2).any(|w| w[1].num_cells() <= w[0].num_cells()) {
        return Err(LabError::precondition("resolution ladder must be strictly refining"));
    }
    Ok(())
}

/// Runs the profile at amplitude `epsilon` on every grid of the ladder
/// (coarse to fine) up to `horizon`.
pub fn measure_lifespan(
    spec: &ProblemSpec,
    profile: &DataProfile,
    epsilon: f64,
    ladder: &[RadialGrid],
    horizon: f64,
    opts: &EvolveOptions,
) -> Result<LifespanRecord> {
    check_ladder(ladder)?;
    let prof = profile.with_epsilon(epsilon);
    let mut times = Vec::with_capacity(ladder.len());
    let mut blew = Vec::with_capacity(ladder.len());
    for grid in ladder {
        let data = make_profile(&prof, grid)?;
        let out = evolve(spec, &data, grid, horizon, None, false, opts)?;
        let dead = out.status == SolveStatus::BlewUp;
        times.push(if dead { out.t_blowup.expect("blow-up time") } else { horizon });
        blew.push(dead);
    }
    let k = ladder.len() - 1;
    let (fine, next) = (times[k], times[k - 1]);
    Ok(LifespanRecord {
        epsilon,
        t_observed: fine,
        censored: !blew[k],
        num_cells: ladder[k].num_cells(),
        agreement: (fine - next).abs() / fine,
    })
}

#[derive(Debug)]
pub struct SweepResult {
    /// One record per successful amplitude, in increasing `ε`.
    pub records: Vec<LifespanRecord>,
    pub failures: Vec<(f64, LabError)>,
}

/// One lifespan measurement per amplitude, run in parallel and merged in
/// `ε` order. A failing amplitude is reported without stopping the others.
pub fn sweep(
    spec: &ProblemSpec,
    profile: &DataProfile,
    epsilons: &[f64],
    ladder: &[RadialGrid],
    horizon: f64,
    opts: &EvolveOptions,
) -> Result<SweepResult> {
    if epsilons.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LabError::precondition("amplitudes must be strictly increasing"));
    }
    if epsilons.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(LabError::precondition("amplitudes must be finite and >= 0"));
    }
    if !epsilons.is_empty() {
        check_ladder(ladder)?;
    }
    let results: Vec<Result<LifespanRecord>> = epsilons
        .par_iter()
        .map(|&eps| measure_lifespan(spec, profile, eps, ladder, horizon, opts))
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (&eps, r) in epsilons.iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => failures.push((eps, e)),
        }
    }
    Ok(SweepResult { records, failures })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    PowerLaw,
    ExponentialRate,
}

impl FitModel {
    pub fn as_str(self) -> &'static str {
        match self {
            FitModel::PowerLaw => "power_law",
            FitModel::ExponentialRate => "exponential_rate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconsistent => "inconsistent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub model: FitModel,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// NaN for the exponential model, whose rate constant is not predicted.
    pub predicted_slope: f64,
    /// Absolute slope tolerance; NaN when the verdict is a model comparison.
    pub tolerance: f64,
    /// `r²` of the competing power-law fit (exponential model only).
    pub competing_r_squared: Option<f64>,
    pub verdict: Verdict,
    pub num_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let m = x.len();
    if m < 2 || y.len() != m {
        return Err(LabError::InsufficientData(format!("{m} points")));
    }
    let mf = m as f64;
    let mx = x.iter().sum::<f64>() / mf;
    let my = y.iter().sum::<f64>() / mf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(LabError::DegenerateInput("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(LineFit { slope, intercept, r_squared })
}

fn eligible(records: &[LifespanRecord]) -> Result<Vec<LifespanRecord>> {
    let censored = records.iter().filter(|r| r.censored).count();
    if 2 * censored > records.len() {
        return Err(LabError::InsufficientData(format!("{censored} of {} records are censored", records.len())));
    }
    let ok: Vec<LifespanRecord> = records.iter().copied().filter(LifespanRecord::fit_eligible).collect();
    if ok.len() < MIN_FIT_RECORDS {
        return Err(LabError::InsufficientData(format!(
            "{} usable records, need {MIN_FIT_RECORDS}",
            ok.len()
        )));
    }
    Ok(ok)
}

fn log_log(records: &[LifespanRecord]) -> Result<LineFit> {
    let x: Vec<f64> = records.iter().map(|r| r.epsilon.ln()).collect();
    let y: Vec<f64> = records.iter().map(|r| r.t_observed.ln()).collect();
    least_squares(&x, &y)
}

/// `log T` against `log ε`; consistent when the slope is within
/// `SLOPE_TOLERANCE·|predicted|` of `predicted`.
pub fn fit_power(records: &[LifespanRecord], predicted: f64) -> Result<FitResult> {
    let ok = eligible(records)?;
    let fit = log_log(&ok)?;
    let tolerance = SLOPE_TOLERANCE * predicted.abs();
    let verdict = if (fit.slope - predicted).abs() <= tolerance { Verdict::Consistent } else { Verdict::Inconsistent };
    Ok(FitResult {
        model: FitModel::PowerLaw,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        predicted_slope: predicted,
        tolerance,
        competing_r_squared: None,
        verdict,
        num_points: ok.len(),
    })
}

/// `log T` against `ε^{1-p}`; consistent when this fit explains more
/// variance than the log–log power fit on the same records.
pub fn fit_exponential(records: &[LifespanRecord], spec: &ProblemSpec) -> Result<FitResult> {
    if spec.regime() != Regime::Critical {
        return Err(LabError::precondition(format!(
            "exponential law applies at p = p_c only, got p = {} in {} dimensions",
            spec.p, spec.n_dim
        )));
    }
    let ok = eligible(records)?;
    let x: Vec<f64> = ok.iter().map(|r| r.epsilon.powf(1.0 - spec.p)).collect();
    let y: Vec<f64> = ok.iter().map(|r| r.t_observed.ln()).collect();
    let fit = least_squares(&x, &y)?;
    let power = log_log(&ok)?;
    let verdict = if fit.r_squared > power.r_squared { Verdict::Consistent } else { Verdict::Inconsistent };
    Ok(FitResult {
        model: FitModel::ExponentialRate,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        predicted_slope: f64::NAN,
        tolerance: f64::NAN,
        competing_r_squared: Some(power.r_squared),
        verdict,
        num_points: ok.len(),
    })
}
