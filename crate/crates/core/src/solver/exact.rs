//! Closed-form free radial wave in three dimensions.
//!
//! For radial solutions of `□u = 0` in ℝ³, `w = r·u` solves the 1-D wave
//! equation on the half line with `w(t, 0) = 0`, so d'Alembert applies to
//! the odd extensions `Φ(s) = s·φ(|s|)`, `Ψ(s) = s·ψ(|s|)`.

use crate::error::{LabError, Result};
use crate::grid::{RadialField, RadialGrid, WaveState};
use crate::norms::NormWeights;

/// Data whose last-node magnitude is below this fraction of the peak are
/// treated as zero beyond `r_max`.
const TAIL_LEVEL: f64 = 1e-14;

/// Gauss–Legendre, 3 points on `[0, 1]` (exact for quintics).
const GAUSS3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

/// Cubic spline on uniform nodes with zero end slopes.
#[derive(Debug, Clone)]
struct ClampedSpline {
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl ClampedSpline {
    fn new(h: f64, y: &[f64]) -> Self {
        let n = y.len() - 1;
        let mut diag = vec![4.0; n + 1];
        let mut rhs = vec![0.0; n + 1];
        diag[0] = 2.0;
        diag[n] = 2.0;
        let c = 6.0 / (h * h);
        rhs[0] = c * (y[1] - y[0]);
        rhs[n] = -c * (y[n] - y[n - 1]);
        for i in 1..n {
            rhs[i] = c * (y[i + 1] - 2.0 * y[i] + y[i - 1]);
        }
        // Thomas algorithm, unit off-diagonals
        for i in 1..=n {
            let w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n + 1];
        m[n] = rhs[n] / diag[n];
        for i in (0..n).rev() {
            m[i] = (rhs[i] - m[i + 1]) / diag[i];
        }
        Self { h, y: y.to_vec(), m }
    }

    fn end(&self) -> f64 {
        (self.y.len() - 1) as f64 * self.h
    }

    fn locate(&self, x: f64) -> (usize, f64, f64) {
        let last = self.y.len() - 2;
        let i = ((x / self.h).floor() as usize).min(last);
        let a = ((i + 1) as f64 * self.h - x) / self.h;
        (i, a, 1.0 - a)
    }

    /// `(s, s', s'')` at `0 ≤ x ≤ end`.
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let (i, a, b) = self.locate(x);
        let (h, y0, y1, m0, m1) = (self.h, self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let s = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let ds = (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        (s, ds, a * m0 + b * m1)
    }
}

/// One data component `φ` with its odd extension `s·φ(|s|)` and the even
/// primitive `G(x) = ∫₀^{|x|} σφ(σ) dσ`.
#[derive(Debug, Clone)]
struct OddProfile {
    spline: ClampedSpline,
    cumulative: Vec<f64>,
    vanishes: bool,
}

impl OddProfile {
    fn new(f: &RadialField) -> Self {
        let spline = ClampedSpline::new(f.grid().spacing(), f.values());
        let h = spline.h;
        let mut cumulative = vec![0.0; spline.y.len()];
        for i in 0..spline.y.len() - 1 {
            let a = i as f64 * h;
            let seg: f64 = GAUSS3
                .iter()
                .map(|&(x, w)| {
                    let s = a + x * h;
                    w * s * spline.eval(s).0
                })
                .sum();
            cumulative[i + 1] = cumulative[i] + h * seg;
        }
        let peak = f.max_abs();
        let tail = f.values().last().copied().unwrap_or(0.0).abs();
        Self { spline, cumulative, vanishes: tail <= TAIL_LEVEL * peak }
    }

    fn guard(&self, x: f64) -> Result<bool> {
        let end = self.spline.end();
        if x.abs() <= end * (1.0 + 1e-14) {
            Ok(true)
        } else if self.vanishes {
            Ok(false)
        } else {
            Err(LabError::RangeViolation { point: x.abs(), limit: end })
        }
    }

    /// `(Φ, Φ′, Φ″)` at `s`.
    fn odd(&self, s: f64) -> Result<(f64, f64, f64)> {
        if !self.guard(s)? {
            return Ok((0.0, 0.0, 0.0));
        }
        let x = s.abs().min(self.spline.end());
        let (f, df, d2f) = self.spline.eval(x);
        let sign = if s < 0.0 { -1.0 } else { 1.0 };
        Ok((s * f, f + x * df, sign * (2.0 * df + x * d2f)))
    }

    fn primitive(&self, s: f64) -> Result<f64> {
        let x = s.abs();
        let end = self.spline.end();
        if !self.guard(x)? || x >= end {
            return Ok(*self.cumulative.last().unwrap());
        }
        let (i, _, _) = self.spline.locate(x);
        let a = i as f64 * self.spline.h;
        let len = x - a;
        let part: f64 = GAUSS3
            .iter()
            .map(|&(q, w)| {
                let s = a + q * len;
                w * s * self.spline.eval(s).0
            })
            .sum();
        Ok(self.cumulative[i] + len * part)
    }
}

/// Reusable exact propagator for fixed n = 3 data.
#[derive(Debug, Clone)]
pub struct FreeWaveN3 {
    phi: OddProfile,
    psi: OddProfile,
}

impl FreeWaveN3 {
    pub fn new(u0: &RadialField, u1: &RadialField) -> Result<Self> {
        u0.ensure_same_grid(u1)?;
        u0.check_finite("u0")?;
        u1.check_finite("u1")?;
        Ok(Self { phi: OddProfile::new(u0), psi: OddProfile::new(u1) })
    }

    /// `(u, ∂ₜu)` at `(t, r)`.
    pub fn point(&self, t: f64, r: f64) -> Result<(f64, f64)> {
        if r == 0.0 {
            let (_, dphi, d2phi) = self.phi.odd(t)?;
            let (psi, dpsi, _) = self.psi.odd(t)?;
            return Ok((dphi + psi, d2phi + dpsi));
        }
        let (pp, dpp, _) = self.phi.odd(r + t)?;
        let (pm, dpm, _) = self.phi.odd(r - t)?;
        let (qp, _, _) = self.psi.odd(r + t)?;
        let (qm, _, _) = self.psi.odd(r - t)?;
        let gp = self.psi.primitive(r + t)?;
        let gm = self.psi.primitive(r - t)?;
        let w = 0.5 * (pp + pm) + 0.5 * (gp - gm);
        let wt = 0.5 * (dpp - dpm) + 0.5 * (qp + qm);
        Ok((w / r, wt / r))
    }

    /// `∂ᵣu` at `(t, r)`, from `r·∂ᵣu = ∂ᵣ(r·u) − u`.
    pub fn radial_derivative(&self, t: f64, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        let (u, _) = self.point(t, r)?;
        let (_, dpp, _) = self.phi.odd(r + t)?;
        let (_, dpm, _) = self.phi.odd(r - t)?;
        let (qp, _, _) = self.psi.odd(r + t)?;
        let (qm, _, _) = self.psi.odd(r - t)?;
        let wr = 0.5 * (dpp + dpm) + 0.5 * (qp - qm);
        Ok((wr - u) / r)
    }

    /// Energy `½∫(|∂ₜu|² + |∂ᵣu|²)dx` at time `t` using exact derivatives.
    pub fn energy(&self, t: f64, grid: &RadialGrid) -> Result<f64> {
        let w = NormWeights::new(grid, 3, 0.0, 0.0)?;
        let mut v = vec![0.0; grid.len()];
        let mut ur = vec![0.0; grid.len()];
        for j in 0..grid.len() {
            v[j] = self.point(t, grid.node(j))?.1;
            ur[j] = self.radial_derivative(t, grid.node(j))?;
        }
        Ok(0.5 * (w.norm_sq(&v) + w.norm_sq(&ur)))
    }

    pub fn state(&self, t: f64, grid: &RadialGrid) -> Result<WaveState> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(LabError::precondition(format!("t = {t} must be finite and >= 0")));
        }
        let mut u = RadialField::zeros(*grid);
        let mut v = RadialField::zeros(*grid);
        for j in 0..grid.len() {
            let (a, b) = self.point(t, grid.node(j))?;
            u.values_mut()[j] = a;
            v.values_mut()[j] = b;
        }
        WaveState::new(t, u, v)
    }
}

/// Exact free solution at time `t` sampled on `grid`, for n = 3 data
/// `(u0, u1)` given on their own grid.
pub fn exact_free_n3(u0: &RadialField, u1: &RadialField, t: f64, grid: &RadialGrid) -> Result<WaveState> {
    FreeWaveN3::new(u0, u1)?.state(t, grid)
}
