//! Nodal weights for `∫₀^{r_max} r^α ⟨r⟩^{2ν} f(r)² dr`.
//!
//! For `α ≥ 0` the composite trapezoid rule is used, with the `r = 0`
//! integrand replaced by its limit. For `-1 < α < 0` the integrand is
//! singular at the origin and trapezoid loses its order, so the factor `r^α`
//! is integrated exactly against the piecewise-linear interpolant of
//! `⟨r⟩^{2ν} f²` (product trapezoid).

use crate::grid::RadialGrid;

/// Four-point Gauss–Legendre nodes and weights on `[0, 1]`.
const GAUSS4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_93),
    (0.330_009_478_207_571_87, 0.326_072_577_431_273_07),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_07),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_93),
];

#[inline]
pub fn japanese(r: f64) -> f64 {
    (1.0 + r * r).sqrt()
}

/// `w` such that `Σ w_j f_j² ≈ ∫ r^α ⟨r⟩^{2ν} f² dr`. Requires `α > -1`.
pub fn radial_weights(grid: &RadialGrid, alpha: f64, nu: f64) -> Vec<f64> {
    debug_assert!(alpha > -1.0);
    let m = grid.num_cells();
    let dr = grid.spacing();
    let bracket = |r: f64| if nu == 0.0 { 1.0 } else { (1.0 + r * r).powf(nu) };
    let mut w = vec![0.0; m + 1];
    if alpha >= 0.0 {
        for (j, wj) in w.iter_mut().enumerate() {
            let r = j as f64 * dr;
            let radial = if j == 0 {
                if alpha == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                r.powf(alpha)
            };
            let trap = if j == 0 || j == m { 0.5 * dr } else { dr };
            *wj = trap * radial * bracket(r);
        }
    } else {
        // first cell: exact moments of r^α on [0, Δr]
        let m0 = dr.powf(alpha + 1.0) / (alpha + 1.0);
        let m1 = dr.powf(alpha + 2.0) / (alpha + 2.0);
        w[0] += (dr * m0 - m1) / dr;
        w[1] += m1 / dr;
        for j in 1..m {
            let a = j as f64 * dr;
            for &(x, gw) in &GAUSS4 {
                let r = a + x * dr;
                let rw = gw * dr * r.powf(alpha);
                w[j] += rw * (1.0 - x);
                w[j + 1] += rw * x;
            }
        }
        for (j, wj) in w.iter_mut().enumerate() {
            *wj *= bracket(j as f64 * dr);
        }
    }
    w
}

#[inline]
pub fn weighted_sum_sq(weights: &[f64], f: &[f64]) -> f64 {
    weights.iter().zip(f).map(|(w, x)| w * x * x).sum()
}

/// Trapezoid in time of samples `g_k` taken at `t_0 + k·dt`, truncated at
/// `horizon` (linear interpolation inside the last interval).
pub fn time_trapezoid(start: f64, dt: f64, g: &[f64], horizon: f64) -> f64 {
    if g.len() < 2 || horizon <= start {
        return 0.0;
    }
    let span = horizon - start;
    let full = ((span / dt) * (1.0 + 1e-12)).floor() as usize;
    let full = full.min(g.len() - 1);
    let mut acc = 0.0;
    for k in 0..full {
        acc += 0.5 * dt * (g[k] + g[k + 1]);
    }
    let rest = span - full as f64 * dt;
    if rest > 1e-12 * dt && full + 1 < g.len() {
        let theta = rest / dt;
        let g_end = g[full] + theta * (g[full + 1] - g[full]);
        acc += 0.5 * rest * (g[full] + g_end);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_weights_integrate_polynomial_moment() {
        // ∫_0^1 r^2 dr with f ≡ 1
        let g = RadialGrid::new(1.0, 1000).unwrap();
        let w = radial_weights(&g, 2.0, 0.0);
        let ones = vec![1.0; g.len()];
        assert!((weighted_sum_sq(&w, &ones) - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn product_rule_exact_on_singular_power() {
        // ∫_0^1 r^{-0.6} dr = 1/0.4; the singular first cell is exact, the rest is Gauss
        let g = RadialGrid::new(1.0, 50).unwrap();
        let w = radial_weights(&g, -0.6, 0.0);
        let ones = vec![1.0; g.len()];
        assert!((weighted_sum_sq(&w, &ones) - 2.5).abs() < 1e-6);
    }

    #[test]
    fn product_rule_second_order_on_gaussian() {
        // ∫_0^∞ r^{-1/2} e^{-2r^2} dr = Γ(1/4) / (2·2^{1/4})
        let exact = statrs::function::gamma::gamma(0.25) / (2.0 * 2f64.powf(0.25));
        let err = |m| {
            let g = RadialGrid::new(8.0, m).unwrap();
            let f: Vec<f64> = g.nodes().map(|r| (-r * r).exp()).collect();
            (weighted_sum_sq(&radial_weights(&g, -0.5, 0.0), &f) - exact).abs()
        };
        let order = (err(400) / err(800)).log2();
        assert!(order > 1.8, "order {order}");
    }

    #[test]
    fn time_trapezoid_truncates() {
        let g = [0.0, 1.0, 2.0, 3.0];
        // ∫_0^2 t dt = 2 exactly, sampled at t = 0, 1, 2, 3
        assert!((time_trapezoid(0.0, 1.0, &g, 2.0) - 2.0).abs() < 1e-14);
        assert!((time_trapezoid(0.0, 1.0, &g, 2.5) - 3.125).abs() < 1e-14);
        assert_eq!(time_trapezoid(0.0, 1.0, &g[..1], 2.0), 0.0);
    }
}
