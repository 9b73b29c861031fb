//! Second-order finite differences for radial functions.

use crate::grid::RadialField;

/// `∂ᵣf`: centered in the interior, one-sided second order at both ends.
pub fn radial_derivative(f: &RadialField) -> RadialField {
    let mut out = RadialField::zeros(*f.grid());
    derivative_into(f.values(), f.grid().spacing(), out.values_mut());
    out
}

/// `Δf = f'' + (n-1)/r·f'`, with `Δf(0) = n·f''(0)` taken from the even
/// extension `f(-Δr) = f(Δr)`.
pub fn radial_laplacian(f: &RadialField, n: usize) -> RadialField {
    let mut out = RadialField::zeros(*f.grid());
    laplacian_into(f.values(), f.grid().spacing(), n, out.values_mut());
    let m = f.values().len() - 1;
    let dr = f.grid().spacing();
    let v = f.values();
    // the solver never uses the outer node; the standalone operator fills it
    // with the one-sided stencils that are exact on cubics
    let second = (2.0 * v[m] - 5.0 * v[m - 1] + 4.0 * v[m - 2] - v[m - 3]) / (dr * dr);
    let first = (3.0 * v[m] - 4.0 * v[m - 1] + v[m - 2]) / (2.0 * dr);
    out.values_mut()[m] = second + (n as f64 - 1.0) / (m as f64 * dr) * first;
    out
}

pub(crate) fn derivative_into(f: &[f64], dr: f64, out: &mut [f64]) {
    let m = f.len() - 1;
    let inv = 0.5 / dr;
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv;
    for j in 1..m {
        out[j] = (f[j + 1] - f[j - 1]) * inv;
    }
    out[m] = (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]) * inv;
}

/// Interior and origin stencils; `out[last]` is set to zero.
pub(crate) fn laplacian_into(f: &[f64], dr: f64, n: usize, out: &mut [f64]) {
    let m = f.len() - 1;
    let inv2 = 1.0 / (dr * dr);
    let k = n as f64 - 1.0;
    out[0] = n as f64 * 2.0 * (f[1] - f[0]) * inv2;
    for j in 1..m {
        let second = (f[j + 1] - 2.0 * f[j] + f[j - 1]) * inv2;
        let first = (f[j + 1] - f[j - 1]) * (0.5 / dr);
        out[j] = second + k / (j as f64 * dr) * first;
    }
    out[m] = 0.0;
}
