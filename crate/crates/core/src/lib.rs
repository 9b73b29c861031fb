//! Numerical lab for `□u = a|∂ₜu|ᵖ + b|∇u|ᵖ` with radial data.

pub mod calculus;
pub mod error;
pub mod estimates;
pub mod golden;
pub mod grid;
pub mod lifespan;
pub mod norms;
pub mod picard;
pub mod problem;
pub mod quadrature;
pub mod report;
pub mod solver;

pub use error::{LabError, Result};
pub use grid::{RadialField, RadialGrid, Trajectory, WaveState};
pub use problem::{critical_exponents, weight_exponents, ProblemSpec, Regime, WeightParams};
