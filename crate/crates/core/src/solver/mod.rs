//! Radial wave solver: data profiles, forcing, the RK4 evolution and an
//! exact n = 3 propagator used as an oracle.

pub mod evolve;
pub mod exact;
pub mod forcing;
pub mod profile;

pub use evolve::{duhamel, energy, evolve, nonlinearity, EvolveOptions, SolveOutcome, SolveStatus};
pub use exact::{exact_free_n3, FreeWaveN3};
pub use forcing::{FnForcing, Forcing, ForcingHistory};
pub use profile::{make_profile, Assignment, DataProfile, InitialData, ProfileFamily};
