//! Homogeneous undrained triaxial test at zero cell pressure.
//!
//! The specimen deforms with `F = diag(λ, μ, μ)`. Axial loading is either
//! strain controlled (platen in contact) or stress controlled; the platen may
//! lose contact on unloading, leaving the specimen to creep stress-free until
//! the platen catches up again.

mod driver;
mod global;
mod program;
mod record;

pub use driver::{run, ZERO_CROSSING_TOL};
pub use global::{
    cauchy_from_pk2, global_solve_free, global_solve_lateral, kinematics_from_stretch,
    strain_pct_from_stretch, stretch_from_strain_pct, volume_preserving_lateral, GlobalSolution,
    GlobalStep, MAX_GLOBAL_ITERATIONS,
};
pub use program::{
    LoadProgram, LoadSegment, DEFAULT_HALVINGS, DEFAULT_STEPS_PER_SEGMENT, EQUILIBRIUM_RATE,
    STEP_RELAXATION_HOURS, VALIDATION_RATES,
};
pub use record::{ControlMode, RecordRow, RunStats, SimulationRecord};
