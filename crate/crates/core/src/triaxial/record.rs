use std::fmt;
use std::str::FromStr;

use crate::constitutive::Dissipation;
use crate::error::Error;
use crate::scalar::Real;

/// Boundary condition active on the axial face during a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ControlMode {
    /// Platen in contact, axial strain prescribed.
    #[default]
    Strain,
    /// Platen detached, specimen stress-free.
    Free,
    /// Axial stress prescribed.
    Stress,
}

impl ControlMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ControlMode::Strain => "strain",
            ControlMode::Free => "free",
            ControlMode::Stress => "stress",
        }
    }
}

impl fmt::Display for ControlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ControlMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "strain" => Ok(ControlMode::Strain),
            "free" => Ok(ControlMode::Free),
            "stress" => Ok(ControlMode::Stress),
            other => Err(Error::InvalidArgument(format!(
                "unknown control mode '{other}'"
            ))),
        }
    }
}

/// One output row. Strains and stresses follow the soil convention
/// (compression positive) except `s11_kpa`, which is the raw axial PK2 stress.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecordRow<T> {
    pub t: T,
    pub axial_strain_pct: T,
    pub stretch: T,
    pub q_kpa: T,
    pub s11_kpa: T,
    pub i3: T,
    pub ep_norm: T,
    pub overstress_kpa: [T; 2],
    pub mode: ControlMode,
    pub dissipation: Dissipation<T>,
    /// `‖S‖ ‖ΔE‖ / Δt` over the step, kPa/h.
    pub power_scale: T,
    pub platen_strain_pct: T,
    /// Whether the plastic flow rule was switched on for the step.
    pub plastic_gate: bool,
}

/// Solver statistics gathered over accepted steps.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RunStats<T> {
    pub steps: usize,
    pub rejected_steps: usize,
    pub max_local_iterations: usize,
    pub max_global_iterations: usize,
    /// Last three local residual norms of every accepted step that needed
    /// at least two Newton updates.
    pub local_tails: Vec<[T; 3]>,
    pub min_internal_eigenvalue: T,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SimulationRecord<T> {
    pub rows: Vec<RecordRow<T>>,
    pub stats: RunStats<T>,
}

impl<T: Real> SimulationRecord<T> {
    pub fn peak_q(&self) -> T {
        self.rows
            .iter()
            .map(|r| r.q_kpa)
            .fold(T::neg_infinity(), T::max)
    }

    pub fn final_row(&self) -> Option<&RecordRow<T>> {
        self.rows.last()
    }

    /// Material strain left at the end of the run, %.
    pub fn irrecoverable_strain(&self) -> T {
        self.rows
            .last()
            .map(|r| r.axial_strain_pct)
            .unwrap_or(T::zero())
    }

    /// Largest `|I3 − 1|` over all rows.
    pub fn max_volume_change(&self) -> T {
        self.rows
            .iter()
            .map(|r| (r.i3 - T::one()).abs())
            .fold(T::zero(), T::max)
    }
}
