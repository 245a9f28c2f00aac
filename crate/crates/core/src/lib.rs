//! Finite-strain hyperviscoplastic model for undrained peat under triaxial
//! loading.
//!
//! The material is a parallel network of an equilibrium spring, a
//! spring-friction (plastic) branch and two Maxwell branches, each with a
//! compressible exponential neo-Hookean energy. Everything is generic over
//! the scalar type; `f64` aliases are provided for convenience.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constitutive;
pub mod error;
pub mod io;
pub mod kelvin;
pub mod linalg;
pub mod material;
pub mod potentials;
pub mod scalar;
pub mod triaxial;
pub mod verify;

pub use constitutive::{
    dissipation_rate, local_solve, BranchStresses, Dissipation, FlowRuleMode, LocalSettings,
    LocalSolution, LocalStep, StateVector,
};
pub use error::{Error, Result};
pub use kelvin::{SymOperatorK, SymTensorK};
pub use material::{InternalState, MaterialParams, PlasticParams, ViscousParams};
pub use potentials::{BranchParams, PotentialDerivs};
pub use scalar::Real;

pub type SymTensor = SymTensorK<f64>;
pub type SymOperator = SymOperatorK<f64>;
pub type Params = MaterialParams<f64>;
pub type State = InternalState<f64>;
