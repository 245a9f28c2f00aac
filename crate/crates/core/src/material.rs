//! Material constants and internal state of the four-branch network.

use crate::error::{Error, Result};
use crate::kelvin::SymTensorK;
use crate::potentials::BranchParams;
use crate::scalar::Real;

/// Hours per day; viscosities are quoted in kPa·day and used in kPa·hour.
pub const HOURS_PER_DAY: f64 = 24.0;

/// Spring-friction branch: spring constants plus plastic rate coefficient `cp` (kPa⁻¹).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlasticParams<T> {
    pub branch: BranchParams<T>,
    pub cp: T,
}

/// Maxwell branch: spring constants plus viscosity `eta` in kPa·hour.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ViscousParams<T> {
    pub branch: BranchParams<T>,
    pub eta: T,
}

impl<T: Real> ViscousParams<T> {
    /// Builds a branch from a viscosity given in kPa·day.
    pub fn from_days(branch: BranchParams<T>, eta_kpa_day: T) -> Self {
        Self {
            branch,
            eta: eta_kpa_day * T::lit(HOURS_PER_DAY),
        }
    }

    /// Relaxation time `η / (4 C1)` of the small-strain linearisation, hours.
    pub fn relaxation_time(&self) -> T {
        if self.branch.is_active() {
            self.eta / (T::lit(4.0) * self.branch.c1)
        } else {
            T::zero()
        }
    }
}

/// The fifteen constitutive constants (plus nothing else: the `D2` family
/// doubles as the near-incompressibility penalty).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialParams<T> {
    pub elastic: BranchParams<T>,
    pub plastic: PlasticParams<T>,
    pub viscous: [ViscousParams<T>; 2],
}

impl<T: Real> MaterialParams<T> {
    /// Calibrated undrained peat: elastoplastic set (C1 = 9, C1p = 50, cp = 0.1)
    /// and the two Maxwell branches (C1v = 8 / 40 kPa, ηv = 9 / 0.35 kPa·d),
    /// all bulk penalties 500 kPa, all exponents zero.
    pub fn fitted_peat() -> Self {
        let d2 = T::lit(500.0);
        let z = T::zero();
        Self {
            elastic: BranchParams::new(T::lit(9.0), d2, z),
            plastic: PlasticParams {
                branch: BranchParams::new(T::lit(50.0), d2, z),
                cp: T::lit(0.1),
            },
            viscous: [
                ViscousParams::from_days(BranchParams::new(T::lit(8.0), d2, z), T::lit(9.0)),
                ViscousParams::from_days(BranchParams::new(T::lit(40.0), d2, z), T::lit(0.35)),
            ],
        }
    }

    /// [`fitted_peat`](Self::fitted_peat) with both Maxwell branches switched off.
    pub fn fitted_equilibrium() -> Self {
        let mut p = Self::fitted_peat();
        p.viscous = [ViscousParams {
            branch: BranchParams::disabled(),
            eta: T::one(),
        }; 2];
        p
    }

    /// Single hyperelastic spring: only the elastic branch is active.
    pub fn elastic_only(c1: T, d2: T) -> Self {
        let mut p = Self::fitted_equilibrium();
        p.elastic = BranchParams::new(c1, d2, T::zero());
        p.plastic = PlasticParams {
            branch: BranchParams::disabled(),
            cp: T::zero(),
        };
        p
    }

    /// Divisor turning stresses into the dimensionless `S̃`.
    pub fn stress_scale(&self) -> T {
        if self.elastic.c1 > T::zero() {
            self.elastic.c1
        } else {
            T::one()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.elastic.validate("elastic")?;
        self.plastic.branch.validate("plastic")?;
        if !self.plastic.cp.is_finite() || self.plastic.cp < T::zero() {
            return Err(Error::invalid_param(
                "plastic.cp",
                format!("must be non-negative, got {}", self.plastic.cp),
            ));
        }
        for (i, v) in self.viscous.iter().enumerate() {
            let name = format!("viscous{}", i + 1);
            v.branch.validate(&name)?;
            if v.branch.is_active() && !(v.eta > T::zero() && v.eta.is_finite()) {
                return Err(Error::invalid_param(
                    format!("{name}.eta"),
                    format!("must be positive for an active branch, got {}", v.eta),
                ));
            }
        }
        Ok(())
    }
}

/// Inelastic right-Cauchy-Green-type tensors and the clock (hours).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InternalState<T> {
    pub cp: SymTensorK<T>,
    pub cv: [SymTensorK<T>; 2],
    pub t: T,
}

impl<T: Real> InternalState<T> {
    /// Undeformed material: every inelastic tensor is the identity.
    pub fn virgin() -> Self {
        let i = SymTensorK::identity();
        Self {
            cp: i,
            cv: [i, i],
            t: T::zero(),
        }
    }

    /// Green-Lagrange-type plastic strain `½ (Cp − I)`.
    pub fn plastic_strain(&self) -> SymTensorK<T> {
        (self.cp - SymTensorK::identity()).scale(T::lit(0.5))
    }

    /// Smallest eigenvalue over the three inelastic tensors.
    pub fn min_eigenvalue(&self) -> T {
        self.cp
            .min_eigenvalue()
            .min(self.cv[0].min_eigenvalue())
            .min(self.cv[1].min_eigenvalue())
    }
}

impl<T: Real> Default for InternalState<T> {
    fn default() -> Self {
        Self::virgin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn viscosity_conversion() {
        let p = MaterialParams::<f64>::fitted_peat();
        assert_eq!(p.viscous[0].eta, 216.0);
        assert!((p.viscous[1].eta - 8.4).abs() < 1e-12);
        p.validate().unwrap();
    }

    #[test]
    fn negative_cp_names_field() {
        let mut p = MaterialParams::<f64>::fitted_peat();
        p.plastic.cp = -0.1;
        match p.validate() {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "plastic.cp"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn active_branch_needs_viscosity() {
        let mut p = MaterialParams::<f64>::fitted_peat();
        p.viscous[1].eta = 0.0;
        assert!(p.validate().is_err());
        // a disabled branch may carry any viscosity
        let mut q = MaterialParams::<f64>::fitted_equilibrium();
        q.viscous[1].eta = 0.0;
        q.validate().unwrap();
    }

    #[test]
    fn virgin_state_is_identity() {
        let s = InternalState::<f64>::virgin();
        assert_eq!(s.plastic_strain(), SymTensorK::zero());
        assert_eq!(s.min_eigenvalue(), 1.0);
    }
}
