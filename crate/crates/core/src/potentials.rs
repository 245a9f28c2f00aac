//! Modified Neo-Hookean free energy shared by every spring of the rheological
//! network:
//!
//! ```text
//! ψ(I1, I3) = (c1/α) (exp(α u) − 1) + d2 (ln I3)²,   u = I1 − ln I3 − 3
//! ```
//!
//! with the analytic limit `ψ = c1 u + d2 (ln I3)²` at `α = 0`. Only the
//! derivatives enter stresses and flow rules; the `−1` makes the energy vanish
//! in the reference configuration and keeps it continuous in `α`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kelvin::SymTensorK;
use crate::scalar::Real;

/// Largest admissible exponent `α u` before the evaluation is rejected.
pub const EXPONENT_GUARD: f64 = 700.0;

/// Parameters of one spring: modulus, bulk penalty, nonlinearity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchParams<T> {
    /// Modulus `C1` in kPa; `0` disables the branch.
    pub c1: T,
    /// Bulk penalty `D2` in kPa.
    pub d2: T,
    /// Nonlinearity exponent.
    pub alpha: T,
}

impl<T: Real> BranchParams<T> {
    pub fn new(c1: T, d2: T, alpha: T) -> Self {
        Self { c1, d2, alpha }
    }

    pub fn disabled() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    /// A branch with vanishing modulus carries no energy at all (its bulk
    /// penalty is ignored too).
    pub fn is_active(&self) -> bool {
        self.c1 > T::zero()
    }

    /// Checks `c1 ≥ 0`, `d2 ≥ 0`, `α ≥ 0`; `prefix` names the branch in errors.
    pub fn validate(&self, prefix: &str) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("d2", self.d2), ("alpha", self.alpha)] {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::invalid_param(
                    format!("{prefix}.{name}"),
                    format!("must be finite and non-negative, got {v}"),
                ));
            }
        }
        Ok(())
    }

    pub fn eval(&self, i1: T, i3: T) -> Result<PotentialDerivs<T>> {
        eval(self, i1, i3)
    }
}

/// Energy and its first and second invariant derivatives (all in kPa).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PotentialDerivs<T> {
    pub psi: T,
    pub dpsi_di1: T,
    pub dpsi_di3: T,
    pub d2psi_di1i1: T,
    pub d2psi_di1i3: T,
    pub d2psi_di3i3: T,
}

/// `(I1, I3) = (tr C, det C)`.
pub fn invariants_of<T: Real>(c: &SymTensorK<T>) -> Result<(T, T)> {
    let i3 = c.det();
    if !(i3 > T::zero()) {
        return Err(Error::NonPhysicalState {
            what: "I3",
            value: i3.as_f64(),
        });
    }
    Ok((c.trace(), i3))
}

/// Invariants of the elastic measure `C X⁻¹`: `tr(C X⁻¹)` and `det C / det X`.
///
/// Both tensors being symmetric, `tr(C X⁻¹) = C : X⁻¹`.
pub fn mixed_invariants<T: Real>(c: &SymTensorK<T>, x_inv: &SymTensorK<T>) -> Result<(T, T)> {
    let i3 = c.det() * x_inv.det();
    if !(i3 > T::zero()) {
        return Err(Error::NonPhysicalState {
            what: "I3 of elastic measure",
            value: i3.as_f64(),
        });
    }
    Ok((c.dot(x_inv), i3))
}

pub fn eval<T: Real>(p: &BranchParams<T>, i1: T, i3: T) -> Result<PotentialDerivs<T>> {
    if !(i3 > T::zero()) {
        return Err(Error::NonPhysicalState {
            what: "I3",
            value: i3.as_f64(),
        });
    }
    let ln3 = i3.ln();
    let u = i1 - ln3 - T::lit(3.0);
    let au = p.alpha * u;
    if !(au <= T::lit(EXPONENT_GUARD)) || !au.is_finite() {
        return Err(Error::Overflow {
            exponent: au.as_f64(),
        });
    }
    let ex = au.exp();
    if !ex.is_finite() {
        return Err(Error::Overflow {
            exponent: au.as_f64(),
        });
    }
    let c1 = p.c1;
    let d2 = p.d2;
    let two = T::lit(2.0);
    let shape = if p.alpha > T::zero() {
        c1 * au.exp_m1() / p.alpha
    } else {
        c1 * u
    };
    let inv3 = T::one() / i3;
    Ok(PotentialDerivs {
        psi: shape + d2 * ln3 * ln3,
        dpsi_di1: c1 * ex,
        dpsi_di3: -c1 * ex * inv3 + two * d2 * ln3 * inv3,
        d2psi_di1i1: c1 * p.alpha * ex,
        d2psi_di1i3: -c1 * p.alpha * ex * inv3,
        d2psi_di3i3: (c1 * (T::one() + p.alpha) * ex + two * d2 * (T::one() - ln3)) * inv3 * inv3,
    })
}
