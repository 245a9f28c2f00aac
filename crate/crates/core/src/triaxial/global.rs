//! Global equilibrium of the homogeneous triaxial specimen.

use crate::constitutive::{FlowRuleMode, LocalSettings, LocalSolution, LocalStep};
use crate::error::{Error, Result};
use crate::kelvin::SymTensorK;
use crate::material::{InternalState, MaterialParams};
use crate::scalar::Real;

pub const MAX_GLOBAL_ITERATIONS: usize = 30;

/// `C = diag(λ², 1 + 2e, 1 + 2e)`.
pub fn kinematics_from_stretch<T: Real>(lambda: T, e_lat: T) -> Result<SymTensorK<T>> {
    let lat = T::one() + T::lit(2.0) * e_lat;
    if !(lambda > T::zero()) || !(lat > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "non-positive stretch: lambda = {lambda}, 1 + 2e = {lat}"
        )));
    }
    Ok(SymTensorK::from_diag(lambda * lambda, lat, lat))
}

/// Lateral strain keeping `det C` unchanged when the axial stretch moves to `lambda`.
pub fn volume_preserving_lateral<T: Real>(lambda_old: T, e_old: T, lambda: T) -> T {
    ((T::one() + T::lit(2.0) * e_old) * lambda_old / lambda - T::one()) * T::lit(0.5)
}

/// Axial and lateral Cauchy stress from the principal PK2 components.
pub fn cauchy_from_pk2<T: Real>(lambda: T, e_lat: T, s11: T, s22: T) -> (T, T) {
    (
        lambda * s11 / (T::one() + T::lit(2.0) * e_lat),
        s22 / lambda,
    )
}

/// Axial engineering strain in percent, compression positive.
pub fn strain_pct_from_stretch<T: Real>(lambda: T) -> T {
    (T::one() - lambda) * T::lit(100.0)
}

pub fn stretch_from_strain_pct<T: Real>(strain: T) -> T {
    T::one() - strain / T::lit(100.0)
}

/// Converged global step.
#[derive(Clone, Debug)]
pub struct GlobalSolution<T> {
    pub lambda: T,
    pub e_lat: T,
    pub local: LocalSolution<T>,
    pub iterations: usize,
    pub residual: T,
    /// Largest local iteration count over all global iterates.
    pub max_local_iterations: usize,
}

impl<T: Real> GlobalSolution<T> {
    pub fn c(&self) -> SymTensorK<T> {
        let lat = T::one() + T::lit(2.0) * self.e_lat;
        SymTensorK::from_diag(self.lambda * self.lambda, lat, lat)
    }

    pub fn cauchy(&self) -> (T, T) {
        cauchy_from_pk2(
            self.lambda,
            self.e_lat,
            self.local.stress.v[0],
            self.local.stress.v[1],
        )
    }
}

/// Step data shared by the global solves.
#[derive(Clone, Copy, Debug)]
pub struct GlobalStep<'a, T> {
    pub c_prev: SymTensorK<T>,
    pub state_prev: &'a InternalState<T>,
    pub dt: T,
    pub params: &'a MaterialParams<T>,
    pub mode: FlowRuleMode,
}

impl<'a, T: Real> GlobalStep<'a, T> {
    fn local(&self, lambda: T, e_lat: T) -> Result<LocalSolution<T>> {
        let c = kinematics_from_stretch(lambda, e_lat).map_err(|_| Error::NonPhysicalState {
            what: "global iterate",
            value: (T::one() + T::lit(2.0) * e_lat).min(lambda).as_f64(),
        })?;
        LocalStep::new(
            c,
            self.c_prev,
            self.state_prev,
            self.dt,
            self.params,
            self.mode,
        )?
        .solve(&LocalSettings::default())
    }

    /// Axial stretch prescribed, lateral stress zero: scalar Newton on `S22(e) = 0`.
    pub fn solve_lateral(&self, lambda: T, e_guess: T) -> Result<GlobalSolution<T>> {
        let tol = T::global_tol();
        let mut e = e_guess;
        let mut max_local = 0;
        let mut last = T::nan();
        for it in 0..=MAX_GLOBAL_ITERATIONS {
            let sol = self.local(lambda, e)?;
            max_local = max_local.max(sol.iterations);
            let r = sol.stress.v[1];
            last = r.abs();
            if !last.is_finite() {
                break;
            }
            if last < tol {
                return Ok(GlobalSolution {
                    lambda,
                    e_lat: e,
                    local: sol,
                    iterations: it,
                    residual: last,
                    max_local_iterations: max_local,
                });
            }
            // lateral strains e22 = e33 = e, Kelvin normal slots carry no weight
            let slope = sol.tangent.m[1][1] + sol.tangent.m[1][2];
            if !(slope.abs() > T::zero()) {
                return Err(Error::NonPhysicalState {
                    what: "lateral tangent",
                    value: slope.as_f64(),
                });
            }
            e = e - r / slope;
        }
        Err(Error::NoConvergence {
            iterations: MAX_GLOBAL_ITERATIONS,
            residual: last.as_f64(),
        })
    }

    /// Axial Cauchy stress prescribed (`sigma`, tension positive), lateral
    /// stress zero: Newton on `(E11, e)`.
    pub fn solve_axial(&self, sigma: T, guess: (T, T)) -> Result<GlobalSolution<T>> {
        let tol = T::global_tol();
        let two = T::lit(2.0);
        let (mut lambda, mut e) = guess;
        let mut max_local = 0;
        let mut last = T::nan();
        for it in 0..=MAX_GLOBAL_ITERATIONS {
            let sol = self.local(lambda, e)?;
            max_local = max_local.max(sol.iterations);
            let s = &sol.stress.v;
            let lat = T::one() + two * e;
            let r1 = lambda * s[0] - sigma * lat;
            let r2 = s[1];
            // measured on the PK2 scale so a stress-free face has |S11| < tol
            last = (r1 / lambda).abs().max(r2.abs());
            if !last.is_finite() {
                break;
            }
            if last < tol {
                return Ok(GlobalSolution {
                    lambda,
                    e_lat: e,
                    local: sol,
                    iterations: it,
                    residual: last,
                    max_local_iterations: max_local,
                });
            }
            let t = &sol.tangent.m;
            // unknowns (E11, e); dλ/dE11 = 1/λ
            let a11 = s[0] / lambda + lambda * t[0][0];
            let a12 = lambda * (t[0][1] + t[0][2]) - two * sigma;
            let a21 = t[1][0];
            let a22 = t[1][1] + t[1][2];
            let det = a11 * a22 - a12 * a21;
            if !(det.abs() > T::zero()) {
                return Err(Error::NonPhysicalState {
                    what: "global tangent determinant",
                    value: det.as_f64(),
                });
            }
            let d_e11 = (r1 * a22 - r2 * a12) / det;
            let d_e = (a11 * r2 - a21 * r1) / det;
            let e11 = (lambda * lambda - T::one()) / two - d_e11;
            let sq = T::one() + two * e11;
            if !(sq > T::zero()) {
                return Err(Error::NonPhysicalState {
                    what: "axial stretch squared",
                    value: sq.as_f64(),
                });
            }
            lambda = sq.sqrt();
            e = e - d_e;
        }
        Err(Error::NoConvergence {
            iterations: MAX_GLOBAL_ITERATIONS,
            residual: last.as_f64(),
        })
    }
}

/// Lateral-stress-free solve at fixed axial stretch.
pub fn global_solve_lateral<T: Real>(
    lambda: T,
    e_guess: T,
    c_prev: &SymTensorK<T>,
    state: &InternalState<T>,
    dt: T,
    p: &MaterialParams<T>,
    mode: FlowRuleMode,
) -> Result<GlobalSolution<T>> {
    GlobalStep {
        c_prev: *c_prev,
        state_prev: state,
        dt,
        params: p,
        mode,
    }
    .solve_lateral(lambda, e_guess)
}

/// Fully stress-free solve; the guess is `(λ, e)`.
pub fn global_solve_free<T: Real>(
    guess: (T, T),
    c_prev: &SymTensorK<T>,
    state: &InternalState<T>,
    dt: T,
    p: &MaterialParams<T>,
    mode: FlowRuleMode,
) -> Result<GlobalSolution<T>> {
    GlobalStep {
        c_prev: *c_prev,
        state_prev: state,
        dt,
        params: p,
        mode,
    }
    .solve_axial(T::zero(), guess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kinematics_examples() {
        assert_eq!(
            kinematics_from_stretch(1.0, 0.0).unwrap(),
            SymTensorK::identity()
        );
        let e = volume_preserving_lateral(1.0, 0.0, 0.8);
        let c = kinematics_from_stretch(0.8, e).unwrap();
        assert_relative_eq!(c.v[0], 0.64, max_relative = 1e-15);
        assert_relative_eq!(c.v[1], 1.25, max_relative = 1e-15);
        assert_relative_eq!(c.v[2], 1.25, max_relative = 1e-15);
        let c = kinematics_from_stretch(0.8, 0.0).unwrap();
        assert!((c - SymTensorK::from_diag(0.64, 1.0, 1.0)).norm() < 1e-15);
        assert!(kinematics_from_stretch(0.0, 0.0).is_err());
        assert!(kinematics_from_stretch(1.0, -0.6).is_err());
    }

    #[test]
    fn virgin_unit_stretch_is_trivial() {
        let p = MaterialParams::<f64>::fitted_peat();
        let s = InternalState::virgin();
        let i = SymTensorK::identity();
        let g = global_solve_lateral(1.0, 0.0, &i, &s, 0.1, &p, FlowRuleMode::Original).unwrap();
        assert_eq!(g.e_lat, 0.0);
        assert!(g.local.stress.norm() < 1e-12);
        let f = global_solve_free((1.0, 0.0), &i, &s, 0.1, &p, FlowRuleMode::Original).unwrap();
        assert_eq!((f.lambda, f.e_lat), (1.0, 0.0));
    }

    #[test]
    fn elastic_lateral_solve_is_nearly_isochoric() {
        let i = SymTensorK::identity();
        let s = InternalState::virgin();
        for (d2, vol_tol) in [(500.0, 5e-3), (5e4, 1e-4)] {
            let p = MaterialParams::<f64>::elastic_only(9.0, d2);
            let e0 = volume_preserving_lateral(1.0, 0.0, 0.8);
            let g = global_solve_lateral(0.8, e0, &i, &s, 1.0, &p, FlowRuleMode::Original).unwrap();
            let i3 = g.c().det();
            assert!((i3 - 1.0).abs() < vol_tol, "D2 = {d2}: I3 = {i3}");
            assert!(g.local.stress.v[1].abs() < 1e-9);
        }
    }

    #[test]
    fn free_solve_balances_prescribed_stress() {
        let p = MaterialParams::<f64>::elastic_only(9.0, 500.0);
        let i = SymTensorK::identity();
        let s = InternalState::virgin();
        let g = GlobalStep {
            c_prev: i,
            state_prev: &s,
            dt: 1.0,
            params: &p,
            mode: FlowRuleMode::Original,
        }
        .solve_axial(-5.0, (1.0, 0.0))
        .unwrap();
        let (sa, sl) = g.cauchy();
        assert!((sa + 5.0).abs() < 1e-9);
        assert!(sl.abs() < 1e-9);
        assert!(g.lambda < 1.0);
    }
}
