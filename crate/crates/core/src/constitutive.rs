//! Local material-point problem.
//!
//! For a prescribed right Cauchy-Green tensor `C` at the end of a step, the
//! backward-Euler discretisation of the inelastic evolution equations
//!
//! ```text
//! Ċv = (4/ηv) (ψ1 C + I3 ψ3 Cv)                 (each Maxwell branch)
//! Ċp = 2 cp ‖Ċ‖ (ψ1 C + I3 ψ3 Cp) [· H(gate)]   (spring-friction branch)
//! ```
//!
//! together with the stress relation is written as `r(z) = 0` for the state
//! vector `z = [S̃, Cv1, Cv2, Cp]` (24 Kelvin coordinates, `S̃ = S / C1`) and
//! solved with Newton's method. The converged Jacobian then yields the
//! consistent tangent `dS/dE` from `J dz/dE = −∂r/∂E`.

use crate::error::{Error, Result};
use crate::kelvin::{SymOperatorK, SymTensorK};
use crate::linalg::{DenseMatrix, Lu};
use crate::material::{InternalState, MaterialParams};
use crate::potentials::{mixed_invariants, BranchParams, PotentialDerivs};
use crate::scalar::Real;

pub const STATE_LEN: usize = 24;

/// Block positions inside [`StateVector`].
pub const BLOCK_STRESS: usize = 0;
pub const BLOCK_CV1: usize = 1;
pub const BLOCK_CV2: usize = 2;
pub const BLOCK_CP: usize = 3;

/// Plastic flow rule variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FlowRuleMode {
    #[default]
    Original,
    /// Plastic flow only where the plastic driving stress and the strain
    /// increment are aligned (`H(0) = 1`).
    HeavisideGated,
}

/// `[S̃, Cv1, Cv2, Cp]` in Kelvin coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector<T> {
    pub z: [T; STATE_LEN],
}

impl<T: Real> StateVector<T> {
    pub fn from_parts(s_tilde: SymTensorK<T>, cv: [SymTensorK<T>; 2], cp: SymTensorK<T>) -> Self {
        let mut z = [T::zero(); STATE_LEN];
        for (b, t) in [s_tilde, cv[0], cv[1], cp].iter().enumerate() {
            z[6 * b..6 * b + 6].copy_from_slice(&t.v);
        }
        Self { z }
    }

    pub fn block(&self, b: usize) -> SymTensorK<T> {
        let mut v = [T::zero(); 6];
        v.copy_from_slice(&self.z[6 * b..6 * b + 6]);
        SymTensorK::new(v)
    }

    pub fn stress_tilde(&self) -> SymTensorK<T> {
        self.block(BLOCK_STRESS)
    }

    pub fn cv(&self, i: usize) -> SymTensorK<T> {
        self.block(BLOCK_CV1 + i)
    }

    pub fn cp(&self) -> SymTensorK<T> {
        self.block(BLOCK_CP)
    }

    pub fn norm(&self) -> T {
        self.z.iter().fold(T::zero(), |a, &x| a + x * x).sqrt()
    }
}

/// Converged local step.
#[derive(Clone, Debug)]
pub struct LocalSolution<T> {
    /// Second Piola-Kirchhoff stress, kPa.
    pub stress: SymTensorK<T>,
    pub state: InternalState<T>,
    /// Consistent tangent `dS/dE`, kPa. Not symmetrised.
    pub tangent: SymOperatorK<T>,
    pub iterations: usize,
    pub residual_norm: T,
    /// Scaled residual norms, starting with the initial guess.
    pub residual_history: Vec<T>,
    /// Whether plastic flow was switched on during the step.
    pub plastic_gate: bool,
    pub z: StateVector<T>,
}

/// Local Newton controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalSettings<T> {
    pub tol: T,
    pub max_iterations: usize,
}

impl<T: Real> Default for LocalSettings<T> {
    fn default() -> Self {
        Self {
            tol: T::newton_tol(),
            max_iterations: 50,
        }
    }
}

/// Energy derivatives of one branch evaluated at `(C, X)`; `X = I` for the
/// purely elastic spring.
#[derive(Clone, Copy, Debug)]
pub struct BranchEval<T> {
    pub x: SymTensorK<T>,
    pub x_inv: SymTensorK<T>,
    pub i1: T,
    pub i3: T,
    pub d: PotentialDerivs<T>,
}

impl<T: Real> BranchEval<T> {
    pub fn new(p: &BranchParams<T>, c: &SymTensorK<T>, x: &SymTensorK<T>) -> Result<Self> {
        let x_inv = x.inv()?;
        let (i1, i3) = mixed_invariants(c, &x_inv)?;
        let d = p.eval(i1, i3)?;
        Ok(Self {
            x: *x,
            x_inv,
            i1,
            i3,
            d,
        })
    }

    /// Branch stress `2 (ψ1 X⁻¹ + I3 ψ3 C⁻¹)`.
    pub fn stress(&self, c_inv: &SymTensorK<T>) -> SymTensorK<T> {
        let two = T::lit(2.0);
        self.x_inv.scale(two * self.d.dpsi_di1) + c_inv.scale(two * self.i3 * self.d.dpsi_di3)
    }

    /// Flow direction `ψ1 C + I3 ψ3 X`.
    pub fn flow(&self, c: &SymTensorK<T>) -> SymTensorK<T> {
        c.scale(self.d.dpsi_di1) + self.x.scale(self.i3 * self.d.dpsi_di3)
    }

    /// `I3 (ψ3 + I3 ψ33)`.
    fn k33(&self) -> T {
        self.i3 * (self.d.dpsi_di3 + self.i3 * self.d.d2psi_di3i3)
    }

    /// `∂S/∂X`.
    pub fn dstress_dx(&self, c: &SymTensorK<T>, c_inv: &SymTensorK<T>) -> SymOperatorK<T> {
        let d = &self.d;
        let a = self.x_inv.sandwich(c);
        let mut op = SymOperatorK::dyad(&self.x_inv, &a).scale(d.d2psi_di1i1);
        op += (SymOperatorK::dyad(&self.x_inv, &self.x_inv) + SymOperatorK::dyad(c_inv, &a))
            .scale(self.i3 * d.d2psi_di1i3);
        op += SymOperatorK::dyad(c_inv, &self.x_inv).scale(self.k33());
        op += SymOperatorK::symprod(&self.x_inv, &self.x_inv).scale(d.dpsi_di1);
        op.scale(-T::lit(2.0))
    }

    /// `∂S/∂C`.
    pub fn dstress_dc(&self, c_inv: &SymTensorK<T>) -> SymOperatorK<T> {
        let d = &self.d;
        let mut op = SymOperatorK::dyad(&self.x_inv, &self.x_inv).scale(d.d2psi_di1i1);
        op += (SymOperatorK::dyad(&self.x_inv, c_inv) + SymOperatorK::dyad(c_inv, &self.x_inv))
            .scale(self.i3 * d.d2psi_di1i3);
        op += SymOperatorK::dyad(c_inv, c_inv).scale(self.k33());
        op += SymOperatorK::symprod(c_inv, c_inv).scale(-self.i3 * d.dpsi_di3);
        op.scale(T::lit(2.0))
    }

    /// `∂G/∂X` of the flow direction `G`.
    pub fn dflow_dx(&self, c: &SymTensorK<T>) -> SymOperatorK<T> {
        let d = &self.d;
        let a = self.x_inv.sandwich(c);
        let mut op = SymOperatorK::dyad(c, &a).scale(d.d2psi_di1i1);
        op += (SymOperatorK::dyad(c, &self.x_inv) + SymOperatorK::dyad(&self.x, &a))
            .scale(self.i3 * d.d2psi_di1i3);
        op += SymOperatorK::dyad(&self.x, &self.x_inv).scale(self.k33());
        SymOperatorK::identity().scale(self.i3 * d.dpsi_di3) - op
    }

    /// `∂G/∂C` of the flow direction `G`.
    pub fn dflow_dc(&self, c: &SymTensorK<T>, c_inv: &SymTensorK<T>) -> SymOperatorK<T> {
        let d = &self.d;
        let mut op = SymOperatorK::dyad(c, &self.x_inv).scale(d.d2psi_di1i1);
        op += (SymOperatorK::dyad(c, c_inv) + SymOperatorK::dyad(&self.x, &self.x_inv))
            .scale(self.i3 * d.d2psi_di1i3);
        op += SymOperatorK::identity().scale(d.dpsi_di1);
        op += SymOperatorK::dyad(&self.x, c_inv).scale(self.k33());
        op
    }

    /// Thermodynamic force conjugate to `Ẋ`: `−∂ψ/∂X = X⁻¹ G X⁻¹`.
    pub fn driving_force(&self, c: &SymTensorK<T>) -> SymTensorK<T> {
        self.x_inv.sandwich(&self.flow(c))
    }
}

/// Stress of each branch at `(C, state)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchStresses<T> {
    pub equilibrium: SymTensorK<T>,
    pub plastic: SymTensorK<T>,
    pub overstress: [SymTensorK<T>; 2],
}

impl<T: Real> BranchStresses<T> {
    pub fn total(&self) -> SymTensorK<T> {
        self.equilibrium + self.plastic + self.overstress[0] + self.overstress[1]
    }
}

/// Total second Piola-Kirchhoff stress split by branch.
pub fn branch_stresses<T: Real>(
    c: &SymTensorK<T>,
    state: &InternalState<T>,
    p: &MaterialParams<T>,
) -> Result<BranchStresses<T>> {
    let c_inv = c.inv()?;
    let eval = |bp: &BranchParams<T>, x: &SymTensorK<T>| -> Result<SymTensorK<T>> {
        if bp.is_active() {
            Ok(BranchEval::new(bp, c, x)?.stress(&c_inv))
        } else {
            Ok(SymTensorK::zero())
        }
    };
    Ok(BranchStresses {
        equilibrium: eval(&p.elastic, &SymTensorK::identity())?,
        plastic: eval(&p.plastic.branch, &state.cp)?,
        overstress: [
            eval(&p.viscous[0].branch, &state.cv[0])?,
            eval(&p.viscous[1].branch, &state.cv[1])?,
        ],
    })
}

/// Everything the local residual depends on apart from `z`.
#[derive(Clone, Copy, Debug)]
pub struct LocalStep<'a, T> {
    pub c: SymTensorK<T>,
    pub c_prev: SymTensorK<T>,
    pub state_prev: &'a InternalState<T>,
    pub dt: T,
    pub params: &'a MaterialParams<T>,
    pub mode: FlowRuleMode,
    /// Frozen value of the plastic gate; `None` evaluates it from `z`.
    pub gate: Option<bool>,
}

/// Everything evaluated once per Newton iterate.
struct Evaluated<T> {
    c_inv: SymTensorK<T>,
    elastic: Option<BranchEval<T>>,
    plastic: Option<BranchEval<T>>,
    viscous: [Option<BranchEval<T>>; 2],
    gate: bool,
}

fn write_block<T: Real>(m: &mut DenseMatrix<T>, bi: usize, bj: usize, op: &SymOperatorK<T>) {
    for i in 0..6 {
        for j in 0..6 {
            m[(6 * bi + i, 6 * bj + j)] = op.m[i][j];
        }
    }
}

impl<'a, T: Real> LocalStep<'a, T> {
    pub fn new(
        c: SymTensorK<T>,
        c_prev: SymTensorK<T>,
        state_prev: &'a InternalState<T>,
        dt: T,
        params: &'a MaterialParams<T>,
        mode: FlowRuleMode,
    ) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive, got {dt}"
            )));
        }
        Ok(Self {
            c,
            c_prev,
            state_prev,
            dt,
            params,
            mode,
            gate: None,
        })
    }

    /// `‖C − Cᵗ‖`.
    pub fn strain_increment_norm(&self) -> T {
        (self.c - self.c_prev).norm()
    }

    /// Sign test of the gated flow rule, `(ψ1 C + I3 ψ3 Cp) : (C − Cᵗ) ≥ 0`.
    pub fn gate_at(&self, cp: &SymTensorK<T>) -> Result<bool> {
        if self.mode == FlowRuleMode::Original || !self.params.plastic.branch.is_active() {
            return Ok(true);
        }
        let e = BranchEval::new(&self.params.plastic.branch, &self.c, cp)?;
        Ok(e.flow(&self.c).dot(&(self.c - self.c_prev)) >= T::zero())
    }

    fn evaluate(&self, z: &StateVector<T>) -> Result<Evaluated<T>> {
        let p = self.params;
        let c = &self.c;
        let c_inv = c.inv()?;
        let branch = |bp: &BranchParams<T>, x: SymTensorK<T>| -> Result<Option<BranchEval<T>>> {
            if bp.is_active() {
                Ok(Some(BranchEval::new(bp, c, &x)?))
            } else {
                Ok(None)
            }
        };
        let cp = z.cp();
        let gate = match self.gate {
            Some(g) => g,
            None => self.gate_at(&cp)?,
        };
        Ok(Evaluated {
            c_inv,
            elastic: branch(&p.elastic, SymTensorK::identity())?,
            plastic: branch(&p.plastic.branch, cp)?,
            viscous: [
                branch(&p.viscous[0].branch, z.cv(0))?,
                branch(&p.viscous[1].branch, z.cv(1))?,
            ],
            gate,
        })
    }

    /// Scalar multiplying the plastic flow direction: `2 cp ‖C − Cᵗ‖ / Δt · H`.
    fn plastic_rate(&self, gate: bool) -> T {
        if gate {
            T::lit(2.0) * self.params.plastic.cp * self.strain_increment_norm() / self.dt
        } else {
            T::zero()
        }
    }

    fn viscous_rate(&self, i: usize) -> T {
        T::lit(4.0) / self.params.viscous[i].eta
    }

    fn residual_with(&self, z: &StateVector<T>, ev: &Evaluated<T>) -> [T; STATE_LEN] {
        let s = self.params.stress_scale();
        let inv_dt = T::one() / self.dt;
        let mut stress = SymTensorK::zero();
        for b in [&ev.elastic, &ev.plastic, &ev.viscous[0], &ev.viscous[1]]
            .into_iter()
            .flatten()
        {
            stress += b.stress(&ev.c_inv);
        }
        let r1 = z.stress_tilde() - stress.scale(T::one() / s);
        let mut rv = [SymTensorK::zero(); 2];
        for (i, r) in rv.iter_mut().enumerate() {
            *r = (z.cv(i) - self.state_prev.cv[i]).scale(inv_dt);
            if let Some(b) = &ev.viscous[i] {
                *r -= b.flow(&self.c).scale(self.viscous_rate(i));
            }
        }
        let mut r4 = (z.cp() - self.state_prev.cp).scale(inv_dt);
        if let Some(b) = &ev.plastic {
            let k = self.plastic_rate(ev.gate);
            if k != T::zero() {
                r4 -= b.flow(&self.c).scale(k);
            }
        }
        StateVector::from_parts(r1, rv, r4).z
    }

    pub fn residual(&self, z: &StateVector<T>) -> Result<[T; STATE_LEN]> {
        let ev = self.evaluate(z)?;
        Ok(self.residual_with(z, &ev))
    }

    fn jacobian_with(&self, ev: &Evaluated<T>) -> DenseMatrix<T> {
        let s = self.params.stress_scale();
        let inv_dt = T::one() / self.dt;
        let c = &self.c;
        let mut j = DenseMatrix::zeros(STATE_LEN);
        write_block(
            &mut j,
            BLOCK_STRESS,
            BLOCK_STRESS,
            &SymOperatorK::identity(),
        );
        let id_dt = SymOperatorK::identity().scale(inv_dt);
        for i in 0..2 {
            let blk = BLOCK_CV1 + i;
            match &ev.viscous[i] {
                Some(b) => {
                    write_block(
                        &mut j,
                        BLOCK_STRESS,
                        blk,
                        &b.dstress_dx(c, &ev.c_inv).scale(-T::one() / s),
                    );
                    write_block(
                        &mut j,
                        blk,
                        blk,
                        &(id_dt - b.dflow_dx(c).scale(self.viscous_rate(i))),
                    );
                }
                None => write_block(&mut j, blk, blk, &id_dt),
            }
        }
        match &ev.plastic {
            Some(b) => {
                write_block(
                    &mut j,
                    BLOCK_STRESS,
                    BLOCK_CP,
                    &b.dstress_dx(c, &ev.c_inv).scale(-T::one() / s),
                );
                let k = self.plastic_rate(ev.gate);
                let op = if k != T::zero() {
                    id_dt - b.dflow_dx(c).scale(k)
                } else {
                    id_dt
                };
                write_block(&mut j, BLOCK_CP, BLOCK_CP, &op);
            }
            None => write_block(&mut j, BLOCK_CP, BLOCK_CP, &id_dt),
        }
        j
    }

    /// Analytic `∂r/∂z` (24×24).
    pub fn jacobian(&self, z: &StateVector<T>) -> Result<DenseMatrix<T>> {
        let ev = self.evaluate(z)?;
        Ok(self.jacobian_with(&ev))
    }

    /// `∂r/∂E = 2 ∂r/∂C`, as four 6×6 blocks (rows of `r`, columns of `E`).
    pub fn residual_de(&self, z: &StateVector<T>) -> Result<[SymOperatorK<T>; 4]> {
        let ev = self.evaluate(z)?;
        Ok(self.residual_de_with(&ev))
    }

    fn residual_de_with(&self, ev: &Evaluated<T>) -> [SymOperatorK<T>; 4] {
        let s = self.params.stress_scale();
        let two = T::lit(2.0);
        let c = &self.c;
        let mut ds = SymOperatorK::zero();
        for b in [&ev.elastic, &ev.plastic, &ev.viscous[0], &ev.viscous[1]]
            .into_iter()
            .flatten()
        {
            ds += b.dstress_dc(&ev.c_inv);
        }
        let mut out = [SymOperatorK::zero(); 4];
        out[BLOCK_STRESS] = ds.scale(-two / s);
        for i in 0..2 {
            if let Some(b) = &ev.viscous[i] {
                out[BLOCK_CV1 + i] = b.dflow_dc(c, &ev.c_inv).scale(-two * self.viscous_rate(i));
            }
        }
        if let Some(b) = &ev.plastic {
            if ev.gate && self.params.plastic.cp != T::zero() {
                let inc = *c - self.c_prev;
                let n = inc.norm();
                let k = two * self.params.plastic.cp / self.dt;
                let mut op = b.dflow_dc(c, &ev.c_inv).scale(n);
                if n > T::zero() {
                    op += SymOperatorK::dyad(&b.flow(c), &inc.scale(T::one() / n));
                }
                out[BLOCK_CP] = op.scale(-two * k);
            }
        }
        out
    }

    /// Norm used for the convergence test: the rate blocks are multiplied by
    /// `Δt`, turning them into dimensionless increments like `S̃`.
    pub fn scaled_norm(&self, r: &[T; STATE_LEN]) -> T {
        let mut acc = T::zero();
        for (k, &x) in r.iter().enumerate() {
            let y = if k < 6 { x } else { x * self.dt };
            acc = acc + y * y;
        }
        acc.sqrt()
    }

    /// Initial iterate: previous internal variables, `S̃` consistent with them at the new `C`.
    pub fn initial_guess(&self) -> Result<StateVector<T>> {
        let st = branch_stresses(&self.c, self.state_prev, self.params)?;
        Ok(StateVector::from_parts(
            st.total().scale(T::one() / self.params.stress_scale()),
            self.state_prev.cv,
            self.state_prev.cp,
        ))
    }

    fn newton(
        &self,
        settings: &LocalSettings<T>,
    ) -> Result<(StateVector<T>, Vec<T>, Evaluated<T>)> {
        let mut z = self.initial_guess()?;
        let mut history = Vec::with_capacity(8);
        for it in 0..=settings.max_iterations {
            let ev = self.evaluate(&z)?;
            let r = self.residual_with(&z, &ev);
            let norm = self.scaled_norm(&r);
            if !norm.is_finite() {
                return Err(Error::NonPhysicalState {
                    what: "local residual",
                    value: norm.as_f64(),
                });
            }
            history.push(norm);
            if norm < settings.tol * (T::one() + z.norm()) {
                return Ok((z, history, ev));
            }
            if it == settings.max_iterations {
                break;
            }
            let lu = self.jacobian_with(&ev).lu()?;
            let dz = lu.solve(&r);
            for (zi, d) in z.z.iter_mut().zip(dz) {
                *zi = *zi - d;
            }
        }
        Err(Error::NoConvergence {
            iterations: settings.max_iterations,
            residual: history.last().copied().unwrap_or(T::nan()).as_f64(),
        })
    }

    /// Solves `r(z) = 0` and builds the consistent tangent.
    pub fn solve(&self, settings: &LocalSettings<T>) -> Result<LocalSolution<T>> {
        let mut step = *self;
        if self.mode == FlowRuleMode::HeavisideGated && self.gate.is_none() {
            // freeze the gate for the Newton iteration, re-check at convergence
            let g0 = self.gate_at(&self.state_prev.cp)?;
            step.gate = Some(g0);
            let (z, hist, ev) = step.newton(settings)?;
            let g1 = self.gate_at(&z.cp())?;
            if g1 == g0 {
                return step.finish(z, hist, ev);
            }
            step.gate = Some(g1);
            let (z, hist, ev) = step.newton(settings)?;
            if self.gate_at(&z.cp())? != g1 {
                return Err(Error::GateOscillation);
            }
            return step.finish(z, hist, ev);
        }
        let (z, hist, ev) = step.newton(settings)?;
        step.finish(z, hist, ev)
    }

    fn finish(
        &self,
        z: StateVector<T>,
        history: Vec<T>,
        ev: Evaluated<T>,
    ) -> Result<LocalSolution<T>> {
        let lu: Lu<T> = self.jacobian_with(&ev).lu()?;
        let rhs = self.residual_de_with(&ev);
        let s = self.params.stress_scale();
        let mut tangent = SymOperatorK::zero();
        for col in 0..6 {
            let mut b = [T::zero(); STATE_LEN];
            for (blk, op) in rhs.iter().enumerate() {
                for row in 0..6 {
                    b[6 * blk + row] = -op.m[row][col];
                }
            }
            let x = lu.solve(&b);
            for row in 0..6 {
                tangent.m[row][col] = x[row] * s;
            }
        }
        let state = InternalState {
            cp: z.cp(),
            cv: [z.cv(0), z.cv(1)],
            t: self.state_prev.t + self.dt,
        };
        Ok(LocalSolution {
            stress: z.stress_tilde().scale(s),
            state,
            tangent,
            iterations: history.len() - 1,
            residual_norm: *history.last().expect("non-empty history"),
            residual_history: history,
            plastic_gate: ev.gate,
            z,
        })
    }
}

/// Local residual `r(z)` for the given step data.
pub fn residual<T: Real>(
    z: &StateVector<T>,
    c: &SymTensorK<T>,
    c_prev: &SymTensorK<T>,
    state_prev: &InternalState<T>,
    dt: T,
    p: &MaterialParams<T>,
    mode: FlowRuleMode,
) -> Result<[T; STATE_LEN]> {
    LocalStep::new(*c, *c_prev, state_prev, dt, p, mode)?.residual(z)
}

/// Analytic Jacobian `∂r/∂z`.
pub fn jacobian<T: Real>(
    z: &StateVector<T>,
    c: &SymTensorK<T>,
    c_prev: &SymTensorK<T>,
    state_prev: &InternalState<T>,
    dt: T,
    p: &MaterialParams<T>,
    mode: FlowRuleMode,
) -> Result<DenseMatrix<T>> {
    LocalStep::new(*c, *c_prev, state_prev, dt, p, mode)?.jacobian(z)
}

/// One implicit step of the material point with default Newton settings.
pub fn local_solve<T: Real>(
    c: &SymTensorK<T>,
    c_prev: &SymTensorK<T>,
    state_prev: &InternalState<T>,
    dt: T,
    p: &MaterialParams<T>,
    mode: FlowRuleMode,
) -> Result<LocalSolution<T>> {
    LocalStep::new(*c, *c_prev, state_prev, dt, p, mode)?.solve(&LocalSettings::default())
}

/// Dissipation rates (kPa/h) of the plastic and the two viscous branches over
/// a converged step: thermodynamic force `X⁻¹ G X⁻¹` at the end of the step
/// contracted with the discrete rate `(X − Xᵗ)/Δt`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dissipation<T> {
    pub plastic: T,
    pub viscous: [T; 2],
}

pub fn dissipation_rate<T: Real>(
    state_prev: &InternalState<T>,
    state_new: &InternalState<T>,
    c: &SymTensorK<T>,
    dt: T,
    p: &MaterialParams<T>,
) -> Result<Dissipation<T>> {
    let inv_dt = T::one() / dt;
    let branch = |bp: &BranchParams<T>, x_old: &SymTensorK<T>, x_new: &SymTensorK<T>| {
        if !bp.is_active() {
            return Ok(T::zero());
        }
        let e = BranchEval::new(bp, c, x_new)?;
        Ok::<T, Error>(e.driving_force(c).dot(&(*x_new - *x_old)) * inv_dt)
    };
    Ok(Dissipation {
        plastic: branch(&p.plastic.branch, &state_prev.cp, &state_new.cp)?,
        viscous: [
            branch(&p.viscous[0].branch, &state_prev.cv[0], &state_new.cv[0])?,
            branch(&p.viscous[1].branch, &state_prev.cv[1], &state_new.cv[1])?,
        ],
    })
}
