use crate::constitutive::{branch_stresses, dissipation_rate, FlowRuleMode};
use crate::error::{Error, Result};
use crate::kelvin::SymTensorK;
use crate::material::{InternalState, MaterialParams};
use crate::scalar::Real;

use super::global::{
    strain_pct_from_stretch, stretch_from_strain_pct, volume_preserving_lateral, GlobalSolution,
    GlobalStep,
};
use super::program::{LoadProgram, LoadSegment};
use super::record::{ControlMode, RecordRow, RunStats, SimulationRecord};

/// Axial stress (kPa) at which a detaching step is accepted as the contact loss point.
pub const ZERO_CROSSING_TOL: f64 = 1e-3;
const MAX_CROSSING_ITERATIONS: usize = 60;
const EASY_GLOBAL_ITERATIONS: usize = 4;
const EASY_LOCAL_ITERATIONS: usize = 6;

/// Marches `program` from the virgin state and records every accepted step.
pub fn run<T: Real>(
    program: &LoadProgram<T>,
    p: &MaterialParams<T>,
    mode: FlowRuleMode,
) -> Result<SimulationRecord<T>> {
    program.validate()?;
    p.validate()?;
    let mut d = Driver::new(program, p, mode);
    for (k, seg) in program.segments.iter().enumerate() {
        d.segment(k, seg)?;
    }
    Ok(d.record)
}

struct Point<T> {
    state: InternalState<T>,
    lambda: T,
    e_lat: T,
    s11: T,
}

impl<T: Real> Point<T> {
    fn c(&self) -> SymTensorK<T> {
        let lat = T::one() + T::lit(2.0) * self.e_lat;
        SymTensorK::from_diag(self.lambda * self.lambda, lat, lat)
    }
}

struct Accepted<T> {
    g: GlobalSolution<T>,
    dt: T,
    row_mode: ControlMode,
    next: ControlMode,
    platen: T,
}

/// Platen position over one segment.
#[derive(Clone, Copy)]
struct Schedule<T> {
    start: T,
    velocity: T,
    end: T,
    duration: T,
}

impl<T: Real> Schedule<T> {
    fn at(&self, tau: T) -> T {
        if tau >= self.duration {
            self.end
        } else {
            self.start + self.velocity * tau
        }
    }
}

struct Driver<'a, T> {
    program: &'a LoadProgram<T>,
    p: &'a MaterialParams<T>,
    mode: FlowRuleMode,
    point: Point<T>,
    control: ControlMode,
    platen: T,
    time: T,
    record: SimulationRecord<T>,
}

impl<'a, T: Real> Driver<'a, T> {
    fn new(program: &'a LoadProgram<T>, p: &'a MaterialParams<T>, mode: FlowRuleMode) -> Self {
        let z = T::zero();
        let mut record = SimulationRecord::default();
        record.stats.min_internal_eigenvalue = T::one();
        record.rows.push(RecordRow {
            t: z,
            axial_strain_pct: z,
            stretch: T::one(),
            q_kpa: z,
            s11_kpa: z,
            i3: T::one(),
            ep_norm: z,
            overstress_kpa: [z; 2],
            mode: ControlMode::Strain,
            dissipation: Default::default(),
            power_scale: z,
            platen_strain_pct: z,
            plastic_gate: true,
        });
        Self {
            program,
            p,
            mode,
            point: Point {
                state: InternalState::virgin(),
                lambda: T::one(),
                e_lat: z,
                s11: z,
            },
            control: ControlMode::Strain,
            platen: z,
            time: z,
            record,
        }
    }

    fn global(&self, dt: T) -> GlobalStep<'_, T> {
        GlobalStep {
            c_prev: self.point.c(),
            state_prev: &self.point.state,
            dt,
            params: self.p,
            mode: self.mode,
        }
    }

    fn material_strain(&self) -> T {
        strain_pct_from_stretch(self.point.lambda)
    }

    fn segment(&mut self, index: usize, seg: &LoadSegment<T>) -> Result<()> {
        let duration = seg.duration_from(self.platen);
        if !(duration > T::zero()) {
            return Ok(());
        }
        let schedule = match *seg {
            LoadSegment::StrainRamp { rate, target } => Schedule {
                start: self.platen,
                velocity: if target >= self.platen { rate } else { -rate },
                end: target,
                duration,
            },
            _ => Schedule {
                start: self.platen,
                velocity: T::zero(),
                end: self.platen,
                duration,
            },
        };
        let stress_target = match *seg {
            LoadSegment::StressHold { stress, .. } => {
                self.control = ControlMode::Stress;
                Some(stress)
            }
            _ => None,
        };
        let (dt_max, dt_min) = self.program.step_bounds(duration);
        let mut dt = dt_max;
        let mut tau = T::zero();
        // absorbs round-off accumulated over a few hundred steps
        let end_tol = duration * T::epsilon().sqrt();
        while duration - tau > end_tol {
            let h = dt.min(duration - tau);
            let is_last = duration - tau - h <= end_tol;
            match self.try_step(&schedule, stress_target, tau, h, is_last) {
                Ok(acc) => {
                    let easy = acc.g.iterations <= EASY_GLOBAL_ITERATIONS
                        && acc.g.max_local_iterations <= EASY_LOCAL_ITERATIONS;
                    tau = if acc.dt == h && is_last {
                        duration
                    } else {
                        tau + acc.dt
                    };
                    self.commit(acc)?;
                    if easy {
                        dt = (dt * T::lit(2.0)).min(dt_max);
                    }
                }
                Err(e) if e.is_recoverable() => {
                    self.record.stats.rejected_steps += 1;
                    dt = h * T::lit(0.5);
                    if dt < dt_min {
                        let residual = match e {
                            Error::NoConvergence { residual, .. } => residual,
                            _ => f64::NAN,
                        };
                        return Err(Error::TimeStepUnderflow {
                            time: (self.time + tau).as_f64(),
                            segment: index,
                            residual,
                            cause: e.to_string(),
                        });
                    }
                }
                Err(e) => return Err(e),
            }
        }
        match *seg {
            LoadSegment::StrainRamp { target, .. } => self.platen = target,
            LoadSegment::StressHold { .. } => {
                self.platen = self.material_strain();
                self.control = ControlMode::Strain;
            }
            LoadSegment::Hold { .. } => {}
        }
        Ok(())
    }

    fn try_step(
        &self,
        sched: &Schedule<T>,
        stress_target: Option<T>,
        tau: T,
        h: T,
        is_last: bool,
    ) -> Result<Accepted<T>> {
        let platen_new = if is_last {
            sched.end
        } else {
            sched.at(tau + h)
        };
        match self.control {
            ControlMode::Stress => {
                let sigma = -stress_target.unwrap_or(T::zero());
                let g = self
                    .global(h)
                    .solve_axial(sigma, (self.point.lambda, self.point.e_lat))?;
                let platen = strain_pct_from_stretch(g.lambda);
                Ok(Accepted {
                    g,
                    dt: h,
                    row_mode: ControlMode::Stress,
                    next: ControlMode::Stress,
                    platen,
                })
            }
            ControlMode::Strain => {
                let g = self.contact_step(platen_new, h)?;
                if self.program.platen_detachment && g.local.stress.v[0] > T::zero() {
                    if self.point.s11 >= T::zero() {
                        return self.free_step(sched, tau, h, is_last);
                    }
                    return self.detach_step(sched, tau, h, g);
                }
                Ok(Accepted {
                    g,
                    dt: h,
                    row_mode: ControlMode::Strain,
                    next: ControlMode::Strain,
                    platen: platen_new,
                })
            }
            ControlMode::Free => self.free_step(sched, tau, h, is_last),
        }
    }

    fn contact_step(&self, platen: T, h: T) -> Result<GlobalSolution<T>> {
        let lambda = stretch_from_strain_pct(platen);
        let e0 = volume_preserving_lateral(self.point.lambda, self.point.e_lat, lambda);
        self.global(h).solve_lateral(lambda, e0)
    }

    fn free_step(&self, sched: &Schedule<T>, tau: T, h: T, is_last: bool) -> Result<Accepted<T>> {
        let g = self
            .global(h)
            .solve_axial(T::zero(), (self.point.lambda, self.point.e_lat))?;
        let platen_new = if is_last {
            sched.end
        } else {
            sched.at(tau + h)
        };
        if platen_new >= strain_pct_from_stretch(g.lambda) {
            // the platen has caught up with the creeping specimen
            let g = self.contact_step(platen_new, h)?;
            return Ok(Accepted {
                g,
                dt: h,
                row_mode: ControlMode::Strain,
                next: ControlMode::Strain,
                platen: platen_new,
            });
        }
        Ok(Accepted {
            g,
            dt: h,
            row_mode: ControlMode::Free,
            next: ControlMode::Free,
            platen: platen_new,
        })
    }

    /// Shortens a step whose end state is tensile so that it ends at zero
    /// axial stress (Illinois variant of regula falsi on the step fraction).
    fn detach_step(
        &self,
        sched: &Schedule<T>,
        tau: T,
        h: T,
        full: GlobalSolution<T>,
    ) -> Result<Accepted<T>> {
        let tol = T::lit(ZERO_CROSSING_TOL);
        let (mut a, mut fa) = (T::zero(), self.point.s11);
        let (mut b, mut fb) = (T::one(), full.local.stress.v[0]);
        let mut best = full;
        let mut theta = T::one();
        for _ in 0..MAX_CROSSING_ITERATIONS {
            if fb.abs() < tol {
                return Ok(Accepted {
                    g: best,
                    dt: theta * h,
                    row_mode: ControlMode::Strain,
                    next: ControlMode::Free,
                    platen: sched.at(tau + theta * h),
                });
            }
            let t = b - fb * (b - a) / (fb - fa);
            let g = self.contact_step(sched.at(tau + t * h), t * h)?;
            let ft = g.local.stress.v[0];
            if (ft > T::zero()) != (fb > T::zero()) {
                a = b;
                fa = fb;
            } else {
                fa = fa * T::lit(0.5);
            }
            b = t;
            fb = ft;
            theta = t;
            best = g;
        }
        Err(Error::NoConvergence {
            iterations: MAX_CROSSING_ITERATIONS,
            residual: fb.as_f64(),
        })
    }

    fn commit(&mut self, acc: Accepted<T>) -> Result<()> {
        let c_old = self.point.c();
        let c_new = acc.g.c();
        let new_state = acc.g.local.state;
        let diss = dissipation_rate(&self.point.state, &new_state, &c_new, acc.dt, self.p)?;
        let branches = branch_stresses(&c_new, &new_state, self.p)?;
        let stress = acc.g.local.stress;
        let power_scale = stress.norm() * (c_new - c_old).norm() * T::lit(0.5) / acc.dt;
        let (sa, sl) = acc.g.cauchy();
        self.time = self.time + acc.dt;
        let row = RecordRow {
            t: self.time,
            axial_strain_pct: strain_pct_from_stretch(acc.g.lambda),
            stretch: acc.g.lambda,
            q_kpa: -(sa - sl),
            s11_kpa: stress.v[0],
            i3: c_new.det(),
            ep_norm: new_state.plastic_strain().norm(),
            overstress_kpa: [branches.overstress[0].norm(), branches.overstress[1].norm()],
            mode: acc.row_mode,
            dissipation: diss,
            power_scale,
            platen_strain_pct: acc.platen,
            plastic_gate: acc.g.local.plastic_gate,
        };
        let stats: &mut RunStats<T> = &mut self.record.stats;
        stats.steps += 1;
        stats.max_local_iterations = stats.max_local_iterations.max(acc.g.max_local_iterations);
        stats.max_global_iterations = stats.max_global_iterations.max(acc.g.iterations);
        let hist = &acc.g.local.residual_history;
        if hist.len() >= 3 {
            let n = hist.len();
            stats
                .local_tails
                .push([hist[n - 3], hist[n - 2], hist[n - 1]]);
        }
        stats.min_internal_eigenvalue = stats
            .min_internal_eigenvalue
            .min(new_state.min_eigenvalue());
        self.record.rows.push(row);
        self.point = Point {
            state: new_state,
            lambda: acc.g.lambda,
            e_lat: acc.g.e_lat,
            s11: stress.v[0],
        };
        self.platen = acc.platen;
        self.control = acc.next;
        Ok(())
    }
}
