//! Independent checks of the implementation: finite-difference derivatives,
//! closed-form hyperelastic limits, time-step self-convergence and the
//! dissipation audit.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constitutive::{
    local_solve, FlowRuleMode, LocalSettings, LocalStep, StateVector, BLOCK_CP, BLOCK_CV1,
    BLOCK_CV2, BLOCK_STRESS, STATE_LEN,
};
use crate::error::{Error, Result};
use crate::kelvin::{mat_mul, SymTensorK};
use crate::material::{InternalState, MaterialParams};
use crate::triaxial::{
    run, volume_preserving_lateral, GlobalStep, LoadProgram, SimulationRecord, VALIDATION_RATES,
};

/// Relative tolerance of the derivative checks.
pub const DERIVATIVE_TOL: f64 = 1e-5;
/// Entries whose reference magnitude is below this are compared absolutely.
pub const DERIVATIVE_ABS_FLOOR: f64 = 1e-9;
/// Perturbation of the state vector for the five-point Jacobian stencil,
/// close to the fifth root of machine epsilon.
pub const JACOBIAN_FD_STEP: f64 = 7e-4;
/// Perturbation of the strain for the five-point tangent stencil.
pub const TANGENT_FD_STEP: f64 = 1e-5;
/// Local Newton tolerance for the re-solves behind the tangent stencil; the
/// production tolerance leaves solver noise of order `tol / h` in the quotients.
pub const TANGENT_SOLVE_TOL: f64 = 1e-12;
/// Allowed negative dissipation relative to the step stress power.
pub const DISSIPATION_TOL: f64 = 1e-10;
/// Final local residuals below this are round-off dominated and carry no
/// information about the convergence order.
pub const ORDER_NOISE_FLOOR: f64 = 1e-11;
pub const MIN_NEWTON_ORDER: f64 = 1.8;
pub const MAX_LOCAL_ITERATIONS: usize = 10;

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub context: String,
}

impl VerificationReport {
    pub fn new(
        name: impl Into<String>,
        max_error: f64,
        tolerance: f64,
        context: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            max_error,
            tolerance,
            passed: max_error < tolerance,
            context: context.into(),
        }
    }

    /// Check whose error must lie inside `[lo, hi]`, reported as the distance outside.
    pub fn within(
        name: impl Into<String>,
        value: f64,
        lo: f64,
        hi: f64,
        context: impl Into<String>,
    ) -> Self {
        let outside = if value.is_nan() {
            f64::INFINITY
        } else {
            (lo - value).max(value - hi).max(0.0)
        };
        let mut r = Self::new(name, outside, f64::MIN_POSITIVE, context);
        r.passed = value >= lo && value <= hi;
        r.context = format!("value {value:.6} in [{lo}, {hi}]; {}", r.context);
        r
    }

    pub fn failed(name: impl Into<String>, err: &Error) -> Self {
        Self {
            name: name.into(),
            max_error: f64::INFINITY,
            tolerance: 0.0,
            passed: false,
            context: format!("error: {err}"),
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} err {:.3e} tol {:.1e}  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_error,
            self.tolerance,
            self.context
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Suite {
    #[default]
    All,
    Tangent,
    Convergence,
    Dissipation,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "tangent" => Ok(Suite::Tangent),
            "convergence" => Ok(Suite::Convergence),
            "dissipation" => Ok(Suite::Dissipation),
            other => Err(Error::InvalidArgument(format!("unknown suite '{other}'"))),
        }
    }
}

/// Inputs of one local step together with its converged solution vector.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSample {
    pub c: SymTensorK<f64>,
    pub c_prev: SymTensorK<f64>,
    pub state_prev: InternalState<f64>,
    pub dt: f64,
    pub z: StateVector<f64>,
}

impl LocalSample {
    pub fn step<'a>(
        &'a self,
        p: &'a MaterialParams<f64>,
        mode: FlowRuleMode,
    ) -> Result<LocalStep<'a, f64>> {
        LocalStep::new(self.c, self.c_prev, &self.state_prev, self.dt, p, mode)
    }

    fn hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for x in self.c.v.iter().chain(self.z.z.iter()) {
            x.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

/// Local steps along a compressive loading path with random shear, `n`
/// samples from `λ = 1` to `λ = 0.8` at 16 %/h.
pub fn loading_path_samples(
    p: &MaterialParams<f64>,
    mode: FlowRuleMode,
    n: usize,
    seed: u64,
) -> Result<Vec<LocalSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rate = 16.0;
    let lambda_end = 0.8;
    let dt = (1.0 - lambda_end) * 100.0 / rate / n as f64;
    let mut state = InternalState::virgin();
    let mut c_prev = SymTensorK::identity();
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let lambda = 1.0 - (1.0 - lambda_end) * k as f64 / n as f64;
        let e = volume_preserving_lateral(1.0, 0.0, lambda);
        let mu = (1.0 + 2.0 * e).sqrt();
        let mut f = [[0.0; 3]; 3];
        f[0][0] = lambda;
        f[1][1] = mu;
        f[2][2] = mu;
        for row in f.iter_mut() {
            for x in row.iter_mut() {
                *x += 0.03 * (rng.gen::<f64>() - 0.5);
            }
        }
        let mut ft = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                ft[i][j] = f[j][i];
            }
        }
        let mut cm = mat_mul(&ft, &f);
        // undrained path: remove the volume change of the perturbation
        let det = det3(&cm);
        for row in cm.iter_mut() {
            for x in row.iter_mut() {
                *x *= det.powf(-1.0 / 3.0);
            }
        }
        // exact symmetry for the Kelvin map
        for i in 0..3 {
            for j in 0..i {
                let avg = 0.5 * (cm[i][j] + cm[j][i]);
                cm[i][j] = avg;
                cm[j][i] = avg;
            }
        }
        let c = SymTensorK::from_matrix(&cm)?;
        let sol = local_solve(&c, &c_prev, &state, dt, p, mode)?;
        out.push(LocalSample {
            c,
            c_prev,
            state_prev: state,
            dt,
            z: sol.z,
        });
        state = sol.state;
        c_prev = c;
    }
    Ok(out)
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn rel_err(analytic: f64, reference: f64) -> f64 {
    (analytic - reference).abs() / reference.abs().max(DERIVATIVE_ABS_FLOOR)
}

/// Componentwise errors of one analytic Jacobian against central differences.
pub struct JacobianComparison {
    /// `max |J − J_fd| / max(|J_fd|, floor)` over all entries.
    pub componentwise: f64,
    /// Largest `max |ΔJ| / max |J_fd|` over the 4×4 blocks.
    pub blockwise: f64,
    /// Whether every structurally zero block is exactly zero.
    pub zero_blocks_exact: bool,
}

const ZERO_BLOCKS: [(usize, usize); 9] = [
    (BLOCK_CV1, BLOCK_STRESS),
    (BLOCK_CV1, BLOCK_CV2),
    (BLOCK_CV1, BLOCK_CP),
    (BLOCK_CV2, BLOCK_STRESS),
    (BLOCK_CV2, BLOCK_CV1),
    (BLOCK_CV2, BLOCK_CP),
    (BLOCK_CP, BLOCK_STRESS),
    (BLOCK_CP, BLOCK_CV1),
    (BLOCK_CP, BLOCK_CV2),
];

pub fn compare_jacobian(
    step: &LocalStep<'_, f64>,
    z: &StateVector<f64>,
) -> Result<JacobianComparison> {
    let j = step.jacobian(z)?;
    let mut fd = vec![[0.0; STATE_LEN]; STATE_LEN];
    for col in 0..STATE_LEN {
        let h = JACOBIAN_FD_STEP * z.z[col].abs().max(1.0);
        let shifted = |k: f64| -> Result<[f64; STATE_LEN]> {
            let mut zs = *z;
            zs.z[col] += k * h;
            step.residual(&zs)
        };
        let (p2, p1, m1, m2) = (shifted(2.0)?, shifted(1.0)?, shifted(-1.0)?, shifted(-2.0)?);
        for row in 0..STATE_LEN {
            fd[row][col] = (8.0 * (p1[row] - m1[row]) - (p2[row] - m2[row])) / (12.0 * h);
        }
    }
    let mut componentwise: f64 = 0.0;
    let mut blockwise: f64 = 0.0;
    for bi in 0..4 {
        for bj in 0..4 {
            let mut diff: f64 = 0.0;
            let mut scale: f64 = 0.0;
            for a in 0..6 {
                for b in 0..6 {
                    let (r, c) = (6 * bi + a, 6 * bj + b);
                    componentwise = componentwise.max(rel_err(j[(r, c)], fd[r][c]));
                    diff = diff.max((j[(r, c)] - fd[r][c]).abs());
                    scale = scale.max(fd[r][c].abs());
                }
            }
            blockwise = blockwise.max(diff / scale.max(DERIVATIVE_ABS_FLOOR));
        }
    }
    let zero_blocks_exact = ZERO_BLOCKS
        .iter()
        .all(|&(bi, bj)| (0..6).all(|a| (0..6).all(|b| j[(6 * bi + a, 6 * bj + b)] == 0.0)));
    Ok(JacobianComparison {
        componentwise,
        blockwise,
        zero_blocks_exact,
    })
}

/// Largest componentwise error of the consistent tangent against five-point
/// differences of re-solved local steps. The plastic gate is held at its
/// value in the unperturbed solution, as the tangent treats it as constant.
pub fn compare_tangent(
    sample: &LocalSample,
    p: &MaterialParams<f64>,
    mode: FlowRuleMode,
) -> Result<(f64, f64)> {
    let settings = LocalSettings {
        tol: TANGENT_SOLVE_TOL,
        ..LocalSettings::default()
    };
    let sol = sample.step(p, mode)?.solve(&settings)?;
    let h = TANGENT_FD_STEP;
    let mut componentwise: f64 = 0.0;
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for col in 0..6 {
        let stress_at = |k: f64| -> Result<SymTensorK<f64>> {
            let mut step = sample.step(p, mode)?;
            // dC = 2 dE
            step.c.v[col] += 2.0 * k * h;
            step.gate = Some(sol.plastic_gate);
            Ok(step.solve(&settings)?.stress)
        };
        let (p2, p1, m1, m2) = (
            stress_at(2.0)?,
            stress_at(1.0)?,
            stress_at(-1.0)?,
            stress_at(-2.0)?,
        );
        for row in 0..6 {
            let fd = (8.0 * (p1.v[row] - m1.v[row]) - (p2.v[row] - m2.v[row])) / (12.0 * h);
            let an = sol.tangent.m[row][col];
            componentwise = componentwise.max(rel_err(an, fd));
            diff = diff.max((an - fd).abs());
            scale = scale.max(fd.abs());
        }
    }
    Ok((componentwise, diff / scale.max(DERIVATIVE_ABS_FLOOR)))
}

/// `σ = 2 C1 (λ² − 1/λ)`, incompressible neo-Hookean uniaxial Cauchy stress.
pub fn closed_form_uniaxial(lambda: f64, c1: f64) -> f64 {
    2.0 * c1 * (lambda * lambda - 1.0 / lambda)
}

/// Axial Cauchy stress of the single-spring material at stretch `lambda`
/// with stress-free lateral faces.
pub fn elastic_uniaxial_stress(lambda: f64, c1: f64, d2: f64) -> Result<(f64, f64)> {
    let p = MaterialParams::elastic_only(c1, d2);
    let state = InternalState::virgin();
    let g = GlobalStep {
        c_prev: SymTensorK::identity(),
        state_prev: &state,
        dt: 1.0,
        params: &p,
        mode: FlowRuleMode::Original,
    }
    .solve_lateral(lambda, volume_preserving_lateral(1.0, 0.0, lambda))?;
    Ok((g.cauchy().0, g.c().det()))
}

/// Runs `program` with uniform steps `dt_fine`, which must resolve every
/// segment at least 64 times finer than its default step.
pub fn reference_integrate(
    program: &LoadProgram<f64>,
    p: &MaterialParams<f64>,
    mode: FlowRuleMode,
    dt_fine: f64,
) -> Result<SimulationRecord<f64>> {
    let mut platen = 0.0;
    for s in &program.segments {
        let d = s.duration_from(platen);
        if let crate::triaxial::LoadSegment::StrainRamp { target, .. } = *s {
            platen = target;
        }
        let (hi, _) = program.step_bounds(d);
        if d > 0.0 && dt_fine > hi / 64.0 {
            return Err(Error::InvalidArgument(format!(
                "reference step {dt_fine} h is not 64 times finer than {hi} h"
            )));
        }
    }
    let mut fine = program.clone();
    fine.dt_max = Some(dt_fine);
    fine.dt_min = Some(dt_fine / 1024.0);
    run(&fine, p, mode)
}

/// Final differential stress of `program` run with `dt_max = dt0 / 2^k`.
pub fn time_step_ladder(
    program: &LoadProgram<f64>,
    p: &MaterialParams<f64>,
    mode: FlowRuleMode,
    dt0: f64,
    levels: usize,
) -> Result<Vec<f64>> {
    (0..levels)
        .map(|k| {
            let mut prog = program.clone();
            prog.dt_max = Some(dt0 / f64::powi(2.0, k as i32));
            prog.dt_min = None;
            let rec = run(&prog, p, mode)?;
            Ok(rec.final_row().map(|r| r.q_kpa).unwrap_or(0.0))
        })
        .collect()
}

/// Observed orders `log2(|q_k − q_{k+1}| / |q_{k+1} − q_{k+2}|)` of a halving ladder.
pub fn observed_orders(values: &[f64]) -> Vec<f64> {
    values
        .windows(3)
        .map(|w| ((w[0] - w[1]).abs() / (w[1] - w[2]).abs()).log2())
        .collect()
}

/// Observed local Newton orders from recorded residual tails, skipping tails
/// whose last norm is below [`ORDER_NOISE_FLOOR`].
pub fn newton_orders(record: &SimulationRecord<f64>) -> Vec<f64> {
    record
        .stats
        .local_tails
        .iter()
        .filter(|t| t[2] > ORDER_NOISE_FLOOR)
        .map(|t| (t[2] / t[1]).ln() / (t[1] / t[0]).ln())
        .collect()
}

/// Most negative dissipation component relative to the step stress power;
/// zero when every component is non-negative.
pub fn worst_dissipation(record: &SimulationRecord<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for r in record.rows.iter().skip(1) {
        let d = &r.dissipation;
        for v in [d.plastic, d.viscous[0], d.viscous[1]] {
            if v < 0.0 {
                worst = worst.max(-v / r.power_scale.max(f64::MIN_POSITIVE));
            }
        }
    }
    worst
}

pub fn dissipation_audit(record: &SimulationRecord<f64>, label: &str) -> VerificationReport {
    VerificationReport::new(
        format!("dissipation {label}"),
        worst_dissipation(record),
        DISSIPATION_TOL,
        format!("{} steps", record.stats.steps),
    )
}

fn tangent_suite(p: &MaterialParams<f64>, out: &mut Vec<VerificationReport>) {
    for mode in [FlowRuleMode::Original, FlowRuleMode::HeavisideGated] {
        let tag = match mode {
            FlowRuleMode::Original => "original",
            FlowRuleMode::HeavisideGated => "gated",
        };
        let samples = match loading_path_samples(p, mode, 20, 7) {
            Ok(s) => s,
            Err(e) => {
                out.push(VerificationReport::failed(format!("jacobian fd {tag}"), &e));
                continue;
            }
        };
        let mut jac: f64 = 0.0;
        let mut zero = true;
        let mut tan: f64 = 0.0;
        let mut worst_hash = 0;
        let mut failure = None;
        for s in &samples {
            let r = s
                .step(p, mode)
                .and_then(|step| compare_jacobian(&step, &s.z))
                .and_then(|c| Ok((c, compare_tangent(s, p, mode)?)));
            match r {
                Ok((c, (t, _))) => {
                    if c.componentwise > jac {
                        worst_hash = s.hash();
                    }
                    jac = jac.max(c.componentwise);
                    zero &= c.zero_blocks_exact;
                    tan = tan.max(t);
                }
                Err(e) => failure = Some(e),
            }
        }
        if let Some(e) = failure {
            out.push(VerificationReport::failed(format!("jacobian fd {tag}"), &e));
            continue;
        }
        let ctx = format!("20 loading-path states, worst {worst_hash:016x}");
        out.push(VerificationReport::new(
            format!("jacobian fd {tag}"),
            jac,
            DERIVATIVE_TOL,
            ctx.clone(),
        ));
        out.push(VerificationReport::new(
            format!("zero blocks {tag}"),
            if zero { 0.0 } else { 1.0 },
            0.5,
            "structural zeros compared exactly",
        ));
        out.push(VerificationReport::new(
            format!("tangent fd {tag}"),
            tan,
            DERIVATIVE_TOL,
            ctx,
        ));
    }
}

fn convergence_suite(p: &MaterialParams<f64>, out: &mut Vec<VerificationReport>) {
    let sigma = closed_form_uniaxial(0.8, 9.0);
    for (d2, tol) in [(5e4, 1e-3), (500.0, 2e-2)] {
        let name = format!("uniaxial limit D2={d2}");
        match elastic_uniaxial_stress(0.8, 9.0, d2) {
            Ok((s, i3)) => out.push(VerificationReport::new(
                name,
                ((s - sigma) / sigma).abs(),
                tol,
                format!("sigma {s:.5} vs {sigma:.5} kPa, I3 {i3:.6}"),
            )),
            Err(e) => out.push(VerificationReport::failed(name, &e)),
        }
    }
    match run(&LoadProgram::validation(16.0), p, FlowRuleMode::Original) {
        Ok(rec) => {
            let orders = newton_orders(&rec);
            let min = orders.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut r = VerificationReport::new(
                "local newton order",
                (MIN_NEWTON_ORDER - min).max(0.0),
                f64::MIN_POSITIVE,
                format!(
                    "min order {min:.3} over {} samples, max {} local iterations",
                    orders.len(),
                    rec.stats.max_local_iterations
                ),
            );
            r.passed = !orders.is_empty()
                && min >= MIN_NEWTON_ORDER
                && rec.stats.max_local_iterations <= MAX_LOCAL_ITERATIONS;
            out.push(r);
        }
        Err(e) => out.push(VerificationReport::failed("local newton order", &e)),
    }
    let ramp = LoadProgram::ramp(16.0, 20.0);
    match time_step_ladder(&ramp, p, FlowRuleMode::Original, 1.25 / 25.0, 4) {
        Ok(qs) => {
            let orders = observed_orders(&qs);
            let lo = orders.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = orders.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut r = VerificationReport::within(
                "time step order",
                lo,
                0.8,
                1.2,
                format!("orders {orders:.3?}"),
            );
            r.passed &= hi <= 1.2;
            out.push(r);
        }
        Err(e) => out.push(VerificationReport::failed("time step order", &e)),
    }
}

fn dissipation_suite(p: &MaterialParams<f64>, out: &mut Vec<VerificationReport>) {
    for rate in VALIDATION_RATES {
        let label = format!("{rate} %/h");
        match run(&LoadProgram::validation(rate), p, FlowRuleMode::Original) {
            Ok(rec) => out.push(dissipation_audit(&rec, &label)),
            Err(e) => out.push(VerificationReport::failed(
                format!("dissipation {label}"),
                &e,
            )),
        }
    }
}

/// Runs the selected checks with the calibrated peat parameters.
pub fn run_suite(suite: Suite) -> Vec<VerificationReport> {
    let p = MaterialParams::fitted_peat();
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Tangent) {
        tangent_suite(&p, &mut out);
    }
    if matches!(suite, Suite::All | Suite::Convergence) {
        convergence_suite(&p, &mut out);
    }
    if matches!(suite, Suite::All | Suite::Dissipation) {
        dissipation_suite(&p, &mut out);
    }
    out
}
