//! Acceptance criteria 1 to 10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hvp_core::io::{max_relative_difference, sweep, SweepAxis};
use hvp_core::triaxial::{run, LoadProgram, SimulationRecord, VALIDATION_RATES};
use hvp_core::verify::{
    compare_jacobian, compare_tangent, elastic_uniaxial_stress, loading_path_samples,
};
use hvp_core::{FlowRuleMode, MaterialParams, Params};

const I3_BAND: f64 = 0.005;
const EQUILIBRIUM_RUNTIME: Duration = Duration::from_secs(10);
const STIFF_PENALTY: f64 = 5e4;
const STIFF_PENALTY_TOL: f64 = 1e-3;
const FITTED_PENALTY_TOL: f64 = 2e-2;
const DERIVATIVE_TOL: f64 = 1e-5;
const DERIVATIVE_SAMPLES: usize = 20;
const DERIVATIVE_SEED: u64 = 7;
const MIN_NEWTON_ORDER: f64 = 1.8;
const MAX_LOCAL_ITERATIONS: usize = 10;
/// Residual tails ending below this are round-off limited and carry no order information.
const ORDER_NOISE_FLOOR: f64 = 1e-11;
const LADDER_LEVELS: usize = 4;
const LADDER_DT0: f64 = 0.05;
const ORDER_RANGE: (f64, f64) = (0.8, 1.2);
const DISSIPATION_TOL: f64 = 1e-10;
const HOLD_HOURS: f64 = 24.0;
const OVERSTRESS_RESIDUAL: f64 = 0.01;
const RATE_INDEPENDENCE_TOL: f64 = 1e-8;
const IRRECOVERABLE_TOL: f64 = 1e-6;
const PENALTY_SENSITIVITY: f64 = 5e-3;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

type Check = Result<Outcome, hvp_core::Error>;
type Criterion = (&'static str, fn() -> Check);

fn peat() -> Params {
    MaterialParams::fitted_peat()
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn min_eigen(recs: &[&SimulationRecord<f64>]) -> f64 {
    recs.iter()
        .map(|r| r.stats.min_internal_eigenvalue)
        .fold(f64::INFINITY, f64::min)
}

fn near_incompressibility() -> Check {
    let start = Instant::now();
    let rec = run(
        &LoadProgram::equilibrium_test(true),
        &peat(),
        FlowRuleMode::Original,
    )?;
    let elapsed = start.elapsed();
    let dev = rec
        .rows
        .iter()
        .map(|r| (r.i3 - 1.0).abs())
        .fold(0.0, f64::max);
    let spd = min_eigen(&[&rec]);
    Ok(Outcome::new(
        dev <= I3_BAND && elapsed < EQUILIBRIUM_RUNTIME && spd > 0.0,
        format!(
            "max |I3 - 1| = {dev:.3e} over {} rows, {:.0} ms, min internal eigenvalue {spd:.4}",
            rec.rows.len(),
            elapsed.as_secs_f64() * 1e3
        ),
    ))
}

fn analytic_limit() -> Check {
    let (lambda, c1) = (0.8_f64, 9.0);
    let exact = 2.0 * c1 * (lambda * lambda - 1.0 / lambda);
    let (stiff, _) = elastic_uniaxial_stress(lambda, c1, STIFF_PENALTY)?;
    let (soft, _) = elastic_uniaxial_stress(lambda, c1, 500.0)?;
    let e_stiff = ((stiff - exact) / exact).abs();
    let e_soft = ((soft - exact) / exact).abs();
    Ok(Outcome::new(
        e_stiff < STIFF_PENALTY_TOL && e_soft < FITTED_PENALTY_TOL,
        format!("exact {exact:.4} kPa; D2=5e4 {stiff:.5} (rel {e_stiff:.2e}); D2=500 {soft:.5} (rel {e_soft:.2e})"),
    ))
}

fn derivatives() -> Check {
    let p = peat();
    let mut jac: f64 = 0.0;
    let mut tan: f64 = 0.0;
    let mut zeros = true;
    for mode in [FlowRuleMode::Original, FlowRuleMode::HeavisideGated] {
        for s in loading_path_samples(&p, mode, DERIVATIVE_SAMPLES, DERIVATIVE_SEED)? {
            let c = compare_jacobian(&s.step(&p, mode)?, &s.z)?;
            jac = jac.max(c.componentwise);
            zeros &= c.zero_blocks_exact;
            tan = tan.max(compare_tangent(&s, &p, mode)?.0);
        }
    }
    Ok(Outcome::new(
        jac < DERIVATIVE_TOL && tan < DERIVATIVE_TOL && zeros,
        format!(
            "jacobian rel err {jac:.2e}, tangent rel err {tan:.2e}, zero blocks exact: {zeros}"
        ),
    ))
}

fn acceptance_programs() -> Vec<LoadProgram<f64>> {
    let mut v: Vec<_> = VALIDATION_RATES
        .iter()
        .map(|&r| LoadProgram::validation(r))
        .collect();
    v.push(LoadProgram::equilibrium_test(true));
    v
}

fn newton_quality() -> Check {
    let p = peat();
    let mut min_order = f64::INFINITY;
    let mut samples = 0;
    let mut max_iter = 0;
    for prog in acceptance_programs() {
        for mode in [FlowRuleMode::Original, FlowRuleMode::HeavisideGated] {
            let rec = run(&prog, &p, mode)?;
            max_iter = max_iter.max(rec.stats.max_local_iterations);
            for t in rec
                .stats
                .local_tails
                .iter()
                .filter(|t| t[2] > ORDER_NOISE_FLOOR)
            {
                min_order = min_order.min((t[2] / t[1]).ln() / (t[1] / t[0]).ln());
                samples += 1;
            }
        }
    }
    Ok(Outcome::new(
        samples > 0 && min_order >= MIN_NEWTON_ORDER && max_iter <= MAX_LOCAL_ITERATIONS,
        format!("min observed order {min_order:.2} over {samples} tails, max {max_iter} local iterations"),
    ))
}

fn time_order() -> Check {
    let p = peat();
    let mut q = Vec::with_capacity(LADDER_LEVELS);
    for k in 0..LADDER_LEVELS {
        let mut prog = LoadProgram::ramp(16.0, 20.0);
        prog.dt_max = Some(LADDER_DT0 / f64::powi(2.0, k as i32));
        q.push(
            run(&prog, &p, FlowRuleMode::Original)?
                .final_row()
                .map_or(f64::NAN, |r| r.q_kpa),
        );
    }
    let orders: Vec<f64> = q
        .windows(3)
        .map(|w| ((w[0] - w[1]) / (w[1] - w[2])).abs().log2())
        .collect();
    let ok = orders
        .iter()
        .all(|o| (ORDER_RANGE.0..=ORDER_RANGE.1).contains(o));
    Ok(Outcome::new(
        ok,
        format!("final q {q:.6?} kPa, orders {orders:.3?}"),
    ))
}

fn thermodynamics() -> Check {
    let p = peat();
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for &rate in &VALIDATION_RATES {
        let rec = run(&LoadProgram::validation(rate), &p, FlowRuleMode::Original)?;
        for r in rec.rows.iter().skip(1) {
            let d = r.dissipation;
            let lowest = d.plastic.min(d.viscous[0]).min(d.viscous[1]);
            worst = worst.max(-lowest / r.power_scale.max(f64::MIN_POSITIVE));
            rows += 1;
        }
    }
    Ok(Outcome::new(
        worst <= DISSIPATION_TOL,
        format!("worst negative dissipation / stress power {worst:.2e} over {rows} steps"),
    ))
}

fn overstress_structure() -> Check {
    let p = peat();
    let ramp_hours = 5.0 / 16.0;
    let rec = run(
        &LoadProgram::relaxation(16.0, 5.0, HOLD_HOURS),
        &p,
        FlowRuleMode::Original,
    )?;
    let start = rec
        .rows
        .iter()
        .rev()
        .find(|r| r.t <= ramp_hours + 1e-12)
        .expect("ramp rows");
    let end = rec.final_row().expect("hold rows");
    let ratio = [0, 1].map(|i| end.overstress_kpa[i] / start.overstress_kpa[i]);

    let eq: Params = MaterialParams::fitted_equilibrium();
    let slow = run(&LoadProgram::cycle(0.16, 20.0), &eq, FlowRuleMode::Original)?;
    let fast = run(&LoadProgram::cycle(16.0, 20.0), &eq, FlowRuleMode::Original)?;
    let same_grid = slow.rows.len() == fast.rows.len();
    let path_gap = slow
        .rows
        .iter()
        .zip(&fast.rows)
        .map(|(a, b)| {
            (a.q_kpa - b.q_kpa)
                .abs()
                .max((a.axial_strain_pct - b.axial_strain_pct).abs())
        })
        .fold(0.0, f64::max);
    Ok(Outcome::new(
        ratio.iter().all(|&x| x < OVERSTRESS_RESIDUAL) && same_grid && path_gap < RATE_INDEPENDENCE_TOL,
        format!(
            "overstress after {HOLD_HOURS} h hold: {:.3} % and {:.2e} % of hold start; equilibrium path gap {path_gap:.1e}",
            ratio[0] * 100.0,
            ratio[1] * 100.0
        ),
    ))
}

fn plasticity() -> Check {
    let mut no_flow: Params = MaterialParams::fitted_equilibrium();
    no_flow.plastic.cp = 0.0;
    let prog = LoadProgram::equilibrium_test(true);
    let elastic = run(&prog, &no_flow, FlowRuleMode::Original)?.irrecoverable_strain();
    let plastic = run(
        &prog,
        &MaterialParams::<f64>::fitted_equilibrium(),
        FlowRuleMode::Original,
    )?
    .irrecoverable_strain();

    let cycle = LoadProgram::cycle(1.6, 20.0).with_detachment(true);
    let original = run(&cycle, &peat(), FlowRuleMode::Original)?;
    let gated = run(&cycle, &peat(), FlowRuleMode::HeavisideGated)?;
    let passive: Vec<_> = gated
        .rows
        .windows(2)
        .filter(|w| !w[1].plastic_gate)
        .map(|w| w[1].ep_norm == w[0].ep_norm)
        .collect();
    let frozen = !passive.is_empty() && passive.iter().all(|&b| b);
    let (eo, eg) = (
        original.irrecoverable_strain(),
        gated.irrecoverable_strain(),
    );
    Ok(Outcome::new(
        elastic.abs() < IRRECOVERABLE_TOL && plastic > 0.0 && frozen && eg < eo,
        format!(
            "cp=0 {elastic:.1e} %, cp=0.1 {plastic:.3} %; Cp frozen on {} passive steps: {frozen}; original {eo:.3} % vs gated {eg:.3} %",
            passive.len()
        ),
    ))
}

fn sensitivity() -> Check {
    let base = peat();
    let prog = LoadProgram::equilibrium_test(true);
    let mode = FlowRuleMode::Original;
    let c1 = sweep(&base, SweepAxis::C1, &[4.0, 9.0, 14.0], &prog, mode)?;
    let cp = sweep(&base, SweepAxis::Cp, &[0.08, 0.1, 0.12], &prog, mode)?;
    let d2 = sweep(&base, SweepAxis::D2, &[500.0, 1000.0, 1500.0], &prog, mode)?;
    let peaks: Vec<f64> = c1.iter().map(|r| r.summary.peak_q).collect();
    let c1_irr: Vec<f64> = c1.iter().map(|r| -r.summary.irrecoverable_strain).collect();
    let cp_irr: Vec<f64> = cp.iter().map(|r| r.summary.irrecoverable_strain).collect();
    let mut d2_gap: f64 = 0.0;
    for i in 0..d2.len() {
        for j in 0..d2.len() {
            if i != j {
                d2_gap = d2_gap.max(max_relative_difference(&d2[i].record, &d2[j].record)?);
            }
        }
    }
    let all: Vec<_> = [&c1, &cp, &d2]
        .iter()
        .flat_map(|s| s.iter().map(|r| &r.record))
        .collect();
    Ok(Outcome::new(
        strictly_increasing(&peaks) && strictly_increasing(&c1_irr) && strictly_increasing(&cp_irr)
            && d2_gap < PENALTY_SENSITIVITY
            && min_eigen(&all) > 0.0,
        format!(
            "C1 peaks {peaks:.2?} kPa, C1 irrecoverable {:.3?} %, cp irrecoverable {cp_irr:.3?} %, D2 max curve gap {:.3} %",
            c1_irr.iter().map(|x| -x).collect::<Vec<_>>(),
            d2_gap * 100.0
        ),
    ))
}

fn rate_ordering() -> Check {
    let p = peat();
    let mut peaks = Vec::new();
    for &rate in VALIDATION_RATES.iter().rev() {
        let rec = run(&LoadProgram::ramp(rate, 20.0), &p, FlowRuleMode::Original)?;
        peaks.push(rec.final_row().map_or(f64::NAN, |r| r.q_kpa));
    }
    Ok(Outcome::new(
        strictly_increasing(&peaks),
        format!("q at 20 % for 0.16 -> 160 %/h: {peaks:.2?} kPa"),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("near-incompressibility", near_incompressibility),
        ("analytic limit", analytic_limit),
        ("jacobian and tangent", derivatives),
        ("newton convergence", newton_quality),
        ("time integration order", time_order),
        ("dissipation inequality", thermodynamics),
        ("overstress relaxation", overstress_structure),
        ("plasticity", plasticity),
        ("sensitivity orderings", sensitivity),
        ("rate ordering", rate_ordering),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        failed += usize::from(!o.passed);
        println!(
            "criterion {:>2} {:<24} {}  {}",
            i + 1,
            name,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
