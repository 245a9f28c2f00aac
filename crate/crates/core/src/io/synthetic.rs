//! Model-generated stand-in for measured curves, for end-to-end tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::triaxial::SimulationRecord;

use super::record_csv::ExperimentCurve;

pub const SYNTHETIC_SPECIMEN: &str = "synthetic";

/// Samples `n` equally spaced times over the run, interpolating `q` and
/// strain linearly, and adds independent uniform noise in `[-delta, delta]`
/// to `q`. The result is labelled as synthetic.
pub fn synthetic_curve(
    sim: &SimulationRecord<f64>,
    n: usize,
    delta: f64,
    seed: u64,
    rate_label: &str,
) -> Result<ExperimentCurve> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::invalid_param(
            "delta",
            "must be finite and non-negative",
        ));
    }
    let rows = &sim.rows;
    let (Some(first), Some(last)) = (rows.first(), rows.last()) else {
        return Err(Error::EmptyOverlap);
    };
    let (t0, t1) = (first.t, last.t);
    if t1 <= t0 {
        return Err(Error::EmptyOverlap);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut k = 1;
    for i in 0..n {
        let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
        while k + 1 < rows.len() && rows[k].t < t {
            k += 1;
        }
        let (a, b) = (&rows[k - 1], &rows[k]);
        let w = if b.t > a.t {
            ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let e = a.axial_strain_pct + w * (b.axial_strain_pct - a.axial_strain_pct);
        let q = a.q_kpa + w * (b.q_kpa - a.q_kpa);
        let noise = if delta > 0.0 {
            rng.gen_range(-delta..=delta)
        } else {
            0.0
        };
        out.push((t, e, q + noise));
    }
    Ok(ExperimentCurve {
        rows: out,
        rate_label: rate_label.to_string(),
        specimen: SYNTHETIC_SPECIMEN.to_string(),
    })
}
