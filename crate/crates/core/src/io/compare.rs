use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::triaxial::SimulationRecord;

use super::record_csv::ExperimentCurve;

/// Abscissa used to pair simulated and measured points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Alignment {
    #[default]
    Time,
    /// Axial strain, matching the k-th monotonic loading/unloading branch
    /// of the experiment with the k-th branch of the simulation.
    Strain,
}

impl FromStr for Alignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time" => Ok(Alignment::Time),
            "strain" => Ok(Alignment::Strain),
            other => Err(Error::InvalidArgument(format!(
                "unknown alignment '{other}'"
            ))),
        }
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alignment::Time => "time",
            Alignment::Strain => "strain",
        })
    }
}

/// Deviation of simulated from measured differential stress.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitMetric {
    pub rms: f64,
    pub max_abs: f64,
    pub n: usize,
    pub alignment: Alignment,
}

impl fmt::Display for FitMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rms {:.6} kPa, max {:.6} kPa over {} points (by {})",
            self.rms, self.max_abs, self.n, self.alignment
        )
    }
}

/// Linear interpolation on a non-decreasing abscissa; `None` outside the range.
fn interp(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return None;
    }
    let k = xs.partition_point(|&v| v < x);
    if k == 0 {
        return Some(ys[0]);
    }
    let (x0, x1) = (xs[k - 1], xs[k]);
    if x1 == x0 {
        return Some(ys[k]);
    }
    Some(ys[k - 1] + (ys[k] - ys[k - 1]) * (x - x0) / (x1 - x0))
}

/// Splits a strain history into maximal monotonic runs sharing their turning
/// points; points where the strain does not move stay with the current run.
fn monotonic_branches(strain: &[f64]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    if strain.is_empty() {
        return out;
    }
    let mut start = 0;
    let mut dir = 0i8;
    for i in 1..strain.len() {
        let d = strain[i] - strain[i - 1];
        let s = if d > 0.0 {
            1
        } else if d < 0.0 {
            -1
        } else {
            0
        };
        if s != 0 && dir != 0 && s != dir {
            out.push(start..i);
            start = i - 1;
        }
        if s != 0 {
            dir = s;
        }
    }
    out.push(start..strain.len());
    out
}

/// Interpolation on one monotonic branch, first crossing wins.
fn interp_branch(strain: &[f64], q: &[f64], x: f64) -> Option<f64> {
    for k in 1..strain.len() {
        let (a, b) = (strain[k - 1], strain[k]);
        if a == b {
            continue;
        }
        if (x - a) * (x - b) <= 0.0 {
            return Some(q[k - 1] + (q[k] - q[k - 1]) * (x - a) / (b - a));
        }
    }
    None
}

/// Simulated differential stress interpolated at the experimental abscissae.
pub fn compare(
    sim: &SimulationRecord<f64>,
    exp: &ExperimentCurve,
    alignment: Alignment,
) -> Result<FitMetric> {
    let mut devs = Vec::with_capacity(exp.rows.len());
    match alignment {
        Alignment::Time => {
            let t: Vec<f64> = sim.rows.iter().map(|r| r.t).collect();
            let q: Vec<f64> = sim.rows.iter().map(|r| r.q_kpa).collect();
            for &(te, _, qe) in &exp.rows {
                if let Some(qs) = interp(&t, &q, te) {
                    devs.push(qs - qe);
                }
            }
        }
        Alignment::Strain => {
            let se: Vec<f64> = exp.rows.iter().map(|r| r.1).collect();
            let ss: Vec<f64> = sim.rows.iter().map(|r| r.axial_strain_pct).collect();
            let qs: Vec<f64> = sim.rows.iter().map(|r| r.q_kpa).collect();
            let be = monotonic_branches(&se);
            let bs = monotonic_branches(&ss);
            for (k, (re, rs)) in be.iter().zip(bs.iter()).enumerate() {
                // turning points belong to the branch they end
                let first = re.start + usize::from(k > 0);
                for i in first..re.end {
                    if let Some(v) = interp_branch(&ss[rs.clone()], &qs[rs.clone()], se[i]) {
                        devs.push(v - exp.rows[i].2);
                    }
                }
            }
        }
    }
    if devs.len() < 2 {
        return Err(Error::EmptyOverlap);
    }
    let n = devs.len();
    let rms = (devs.iter().map(|d| d * d).sum::<f64>() / n as f64).sqrt();
    let max_abs = devs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    Ok(FitMetric {
        rms,
        max_abs,
        n,
        alignment,
    })
}

/// Largest `|q_a − q_b|` over the time span of `a`, relative to the peak `|q_a|`.
pub fn max_relative_difference(
    a: &SimulationRecord<f64>,
    b: &SimulationRecord<f64>,
) -> Result<f64> {
    let exp = ExperimentCurve {
        rows: b
            .rows
            .iter()
            .map(|r| (r.t, r.axial_strain_pct, r.q_kpa))
            .collect(),
        ..Default::default()
    };
    let m = compare(a, &exp, Alignment::Time)?;
    let peak = a.rows.iter().fold(0.0f64, |m, r| m.max(r.q_kpa.abs()));
    Ok(m.max_abs / peak.max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triaxial::RecordRow;

    fn record(points: &[(f64, f64, f64)]) -> SimulationRecord<f64> {
        SimulationRecord {
            rows: points
                .iter()
                .map(|&(t, e, q)| RecordRow {
                    t,
                    axial_strain_pct: e,
                    stretch: 1.0 - e / 100.0,
                    q_kpa: q,
                    s11_kpa: 0.0,
                    i3: 1.0,
                    ep_norm: 0.0,
                    overstress_kpa: [0.0; 2],
                    mode: Default::default(),
                    dissipation: Default::default(),
                    power_scale: 0.0,
                    platen_strain_pct: e,
                    plastic_gate: true,
                })
                .collect(),
            stats: Default::default(),
        }
    }

    fn line(n: usize) -> Vec<(f64, f64, f64)> {
        (0..n)
            .map(|i| (i as f64, i as f64 * 0.1, 2.0 * i as f64))
            .collect()
    }

    #[test]
    fn identical_curves_have_zero_rms() {
        let pts = line(50);
        let exp = ExperimentCurve {
            rows: pts.clone(),
            ..Default::default()
        };
        for a in [Alignment::Time, Alignment::Strain] {
            let m = compare(&record(&pts), &exp, a).unwrap();
            assert_eq!(m.rms, 0.0);
            assert_eq!(m.n, 50);
        }
    }

    #[test]
    fn constant_offset() {
        let pts = line(100);
        let exp = ExperimentCurve {
            rows: pts.iter().map(|&(t, e, q)| (t, e, q - 1.0)).collect(),
            ..Default::default()
        };
        let m = compare(&record(&pts), &exp, Alignment::Time).unwrap();
        assert!((m.rms - 1.0).abs() < 1e-12);
        assert!((m.max_abs - 1.0).abs() < 1e-12);
        assert!(m.rms <= m.max_abs);
    }

    #[test]
    fn disjoint_domains_are_rejected() {
        let exp = ExperimentCurve {
            rows: vec![(100.0, 0.0, 0.0), (101.0, 0.0, 0.0)],
            ..Default::default()
        };
        assert!(matches!(
            compare(&record(&line(10)), &exp, Alignment::Time),
            Err(Error::EmptyOverlap)
        ));
    }

    #[test]
    fn strain_alignment_keeps_branches_apart() {
        // loading q = 2e, unloading q = e: the same strain maps to different stresses
        let sim = record(&[(0.0, 0.0, 0.0), (1.0, 1.0, 2.0), (2.0, 0.0, 0.0 - 1.0)]);
        let exp = ExperimentCurve {
            rows: vec![(0.0, 0.5, 1.0), (0.5, 1.0, 2.0), (1.5, 0.5, 0.5)],
            ..Default::default()
        };
        let m = compare(&sim, &exp, Alignment::Strain).unwrap();
        assert_eq!(m.n, 3);
        assert!(m.max_abs < 1e-12, "{m}");
    }

    #[test]
    fn branches_split_at_reversals_only() {
        let b = monotonic_branches(&[0.0, 1.0, 2.0, 2.0, 1.0, 0.0, 0.0, 3.0]);
        assert_eq!(b, vec![0..4, 3..7, 6..8]);
    }
}
