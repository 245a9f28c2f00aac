//! Single-axis parameter sensitivity runs.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::constitutive::FlowRuleMode;
use crate::error::{Error, Result};
use crate::material::{MaterialParams, HOURS_PER_DAY};
use crate::triaxial::{run, LoadProgram, SimulationRecord};

/// A single scalar material constant addressed by its file key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    C1,
    /// Bulk penalty of the equilibrium spring only.
    D2,
    Alpha,
    C1p,
    D2p,
    AlphaP,
    Cp,
    C1v1,
    /// Viscosity of the first Maxwell branch, kPa·day.
    Eta1,
    C1v2,
    Eta2,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 11] = [
        SweepAxis::C1,
        SweepAxis::D2,
        SweepAxis::Alpha,
        SweepAxis::C1p,
        SweepAxis::D2p,
        SweepAxis::AlphaP,
        SweepAxis::Cp,
        SweepAxis::C1v1,
        SweepAxis::Eta1,
        SweepAxis::C1v2,
        SweepAxis::Eta2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::C1 => "c1",
            SweepAxis::D2 => "d2",
            SweepAxis::Alpha => "alpha",
            SweepAxis::C1p => "c1p",
            SweepAxis::D2p => "d2p",
            SweepAxis::AlphaP => "alphap",
            SweepAxis::Cp => "cp",
            SweepAxis::C1v1 => "c1v1",
            SweepAxis::Eta1 => "eta1",
            SweepAxis::C1v2 => "c1v2",
            SweepAxis::Eta2 => "eta2",
        }
    }

    /// Copy of `base` with this constant replaced by `value`.
    pub fn apply(self, base: &MaterialParams<f64>, value: f64) -> MaterialParams<f64> {
        let mut p = *base;
        match self {
            SweepAxis::C1 => p.elastic.c1 = value,
            SweepAxis::D2 => p.elastic.d2 = value,
            SweepAxis::Alpha => p.elastic.alpha = value,
            SweepAxis::C1p => p.plastic.branch.c1 = value,
            SweepAxis::D2p => p.plastic.branch.d2 = value,
            SweepAxis::AlphaP => p.plastic.branch.alpha = value,
            SweepAxis::Cp => p.plastic.cp = value,
            SweepAxis::C1v1 => p.viscous[0].branch.c1 = value,
            SweepAxis::Eta1 => p.viscous[0].eta = value * HOURS_PER_DAY,
            SweepAxis::C1v2 => p.viscous[1].branch.c1 = value,
            SweepAxis::Eta2 => p.viscous[1].eta = value * HOURS_PER_DAY,
        }
        p
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase();
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == key)
            .ok_or_else(|| {
                let names: Vec<_> = SweepAxis::ALL.iter().map(|a| a.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown sweep axis '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSummary {
    pub value: f64,
    pub peak_q: f64,
    pub irrecoverable_strain: f64,
}

#[derive(Clone, Debug)]
pub struct SweepRun {
    pub summary: SweepSummary,
    pub record: SimulationRecord<f64>,
}

/// One simulation per value, run concurrently; results keep the order of `values`.
/// The first failing run's error is returned.
pub fn sweep(
    base: &MaterialParams<f64>,
    axis: SweepAxis,
    values: &[f64],
    program: &LoadProgram<f64>,
    mode: FlowRuleMode,
) -> Result<Vec<SweepRun>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep needs at least one value".into(),
        ));
    }
    program.validate()?;
    let params: Vec<_> = values
        .iter()
        .map(|&v| {
            let p = axis.apply(base, v);
            p.validate().map(|_| (v, p))
        })
        .collect::<Result<_>>()?;
    params
        .into_par_iter()
        .map(|(value, p)| {
            let record = run(program, &p, mode)?;
            Ok(SweepRun {
                summary: SweepSummary {
                    value,
                    peak_q: record.peak_q(),
                    irrecoverable_strain: record.irrecoverable_strain(),
                },
                record,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_names_round_trip() {
        for a in SweepAxis::ALL {
            assert_eq!(a.name().parse::<SweepAxis>().unwrap(), a);
        }
        assert!("c9".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn eta_is_given_in_days() {
        let p = SweepAxis::Eta1.apply(&MaterialParams::fitted_peat(), 2.0);
        assert_eq!(p.viscous[0].eta, 48.0);
    }

    #[test]
    fn order_is_preserved_and_errors_propagate() {
        let base = MaterialParams::fitted_peat();
        let prog = LoadProgram::ramp(16.0, 2.0);
        let runs = sweep(
            &base,
            SweepAxis::C1,
            &[14.0, 4.0, 9.0],
            &prog,
            FlowRuleMode::Original,
        )
        .unwrap();
        let v: Vec<_> = runs.iter().map(|r| r.summary.value).collect();
        assert_eq!(v, vec![14.0, 4.0, 9.0]);
        assert!(runs[0].summary.peak_q > runs[2].summary.peak_q);
        assert!(runs[2].summary.peak_q > runs[1].summary.peak_q);
        let bad = sweep(
            &base,
            SweepAxis::Cp,
            &[0.1, -0.1],
            &prog,
            FlowRuleMode::Original,
        );
        assert!(matches!(bad, Err(Error::InvalidParameter { .. })));
    }
}
