//! Parameter and load-program files: `key = value` lines grouped under
//! `[section]` headers (TOML).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{MaterialParams, PlasticParams, ViscousParams, HOURS_PER_DAY};
use crate::potentials::BranchParams;
use crate::triaxial::{LoadProgram, LoadSegment};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpringSection {
    pub c1: f64,
    pub d2: f64,
    #[serde(default)]
    pub alpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlasticSection {
    pub c1: f64,
    pub d2: f64,
    #[serde(default)]
    pub alpha: f64,
    /// kPa⁻¹
    pub cp: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViscousSection {
    pub c1: f64,
    pub d2: f64,
    #[serde(default)]
    pub alpha: f64,
    /// kPa·day
    pub eta: f64,
}

/// Parameter file as written on disk; viscosities in kPa·day.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub elastic: SpringSection,
    pub plastic: PlasticSection,
    pub viscous1: ViscousSection,
    pub viscous2: ViscousSection,
}

impl ParamsFile {
    pub fn to_params(&self) -> MaterialParams<f64> {
        let viscous = |s: &ViscousSection| {
            ViscousParams::from_days(BranchParams::new(s.c1, s.d2, s.alpha), s.eta)
        };
        MaterialParams {
            elastic: BranchParams::new(self.elastic.c1, self.elastic.d2, self.elastic.alpha),
            plastic: PlasticParams {
                branch: BranchParams::new(self.plastic.c1, self.plastic.d2, self.plastic.alpha),
                cp: self.plastic.cp,
            },
            viscous: [viscous(&self.viscous1), viscous(&self.viscous2)],
        }
    }

    pub fn from_params(p: &MaterialParams<f64>) -> Self {
        let viscous = |v: &ViscousParams<f64>| ViscousSection {
            c1: v.branch.c1,
            d2: v.branch.d2,
            alpha: v.branch.alpha,
            eta: v.eta / HOURS_PER_DAY,
        };
        Self {
            elastic: SpringSection {
                c1: p.elastic.c1,
                d2: p.elastic.d2,
                alpha: p.elastic.alpha,
            },
            plastic: PlasticSection {
                c1: p.plastic.branch.c1,
                d2: p.plastic.branch.d2,
                alpha: p.plastic.branch.alpha,
                cp: p.plastic.cp,
            },
            viscous1: viscous(&p.viscous[0]),
            viscous2: viscous(&p.viscous[1]),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SegmentEntry {
    /// `rate` in %/h, `target` in %.
    Ramp { rate: f64, target: f64 },
    /// `duration` in hours.
    Hold { duration: f64 },
    /// `stress` in kPa (compression positive), `duration` in hours.
    StressHold { stress: f64, duration: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramSection {
    #[serde(default)]
    pub platen_detachment: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_min: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramFile {
    #[serde(default)]
    pub program: ProgramSection,
    #[serde(rename = "segment")]
    pub segments: Vec<SegmentEntry>,
}

impl ProgramFile {
    pub fn to_program(&self) -> LoadProgram<f64> {
        LoadProgram {
            segments: self
                .segments
                .iter()
                .map(|s| match *s {
                    SegmentEntry::Ramp { rate, target } => LoadSegment::StrainRamp { rate, target },
                    SegmentEntry::Hold { duration } => LoadSegment::Hold { duration },
                    SegmentEntry::StressHold { stress, duration } => {
                        LoadSegment::StressHold { stress, duration }
                    }
                })
                .collect(),
            platen_detachment: self.program.platen_detachment,
            dt_max: self.program.dt_max,
            dt_min: self.program.dt_min,
        }
    }

    pub fn from_program(p: &LoadProgram<f64>) -> Self {
        Self {
            program: ProgramSection {
                platen_detachment: p.platen_detachment,
                dt_max: p.dt_max,
                dt_min: p.dt_min,
            },
            segments: p
                .segments
                .iter()
                .map(|s| match *s {
                    LoadSegment::StrainRamp { rate, target } => SegmentEntry::Ramp { rate, target },
                    LoadSegment::Hold { duration } => SegmentEntry::Hold { duration },
                    LoadSegment::StressHold { stress, duration } => {
                        SegmentEntry::StressHold { stress, duration }
                    }
                })
                .collect(),
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn parse_toml<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
        message: e.message().to_string(),
    })
}

fn to_toml<T: Serialize>(v: &T) -> Result<String> {
    toml::to_string(v).map_err(|e| Error::InvalidArgument(e.to_string()))
}

/// Parses and validates a parameter file; viscosities are converted to kPa·h.
pub fn parse_params(text: &str) -> Result<MaterialParams<f64>> {
    let file: ParamsFile = parse_toml(text)?;
    let p = file.to_params();
    p.validate()?;
    Ok(p)
}

pub fn params_to_string(p: &MaterialParams<f64>) -> Result<String> {
    to_toml(&ParamsFile::from_params(p))
}

pub fn parse_program(text: &str) -> Result<LoadProgram<f64>> {
    let file: ProgramFile = parse_toml(text)?;
    let p = file.to_program();
    p.validate()?;
    Ok(p)
}

pub fn program_to_string(p: &LoadProgram<f64>) -> Result<String> {
    to_toml(&ProgramFile::from_program(p))
}

pub fn load_params(path: impl AsRef<Path>) -> Result<MaterialParams<f64>> {
    parse_params(&fs::read_to_string(path)?)
}

pub fn load_program(path: impl AsRef<Path>) -> Result<LoadProgram<f64>> {
    parse_program(&fs::read_to_string(path)?)
}

pub fn write_params(path: impl AsRef<Path>, p: &MaterialParams<f64>) -> Result<()> {
    Ok(fs::write(path, params_to_string(p)?)?)
}

pub fn write_program(path: impl AsRef<Path>, p: &LoadProgram<f64>) -> Result<()> {
    Ok(fs::write(path, program_to_string(p)?)?)
}
