//! Simulation records and experimental curves as CSV.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::constitutive::Dissipation;
use crate::error::{Error, Result};
use crate::triaxial::{RecordRow, SimulationRecord};

pub const RECORD_HEADER_COMMENT: &str = "# hvp simulation record v1";

pub const RECORD_COLUMNS: [&str; 16] = [
    "t_h",
    "axial_strain_pct",
    "stretch",
    "q_kpa",
    "s11_kpa",
    "i3",
    "ep_norm",
    "overstress1_kpa",
    "overstress2_kpa",
    "mode",
    "diss_plastic",
    "diss_visc1",
    "diss_visc2",
    "power_scale",
    "platen_strain_pct",
    "plastic_gate",
];

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

pub fn write_record_to<W: Write>(mut w: W, rec: &SimulationRecord<f64>) -> Result<()> {
    writeln!(w, "{RECORD_HEADER_COMMENT}")?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RECORD_COLUMNS).map_err(csv_err)?;
    for r in &rec.rows {
        let d = &r.dissipation;
        let nums = [
            r.t,
            r.axial_strain_pct,
            r.stretch,
            r.q_kpa,
            r.s11_kpa,
            r.i3,
            r.ep_norm,
            r.overstress_kpa[0],
            r.overstress_kpa[1],
        ];
        let mut fields: Vec<String> = nums.iter().map(|x| x.to_string()).collect();
        fields.push(r.mode.to_string());
        for x in [
            d.plastic,
            d.viscous[0],
            d.viscous[1],
            r.power_scale,
            r.platen_strain_pct,
        ] {
            fields.push(x.to_string());
        }
        fields.push(u8::from(r.plastic_gate).to_string());
        out.write_record(&fields).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_record(path: impl AsRef<Path>, rec: &SimulationRecord<f64>) -> Result<()> {
    let f = fs::File::create(path)?;
    write_record_to(std::io::BufWriter::new(f), rec)
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r)
}

/// Reads rows written by [`write_record_to`]; solver statistics are not stored.
pub fn read_record_from<R: Read>(r: R) -> Result<SimulationRecord<f64>> {
    let mut rd = reader(r);
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().ne(RECORD_COLUMNS) {
        return Err(Error::Parse {
            line: 2,
            message: format!(
                "unexpected columns: {}",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let num = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("column {}: {e}", RECORD_COLUMNS[i]),
            })
        };
        let mode = rec[9].parse().map_err(|e: Error| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let gate = match &rec[15] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("plastic_gate must be 0 or 1, got '{other}'"),
                })
            }
        };
        rows.push(RecordRow {
            t: num(0)?,
            axial_strain_pct: num(1)?,
            stretch: num(2)?,
            q_kpa: num(3)?,
            s11_kpa: num(4)?,
            i3: num(5)?,
            ep_norm: num(6)?,
            overstress_kpa: [num(7)?, num(8)?],
            mode,
            dissipation: Dissipation {
                plastic: num(10)?,
                viscous: [num(11)?, num(12)?],
            },
            power_scale: num(13)?,
            platen_strain_pct: num(14)?,
            plastic_gate: gate,
        });
    }
    Ok(SimulationRecord {
        rows,
        stats: Default::default(),
    })
}

pub fn read_record(path: impl AsRef<Path>) -> Result<SimulationRecord<f64>> {
    read_record_from(fs::File::open(path)?)
}

/// Measured (or synthetic) differential stress against time and strain.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ExperimentCurve {
    /// `(t [h], axial strain [%], q [kPa])`, strain and stress compression positive.
    pub rows: Vec<(f64, f64, f64)>,
    pub rate_label: String,
    pub specimen: String,
}

impl ExperimentCurve {
    pub fn validate(&self) -> Result<()> {
        for (i, &(t, e, q)) in self.rows.iter().enumerate() {
            if !(t.is_finite() && e.is_finite() && q.is_finite()) {
                return Err(Error::invalid_param(
                    format!("rows[{i}]"),
                    "non-finite value",
                ));
            }
            if i > 0 && t <= self.rows[i - 1].0 {
                return Err(Error::invalid_param(
                    format!("rows[{i}].t"),
                    "time must be strictly increasing",
                ));
            }
        }
        Ok(())
    }
}

/// Parses a curve CSV with columns `t_h, axial_strain_pct, q_kpa`.
/// Metadata lines `# rate: …` and `# specimen: …` are optional.
pub fn parse_experiment(text: &str) -> Result<ExperimentCurve> {
    let mut curve = ExperimentCurve::default();
    for line in text.lines() {
        let Some(meta) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        if let Some((k, v)) = meta.split_once(':') {
            match k.trim() {
                "rate" => curve.rate_label = v.trim().to_string(),
                "specimen" => curve.specimen = v.trim().to_string(),
                _ => {}
            }
        }
    }
    let mut rd = reader(text.as_bytes());
    let header = rd.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("missing column '{name}'"),
            })
    };
    let (ct, ce, cq) = (col("t_h")?, col("axial_strain_pct")?, col("q_kpa")?);
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .unwrap_or("")
                .parse::<f64>()
                .map_err(|e| Error::Parse {
                    line,
                    message: format!("column {}: {e}", &header[i]),
                })
        };
        curve.rows.push((num(ct)?, num(ce)?, num(cq)?));
    }
    curve.validate()?;
    Ok(curve)
}

pub fn read_experiment(path: impl AsRef<Path>) -> Result<ExperimentCurve> {
    parse_experiment(&fs::read_to_string(path)?)
}

pub fn write_experiment_to<W: Write>(mut w: W, curve: &ExperimentCurve) -> Result<()> {
    if !curve.rate_label.is_empty() {
        writeln!(w, "# rate: {}", curve.rate_label)?;
    }
    if !curve.specimen.is_empty() {
        writeln!(w, "# specimen: {}", curve.specimen)?;
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t_h", "axial_strain_pct", "q_kpa"])
        .map_err(csv_err)?;
    for &(t, e, q) in &curve.rows {
        out.write_record([t.to_string(), e.to_string(), q.to_string()])
            .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_experiment(path: impl AsRef<Path>, curve: &ExperimentCurve) -> Result<()> {
    let f = fs::File::create(path)?;
    write_experiment_to(std::io::BufWriter::new(f), curve)
}
