use crate::error::{Error, Result};
use crate::scalar::Real;

/// One axial loading stage. Strains are engineering strains in percent,
/// stresses Cauchy stresses in kPa, both positive in compression. The cell
/// pressure is zero throughout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LoadSegment<T> {
    /// Move the platen at `rate` (%/h, positive) until `target` (%).
    StrainRamp { rate: T, target: T },
    /// Keep the platen still for `duration` hours.
    Hold { duration: T },
    /// Keep the axial stress at `stress` for `duration` hours.
    StressHold { stress: T, duration: T },
}

impl<T: Real> LoadSegment<T> {
    /// Duration in hours when the segment starts from platen strain `start`.
    pub fn duration_from(&self, start: T) -> T {
        match *self {
            LoadSegment::StrainRamp { rate, target } => (target - start).abs() / rate,
            LoadSegment::Hold { duration } | LoadSegment::StressHold { duration, .. } => duration,
        }
    }

    pub fn validate(&self, index: usize) -> Result<()> {
        let bad = |field: &str, msg: String| {
            Err(Error::invalid_param(
                format!("segment[{index}].{field}"),
                msg,
            ))
        };
        match *self {
            LoadSegment::StrainRamp { rate, target } => {
                if !(rate > T::zero() && rate.is_finite()) {
                    return bad("rate", format!("must be positive, got {rate}"));
                }
                if !(target < T::lit(100.0) && target.is_finite()) {
                    return bad(
                        "target",
                        format!("must be finite and below 100 %, got {target}"),
                    );
                }
            }
            LoadSegment::Hold { duration } => {
                if !(duration > T::zero() && duration.is_finite()) {
                    return bad("duration", format!("must be positive, got {duration}"));
                }
            }
            LoadSegment::StressHold { stress, duration } => {
                if !(duration > T::zero() && duration.is_finite()) {
                    return bad("duration", format!("must be positive, got {duration}"));
                }
                if !stress.is_finite() {
                    return bad("stress", format!("must be finite, got {stress}"));
                }
            }
        }
        Ok(())
    }
}

/// Ordered load segments plus time-step controls. Unset step bounds default
/// per segment to `duration / 200` and `dt_max / 1024`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadProgram<T> {
    pub segments: Vec<LoadSegment<T>>,
    pub platen_detachment: bool,
    pub dt_max: Option<T>,
    pub dt_min: Option<T>,
}

pub const DEFAULT_STEPS_PER_SEGMENT: f64 = 200.0;
pub const DEFAULT_HALVINGS: f64 = 1024.0;

/// Relaxation hold used between validation loading stages, hours (16 min).
pub const STEP_RELAXATION_HOURS: f64 = 16.0 / 60.0;

/// Axial strain rates (%/h) of the five validation tests.
pub const VALIDATION_RATES: [f64; 5] = [160.0, 16.0, 4.81, 1.6, 0.16];

/// Rate (%/h) of the equilibrium test.
pub const EQUILIBRIUM_RATE: f64 = 0.16;

impl<T: Real> LoadProgram<T> {
    pub fn new(segments: Vec<LoadSegment<T>>) -> Self {
        Self {
            segments,
            platen_detachment: false,
            dt_max: None,
            dt_min: None,
        }
    }

    pub fn with_detachment(mut self, on: bool) -> Self {
        self.platen_detachment = on;
        self
    }

    pub fn with_dt_max(mut self, dt_max: T) -> Self {
        self.dt_max = Some(dt_max);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::invalid_param(
                "segments",
                "at least one segment is required",
            ));
        }
        for (i, s) in self.segments.iter().enumerate() {
            s.validate(i)?;
        }
        if let Some(m) = self.dt_max {
            if !(m > T::zero() && m.is_finite()) {
                return Err(Error::invalid_param(
                    "dt_max",
                    format!("must be positive, got {m}"),
                ));
            }
        }
        if let Some(m) = self.dt_min {
            if !(m > T::zero() && m.is_finite()) {
                return Err(Error::invalid_param(
                    "dt_min",
                    format!("must be positive, got {m}"),
                ));
            }
            if let Some(hi) = self.dt_max {
                if m > hi {
                    return Err(Error::invalid_param(
                        "dt_min",
                        format!("must not exceed dt_max ({m} > {hi})"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Step bounds for a segment of the given duration.
    pub fn step_bounds(&self, duration: T) -> (T, T) {
        let hi = self
            .dt_max
            .unwrap_or(duration / T::lit(DEFAULT_STEPS_PER_SEGMENT))
            .min(duration);
        let lo = self.dt_min.unwrap_or(hi / T::lit(DEFAULT_HALVINGS)).min(hi);
        (hi, lo)
    }

    /// Total duration in hours.
    pub fn duration(&self) -> T {
        let mut platen = T::zero();
        let mut total = T::zero();
        for s in &self.segments {
            total = total + s.duration_from(platen);
            if let LoadSegment::StrainRamp { target, .. } = *s {
                platen = target;
            }
        }
        total
    }

    /// Monotonic compression to 20 % and unloading to 0 %, at 0.16 %/h.
    pub fn equilibrium_test(detachment: bool) -> Self {
        Self::cycle(T::lit(EQUILIBRIUM_RATE), T::lit(20.0)).with_detachment(detachment)
    }

    /// Compression to `peak` and back to zero at `rate`.
    pub fn cycle(rate: T, peak: T) -> Self {
        Self::new(vec![
            LoadSegment::StrainRamp { rate, target: peak },
            LoadSegment::StrainRamp {
                rate,
                target: T::zero(),
            },
        ])
    }

    /// Single ramp to `target`.
    pub fn ramp(rate: T, target: T) -> Self {
        Self::new(vec![LoadSegment::StrainRamp { rate, target }])
    }

    /// Ramp to `strain` followed by a relaxation hold.
    pub fn relaxation(rate: T, strain: T, hold: T) -> Self {
        Self::new(vec![
            LoadSegment::StrainRamp {
                rate,
                target: strain,
            },
            LoadSegment::Hold { duration: hold },
        ])
    }

    /// Loading-unloading-reloading with short relaxations at 10 % and 20 %
    /// during loading and at 10 % during unloading.
    pub fn validation(rate: T) -> Self {
        let ramp = |target: f64| LoadSegment::StrainRamp {
            rate,
            target: T::lit(target),
        };
        let hold = LoadSegment::Hold {
            duration: T::lit(STEP_RELAXATION_HOURS),
        };
        Self::new(vec![
            ramp(10.0),
            hold,
            ramp(20.0),
            hold,
            ramp(10.0),
            hold,
            ramp(0.0),
            ramp(20.0),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_duration_follows_rate() {
        let p = LoadProgram::<f64>::equilibrium_test(true);
        assert!((p.duration() - 250.0).abs() < 1e-9);
        assert_eq!(p.step_bounds(125.0), (0.625, 0.625 / 1024.0));
    }

    #[test]
    fn validation_rejects_bad_segments() {
        let p = LoadProgram::<f64>::new(vec![LoadSegment::Hold { duration: 0.0 }]);
        match p.validate() {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "segment[0].duration"),
            other => panic!("{other:?}"),
        }
        assert!(LoadProgram::<f64>::new(vec![]).validate().is_err());
        let mut q = LoadProgram::<f64>::ramp(1.0, 5.0);
        q.dt_max = Some(0.1);
        q.dt_min = Some(0.2);
        assert!(q.validate().is_err());
    }

    #[test]
    fn presets_are_valid() {
        for r in VALIDATION_RATES {
            LoadProgram::validation(r).validate().unwrap();
        }
        LoadProgram::relaxation(16.0, 5.0, 24.0).validate().unwrap();
    }
}
