use std::f64::consts::PI;

use crate::lti;
use crate::signals::{self, GroundMotion, TimeSeries, Unit};
use crate::Error;

use super::config::ReferenceSource;

/// Sampled reference displacement `r` and its rate on the simulation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTrajectory {
    pub dt: f64,
    pub r: Vec<f64>,
    pub r_dot: Vec<f64>,
}

impl ReferenceTrajectory {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Number of grid points covering `[0, duration]` at `dt`.
pub fn grid_points(duration: f64, dt: f64) -> usize {
    (duration / dt + 1e-9).floor() as usize + 1
}

/// Record acceleration to a displacement command: unit conversion, linear
/// resampling onto `dt`, Butterworth low-pass, then two trapezoidal
/// integrations each followed by a linear detrend.
pub fn record_displacement(gm: &GroundMotion, scale: f64, dt: f64, cutoff_hz: f64) -> Result<TimeSeries, Error> {
    let accel = gm.accel.to_unit(Unit::MeterPerSecond2)?.map(|a| a * scale);
    let accel = signals::resample(&accel, dt)?;
    let lp = lti::butterworth2_discrete(cutoff_hz, dt)?;
    let filtered = TimeSeries::new(dt, lp.apply(accel.values()), Unit::MeterPerSecond2)?;
    let vel = signals::detrend_linear(&signals::integrate(&filtered, Unit::MeterPerSecond));
    Ok(signals::detrend_linear(&signals::integrate(&vel, Unit::Meter)))
}

pub fn build_reference(source: &ReferenceSource, dt: f64, duration: f64, cutoff_hz: f64) -> Result<ReferenceTrajectory, Error> {
    let n = grid_points(duration, dt);
    let t = |k: usize| k as f64 * dt;
    let (r, r_dot) = match source {
        ReferenceSource::Sine { amplitude, frequency_hz } => {
            let w = 2.0 * PI * frequency_hz;
            (
                (0..n).map(|k| amplitude * (w * t(k)).sin()).collect(),
                (0..n).map(|k| amplitude * w * (w * t(k)).cos()).collect(),
            )
        }
        ReferenceSource::Step { amplitude } => (vec![*amplitude; n], vec![0.0; n]),
        ReferenceSource::Record { path, scale } => {
            let gm = signals::load_at2(path)?;
            let d = record_displacement(&gm, *scale, dt, cutoff_hz)?;
            let rate = signals::differentiate(&d)?;
            let m = n.min(d.len());
            (d.values()[..m].to_vec(), rate.values()[..m].to_vec())
        }
    };
    Ok(ReferenceTrajectory { dt, r, r_dot })
}
