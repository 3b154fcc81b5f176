use std::f64::consts::PI;

use crate::lti::{self, FrequencyResponse, TransferFunction};
use crate::signals::Columns;
use crate::Error;

use super::config::ConfigError;

/// Systems available for frequency-response export.
pub fn named_system(name: &str, cutoff_hz: f64) -> Result<TransferFunction, Error> {
    match name {
        "vd" => Ok(lti::tf_shake_table_displacement()),
        "va" => Ok(lti::tf_shake_table_acceleration()),
        "butterworth" => Ok(lti::butterworth2_lowpass(cutoff_hz)?),
        other => Err(Error::UnknownSystem(other.to_string())),
    }
}

/// `points` log-spaced frequencies from `omega_min` to `omega_max`.
pub fn log_grid(omega_min: f64, omega_max: f64, points: usize) -> Result<Vec<f64>, ConfigError> {
    let bad = |key: &str, message: &str| ConfigError::InvalidValue { key: key.into(), message: message.into() };
    if !(omega_min > 0.0 && omega_min.is_finite()) {
        return Err(bad("omega-min", "must be positive; the grid never includes omega = 0"));
    }
    if !(omega_max > omega_min && omega_max.is_finite()) {
        return Err(bad("omega-max", "must exceed omega-min"));
    }
    if points < 2 {
        return Err(bad("points", "need at least 2 points"));
    }
    let (a, b) = (omega_min.log10(), omega_max.log10());
    Ok((0..points)
        .map(|i| match i {
            0 => omega_min,
            i if i == points - 1 => omega_max,
            i => 10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64),
        })
        .collect())
}

/// Magnitude and unwrapped phase on a log grid, columns `omega_rad_s, mag, phase_rad`.
pub fn run_bode(system: &str, omega_min: f64, omega_max: f64, points: usize) -> Result<Columns, Error> {
    let tf = named_system(system, 50.0)?;
    let grid = log_grid(omega_min, omega_max, points)?;
    let mut mag = Vec::with_capacity(points);
    let mut phase: Vec<f64> = Vec::with_capacity(points);
    for &w in &grid {
        let h = tf.freq_response(w)?;
        mag.push(h.norm());
        let mut p = h.arg();
        if let Some(&prev) = phase.last() {
            p += 2.0 * PI * ((prev - p) / (2.0 * PI)).round();
        }
        phase.push(p);
    }
    let mut cols = Columns::new();
    cols.push("omega_rad_s", grid)?;
    cols.push("mag", mag)?;
    cols.push("phase_rad", phase)?;
    Ok(cols)
}
