//! Uniformly sampled signals and the operations the simulator needs on them.

mod at2;
mod csv_io;

pub use at2::{load_at2, parse_at2, to_at2_string, GroundMotion};
pub use csv_io::{read_csv, read_record_csv, write_csv, write_csv_to, Columns, RECORD_COLUMNS};

use std::fmt;

use thiserror::Error;

/// Standard gravity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.806_65;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("malformed AT2 header: {0}")]
    MalformedHeader(String),
    #[error("header declares {declared} samples but {parsed} were found")]
    SampleCountMismatch { declared: usize, parsed: usize },
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("unparsable sample token `{token}` at index {index}")]
    InvalidSample { index: usize, token: String },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("unit mismatch: {0} vs {1}")]
    UnitMismatch(Unit, Unit),
    #[error("sample interval mismatch: {0} vs {1}")]
    SampleIntervalMismatch(f64, f64),
    #[error("reference signal is identically zero, NRMSE is undefined")]
    ZeroReference,
    #[error("series has {0} samples, at least {1} required")]
    TooShort(usize, usize),
    #[error("invalid sample interval {0}")]
    InvalidInterval(f64),
    #[error("empty series")]
    Empty,
    #[error("unit {0} has no time-derivative tag")]
    NoRateUnit(Unit),
    #[error("cannot convert {from} to {to}")]
    IncompatibleUnits { from: Unit, to: Unit },
    #[error("CSV schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("I/O failure on {path}: {message}")]
    IoFailure { path: String, message: String },
}

/// Physical unit tag carried by a [`TimeSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Meter,
    MeterPerSecond,
    MeterPerSecond2,
    MeterPerSecond3,
    StandardGravity,
    StandardGravityPerSecond,
    Volt,
    VoltPerSecond,
    Newton,
    NewtonPerSecond,
    Dimensionless,
    PerSecond,
}

impl Unit {
    /// Unit of the time derivative, if one is tagged.
    pub fn per_second(self) -> Option<Unit> {
        use Unit::*;
        Some(match self {
            Meter => MeterPerSecond,
            MeterPerSecond => MeterPerSecond2,
            MeterPerSecond2 => MeterPerSecond3,
            StandardGravity => StandardGravityPerSecond,
            Volt => VoltPerSecond,
            Newton => NewtonPerSecond,
            Dimensionless => PerSecond,
            MeterPerSecond3 | StandardGravityPerSecond | VoltPerSecond | NewtonPerSecond
            | PerSecond => return None,
        })
    }

    fn symbol(self) -> &'static str {
        use Unit::*;
        match self {
            Meter => "m",
            MeterPerSecond => "m/s",
            MeterPerSecond2 => "m/s^2",
            MeterPerSecond3 => "m/s^3",
            StandardGravity => "g",
            StandardGravityPerSecond => "g/s",
            Volt => "V",
            VoltPerSecond => "V/s",
            Newton => "N",
            NewtonPerSecond => "N/s",
            Dimensionless => "1",
            PerSecond => "1/s",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A uniformly sampled real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    dt: f64,
    values: Vec<f64>,
    unit: Unit,
}

impl TimeSeries {
    pub fn new(dt: f64, values: Vec<f64>, unit: Unit) -> Result<Self, SignalError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SignalError::InvalidInterval(dt));
        }
        if values.is_empty() {
            return Err(SignalError::Empty);
        }
        Ok(Self { dt, values, unit })
    }

    /// Samples `f(t)` on `n` points starting at `t = 0`.
    pub fn from_fn(dt: f64, n: usize, unit: Unit, f: impl Fn(f64) -> f64) -> Result<Self, SignalError> {
        Self::new(dt, (0..n).map(|i| f(i as f64 * dt)).collect(), unit)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time spanned from the first to the last sample.
    pub fn duration(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }

    pub fn time(&self, index: usize) -> f64 {
        index as f64 * self.dt
    }

    pub fn peak_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Sub-series `[start, end)`, same interval and unit.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self, SignalError> {
        let end = end.min(self.values.len());
        if start >= end {
            return Err(SignalError::Empty);
        }
        Self::new(self.dt, self.values[start..end].to_vec(), self.unit)
    }

    /// Drops every sample before time `t0`.
    pub fn skip_time(&self, t0: f64) -> Result<Self, SignalError> {
        let start = (t0 / self.dt - 1e-9).ceil().max(0.0) as usize;
        self.slice(start, self.values.len())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dt: self.dt,
            values: self.values.iter().map(|&v| f(v)).collect(),
            unit: self.unit,
        }
    }

    /// Converts between unit tags that differ only by a scale factor.
    pub fn to_unit(&self, unit: Unit) -> Result<Self, SignalError> {
        use Unit::*;
        let factor = match (self.unit, unit) {
            (a, b) if a == b => 1.0,
            (StandardGravity, MeterPerSecond2) => STANDARD_GRAVITY,
            (MeterPerSecond2, StandardGravity) => 1.0 / STANDARD_GRAVITY,
            (StandardGravityPerSecond, MeterPerSecond3) => STANDARD_GRAVITY,
            (MeterPerSecond3, StandardGravityPerSecond) => 1.0 / STANDARD_GRAVITY,
            (from, to) => return Err(SignalError::IncompatibleUnits { from, to }),
        };
        let mut out = self.map(|v| v * factor);
        out.unit = unit;
        Ok(out)
    }
}

/// Normalized root-mean-square error of `measured` against `reference`,
/// normalized by the peak magnitude of the reference only.
pub fn nrmse(reference: &TimeSeries, measured: &TimeSeries) -> Result<f64, SignalError> {
    if reference.len() != measured.len() {
        return Err(SignalError::LengthMismatch(reference.len(), measured.len()));
    }
    if reference.unit != measured.unit {
        return Err(SignalError::UnitMismatch(reference.unit, measured.unit));
    }
    if reference.dt != measured.dt {
        return Err(SignalError::SampleIntervalMismatch(reference.dt, measured.dt));
    }
    let peak = reference.peak_abs();
    if peak == 0.0 {
        return Err(SignalError::ZeroReference);
    }
    let n = reference.len() as f64;
    let sum_sq: f64 = reference
        .values
        .iter()
        .zip(&measured.values)
        .map(|(r, m)| (r - m) * (r - m))
        .sum();
    Ok((sum_sq / n).sqrt() / peak)
}

/// Linear interpolation onto a uniform grid with interval `dt_new` covering
/// the same duration. The first sample is kept; the last is kept whenever
/// the duration is a multiple of `dt_new`.
pub fn resample(ts: &TimeSeries, dt_new: f64) -> Result<TimeSeries, SignalError> {
    if !(dt_new > 0.0 && dt_new.is_finite()) {
        return Err(SignalError::InvalidInterval(dt_new));
    }
    let n = ts.len();
    let ratio = dt_new / ts.dt;
    let span = (n - 1) as f64 / ratio;
    let rounded = span.round();
    let steps = if (span - rounded).abs() <= 1e-9 * span.max(1.0) {
        rounded
    } else {
        span.floor()
    } as usize;

    let values = (0..=steps)
        .map(|i| {
            if i == steps && (span - rounded).abs() <= 1e-9 * span.max(1.0) {
                return ts.values[n - 1];
            }
            let pos = i as f64 * ratio;
            let mut j = pos.floor();
            let mut frac = pos - j;
            if frac > 1.0 - 1e-12 {
                j += 1.0;
                frac = 0.0;
            }
            let j = j as usize;
            if j >= n - 1 {
                ts.values[n - 1]
            } else if frac == 0.0 {
                ts.values[j]
            } else {
                ts.values[j] + frac * (ts.values[j + 1] - ts.values[j])
            }
        })
        .collect();
    TimeSeries::new(dt_new, values, ts.unit)
}

/// Second-order finite-difference derivative: central differences inside,
/// one-sided three-point stencils at both ends.
pub fn differentiate(ts: &TimeSeries) -> Result<TimeSeries, SignalError> {
    let n = ts.len();
    if n < 3 {
        return Err(SignalError::TooShort(n, 3));
    }
    let unit = ts.unit.per_second().ok_or(SignalError::NoRateUnit(ts.unit))?;
    let v = &ts.values;
    let h2 = 2.0 * ts.dt;
    let mut out = Vec::with_capacity(n);
    out.push((-3.0 * v[0] + 4.0 * v[1] - v[2]) / h2);
    out.extend(v.windows(3).map(|w| (w[2] - w[0]) / h2));
    out.push((3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / h2);
    TimeSeries::new(ts.dt, out, unit)
}

/// Cumulative trapezoidal integral starting from zero.
pub fn integrate(ts: &TimeSeries, unit: Unit) -> TimeSeries {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(ts.len());
    out.push(0.0);
    for w in ts.values.windows(2) {
        acc += 0.5 * ts.dt * (w[0] + w[1]);
        out.push(acc);
    }
    TimeSeries { dt: ts.dt, values: out, unit }
}

/// Removes the least-squares straight line.
pub fn detrend_linear(ts: &TimeSeries) -> TimeSeries {
    let n = ts.len();
    if n < 2 {
        return ts.map(|_| 0.0);
    }
    let nf = n as f64;
    let t_mean = (nf - 1.0) / 2.0;
    let y_mean = ts.values.iter().sum::<f64>() / nf;
    let (mut sty, mut stt) = (0.0, 0.0);
    for (i, y) in ts.values.iter().enumerate() {
        let dt = i as f64 - t_mean;
        sty += dt * (y - y_mean);
        stt += dt * dt;
    }
    let slope = sty / stt;
    TimeSeries {
        dt: ts.dt,
        values: ts
            .values
            .iter()
            .enumerate()
            .map(|(i, y)| y - y_mean - slope * (i as f64 - t_mean))
            .collect(),
        unit: ts.unit,
    }
}
