//! Scenario configuration, the closed-loop runner, Bode export and batch execution.

mod batch;
mod bode;
mod config;
mod reference;
mod runner;

pub use batch::{run_batch, scenario_files, BatchOutcome};
pub use bode::{log_grid, named_system, run_bode};
pub use config::{ConfigError, FrameConfig, FrameDamping, PlantKind, ReferenceSource, ScenarioConfig};
pub use reference::{build_reference, grid_points, record_displacement, ReferenceTrajectory};
pub use runner::{run_and_write, run_simulate, NrmseSummary, SimulationRecord};

use std::path::Path;

use crate::signals::{self, TimeSeries, Unit};
use crate::Error;

/// NRMSE of one column of `meas_csv` against the same column of `ref_csv`.
pub fn run_nrmse(ref_csv: &Path, meas_csv: &Path, column: &str) -> Result<f64, Error> {
    let load = |p: &Path| -> Result<TimeSeries, Error> {
        let cols = signals::read_csv(p)?;
        let dt = cols.uniform_dt()?;
        let values = cols
            .get(column)
            .ok_or_else(|| signals::SignalError::SchemaMismatch(format!("{} has no column `{column}`", p.display())))?;
        Ok(TimeSeries::new(dt, values.to_vec(), Unit::Dimensionless)?)
    };
    let r = load(ref_csv)?;
    let m = load(meas_csv)?;
    if r.len() != m.len() {
        return Err(signals::SignalError::LengthMismatch(r.len(), m.len()).into());
    }
    let m = if (r.dt() - m.dt()).abs() <= 1e-9 * r.dt() {
        TimeSeries::new(r.dt(), m.into_values(), Unit::Dimensionless)?
    } else {
        m
    };
    Ok(signals::nrmse(&r, &m)?)
}
