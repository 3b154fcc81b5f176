use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;

use crate::Error;

use super::config::{ConfigError, ScenarioConfig};
use super::runner::{run_and_write, NrmseSummary};

/// Outcome of one scenario in a batch.
#[derive(Debug)]
pub struct BatchOutcome {
    pub config: PathBuf,
    pub output: PathBuf,
    pub result: Result<NrmseSummary, Error>,
}

/// Scenario files (`*.cfg`) in a directory, sorted by name.
pub fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>, ConfigError> {
    let io = |e: std::io::Error| ConfigError::Io { path: dir.display().to_string(), message: e.to_string() };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "cfg") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Runs every scenario in `dir` on `jobs` worker threads. A scenario without
/// `output_path` writes `<stem>.csv` next to its config.
pub fn run_batch(dir: &Path, jobs: usize) -> Result<Vec<BatchOutcome>, Error> {
    let files = scenario_files(dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ConfigError::InvalidValue { key: "jobs".into(), message: e.to_string() })?;
    let outcomes = pool.install(|| {
        files
            .par_iter()
            .map(|path| {
                let default_out = path.with_extension("csv");
                let loaded = ScenarioConfig::load(path).map_err(Error::from);
                let output = loaded
                    .as_ref()
                    .ok()
                    .and_then(|c| c.output_path.clone())
                    .unwrap_or_else(|| default_out.clone());
                let result = loaded.and_then(|mut cfg| {
                    cfg.output_path.get_or_insert(default_out);
                    run_and_write(&cfg).map(|(_, s)| s)
                });
                info!("{}: {}", path.display(), if result.is_ok() { "ok" } else { "failed" });
                BatchOutcome { config: path.clone(), output, result }
            })
            .collect()
    });
    Ok(outcomes)
}
