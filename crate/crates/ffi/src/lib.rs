//! C ABI over the `shaketab` library.
//!
//! Every function returns an [`StStatus`]; on failure the message is kept per
//! thread and can be read with [`st_last_error`]. Handles are opaque and must
//! be released with their matching `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::ptr;

use shaketab::lti::FrequencyResponse;
use shaketab::signals::{self, Columns, GroundMotion, TimeSeries, Unit};
use shaketab::sim::{self, ScenarioConfig, SimulationRecord};
use shaketab::{Error, ExitCode};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Invalid configuration or parameter.
    Config = 3,
    /// Unreadable or inconsistent input data.
    InputData = 4,
    /// A numerical failure such as a diverging run.
    Numerical = 5,
    /// A named column does not exist.
    NotFound = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// NRMSE of displacement, velocity and acceleration.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StNrmse {
    pub displacement: f64,
    pub velocity: f64,
    pub acceleration: f64,
}

/// Scenario configuration.
pub struct StScenario {
    config: ScenarioConfig,
}

/// Logged signals of one finished run.
pub struct StRecord {
    record: SimulationRecord,
    columns: Columns,
}

/// Ground-motion acceleration record, in g.
pub struct StGroundMotion {
    motion: GroundMotion,
    record_id: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: StStatus, message: impl Into<String>) -> StStatus {
    set_error(message);
    status
}

fn from_error(err: Error) -> StStatus {
    let status = match err.exit_code() {
        ExitCode::Success => StStatus::Ok,
        ExitCode::Config => StStatus::Config,
        ExitCode::InputData => StStatus::InputData,
        ExitCode::Numerical => StStatus::Numerical,
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> StStatus) -> StStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == StStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(StStatus::Panic, "panic inside shaketab"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, StStatus> {
    if p.is_null() {
        return Err(fail(StStatus::NullPointer, format!("{name} is null")));
    }
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| fail(StStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(StStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn st_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn st_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn st_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Scenario with every key at its default.
#[no_mangle]
pub unsafe extern "C" fn st_scenario_default(out: *mut *mut StScenario) -> StStatus {
    non_null!(out);
    guard(|| {
        let handle = Box::new(StScenario { config: ScenarioConfig::default() });
        unsafe { *out = Box::into_raw(handle) };
        StStatus::Ok
    })
}

/// Parses `key = value` scenario text. Relative paths resolve against
/// `base_dir`, which may be null.
#[no_mangle]
pub unsafe extern "C" fn st_scenario_parse(
    text: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut StScenario,
) -> StStatus {
    non_null!(out);
    guard(|| {
        let text = match unsafe { str_arg(text, "text") } {
            Ok(t) => t,
            Err(s) => return s,
        };
        let base = if base_dir.is_null() {
            None
        } else {
            match unsafe { str_arg(base_dir, "base_dir") } {
                Ok(b) => Some(PathBuf::from(b)),
                Err(s) => return s,
            }
        };
        match ScenarioConfig::parse(text, base.as_deref()) {
            Ok(config) => {
                unsafe { *out = Box::into_raw(Box::new(StScenario { config })) };
                StStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// Loads a scenario file.
#[no_mangle]
pub unsafe extern "C" fn st_scenario_load(path: *const c_char, out: *mut *mut StScenario) -> StStatus {
    non_null!(out);
    guard(|| {
        let path = match unsafe { str_arg(path, "path") } {
            Ok(p) => p,
            Err(s) => return s,
        };
        match ScenarioConfig::load(Path::new(path)) {
            Ok(config) => {
                unsafe { *out = Box::into_raw(Box::new(StScenario { config })) };
                StStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// Serializes the scenario; free the result with [`st_string_free`].
#[no_mangle]
pub unsafe extern "C" fn st_scenario_to_text(scenario: *const StScenario, out: *mut *mut c_char) -> StStatus {
    non_null!(scenario, out);
    guard(|| {
        let text = unsafe { &*scenario }.config.serialize();
        match CString::new(text) {
            Ok(c) => {
                unsafe { *out = c.into_raw() };
                StStatus::Ok
            }
            Err(_) => fail(StStatus::Config, "serialized scenario contains a NUL byte"),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn st_scenario_free(scenario: *mut StScenario) {
    if !scenario.is_null() {
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// Runs the scenario. The output path in the scenario is ignored; use
/// [`st_record_write_csv`] to save the result.
#[no_mangle]
pub unsafe extern "C" fn st_simulate(scenario: *const StScenario, out: *mut *mut StRecord) -> StStatus {
    non_null!(scenario, out);
    guard(|| match sim::run_simulate(&unsafe { &*scenario }.config) {
        Ok(record) => {
            let columns = record.to_columns();
            unsafe { *out = Box::into_raw(Box::new(StRecord { record, columns })) };
            StStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

#[no_mangle]
pub unsafe extern "C" fn st_record_free(record: *mut StRecord) {
    if !record.is_null() {
        drop(unsafe { Box::from_raw(record) });
    }
}

/// Number of samples per column.
#[no_mangle]
pub unsafe extern "C" fn st_record_len(record: *const StRecord) -> usize {
    if record.is_null() {
        return 0;
    }
    unsafe { &*record }.record.len()
}

/// Borrows a named column. The data stays valid until the record is freed.
#[no_mangle]
pub unsafe extern "C" fn st_record_column(
    record: *const StRecord,
    name: *const c_char,
    data: *mut *const f64,
    len: *mut usize,
) -> StStatus {
    non_null!(record, data, len);
    guard(|| {
        let name = match unsafe { str_arg(name, "name") } {
            Ok(n) => n,
            Err(s) => return s,
        };
        match unsafe { &*record }.columns.get(name) {
            Some(col) => {
                unsafe {
                    *data = col.as_ptr();
                    *len = col.len();
                }
                StStatus::Ok
            }
            None => fail(StStatus::NotFound, format!("no column named '{name}'")),
        }
    })
}

/// NRMSE summary after skipping the first `skip_s` seconds.
#[no_mangle]
pub unsafe extern "C" fn st_record_nrmse(record: *const StRecord, skip_s: f64, out: *mut StNrmse) -> StStatus {
    non_null!(record, out);
    guard(|| match unsafe { &*record }.record.nrmse_summary(skip_s) {
        Ok(s) => {
            unsafe {
                *out = StNrmse { displacement: s.displacement, velocity: s.velocity, acceleration: s.acceleration };
            }
            StStatus::Ok
        }
        Err(e) => from_error(e.into()),
    })
}

#[no_mangle]
pub unsafe extern "C" fn st_record_write_csv(record: *const StRecord, path: *const c_char) -> StStatus {
    non_null!(record);
    guard(|| {
        let path = match unsafe { str_arg(path, "path") } {
            Ok(p) => p,
            Err(s) => return s,
        };
        match signals::write_csv(&unsafe { &*record }.columns, Path::new(path)) {
            Ok(()) => StStatus::Ok,
            Err(e) => from_error(e.into()),
        }
    })
}

/// Reads a PEER AT2 record.
#[no_mangle]
pub unsafe extern "C" fn st_ground_motion_load(path: *const c_char, out: *mut *mut StGroundMotion) -> StStatus {
    non_null!(out);
    guard(|| {
        let path = match unsafe { str_arg(path, "path") } {
            Ok(p) => p,
            Err(s) => return s,
        };
        match signals::load_at2(Path::new(path)) {
            Ok(motion) => {
                let record_id = CString::new(motion.record_id.replace('\0', " ")).unwrap_or_default();
                unsafe { *out = Box::into_raw(Box::new(StGroundMotion { motion, record_id })) };
                StStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn st_ground_motion_free(motion: *mut StGroundMotion) {
    if !motion.is_null() {
        drop(unsafe { Box::from_raw(motion) });
    }
}

/// Sample interval in seconds, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn st_ground_motion_dt(motion: *const StGroundMotion) -> f64 {
    if motion.is_null() {
        return 0.0;
    }
    unsafe { &*motion }.motion.accel.dt()
}

/// Record id, valid until the handle is freed.
#[no_mangle]
pub unsafe extern "C" fn st_ground_motion_id(motion: *const StGroundMotion) -> *const c_char {
    if motion.is_null() {
        return ptr::null();
    }
    unsafe { &*motion }.record_id.as_ptr()
}

/// Borrows the acceleration samples (g).
#[no_mangle]
pub unsafe extern "C" fn st_ground_motion_samples(
    motion: *const StGroundMotion,
    data: *mut *const f64,
    len: *mut usize,
) -> StStatus {
    non_null!(motion, data, len);
    guard(|| {
        let values = unsafe { &*motion }.motion.accel.values();
        unsafe {
            *data = values.as_ptr();
            *len = values.len();
        }
        StStatus::Ok
    })
}

/// NRMSE of `measured` against `reference`, both of length `n`.
#[no_mangle]
pub unsafe extern "C" fn st_nrmse(reference: *const f64, measured: *const f64, n: usize, out: *mut f64) -> StStatus {
    non_null!(reference, measured, out);
    guard(|| {
        let r = unsafe { std::slice::from_raw_parts(reference, n) }.to_vec();
        let m = unsafe { std::slice::from_raw_parts(measured, n) }.to_vec();
        let result = TimeSeries::new(1.0, r, Unit::Dimensionless)
            .and_then(|r| Ok((r, TimeSeries::new(1.0, m, Unit::Dimensionless)?)))
            .and_then(|(r, m)| signals::nrmse(&r, &m));
        match result {
            Ok(v) => {
                unsafe { *out = v };
                StStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// Magnitude and phase (rad) of `vd`, `va` or `butterworth` at `omega` rad/s.
/// `cutoff_hz` only applies to `butterworth`.
#[no_mangle]
pub unsafe extern "C" fn st_freq_response(
    system: *const c_char,
    cutoff_hz: f64,
    omega: f64,
    magnitude: *mut f64,
    phase: *mut f64,
) -> StStatus {
    non_null!(magnitude, phase);
    guard(|| {
        let name = match unsafe { str_arg(system, "system") } {
            Ok(n) => n,
            Err(s) => return s,
        };
        let h = match sim::named_system(name, cutoff_hz).and_then(|tf| Ok(tf.freq_response(omega)?)) {
            Ok(h) => h,
            Err(e) => return from_error(e),
        };
        unsafe {
            *magnitude = h.norm();
            *phase = h.arg();
        }
        StStatus::Ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_codes_follow_exit_codes() {
        assert_eq!(from_error(Error::NonFiniteState { t: 0.5 }), StStatus::Numerical);
        assert_eq!(from_error(Error::UnknownSystem("q".into())), StStatus::Config);
        assert_eq!(from_error(signals::SignalError::ZeroReference.into()), StStatus::InputData);
        let msg = unsafe { CStr::from_ptr(st_last_error()) }.to_str().unwrap().to_string();
        assert!(!msg.is_empty());
    }

    #[test]
    fn panics_stop_at_the_boundary() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, StStatus::Panic);
    }
}
