//! Flat `key = value` scenario files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::lti::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("duplicate key '{0}'")]
    DuplicateKey(String),
    #[error("missing required key '{0}'")]
    MissingKey(String),
    #[error("invalid value for '{key}': {message}")]
    InvalidValue { key: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue { key: key.to_string(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceSource {
    /// `r(t) = amplitude·sin(2π f t)`.
    Sine { amplitude: f64, frequency_hz: f64 },
    /// `r(t) = amplitude` for `t ≥ 0`.
    Step { amplitude: f64 },
    /// Ground-motion record in AT2 format, converted to a displacement.
    Record { path: PathBuf, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantKind {
    Ideal,
    Identified,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameDamping {
    Story { c1: f64, c2: f64 },
    Modal { zeta1: f64, zeta2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    pub m1: f64,
    pub m2: f64,
    pub k1: f64,
    pub k2: f64,
    pub damping: FrameDamping,
}

impl FrameConfig {
    pub fn build(&self) -> Result<crate::structure::TwoDofFrame, crate::structure::StructureError> {
        use crate::structure::TwoDofFrame;
        match self.damping {
            FrameDamping::Story { c1, c2 } => TwoDofFrame::new(self.m1, self.m2, self.k1, self.k2, c1, c2),
            FrameDamping::Modal { zeta1, zeta2 } => {
                TwoDofFrame::with_modal_damping(self.m1, self.m2, self.k1, self.k2, zeta1, zeta2)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub reference: ReferenceSource,
    pub plant: PlantKind,
    pub frame: Option<FrameConfig>,
    /// True table mass used by the simulated plant.
    pub m_t: f64,
    /// Nominal table mass known to the controller.
    pub m_t_nominal: f64,
    pub gamma: f64,
    pub reference_poles: Vec<C64>,
    pub ep: [f64; 2],
    pub er: f64,
    pub dt: f64,
    pub duration: f64,
    pub filter_cutoff_hz: f64,
    pub inner_gain: f64,
    pub leak_pole: f64,
    pub w_hat0: [f64; 3],
    /// Keep `Ŵ` at `w_hat0` for the whole run.
    pub freeze_adaptation: bool,
    pub nrmse_skip_s: f64,
    /// Allows a specimen on the identified plant through a voltage disturbance port.
    pub identified_specimen_extension: bool,
    pub disturbance_gain: f64,
    pub output_path: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            reference: ReferenceSource::Sine { amplitude: 0.01, frequency_hz: 1.0 },
            plant: PlantKind::Ideal,
            frame: None,
            m_t: 100.0,
            m_t_nominal: 100.0,
            gamma: 1e5,
            reference_poles: vec![C64::new(-10.0, 0.0), C64::new(-12.0, 0.0), C64::new(-14.0, 0.0)],
            ep: [1.0, 0.0],
            er: 1.0,
            dt: 1e-4,
            duration: 20.0,
            filter_cutoff_hz: 50.0,
            inner_gain: 200.0,
            leak_pole: 0.05,
            w_hat0: [0.0; 3],
            freeze_adaptation: false,
            nrmse_skip_s: 2.0,
            identified_specimen_extension: false,
            disturbance_gain: 1.0,
            output_path: None,
        }
    }
}

const KEYS: &[&str] = &[
    "reference",
    "amplitude",
    "frequency_hz",
    "record_path",
    "record_scale",
    "plant",
    "m1",
    "m2",
    "k1",
    "k2",
    "c1",
    "c2",
    "zeta1",
    "zeta2",
    "m_t",
    "m_t_nominal",
    "gamma",
    "reference_poles",
    "ep",
    "er",
    "dt",
    "duration",
    "filter_cutoff_hz",
    "inner_gain",
    "leak_pole",
    "w_hat0",
    "freeze_adaptation",
    "nrmse_skip_s",
    "identified_specimen_extension",
    "disturbance_gain",
    "output_path",
];

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = f64::from_str(v.trim()).map_err(|_| invalid(key, format!("'{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(invalid(key, "must be finite"));
    }
    Ok(x)
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|t| parse_f64(key, t)).collect()
}

fn parse_array<const N: usize>(key: &str, v: &str) -> Result<[f64; N], ConfigError> {
    let list = parse_list(key, v)?;
    list.try_into().map_err(|l: Vec<f64>| invalid(key, format!("expected {N} values, got {}", l.len())))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(invalid(key, format!("'{other}' is not a boolean"))),
    }
}

/// A pole is `re` or `re+imj` / `re-imj`.
fn parse_pole(key: &str, token: &str) -> Result<C64, ConfigError> {
    let t = token.trim();
    if let Some(body) = t.strip_suffix('j') {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(i, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
            .map(|(i, _)| i)
            .last()
            .ok_or_else(|| invalid(key, format!("'{t}' is not a complex number")))?;
        let re = parse_f64(key, &body[..split])?;
        let im = parse_f64(key, &body[split..])?;
        Ok(C64::new(re, im))
    } else {
        Ok(C64::new(parse_f64(key, t)?, 0.0))
    }
}

fn fmt_pole(p: &C64) -> String {
    if p.im == 0.0 {
        format!("{:?}", p.re)
    } else if p.im > 0.0 {
        format!("{:?}+{:?}j", p.re, p.im)
    } else {
        format!("{:?}{:?}j", p.re, p.im)
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

impl ScenarioConfig {
    /// Parses config text. Relative paths are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self, ConfigError> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            let k = k.trim().to_string();
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError::UnknownKey(k));
            }
            if entries.iter().any(|(e, _)| *e == k) {
                return Err(ConfigError::DuplicateKey(k));
            }
            entries.push((k, v.trim().to_string()));
        }
        let get = |k: &str| entries.iter().find(|(e, _)| e == k).map(|(_, v)| v.as_str());
        let resolve = |p: &str| -> PathBuf {
            let path = PathBuf::from(p);
            match base_dir {
                Some(b) if path.is_relative() => b.join(path),
                _ => path,
            }
        };

        let mut c = ScenarioConfig::default();
        let num = |k: &str, default: f64| -> Result<f64, ConfigError> { get(k).map_or(Ok(default), |v| parse_f64(k, v)) };

        c.reference = match get("reference").unwrap_or("sine") {
            "sine" => ReferenceSource::Sine { amplitude: num("amplitude", 0.01)?, frequency_hz: num("frequency_hz", 1.0)? },
            "step" => ReferenceSource::Step { amplitude: num("amplitude", 0.01)? },
            "record" => {
                let p = get("record_path").ok_or_else(|| ConfigError::MissingKey("record_path".into()))?;
                ReferenceSource::Record { path: resolve(p), scale: num("record_scale", 1.0)? }
            }
            other => return Err(invalid("reference", format!("'{other}' (expected sine, step or record)"))),
        };
        c.plant = match get("plant").unwrap_or("ideal") {
            "ideal" => PlantKind::Ideal,
            "identified" => PlantKind::Identified,
            other => return Err(invalid("plant", format!("'{other}' (expected ideal or identified)"))),
        };

        let frame_keys = ["m1", "m2", "k1", "k2"];
        let present = frame_keys.iter().filter(|k| get(k).is_some()).count();
        if present != 0 && present != frame_keys.len() {
            let missing = frame_keys.iter().find(|k| get(k).is_none()).unwrap();
            return Err(ConfigError::MissingKey((*missing).into()));
        }
        if present == frame_keys.len() {
            let story = get("c1").is_some() || get("c2").is_some();
            let modal = get("zeta1").is_some() || get("zeta2").is_some();
            if story && modal {
                return Err(invalid("c1", "give either c1/c2 or zeta1/zeta2, not both"));
            }
            let damping = if modal {
                FrameDamping::Modal { zeta1: num("zeta1", 0.0)?, zeta2: num("zeta2", 0.0)? }
            } else {
                FrameDamping::Story { c1: num("c1", 0.0)?, c2: num("c2", 0.0)? }
            };
            c.frame = Some(FrameConfig {
                m1: num("m1", 0.0)?,
                m2: num("m2", 0.0)?,
                k1: num("k1", 0.0)?,
                k2: num("k2", 0.0)?,
                damping,
            });
        } else if let Some(k) = ["c1", "c2", "zeta1", "zeta2"].iter().find(|k| get(k).is_some()) {
            return Err(invalid(k, "damping given without a frame (m1, m2, k1, k2)"));
        }

        c.m_t = num("m_t", c.m_t)?;
        c.m_t_nominal = num("m_t_nominal", c.m_t)?;
        c.gamma = num("gamma", c.gamma)?;
        if let Some(v) = get("reference_poles") {
            c.reference_poles = v.split(',').map(|t| parse_pole("reference_poles", t)).collect::<Result<_, _>>()?;
        }
        if let Some(v) = get("ep") {
            c.ep = parse_array("ep", v)?;
        }
        c.er = num("er", c.er)?;
        c.dt = num("dt", c.dt)?;
        c.duration = num("duration", c.duration)?;
        c.filter_cutoff_hz = num("filter_cutoff_hz", c.filter_cutoff_hz)?;
        c.inner_gain = num("inner_gain", c.inner_gain)?;
        c.leak_pole = num("leak_pole", c.leak_pole)?;
        if let Some(v) = get("w_hat0") {
            c.w_hat0 = parse_array("w_hat0", v)?;
        }
        if let Some(v) = get("freeze_adaptation") {
            c.freeze_adaptation = parse_bool("freeze_adaptation", v)?;
        }
        c.nrmse_skip_s = num("nrmse_skip_s", c.nrmse_skip_s)?;
        if let Some(v) = get("identified_specimen_extension") {
            c.identified_specimen_extension = parse_bool("identified_specimen_extension", v)?;
        }
        c.disturbance_gain = num("disturbance_gain", c.disturbance_gain)?;
        c.output_path = get("output_path").map(resolve);
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text, path.parent())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("dt", self.dt),
            ("duration", self.duration),
            ("gamma", self.gamma),
            ("m_t", self.m_t),
            ("m_t_nominal", self.m_t_nominal),
            ("filter_cutoff_hz", self.filter_cutoff_hz),
            ("inner_gain", self.inner_gain),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(k, format!("{v} must be positive")));
            }
        }
        if !(self.leak_pole >= 0.0) {
            return Err(invalid("leak_pole", "must be non-negative"));
        }
        if !(self.nrmse_skip_s >= 0.0) {
            return Err(invalid("nrmse_skip_s", "must be non-negative"));
        }
        if self.reference_poles.len() != 3 {
            return Err(invalid("reference_poles", format!("expected 3 poles, got {}", self.reference_poles.len())));
        }
        if self.reference_poles.iter().any(|p| !(p.re < 0.0)) {
            return Err(invalid("reference_poles", "poles must have strictly negative real part"));
        }
        if let ReferenceSource::Sine { frequency_hz, .. } = self.reference {
            if !(frequency_hz > 0.0) {
                return Err(invalid("frequency_hz", "must be positive"));
            }
        }
        if self.plant == PlantKind::Identified && self.frame.is_some() && !self.identified_specimen_extension {
            return Err(invalid(
                "plant",
                "the identified table model is bare-table only; set identified_specimen_extension = true to mount a frame",
            ));
        }
        Ok(())
    }

    /// Canonical text form; `parse(serialize())` returns an equal config.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        match &self.reference {
            ReferenceSource::Sine { amplitude, frequency_hz } => {
                kv("reference", "sine".into());
                kv("amplitude", format!("{amplitude:?}"));
                kv("frequency_hz", format!("{frequency_hz:?}"));
            }
            ReferenceSource::Step { amplitude } => {
                kv("reference", "step".into());
                kv("amplitude", format!("{amplitude:?}"));
            }
            ReferenceSource::Record { path, scale } => {
                kv("reference", "record".into());
                kv("record_path", path.display().to_string());
                kv("record_scale", format!("{scale:?}"));
            }
        }
        kv("plant", match self.plant {
            PlantKind::Ideal => "ideal".into(),
            PlantKind::Identified => "identified".into(),
        });
        if let Some(f) = &self.frame {
            kv("m1", format!("{:?}", f.m1));
            kv("m2", format!("{:?}", f.m2));
            kv("k1", format!("{:?}", f.k1));
            kv("k2", format!("{:?}", f.k2));
            match f.damping {
                FrameDamping::Story { c1, c2 } => {
                    kv("c1", format!("{c1:?}"));
                    kv("c2", format!("{c2:?}"));
                }
                FrameDamping::Modal { zeta1, zeta2 } => {
                    kv("zeta1", format!("{zeta1:?}"));
                    kv("zeta2", format!("{zeta2:?}"));
                }
            }
        }
        kv("m_t", format!("{:?}", self.m_t));
        kv("m_t_nominal", format!("{:?}", self.m_t_nominal));
        kv("gamma", format!("{:?}", self.gamma));
        kv("reference_poles", self.reference_poles.iter().map(fmt_pole).collect::<Vec<_>>().join(", "));
        kv("ep", fmt_list(&self.ep));
        kv("er", format!("{:?}", self.er));
        kv("dt", format!("{:?}", self.dt));
        kv("duration", format!("{:?}", self.duration));
        kv("filter_cutoff_hz", format!("{:?}", self.filter_cutoff_hz));
        kv("inner_gain", format!("{:?}", self.inner_gain));
        kv("leak_pole", format!("{:?}", self.leak_pole));
        kv("w_hat0", fmt_list(&self.w_hat0));
        kv("freeze_adaptation", self.freeze_adaptation.to_string());
        kv("nrmse_skip_s", format!("{:?}", self.nrmse_skip_s));
        kv("identified_specimen_extension", self.identified_specimen_extension.to_string());
        kv("disturbance_gain", format!("{:?}", self.disturbance_gain));
        if let Some(p) = &self.output_path {
            kv("output_path", p.display().to_string());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_empty_text() {
        let c = ScenarioConfig::parse("# nothing here\n\n", None).unwrap();
        assert_eq!(c, ScenarioConfig::default());
    }

    #[test]
    fn full_round_trip() {
        let text = "\
reference = record
record_path = /data/RSN1006.AT2
record_scale = 0.5
plant = ideal
m1 = 50
m2 = 40   # top floor
k1 = 4.1e4
k2 = 3.0e4
zeta1 = 0.02
zeta2 = 0.03
m_t = 200
m_t_nominal = 100
gamma = 2.5e4
reference_poles = -10, -12+3j, -12-3j
ep = 1, 0.5
dt = 5e-5
duration = 12
w_hat0 = 0, 0, -90
freeze_adaptation = yes
output_path = /tmp/out.csv
";
        let c = ScenarioConfig::parse(text, None).unwrap();
        assert_eq!(c.reference_poles[1], C64::new(-12.0, 3.0));
        assert_eq!(c.frame.unwrap().damping, FrameDamping::Modal { zeta1: 0.02, zeta2: 0.03 });
        assert!(c.freeze_adaptation);
        let again = ScenarioConfig::parse(&c.serialize(), None).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.serialize(), c.serialize());
    }

    #[test]
    fn nominal_mass_defaults_to_true_mass() {
        let c = ScenarioConfig::parse("m_t = 250", None).unwrap();
        assert_eq!(c.m_t_nominal, 250.0);
    }

    #[test]
    fn relative_paths_follow_the_config() {
        let c = ScenarioConfig::parse("reference = record\nrecord_path = rec.AT2\noutput_path = o.csv", Some(Path::new("/cfg"))).unwrap();
        assert_eq!(c.reference, ReferenceSource::Record { path: "/cfg/rec.AT2".into(), scale: 1.0 });
        assert_eq!(c.output_path, Some(PathBuf::from("/cfg/o.csv")));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ScenarioConfig::parse("bogus = 1", None), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(ScenarioConfig::parse("dt 1", None), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(ScenarioConfig::parse("dt = 1\ndt = 2", None), Err(ConfigError::DuplicateKey(_))));
        assert!(matches!(ScenarioConfig::parse("dt = -1", None), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(ScenarioConfig::parse("gamma = abc", None), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(ScenarioConfig::parse("reference_poles = -1, 2, -3", None), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(ScenarioConfig::parse("m1 = 1", None), Err(ConfigError::MissingKey(_))));
        assert!(matches!(ScenarioConfig::parse("reference = record", None), Err(ConfigError::MissingKey(_))));
        let identified_frame = "plant = identified\nm1 = 1\nm2 = 1\nk1 = 1\nk2 = 1";
        assert!(ScenarioConfig::parse(identified_frame, None).is_err());
        let allowed = format!("{identified_frame}\nidentified_specimen_extension = true");
        assert!(ScenarioConfig::parse(&allowed, None).is_ok());
    }

    #[test]
    fn pole_syntax() {
        assert_eq!(parse_pole("p", "-1.5e1").unwrap(), C64::new(-15.0, 0.0));
        assert_eq!(parse_pole("p", "-2-4j").unwrap(), C64::new(-2.0, -4.0));
        assert_eq!(parse_pole("p", "-1e1+2.5e-1j").unwrap(), C64::new(-10.0, 0.25));
        assert!(parse_pole("p", "j").is_err());
    }
}
