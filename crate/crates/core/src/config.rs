//! JSON configuration.
//!
//! Lengths are millimetres and angles degrees, as on the bench drawings;
//! they are converted to SI once, here. Every key is optional and unknown
//! keys are rejected. Derived keys (`alpha`, `r_g`, `l_t`) may be given,
//! but must then agree with the keys they derive from.
//!
//! ```json
//! {
//!   "vsm": { "k_s": 81700, "R0": 30, "r_tau": 15, "h_s_max": 6, "theta_tau_cap": 30 },
//!   "dtm": { "R": 36, "r": 18, "n1": -100, "n2": 50 },
//!   "gains": { "k_stp": 5, "k_sti": 8, "k_pp": 50, "k_pi": 500 },
//!   "mixing": "consistent",
//!   "dt": 0.001
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{ControllerConfig, ControllerGains, ControllerLimits, MixingMode};
use crate::dtm::{DtmError, DtmParams};
use crate::experiments::{CoupledVsaModel, Setup};
use crate::plant::{
    EncoderQuantization, ExternalTorque, FrictionModel, LoadMode, LoadModel, MotorModel, PlantError,
    PlantParams, SpringLaw,
};
use crate::units::{deg, mm, to_deg, to_mm};
use crate::vsm::{VsmError, VsmParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config key `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn invalid(key: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Curves,
    Calibrate,
    Regulate,
    Torque,
    Decouple,
    Loadshare,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Curves,
        Scenario::Calibrate,
        Scenario::Regulate,
        Scenario::Torque,
        Scenario::Decouple,
        Scenario::Loadshare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Curves => "curves",
            Scenario::Calibrate => "calibrate",
            Scenario::Regulate => "regulate",
            Scenario::Torque => "torque",
            Scenario::Decouple => "decouple",
            Scenario::Loadshare => "loadshare",
        }
    }
}

// ---- file layer: optional keys in file units ----

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VsmFile {
    /// N/m.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_t: Option<f64>,
    #[serde(rename = "R0", skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_s_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_tau_cap: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DtmFile {
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub ring_radius: Option<f64>,
    #[serde(rename = "r", skip_serializing_if = "Option::is_none")]
    pub sun_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n2: Option<f64>,
}

/// Motor keys are SI: s, rad/s, rad/s², kg·m².
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotorFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vel_limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accel_limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotor_inertia: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoadFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<LoadMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inertia: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub viscous: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub external_torque: Option<ExternalTorque>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrictionFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enabled: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coulomb: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub viscous: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainsFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_stp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_sti: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_pp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_pi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_vp1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_vi1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_vp2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_vi2: Option<f64>,
}

/// Loop output bounds, rad/s.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitsFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_pivot_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deflection_rate: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineFile {
    /// N·m/rad³.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deflection_cap: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vsm: Option<VsmFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dtm: Option<DtmFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub motors: Option<[MotorFile; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub load: Option<LoadFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub friction: Option<FrictionFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gains: Option<GainsFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limits: Option<LimitsFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixing: Option<MixingMode>,
    /// s.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoder_quantization: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_pivot: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenarios: Option<Vec<Scenario>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Trial perturbation half-width, degrees.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<f64>,
}

// ---- resolved configuration, SI ----

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub plant: PlantParams,
    pub controller: ControllerConfig,
    pub dt: f64,
    pub encoder_quantization: bool,
    pub constant_pivot: f64,
    pub baseline: CoupledVsaModel,
    pub scenarios: Vec<Scenario>,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub trials: usize,
    pub perturbation: f64,
}

impl Default for Config {
    fn default() -> Self {
        from_file(ConfigFile::default()).expect("defaults are valid")
    }
}

impl Config {
    /// Scenario setup described by this configuration.
    pub fn setup(&self) -> Setup {
        Setup {
            plant: self.plant,
            controller: self.controller,
            dt: self.dt,
            quantization: self.encoder_quantization.then(EncoderQuantization::default),
            constant_pivot: self.constant_pivot,
            trials: self.trials,
            seed: self.seed,
            perturbation: self.perturbation,
            initial_offset: Default::default(),
        }
    }

    /// Fully populated file form.
    pub fn to_file(&self) -> ConfigFile {
        let v = &self.plant.vsm;
        let d = &self.plant.dtm;
        let motor = |m: &MotorModel| MotorFile {
            time_constant: Some(m.time_constant),
            vel_limit: Some(m.vel_limit),
            accel_limit: Some(m.accel_limit),
            rotor_inertia: Some(m.rotor_inertia),
        };
        let g = &self.controller.gains;
        let l = &self.plant.load;
        let f = &self.plant.friction;
        ConfigFile {
            vsm: Some(VsmFile {
                k_s: Some(v.k_s),
                l_t: Some(to_mm(v.l_t)),
                r0: Some(to_mm(v.r0)),
                r_g: Some(to_mm(v.r_g)),
                r_tau: Some(to_mm(v.r_tau)),
                h_s_max: Some(to_mm(v.h_s_max)),
                theta_tau_cap: Some(to_deg(v.theta_tau_cap)),
            }),
            dtm: Some(DtmFile {
                ring_radius: Some(to_mm(d.ring_radius)),
                sun_radius: Some(to_mm(d.sun_radius)),
                alpha: Some(d.alpha()),
                n1: Some(d.n1),
                n2: Some(d.n2),
            }),
            motors: Some([motor(&self.plant.motors[0]), motor(&self.plant.motors[1])]),
            load: Some(LoadFile {
                mode: Some(l.mode),
                inertia: Some(l.inertia),
                viscous: Some(l.viscous),
                external_torque: Some(l.external_torque),
            }),
            friction: Some(FrictionFile {
                enabled: Some(f.enabled),
                coulomb: Some(f.coulomb),
                viscous: Some(f.viscous),
            }),
            gains: Some(GainsFile {
                k_stp: Some(g.k_stp),
                k_sti: Some(g.k_sti),
                k_pp: Some(g.k_pp),
                k_pi: Some(g.k_pi),
                k_vp1: Some(g.k_vp1),
                k_vi1: Some(g.k_vi1),
                k_vp2: Some(g.k_vp2),
                k_vi2: Some(g.k_vi2),
            }),
            limits: Some(LimitsFile {
                max_pivot_rate: Some(self.controller.limits.max_pivot_rate),
                max_deflection_rate: Some(self.controller.limits.max_deflection_rate),
            }),
            mixing: Some(self.controller.mixing),
            dt: Some(self.dt),
            encoder_quantization: Some(self.encoder_quantization),
            constant_pivot: Some(to_mm(self.constant_pivot)),
            baseline: Some(BaselineFile {
                beta: Some(self.baseline.beta),
                deflection_cap: Some(to_deg(self.baseline.deflection_cap)),
            }),
            scenarios: Some(self.scenarios.clone()),
            output_dir: self.output_dir.clone(),
            seed: Some(self.seed),
            trials: Some(self.trials),
            perturbation: Some(to_deg(self.perturbation)),
        }
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<Config, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json_str(&text)
}

pub fn from_json_str(text: &str) -> Result<Config, ConfigError> {
    let file: ConfigFile = serde_json::from_str(text)?;
    from_file(file)
}

pub fn to_json(config: &Config) -> String {
    serde_json::to_string_pretty(&config.to_file()).expect("config serializes")
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be finite and > 0, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be finite and >= 0, got {v}")))
    }
}

fn agrees(key: &str, given: Option<f64>, derived: f64) -> Result<(), ConfigError> {
    match given {
        Some(v) if (v - derived).abs() > 1e-9 * derived.abs().max(1.0) => Err(invalid(
            key,
            format!("given as {v} but the other keys imply {derived}"),
        )),
        _ => Ok(()),
    }
}

fn vsm_from(f: &VsmFile) -> Result<VsmParams, ConfigError> {
    let d = VsmParams::default();
    let r0 = positive("vsm.R0", f.r0.map(mm).unwrap_or(d.r0))?;
    let p = VsmParams {
        k_s: positive("vsm.k_s", f.k_s.unwrap_or(d.k_s))?,
        l_t: positive("vsm.l_t", f.l_t.map(mm).unwrap_or(2.0 * r0))?,
        r0,
        r_g: positive("vsm.r_g", f.r_g.map(mm).unwrap_or(r0 / 2.0))?,
        r_tau: positive("vsm.r_tau", f.r_tau.map(mm).unwrap_or(d.r_tau))?,
        h_s_max: positive("vsm.h_s_max", f.h_s_max.map(mm).unwrap_or(d.h_s_max))?,
        theta_tau_cap: f.theta_tau_cap.map(deg).unwrap_or(d.theta_tau_cap),
    };
    p.validate().map_err(|e| match e {
        VsmError::InvalidParams { name, reason } => invalid(format!("vsm.{name}"), reason),
        other => invalid("vsm", other.to_string()),
    })?;
    Ok(p)
}

fn dtm_from(f: &DtmFile) -> Result<DtmParams, ConfigError> {
    let d = DtmParams::default();
    let p = DtmParams {
        ring_radius: f.ring_radius.map(mm).unwrap_or(d.ring_radius),
        sun_radius: f.sun_radius.map(mm).unwrap_or(d.sun_radius),
        n1: f.n1.unwrap_or(d.n1),
        n2: f.n2.unwrap_or(d.n2),
    };
    p.validate().map_err(|e| match e {
        DtmError::InvalidParams { name, reason } => invalid(format!("dtm.{name}"), reason),
        other => invalid("dtm", other.to_string()),
    })?;
    agrees("dtm.alpha", f.alpha, p.alpha())?;
    Ok(p)
}

fn motor_from(f: &MotorFile, default: MotorModel, index: usize) -> Result<MotorModel, ConfigError> {
    let key = |k: &str| format!("motors[{index}].{k}");
    Ok(MotorModel {
        time_constant: positive(&key("time_constant"), f.time_constant.unwrap_or(default.time_constant))?,
        vel_limit: positive(&key("vel_limit"), f.vel_limit.unwrap_or(default.vel_limit))?,
        accel_limit: positive(&key("accel_limit"), f.accel_limit.unwrap_or(default.accel_limit))?,
        rotor_inertia: positive(&key("rotor_inertia"), f.rotor_inertia.unwrap_or(default.rotor_inertia))?,
    })
}

fn from_file(file: ConfigFile) -> Result<Config, ConfigError> {
    let vsm = vsm_from(&file.vsm.unwrap_or_default())?;
    let dtm = dtm_from(&file.dtm.unwrap_or_default())?;

    let default_motors = MotorModel::defaults_for(&dtm);
    let motors = match &file.motors {
        Some([a, b]) => [motor_from(a, default_motors[0], 0)?, motor_from(b, default_motors[1], 1)?],
        None => default_motors,
    };

    let lf = file.load.unwrap_or_default();
    let ld = LoadModel::default();
    let load = LoadModel {
        mode: lf.mode.unwrap_or(ld.mode),
        inertia: positive("load.inertia", lf.inertia.unwrap_or(ld.inertia))?,
        viscous: non_negative("load.viscous", lf.viscous.unwrap_or(ld.viscous))?,
        external_torque: lf.external_torque.unwrap_or(ld.external_torque),
    };

    let ff = file.friction.unwrap_or_default();
    let fd = FrictionModel::default();
    let friction = FrictionModel {
        enabled: ff.enabled.unwrap_or(fd.enabled),
        coulomb: non_negative("friction.coulomb", ff.coulomb.unwrap_or(fd.coulomb))?,
        viscous: non_negative("friction.viscous", ff.viscous.unwrap_or(fd.viscous))?,
    };

    let bf = file.baseline.unwrap_or_default();
    let bd = CoupledVsaModel::default();
    let baseline = CoupledVsaModel {
        beta: non_negative("baseline.beta", bf.beta.unwrap_or(bd.beta))?,
        deflection_cap: positive("baseline.deflection_cap", bf.deflection_cap.map(deg).unwrap_or(bd.deflection_cap))?,
    };

    let plant = PlantParams {
        vsm,
        dtm,
        motors,
        load,
        friction,
        spring: SpringLaw::Decoupled,
    };
    plant.validate().map_err(|e| match e {
        PlantError::InvalidParams { name, reason } => invalid(name, reason),
        other => invalid("plant", other.to_string()),
    })?;

    let gf = file.gains.unwrap_or_default();
    let gd = ControllerGains::default();
    let gains = ControllerGains {
        k_stp: gf.k_stp.unwrap_or(gd.k_stp),
        k_sti: gf.k_sti.unwrap_or(gd.k_sti),
        k_pp: gf.k_pp.unwrap_or(gd.k_pp),
        k_pi: gf.k_pi.unwrap_or(gd.k_pi),
        k_vp1: gf.k_vp1.unwrap_or(gd.k_vp1),
        k_vi1: gf.k_vi1.unwrap_or(gd.k_vi1),
        k_vp2: gf.k_vp2.unwrap_or(gd.k_vp2),
        k_vi2: gf.k_vi2.unwrap_or(gd.k_vi2),
    };
    gains.validate().map_err(|e| match e {
        crate::control::ControlError::InvalidGains { name, reason } => invalid(format!("gains.{name}"), reason),
        other => invalid("gains", other.to_string()),
    })?;
    let limf = file.limits.unwrap_or_default();
    let limd = ControllerLimits::for_motors(&motors);
    let limits = ControllerLimits {
        max_pivot_rate: positive("limits.max_pivot_rate", limf.max_pivot_rate.unwrap_or(limd.max_pivot_rate))?,
        max_deflection_rate: positive(
            "limits.max_deflection_rate",
            limf.max_deflection_rate.unwrap_or(limd.max_deflection_rate),
        )?,
        max_drive: limd.max_drive,
    };

    let dt = file.dt.unwrap_or(1e-3);
    if !(dt > 0.0 && dt <= crate::plant::MAX_DT) {
        return Err(invalid("dt", format!("must lie in (0, {}] s, got {dt}", crate::plant::MAX_DT)));
    }
    let constant_pivot = file.constant_pivot.map(mm).unwrap_or(mm(30.0));
    if !(constant_pivot >= 0.0 && constant_pivot < vsm.l_t) {
        return Err(invalid("constant_pivot", format!("must lie in [0, l_t) mm, got {}", to_mm(constant_pivot))));
    }
    let trials = file.trials.unwrap_or(5);
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let perturbation = non_negative("perturbation", file.perturbation.unwrap_or(0.5))?.to_radians();
    let scenarios = file.scenarios.unwrap_or_else(|| Scenario::ALL.to_vec());

    Ok(Config {
        plant,
        controller: ControllerConfig {
            gains,
            limits,
            mixing: file.mixing.unwrap_or_default(),
        },
        dt,
        encoder_quantization: file.encoder_quantization.unwrap_or(false),
        constant_pivot,
        baseline,
        scenarios,
        output_dir: file.output_dir,
        seed: file.seed.unwrap_or(7),
        trials,
        perturbation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(e: ConfigError) -> String {
        match e {
            ConfigError::Invalid { key, .. } => key,
            other => panic!("expected a constraint violation, got {other}"),
        }
    }

    #[test]
    fn empty_object_gives_defaults() {
        let c = from_json_str("{}").unwrap();
        assert_eq!(c.plant.vsm.k_s, 81.7e3);
        assert!((c.plant.dtm.ring_radius - 0.036).abs() < 1e-15);
        assert!((c.plant.dtm.sun_radius - 0.018).abs() < 1e-15);
        assert_eq!((c.plant.dtm.n1, c.plant.dtm.n2), (-100.0, 50.0));
        assert_eq!(c, Config::default());
        assert_eq!(c.setup(), Setup::default());
    }

    #[test]
    fn violations_name_the_key() {
        assert_eq!(key_of(from_json_str(r#"{"vsm": {"k_s": -1}}"#).unwrap_err()), "vsm.k_s");
        assert_eq!(key_of(from_json_str(r#"{"dtm": {"R": 18, "r": 36}}"#).unwrap_err()), "dtm.R");
        assert_eq!(key_of(from_json_str(r#"{"dtm": {"alpha": 0.5}}"#).unwrap_err()), "dtm.alpha");
        assert_eq!(key_of(from_json_str(r#"{"vsm": {"r_g": 10}}"#).unwrap_err()), "vsm.r_g");
        assert_eq!(key_of(from_json_str(r#"{"gains": {"k_pp": 0}}"#).unwrap_err()), "gains.k_pp");
        assert_eq!(key_of(from_json_str(r#"{"dt": 0.5}"#).unwrap_err()), "dt");
        assert_eq!(
            key_of(from_json_str(r#"{"motors": [{}, {"vel_limit": 0}]}"#).unwrap_err()),
            "motors[1].vel_limit"
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = from_json_str(r#"{"vsm": {"k_spring": 1}}"#).unwrap_err();
        assert!(matches!(e, ConfigError::Parse(_)));
        assert!(e.to_string().contains("k_spring"));
        assert!(from_json_str(r#"{"colour": "red"}"#).is_err());
    }

    #[test]
    fn derived_geometry_follows_r0() {
        let c = from_json_str(r#"{"vsm": {"R0": 40}}"#).unwrap();
        assert!((c.plant.vsm.l_t - 0.08).abs() < 1e-15);
        assert!((c.plant.vsm.r_g - 0.02).abs() < 1e-15);
    }

    #[test]
    fn round_trip_is_idempotent() {
        let text = r#"{"dtm": {"n1": -80}, "mixing": "paper-literal", "friction": {"enabled": true}, "scenarios": ["torque"]}"#;
        let c = from_json_str(text).unwrap();
        assert_eq!(c.plant.motors[0].vel_limit, 80.0 * crate::plant::NOMINAL_OUTPUT_SPEED);
        let once = to_json(&c);
        let again = to_json(&from_json_str(&once).unwrap());
        assert_eq!(once, again);
        assert_eq!(from_json_str(&once).unwrap(), c);
    }
}
