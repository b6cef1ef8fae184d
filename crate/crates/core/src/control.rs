//! Cascade PI controller.
//!
//! The command pair (desired stiffness, desired torque) is first turned
//! into two angle targets through the mechanism model: a pivot revolution
//! angle and a deflection angle. Two position-loop PIs turn the angle
//! errors into a pivot rate and a deflection rate, the mixer allocates those
//! rates to the two motors through the differential, and one velocity-loop
//! PI per motor produces the drive command.
//!
//! All PI stages are discretized with the trapezoidal rule at the plant
//! step and use conditional integration: the integrator is frozen while the
//! output sits on its bound and the error pushes further into it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dtm::DtmParams;
use crate::plant::{MotorModel, SensorReadings, NOMINAL_OUTPUT_SPEED};
use crate::units::mm;
use crate::vsm::{self, VsmError, VsmParams};

/// Margin below the end of the pivot stroke under which the actuator is
/// still treated as compliant.
pub const RIGID_MARGIN: f64 = 0.1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("torque {tau_d} N·m is not reachable at the requested stiffness (max {max_torque} N·m)")]
    Infeasible { tau_d: f64, max_torque: f64 },
    #[error("invalid command: {0}")]
    InvalidCommand(String),
    #[error("invalid gain `{name}`: {reason}")]
    InvalidGains { name: &'static str, reason: String },
    #[error(transparent)]
    Vsm(#[from] VsmError),
}

/// PI gains of the four loops. Position-loop gains map angle error (rad)
/// to rate (rad/s); velocity-loop gains map motor speed error to drive
/// command, both in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerGains {
    pub k_stp: f64,
    pub k_sti: f64,
    pub k_pp: f64,
    pub k_pi: f64,
    pub k_vp1: f64,
    pub k_vi1: f64,
    pub k_vp2: f64,
    pub k_vi2: f64,
}

impl Default for ControllerGains {
    /// Reference set tuned for the default plant.
    fn default() -> Self {
        Self {
            k_stp: 5.0,
            k_sti: 8.0,
            k_pp: 50.0,
            k_pi: 500.0,
            k_vp1: 9.0,
            k_vi1: 100.0,
            k_vp2: 9.0,
            k_vi2: 100.0,
        }
    }
}

impl ControllerGains {
    pub fn validate(&self) -> Result<(), ControlError> {
        let all = [
            ("k_stp", self.k_stp),
            ("k_sti", self.k_sti),
            ("k_pp", self.k_pp),
            ("k_pi", self.k_pi),
            ("k_vp1", self.k_vp1),
            ("k_vi1", self.k_vi1),
            ("k_vp2", self.k_vp2),
            ("k_vi2", self.k_vi2),
        ];
        for (name, value) in all {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ControlError::InvalidGains {
                    name,
                    reason: format!("must be finite and >= 0, got {value}"),
                });
            }
        }
        for (name, value) in [
            ("k_stp", self.k_stp),
            ("k_pp", self.k_pp),
            ("k_vp1", self.k_vp1),
            ("k_vp2", self.k_vp2),
        ] {
            if value <= 0.0 {
                return Err(ControlError::InvalidGains {
                    name,
                    reason: "each loop needs a positive proportional gain".into(),
                });
            }
        }
        Ok(())
    }
}

/// Output bounds of the loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerLimits {
    /// Bound on the commanded pivot rate, rad/s.
    pub max_pivot_rate: f64,
    /// Bound on the commanded deflection rate, rad/s.
    pub max_deflection_rate: f64,
    /// Bound on each motor drive command, rad/s.
    pub max_drive: [f64; 2],
}

impl ControllerLimits {
    pub fn for_motors(motors: &[MotorModel; 2]) -> Self {
        Self {
            max_pivot_rate: NOMINAL_OUTPUT_SPEED,
            max_deflection_rate: NOMINAL_OUTPUT_SPEED,
            max_drive: [motors[0].vel_limit, motors[1].vel_limit],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixingMode {
    /// Exact inverse of the differential kinematics with a clamped output.
    #[default]
    Consistent,
    /// Motor allocation with the coefficients exactly as printed in the
    /// original control law, kept for comparison runs.
    PaperLiteral,
}

impl std::str::FromStr for MixingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "consistent" => Ok(MixingMode::Consistent),
            "paper-literal" => Ok(MixingMode::PaperLiteral),
            other => Err(format!("unknown mixing mode `{other}`")),
        }
    }
}

/// Desired stiffness (N·m/rad) and desired output torque (N·m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Command {
    pub delta_d: f64,
    pub tau_d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlMode {
    Compliant,
    /// Pivot at the end of its stroke: torque control is off and only the
    /// stiffness loop runs.
    Rigid,
}

/// Angle targets of the position loops, rad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setpoints {
    pub theta_pivot_d: f64,
    pub theta_tau_d: f64,
}

/// Converts a command into angle targets for the decoupled mechanism.
pub fn setpoints(cmd: Command, vsm: &VsmParams) -> Result<Setpoints, ControlError> {
    if cmd.delta_d.is_nan() || cmd.delta_d < 0.0 || !cmd.tau_d.is_finite() {
        return Err(ControlError::InvalidCommand(format!("{cmd:?}")));
    }
    let l_s = vsm::pivot_from_stiffness(cmd.delta_d, vsm)?;
    let theta_pivot_d = vsm::pivot_angle_from_position(l_s, vsm)?;
    let max_torque = if cmd.delta_d.is_infinite() {
        f64::INFINITY
    } else {
        cmd.delta_d * vsm::max_deflection(l_s, vsm)
    };
    if cmd.tau_d.abs() > max_torque * (1.0 + 1e-12) {
        return Err(ControlError::Infeasible {
            tau_d: cmd.tau_d,
            max_torque,
        });
    }
    let theta_tau_d = if cmd.tau_d == 0.0 || cmd.delta_d.is_infinite() {
        0.0
    } else {
        cmd.tau_d / cmd.delta_d
    };
    Ok(Setpoints {
        theta_pivot_d,
        theta_tau_d,
    })
}

pub fn rigid_mode_guard(cmd: Command, vsm: &VsmParams) -> ControlMode {
    match vsm::pivot_from_stiffness(cmd.delta_d, vsm) {
        Ok(l_s) if l_s < vsm.l_t - RIGID_MARGIN => ControlMode::Compliant,
        _ => ControlMode::Rigid,
    }
}

/// Discrete PI with trapezoidal integration and conditional anti-windup.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PiLoop {
    integral: f64,
    prev_error: f64,
    saturated: bool,
}

impl PiLoop {
    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn saturated(&self) -> bool {
        self.saturated
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }

    pub fn update(&mut self, kp: f64, ki: f64, error: f64, dt: f64, bound: f64) -> f64 {
        let candidate = self.integral + ki * dt * 0.5 * (error + self.prev_error);
        self.prev_error = error;
        let raw = kp * error + candidate;
        let out = raw.clamp(-bound, bound);
        self.saturated = out != raw;
        let winding = self.saturated && raw.signum() == error.signum();
        if !winding {
            self.integral = candidate.clamp(-bound, bound);
        }
        out
    }
}

/// Integrator memory of the four loops plus the last targets.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerState {
    pub pivot: PiLoop,
    pub deflection: PiLoop,
    pub velocity: [PiLoop; 2],
    pub last_setpoints: Option<Setpoints>,
}

impl ControllerState {
    pub fn reset(&mut self) {
        *self = Self::default();
    }

    pub fn any_saturated(&self) -> bool {
        self.pivot.saturated
            || self.deflection.saturated
            || self.velocity.iter().any(|l| l.saturated)
    }
}

/// Position-loop PIs: returns `(θ̇_pivot,d, θ̇_τ,d)`.
#[allow(clippy::too_many_arguments)]
pub fn position_loops(
    theta_pivot_d: f64,
    theta_pivot: f64,
    theta_tau_d: f64,
    theta_tau: f64,
    gains: &ControllerGains,
    limits: &ControllerLimits,
    state: &mut ControllerState,
    dt: f64,
) -> (f64, f64) {
    let pivot_rate = state.pivot.update(
        gains.k_stp,
        gains.k_sti,
        theta_pivot_d - theta_pivot,
        dt,
        limits.max_pivot_rate,
    );
    let deflection_rate = state.deflection.update(
        gains.k_pp,
        gains.k_pi,
        theta_tau_d - theta_tau,
        dt,
        limits.max_deflection_rate,
    );
    (pivot_rate, deflection_rate)
}

/// Allocates deflection and pivot rates to motor speed setpoints.
pub fn mix(deflection_rate: f64, pivot_rate: f64, dtm: &DtmParams, mode: MixingMode) -> [f64; 2] {
    let k = dtm.radius_ratio();
    let (ring, sun) = match mode {
        MixingMode::Consistent => {
            // clamped output: θ̇_pos = −θ̇_τ
            let pos_rate = -deflection_rate;
            (pos_rate + k * pivot_rate, pos_rate - pivot_rate)
        }
        MixingMode::PaperLiteral => (deflection_rate - pivot_rate, deflection_rate + k * pivot_rate),
    };
    [dtm.n1 * ring, dtm.n2 * sun]
}

/// Velocity-loop PIs: returns the drive commands `(u1, u2)`.
pub fn velocity_loops(
    omega_d: [f64; 2],
    omega: [f64; 2],
    gains: &ControllerGains,
    limits: &ControllerLimits,
    state: &mut ControllerState,
    dt: f64,
) -> [f64; 2] {
    let kp = [gains.k_vp1, gains.k_vp2];
    let ki = [gains.k_vi1, gains.k_vi2];
    let mut u = [0.0; 2];
    for i in 0..2 {
        u[i] = state.velocity[i].update(kp[i], ki[i], omega_d[i] - omega[i], dt, limits.max_drive[i]);
    }
    u
}

/// Everything one controller update produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub setpoints: Setpoints,
    pub mode: ControlMode,
    pub pivot_rate: f64,
    pub deflection_rate: f64,
    pub omega_d: [f64; 2],
    pub drive: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub gains: ControllerGains,
    pub limits: ControllerLimits,
    pub mixing: MixingMode,
}

impl ControllerConfig {
    pub fn for_motors(motors: &[MotorModel; 2]) -> Self {
        Self {
            gains: ControllerGains::default(),
            limits: ControllerLimits::for_motors(motors),
            mixing: MixingMode::Consistent,
        }
    }
}

/// The full cascade with its own integrator state.
#[derive(Debug, Clone)]
pub struct Controller {
    pub config: ControllerConfig,
    pub vsm: VsmParams,
    pub dtm: DtmParams,
    state: ControllerState,
}

impl Controller {
    pub fn new(config: ControllerConfig, vsm: VsmParams, dtm: DtmParams) -> Result<Self, ControlError> {
        config.gains.validate()?;
        Ok(Self {
            config,
            vsm,
            dtm,
            state: ControllerState::default(),
        })
    }

    pub fn state(&self) -> &ControllerState {
        &self.state
    }

    pub fn reset(&mut self) {
        self.state.reset();
    }

    /// Runs the cascade toward explicit angle targets.
    pub fn track(&mut self, targets: Setpoints, readings: &SensorReadings, dt: f64) -> ControlOutput {
        self.run(targets, ControlMode::Compliant, readings, dt)
    }

    /// Runs the cascade for a stiffness/torque command.
    pub fn update(
        &mut self,
        cmd: Command,
        readings: &SensorReadings,
        dt: f64,
    ) -> Result<ControlOutput, ControlError> {
        let mode = rigid_mode_guard(cmd, &self.vsm);
        let targets = match mode {
            ControlMode::Compliant => setpoints(cmd, &self.vsm)?,
            ControlMode::Rigid => Setpoints {
                theta_pivot_d: vsm::pivot_angle_from_position(self.vsm.l_t, &self.vsm)?,
                theta_tau_d: 0.0,
            },
        };
        Ok(self.run(targets, mode, readings, dt))
    }

    fn run(
        &mut self,
        targets: Setpoints,
        mode: ControlMode,
        readings: &SensorReadings,
        dt: f64,
    ) -> ControlOutput {
        let cfg = self.config;
        let (_, theta_pivot, theta_tau) = readings.kinematics(&self.dtm);
        let (pivot_rate, mut deflection_rate) = position_loops(
            targets.theta_pivot_d,
            theta_pivot,
            targets.theta_tau_d,
            theta_tau,
            &cfg.gains,
            &cfg.limits,
            &mut self.state,
            dt,
        );
        if mode == ControlMode::Rigid {
            self.state.deflection.reset();
            deflection_rate = 0.0;
        }
        let omega_d = mix(deflection_rate, pivot_rate, &self.dtm, cfg.mixing);
        let drive = velocity_loops(
            omega_d,
            [readings.omega_m1, readings.omega_m2],
            &cfg.gains,
            &cfg.limits,
            &mut self.state,
            dt,
        );
        self.state.last_setpoints = Some(targets);
        ControlOutput {
            setpoints: targets,
            mode,
            pivot_rate,
            deflection_rate,
            omega_d,
            drive,
        }
    }
}

/// Pivot position of the stiffness presets used by the torque experiments.
pub fn preset_pivot(high: bool) -> f64 {
    if high {
        mm(45.0)
    } else {
        mm(30.0)
    }
}
