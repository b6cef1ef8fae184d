//! Time-domain model of the two-motor actuator.
//!
//! Each motor is a velocity-tracking drive: its shaft speed follows the
//! drive command through a first-order lag, bounded by a speed limit and an
//! acceleration budget. Part of that budget is consumed by the load torque
//! reflected to the shaft, so a drive accelerates more slowly against the
//! spring than with it. Motor speeds go through the gear ratios into the
//! ring and sun, the differential mixes them into `θ_pos` and `θ_pivot`, and
//! the spring law turns the deflection `θ_o − θ_pos` into output torque.
//!
//! Integration is fixed-step semi-implicit Euler: velocities first, then
//! angles from the new velocities.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dtm::{self, DtmParams, DtmError};
use crate::experiments::CoupledVsaModel;
use crate::units::{deg, RPM};
use crate::vsm::{self, Stiffness, VsmError, VsmParams};

/// Nominal output speed at constant stiffness (43 rpm).
pub const NOMINAL_OUTPUT_SPEED: f64 = 43.0 * RPM;

/// Largest admissible integration step, s.
pub const MAX_DT: f64 = 0.01;

/// Half-width of the velocity band over which Coulomb friction ramps
/// linearly through zero, rad/s.
const STICTION_BAND: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlantError {
    #[error("time step {0} s outside (0, {MAX_DT}] s")]
    TimeStep(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid plant parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },
    #[error(transparent)]
    Vsm(#[from] VsmError),
    #[error(transparent)]
    Dtm(#[from] DtmError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotorModel {
    /// Velocity lag time constant, s.
    pub time_constant: f64,
    /// Shaft speed limit, rad/s.
    pub vel_limit: f64,
    /// Unloaded acceleration limit, rad/s².
    pub accel_limit: f64,
    /// Rotor inertia seen at the shaft, kg·m².
    pub rotor_inertia: f64,
}

impl MotorModel {
    /// Drive whose speed limit maps to the nominal output speed through
    /// `ratio`, with an acceleration limit of ten times the speed limit per
    /// second.
    pub fn for_ratio(ratio: f64, rotor_inertia: f64) -> Self {
        let vel_limit = ratio.abs() * NOMINAL_OUTPUT_SPEED;
        Self {
            time_constant: 0.02,
            vel_limit,
            accel_limit: 10.0 * vel_limit,
            rotor_inertia,
        }
    }

    /// Reference drives for the default differential: motor 1 on the ring,
    /// motor 2 on the sun.
    pub fn defaults_for(dtm: &DtmParams) -> [MotorModel; 2] {
        [Self::for_ratio(dtm.n1, 2.0e-4), Self::for_ratio(dtm.n2, 4.0e-4)]
    }

    /// Shaft torque available before the load eats the whole acceleration
    /// budget.
    pub fn peak_torque(&self) -> f64 {
        self.rotor_inertia * self.accel_limit
    }

    fn validate(&self, name: &'static str) -> Result<(), PlantError> {
        let ok = [self.time_constant, self.vel_limit, self.accel_limit, self.rotor_inertia]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if ok {
            Ok(())
        } else {
            Err(PlantError::InvalidParams {
                name,
                reason: format!("all motor constants must be finite and > 0: {self:?}"),
            })
        }
    }

    /// Advances the shaft speed by one step toward `drive` under load torque
    /// `load` (the torque the motor must deliver).
    fn advance(&self, omega: f64, drive: f64, load: f64, dt: f64) -> f64 {
        let demand = (drive - omega) / self.time_constant;
        let bias = load / self.rotor_inertia;
        let accel = demand.clamp(-self.accel_limit - bias, self.accel_limit - bias);
        (omega + accel * dt).clamp(-self.vel_limit, self.vel_limit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadMode {
    /// Output link fixed to the bench.
    Clamped,
    /// Output link is a free rotational inertia.
    Inertial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExternalTorque {
    #[default]
    None,
    Constant { torque: f64 },
    Sine { amplitude: f64, frequency: f64 },
}

impl ExternalTorque {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            ExternalTorque::None => 0.0,
            ExternalTorque::Constant { torque } => torque,
            ExternalTorque::Sine { amplitude, frequency } => {
                amplitude * (2.0 * std::f64::consts::PI * frequency * t).sin()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadModel {
    pub mode: LoadMode,
    /// kg·m², used in inertial mode.
    pub inertia: f64,
    /// N·m·s/rad, used in inertial mode.
    pub viscous: f64,
    pub external_torque: ExternalTorque,
}

impl Default for LoadModel {
    fn default() -> Self {
        Self {
            mode: LoadMode::Clamped,
            inertia: 0.05,
            viscous: 0.1,
            external_torque: ExternalTorque::None,
        }
    }
}

/// Friction acting across the deflection, between the internal gear and
/// the output block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionModel {
    pub enabled: bool,
    /// N·m.
    pub coulomb: f64,
    /// N·m·s/rad.
    pub viscous: f64,
}

impl Default for FrictionModel {
    fn default() -> Self {
        Self {
            enabled: false,
            coulomb: 0.15,
            viscous: 0.02,
        }
    }
}

impl FrictionModel {
    /// Friction torque opposing a deflection rate.
    pub fn torque(&self, deflection_rate: f64) -> f64 {
        if !self.enabled {
            return 0.0;
        }
        let coulomb = self.coulomb * (deflection_rate / STICTION_BAND).clamp(-1.0, 1.0);
        coulomb + self.viscous * deflection_rate
    }
}

/// Elastic element between the internal gear and the output.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SpringLaw {
    /// Linear torque–deflection law with pivot-set stiffness.
    #[default]
    Decoupled,
    /// Deflection-dependent comparison law.
    Coupled(CoupledVsaModel),
}

impl SpringLaw {
    /// Spring torque at a deflection inside the admissible range.
    pub fn torque(&self, theta_tau: f64, l_s: f64, vsm: &VsmParams) -> f64 {
        match self {
            SpringLaw::Decoupled => match vsm::stiffness(l_s, vsm) {
                Stiffness::Finite(delta) => delta * theta_tau,
                Stiffness::Rigid => 0.0,
            },
            SpringLaw::Coupled(model) => model.torque(theta_tau, l_s, vsm),
        }
    }

    pub fn max_deflection(&self, l_s: f64, vsm: &VsmParams) -> f64 {
        match self {
            SpringLaw::Decoupled => vsm::max_deflection(l_s, vsm),
            SpringLaw::Coupled(model) => model.max_deflection(l_s, vsm),
        }
    }

    pub fn energy(&self, theta_tau: f64, l_s: f64, vsm: &VsmParams) -> f64 {
        match self {
            SpringLaw::Decoupled => match vsm::stiffness(l_s, vsm) {
                Stiffness::Finite(delta) => 0.5 * delta * theta_tau * theta_tau,
                Stiffness::Rigid => 0.0,
            },
            SpringLaw::Coupled(model) => model.energy(theta_tau, l_s, vsm),
        }
    }

    /// `∂E/∂l_s` at fixed deflection: the force the pivot must be held against.
    pub fn pivot_force(&self, theta_tau: f64, l_s: f64, vsm: &VsmParams) -> f64 {
        // both laws share the quadratic term with the lever-ratio stiffness
        0.5 * theta_tau * theta_tau * vsm::stiffness_slope(l_s, vsm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantParams {
    pub vsm: VsmParams,
    pub dtm: DtmParams,
    pub motors: [MotorModel; 2],
    pub load: LoadModel,
    pub friction: FrictionModel,
    pub spring: SpringLaw,
}

impl Default for PlantParams {
    fn default() -> Self {
        let dtm = DtmParams::default();
        Self {
            vsm: VsmParams::default(),
            dtm,
            motors: MotorModel::defaults_for(&dtm),
            load: LoadModel::default(),
            friction: FrictionModel::default(),
            spring: SpringLaw::Decoupled,
        }
    }
}

impl PlantParams {
    pub fn validate(&self) -> Result<(), PlantError> {
        self.vsm.validate()?;
        self.dtm.validate()?;
        self.motors[0].validate("motor1")?;
        self.motors[1].validate("motor2")?;
        if self.load.mode == LoadMode::Inertial && !(self.load.inertia > 0.0) {
            return Err(PlantError::InvalidParams {
                name: "load.inertia",
                reason: format!("must be > 0 in inertial mode, got {}", self.load.inertia),
            });
        }
        if !(self.load.viscous >= 0.0) {
            return Err(PlantError::InvalidParams {
                name: "load.viscous",
                reason: format!("must be >= 0, got {}", self.load.viscous),
            });
        }
        if !(self.friction.coulomb >= 0.0 && self.friction.viscous >= 0.0) {
            return Err(PlantError::InvalidParams {
                name: "friction",
                reason: "coefficients must be >= 0".into(),
            });
        }
        if let SpringLaw::Coupled(m) = self.spring {
            if !(m.beta >= 0.0) {
                return Err(PlantError::InvalidParams {
                    name: "coupled.beta",
                    reason: format!("must be >= 0, got {}", m.beta),
                });
            }
        }
        Ok(())
    }
}

/// Full kinematic state. The fields after `omega_o` are derived and kept in
/// sync by the integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorState {
    pub omega_m1: f64,
    pub omega_m2: f64,
    pub theta_r: f64,
    pub theta_s: f64,
    pub theta_o: f64,
    pub omega_o: f64,

    pub theta_pos: f64,
    pub theta_pivot: f64,
    pub l_s: f64,
    /// `θ_o − θ_pos`.
    pub theta_tau: f64,
    /// Torque transmitted to the output, spring plus friction, N·m.
    pub tau: f64,
    /// The deflection sits on its hard stop.
    pub stop_contact: bool,
}

impl ActuatorState {
    /// Motors at rest with the given output-side coordinates.
    pub fn at_rest(theta_pos: f64, theta_pivot: f64, theta_o: f64, params: &PlantParams) -> Self {
        let (theta_r, theta_s) = dtm::inverse(theta_pos, theta_pivot, &params.dtm);
        let mut state = Self {
            omega_m1: 0.0,
            omega_m2: 0.0,
            theta_r,
            theta_s,
            theta_o,
            omega_o: 0.0,
            theta_pos: 0.0,
            theta_pivot: 0.0,
            l_s: 0.0,
            theta_tau: 0.0,
            tau: 0.0,
            stop_contact: false,
        };
        state.refresh(params);
        state
    }

    /// Undeflected and at rest with the pivot at `l_s`.
    pub fn with_pivot_position(l_s: f64, params: &PlantParams) -> Result<Self, PlantError> {
        let theta_pivot = vsm::pivot_angle_from_position(l_s, &params.vsm)?;
        Ok(Self::at_rest(0.0, theta_pivot, 0.0, params))
    }

    pub fn ring_velocity(&self, dtm: &DtmParams) -> f64 {
        self.omega_m1 / dtm.n1
    }

    pub fn sun_velocity(&self, dtm: &DtmParams) -> f64 {
        self.omega_m2 / dtm.n2
    }

    /// `(θ̇_pos, θ̇_pivot)`.
    pub fn output_side_velocity(&self, dtm: &DtmParams) -> (f64, f64) {
        dtm::forward(self.ring_velocity(dtm), self.sun_velocity(dtm), dtm)
    }

    pub fn deflection_rate(&self, dtm: &DtmParams) -> f64 {
        self.omega_o - self.output_side_velocity(dtm).0
    }

    /// Generalized forces the drives must supply along `(θ_pos, θ_pivot)`.
    pub fn generalized_forces(&self, params: &PlantParams) -> (f64, f64) {
        let q_pos = -self.tau;
        let dls = params.vsm.r0 * self.theta_pivot.sin();
        let q_pivot = params.spring.pivot_force(self.theta_tau, self.l_s, &params.vsm) * dls;
        (q_pos, q_pivot)
    }

    /// Torques the drives must apply to the ring and the sun.
    pub fn gear_torques(&self, params: &PlantParams) -> (f64, f64) {
        let (q_pos, q_pivot) = self.generalized_forces(params);
        let alpha = params.dtm.alpha();
        let ring = alpha * (q_pos + q_pivot);
        let sun = params.dtm.beta() * q_pos - alpha * q_pivot;
        (ring, sun)
    }

    /// Shaft torques of the two motors.
    pub fn motor_torques(&self, params: &PlantParams) -> [f64; 2] {
        let (ring, sun) = self.gear_torques(params);
        [ring / params.dtm.n1, sun / params.dtm.n2]
    }

    pub fn elastic_energy(&self, params: &PlantParams) -> f64 {
        params.spring.energy(self.theta_tau, self.l_s, &params.vsm)
    }

    /// Independent state variables, for comparing runs.
    pub fn core(&self) -> [f64; 6] {
        [
            self.theta_r,
            self.theta_s,
            self.theta_o,
            self.omega_m1,
            self.omega_m2,
            self.omega_o,
        ]
    }

    fn is_finite(&self) -> bool {
        self.core().iter().all(|v| v.is_finite())
    }

    /// Recomputes the derived fields from the independent ones.
    pub fn refresh(&mut self, params: &PlantParams) {
        let (pos, pivot) = dtm::forward(self.theta_r, self.theta_s, &params.dtm);
        self.theta_pos = pos;
        self.theta_pivot = pivot;
        self.l_s = vsm::pivot_position(pivot, &params.vsm);
        self.theta_tau = self.theta_o - pos;
        let spring = params.spring.torque(self.theta_tau, self.l_s, &params.vsm);
        self.tau = spring + params.friction.torque(self.deflection_rate(&params.dtm));
    }

    /// Enforces the deflection limit as an inelastic stop.
    fn apply_hard_stop(&mut self, params: &PlantParams) {
        let limit = params.spring.max_deflection(self.l_s, &params.vsm);
        if self.theta_tau.abs() <= limit {
            self.stop_contact = false;
            return;
        }
        let side = self.theta_tau.signum();
        let dtm = &params.dtm;
        match params.load.mode {
            LoadMode::Clamped => {
                // stall the common mode of the gears against the stop
                let shift = self.theta_tau - side * limit;
                self.theta_r += shift;
                self.theta_s += shift;
                let (pos_rate, _) = self.output_side_velocity(dtm);
                if (self.omega_o - pos_rate) * side > 0.0 {
                    let ring = self.ring_velocity(dtm) - pos_rate;
                    let sun = self.sun_velocity(dtm) - pos_rate;
                    self.omega_m1 = ring * dtm.n1;
                    self.omega_m2 = sun * dtm.n2;
                }
            }
            LoadMode::Inertial => {
                // the output link is dragged along by the stop
                self.theta_o = self.theta_pos + side * limit;
                let (pos_rate, _) = self.output_side_velocity(dtm);
                if (self.omega_o - pos_rate) * side > 0.0 {
                    self.omega_o = pos_rate;
                }
            }
        }
        self.refresh(params);
        self.stop_contact = true;
    }
}

/// Encoder quantization applied at the measured motor shafts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncoderQuantization {
    /// Angle per pulse, rad.
    pub resolution: f64,
}

impl Default for EncoderQuantization {
    fn default() -> Self {
        Self {
            resolution: deg(8.8e-2),
        }
    }
}

impl EncoderQuantization {
    /// Floors an angle onto the pulse grid.
    pub fn quantize(&self, angle: f64) -> f64 {
        (angle / self.resolution).floor() * self.resolution
    }
}

/// What the controller sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorReadings {
    /// Motor shaft angles, rad.
    pub theta_m1: f64,
    pub theta_m2: f64,
    pub omega_m1: f64,
    pub omega_m2: f64,
    /// Output link angle, known from the bench fixture.
    pub theta_o: f64,
    pub omega_o: f64,
}

impl SensorReadings {
    pub fn gear_angles(&self, dtm: &DtmParams) -> (f64, f64) {
        (self.theta_m1 / dtm.n1, self.theta_m2 / dtm.n2)
    }

    /// `(θ_pos, θ_pivot, θ_τ)` reconstructed from the readings.
    pub fn kinematics(&self, dtm: &DtmParams) -> (f64, f64, f64) {
        let (theta_r, theta_s) = self.gear_angles(dtm);
        let (pos, pivot) = dtm::forward(theta_r, theta_s, dtm);
        (pos, pivot, self.theta_o - pos)
    }
}

pub fn measure(
    state: &ActuatorState,
    quantization: Option<EncoderQuantization>,
    dtm: &DtmParams,
) -> SensorReadings {
    let mut theta_m1 = state.theta_r * dtm.n1;
    let mut theta_m2 = state.theta_s * dtm.n2;
    if let Some(q) = quantization {
        theta_m1 = q.quantize(theta_m1);
        theta_m2 = q.quantize(theta_m2);
    }
    SensorReadings {
        theta_m1,
        theta_m2,
        omega_m1: state.omega_m1,
        omega_m2: state.omega_m2,
        theta_o: state.theta_o,
        omega_o: state.omega_o,
    }
}

/// Advances the plant by one step under motor drive commands `drive` at
/// time `t`.
pub fn step(
    state: &ActuatorState,
    drive: [f64; 2],
    params: &PlantParams,
    t: f64,
    dt: f64,
) -> Result<ActuatorState, PlantError> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(PlantError::TimeStep(dt));
    }
    if !state.is_finite() {
        return Err(PlantError::NonFinite("state"));
    }
    if !(drive[0].is_finite() && drive[1].is_finite()) {
        return Err(PlantError::NonFinite("drive commands"));
    }

    let loads = state.motor_torques(params);
    let mut next = *state;
    next.omega_m1 = params.motors[0].advance(state.omega_m1, drive[0], loads[0], dt);
    next.omega_m2 = params.motors[1].advance(state.omega_m2, drive[1], loads[1], dt);
    next.theta_r += next.ring_velocity(&params.dtm) * dt;
    next.theta_s += next.sun_velocity(&params.dtm) * dt;

    match params.load.mode {
        LoadMode::Clamped => next.omega_o = 0.0,
        LoadMode::Inertial => {
            let load = &params.load;
            let accel =
                (-state.tau - load.viscous * state.omega_o + load.external_torque.at(t)) / load.inertia;
            next.omega_o += accel * dt;
            next.theta_o += next.omega_o * dt;
        }
    }

    next.refresh(params);
    next.apply_hard_stop(params);
    if !next.is_finite() {
        return Err(PlantError::NonFinite("integrated state"));
    }
    Ok(next)
}

/// Owns a state, the simulation clock and the work done by the drives.
#[derive(Debug, Clone)]
pub struct Plant {
    pub params: PlantParams,
    state: ActuatorState,
    time: f64,
    motor_work: f64,
}

impl Plant {
    pub fn new(params: PlantParams, initial: ActuatorState) -> Result<Self, PlantError> {
        params.validate()?;
        let mut state = initial;
        state.refresh(&params);
        Ok(Self {
            params,
            state,
            time: 0.0,
            motor_work: 0.0,
        })
    }

    pub fn state(&self) -> &ActuatorState {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Work done by the two drives on the mechanism since construction, J.
    pub fn motor_work(&self) -> f64 {
        self.motor_work
    }

    pub fn measure(&self, quantization: Option<EncoderQuantization>) -> SensorReadings {
        measure(&self.state, quantization, &self.params.dtm)
    }

    pub fn step(&mut self, drive: [f64; 2], dt: f64) -> Result<&ActuatorState, PlantError> {
        let next = step(&self.state, drive, &self.params, self.time, dt)?;
        // trapezoidal work along the generalized coordinates
        let (q0_pos, q0_piv) = self.state.generalized_forces(&self.params);
        let (q1_pos, q1_piv) = next.generalized_forces(&self.params);
        let d_pos = next.theta_pos - self.state.theta_pos;
        let d_piv = next.theta_pivot - self.state.theta_pivot;
        self.motor_work += 0.5 * ((q0_pos + q1_pos) * d_pos + (q0_piv + q1_piv) * d_piv);
        self.state = next;
        self.time += dt;
        Ok(&self.state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{mm, to_deg};

    fn params() -> PlantParams {
        PlantParams::default()
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let p = params();
        let s = ActuatorState::at_rest(0.0, 0.0, 0.0, &p);
        let next = step(&s, [0.0, 0.0], &p, 0.0, 1e-3).unwrap();
        assert_eq!(next, s);
    }

    #[test]
    fn default_speed_limits_match_nominal_output_speed() {
        let p = params();
        assert!((p.motors[0].vel_limit / 100.0 - NOMINAL_OUTPUT_SPEED).abs() < 1e-12);
        assert!((p.motors[1].vel_limit / 50.0 - NOMINAL_OUTPUT_SPEED).abs() < 1e-12);
        assert_eq!(p.motors[0].accel_limit, 10.0 * p.motors[0].vel_limit);
        // twice the nominal torque fits inside both acceleration budgets
        let mut s = ActuatorState::at_rest(0.0, 0.0, 0.0, &p);
        s.tau = 2.0 * 55.7;
        for (m, t) in p.motors.iter().zip(s.motor_torques(&p)) {
            assert!(t.abs() < m.peak_torque());
        }
    }

    #[test]
    fn common_mode_drive_winds_the_spring_into_the_stop() {
        let p = params();
        let mut plant = Plant::new(p, ActuatorState::with_pivot_position(mm(45.0), &p).unwrap()).unwrap();
        let pivot0 = plant.state().theta_pivot;
        // gear-side 0.5 rad/s toward negative θ_pos, i.e. positive deflection
        let w = -0.5;
        let drive = [w * p.dtm.n1, w * p.dtm.n2];
        let mut prev = 0.0;
        let mut touched = false;
        for _ in 0..2000 {
            plant.step(drive, 1e-3).unwrap();
            let s = plant.state();
            touched |= s.stop_contact;
            // stalled on the stop, the load eats unevenly into the two
            // acceleration budgets and the pivot creeps
            let tol = if touched { 0.1 } else { 1e-12 };
            assert!((s.theta_pivot - pivot0).abs() < tol);
            let limit = vsm::max_deflection(s.l_s, &p.vsm);
            assert!(s.theta_tau <= limit * (1.0 + 1e-12));
            if !touched {
                assert!(s.theta_tau >= prev - 1e-15);
            }
            prev = s.theta_tau;
        }
        let s = plant.state();
        assert!(touched);
        assert!((s.theta_tau - vsm::max_deflection(s.l_s, &p.vsm)).abs() < 1e-3);
    }

    #[test]
    fn quasi_static_ramp_reproduces_spring_torque() {
        let p = params();
        let mut plant = Plant::new(p, ActuatorState::with_pivot_position(mm(30.0), &p).unwrap()).unwrap();
        let target = deg(10.0);
        let w = -target / 2.0;
        let drive = [w * p.dtm.n1, w * p.dtm.n2];
        while plant.state().theta_tau < target - w.abs() * 0.021 {
            plant.step(drive, 1e-3).unwrap();
        }
        for _ in 0..500 {
            plant.step([0.0, 0.0], 1e-3).unwrap();
        }
        let s = plant.state();
        let expected = vsm::torque(s.theta_tau, s.l_s, &p.vsm).unwrap();
        assert!((s.tau - expected).abs() < 1e-6);
        assert!((to_deg(s.theta_tau) - 10.0).abs() < 0.1, "{}", to_deg(s.theta_tau));
    }

    #[test]
    fn rejects_bad_steps_and_inputs() {
        let p = params();
        let s = ActuatorState::at_rest(0.0, 0.0, 0.0, &p);
        assert!(matches!(step(&s, [0.0; 2], &p, 0.0, 0.0), Err(PlantError::TimeStep(_))));
        assert!(matches!(step(&s, [0.0; 2], &p, 0.0, 0.02), Err(PlantError::TimeStep(_))));
        assert!(matches!(
            step(&s, [f64::NAN, 0.0], &p, 0.0, 1e-3),
            Err(PlantError::NonFinite(_))
        ));
        let mut bad = s;
        bad.theta_r = f64::INFINITY;
        assert!(step(&bad, [0.0; 2], &p, 0.0, 1e-3).is_err());
    }

    #[test]
    fn quantization_examples() {
        let q = EncoderQuantization::default();
        assert!((to_deg(q.quantize(deg(0.1))) - 0.088).abs() < 1e-12);
        assert!((to_deg(q.quantize(deg(-0.05))) + 0.088).abs() < 1e-12);
        let p = params();
        let mut s = ActuatorState::at_rest(0.3, 1.0, 0.0, &p);
        s.omega_m1 = 3.0;
        let r = measure(&s, None, &p.dtm);
        assert_eq!(r.theta_m1 / p.dtm.n1, s.theta_r);
        assert_eq!(r.omega_m1, 3.0);
        let (pos, pivot, tau) = r.kinematics(&p.dtm);
        assert!((pos - s.theta_pos).abs() < 1e-15);
        assert!((pivot - s.theta_pivot).abs() < 1e-15);
        assert!((tau - s.theta_tau).abs() < 1e-15);
    }

    #[test]
    fn drive_lags_and_saturates() {
        let m = MotorModel::for_ratio(100.0, 1e-4);
        // slew-limited from rest
        assert!((m.advance(0.0, m.vel_limit, 0.0, 1e-3) - m.accel_limit * 1e-3).abs() < 1e-9);
        // first-order lag for small steps
        assert!((m.advance(0.0, 1.0, 0.0, 1e-3) - 1e-3 / m.time_constant).abs() < 1e-12);
        assert_eq!(m.advance(m.vel_limit, 2.0 * m.vel_limit, 0.0, 1e-3), m.vel_limit);
    }

    #[test]
    fn load_slows_acceleration_against_the_spring() {
        let m = MotorModel::for_ratio(100.0, 1e-4);
        let up = m.advance(0.0, m.vel_limit, 0.1, 1e-3);
        let down = m.advance(0.0, -m.vel_limit, 0.1, 1e-3);
        assert!(up < down.abs());
        assert!((up - (m.accel_limit - 1000.0) * 1e-3).abs() < 1e-9);
    }

    #[test]
    fn inertial_output_oscillates_about_the_internal_gear() {
        let mut p = params();
        p.load.mode = LoadMode::Inertial;
        p.load.viscous = 0.0;
        let s = ActuatorState::at_rest(0.0, vsm::pivot_angle_from_position(mm(30.0), &p.vsm).unwrap(), 0.1, &p);
        let mut plant = Plant::new(p, s).unwrap();
        let mut min = f64::MAX;
        for _ in 0..2000 {
            plant.step([0.0, 0.0], 1e-4).unwrap();
            min = min.min(plant.state().theta_o);
        }
        assert!(min < -0.09, "{min}");
    }

    #[test]
    fn pivot_force_matches_energy_gradient() {
        let p = params();
        let (th, ls, h) = (0.2, mm(30.0), 1e-8);
        let fd = (p.spring.energy(th, ls + h, &p.vsm) - p.spring.energy(th, ls - h, &p.vsm)) / (2.0 * h);
        let f = p.spring.pivot_force(th, ls, &p.vsm);
        assert!((fd - f).abs() / f < 1e-6);
    }

    #[test]
    fn gear_torques_reduce_to_torque_split_without_pivot_load() {
        let p = params();
        let mut s = ActuatorState::at_rest(0.0, 0.0, 0.0, &p);
        s.tau = 9.0;
        let (ring, sun) = s.gear_torques(&p);
        let (r, su) = dtm::torque_split(9.0, &p.dtm);
        assert!((ring - r).abs() < 1e-12 && (sun - su).abs() < 1e-12);
    }

    #[test]
    fn friction_opposes_motion() {
        let f = FrictionModel { enabled: true, ..Default::default() };
        assert!(f.torque(0.1) > 0.15);
        assert!(f.torque(-0.1) < -0.15);
        assert_eq!(f.torque(0.0), 0.0);
        assert_eq!(FrictionModel::default().torque(1.0), 0.0);
    }
}
