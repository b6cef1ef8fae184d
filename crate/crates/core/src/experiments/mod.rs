//! Bench scenarios: stiffness curves, calibration sweep, stiffness
//! regulation, torque tracking, decoupling comparison and load sharing.
//!
//! Every scenario builds its own plant and controller from a [`Setup`], so
//! scenarios are independent and can run on separate threads.

pub mod baseline;
pub mod closed_loop;
pub mod metrics;
pub mod quasi_static;
pub mod trace;
pub mod trials;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use baseline::CoupledVsaModel;
pub use closed_loop::{
    run_decoupling_comparison, run_stiffness_regulation, run_torque_control, DecouplingReport,
    RegulationReport, StiffnessPreset, TorqueReport, TORQUE_AMPLITUDE,
};
pub use metrics::{LinearFit, Metrics, TrialStats};
pub use quasi_static::{
    default_sweep, run_calibration, run_load_sharing, run_stiffness_curves, CalibrationPoint, CalibrationReport,
    CurvesReport, LoadSharingReport,
};
pub use trace::{SimTrace, Table, TraceRecord};
pub use trials::run_trials;

use crate::control::{Command, ControlError, Controller, ControllerConfig, Setpoints};
use crate::plant::{ActuatorState, EncoderQuantization, Plant, PlantError, PlantParams};
use crate::svg::LineChart;
use crate::units::{deg, mm};
use crate::vsm::VsmError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Vsm(#[from] VsmError),
    #[error("invalid scenario setting `{name}`: {reason}")]
    Invalid { name: &'static str, reason: String },
}

/// Offset added to the nominal initial state of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InitialOffset {
    /// Pivot revolution angle, rad.
    pub pivot: f64,
    /// Deflection angle, rad.
    pub deflection: f64,
}

/// Everything a scenario needs besides its own schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setup {
    pub plant: PlantParams,
    pub controller: ControllerConfig,
    /// Integration and control step, s.
    pub dt: f64,
    pub quantization: Option<EncoderQuantization>,
    /// Pivot position held by the decoupling and load-sharing runs, m.
    pub constant_pivot: f64,
    pub trials: usize,
    pub seed: u64,
    /// Half-width of the uniform initial-state perturbation used by
    /// repeated trials, rad.
    pub perturbation: f64,
    pub initial_offset: InitialOffset,
}

impl Default for Setup {
    fn default() -> Self {
        let plant = PlantParams::default();
        Self {
            controller: ControllerConfig::for_motors(&plant.motors),
            plant,
            dt: 1e-3,
            quantization: None,
            constant_pivot: mm(30.0),
            trials: 5,
            seed: 7,
            perturbation: deg(0.5),
            initial_offset: InitialOffset::default(),
        }
    }
}

impl Setup {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.plant.validate()?;
        self.controller.gains.validate()?;
        if !(self.dt > 0.0 && self.dt <= crate::plant::MAX_DT) {
            return Err(PlantError::TimeStep(self.dt).into());
        }
        if !(self.constant_pivot >= 0.0 && self.constant_pivot < self.plant.vsm.l_t) {
            return Err(ExperimentError::Invalid {
                name: "constant_pivot",
                reason: format!("must lie in [0, l_t), got {} m", self.constant_pivot),
            });
        }
        if self.trials == 0 {
            return Err(ExperimentError::Invalid {
                name: "trials",
                reason: "at least one trial is needed".into(),
            });
        }
        if !(self.perturbation.is_finite() && self.perturbation >= 0.0) {
            return Err(ExperimentError::Invalid {
                name: "perturbation",
                reason: format!("must be finite and >= 0, got {}", self.perturbation),
            });
        }
        Ok(())
    }

    /// Same setup with a random initial offset drawn for trial `index`.
    pub fn perturbed(&self, index: usize) -> Setup {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(index as u64));
        let a = self.perturbation;
        let mut s = *self;
        if a > 0.0 {
            s.initial_offset = InitialOffset {
                pivot: rng.random_range(-a..=a),
                deflection: rng.random_range(-a..=a),
            };
        }
        s
    }

    /// Undeflected state at rest with the pivot at `l_s`, plus the offset.
    pub fn initial_state(&self, l_s: f64) -> Result<ActuatorState, ExperimentError> {
        let nominal = ActuatorState::with_pivot_position(l_s, &self.plant)?;
        let off = self.initial_offset;
        Ok(ActuatorState::at_rest(
            -off.deflection,
            nominal.theta_pivot + off.pivot,
            0.0,
            &self.plant,
        ))
    }

    /// Number of steps covering `duration`.
    pub fn steps(&self, duration: f64) -> usize {
        (duration / self.dt).round() as usize
    }
}

/// What the rig logs next to the state at each sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub tau_cmd: f64,
    pub delta_cmd: f64,
    pub l_s_cmd: f64,
}

impl Reference {
    pub const NONE: Reference = Reference {
        tau_cmd: f64::NAN,
        delta_cmd: f64::NAN,
        l_s_cmd: f64::NAN,
    };
}

/// Plant plus controller stepped in lockstep, recording every step.
#[derive(Debug, Clone)]
pub struct Rig {
    pub plant: Plant,
    pub controller: Controller,
    quantization: Option<EncoderQuantization>,
    dt: f64,
    step_index: usize,
    pub trace: SimTrace,
}

impl Rig {
    pub fn new(setup: &Setup, initial: ActuatorState) -> Result<Self, ExperimentError> {
        setup.validate()?;
        let plant = Plant::new(setup.plant, initial)?;
        let controller = Controller::new(setup.controller, setup.plant.vsm, setup.plant.dtm)?;
        let mut rig = Self {
            plant,
            controller,
            quantization: setup.quantization,
            dt: setup.dt,
            step_index: 0,
            trace: SimTrace::new(),
        };
        rig.record(Reference::NONE);
        Ok(rig)
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.dt
    }

    fn record(&mut self, reference: Reference) {
        let mut r = TraceRecord::new(self.time(), *self.plant.state(), &self.plant.params.dtm);
        r.tau_cmd = reference.tau_cmd;
        r.delta_cmd = reference.delta_cmd;
        r.l_s_cmd = reference.l_s_cmd;
        self.trace.push(r);
    }

    fn advance(&mut self, drive: [f64; 2], reference: Reference) -> Result<(), ExperimentError> {
        self.plant.step(drive, self.dt)?;
        self.step_index += 1;
        self.record(reference);
        Ok(())
    }

    /// Closed loop on a stiffness/torque command schedule.
    pub fn run_commands(
        &mut self,
        steps: usize,
        mut schedule: impl FnMut(f64) -> Command,
    ) -> Result<(), ExperimentError> {
        let vsm = self.plant.params.vsm;
        for _ in 0..steps {
            let cmd = schedule(self.time());
            let readings = self.plant.measure(self.quantization);
            let out = self.controller.update(cmd, &readings, self.dt)?;
            let reference = Reference {
                tau_cmd: cmd.tau_d,
                delta_cmd: cmd.delta_d,
                l_s_cmd: crate::vsm::pivot_from_stiffness(cmd.delta_d, &vsm)?,
            };
            self.advance(out.drive, reference)?;
        }
        Ok(())
    }

    /// Closed loop on explicit angle targets.
    pub fn run_targets(
        &mut self,
        steps: usize,
        mut schedule: impl FnMut(f64) -> Result<(Setpoints, Reference), ExperimentError>,
    ) -> Result<(), ExperimentError> {
        for _ in 0..steps {
            let (targets, reference) = schedule(self.time())?;
            let readings = self.plant.measure(self.quantization);
            let out = self.controller.track(targets, &readings, self.dt);
            self.advance(out.drive, reference)?;
        }
        Ok(())
    }

    /// Open loop on motor drive commands.
    pub fn run_open_loop(
        &mut self,
        steps: usize,
        mut schedule: impl FnMut(f64) -> [f64; 2],
        reference: Reference,
    ) -> Result<(), ExperimentError> {
        for _ in 0..steps {
            let drive = schedule(self.time());
            self.advance(drive, reference)?;
        }
        Ok(())
    }
}

/// One line of a scenario summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub metric: String,
    pub value: String,
    /// Value reported for the hardware prototype, or empty.
    pub reference: String,
}

impl SummaryRow {
    pub fn new(metric: impl Into<String>, value: impl Into<String>, reference: impl Into<String>) -> Self {
        Self {
            metric: metric.into(),
            value: value.into(),
            reference: reference.into(),
        }
    }
}

/// Artifacts of a scenario ready for writing.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub scenario: String,
    pub rows: Vec<SummaryRow>,
    pub traces: Vec<(String, SimTrace)>,
    pub tables: Vec<(String, Table)>,
    pub charts: Vec<(String, LineChart)>,
}
