//! Simulation and control toolkit for a variable stiffness actuator built
//! from a lever-type stiffness mechanism and a planetary differential.
//!
//! * [`vsm`]: pivot, stiffness, torque and deflection-limit laws.
//! * [`dtm`]: differential kinematics, torque and power split.
//! * [`plant`]: two-motor time-domain model with hard stops and sensors.
//! * [`control`]: cascade PI controller and motor mixing.
//! * [`experiments`]: bench scenarios, traces and metrics.
//! * [`config`], [`cli`], [`svg`]: configuration files, command line and plots.

pub mod cli;
pub mod config;
pub mod control;
pub mod dtm;
pub mod experiments;
pub mod plant;
pub mod svg;
pub mod units;
pub mod vsm;

pub use config::Config;
pub use control::{Command, Controller, ControllerConfig, ControllerGains, MixingMode};
pub use dtm::DtmParams;
pub use experiments::{Setup, SimTrace};
pub use plant::{ActuatorState, LoadMode, LoadModel, MotorModel, Plant, PlantParams};
pub use vsm::VsmParams;
