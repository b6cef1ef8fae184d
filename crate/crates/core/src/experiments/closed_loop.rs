//! Closed-loop scenarios on the clamped bench: stiffness regulation,
//! torque tracking at the two stiffness presets and the decoupling
//! comparison against the coupled baseline.

use std::f64::consts::PI;

use super::baseline::CoupledVsaModel;
use super::metrics::{rms, std_dev, time_to_90};
use super::trace::SimTrace;
use super::{ExperimentError, Reference, Report, Rig, Setup, SummaryRow};
use crate::control::{Command, Setpoints};
use crate::plant::{LoadMode, SpringLaw};
use crate::svg::{LineChart, Series};
use crate::units::{mm, nm_per_deg, to_mm};
use crate::vsm::{self, Stiffness};

/// Torque amplitude of the tracking and decoupling runs, N·m.
pub const TORQUE_AMPLITUDE: f64 = 7.0;
/// Time at which step commands switch on, s.
pub const STEP_ON: f64 = 0.5;
/// Time at which the torque step switches off again, s.
pub const STEP_OFF: f64 = 2.5;
/// Sine runs skip this long before computing the RMS error, s.
pub const SETTLE: f64 = 2.0;

fn clamped(setup: &Setup) -> Setup {
    let mut s = *setup;
    s.plant.load.mode = LoadMode::Clamped;
    s
}

fn sine(amplitude: f64, frequency: f64, t: f64) -> f64 {
    amplitude * (2.0 * PI * frequency * t).sin()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegulationReport {
    pub sine_trace: SimTrace,
    pub step_trace: SimTrace,
    /// RMS pivot-position error of the sine run after settling, m.
    pub rms_error: f64,
    /// 90% rise time of the 0 → 60 mm step, s.
    pub rise_time: Option<f64>,
    /// The pivot went past the end of its stroke, so `l_s` turned back
    /// while the angle was still overshooting.
    pub reversal: bool,
}

/// Pivot sine (offset 30 mm, given amplitude, 0.5 Hz) and 0 → 60 mm step.
pub fn run_stiffness_regulation(setup: &Setup, amplitude: f64) -> Result<RegulationReport, ExperimentError> {
    let mut s = clamped(setup);
    // The sine passes through the rigid end, where stiffness diverges and
    // any leftover deflection turns into a torque the drives cannot hold.
    // Only the pivot start is perturbed here.
    s.initial_offset.deflection = 0.0;
    let vsm = s.plant.vsm;
    let offset = mm(30.0);
    if !(amplitude >= 0.0 && amplitude <= offset) {
        return Err(ExperimentError::Invalid {
            name: "amplitude",
            reason: format!("pivot sine must stay within the stroke, got {amplitude} m"),
        });
    }
    // Branch continuation: extrapolate the last increment so the pivot
    // keeps turning through the ends of the stroke instead of reversing.
    // A jump in the reference (the step) is not extrapolated.
    let target = |l_s: f64, prev: &mut (f64, f64)| -> Result<(Setpoints, Reference), ExperimentError> {
        let l_s = l_s.clamp(0.0, vsm.l_t);
        let (last, step) = *prev;
        let theta_pivot_d = vsm::nearest_pivot_angle(l_s, last + step, &vsm)?;
        let moved = theta_pivot_d - last;
        *prev = (theta_pivot_d, if moved.abs() < 0.1 { moved } else { 0.0 });
        let delta = vsm::stiffness(l_s, &vsm).finite().unwrap_or(f64::INFINITY);
        Ok((
            Setpoints {
                theta_pivot_d,
                theta_tau_d: 0.0,
            },
            Reference {
                tau_cmd: 0.0,
                delta_cmd: delta,
                l_s_cmd: l_s,
            },
        ))
    };

    let mut rig = Rig::new(&s, s.initial_state(offset)?)?;
    let mut prev = (rig.plant.state().theta_pivot, 0.0);
    let duration = SETTLE + 4.0;
    rig.run_targets(s.steps(duration), |t| target(offset + sine(amplitude, 0.5, t), &mut prev))?;
    let sine_trace = rig.trace;
    let rms_error = rms(sine_trace.since(SETTLE).map(|r| r.state.l_s - r.l_s_cmd));

    let mut rig = Rig::new(&s, s.initial_state(0.0)?)?;
    let mut prev = (rig.plant.state().theta_pivot, 0.0);
    rig.run_targets(s.steps(STEP_ON + 2.5), |t| {
        target(if t < STEP_ON { 0.0 } else { vsm.l_t }, &mut prev)
    })?;
    let step_trace = rig.trace;
    let t = step_trace.times();
    let l_s = step_trace.column(|r| r.state.l_s);
    let rise_time = time_to_90(&t, &l_s, STEP_ON, 0.0, vsm.l_t);
    let reversal = step_trace.records.iter().any(|r| r.state.theta_pivot > PI);

    Ok(RegulationReport {
        sine_trace,
        step_trace,
        rms_error,
        rise_time,
        reversal,
    })
}

impl RegulationReport {
    pub fn report(&self) -> Report {
        let col = |tr: &SimTrace, f: fn(&super::TraceRecord) -> f64| tr.column(f);
        let sine_t = self.sine_trace.times();
        let step_t = self.step_trace.times();
        Report {
            scenario: "regulate".into(),
            rows: vec![
                SummaryRow::new("l_s sine RMS error", format!("{:.4} mm", to_mm(self.rms_error)), "0.09 mm"),
                SummaryRow::new("l_s step 90% rise", fmt_time(self.rise_time), "0.824 ± 0.028 s"),
                SummaryRow::new(
                    "overshoot reversal near 60 mm",
                    if self.reversal { "yes" } else { "no" },
                    "expected",
                ),
            ],
            traces: vec![
                ("regulate_sine".into(), self.sine_trace.clone()),
                ("regulate_step".into(), self.step_trace.clone()),
            ],
            charts: vec![
                (
                    "regulate_sine".into(),
                    LineChart::new("Pivot position tracking", "t [s]", "l_s [mm]")
                        .with_series(Series::new("command", &sine_t, &col(&self.sine_trace, |r| to_mm(r.l_s_cmd))))
                        .with_series(Series::new("measured", &sine_t, &col(&self.sine_trace, |r| to_mm(r.state.l_s)))),
                ),
                (
                    "regulate_step".into(),
                    LineChart::new("Pivot position step", "t [s]", "l_s [mm]")
                        .with_series(Series::new("command", &step_t, &col(&self.step_trace, |r| to_mm(r.l_s_cmd))))
                        .with_series(Series::new("measured", &step_t, &col(&self.step_trace, |r| to_mm(r.state.l_s)))),
                ),
            ],
            ..Default::default()
        }
    }
}

fn fmt_time(t: Option<f64>) -> String {
    t.map(|v| format!("{v:.3} s")).unwrap_or_else(|| "not reached".into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StiffnessPreset {
    /// `l_s = 30 mm`.
    Low,
    /// `l_s = 45 mm`.
    High,
}

impl StiffnessPreset {
    pub fn pivot(self) -> f64 {
        match self {
            StiffnessPreset::Low => mm(30.0),
            StiffnessPreset::High => mm(45.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StiffnessPreset::Low => "low",
            StiffnessPreset::High => "high",
        }
    }

    /// Hardware figures for comparison: (RMS, rise, fall).
    pub fn hardware_reference(self) -> (f64, f64, f64) {
        match self {
            StiffnessPreset::Low => (0.32, 0.208, 0.154),
            StiffnessPreset::High => (0.89, 0.116, 0.078),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorqueReport {
    pub preset: StiffnessPreset,
    pub sine_trace: SimTrace,
    pub step_trace: SimTrace,
    /// RMS torque error of the sine run after settling, N·m.
    pub rms_error: f64,
    pub rise_time: Option<f64>,
    pub fall_time: Option<f64>,
}

/// Torque sine (given amplitude, 0.5 Hz) and on/off step at a stiffness
/// preset.
pub fn run_torque_control(
    setup: &Setup,
    preset: StiffnessPreset,
    amplitude: f64,
) -> Result<TorqueReport, ExperimentError> {
    let s = clamped(setup);
    let l_s = preset.pivot();
    let delta_d = match vsm::stiffness(l_s, &s.plant.vsm) {
        Stiffness::Finite(d) => d,
        Stiffness::Rigid => unreachable!("presets are compliant"),
    };

    let mut rig = Rig::new(&s, s.initial_state(l_s)?)?;
    rig.run_commands(s.steps(SETTLE + 4.0), |t| Command {
        delta_d,
        tau_d: sine(amplitude, 0.5, t),
    })?;
    let sine_trace = rig.trace;
    let rms_error = rms(sine_trace.since(SETTLE).map(|r| r.state.tau - r.tau_cmd));

    let mut rig = Rig::new(&s, s.initial_state(l_s)?)?;
    rig.run_commands(s.steps(STEP_OFF + 2.0), |t| Command {
        delta_d,
        tau_d: if (STEP_ON..STEP_OFF).contains(&t) { amplitude } else { 0.0 },
    })?;
    let step_trace = rig.trace;
    let t = step_trace.times();
    let tau = step_trace.column(|r| r.state.tau);
    let rise_time = time_to_90(&t, &tau, STEP_ON, 0.0, amplitude);
    let fall_time = time_to_90(&t, &tau, STEP_OFF, amplitude, 0.0);

    Ok(TorqueReport {
        preset,
        sine_trace,
        step_trace,
        rms_error,
        rise_time,
        fall_time,
    })
}

impl TorqueReport {
    pub fn report(&self, tag: &str) -> Report {
        let (rms_ref, rise_ref, fall_ref) = self.preset.hardware_reference();
        let name = format!("{tag}_{}", self.preset.name());
        let sine_t = self.sine_trace.times();
        let step_t = self.step_trace.times();
        let chart = |title: &str, tr: &SimTrace, t: &[f64]| {
            LineChart::new(title, "t [s]", "tau [N·m]")
                .with_series(Series::new("command", t, &tr.column(|r| r.tau_cmd)))
                .with_series(Series::new("measured", t, &tr.column(|r| r.state.tau)))
        };
        Report {
            scenario: name.clone(),
            rows: vec![
                SummaryRow::new("sine RMS error", format!("{:.4} N·m", self.rms_error), format!("{rms_ref} N·m")),
                SummaryRow::new("step 90% rise", fmt_time(self.rise_time), format!("{rise_ref} s")),
                SummaryRow::new("step 90% fall", fmt_time(self.fall_time), format!("{fall_ref} s")),
            ],
            traces: vec![
                (format!("{name}_sine"), self.sine_trace.clone()),
                (format!("{name}_step"), self.step_trace.clone()),
            ],
            charts: vec![
                (format!("{name}_sine"), chart("Torque tracking", &self.sine_trace, &sine_t)),
                (format!("{name}_step"), chart("Torque step", &self.step_trace, &step_t)),
            ],
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecouplingReport {
    pub dso_trace: SimTrace,
    pub coupled_trace: SimTrace,
    /// Standard deviation of the commanded pivot position, m.
    pub pivot_std_dso: f64,
    pub pivot_std_coupled: f64,
    /// Standard deviation of the measured pivot position, m.
    pub measured_std_dso: f64,
    pub measured_std_coupled: f64,
}

/// Holds the stiffness of the constant pivot position while tracking a
/// 7 N·m, 1 Hz torque sine, once on the decoupled mechanism and once on
/// the coupled baseline.
pub fn run_decoupling_comparison(
    setup: &Setup,
    baseline: CoupledVsaModel,
) -> Result<DecouplingReport, ExperimentError> {
    let s = clamped(setup);
    let vsm = s.plant.vsm;
    let l_s = s.constant_pivot;
    let delta_d = vsm::stiffness(l_s, &vsm).finite().ok_or(ExperimentError::Invalid {
        name: "constant_pivot",
        reason: "the decoupling run needs a compliant pivot position".into(),
    })?;
    let duration = 5.0;
    let command = |t: f64| Command {
        delta_d,
        tau_d: sine(TORQUE_AMPLITUDE, 1.0, t),
    };

    let mut rig = Rig::new(&s, s.initial_state(l_s)?)?;
    rig.run_commands(s.steps(duration), command)?;
    let dso_trace = rig.trace;

    let mut sc = s;
    sc.plant.spring = SpringLaw::Coupled(baseline);
    let mut rig = Rig::new(&sc, sc.initial_state(l_s)?)?;
    rig.run_targets(sc.steps(duration), |t| {
        let cmd = command(t);
        let (targets, l_s_cmd) = baseline.setpoints(cmd, &vsm)?;
        Ok((
            targets,
            Reference {
                tau_cmd: cmd.tau_d,
                delta_cmd: cmd.delta_d,
                l_s_cmd,
            },
        ))
    })?;
    let coupled_trace = rig.trace;

    // the first record precedes any command
    let cmd_std = |tr: &SimTrace| std_dev(&tr.records[1..].iter().map(|r| r.l_s_cmd).collect::<Vec<_>>());
    let meas_std = |tr: &SimTrace| std_dev(&tr.column(|r| r.state.l_s));
    Ok(DecouplingReport {
        pivot_std_dso: cmd_std(&dso_trace),
        pivot_std_coupled: cmd_std(&coupled_trace),
        measured_std_dso: meas_std(&dso_trace),
        measured_std_coupled: meas_std(&coupled_trace),
        dso_trace,
        coupled_trace,
    })
}

impl DecouplingReport {
    pub fn report(&self) -> Report {
        let t = self.dso_trace.times();
        let tc = self.coupled_trace.times();
        let cmd = |tr: &SimTrace| tr.column(|r| to_mm(r.l_s_cmd));
        let tau = |tr: &SimTrace| tr.column(|r| r.state.tau);
        let delta = self.dso_trace.records.get(1).map(|r| nm_per_deg(r.delta_cmd)).unwrap_or(f64::NAN);
        Report {
            scenario: "decouple".into(),
            rows: vec![
                SummaryRow::new("held stiffness", format!("{delta:.4} N·m/°"), ""),
                SummaryRow::new("pivot command s.d., decoupled", format!("{:.3e} mm", to_mm(self.pivot_std_dso)), "constant"),
                SummaryRow::new("pivot command s.d., coupled", format!("{:.4} mm", to_mm(self.pivot_std_coupled)), "varying"),
                SummaryRow::new("measured pivot s.d., decoupled", format!("{:.3e} mm", to_mm(self.measured_std_dso)), ""),
                SummaryRow::new("measured pivot s.d., coupled", format!("{:.4} mm", to_mm(self.measured_std_coupled)), ""),
            ],
            traces: vec![
                ("decouple_dso".into(), self.dso_trace.clone()),
                ("decouple_coupled".into(), self.coupled_trace.clone()),
            ],
            charts: vec![
                (
                    "decouple_pivot".into(),
                    LineChart::new("Pivot command under torque tracking", "t [s]", "l_s command [mm]")
                        .with_series(Series::new("decoupled", &t, &cmd(&self.dso_trace)))
                        .with_series(Series::new("coupled", &tc, &cmd(&self.coupled_trace))),
                ),
                (
                    "decouple_torque".into(),
                    LineChart::new("Output torque", "t [s]", "tau [N·m]")
                        .with_series(Series::new("decoupled", &t, &tau(&self.dso_trace)))
                        .with_series(Series::new("coupled", &tc, &tau(&self.coupled_trace))),
                ),
            ],
            ..Default::default()
        }
    }
}
