//! Open-loop, slow scenarios: stiffness curves, the calibration sweep and
//! the load-sharing run.
//!
//! The slow runs clamp the output and drive both gears together, which
//! moves `θ_pos` at fixed pivot, so the deflection follows a triangle
//! `0 → +A → −A → 0` while the stiffness stays where the sweep put it.

use log::warn;

use super::metrics::{linear_fit, loop_area, LinearFit};
use super::trace::{SimTrace, Table};
use super::{ExperimentError, Reference, Report, Rig, Setup, SummaryRow};
use crate::dtm;
use crate::control::Setpoints;
use crate::plant::LoadMode;
use crate::svg::{LineChart, Series};
use crate::units::{mm, nm_per_deg, to_deg, to_mm};
use crate::vsm::{self, Stiffness, VsmParams};

/// Triangle deflection ramp: `0 → +A` in `leg` seconds, down to `−A` in
/// `2·leg`, back to zero in `leg`, then `settle` seconds at rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ramp {
    pub amplitude: f64,
    pub leg: f64,
    pub settle: f64,
}

impl Ramp {
    pub fn duration(&self) -> f64 {
        4.0 * self.leg + self.settle
    }

    /// Deflection rate of the reference at `t`.
    pub fn rate(&self, t: f64) -> f64 {
        let v = self.amplitude / self.leg;
        if t < self.leg {
            v
        } else if t < 3.0 * self.leg {
            -v
        } else if t < 4.0 * self.leg {
            v
        } else {
            0.0
        }
    }

    /// Deflection reference at `t`.
    pub fn position(&self, t: f64) -> f64 {
        let v = self.amplitude / self.leg;
        let l = self.leg;
        if t < l {
            v * t
        } else if t < 3.0 * l {
            self.amplitude - v * (t - l)
        } else if t < 4.0 * l {
            -self.amplitude + v * (t - 3.0 * l)
        } else {
            0.0
        }
    }

    /// Open-loop motor drive for the ramp: both gears at `−θ̇_ref`.
    pub fn drive(&self, t: f64, dtm: &dtm::DtmParams) -> [f64; 2] {
        let gear_rate = -self.rate(t);
        [dtm.n1 * gear_rate, dtm.n2 * gear_rate]
    }
}

/// Sweeps the deflection along `ramp` against a clamped output while the
/// pivot loop holds `l_s`. Open loop, the drives share the spring load
/// unevenly near the stiff end and the pivot would creep.
fn run_ramp(setup: &Setup, l_s: f64, ramp: Option<Ramp>) -> Result<SimTrace, ExperimentError> {
    let mut s = *setup;
    s.plant.load.mode = LoadMode::Clamped;
    let mut rig = Rig::new(&s, s.initial_state(l_s)?)?;
    let vsm = s.plant.vsm;
    let delta = match vsm::stiffness(l_s, &vsm) {
        Stiffness::Finite(d) => d,
        Stiffness::Rigid => f64::INFINITY,
    };
    let reference = Reference {
        tau_cmd: f64::NAN,
        delta_cmd: delta,
        l_s_cmd: l_s,
    };
    let theta_pivot_d = vsm::pivot_angle_from_position(l_s, &vsm)?;
    let duration = ramp.map_or(0.5, |r| r.duration());
    rig.run_targets(s.steps(duration), |t| {
        Ok((
            Setpoints {
                theta_pivot_d,
                theta_tau_d: ramp.map_or(0.0, |r| r.position(t)),
            },
            reference,
        ))
    })?;
    Ok(rig.trace)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub l_s: f64,
    pub stiffness: Stiffness,
    pub max_deflection: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvesReport {
    pub points: Vec<CurvePoint>,
    /// Closed-form regime crossover, m.
    pub crossover: f64,
    /// First grid position where the spring limit is the smaller one, m.
    pub crossover_on_grid: Option<f64>,
}

/// Stiffness and deflection limit over the stroke on a 0.5 mm grid.
pub fn run_stiffness_curves(vsm: &VsmParams) -> CurvesReport {
    let n = (vsm.l_t / mm(0.5)).round() as usize;
    let points: Vec<CurvePoint> = (0..=n)
        .map(|i| {
            let l_s = (i as f64 * mm(0.5)).min(vsm.l_t);
            CurvePoint {
                l_s,
                stiffness: vsm::stiffness(l_s, vsm),
                max_deflection: vsm::max_deflection(l_s, vsm),
            }
        })
        .collect();
    let crossover_on_grid = points
        .iter()
        .find(|p| p.max_deflection < vsm.theta_tau_cap)
        .map(|p| p.l_s);
    CurvesReport {
        points,
        crossover: vsm::crossover_position(vsm),
        crossover_on_grid,
    }
}

impl CurvesReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["l_s", "delta", "theta_tau_max"]);
        for p in &self.points {
            let delta = p.stiffness.finite().map(nm_per_deg).unwrap_or(f64::INFINITY);
            t.push(vec![to_mm(p.l_s), delta, to_deg(p.max_deflection)]);
        }
        t
    }

    pub fn report(&self) -> Report {
        let x: Vec<f64> = self.points.iter().map(|p| to_mm(p.l_s)).collect();
        let delta: Vec<f64> = self
            .points
            .iter()
            .map(|p| p.stiffness.finite().map(nm_per_deg).unwrap_or(f64::NAN))
            // the last few points dwarf the rest of the curve
            .map(|d| if d > 10.0 { f64::NAN } else { d })
            .collect();
        let limit: Vec<f64> = self.points.iter().map(|p| to_deg(p.max_deflection)).collect();
        let at = |l: f64| self.points.iter().find(|p| (p.l_s - l).abs() < 1e-9).map(|p| p.stiffness);
        let fmt_delta = |s: Option<Stiffness>| match s {
            Some(Stiffness::Finite(d)) => format!("{:.4} N·m/°", nm_per_deg(d)),
            Some(Stiffness::Rigid) => "rigid".into(),
            None => "-".into(),
        };
        Report {
            scenario: "curves".into(),
            rows: vec![
                SummaryRow::new("crossover", format!("{:.3} mm", to_mm(self.crossover)), "26 mm"),
                SummaryRow::new(
                    "crossover (0.5 mm grid)",
                    self.crossover_on_grid
                        .map(|l| format!("{:.1} mm", to_mm(l)))
                        .unwrap_or_else(|| "-".into()),
                    "",
                ),
                SummaryRow::new("delta(30 mm)", fmt_delta(at(mm(30.0))), "0.321 N·m/°"),
                SummaryRow::new("delta(45 mm)", fmt_delta(at(mm(45.0))), "2.888 N·m/°"),
            ],
            tables: vec![("curves".into(), self.table())],
            charts: vec![
                (
                    "curves_stiffness".into(),
                    LineChart::new("Stiffness vs pivot position", "l_s [mm]", "delta [N·m/°]")
                        .with_series(Series::new("delta", &x, &delta)),
                ),
                (
                    "curves_max_deflection".into(),
                    LineChart::new("Deflection limit vs pivot position", "l_s [mm]", "theta_tau,max [°]")
                        .with_series(Series::new("theta_tau,max", &x, &limit)),
                ),
            ],
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationPoint {
    pub l_s: f64,
    pub expected: Stiffness,
    /// Least-squares fit of torque on deflection; `None` for a rigid point.
    pub fit: Option<LinearFit>,
    /// Area of the torque–deflection loop, J.
    pub loop_area: f64,
    pub trace: SimTrace,
}

impl CalibrationPoint {
    /// Relative error of the fitted slope against the stiffness law.
    pub fn slope_error(&self) -> Option<f64> {
        let fit = self.fit?;
        let expected = self.expected.finite()?;
        if expected == 0.0 {
            Some(fit.slope.abs())
        } else {
            Some((fit.slope - expected).abs() / expected)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub points: Vec<CalibrationPoint>,
}

/// Pivot positions of the default sweep: 0 to 60 mm in 5 mm steps.
pub fn default_sweep() -> Vec<f64> {
    (0..=12).map(|i| mm(5.0 * i as f64)).collect()
}

/// Ramps the deflection to ±80% of its limit at each sweep position and
/// fits the torque–deflection slope.
pub fn run_calibration(setup: &Setup, sweep: &[f64]) -> Result<CalibrationReport, ExperimentError> {
    let vsm = setup.plant.vsm;
    let mut points = Vec::with_capacity(sweep.len());
    for &l_s in sweep {
        let limit = setup.plant.spring.max_deflection(l_s, &vsm);
        let expected = vsm::stiffness(l_s, &vsm);
        let ramp = if limit > 0.0 && !expected.is_rigid() {
            Some(Ramp {
                amplitude: 0.8 * limit,
                leg: 2.0,
                settle: 0.5,
            })
        } else {
            warn!(
                "calibration point l_s = {:.1} mm is rigid, no deflection to sweep",
                to_mm(l_s)
            );
            None
        };
        let trace = run_ramp(setup, l_s, ramp)?;
        let theta = trace.column(|r| r.state.theta_tau);
        let tau = trace.column(|r| r.state.tau);
        let fit = ramp.and_then(|_| linear_fit(&theta, &tau));
        points.push(CalibrationPoint {
            l_s,
            expected,
            fit,
            loop_area: loop_area(&theta, &tau),
            trace,
        });
    }
    Ok(CalibrationReport { points })
}

impl CalibrationReport {
    pub fn point(&self, l_s: f64) -> Option<&CalibrationPoint> {
        self.points.iter().find(|p| (p.l_s - l_s).abs() < 1e-9)
    }

    pub fn report(&self) -> Report {
        let mut rows = Vec::new();
        let mut traces = Vec::new();
        let mut charts = Vec::new();
        let (mut xs, mut fitted, mut model) = (Vec::new(), Vec::new(), Vec::new());
        for p in &self.points {
            let tag = format!("calibration_ls{:02}", to_mm(p.l_s).round() as i64);
            let value = match (p.fit, p.slope_error()) {
                (Some(f), Some(e)) => format!(
                    "slope {:.4} N·m/° (err {:.2e}, R² {:.6}, loop {:.3e} J)",
                    nm_per_deg(f.slope),
                    e,
                    f.r_squared,
                    p.loop_area
                ),
                _ => "rigid, skipped".into(),
            };
            let reference = match p.expected {
                Stiffness::Finite(d) => format!("{:.4} N·m/°", nm_per_deg(d)),
                Stiffness::Rigid => "rigid".into(),
            };
            rows.push(SummaryRow::new(format!("l_s = {:.0} mm", to_mm(p.l_s)), value, reference));
            if let (Some(f), Some(d)) = (p.fit, p.expected.finite()) {
                xs.push(to_mm(p.l_s));
                fitted.push(nm_per_deg(f.slope));
                model.push(nm_per_deg(d));
            }
            let th: Vec<f64> = p.trace.column(|r| to_deg(r.state.theta_tau));
            let tau: Vec<f64> = p.trace.column(|r| r.state.tau);
            charts.push((
                tag.clone(),
                LineChart::new(
                    format!("Torque vs deflection at l_s = {:.0} mm", to_mm(p.l_s)),
                    "theta_tau [°]",
                    "tau [N·m]",
                )
                .with_series(Series::new("simulated", &th, &tau)),
            ));
            traces.push((tag, p.trace.decimate(10)));
        }
        charts.push((
            "calibration_fit".into(),
            LineChart::new("Fitted stiffness vs pivot position", "l_s [mm]", "delta [N·m/°]")
                .with_series(Series::new("fitted", &xs, &fitted))
                .with_series(Series::new("model", &xs, &model)),
        ));
        Report {
            scenario: "calibrate".into(),
            rows,
            traces,
            charts,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShareSample {
    pub t: f64,
    /// Ring gear share of the output torque.
    pub ring: f64,
    /// Sun gear share of the output torque.
    pub sun: f64,
    pub output: f64,
    /// `ring / sun`, only where `|output| > 0.1 N·m`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadSharingReport {
    pub samples: Vec<ShareSample>,
    pub trace: SimTrace,
}

impl LoadSharingReport {
    pub fn ratio_samples(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().filter_map(|s| s.ratio)
    }

    pub fn max_ratio_error(&self, expected: f64) -> f64 {
        self.ratio_samples().map(|r| (r - expected).abs()).fold(0.0, f64::max)
    }

    /// Largest `|ring + sun − output|` over all samples.
    pub fn max_sum_error(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.ring + s.sun - s.output).abs())
            .fold(0.0, f64::max)
    }

    pub fn report(&self, expected_ratio: f64) -> Report {
        let n = self.ratio_samples().count();
        let t: Vec<f64> = self.samples.iter().map(|s| s.t).collect();
        let pick = |f: fn(&ShareSample) -> f64| self.samples.iter().map(f).collect::<Vec<_>>();
        Report {
            scenario: "loadshare".into(),
            rows: vec![
                SummaryRow::new("ratio samples", n.to_string(), ""),
                SummaryRow::new(
                    "max |RG-T/SG-T - R/r|",
                    format!("{:.3e}", self.max_ratio_error(expected_ratio)),
                    format!("R/r = {expected_ratio}"),
                ),
                SummaryRow::new(
                    "max |RG-T + SG-T - tau|",
                    format!("{:.3e} N·m", self.max_sum_error()),
                    "",
                ),
            ],
            traces: vec![("loadshare".into(), self.trace.decimate(10))],
            charts: vec![(
                "loadshare".into(),
                LineChart::new("Gear torque shares", "t [s]", "torque [N·m]")
                    .with_series(Series::new("RG-T", &t, &pick(|s| s.ring)))
                    .with_series(Series::new("SG-T", &t, &pick(|s| s.sun)))
                    .with_series(Series::new("output", &t, &pick(|s| s.output))),
            )],
            ..Default::default()
        }
    }
}

/// Slow deflection sweep to ±90% of the limit at the constant pivot
/// position, reporting how the output torque splits between the gears.
pub fn run_load_sharing(setup: &Setup) -> Result<LoadSharingReport, ExperimentError> {
    let l_s = setup.constant_pivot;
    let limit = setup.plant.spring.max_deflection(l_s, &setup.plant.vsm);
    let ramp = Ramp {
        amplitude: 0.9 * limit,
        leg: 4.0,
        settle: 0.5,
    };
    let trace = run_ramp(setup, l_s, Some(ramp))?;
    let samples = trace
        .records
        .iter()
        .map(|r| ShareSample {
            t: r.t,
            ring: r.tau_r,
            sun: r.tau_s,
            output: r.state.tau,
            ratio: (r.state.tau.abs() > 0.1).then(|| r.tau_r / r.tau_s),
        })
        .collect();
    Ok(LoadSharingReport { samples, trace })
}
