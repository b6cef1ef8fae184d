//! The twelve acceptance criteria. Each prints one PASS/FAIL line to stderr,
//! past the test harness capture, and the test fails if any criterion does.
//!
//! `cargo test --release --test acceptance`

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vsa_lab::control::Command;
use vsa_lab::dtm::{self, DtmParams};
use vsa_lab::experiments::{self, CoupledVsaModel, Rig, Setup, StiffnessPreset, TORQUE_AMPLITUDE};
use vsa_lab::plant::{ActuatorState, Plant, PlantParams};
use vsa_lab::units::{deg, mm, nm_per_deg, to_deg, to_mm};
use vsa_lab::vsm::{self, Stiffness, VsmParams};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn finite_stiffness(l_s: f64, p: &VsmParams) -> f64 {
    match vsm::stiffness(l_s, p) {
        Stiffness::Finite(d) => d,
        Stiffness::Rigid => panic!("rigid at {l_s}"),
    }
}

fn c1_stiffness_law() -> Outcome {
    let p = VsmParams::default();
    let d30 = nm_per_deg(finite_stiffness(mm(30.0), &p));
    let d45 = nm_per_deg(finite_stiffness(mm(45.0), &p));
    // independent: r_tau² k_s (l_s/(l_t - l_s))², per degree
    let oracle = |ls: f64| 0.015f64.powi(2) * 81.7e3 * (ls / (60.0 - ls)).powi(2) * std::f64::consts::PI / 180.0;
    let (e30, e45) = (rel(d30, 0.321), rel(d45, 2.888));
    check(
        e30 < 5e-3 && e45 < 5e-3 && rel(d30, oracle(30.0)) < 1e-12 && rel(d45, oracle(45.0)) < 1e-12,
        format!("δ(30) = {d30:.4} N·m/° (rel {e30:.1e}), δ(45) = {d45:.4} N·m/° (rel {e45:.1e})"),
    )
}

fn c2_crossover() -> Outcome {
    let p = VsmParams::default();
    let x = vsm::crossover_position(&p);
    // independent: h_max / (r_tau · ratio) = 30° at the crossover
    let cap = deg(30.0);
    let ratio = 0.006 / (0.015 * cap);
    let oracle = 0.060 * ratio / (1.0 + ratio);
    let mut capped = true;
    let mut l = 0.0;
    while l < x - 1e-9 {
        capped &= (vsm::max_deflection(l, &p) - cap).abs() < 1e-12;
        l += mm(0.1);
    }
    let below_after = vsm::max_deflection(x + mm(0.5), &p) < cap;
    check(
        (to_mm(x) - 26.0).abs() <= 0.5 && (x - oracle).abs() < 1e-12 && capped && below_after,
        format!("crossover {:.3} mm, cap 30° held below it: {capped}", to_mm(x)),
    )
}

fn c3_energy() -> Outcome {
    let p = VsmParams::default();
    // at the deflection limit past the crossover the spring is fully compressed
    let l_s = mm(40.0);
    let th = vsm::max_deflection(l_s, &p);
    let spring = vsm::spring_state(th, l_s, &p).map_err(|e| e.to_string())?;
    let e = vsm::elastic_energy(th, l_s, &p).map_err(|e| e.to_string())?;
    let oracle = 0.5 * 81.7e3 * 0.006f64.powi(2);
    check(
        (to_mm(spring.h_s) - 6.0).abs() < 1e-9 && rel(e, 1.47) < 5e-3 && rel(e, oracle) < 1e-12,
        format!("h_s = {:.4} mm, E = {e:.4} J", to_mm(spring.h_s)),
    )
}

fn c4_dtm() -> Outcome {
    let p = DtmParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_rt: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_power: f64 = 0.0;
    for _ in 0..10_000 {
        let pos = rng.random_range(-10.0..10.0);
        let pivot = rng.random_range(-10.0..10.0);
        let (r, s) = dtm::inverse(pos, pivot, &p);
        let (pos2, pivot2) = dtm::forward(r, s, &p);
        worst_rt = worst_rt.max((pos2 - pos).abs()).max((pivot2 - pivot).abs());

        let tau_c: f64 = rng.random_range(-60.0..60.0);
        if tau_c.abs() > 1e-3 {
            let (tr, ts) = dtm::torque_split(tau_c, &p);
            worst_ratio = worst_ratio.max(((tr / ts).abs() - 2.0).abs());
        }
        let (wr, ws) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let ps = dtm::power_split(wr, ws, tau_c, &p);
        let scale = ps.carrier.abs().max(1.0);
        worst_power = worst_power.max((ps.ring + ps.sun - ps.carrier).abs() / scale);
    }
    check(
        worst_rt < 1e-12 && worst_ratio < 1e-9 && worst_power < 1e-12,
        format!("round trip {worst_rt:.1e}, |τ_r/τ_s| - 2 {worst_ratio:.1e}, power {worst_power:.1e}"),
    )
}

fn c5_calibration() -> Outcome {
    let setup = Setup::default();
    let report = experiments::run_calibration(&setup, &experiments::default_sweep()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut zero_slope = f64::NAN;
    for pt in &report.points {
        match (pt.expected, pt.fit) {
            (Stiffness::Finite(d), Some(f)) if d == 0.0 => zero_slope = f.slope.abs(),
            (Stiffness::Finite(d), Some(f)) => worst = worst.max(rel(f.slope, d)),
            (Stiffness::Finite(_), None) => return Err(format!("no fit at {:.0} mm", to_mm(pt.l_s))),
            (Stiffness::Rigid, _) => {}
        }
    }
    let mut rough = setup;
    rough.plant.friction.enabled = true;
    let with_friction =
        experiments::run_calibration(&rough, &experiments::default_sweep()).map_err(|e| e.to_string())?;
    let min_area = with_friction
        .points
        .iter()
        .filter(|pt| !pt.expected.is_rigid())
        .map(|pt| pt.loop_area)
        .fold(f64::INFINITY, f64::min);
    check(
        report.points.len() == 13 && worst < 5e-3 && zero_slope < 1e-9 && min_area > 0.0,
        format!("worst slope error {worst:.1e}, |slope(0)| {zero_slope:.1e}, smallest friction loop {min_area:.3e} J"),
    )
}

fn c6_linearity() -> Outcome {
    let report = experiments::run_calibration(&Setup::default(), &experiments::default_sweep())
        .map_err(|e| e.to_string())?;
    let worst = report
        .points
        .iter()
        .filter_map(|pt| pt.fit)
        .map(|f| f.r_squared)
        .fold(f64::INFINITY, f64::min);
    check(worst >= 0.9999, format!("lowest R² {worst:.8}"))
}

fn c7_torque_tracking() -> Outcome {
    let setup = Setup::default();
    let low = experiments::run_torque_control(&setup, StiffnessPreset::Low, TORQUE_AMPLITUDE).map_err(|e| e.to_string())?;
    let high = experiments::run_torque_control(&setup, StiffnessPreset::High, TORQUE_AMPLITUDE).map_err(|e| e.to_string())?;
    check(
        low.rms_error <= 0.32 && high.rms_error <= 0.89,
        format!("RMS low {:.4} N·m, high {:.4} N·m", low.rms_error, high.rms_error),
    )
}

fn c8_step_ordering() -> Outcome {
    let setup = Setup::default();
    let low = experiments::run_torque_control(&setup, StiffnessPreset::Low, TORQUE_AMPLITUDE).map_err(|e| e.to_string())?;
    let high = experiments::run_torque_control(&setup, StiffnessPreset::High, TORQUE_AMPLITUDE).map_err(|e| e.to_string())?;
    let get = |v: Option<f64>| v.ok_or_else(|| "step did not reach 90%".to_string());
    let (lr, lf) = (get(low.rise_time)?, get(low.fall_time)?);
    let (hr, hf) = (get(high.rise_time)?, get(high.fall_time)?);
    check(
        hr < lr && lf < lr && hf < hr,
        format!("rise/fall low {lr:.4}/{lf:.4} s, high {hr:.4}/{hf:.4} s"),
    )
}

fn c9_regulation() -> Outcome {
    let r = experiments::run_stiffness_regulation(&Setup::default(), mm(30.0)).map_err(|e| e.to_string())?;
    let rise = r.rise_time.ok_or("step did not reach 90%")?;
    check(
        (0.6..=1.1).contains(&rise),
        format!("90% rise {rise:.3} s, sine RMS {:.4} mm, reversal {}", to_mm(r.rms_error), r.reversal),
    )
}

fn c10_decoupling() -> Outcome {
    let d = experiments::run_decoupling_comparison(&Setup::default(), CoupledVsaModel::default())
        .map_err(|e| e.to_string())?;
    check(
        d.pivot_std_dso < 1e-9 && d.pivot_std_coupled > mm(0.5),
        format!(
            "pivot command s.d. decoupled {:.2e} m, coupled {:.4} mm",
            d.pivot_std_dso,
            to_mm(d.pivot_std_coupled)
        ),
    )
}

/// Torque step at the low preset, held long enough to settle.
fn settled_torque_step(dt: f64) -> Result<([f64; 6], String), String> {
    let mut setup = Setup::default();
    setup.dt = dt;
    let l_s = StiffnessPreset::Low.pivot();
    let delta = finite_stiffness(l_s, &setup.plant.vsm);
    let mut rig = Rig::new(&setup, setup.initial_state(l_s).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    rig.run_commands(setup.steps(12.0), |t| Command {
        delta_d: delta,
        tau_d: if t < 0.5 { 0.0 } else { TORQUE_AMPLITUDE },
    })
    .map_err(|e| e.to_string())?;
    Ok((rig.plant.state().core(), rig.trace.to_csv()))
}

fn c11_determinism() -> Outcome {
    let (a, csv_a) = settled_torque_step(1e-3)?;
    let (b, csv_b) = settled_torque_step(1e-3)?;
    let (h, _) = settled_torque_step(0.5e-3)?;
    let identical = a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()) && csv_a == csv_b;
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let diff = a.iter().zip(&h).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let change = diff / norm;
    check(
        identical && change < 1e-6,
        format!("bit-identical repeat: {identical}, dt-halving change {change:.1e}"),
    )
}

fn c12_energy() -> Outcome {
    let p = PlantParams::default();
    let mut plant = Plant::new(p, ActuatorState::with_pivot_position(mm(30.0), &p).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let e0 = plant.state().elastic_energy(&p);
    let dt = 1e-3;
    // wind up 0.2 rad of deflection in 2 s, pure common mode
    let w = -0.1;
    for _ in 0..2000 {
        plant.step([p.dtm.n1 * w, p.dtm.n2 * w], dt).map_err(|e| e.to_string())?;
    }
    for _ in 0..200 {
        plant.step([0.0, 0.0], dt).map_err(|e| e.to_string())?;
    }
    // then stiffen by turning the pivot, pure differential mode
    let k = p.dtm.radius_ratio();
    let target = vsm::pivot_angle_from_position(mm(33.0), &p.vsm).map_err(|e| e.to_string())?;
    let rate = 0.2;
    while plant.state().theta_pivot < target - rate * 0.03 {
        plant.step([p.dtm.n1 * k * rate, -p.dtm.n2 * rate], dt).map_err(|e| e.to_string())?;
    }
    for _ in 0..500 {
        plant.step([0.0, 0.0], dt).map_err(|e| e.to_string())?;
    }
    let s = plant.state();
    let stored = s.elastic_energy(&p) - e0;
    let work = plant.motor_work();
    let err = rel(work, stored);
    check(
        !s.stop_contact && err < 5e-3,
        format!(
            "motor work {work:.5} J, stored {stored:.5} J (rel {err:.1e}) at l_s {:.2} mm, θ_τ {:.2}°",
            to_mm(s.l_s),
            to_deg(s.theta_tau)
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, Duration, fn() -> Outcome); 12] = [
        ("1 stiffness law", Duration::from_secs(1), c1_stiffness_law),
        ("2 deflection-limit crossover", Duration::from_secs(1), c2_crossover),
        ("3 elastic energy", Duration::from_secs(1), c3_energy),
        ("4 DTM round trip, torque ratio, power", Duration::from_secs(1), c4_dtm),
        ("5 quasi-static calibration", Duration::from_secs(30), c5_calibration),
        ("6 torque-deflection linearity", Duration::from_secs(30), c6_linearity),
        ("7 closed-loop torque tracking", Duration::from_secs(60), c7_torque_tracking),
        ("8 step-response ordering", Duration::from_secs(60), c8_step_ordering),
        ("9 stiffness regulation", Duration::from_secs(30), c9_regulation),
        ("10 decoupling", Duration::from_secs(60), c10_decoupling),
        ("11 determinism and convergence", Duration::from_secs(60), c11_determinism),
        ("12 energy accounting", Duration::from_secs(30), c12_energy),
    ];
    let mut failed = Vec::new();
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(d) if took > budget => Err(format!("{d}; took {took:.2?}, budget {budget:?}")),
            other => other,
        };
        let line = match outcome {
            Ok(detail) => format!("PASS  {name}: {detail} ({took:.2?})"),
            Err(detail) => {
                failed.push(name);
                format!("FAIL  {name}: {detail} ({took:.2?})")
            }
        };
        // Written to the handle directly so the lines show without --nocapture.
        writeln!(std::io::stderr().lock(), "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
