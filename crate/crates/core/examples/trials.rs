//! Repeated trials with seeded initial perturbations.

use vsa_lab::experiments::{run_torque_control, run_trials, Setup, StiffnessPreset, TORQUE_AMPLITUDE};

fn main() {
    let setup = Setup { trials: 4, ..Setup::default() };
    let stats = run_trials(&setup, |s| {
        let r = run_torque_control(s, StiffnessPreset::High, TORQUE_AMPLITUDE)?;
        Ok(vec![r.rms_error, r.rise_time.unwrap_or(f64::NAN)])
    })
    .unwrap();
    println!("RMS  {:.5} N·m", stats[0]);
    println!("rise {:.5} s", stats[1]);
}
