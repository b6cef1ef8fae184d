//! Torque sine and on/off step at both stiffness presets.

use vsa_lab::experiments::{run_torque_control, Setup, StiffnessPreset, TORQUE_AMPLITUDE};

fn main() {
    let setup = Setup::default();
    for preset in [StiffnessPreset::Low, StiffnessPreset::High] {
        let r = run_torque_control(&setup, preset, TORQUE_AMPLITUDE).unwrap();
        println!(
            "{:<4} RMS {:.4} N·m  rise {:.4} s  fall {:.4} s",
            preset.name(),
            r.rms_error,
            r.rise_time.unwrap_or(f64::NAN),
            r.fall_time.unwrap_or(f64::NAN)
        );
    }
}
