//! Open-loop drive of the plant: both motors at constant speed commands.

use vsa_lab::plant::{ActuatorState, Plant, PlantParams};
use vsa_lab::units::{to_deg, to_mm};

fn main() {
    let p = PlantParams::default();
    let mut plant = Plant::new(p, ActuatorState::with_pivot_position(0.03, &p).unwrap()).unwrap();
    let drive = [0.2 * p.motors[0].vel_limit, 0.0];
    for i in 1..=500 {
        let s = *plant.step(drive, 1e-3).unwrap();
        if i % 50 == 0 {
            println!(
                "t={:.2}  l_s={:.3} mm  defl={:.3} deg  tau={:.3} N·m{}",
                plant.time(),
                to_mm(s.l_s),
                to_deg(s.theta_tau),
                s.tau,
                if s.stop_contact { "  (stop)" } else { "" }
            );
        }
    }
    println!("motor work {:.4} J", plant.motor_work());
}
