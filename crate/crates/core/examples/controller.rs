//! Cascade controller wired to the plant by hand.

use vsa_lab::control::{Command, Controller, ControllerConfig};
use vsa_lab::plant::{ActuatorState, Plant, PlantParams};
use vsa_lab::units::to_mm;
use vsa_lab::vsm;

fn main() {
    let p = PlantParams::default();
    let mut plant = Plant::new(p, ActuatorState::with_pivot_position(0.03, &p).unwrap()).unwrap();
    let mut ctl = Controller::new(ControllerConfig::for_motors(&p.motors), p.vsm, p.dtm).unwrap();

    let cmd = Command {
        delta_d: vsm::stiffness(0.04, &p.vsm).finite().unwrap(),
        tau_d: 5.0,
    };
    let dt = 1e-3;
    for i in 1..=3000 {
        let out = ctl.update(cmd, &plant.measure(None), dt).unwrap();
        let s = *plant.step(out.drive, dt).unwrap();
        if i % 250 == 0 {
            println!("t={:.2}  l_s={:.3} mm  tau={:.4} N·m", plant.time(), to_mm(s.l_s), s.tau);
        }
    }
}
