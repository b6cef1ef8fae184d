//! Ring and sun shares of the output torque.

use vsa_lab::experiments::{run_load_sharing, Setup};

fn main() {
    let setup = Setup::default();
    let r = run_load_sharing(&setup).unwrap();
    let dtm = setup.plant.dtm;
    let expected = dtm.ring_radius / dtm.sun_radius;
    for s in r.samples.iter().step_by(r.samples.len() / 8) {
        println!("t={:.2}  ring {:7.3}  sun {:7.3}  out {:7.3}", s.t, s.ring, s.sun, s.output);
    }
    println!("max ratio error {:.2e} (expected {expected})", r.max_ratio_error(expected));
    println!("max sum error {:.2e} N·m", r.max_sum_error());
}
