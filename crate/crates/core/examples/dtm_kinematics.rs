//! Planetary stage: angle mapping, torque split and power flow.

use vsa_lab::dtm::{self, DtmParams, GearAngles};

fn main() {
    let p = DtmParams::default();
    println!("alpha = {:.4}, r/R = {}", p.alpha(), p.radius_ratio());

    let (pos, pivot) = dtm::forward(1.0, 0.4, &p);
    println!("ring 1.0, sun 0.4 -> pos {pos:.4}, pivot {pivot:.4}");
    let (r, s) = dtm::inverse(pos, pivot, &p);
    println!("back: ring {r:.4}, sun {s:.4}");
    println!("{:?}", GearAngles::new(1.0, 0.4, &p));

    // Same angle on both inputs spins the carrier without moving the pivot.
    println!("common mode: {:?}", dtm::forward(0.7, 0.7, &p));

    let (tr, ts) = dtm::torque_split(10.0, &p);
    println!("10 N·m on the carrier -> ring {tr:.3}, sun {ts:.3}");
    let w = dtm::power_split(2.0, -1.0, 10.0, &p);
    println!("power ring {:.3} + sun {:.3} = carrier {:.3} W", w.ring, w.sun, w.carrier);
}
