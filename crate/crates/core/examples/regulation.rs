//! Pivot position tracking: full-stroke sine and step.

use vsa_lab::experiments::{run_stiffness_regulation, Setup};
use vsa_lab::units::{mm, to_mm};

fn main() {
    let r = run_stiffness_regulation(&Setup::default(), mm(30.0)).unwrap();
    println!("sine RMS error {:.4} mm", to_mm(r.rms_error));
    println!("step rise time {:?} s, reversal {}", r.rise_time, r.reversal);
    for row in r.report().rows {
        println!("{:<32} {}", row.metric, row.value);
    }
}
