//! Quasi-static torque/deflection sweep with slope fits.

use vsa_lab::experiments::{default_sweep, run_calibration, Setup};
use vsa_lab::units::to_mm;

fn main() {
    let report = run_calibration(&Setup::default(), &default_sweep()).unwrap();
    for pt in &report.points {
        match (pt.fit, pt.slope_error()) {
            (Some(fit), Some(err)) => println!(
                "{:4.0} mm  slope {:9.3} N·m/rad  R² {:.6}  err {:.2e}",
                to_mm(pt.l_s),
                fit.slope,
                fit.r_squared,
                err
            ),
            _ => println!("{:4.0} mm  rigid", to_mm(pt.l_s)),
        }
    }
}
