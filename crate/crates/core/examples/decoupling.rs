//! Constant stiffness under a torque sine, decoupled vs coupled.

use vsa_lab::experiments::{run_decoupling_comparison, CoupledVsaModel, Setup};
use vsa_lab::units::to_mm;

fn main() {
    let r = run_decoupling_comparison(&Setup::default(), CoupledVsaModel::default()).unwrap();
    println!("commanded pivot s.d.: decoupled {:.3e} mm, coupled {:.3} mm",
        to_mm(r.pivot_std_dso), to_mm(r.pivot_std_coupled));
    println!("measured pivot s.d.:  decoupled {:.3e} mm, coupled {:.3} mm",
        to_mm(r.measured_std_dso), to_mm(r.measured_std_coupled));
}
