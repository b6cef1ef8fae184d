//! Stiffness and deflection limit over the pivot stroke.

use vsa_lab::experiments::run_stiffness_curves;
use vsa_lab::units::{nm_per_deg, to_deg, to_mm};
use vsa_lab::vsm::{self, VsmParams};

fn main() {
    let p = VsmParams::default();
    let curves = run_stiffness_curves(&p);
    println!("l_s[mm]  delta[Nm/deg]  limit[deg]");
    for pt in curves.points.iter().step_by(10) {
        let d = pt.stiffness.finite().map(nm_per_deg);
        println!(
            "{:6.1}  {:>13}  {:9.3}",
            to_mm(pt.l_s),
            d.map_or("rigid".into(), |d| format!("{d:.4}")),
            to_deg(pt.max_deflection)
        );
    }
    println!("crossover at {:.3} mm", to_mm(curves.crossover));

    let l_s = 0.03;
    let th = 0.5 * vsm::max_deflection(l_s, &p);
    println!(
        "at 30 mm, {:.2} deg: tau = {:.3} N·m, E = {:.4} J",
        to_deg(th),
        vsm::torque(th, l_s, &p).unwrap(),
        vsm::elastic_energy(th, l_s, &p).unwrap()
    );
}
