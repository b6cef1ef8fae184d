//! Coupled-stiffness comparison actuator.
//!
//! A cubic-hardening surrogate for a lever actuator whose stiffness depends
//! on the deflection: `τ(θ) = δ₀(l_s)·θ + β·θ³`, so the local stiffness is
//! `δ₀ + 3βθ²`. `δ₀(l_s)` reuses the lever law of the decoupled mechanism so
//! both actuators agree at zero deflection. With `β = 0` it degenerates to
//! the decoupled mechanism.

use serde::{Deserialize, Serialize};

use crate::control::{Command, ControlError, Setpoints};
use crate::units::deg;
use crate::vsm::{self, Stiffness, VsmParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledVsaModel {
    /// Hardening coefficient, N·m/rad³.
    pub beta: f64,
    /// Deflection range of the comparison actuator, rad.
    pub deflection_cap: f64,
}

impl Default for CoupledVsaModel {
    fn default() -> Self {
        Self {
            beta: 7.0,
            deflection_cap: deg(30.0),
        }
    }
}

impl CoupledVsaModel {
    pub fn base_stiffness(&self, l_s: f64, vsm: &VsmParams) -> Stiffness {
        vsm::stiffness(l_s, vsm)
    }

    pub fn torque(&self, theta_tau: f64, l_s: f64, vsm: &VsmParams) -> f64 {
        match self.base_stiffness(l_s, vsm) {
            Stiffness::Finite(d0) => d0 * theta_tau + self.beta * theta_tau.powi(3),
            Stiffness::Rigid => 0.0,
        }
    }

    /// `∂τ/∂θ` at the given deflection.
    pub fn local_stiffness(&self, theta_tau: f64, l_s: f64, vsm: &VsmParams) -> Stiffness {
        match self.base_stiffness(l_s, vsm) {
            Stiffness::Finite(d0) => Stiffness::Finite(d0 + 3.0 * self.beta * theta_tau * theta_tau),
            Stiffness::Rigid => Stiffness::Rigid,
        }
    }

    pub fn energy(&self, theta_tau: f64, l_s: f64, vsm: &VsmParams) -> f64 {
        match self.base_stiffness(l_s, vsm) {
            Stiffness::Finite(d0) => {
                0.5 * d0 * theta_tau * theta_tau + 0.25 * self.beta * theta_tau.powi(4)
            }
            Stiffness::Rigid => 0.0,
        }
    }

    pub fn max_deflection(&self, l_s: f64, vsm: &VsmParams) -> f64 {
        if l_s >= vsm.l_t {
            0.0
        } else {
            self.deflection_cap
        }
    }

    /// Largest torque that can be held at constant local stiffness `delta_d`.
    ///
    /// Holding `δ₀ + 3βθ² = δ_d` turns the torque law into `δ_d·θ − 2βθ³`,
    /// which peaks at `θ* = √(δ_d / 6β)`.
    pub fn max_torque_at(&self, delta_d: f64) -> f64 {
        let theta = self.peak_deflection(delta_d);
        delta_d * theta - 2.0 * self.beta * theta.powi(3)
    }

    fn peak_deflection(&self, delta_d: f64) -> f64 {
        let theta_peak = if self.beta > 0.0 {
            (delta_d / (6.0 * self.beta)).sqrt()
        } else {
            f64::INFINITY
        };
        theta_peak.min(self.deflection_cap)
    }

    /// Pivot position and deflection that deliver `cmd.tau_d` while the
    /// local stiffness equals `cmd.delta_d`.
    ///
    /// Returns the setpoints together with the commanded pivot position.
    pub fn setpoints(&self, cmd: Command, vsm: &VsmParams) -> Result<(Setpoints, f64), ControlError> {
        if !(cmd.delta_d >= 0.0) || !cmd.delta_d.is_finite() {
            return Err(ControlError::InvalidCommand(format!(
                "coupled baseline needs a finite non-negative stiffness, got {}",
                cmd.delta_d
            )));
        }
        let max_torque = self.max_torque_at(cmd.delta_d);
        let target = cmd.tau_d.abs();
        if target > max_torque {
            return Err(ControlError::Infeasible {
                tau_d: cmd.tau_d,
                max_torque,
            });
        }
        let theta = if target == 0.0 {
            0.0
        } else {
            // held-stiffness torque is increasing on [0, θ*]; bisect
            let f = |th: f64| cmd.delta_d * th - 2.0 * self.beta * th.powi(3) - target;
            let (mut lo, mut hi) = (0.0, self.peak_deflection(cmd.delta_d));
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let base = cmd.delta_d - 3.0 * self.beta * theta * theta;
        let l_s = vsm::pivot_from_stiffness(base.max(0.0), vsm)?;
        let theta_pivot_d = vsm::pivot_angle_from_position(l_s, vsm)?;
        Ok((
            Setpoints {
                theta_pivot_d,
                theta_tau_d: theta.copysign(cmd.tau_d),
            },
            l_s,
        ))
    }
}
