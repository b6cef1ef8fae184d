//! Planetary differential that mixes the two motor inputs into the
//! internal-gear position and the pivot revolution angle.
//!
//! Motor 1 drives the ring gear, motor 2 the sun gear. The carrier carries
//! the internal gear, so its angle is the output-side position `θ_pos`, and
//! the carrier angle relative to the sun is the pivot revolution `θ_pivot`.
//! The model is rigid and lossless.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::mm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DtmError {
    #[error("invalid DTM parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },
    #[error("combined motor power must be positive, got {0} W")]
    ZeroPower(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtmParams {
    /// Ring gear internal reference radius `R`, m.
    pub ring_radius: f64,
    /// Sun gear reference radius `r`, m.
    pub sun_radius: f64,
    /// Motor-1-to-ring ratio: `ω_M1 = n1·Ω`.
    pub n1: f64,
    /// Motor-2-to-sun ratio: `ω_M2 = n2·ω`.
    pub n2: f64,
}

impl Default for DtmParams {
    fn default() -> Self {
        Self {
            ring_radius: mm(36.0),
            sun_radius: mm(18.0),
            n1: -100.0,
            n2: 50.0,
        }
    }
}

impl DtmParams {
    /// Mixing weight `R / (R + r)`.
    pub fn alpha(&self) -> f64 {
        self.ring_radius / (self.ring_radius + self.sun_radius)
    }

    /// `r / (R + r)`, computed directly rather than as `1 - α`.
    pub fn beta(&self) -> f64 {
        self.sun_radius / (self.ring_radius + self.sun_radius)
    }

    /// `r / R`.
    pub fn radius_ratio(&self) -> f64 {
        self.sun_radius / self.ring_radius
    }

    pub fn validate(&self) -> Result<(), DtmError> {
        if !(self.sun_radius.is_finite() && self.sun_radius > 0.0) {
            return Err(DtmError::InvalidParams {
                name: "r",
                reason: format!("must be finite and > 0, got {}", self.sun_radius),
            });
        }
        if !(self.ring_radius.is_finite() && self.ring_radius > self.sun_radius) {
            return Err(DtmError::InvalidParams {
                name: "R",
                reason: format!(
                    "must satisfy R > r (R = {}, r = {})",
                    self.ring_radius, self.sun_radius
                ),
            });
        }
        for (name, n) in [("n1", self.n1), ("n2", self.n2)] {
            if !(n.is_finite() && n != 0.0) {
                return Err(DtmError::InvalidParams {
                    name,
                    reason: format!("must be finite and non-zero, got {n}"),
                });
            }
        }
        Ok(())
    }
}

/// All gear angles of the planetary stage for given ring and sun angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GearAngles {
    pub theta_r: f64,
    pub theta_s: f64,
    /// Carrier angle.
    pub theta_c: f64,
    /// Carrier angle relative to the sun.
    pub theta_cs: f64,
    /// Planet self-rotation.
    pub theta_p: f64,
}

impl GearAngles {
    pub fn new(theta_r: f64, theta_s: f64, p: &DtmParams) -> Self {
        let (big, small) = (p.ring_radius, p.sun_radius);
        Self {
            theta_r,
            theta_s,
            theta_c: (theta_r * big + theta_s * small) / (big + small),
            theta_cs: big * (theta_r - theta_s) / (big + small),
            theta_p: (theta_r * big - theta_s * small) / (big - small),
        }
    }
}

/// Ring and sun angles to `(θ_pos, θ_pivot)`.
pub fn forward(theta_r: f64, theta_s: f64, p: &DtmParams) -> (f64, f64) {
    let alpha = p.alpha();
    let theta_pos = alpha * theta_r + p.beta() * theta_s;
    let theta_pivot = alpha * (theta_r - theta_s);
    (theta_pos, theta_pivot)
}

/// `(θ_pos, θ_pivot)` back to ring and sun angles.
pub fn inverse(theta_pos: f64, theta_pivot: f64, p: &DtmParams) -> (f64, f64) {
    let theta_r = theta_pos + p.radius_ratio() * theta_pivot;
    let theta_s = theta_pos - theta_pivot;
    (theta_r, theta_s)
}

/// Ring and sun torques balancing a carrier torque `tau_c`.
pub fn torque_split(tau_c: f64, p: &DtmParams) -> (f64, f64) {
    (-tau_c * p.alpha(), -tau_c * p.beta())
}

/// Carrier velocity for ring velocity `omega_ring` and sun velocity `omega_sun`.
pub fn carrier_velocity(omega_ring: f64, omega_sun: f64, p: &DtmParams) -> f64 {
    p.alpha() * omega_ring + p.beta() * omega_sun
}

/// Power delivered through each member, W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub ring: f64,
    pub sun: f64,
    pub carrier: f64,
}

/// Power flow for ring velocity `omega_ring`, sun velocity `omega_sun` and
/// carrier torque `tau_c`. The ring and sun shares are the powers their
/// drives supply against the split torques.
pub fn power_split(omega_ring: f64, omega_sun: f64, tau_c: f64, p: &DtmParams) -> PowerSplit {
    let (tau_r, tau_s) = torque_split(tau_c, p);
    PowerSplit {
        ring: -tau_r * omega_ring,
        sun: -tau_s * omega_sun,
        carrier: tau_c * carrier_velocity(omega_ring, omega_sun, p),
    }
}

/// Power transmission ratio: nominal output power over the combined
/// nominal motor power.
pub fn ptr_report(
    motor_powers: (f64, f64),
    nominal_torque: f64,
    nominal_velocity: f64,
) -> Result<f64, DtmError> {
    let total = motor_powers.0 + motor_powers.1;
    if !(total > 0.0) {
        return Err(DtmError::ZeroPower(total));
    }
    Ok(nominal_torque * nominal_velocity / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::RPM;

    fn p() -> DtmParams {
        DtmParams::default()
    }

    #[test]
    fn alpha_is_two_thirds() {
        assert!((p().alpha() - 2.0 / 3.0).abs() < 1e-15);
        p().validate().unwrap();
    }

    #[test]
    fn forward_examples() {
        let (pos, piv) = forward(0.7, 0.7, &p());
        assert!((pos - 0.7).abs() < 1e-15);
        assert_eq!(piv, 0.0);
        let (pos, piv) = forward(1.0, 0.0, &p());
        assert!((pos - 2.0 / 3.0).abs() < 1e-15 && (piv - 2.0 / 3.0).abs() < 1e-15);
        let (pos, piv) = forward(0.0, 1.0, &p());
        assert!((pos - 1.0 / 3.0).abs() < 1e-15 && (piv + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse(0.4, 0.0, &p()), (0.4, 0.4));
        let (r, s) = inverse(0.0, 1.0, &p());
        assert!((r - 0.5).abs() < 1e-15 && (s + 1.0).abs() < 1e-15);
        let (r, s) = inverse(1.0, 1.0, &p());
        assert!((r - 1.5).abs() < 1e-15 && s.abs() < 1e-15);
        let (pos, piv) = forward(r, s, &p());
        assert!((pos - 1.0).abs() < 1e-15 && (piv - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gear_angles_agree_with_forward() {
        let g = GearAngles::new(0.3, -1.2, &p());
        let (pos, piv) = forward(0.3, -1.2, &p());
        assert!((g.theta_c - pos).abs() < 1e-15);
        assert!((g.theta_cs - piv).abs() < 1e-15);
        assert!((g.theta_cs - (g.theta_c - g.theta_s)).abs() < 1e-15);
        // planet self-rotation from the arc-length constraints
        let rp = (p().ring_radius - p().sun_radius) / 2.0;
        let rc = (p().ring_radius + p().sun_radius) / 2.0;
        assert!((g.theta_r * p().ring_radius - (g.theta_c * rc + g.theta_p * rp)).abs() < 1e-15);
        assert!((g.theta_s * p().sun_radius - (g.theta_c * rc - g.theta_p * rp)).abs() < 1e-15);
    }

    #[test]
    fn torque_split_examples() {
        assert_eq!(torque_split(0.0, &p()), (0.0, 0.0));
        let (r, s) = torque_split(54.0, &p());
        assert!((r + 36.0).abs() < 1e-12 && (s + 18.0).abs() < 1e-12);
        for tau in [-40.0, -0.3, 1e-3, 7.0, 55.7] {
            let (r, s) = torque_split(tau, &p());
            assert!(((r / s).abs() - 2.0).abs() < 1e-12);
            assert!((r + s + tau).abs() < 1e-12);
        }
    }

    #[test]
    fn power_split_examples() {
        let ps = power_split(2.0, 2.0, 9.0, &p());
        assert!((ps.ring / ps.sun - 2.0).abs() < 1e-12);
        let ps = power_split(0.0, 3.0, 5.0, &p());
        assert_eq!(ps.ring, 0.0);
        assert!((ps.sun - ps.carrier).abs() < 1e-12);
        let ps = power_split(1.0, -2.0, 10.0, &p());
        assert!(ps.carrier.abs() < 1e-12);
        assert!((ps.ring + ps.sun).abs() < 1e-12);
    }

    #[test]
    fn power_shares_follow_radius_weighted_velocities() {
        let (big, small) = (p().ring_radius, p().sun_radius);
        let (om, w, tau) = (1.3, -0.4, 6.0);
        let ps = power_split(om, w, tau, &p());
        let scale = ps.carrier / (om * big + w * small);
        assert!((ps.ring - scale * om * big).abs() < 1e-12);
        assert!((ps.sun - scale * w * small).abs() < 1e-12);
    }

    #[test]
    fn ptr_examples() {
        let ptr = ptr_report((150.0, 80.0), 225.4, 1.0).unwrap();
        assert!((ptr - 0.98).abs() < 1e-12);
        let ptr = ptr_report((150.0, 80.0), 55.7, 43.0 * RPM).unwrap();
        assert!((ptr - 1.09).abs() < 0.005, "{ptr}");
        assert!(matches!(ptr_report((0.0, 0.0), 1.0, 1.0), Err(DtmError::ZeroPower(_))));
    }

    #[test]
    fn validation() {
        let mut bad = p();
        bad.ring_radius = mm(18.0);
        bad.sun_radius = mm(36.0);
        assert!(matches!(bad.validate(), Err(DtmError::InvalidParams { name: "R", .. })));
        let mut bad = p();
        bad.n2 = 0.0;
        assert!(bad.validate().is_err());
    }
}
