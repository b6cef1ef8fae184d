//! Variable stiffness mechanism: a lever with a sliding pivot driven by a
//! hypocycloidal straight-line gear pair.
//!
//! The pivot sits at distance `l_s` from the spring end of the lever. The
//! rack on the output side moves `h_p = θ_τ·r_τ` and the lever ratio
//! `l_s / (l_t - l_s)` maps that onto the spring, so the output torque is
//! linear in the deflection angle with a slope that depends on `l_s` only.
//!
//! The equivalent rack compression stiffness cancels out of every law
//! below and is therefore not a parameter.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{deg, mm};

/// Relative slack applied when checking a deflection against its limit,
/// so that evaluating exactly at the limit is accepted.
const LIMIT_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VsmError {
    #[error("pivot position {l_s} m is outside [0, {l_t}] m")]
    PivotOutOfRange { l_s: f64, l_t: f64 },
    #[error("desired stiffness must be non-negative and not NaN, got {0} N·m/rad")]
    InvalidStiffness(f64),
    #[error("deflection {theta_tau} rad exceeds the limit of {limit} rad")]
    DeflectionLimit { theta_tau: f64, limit: f64 },
    #[error("invalid VSM parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },
}

/// Geometry and spring constants of the mechanism, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VsmParams {
    /// Spring stiffness, N/m.
    pub k_s: f64,
    /// Total pivot stroke, m.
    pub l_t: f64,
    /// Internal gear reference radius, m.
    pub r0: f64,
    /// Pivot gear reference radius, m.
    pub r_g: f64,
    /// Gear-shaft reference radius, m.
    pub r_tau: f64,
    /// Maximum spring deflection, m.
    pub h_s_max: f64,
    /// Mechanical deflection cap, rad.
    pub theta_tau_cap: f64,
}

impl Default for VsmParams {
    fn default() -> Self {
        Self {
            k_s: 81.7e3,
            l_t: mm(60.0),
            r0: mm(30.0),
            r_g: mm(15.0),
            r_tau: mm(15.0),
            h_s_max: mm(6.0),
            theta_tau_cap: deg(30.0),
        }
    }
}

impl VsmParams {
    pub fn validate(&self) -> Result<(), VsmError> {
        let positive = [
            ("k_s", self.k_s),
            ("l_t", self.l_t),
            ("r0", self.r0),
            ("r_g", self.r_g),
            ("r_tau", self.r_tau),
            ("h_s_max", self.h_s_max),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(VsmError::InvalidParams {
                    name,
                    reason: format!("must be finite and > 0, got {value}"),
                });
            }
        }
        if !close(self.r0, 2.0 * self.r_g) {
            return Err(VsmError::InvalidParams {
                name: "r_g",
                reason: format!("r0 must equal 2·r_g (r0 = {}, r_g = {})", self.r0, self.r_g),
            });
        }
        if !close(self.l_t, 2.0 * self.r0) {
            return Err(VsmError::InvalidParams {
                name: "l_t",
                reason: format!("l_t must equal 2·r0 (l_t = {}, r0 = {})", self.l_t, self.r0),
            });
        }
        if !(self.theta_tau_cap > 0.0 && self.theta_tau_cap < PI / 2.0) {
            return Err(VsmError::InvalidParams {
                name: "theta_tau_cap",
                reason: format!("must lie in (0°, 90°), got {} rad", self.theta_tau_cap),
            });
        }
        Ok(())
    }

    /// `r_τ²·k_s`, the stiffness at lever ratio one (N·m/rad).
    pub fn unit_ratio_stiffness(&self) -> f64 {
        self.r_tau * self.r_tau * self.k_s
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Output torsional stiffness. The pivot at the end of its stroke makes the
/// joint rigid, which is kept out of floating-point arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stiffness {
    /// N·m/rad.
    Finite(f64),
    Rigid,
}

impl Stiffness {
    pub fn finite(self) -> Option<f64> {
        match self {
            Stiffness::Finite(value) => Some(value),
            Stiffness::Rigid => None,
        }
    }

    pub fn is_rigid(self) -> bool {
        matches!(self, Stiffness::Rigid)
    }
}

/// Pivot gear revolution angle together with the resulting pivot position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotState {
    pub theta_pivot: f64,
    pub l_s: f64,
}

impl PivotState {
    pub fn from_angle(theta_pivot: f64, p: &VsmParams) -> Self {
        Self {
            theta_pivot,
            l_s: pivot_position(theta_pivot, p),
        }
    }
}

/// Rack and spring displacements and forces at a given deflection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpringState {
    /// Rack travel, m.
    pub h_p: f64,
    /// Spring compression, m.
    pub h_s: f64,
    /// Force on the rack, N.
    pub f_p: f64,
    /// Spring force, N.
    pub f_s: f64,
}

/// Pivot position along the lever for a pivot gear revolution angle.
pub fn pivot_position(theta_pivot: f64, p: &VsmParams) -> f64 {
    p.r0 * (1.0 - theta_pivot.cos())
}

/// Inverse of [`pivot_position`] on the half revolution `[0, π]`.
pub fn pivot_angle_from_position(l_s: f64, p: &VsmParams) -> Result<f64, VsmError> {
    check_pivot(l_s, p)?;
    Ok((1.0 - l_s / p.r0).clamp(-1.0, 1.0).acos())
}

/// Pivot angle for `l_s` on whichever branch lies closest to `near`.
///
/// The pivot gear may keep turning in one direction; a position reference
/// stays continuous in angle if `near` is a guess at the next angle.
pub fn nearest_pivot_angle(l_s: f64, near: f64, p: &VsmParams) -> Result<f64, VsmError> {
    let base = pivot_angle_from_position(l_s, p)?;
    let tau = 2.0 * std::f64::consts::PI;
    let k = ((near - base) / tau).round();
    let up = base + k * tau;
    let k = ((near + base) / tau).round();
    let down = -base + k * tau;
    let (du, dd) = ((up - near).abs(), (down - near).abs());
    Ok(if du < dd || (du == dd && up > down) { up } else { down })
}

/// Lever ratio `l_s / (l_t - l_s)`; infinite at the end of the stroke.
pub fn lever_ratio(l_s: f64, p: &VsmParams) -> f64 {
    l_s / (p.l_t - l_s)
}

pub fn stiffness(l_s: f64, p: &VsmParams) -> Stiffness {
    if l_s >= p.l_t {
        return Stiffness::Rigid;
    }
    let ratio = lever_ratio(l_s, p);
    Stiffness::Finite(p.unit_ratio_stiffness() * ratio * ratio)
}

/// Derivative of the finite stiffness with respect to the pivot position,
/// N·m/rad per metre. Zero at the rigid end, where it is not used.
pub fn stiffness_slope(l_s: f64, p: &VsmParams) -> f64 {
    if l_s >= p.l_t {
        return 0.0;
    }
    let gap = p.l_t - l_s;
    2.0 * p.unit_ratio_stiffness() * lever_ratio(l_s, p) * p.l_t / (gap * gap)
}

/// Pivot position that produces the desired stiffness (N·m/rad).
///
/// `+∞` maps to the rigid end of the stroke.
pub fn pivot_from_stiffness(delta_d: f64, p: &VsmParams) -> Result<f64, VsmError> {
    if delta_d.is_nan() || delta_d < 0.0 {
        return Err(VsmError::InvalidStiffness(delta_d));
    }
    if delta_d.is_infinite() {
        return Ok(p.l_t);
    }
    let ratio = (delta_d / p.unit_ratio_stiffness()).sqrt();
    if !ratio.is_finite() {
        return Ok(p.l_t);
    }
    Ok(p.l_t * ratio / (1.0 + ratio))
}

/// Largest admissible deflection: the smaller of the mechanical cap and the
/// deflection that bottoms out the spring.
pub fn max_deflection(l_s: f64, p: &VsmParams) -> f64 {
    if l_s >= p.l_t {
        return 0.0;
    }
    if l_s <= 0.0 {
        return p.theta_tau_cap;
    }
    let spring_limit = p.h_s_max * (p.l_t - l_s) / (p.r_tau * l_s);
    spring_limit.min(p.theta_tau_cap)
}

/// Pivot position where the spring limit takes over from the mechanical cap.
pub fn crossover_position(p: &VsmParams) -> f64 {
    p.h_s_max * p.l_t / (p.r_tau * p.theta_tau_cap + p.h_s_max)
}

/// Output torque at deflection `theta_tau`. One spring of the pair engages
/// per direction, so the law is odd in the deflection.
///
/// A rigid joint only admits zero deflection and reports zero torque; the
/// reaction is then carried by the structure.
pub fn torque(theta_tau: f64, l_s: f64, p: &VsmParams) -> Result<f64, VsmError> {
    check_deflection(theta_tau, l_s, p)?;
    Ok(match stiffness(l_s, p) {
        Stiffness::Finite(delta) => delta * theta_tau,
        Stiffness::Rigid => 0.0,
    })
}

pub fn spring_state(theta_tau: f64, l_s: f64, p: &VsmParams) -> Result<SpringState, VsmError> {
    check_deflection(theta_tau, l_s, p)?;
    if l_s >= p.l_t {
        return Ok(SpringState {
            h_p: 0.0,
            h_s: 0.0,
            f_p: 0.0,
            f_s: 0.0,
        });
    }
    let ratio = lever_ratio(l_s, p);
    let h_p = theta_tau * p.r_tau;
    let h_s = h_p * ratio;
    let f_s = p.k_s * h_s;
    let f_p = f_s * ratio;
    Ok(SpringState { h_p, h_s, f_p, f_s })
}

/// Energy stored in the engaged spring, J.
pub fn elastic_energy(theta_tau: f64, l_s: f64, p: &VsmParams) -> Result<f64, VsmError> {
    let s = spring_state(theta_tau, l_s, p)?;
    Ok(0.5 * p.k_s * s.h_s * s.h_s)
}

fn check_pivot(l_s: f64, p: &VsmParams) -> Result<(), VsmError> {
    if !(l_s >= 0.0 && l_s <= p.l_t) {
        return Err(VsmError::PivotOutOfRange { l_s, l_t: p.l_t });
    }
    Ok(())
}

fn check_deflection(theta_tau: f64, l_s: f64, p: &VsmParams) -> Result<(), VsmError> {
    check_pivot(l_s, p)?;
    let limit = max_deflection(l_s, p);
    if !(theta_tau.abs() <= limit * (1.0 + LIMIT_SLACK)) {
        return Err(VsmError::DeflectionLimit { theta_tau, limit });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_branch_follows_a_turning_pivot() {
        let p = VsmParams::default();
        // at the ends of the stroke both branches are equally close, so the
        // guess must lead
        let mut prev = 0.0;
        for i in 1..=400 {
            let theta = i as f64 * 0.05;
            let got = nearest_pivot_angle(pivot_position(theta, &p), prev + 0.05, &p).unwrap();
            assert!((got - theta).abs() < 1e-6, "{theta} -> {got}");
            prev = got;
        }
        assert_eq!(nearest_pivot_angle(0.0, 0.0, &p).unwrap(), 0.0);
        assert!((nearest_pivot_angle(mm(60.0), 0.0, &p).unwrap() - std::f64::consts::PI).abs() < 1e-12);
    }
    use crate::units::{nm_per_deg, to_deg, to_mm};

    fn p() -> VsmParams {
        VsmParams::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn defaults_are_valid() {
        p().validate().unwrap();
    }

    #[test]
    fn pivot_position_examples() {
        assert_eq!(pivot_position(0.0, &p()), 0.0);
        assert!((to_mm(pivot_position(PI, &p())) - 60.0).abs() < 1e-12);
        assert!((to_mm(pivot_position(PI / 2.0, &p())) - 30.0).abs() < 1e-12);
    }

    #[test]
    fn pivot_angle_examples() {
        assert_eq!(pivot_angle_from_position(0.0, &p()).unwrap(), 0.0);
        let a = pivot_angle_from_position(mm(30.0), &p()).unwrap();
        assert!((to_deg(a) - 90.0).abs() < 1e-10);
        let a = pivot_angle_from_position(mm(45.0), &p()).unwrap();
        assert!((to_deg(a) - 120.0).abs() < 1e-10);
        assert!(rel(pivot_position(a, &p()), mm(45.0)) < 1e-12);
    }

    #[test]
    fn pivot_angle_rejects_out_of_range() {
        assert!(matches!(
            pivot_angle_from_position(mm(61.0), &p()),
            Err(VsmError::PivotOutOfRange { .. })
        ));
        assert!(pivot_angle_from_position(-1e-6, &p()).is_err());
    }

    #[test]
    fn stiffness_matches_reported_presets() {
        let low = nm_per_deg(stiffness(mm(30.0), &p()).finite().unwrap());
        let high = nm_per_deg(stiffness(mm(45.0), &p()).finite().unwrap());
        assert!(rel(low, 0.321) < 0.005, "low = {low}");
        assert!(rel(high, 2.888) < 0.005, "high = {high}");
        assert_eq!(stiffness(0.0, &p()), Stiffness::Finite(0.0));
        assert!(stiffness(mm(60.0), &p()).is_rigid());
    }

    #[test]
    fn pivot_from_stiffness_examples() {
        assert_eq!(pivot_from_stiffness(0.0, &p()).unwrap(), 0.0);
        let low = crate::units::from_nm_per_deg(0.321);
        let high = crate::units::from_nm_per_deg(2.888);
        assert!((to_mm(pivot_from_stiffness(low, &p()).unwrap()) - 30.0).abs() < 0.1);
        assert!((to_mm(pivot_from_stiffness(high, &p()).unwrap()) - 45.0).abs() < 0.1);
        assert_eq!(pivot_from_stiffness(f64::INFINITY, &p()).unwrap(), p().l_t);
        assert!(matches!(
            pivot_from_stiffness(-1.0, &p()),
            Err(VsmError::InvalidStiffness(_))
        ));
        assert!(pivot_from_stiffness(f64::NAN, &p()).is_err());
    }

    #[test]
    fn torque_examples() {
        assert_eq!(torque(0.0, mm(20.0), &p()).unwrap(), 0.0);
        let t = torque(deg(10.0), mm(30.0), &p()).unwrap();
        assert!(rel(t, 3.21) < 0.005, "{t}");
        let t = torque(deg(2.0), mm(45.0), &p()).unwrap();
        assert!(rel(t, 5.776) < 0.005, "{t}");
        let t = torque(-deg(2.0), mm(45.0), &p()).unwrap();
        assert!(rel(t, -5.776) < 0.005);
    }

    #[test]
    fn torque_rejects_deflection_beyond_limit() {
        let limit = max_deflection(mm(45.0), &p());
        match torque(limit * 1.01, mm(45.0), &p()) {
            Err(VsmError::DeflectionLimit { limit: l, .. }) => assert_eq!(l, limit),
            other => panic!("unexpected {other:?}"),
        }
        // exactly at the limit is admissible
        torque(limit, mm(45.0), &p()).unwrap();
    }

    #[test]
    fn max_deflection_examples() {
        assert!((to_deg(max_deflection(mm(10.0), &p())) - 30.0).abs() < 1e-12);
        assert!((to_deg(max_deflection(mm(26.0), &p())) - 30.0).abs() < 0.1);
        assert_eq!(max_deflection(mm(60.0), &p()), 0.0);
        assert_eq!(max_deflection(0.0, &p()), p().theta_tau_cap);
        // spring branch at the crossover equals the cap
        let x = crossover_position(&p());
        let spring = p().h_s_max * (p().l_t - x) / (p().r_tau * x);
        assert!(rel(spring, p().theta_tau_cap) < 1e-12);
        assert!((to_mm(x) - 26.0).abs() < 0.5);
    }

    #[test]
    fn spring_state_examples() {
        let s = spring_state(deg(30.0), 0.0, &p()).unwrap();
        assert!((to_mm(s.h_p) - 7.85).abs() < 0.01);
        assert_eq!(s.h_s, 0.0);

        let s = spring_state(0.0, mm(30.0), &p()).unwrap();
        assert_eq!((s.h_p, s.h_s, s.f_p, s.f_s), (0.0, 0.0, 0.0, 0.0));

        let s = spring_state(deg(10.0), mm(30.0), &p()).unwrap();
        assert!((to_mm(s.h_p) - 2.618).abs() < 1e-3);
        assert!(rel(s.h_s, s.h_p) < 1e-12);
    }

    #[test]
    fn rack_force_reproduces_torque() {
        for &(th, ls) in &[(0.1, 0.02), (-0.05, 0.04), (0.3, 0.01), (0.02, 0.055)] {
            let s = spring_state(th, ls, &p()).unwrap();
            let t = torque(th, ls, &p()).unwrap();
            assert!(rel(s.f_p * p().r_tau, t) < 1e-12);
        }
    }

    #[test]
    fn elastic_energy_examples() {
        // deflection that bottoms out the spring at 45 mm
        let ls = mm(45.0);
        let theta = max_deflection(ls, &p());
        let s = spring_state(theta, ls, &p()).unwrap();
        assert!(rel(s.h_s, p().h_s_max) < 1e-12);
        let e = elastic_energy(theta, ls, &p()).unwrap();
        assert!(rel(e, 1.47) < 0.005, "{e}");

        assert_eq!(elastic_energy(0.0, ls, &p()).unwrap(), 0.0);
        let e = elastic_energy(deg(10.0), mm(30.0), &p()).unwrap();
        assert!((e - 0.280).abs() < 1e-3, "{e}");
    }

    // Independent oracle: trapezoidal integration of the torque law.
    fn integrate_torque(theta: f64, ls: f64, steps: usize) -> f64 {
        let h = theta / steps as f64;
        let mut acc = 0.0;
        for i in 0..steps {
            let a = torque(h * i as f64, ls, &p()).unwrap();
            let b = torque(h * (i + 1) as f64, ls, &p()).unwrap();
            acc += 0.5 * (a + b) * h;
        }
        acc
    }

    #[test]
    fn energy_equals_work_of_torque() {
        for &(th, ls) in &[(deg(10.0), mm(30.0)), (0.05, mm(45.0)), (-0.2, mm(20.0))] {
            let e = elastic_energy(th, ls, &p()).unwrap();
            let w = integrate_torque(th, ls, 10_000);
            assert!(rel(w, e) < 1e-6, "{w} vs {e}");
        }
    }

    #[test]
    fn central_difference_slope_matches_stiffness() {
        for ls_mm in [5.0, 15.0, 30.0, 45.0, 55.0] {
            let ls = mm(ls_mm);
            let h = 1e-6;
            let th = 0.5 * max_deflection(ls, &p());
            let d = (torque(th + h, ls, &p()).unwrap() - torque(th - h, ls, &p()).unwrap()) / (2.0 * h);
            let k = stiffness(ls, &p()).finite().unwrap();
            assert!(rel(d, k) < 1e-6);
        }
    }

    #[test]
    fn stiffness_slope_matches_finite_difference() {
        for ls_mm in [5.0, 30.0, 50.0] {
            let ls = mm(ls_mm);
            let h = 1e-7;
            let fd = (stiffness(ls + h, &p()).finite().unwrap()
                - stiffness(ls - h, &p()).finite().unwrap())
                / (2.0 * h);
            assert!(rel(stiffness_slope(ls, &p()), fd) < 1e-6);
        }
    }

    #[test]
    fn stiffness_grows_without_bound_near_the_stroke_end() {
        let mid = stiffness(p().l_t / 2.0, &p()).finite().unwrap();
        let near = stiffness(0.999 * p().l_t, &p()).finite().unwrap();
        // (0.999 / 0.001)² ≈ 9.98e5
        assert!(near > 9.9e5 * mid);
        let nearer = stiffness(0.9995 * p().l_t, &p()).finite().unwrap();
        assert!(nearer > 1e6 * mid);
    }

    #[test]
    fn validation_catches_bad_geometry() {
        let mut bad = p();
        bad.k_s = -1.0;
        assert!(matches!(bad.validate(), Err(VsmError::InvalidParams { name: "k_s", .. })));
        let mut bad = p();
        bad.r_g = mm(14.0);
        assert!(bad.validate().is_err());
        let mut bad = p();
        bad.theta_tau_cap = deg(95.0);
        assert!(bad.validate().is_err());
    }
}
