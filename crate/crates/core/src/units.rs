//! Unit helpers for the I/O boundary.
//!
//! Everything inside the crate is SI (m, rad, N, N·m, s). Configuration
//! files, CSV traces and printed summaries use millimetres and degrees.

use std::f64::consts::PI;

/// Metres per millimetre.
pub const MM: f64 = 1e-3;

/// Radians per second in one revolution per minute.
pub const RPM: f64 = 2.0 * PI / 60.0;

pub fn mm(value_mm: f64) -> f64 {
    value_mm * MM
}

pub fn to_mm(value_m: f64) -> f64 {
    value_m / MM
}

pub fn deg(value_deg: f64) -> f64 {
    value_deg.to_radians()
}

pub fn to_deg(value_rad: f64) -> f64 {
    value_rad.to_degrees()
}

/// Converts a torsional stiffness from N·m/rad to N·m/°.
pub fn nm_per_deg(stiffness_nm_per_rad: f64) -> f64 {
    stiffness_nm_per_rad * PI / 180.0
}

/// Converts a torsional stiffness from N·m/° to N·m/rad.
pub fn from_nm_per_deg(stiffness_nm_per_deg: f64) -> f64 {
    stiffness_nm_per_deg * 180.0 / PI
}
