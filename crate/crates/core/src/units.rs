//! SI constants and the GHz <-> rad/ns boundary conversions.
//!
//! Internally every frequency and rate is an angular frequency in rad/ns and
//! every time is in ns. User-facing values are ordinary frequencies in GHz.

use std::f64::consts::PI;

/// Planck constant, J s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Resistance quantum h/e², Ω.
pub const RESISTANCE_QUANTUM: f64 = PLANCK / (ELEMENTARY_CHARGE * ELEMENTARY_CHARGE);

#[inline]
pub fn ghz_to_angular(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz
}

#[inline]
pub fn angular_to_ghz(w: f64) -> f64 {
    w / (2.0 * PI)
}

/// Josephson frequency 2eV/ħ in rad/ns for a bias in µV.
pub fn josephson_frequency(bias_uv: f64) -> f64 {
    2.0 * ELEMENTARY_CHARGE * bias_uv * 1e-6 / HBAR * 1e-9
}

/// Bias in µV whose Josephson frequency is `w` rad/ns.
pub fn bias_for_josephson_frequency(w: f64) -> f64 {
    HBAR * w * 1e9 / (2.0 * ELEMENTARY_CHARGE) * 1e6
}
