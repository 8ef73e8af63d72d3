//! Physical constants and SI <-> natural-unit conversion.
//!
//! Inside the library `c = 1`: lengths are meters and times are meters of
//! light travel (`c·t`). Accelerations therefore carry units of 1/m.
//! Conversion happens only at the boundary (CLI, config ingestion).

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Newtonian gravitational constant, m³ kg⁻¹ s⁻² (CODATA 2018).
pub const GRAVITATIONAL_CONSTANT: f64 = 6.674_30e-11;

#[inline]
pub fn seconds_to_natural(t: f64) -> f64 {
    t * SPEED_OF_LIGHT
}

#[inline]
pub fn natural_to_seconds(t: f64) -> f64 {
    t / SPEED_OF_LIGHT
}

/// m/s² -> 1/m.
#[inline]
pub fn acceleration_to_natural(a: f64) -> f64 {
    a / (SPEED_OF_LIGHT * SPEED_OF_LIGHT)
}

/// 1/m -> m/s².
#[inline]
pub fn acceleration_to_si(a: f64) -> f64 {
    a * SPEED_OF_LIGHT * SPEED_OF_LIGHT
}

/// Angular frequency per unit natural time (rad/m) -> rad/s.
#[inline]
pub fn frequency_to_si(omega: f64) -> f64 {
    omega * SPEED_OF_LIGHT
}
