//! Physical constants for the laboratory-unit boundary.
//!
//! Everything inside the library is in natural units. These constants are
//! used only where results are reported in seconds, attoseconds, or meters.

/// Reduced Planck constant in eV·s (CODATA).
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

/// Speed of light in m/s (exact).
pub const C_M_PER_S: f64 = 2.997_924_58e8;

/// Bohr radius in meters.
pub const BOHR_RADIUS_M: f64 = 5.3e-11;

/// Planck time in seconds.
pub const PLANCK_TIME_S: f64 = 5.391_16e-44;

/// One attosecond in seconds.
pub const ATTOSECOND_S: f64 = 1e-18;

/// Natural time unit (1/eV) expressed in seconds.
pub const EV_INV_S: f64 = HBAR_EV_S;

/// Convert a time in natural units (1/eV) to seconds.
pub fn ev_inv_to_seconds(t_natural: f64) -> f64 {
    t_natural * EV_INV_S
}

/// Convert a time in seconds to natural units (1/eV).
pub fn seconds_to_ev_inv(t_seconds: f64) -> f64 {
    t_seconds / EV_INV_S
}

/// Convert seconds to attoseconds.
pub fn seconds_to_as(t_seconds: f64) -> f64 {
    t_seconds / ATTOSECOND_S
}
