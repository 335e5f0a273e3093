//! CODATA 2018 SI constants. Every physical constant used by the crate comes from here.

use std::f64::consts::PI;

/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Speed of light, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;
/// Planck constant, J s.
pub const H_PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = H_PLANCK / (2.0 * PI);
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Bohr radius, m.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
/// Hartree energy, J.
pub const HARTREE: f64 = 4.359_744_722_207_1e-18;
/// Rydberg constant for infinite nuclear mass, 1/m.
pub const RYDBERG_INF: f64 = 10_973_731.568_160;
/// Electron volt, J.
pub const EV: f64 = E_CHARGE;

/// Angular frequency (rad/s) of a wavenumber given in cm^-1.
pub fn wavenumber_to_omega(cm: f64) -> f64 {
    2.0 * PI * C_LIGHT * cm * 100.0
}

/// Angular frequency (rad/s) of an energy difference given in hartree.
pub fn hartree_to_omega(eh: f64) -> f64 {
    eh * HARTREE / HBAR
}

/// Convert a frequency in Hz to angular frequency.
pub fn hz_to_omega(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// The full set of constants as a single value, for reports.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub e: f64,
    pub epsilon_0: f64,
    pub c: f64,
    pub h: f64,
    pub hbar: f64,
    pub k_b: f64,
    pub rydberg: f64,
    pub bohr_radius: f64,
}

pub const CODATA: PhysicalConstants = PhysicalConstants {
    e: E_CHARGE,
    epsilon_0: EPSILON_0,
    c: C_LIGHT,
    h: H_PLANCK,
    hbar: HBAR,
    k_b: K_B,
    rydberg: RYDBERG_INF,
    bohr_radius: BOHR_RADIUS,
};
