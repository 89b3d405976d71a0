use serde::{Deserialize, Serialize};

/// CODATA 2018 values, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// J·s
    pub hbar: f64,
    /// J/K
    pub kb: f64,
    /// F/m
    pub eps0: f64,
    /// m/s
    pub c: f64,
}

pub const CODATA: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    kb: 1.380_649e-23,
    eps0: 8.854_187_812_8e-12,
    c: 299_792_458.0,
};

impl Default for PhysicalConstants {
    fn default() -> Self {
        CODATA
    }
}

impl PhysicalConstants {
    /// Free-space spontaneous emission rate of a two-level dipole,
    /// `ω₀³|d|²/(3πε₀ħc³)`.
    pub fn free_space_decay_rate(&self, omega0: f64, dipole_sq: f64) -> f64 {
        omega0.powi(3) * dipole_sq
            / (3.0 * std::f64::consts::PI * self.eps0 * self.hbar * self.c.powi(3))
    }

    /// Inverse of [`Self::free_space_decay_rate`]: `|d|²` for a given rate.
    pub fn dipole_sq_from_decay_rate(&self, omega0: f64, gamma: f64) -> f64 {
        gamma * 3.0 * std::f64::consts::PI * self.eps0 * self.hbar * self.c.powi(3)
            / omega0.powi(3)
    }
}
