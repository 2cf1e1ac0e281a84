//! Unit system and physical constants.
//!
//! Everything inside the crate runs in Hartree atomic units
//! (ħ = m_e = e = 4πε₀ = 1, c = 1/α). In these units the Bohr radius and the
//! Bohr angular frequency ω₀ = α²m c²/ħ are both 1, energies are in Hartree
//! and times in t_au = ħ/E_h.
//!
//! The fine-structure constant is a parameter of [`Units`] rather than a hard
//! constant so that runs can use an enhanced coupling: both the zero-point
//! spectrum and the radiation-reaction time scale as α³, and their ratio (which
//! fixes stationary SED statistics) does not depend on α.

use std::f64::consts::PI;

/// CODATA fine-structure constant.
pub const FINE_STRUCTURE: f64 = 1.0 / 137.035999;

/// Proton mass in electron masses.
pub const PROTON_MASS: f64 = 1836.15267343;

/// Hartree energy in electron-volts.
pub const HARTREE_EV: f64 = 27.211386245988;

/// Bohr radius in metres.
pub const BOHR_RADIUS_M: f64 = 5.29177210903e-11;

/// Atomic unit of time in seconds.
pub const ATOMIC_TIME_S: f64 = 2.4188843265857e-17;

/// Electron rest energy in electron-volts.
pub const ELECTRON_MASS_EV: f64 = 510_998.950;

/// The constants the electrodynamics formulas are written in terms of.
///
/// The elementary charge and electron mass are always 1; only ħ, c and ε₀ vary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Units {
    pub hbar: f64,
    pub c: f64,
    pub eps0: f64,
}

impl Units {
    /// Hartree atomic units with the physical fine-structure constant.
    pub fn atomic() -> Self {
        Self::atomic_with_alpha(FINE_STRUCTURE)
    }

    /// Hartree atomic units with c = 1/alpha.
    pub fn atomic_with_alpha(alpha: f64) -> Self {
        Self {
            hbar: 1.0,
            c: 1.0 / alpha,
            eps0: 1.0 / (4.0 * PI),
        }
    }

    /// ħ = c = ε₀ = 1.
    pub fn natural() -> Self {
        Self {
            hbar: 1.0,
            c: 1.0,
            eps0: 1.0,
        }
    }

    pub fn mu0(&self) -> f64 {
        1.0 / (self.eps0 * self.c * self.c)
    }

    /// e²/(4πε₀ħc) for unit charge.
    pub fn alpha(&self) -> f64 {
        1.0 / (4.0 * PI * self.eps0 * self.hbar * self.c)
    }

    /// Radiation-reaction time e²/(6πε₀ m c³) of a unit-mass unit charge;
    /// equals (2/3)α³ in atomic units.
    pub fn tau_e(&self) -> f64 {
        1.0 / (6.0 * PI * self.eps0 * self.c.powi(3))
    }
}

impl Default for Units {
    fn default() -> Self {
        Self::atomic()
    }
}

pub fn hartree_to_ev(e: f64) -> f64 {
    e * HARTREE_EV
}

pub fn bohr_to_metres(r: f64) -> f64 {
    r * BOHR_RADIUS_M
}

pub fn atomic_time_to_seconds(t: f64) -> f64 {
    t * ATOMIC_TIME_S
}
