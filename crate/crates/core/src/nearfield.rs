//! Near field of a slowly moving classical point particle.
//!
//! With `n̂` the unit vector from the particle to the field point,
//!
//! ```text
//! E = q/(4πε₀) n̂/r² + q/(4πε₀c²) n̂×(n̂×a)/r
//! B = μ₀/(4π) (3n̂(n̂·m) − m)/r³ + μ₀q/(4π) (v×n̂)/r² − μ₀q/(4πc) (n̂×a)/r
//! ```
//!
//! i.e. the Coulomb, magnetic-dipole and Lorentz terms plus the two radiation
//! terms. Each term is kept separately in [`FieldAtPoint`].

use std::f64::consts::PI;

use log::warn;
use thiserror::Error;

use crate::units::{Units, ELECTRON_MASS_EV, PROTON_MASS};
use crate::zeropoint::Vec3;

#[derive(Debug, Error, PartialEq)]
pub enum NearFieldError {
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("unknown particle preset `{0}`")]
    UnknownPreset(String),
}

/// Where a tabulated g-factor comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GSource {
    /// Measured value quoted alongside the neutron/neutrino argument.
    Quoted,
    /// Standard reference value from outside that discussion (CODATA).
    External,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GFactor {
    pub particle: &'static str,
    pub g: f64,
    pub uncertainty: f64,
    pub source: GSource,
}

pub const G_NEUTRON: f64 = -3.82608545;
pub const G_PROTON: f64 = 5.585694713;
pub const G_ELECTRON: f64 = -2.00231930436;

pub const G_FACTORS: [GFactor; 3] = [
    GFactor {
        particle: "neutron",
        g: G_NEUTRON,
        uncertainty: 0.00000090,
        source: GSource::Quoted,
    },
    GFactor {
        particle: "proton",
        g: G_PROTON,
        uncertainty: 0.000000046,
        source: GSource::Quoted,
    },
    GFactor {
        particle: "electron",
        g: G_ELECTRON,
        uncertainty: 0.00000000000035,
        source: GSource::External,
    },
];

pub fn g_factor(particle: &str) -> Option<&'static GFactor> {
    G_FACTORS.iter().find(|g| g.particle == particle)
}

/// Electromagnetic identity of a point particle (atomic units).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticleEM {
    /// Charge number, q = Z·e.
    pub z: i32,
    pub mass: f64,
    pub g: f64,
    /// Spin angular momentum in units of ħ.
    pub spin: Vec3,
    /// Replaces `g·(q/2m)·S` when set. Needed for neutral particles whose
    /// g-factor is defined against the nuclear magneton.
    pub moment_override: Option<Vec3>,
}

impl ParticleEM {
    pub fn new(z: i32, mass: f64, g: f64, spin: Vec3) -> Result<Self, NearFieldError> {
        if !(mass > 0.0) {
            return Err(NearFieldError::NonPositiveMass(mass));
        }
        Ok(Self {
            z,
            mass,
            g,
            spin,
            moment_override: None,
        })
    }

    pub fn charge(&self) -> f64 {
        self.z as f64
    }

    pub fn electron() -> Self {
        Self {
            z: -1,
            mass: 1.0,
            g: G_ELECTRON,
            spin: Vec3::new(0.0, 0.0, 0.5),
            moment_override: None,
        }
    }

    pub fn positron() -> Self {
        Self {
            z: 1,
            g: -G_ELECTRON,
            ..Self::electron()
        }
    }

    pub fn proton() -> Self {
        Self {
            z: 1,
            mass: PROTON_MASS,
            g: G_PROTON,
            spin: Vec3::new(0.0, 0.0, 0.5),
            moment_override: None,
        }
    }

    /// Neutron with its moment set to g_n μ_N S.
    pub fn neutron() -> Self {
        let spin = Vec3::new(0.0, 0.0, 0.5);
        let nuclear_magneton = 1.0 / (2.0 * PROTON_MASS);
        Self {
            z: 0,
            mass: 1838.68366173,
            g: G_NEUTRON,
            spin,
            moment_override: Some(spin * (G_NEUTRON * nuclear_magneton)),
        }
    }

    /// Spin-½ neutral lepton of 1.5 eV with no magnetic moment.
    pub fn neutrino() -> Self {
        Self {
            z: 0,
            mass: 1.5 / ELECTRON_MASS_EV,
            g: 0.0,
            spin: Vec3::new(0.0, 0.0, 0.5),
            moment_override: None,
        }
    }

    pub fn preset(name: &str) -> Result<Self, NearFieldError> {
        match name {
            "electron" => Ok(Self::electron()),
            "positron" => Ok(Self::positron()),
            "proton" => Ok(Self::proton()),
            "neutron" => Ok(Self::neutron()),
            "neutrino" => Ok(Self::neutrino()),
            other => Err(NearFieldError::UnknownPreset(other.to_string())),
        }
    }
}

/// `m = g·(q/2m)·S`, unless the particle carries an explicit override.
pub fn magnetic_moment(particle: &ParticleEM) -> Vec3 {
    particle
        .moment_override
        .unwrap_or_else(|| particle.spin * (particle.g * particle.charge() / (2.0 * particle.mass)))
}

/// Per-term electric and magnetic fields at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldAtPoint {
    pub e_charge: Vec3,
    pub e_rad: Vec3,
    pub b_dipole: Vec3,
    pub b_lorentz: Vec3,
    pub b_rad: Vec3,
    pub total_e: Vec3,
    pub total_b: Vec3,
}

impl FieldAtPoint {
    /// `(name, vector)` pairs in a fixed order, totals last.
    pub fn terms(&self) -> [(&'static str, Vec3); 7] {
        [
            ("e_charge", self.e_charge),
            ("e_rad", self.e_rad),
            ("b_dipole", self.b_dipole),
            ("b_lorentz", self.b_lorentz),
            ("b_rad", self.b_rad),
            ("total_e", self.total_e),
            ("total_b", self.total_b),
        ]
    }
}

/// Evaluate every term of the point-particle near field at distance `r`
/// along the unit vector `rhat`, for velocity `v` and acceleration `a`.
///
/// Speeds above 0.1c are accepted with a warning.
pub fn near_field(
    units: &Units,
    particle: &ParticleEM,
    rhat: &Vec3,
    r: f64,
    v: &Vec3,
    a: &Vec3,
) -> Result<FieldAtPoint, NearFieldError> {
    if !(r > 0.0) {
        return Err(NearFieldError::NonPositiveDistance(r));
    }
    if v.norm() > 0.1 * units.c {
        warn!(
            "speed {:.3e} exceeds 0.1c; the near-field formulas are nonrelativistic",
            v.norm()
        );
    }
    let q = particle.charge();
    let k_e = q / (4.0 * PI * units.eps0);
    let mu = units.mu0() / (4.0 * PI);
    let m = magnetic_moment(particle);
    let n = rhat;

    let e_charge = n * (k_e / (r * r));
    let e_rad = n.cross(&n.cross(a)) * (k_e / (units.c * units.c * r));
    let b_dipole = (n * (3.0 * n.dot(&m)) - m) * (mu / (r * r * r));
    let b_lorentz = v.cross(n) * (mu * q / (r * r));
    let b_rad = n.cross(a) * (-mu * q / (units.c * r));

    Ok(FieldAtPoint {
        e_charge,
        e_rad,
        b_dipole,
        b_lorentz,
        b_rad,
        total_e: e_charge + e_rad,
        total_b: b_dipole + b_lorentz + b_rad,
    })
}
