//! Stochastic electrodynamics toolkit.
//!
//! A classical point electron is driven by a random, Lorentz-invariant
//! zero-point radiation field and damped by its own radiation. The crate
//! synthesizes the field ([`zeropoint`]), evaluates point-particle near
//! fields ([`nearfield`]), integrates radiation-damped trajectories
//! ([`dynamics`]), keeps the energy books and compares stationary
//! distributions with their quantum references ([`diagnostics`]), and runs
//! reproducible ensembles from flat config files ([`harness`]).
//!
//! Everything is in atomic units: ħ = m_e = e = 4πε₀ = 1, so c = 1/α.
//!
//! ```
//! use sedlab::units::Units;
//! use sedlab::zeropoint::{sample_modes, efield_dipole, FieldSpec};
//! use rand::SeedableRng;
//!
//! let spec = FieldSpec::new(0.3, 3.0, 50, 4, 0.5, 7).unwrap();
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.seed());
//! let field = sample_modes(&spec, &Units::atomic(), &mut rng);
//! let e = efield_dipole(&field, 0.0);
//! assert!(e.norm().is_finite());
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dynamics;
pub mod harness;
pub mod nearfield;
pub mod units;
pub mod zeropoint;

pub use units::Units;
pub use zeropoint::Vec3;
