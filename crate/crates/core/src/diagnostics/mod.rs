//! Energy bookkeeping and ensemble statistics.
//!
//! A stationary state of the driven, radiating electron is not an equilibrium
//! of a closed system: the field does work on the charge at a mean rate
//! `⟨P_in⟩` and the charge radiates at `⟨P_rad⟩`, and the two balance while
//! each stays finite. [`throughput_report`] measures that flow on a window of
//! an [`EnergyLedger`]; the histogram and comparison helpers test the
//! stationary distributions against their quantum-mechanical references.

mod compare;
mod histogram;
mod ledger;

pub use compare::{
    compare_distributions, gaussian_reference, qm_ground_state_radial, reference_bin_densities,
    DistributionMetrics, Moments, ZERO_REFERENCE_THRESHOLD,
};
pub use histogram::{for_each_weighted, position_histogram_1d, radial_histogram, Axis, Histogram};
pub use ledger::{throughput_report, EnergyLedger, LedgerSample, LedgerSum, ThroughputReport};

use thiserror::Error;

use crate::units::Units;
use crate::zeropoint::Vec3;

#[derive(Debug, Error, PartialEq)]
pub enum DiagnosticsError {
    #[error("window [{0}, {1}] contains fewer than two ledger samples")]
    EmptyWindow(f64, f64),
    #[error("no samples survive the burn-in")]
    NoSamplesAfterBurnIn,
    #[error("histogram edges must be strictly increasing with at least two entries")]
    BadEdges,
    #[error("histograms have different edges")]
    EdgeMismatch,
    #[error("ledgers are sampled on different time grids")]
    GridMismatch,
    #[error("histogram has zero total weight")]
    EmptyHistogram,
}

/// Larmor power of a unit charge, `e²|a|²/(6πε₀c³)` = (2/3)α³|a|² in
/// atomic units.
pub fn larmor_power(units: &Units, a: &Vec3) -> f64 {
    units.tau_e() * a.norm_squared()
}

/// Power delivered by the field to the electron, `(−e)E·v` = −E·v.
pub fn input_power(e_field: &Vec3, v: &Vec3) -> f64 {
    -e_field.dot(v)
}
