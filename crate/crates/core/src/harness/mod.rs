//! Configuration, run orchestration and persistence.
//!
//! A run is fully determined by its [`RunConfig`] (which includes the master
//! seed). Trajectory `i` draws everything from its own generator seeded with
//! [`trajectory_seed`]`(seed, i)`, and per-trajectory results are merged in
//! index order, so the worker count never changes a single output byte.

pub mod config;
mod output;
mod run;

pub use config::{
    key_help, resolve_config, ConfigBuilder, ConfigError, Experiment, InitKind, PotentialKind,
    RunConfig, KEYS,
};
pub use output::{
    read_key_values, read_table, write_key_values, HISTOGRAM_COLUMNS, LEDGER_COLUMNS,
};
pub use run::{
    field_check, nearfield_report, run_experiment, simulate_ensemble, EnsembleResult,
    FieldCheckResult, RunError, RunRecord, StatusCounts, TrajectoryOutcome,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer: a bijective 64-bit mix.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trajectory (or resample) `index` under `master`. Distinct indices
/// always give distinct seeds.
pub fn trajectory_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ index)
}

/// Seed of the single realization used when `shared_field` is on.
pub fn shared_field_seed(master: u64) -> u64 {
    mix64(mix64(master ^ 0x5EED_F1E1_D000_0000).rotate_left(17))
}

/// The generator every stream in a run uses.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
