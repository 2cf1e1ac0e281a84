//! Synthesize zero-point field realizations and check their energy density
//! against the spectral integral over the window.
//!
//! cargo run --release --example zero_point_field

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sedlab::units::Units;
use sedlab::zeropoint::{
    efield_dipole, sample_modes, spectral_density, window_energy_density, FieldSpec,
};

fn main() {
    let units = Units::atomic();
    let spec = FieldSpec::new(0.3, 3.0, 600, 16, 0.5, 2024).expect("valid window");
    println!(
        "{} modes, cell width {:.4}, recurrence time {:.1} t_au",
        spec.mode_count(),
        spec.cell_width(),
        spec.recurrence_time()
    );
    for w in [0.5, 1.0, 2.0] {
        println!("rho_ZP({w}) = {:.4e}", spectral_density(&units, w).unwrap());
    }

    let target = window_energy_density(&units, spec.omega_min(), spec.omega_max());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed());
    let n = 500;
    let mut sum = 0.0;
    for _ in 0..n {
        let field = sample_modes(&spec, &units, &mut rng);
        sum += units.eps0 * efield_dipole(&field, 0.0).norm_squared();
    }
    let measured = sum / n as f64;
    println!(
        "eps0<E^2> over {n} realizations = {measured:.4e}, window integral = {target:.4e} ({:+.2}%)",
        100.0 * (measured / target - 1.0)
    );
}
