//! Hydrogen in the zero-point field: how many orbits stay bound, and where
//! the radial occupancy peaks compared with 4r²e^{−2r}.
//!
//! cargo run --release --example hydrogen_stability

use sedlab::harness::{resolve_config, simulate_ensemble};

fn main() {
    let sets: Vec<String> = ["n_traj=10", "t_end=628.3", "burn_in=62.8"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let config = resolve_config("hydrogen", None, &sets, None, Some(3), None, false).unwrap();
    let ens = simulate_ensemble(&config).unwrap();
    let c = ens.status_counts;
    println!(
        "completed {}, ionized {}, diverged {} (bound fraction {:.2})",
        c.completed,
        c.ionized,
        c.diverged,
        ens.bound_fraction()
    );
    match ens.radial_metrics() {
        Ok(m) => println!(
            "radial peak {:.3} a0 (reference {:.3}), KL {:.3}, excluded mass {:.2e}",
            m.hist_peak, m.reference_peak, m.kl, m.excluded_mass
        ),
        Err(e) => println!("no radial statistics: {e}"),
    }
}
