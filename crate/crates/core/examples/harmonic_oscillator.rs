//! Harmonic oscillator driven by the zero-point field: the stationary
//! position variance approaches ħ/(2mω) = 0.5.
//!
//! cargo run --release --example harmonic_oscillator

use sedlab::diagnostics::Axis;
use sedlab::harness::{resolve_config, simulate_ensemble};

fn main() {
    // enhanced coupling relaxes in ~50 t_au; 20 trajectories of 100 periods
    let sets: Vec<String> = ["n_traj=20", "t_end=628.3", "burn_in=157", "dt_divisor=50"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let config = resolve_config("oscillator", None, &sets, None, Some(7), None, false).unwrap();
    let ens = simulate_ensemble(&config).unwrap();
    println!(
        "{} trajectories, alpha = {}, reference variance {}",
        config.n_traj,
        config.alpha,
        0.5 / config.omega
    );
    for axis in Axis::ALL {
        let (var, se) = ens.variance_with_error(axis);
        let (kurt, kse) = ens.kurtosis_with_error(axis);
        println!(
            "{}: variance {var:.4} ± {se:.4}, excess kurtosis {kurt:+.3} ± {kse:.3}",
            axis.name()
        );
    }
    if let Ok(m) = ens.axis_metrics(Axis::X, config.omega) {
        println!("x histogram vs Gaussian: KL {:.4}, L2 {:.4}", m.kl, m.l2);
    }
}
