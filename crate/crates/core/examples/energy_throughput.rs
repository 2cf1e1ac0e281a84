//! Energy flows through the driven, radiating oscillator: on the stationary
//! window the field's mean input power balances the mean radiated power.
//!
//! cargo run --release --example energy_throughput

use sedlab::harness::{resolve_config, simulate_ensemble};

fn main() {
    let sets: Vec<String> = ["n_traj=10", "t_end=1000", "burn_in=300", "dt_divisor=50"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let config = resolve_config("oscillator", None, &sets, None, Some(11), None, false).unwrap();
    let ens = simulate_ensemble(&config).unwrap();
    let t = ens.throughput().unwrap();
    println!("window [{:.0}, {:.0}] t_au", t.window.0, t.window.1);
    println!("<P_in>  = {:.5e}", t.mean_p_in);
    println!("<P_rad> = {:.5e}", t.mean_p_rad);
    println!("drift   = {:+.3e}", t.mech_drift);
    println!(
        "residual |P_in - P_rad - drift| / P_rad = {:.4}",
        t.residual
    );

    let ledger = ens.mean_ledger();
    let last = ledger.samples().last().unwrap();
    println!(
        "after {:.0} t_au: {:.3} Hartree in, {:.3} radiated, mechanical energy {:.3}",
        last.t, last.work_in, last.radiated, last.mech
    );
}
