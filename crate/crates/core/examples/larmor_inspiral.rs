//! Classical collapse: with the field off, a circular Coulomb orbit loses
//! energy at the Larmor rate and spirals in.
//!
//! cargo run --release --example larmor_inspiral

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sedlab::dynamics::{
    simulate_trajectory, DtPolicy, InitialCondition, PotentialModel, TrajectorySetup,
};
use sedlab::units::Units;
use sedlab::zeropoint::FieldSpec;

fn main() {
    // α = 0.1 speeds the collapse up: r³ = 1 − 6τt reaches zero at t ≈ 250
    let units = Units::atomic_with_alpha(0.1);
    let tau = units.tau_e();
    let setup = TrajectorySetup {
        field_spec: FieldSpec::new(0.3, 3.0, 600, 16, 0.5, 0).unwrap(),
        field_on: false,
        units,
        potential: PotentialModel::Coulomb,
        radiation_reaction: true,
        init: InitialCondition::Circular {
            radius: 1.0,
            eccentricity: 0.0,
        },
        t_end: 240.0,
        dt: DtPolicy::Auto { divisor: 400.0 },
        r_ionize: 25.0,
        r_collapse: 0.05,
        stride: 20.0,
    };
    let traj = simulate_trajectory(&setup, &mut ChaCha8Rng::seed_from_u64(1));
    println!("collapse time 1/(6 tau) = {:.1} t_au", 1.0 / (6.0 * tau));
    println!(
        "{:>8} {:>10} {:>10} {:>12} {:>12}",
        "t", "r", "r_larmor", "mech", "radiated"
    );
    for (s, l) in traj.samples.iter().zip(traj.ledger.samples()) {
        let r_pred = (1.0 - 6.0 * tau * s.state.t).max(0.0).cbrt();
        println!(
            "{:>8.1} {:>10.5} {:>10.5} {:>12.6} {:>12.6}",
            s.state.t,
            s.state.r.norm(),
            r_pred,
            l.mech,
            l.radiated
        );
    }
    println!("status: {}", traj.status.as_str());
}
