//! Per-term near fields of the particle presets at one point.
//!
//! cargo run --release --example near_field

use sedlab::nearfield::{g_factor, magnetic_moment, near_field, ParticleEM};
use sedlab::units::Units;
use sedlab::Vec3;

fn main() {
    let units = Units::atomic();
    let rhat = Vec3::new(1.0, 1.0, 0.0).normalize();
    let r = 2.0;
    let v = Vec3::new(0.0, 0.0, 0.01 * units.c);
    let a = Vec3::new(0.0, 1.0, 0.0);

    for name in ["electron", "positron", "proton", "neutron", "neutrino"] {
        let p = ParticleEM::preset(name).unwrap();
        let f = near_field(&units, &p, &rhat, r, &v, &a).unwrap();
        let provenance = g_factor(name).map_or("n/a".to_string(), |g| format!("{:?}", g.source));
        println!(
            "{name}: moment {:.3e}, g source {provenance}",
            magnetic_moment(&p).norm()
        );
        for (term, vec) in f.terms() {
            println!(
                "  {term:<10} {:>12.4e} {:>12.4e} {:>12.4e}",
                vec.x, vec.y, vec.z
            );
        }
    }
}
