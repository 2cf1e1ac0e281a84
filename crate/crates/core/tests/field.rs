use sedlab::harness::{field_check, resolve_config, FieldCheckResult};
use sedlab::units::Units;
use sedlab::zeropoint::{efield_dipole, sample_modes, window_energy_density, FieldSpec};

fn check(sets: &[&str]) -> FieldCheckResult {
    let sets: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
    let c = resolve_config("field-check", None, &sets, None, None, Some(2), false).unwrap();
    field_check(&c).unwrap()
}

#[test]
fn field_is_isotropic() {
    let r = check(&["n_resample=3000", "n_freq=200", "n_dir=8"]);
    for i in 0..3 {
        // each diagonal share is 1/3; with ~3000 χ²-like draws the spread is ~1%
        assert!(
            (r.covariance[i][i] - 1.0 / 3.0).abs() < 0.02,
            "{:?}",
            r.covariance
        );
        for j in 0..3 {
            if i != j {
                assert!(r.covariance[i][j].abs() < 0.02, "{:?}", r.covariance);
            }
        }
    }
}

#[test]
fn field_is_stationary() {
    let r = check(&["n_resample=3000", "n_freq=200", "n_dir=8", "n_times=8"]);
    // both estimates are means over 3000 realizations of the same distribution
    let diff = (r.measured_t0 - r.measured_later).abs();
    assert!(diff < 5.0 * 2.0 * r.standard_error, "{r:?}");
}

#[test]
fn energy_splits_as_the_cubic_spectrum() {
    let low = check(&[
        "n_resample=2000",
        "omega_min=0.3",
        "omega_max=1.5",
        "n_freq=300",
        "n_dir=8",
    ]);
    let high = check(&[
        "n_resample=2000",
        "omega_min=1.5",
        "omega_max=3",
        "n_freq=300",
        "n_dir=8",
    ]);
    // ∫ω³dω ratio between the two windows
    let expected = (1.5f64.powi(4) - 0.3f64.powi(4)) / (3f64.powi(4) - 1.5f64.powi(4));
    let ratio = low.measured / high.measured;
    let rel_se = (low.standard_error / low.measured).hypot(high.standard_error / high.measured);
    assert!(
        (ratio / expected - 1.0).abs() < 4.0 * rel_se + 0.005,
        "{ratio} vs {expected}"
    );
}

#[test]
fn realization_time_average_matches_ensemble() {
    // one realization, averaged over a long span shorter than the recurrence
    let units = Units::atomic();
    let spec = FieldSpec::new(0.3, 3.0, 400, 16, 0.5, 21).unwrap();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(21);
    let ens = sample_modes(&spec, &units, &mut rng);
    let n = 20_000;
    let span = 0.9 * spec.recurrence_time();
    let mean: f64 = (0..n)
        .map(|i| units.eps0 * efield_dipole(&ens, span * i as f64 / n as f64).norm_squared())
        .sum::<f64>()
        / n as f64;
    let target = window_energy_density(&units, 0.3, 3.0);
    // a single realization carries χ² scatter of ~1/sqrt(2·modes·2) ≈ 1%
    assert!((mean / target - 1.0).abs() < 0.06, "{}", mean / target);
}
