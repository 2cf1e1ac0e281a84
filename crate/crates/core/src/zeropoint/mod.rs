//! Finite-mode realization of the classical zero-point radiation field.
//!
//! The continuum of plane waves with energy ½ħω per mode is replaced by
//! `n_freq` jittered frequency cells over a window `[omega_min, omega_max]`,
//! each carrying `n_dir` isotropically drawn propagation directions and two
//! transverse polarizations. Every polarization has independent standard
//! normal amplitudes `A`, `B`, and the per-mode scale is chosen so that the
//! ensemble-averaged energy density `ε₀⟨E²⟩` reproduces `∫ρ_ZP(ω)dω` over the
//! window.
//!
//! Three evaluators are provided on [`ModeEnsemble`]:
//!
//! * [`efield_dipole`]: position-independent field (k·r → 0),
//! * [`afield_full`] / [`efield_full`]: full plane-wave sum with phases k·r − ωt.
//!
//! For long integrations use [`DipoleBank`], which collapses all directions
//! of one frequency cell into two 3-vectors.

mod bank;

pub use bank::{DipoleBank, PhasorCursor};

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::units::Units;

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("angular frequency must be non-negative, got {0}")]
    NegativeFrequency(f64),
    #[error("omega_min ({omega_min}) must be positive and below omega_max ({omega_max})")]
    BadWindow { omega_min: f64, omega_max: f64 },
    #[error("{name} must be at least 1")]
    ZeroCount { name: &'static str },
    #[error("jitter must lie in [0, 1), got {0}")]
    BadJitter(f64),
}

/// Zero-point spectral energy density ħω³/(2π²c³) per unit volume and unit
/// angular frequency (both polarizations included).
pub fn spectral_density(units: &Units, omega: f64) -> Result<f64, FieldError> {
    if !(omega >= 0.0) {
        return Err(FieldError::NegativeFrequency(omega));
    }
    Ok(units.hbar * omega.powi(3) / (2.0 * PI * PI * units.c.powi(3)))
}

/// Closed-form `∫ρ_ZP(ω)dω` over `[omega_min, omega_max]`.
pub fn window_energy_density(units: &Units, omega_min: f64, omega_max: f64) -> f64 {
    units.hbar * (omega_max.powi(4) - omega_min.powi(4)) / (8.0 * PI * PI * units.c.powi(3))
}

/// Frequency window and discretization of a field realization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSpec {
    omega_min: f64,
    omega_max: f64,
    n_freq: usize,
    n_dir: usize,
    jitter: f64,
    seed: u64,
}

impl FieldSpec {
    pub fn new(
        omega_min: f64,
        omega_max: f64,
        n_freq: usize,
        n_dir: usize,
        jitter: f64,
        seed: u64,
    ) -> Result<Self, FieldError> {
        if !(omega_min > 0.0 && omega_max > omega_min && omega_max.is_finite()) {
            return Err(FieldError::BadWindow {
                omega_min,
                omega_max,
            });
        }
        if n_freq == 0 {
            return Err(FieldError::ZeroCount { name: "n_freq" });
        }
        if n_dir == 0 {
            return Err(FieldError::ZeroCount { name: "n_dir" });
        }
        if !(0.0..1.0).contains(&jitter) {
            return Err(FieldError::BadJitter(jitter));
        }
        Ok(Self {
            omega_min,
            omega_max,
            n_freq,
            n_dir,
            jitter,
            seed,
        })
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }
    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }
    pub fn n_freq(&self) -> usize {
        self.n_freq
    }
    pub fn n_dir(&self) -> usize {
        self.n_dir
    }
    pub fn jitter(&self) -> f64 {
        self.jitter
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Width of one frequency cell.
    pub fn cell_width(&self) -> f64 {
        (self.omega_max - self.omega_min) / self.n_freq as f64
    }

    /// 2π/Δω, the period of the unjittered frequency comb.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI / self.cell_width()
    }

    pub fn mode_count(&self) -> usize {
        self.n_freq * self.n_dir
    }
}

/// One plane wave with its two polarizations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub khat: Vec3,
    pub eps1: Vec3,
    pub eps2: Vec3,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    /// Electric-field amplitude per unit Gaussian amplitude.
    pub amplitude_scale: f64,
}

impl Mode {
    /// Wave vector `ω/c · k̂`.
    pub fn wave_vector(&self, units: &Units) -> Vec3 {
        self.khat * (self.omega / units.c)
    }
}

/// Electric field and its time derivative at one instant.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldSample {
    pub e: Vec3,
    pub e_dot: Vec3,
}

/// Anything that can supply the (dipole-approximation) driving field.
pub trait FieldSource {
    fn sample(&self, t: f64) -> FieldSample;

    /// Highest angular frequency present, `None` for a field-free source.
    fn omega_max(&self) -> Option<f64>;
}

/// The absence of any driving field.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoField;

impl FieldSource for NoField {
    fn sample(&self, _t: f64) -> FieldSample {
        FieldSample::default()
    }
    fn omega_max(&self) -> Option<f64> {
        None
    }
}

/// A sampled realization of the zero-point field. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeEnsemble {
    modes: Vec<Mode>,
    spec: FieldSpec,
    units: Units,
}

impl ModeEnsemble {
    /// Wrap explicit modes, e.g. hand-built test fields.
    pub fn from_modes(spec: FieldSpec, units: Units, modes: Vec<Mode>) -> Self {
        Self { modes, spec, units }
    }

    /// An ensemble with no modes: the field-off case.
    pub fn empty(spec: FieldSpec, units: Units) -> Self {
        Self::from_modes(spec, units, Vec::new())
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }
    pub fn units(&self) -> &Units {
        &self.units
    }
    pub fn len(&self) -> usize {
        self.modes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

impl FieldSource for ModeEnsemble {
    fn sample(&self, t: f64) -> FieldSample {
        FieldSample {
            e: efield_dipole(self, t),
            e_dot: efield_dipole_rate(self, t),
        }
    }
    fn omega_max(&self) -> Option<f64> {
        self.modes.iter().map(|m| m.omega).reduce(f64::max)
    }
}

/// Uniform direction on the unit sphere (Archimedes' area-preserving map).
fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z: f64 = 1.0 - 2.0 * rng.random::<f64>();
    let phi = 2.0 * PI * rng.random::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(s * phi.cos(), s * phi.sin(), z)
}

/// Orthonormal polarization pair transverse to `khat`.
///
/// Gram–Schmidt against ẑ; falls back to x̂ when `|khat·ẑ| > 0.9`.
pub fn polarization_pair(khat: &Vec3) -> (Vec3, Vec3) {
    let reference = if khat.z.abs() > 0.9 {
        Vec3::x()
    } else {
        Vec3::z()
    };
    let eps1 = (reference - khat * khat.dot(&reference)).normalize();
    let eps2 = khat.cross(&eps1).normalize();
    (eps1, eps2)
}

/// Draw a field realization.
///
/// Frequency cell `i` gets `ω_i = omega_min + (i + u_i·jitter)·Δω`. The
/// output is a deterministic function of `spec` and the state of `rng`.
pub fn sample_modes<R: Rng + ?Sized>(spec: &FieldSpec, units: &Units, rng: &mut R) -> ModeEnsemble {
    let dw = spec.cell_width();
    let mut modes = Vec::with_capacity(spec.mode_count());
    for i in 0..spec.n_freq {
        let u: f64 = rng.random();
        let omega = (spec.omega_min + (i as f64 + u * spec.jitter) * dw).min(spec.omega_max);
        // ε₀ Σ_dir Σ_pol s² = ρ(ω)Δω
        let rho = units.hbar * omega.powi(3) / (2.0 * PI * PI * units.c.powi(3));
        let amplitude_scale = (rho * dw / (units.eps0 * spec.n_dir as f64 * 2.0)).sqrt();
        for _ in 0..spec.n_dir {
            let khat = random_direction(rng);
            let (eps1, eps2) = polarization_pair(&khat);
            let a1 = rng.sample(StandardNormal);
            let a2 = rng.sample(StandardNormal);
            let b1 = rng.sample(StandardNormal);
            let b2 = rng.sample(StandardNormal);
            modes.push(Mode {
                omega,
                khat,
                eps1,
                eps2,
                a1,
                a2,
                b1,
                b2,
                amplitude_scale,
            });
        }
    }
    ModeEnsemble {
        modes,
        spec: *spec,
        units: *units,
    }
}

/// Dipole-approximation electric field
/// `Σ s·[ε₁(A₁cos ωt + B₁sin ωt) + ε₂(A₂cos ωt + B₂sin ωt)]`.
pub fn efield_dipole(ensemble: &ModeEnsemble, t: f64) -> Vec3 {
    let mut e = Vec3::zeros();
    for m in &ensemble.modes {
        let (s, c) = (m.omega * t).sin_cos();
        e += (m.eps1 * (m.a1 * c + m.b1 * s) + m.eps2 * (m.a2 * c + m.b2 * s)) * m.amplitude_scale;
    }
    e
}

/// Time derivative of [`efield_dipole`].
pub fn efield_dipole_rate(ensemble: &ModeEnsemble, t: f64) -> Vec3 {
    let mut e = Vec3::zeros();
    for m in &ensemble.modes {
        let (s, c) = (m.omega * t).sin_cos();
        e += (m.eps1 * (m.b1 * c - m.a1 * s) + m.eps2 * (m.b2 * c - m.a2 * s))
            * (m.amplitude_scale * m.omega);
    }
    e
}

/// Full vector potential `Σ (s/ω)·ε[A sin(k·r − ωt) + B cos(k·r − ωt)]`.
pub fn afield_full(ensemble: &ModeEnsemble, r: &Vec3, t: f64) -> Vec3 {
    let mut a = Vec3::zeros();
    for m in &ensemble.modes {
        let phase = m.wave_vector(&ensemble.units).dot(r) - m.omega * t;
        let (s, c) = phase.sin_cos();
        a += (m.eps1 * (m.a1 * s + m.b1 * c) + m.eps2 * (m.a2 * s + m.b2 * c))
            * (m.amplitude_scale / m.omega);
    }
    a
}

/// `E = −∂A/∂t` of [`afield_full`], evaluated analytically.
///
/// At `r = 0` this reproduces [`efield_dipole`] bit for bit.
pub fn efield_full(ensemble: &ModeEnsemble, r: &Vec3, t: f64) -> Vec3 {
    let mut e = Vec3::zeros();
    for m in &ensemble.modes {
        let phase = m.wave_vector(&ensemble.units).dot(r) - m.omega * t;
        let (s, c) = phase.sin_cos();
        // −∂/∂t of A sin φ + B cos φ is ω(A cos φ − B sin φ); written with
        // (−s) so the r = 0 case matches the dipole evaluator exactly.
        let ms = -s;
        e +=
            (m.eps1 * (m.a1 * c + m.b1 * ms) + m.eps2 * (m.a2 * c + m.b2 * ms)) * m.amplitude_scale;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec() -> FieldSpec {
        FieldSpec::new(0.3, 3.0, 40, 4, 0.5, 7).unwrap()
    }

    fn ensemble(seed: u64) -> ModeEnsemble {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sample_modes(&spec(), &Units::atomic(), &mut rng)
    }

    fn single_x_mode(omega: f64) -> ModeEnsemble {
        let mode = Mode {
            omega,
            khat: Vec3::z(),
            eps1: Vec3::x(),
            eps2: Vec3::y(),
            a1: 1.0,
            a2: 0.0,
            b1: 0.0,
            b2: 0.0,
            amplitude_scale: 0.25,
        };
        ModeEnsemble::from_modes(spec(), Units::atomic(), vec![mode])
    }

    #[test]
    fn spectral_density_values() {
        let u = Units::atomic();
        assert_eq!(spectral_density(&u, 0.0).unwrap(), 0.0);
        let r = spectral_density(&u, 2.6).unwrap() / spectral_density(&u, 1.3).unwrap();
        assert!((r - 8.0).abs() < 1e-12);
        let nat = spectral_density(&Units::natural(), 1.0).unwrap();
        assert!((nat - 1.0 / (2.0 * PI * PI)).abs() < 1e-15);
        assert!((nat - 0.0506606).abs() < 1e-7);
        assert_eq!(
            spectral_density(&u, -1.0),
            Err(FieldError::NegativeFrequency(-1.0))
        );
    }

    #[test]
    fn window_integral_matches_quadrature() {
        let u = Units::atomic();
        let (lo, hi) = (0.3, 3.0);
        let n = 20_000;
        let h = (hi - lo) / n as f64;
        // composite Simpson
        let mut acc = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * spectral_density(&u, lo + i as f64 * h).unwrap();
        }
        let quad = acc * h / 3.0;
        let closed = window_energy_density(&u, lo, hi);
        assert!((quad - closed).abs() / closed < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            FieldSpec::new(0.3, 3.0, 0, 4, 0.5, 0),
            Err(FieldError::ZeroCount { name: "n_freq" })
        ));
        assert!(matches!(
            FieldSpec::new(0.3, 3.0, 4, 0, 0.5, 0),
            Err(FieldError::ZeroCount { name: "n_dir" })
        ));
        assert!(matches!(
            FieldSpec::new(3.0, 0.3, 4, 4, 0.5, 0),
            Err(FieldError::BadWindow { .. })
        ));
        assert!(matches!(
            FieldSpec::new(0.0, 0.3, 4, 4, 0.5, 0),
            Err(FieldError::BadWindow { .. })
        ));
        assert!(matches!(
            FieldSpec::new(0.3, 3.0, 4, 4, 1.0, 0),
            Err(FieldError::BadJitter(_))
        ));
    }

    #[test]
    fn single_cell_single_direction_gives_one_mode() {
        let s = FieldSpec::new(0.5, 1.5, 1, 1, 0.0, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = sample_modes(&s, &Units::atomic(), &mut rng);
        assert_eq!(e.len(), 1);
        assert_eq!(e.modes()[0].omega, 0.5);
    }

    #[test]
    fn mode_count_and_window() {
        let e = ensemble(3);
        assert_eq!(e.len(), 160);
        for m in e.modes() {
            assert!(m.omega >= 0.3 && m.omega <= 3.0);
        }
    }

    #[test]
    fn modes_are_orthonormal_and_transverse() {
        let e = ensemble(11);
        for m in e.modes() {
            assert!((m.khat.norm() - 1.0).abs() < 1e-12);
            assert!((m.eps1.norm() - 1.0).abs() < 1e-12);
            assert!((m.eps2.norm() - 1.0).abs() < 1e-12);
            assert!(m.khat.dot(&m.eps1).abs() < 1e-12);
            assert!(m.khat.dot(&m.eps2).abs() < 1e-12);
            assert!(m.eps1.dot(&m.eps2).abs() < 1e-12);
        }
    }

    #[test]
    fn polarization_fallback_along_reference_axis() {
        for k in [Vec3::z(), -Vec3::z()] {
            let (e1, e2) = polarization_pair(&k);
            assert!(e1.dot(&k).abs() < 1e-15 && e2.dot(&k).abs() < 1e-15);
            assert!((e1.norm() - 1.0).abs() < 1e-15);
            assert!((e2.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = ensemble(5);
        let b = ensemble(5);
        assert_eq!(a, b);
        for t in [0.0, 1.7, 123.4] {
            assert_eq!(
                efield_dipole(&a, t).map(f64::to_bits),
                efield_dipole(&b, t).map(f64::to_bits)
            );
        }
        assert_ne!(ensemble(6), a);
    }

    #[test]
    fn empty_ensemble_gives_zero_fields() {
        let e = ModeEnsemble::empty(spec(), Units::atomic());
        let r = Vec3::new(0.3, -1.0, 2.0);
        assert_eq!(efield_dipole(&e, 1.0), Vec3::zeros());
        assert_eq!(afield_full(&e, &r, 1.0), Vec3::zeros());
        assert_eq!(efield_full(&e, &r, 1.0), Vec3::zeros());
        assert_eq!(e.omega_max(), None);
    }

    #[test]
    fn single_mode_at_origin_of_time() {
        let e = single_x_mode(1.3);
        assert_eq!(efield_dipole(&e, 0.0), Vec3::new(0.25, 0.0, 0.0));
    }

    #[test]
    fn single_mode_time_average_vanishes() {
        let omega = 1.3;
        let e = single_x_mode(omega);
        let period = 2.0 * PI / omega;
        let n = 4000;
        let h = 3.0 * period / n as f64;
        // trapezoid over three whole periods is exact for a sinusoid up to roundoff
        let mut acc = Vec3::zeros();
        for i in 0..n {
            acc += efield_dipole(&e, i as f64 * h);
        }
        assert!((acc / n as f64).norm() < 1e-12);
    }

    #[test]
    fn full_field_reduces_to_dipole_at_origin() {
        let e = ensemble(21);
        let origin = Vec3::zeros();
        for t in [0.0, 0.37, 5.0, 1e3] {
            assert_eq!(
                efield_full(&e, &origin, t).map(f64::to_bits),
                efield_dipole(&e, t).map(f64::to_bits)
            );
        }
    }

    #[test]
    fn potential_at_origin_is_dipole_limit() {
        // at r = 0 the phase is −ωt exactly
        let e = ensemble(22);
        let t = 2.5;
        let mut expect = Vec3::zeros();
        for m in e.modes() {
            let (s, c) = (-m.omega * t).sin_cos();
            expect += (m.eps1 * (m.a1 * s + m.b1 * c) + m.eps2 * (m.a2 * s + m.b2 * c))
                * (m.amplitude_scale / m.omega);
        }
        assert_eq!(afield_full(&e, &Vec3::zeros(), t), expect);
    }

    #[test]
    fn electric_field_is_minus_potential_rate() {
        let e = ensemble(23);
        let h = 1e-5 / e.spec().omega_max();
        for (r, t) in [
            (Vec3::new(0.0, 0.0, 0.0), 0.4),
            (Vec3::new(1.0, -2.0, 0.5), 3.3),
            (Vec3::new(40.0, 10.0, -25.0), 17.0),
        ] {
            let fd = -(afield_full(&e, &r, t + h) - afield_full(&e, &r, t - h)) / (2.0 * h);
            let exact = efield_full(&e, &r, t);
            assert!((fd - exact).norm() / exact.norm() < 1e-6);
        }
    }

    #[test]
    fn dipole_rate_matches_finite_difference() {
        let e = ensemble(24);
        let h = 1e-5;
        let t = 7.1;
        let fd = (efield_dipole(&e, t + h) - efield_dipole(&e, t - h)) / (2.0 * h);
        let exact = efield_dipole_rate(&e, t);
        assert!((fd - exact).norm() / exact.norm() < 1e-6);
    }
}
