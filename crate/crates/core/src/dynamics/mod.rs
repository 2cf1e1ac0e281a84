//! Radiation-damped, field-driven motion of a bound electron.
//!
//! The equation of motion (unit mass, charge −1) is
//!
//! ```text
//! r̈ = F_bind(r) − E(t) + τ_e · d/dt[F_bind(r) − E(t)]
//! ```
//!
//! where the last term is the Landau–Lifshitz reduction of the
//! Abraham–Lorentz third-derivative force `τ_e·r⃛`. Because the driving field
//! is a smooth function of time once its amplitudes are drawn, this is an
//! ordinary ODE and is integrated with fixed-step classical RK4.

mod trajectory;

pub use trajectory::{
    integrate, simulate_in_field, simulate_trajectory, DtPolicy, InitialCondition, Status,
    Trajectory, TrajectorySample, TrajectorySetup,
};

use std::f64::consts::PI;

use thiserror::Error;

use crate::units::Units;
use crate::zeropoint::{FieldSample, FieldSource, Vec3};

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("Coulomb force is singular at r = 0")]
    Singularity,
    #[error("harmonic frequency must be positive, got {0}")]
    BadFrequency(f64),
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("time step {dt} exceeds 0.05 of the shortest field period ({limit})")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("state became non-finite at t = {0}")]
    NonFinite(f64),
}

/// The binding potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PotentialModel {
    /// −1/r, a unit point charge at the origin.
    Coulomb,
    /// ½ω²r².
    Harmonic {
        omega: f64,
    },
    Free,
}

impl PotentialModel {
    pub fn harmonic(omega: f64) -> Result<Self, DynamicsError> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(DynamicsError::BadFrequency(omega));
        }
        Ok(Self::Harmonic { omega })
    }

    pub fn potential_energy(&self, r: &Vec3) -> f64 {
        match *self {
            Self::Coulomb => -1.0 / r.norm(),
            Self::Harmonic { omega } => 0.5 * omega * omega * r.norm_squared(),
            Self::Free => 0.0,
        }
    }

    /// Orbital period at `r` (circular Kepler period for Coulomb), `None`
    /// for a free particle.
    pub fn characteristic_period(&self, r: &Vec3) -> Option<f64> {
        match *self {
            Self::Coulomb => Some(2.0 * PI * r.norm().powf(1.5)),
            Self::Harmonic { omega } => Some(2.0 * PI / omega),
            Self::Free => None,
        }
    }
}

/// Position, velocity and time of the electron.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticleState {
    pub r: Vec3,
    pub v: Vec3,
    pub t: f64,
}

impl ParticleState {
    pub fn new(r: Vec3, v: Vec3, t: f64) -> Self {
        Self { r, v, t }
    }

    pub fn is_finite(&self) -> bool {
        self.r.iter().chain(self.v.iter()).all(|x| x.is_finite()) && self.t.is_finite()
    }
}

/// Force of the binding potential on a unit-mass electron.
pub fn binding_force(model: &PotentialModel, r: &Vec3) -> Result<Vec3, DynamicsError> {
    match *model {
        PotentialModel::Coulomb => {
            let d = r.norm();
            if d == 0.0 {
                return Err(DynamicsError::Singularity);
            }
            Ok(-r / (d * d * d))
        }
        PotentialModel::Harmonic { omega } => Ok(-r * (omega * omega)),
        PotentialModel::Free => Ok(Vec3::zeros()),
    }
}

/// Rate of change of [`binding_force`] along the motion, `(∂F/∂r)·v`.
pub fn binding_force_rate(
    model: &PotentialModel,
    r: &Vec3,
    v: &Vec3,
) -> Result<Vec3, DynamicsError> {
    match *model {
        PotentialModel::Coulomb => {
            let d = r.norm();
            if d == 0.0 {
                return Err(DynamicsError::Singularity);
            }
            let d3 = d * d * d;
            Ok(-v / d3 + r * (3.0 * r.dot(v) / (d3 * d * d)))
        }
        PotentialModel::Harmonic { omega } => Ok(-v * (omega * omega)),
        PotentialModel::Free => Ok(Vec3::zeros()),
    }
}

/// Order-reduced radiation-reaction force `τ_e·d/dt[F_bind − E]`.
///
/// `field` supplies `E` and `∂E/∂t` at the electron (dipole approximation).
pub fn radiation_reaction(
    model: &PotentialModel,
    state: &ParticleState,
    field: &FieldSample,
    tau: f64,
) -> Result<Vec3, DynamicsError> {
    let rate = binding_force_rate(model, &state.r, &state.v)?;
    Ok((rate - field.e_dot) * tau)
}

/// The individual forces at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Forces {
    pub binding: Vec3,
    pub field: Vec3,
    pub reaction: Vec3,
}

impl Forces {
    pub fn total(&self) -> Vec3 {
        self.binding + self.field + self.reaction
    }
}

/// Potential plus the radiation-reaction time constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquationOfMotion {
    pub potential: PotentialModel,
    pub tau: f64,
}

impl EquationOfMotion {
    /// `tau = units.tau_e()` with radiation reaction on, 0 otherwise.
    pub fn new(potential: PotentialModel, units: &Units, radiation_reaction: bool) -> Self {
        Self {
            potential,
            tau: if radiation_reaction {
                units.tau_e()
            } else {
                0.0
            },
        }
    }

    pub fn forces(
        &self,
        state: &ParticleState,
        field: &FieldSample,
    ) -> Result<Forces, DynamicsError> {
        Ok(Forces {
            binding: binding_force(&self.potential, &state.r)?,
            field: -field.e,
            reaction: radiation_reaction(&self.potential, state, field, self.tau)?,
        })
    }

    /// Kinetic plus potential energy.
    pub fn mechanical_energy(&self, state: &ParticleState) -> f64 {
        0.5 * state.v.norm_squared() + self.potential.potential_energy(&state.r)
    }
}

/// Particle state extended with the running energy integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Augmented {
    pub r: Vec3,
    pub v: Vec3,
    /// ∫ F_field·v dt
    pub work_in: f64,
    /// ∫ F_reaction·v dt
    pub reaction_work: f64,
    /// ∫ τ|a|² dt
    pub radiated: f64,
}

impl Augmented {
    pub fn start(state: &ParticleState) -> Self {
        Self {
            r: state.r,
            v: state.v,
            work_in: 0.0,
            reaction_work: 0.0,
            radiated: 0.0,
        }
    }

    fn axpy(&self, h: f64, d: &Self) -> Self {
        Self {
            r: self.r + d.r * h,
            v: self.v + d.v * h,
            work_in: self.work_in + d.work_in * h,
            reaction_work: self.reaction_work + d.reaction_work * h,
            radiated: self.radiated + d.radiated * h,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.r.iter().chain(self.v.iter()).all(|x| x.is_finite())
            && self.work_in.is_finite()
            && self.reaction_work.is_finite()
            && self.radiated.is_finite()
    }
}

/// Instantaneous rates at one point of phase space.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rates {
    pub acceleration: Vec3,
    pub p_in: f64,
    pub p_reaction: f64,
    pub p_rad: f64,
}

pub(crate) fn rates(
    eom: &EquationOfMotion,
    r: &Vec3,
    v: &Vec3,
    field: &FieldSample,
) -> Result<Rates, DynamicsError> {
    let state = ParticleState::new(*r, *v, 0.0);
    let f = eom.forces(&state, field)?;
    let a = f.total();
    Ok(Rates {
        acceleration: a,
        p_in: f.field.dot(v),
        p_reaction: f.reaction.dot(v),
        p_rad: eom.tau * a.norm_squared(),
    })
}

fn derivative(
    eom: &EquationOfMotion,
    y: &Augmented,
    field: &FieldSample,
) -> Result<Augmented, DynamicsError> {
    let k = rates(eom, &y.r, &y.v, field)?;
    Ok(Augmented {
        r: y.v,
        v: k.acceleration,
        work_in: k.p_in,
        reaction_work: k.p_reaction,
        radiated: k.p_rad,
    })
}

/// One classical RK4 step given the field at `t`, `t + dt/2` and `t + dt`.
pub(crate) fn rk4(
    eom: &EquationOfMotion,
    y: &Augmented,
    dt: f64,
    start: &FieldSample,
    mid: &FieldSample,
    end: &FieldSample,
) -> Result<Augmented, DynamicsError> {
    let k1 = derivative(eom, y, start)?;
    let k2 = derivative(eom, &y.axpy(0.5 * dt, &k1), mid)?;
    let k3 = derivative(eom, &y.axpy(0.5 * dt, &k2), mid)?;
    let k4 = derivative(eom, &y.axpy(dt, &k3), end)?;
    let h6 = dt / 6.0;
    let mut out = *y;
    out.r += (k1.r + (k2.r + k3.r) * 2.0 + k4.r) * h6;
    out.v += (k1.v + (k2.v + k3.v) * 2.0 + k4.v) * h6;
    out.work_in += (k1.work_in + 2.0 * (k2.work_in + k3.work_in) + k4.work_in) * h6;
    out.reaction_work +=
        (k1.reaction_work + 2.0 * (k2.reaction_work + k3.reaction_work) + k4.reaction_work) * h6;
    out.radiated += (k1.radiated + 2.0 * (k2.radiated + k3.radiated) + k4.radiated) * h6;
    Ok(out)
}

/// Advance `state` by one RK4 step of length `dt`.
///
/// `dt` may not exceed 0.05 of the shortest period present in `field`.
pub fn step<F: FieldSource + ?Sized>(
    state: &ParticleState,
    dt: f64,
    eom: &EquationOfMotion,
    field: &F,
) -> Result<ParticleState, DynamicsError> {
    if !(dt > 0.0) {
        return Err(DynamicsError::NonPositiveStep(dt));
    }
    if let Some(w) = field.omega_max() {
        let limit = 0.05 * 2.0 * PI / w;
        if dt > limit {
            return Err(DynamicsError::StepTooLarge { dt, limit });
        }
    }
    let t = state.t;
    let start = field.sample(t);
    let mid = field.sample(t + 0.5 * dt);
    let end = field.sample(t + dt);
    let y = rk4(eom, &Augmented::start(state), dt, &start, &mid, &end)?;
    let next = ParticleState::new(y.r, y.v, t + dt);
    if !next.is_finite() {
        return Err(DynamicsError::NonFinite(next.t));
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::FINE_STRUCTURE;
    use crate::zeropoint::{sample_modes, FieldSpec, ModeEnsemble, NoField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tau() -> f64 {
        2.0 / 3.0 * FINE_STRUCTURE.powi(3)
    }

    #[test]
    fn coulomb_force_values() {
        let f = binding_force(&PotentialModel::Coulomb, &Vec3::x()).unwrap();
        assert_eq!(f, -Vec3::x());
        let f = binding_force(&PotentialModel::Coulomb, &Vec3::new(0.0, 2.0, 0.0)).unwrap();
        assert!((f.norm() - 0.25).abs() < 1e-15);
        assert_eq!(
            binding_force(&PotentialModel::Coulomb, &Vec3::zeros()),
            Err(DynamicsError::Singularity)
        );
    }

    #[test]
    fn harmonic_and_free_forces() {
        let h = PotentialModel::harmonic(1.0).unwrap();
        assert_eq!(
            binding_force(&h, &Vec3::new(0.0, 2.0, 0.0)).unwrap(),
            Vec3::new(0.0, -2.0, 0.0)
        );
        assert_eq!(
            binding_force(&PotentialModel::Free, &Vec3::new(1.0, 2.0, 3.0)).unwrap(),
            Vec3::zeros()
        );
        assert!(PotentialModel::harmonic(0.0).is_err());
    }

    #[test]
    fn coulomb_force_rate_matches_finite_difference() {
        let r = Vec3::new(0.7, -0.4, 1.1);
        let v = Vec3::new(0.2, 0.5, -0.3);
        let h = 1e-6;
        let f = |s: f64| binding_force(&PotentialModel::Coulomb, &(r + v * s)).unwrap();
        let fd = (f(h) - f(-h)) / (2.0 * h);
        let exact = binding_force_rate(&PotentialModel::Coulomb, &r, &v).unwrap();
        assert!((fd - exact).norm() < 1e-8 * exact.norm());
    }

    #[test]
    fn free_particle_without_field_has_no_reaction() {
        let s = ParticleState::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.1, 0.0, 0.0), 0.0);
        let f =
            radiation_reaction(&PotentialModel::Free, &s, &FieldSample::default(), tau()).unwrap();
        assert_eq!(f, Vec3::zeros());
    }

    #[test]
    fn circular_orbit_reaction_opposes_velocity() {
        let s = ParticleState::new(Vec3::x(), Vec3::y(), 0.0);
        let f = radiation_reaction(&PotentialModel::Coulomb, &s, &FieldSample::default(), tau())
            .unwrap();
        assert!(f.dot(&s.v) < 0.0);
        // antiparallel, magnitude τ·v/r³
        assert!((f + s.v * tau()).norm() < 1e-22);
    }

    #[test]
    fn harmonic_reaction_is_linear_damping() {
        let w = 1.7;
        let s = ParticleState::new(Vec3::new(0.3, 0.0, 0.0), Vec3::new(0.0, 0.4, -0.1), 0.0);
        let f = radiation_reaction(
            &PotentialModel::Harmonic { omega: w },
            &s,
            &FieldSample::default(),
            tau(),
        )
        .unwrap();
        assert!((f + s.v * (tau() * w * w)).norm() < 1e-20);
    }

    #[test]
    fn free_motion_is_uniform() {
        let eom = EquationOfMotion::new(PotentialModel::Free, &Units::atomic(), true);
        let mut s =
            ParticleState::new(Vec3::new(1.0, -1.0, 0.5), Vec3::new(0.25, 0.5, -0.125), 0.0);
        let dt = 0.125;
        for _ in 0..64 {
            s = step(&s, dt, &eom, &NoField).unwrap();
        }
        assert_eq!(s.v, Vec3::new(0.25, 0.5, -0.125));
        assert!((s.r - Vec3::new(3.0, 3.0, -0.5)).norm() < 1e-14);
        assert_eq!(s.t, 8.0);
    }

    /// Exact one-step amplification of RK4 on x'' = −ω²x: |R(iθ)|² with
    /// R(z) = 1 + z + z²/2 + z³/6 + z⁴/24.
    fn rk4_energy_factor(theta: f64) -> f64 {
        let re = 1.0 - theta.powi(2) / 2.0 + theta.powi(4) / 24.0;
        let im = theta - theta.powi(3) / 6.0;
        re * re + im * im
    }

    fn harmonic_energy_drift(steps_per_period: usize, periods: usize) -> f64 {
        let eom = EquationOfMotion::new(
            PotentialModel::harmonic(1.0).unwrap(),
            &Units::atomic(),
            false,
        );
        let dt = 2.0 * PI / steps_per_period as f64;
        let mut s = ParticleState::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), 0.0);
        let e0 = eom.mechanical_energy(&s);
        for _ in 0..steps_per_period * periods {
            s = step(&s, dt, &eom, &NoField).unwrap();
        }
        (eom.mechanical_energy(&s) - e0) / e0
    }

    #[test]
    fn conservative_oscillator_drift_matches_rk4_amplification() {
        // at period/200 RK4 dissipates θ⁶/72 per step (θ = 2π/200), so the
        // drift after 10³ periods is ≈ −2.7e−6, not below 1e−8
        let drift = harmonic_energy_drift(200, 1000);
        let theta = 2.0 * PI / 200.0;
        let predicted = rk4_energy_factor(theta).powi(200_000) - 1.0;
        assert!(
            (drift - predicted).abs() < 1e-3 * predicted.abs(),
            "{drift} vs {predicted}"
        );
        assert!(drift < 0.0 && drift.abs() < 3e-6);
        // a finer step brings it under 1e−8
        let fine = harmonic_energy_drift(1000, 1000);
        assert!(fine.abs() < 1e-8, "{fine}");
    }

    #[test]
    fn damped_oscillator_decays_at_gamma() {
        let w = 1.0;
        let units = Units::atomic_with_alpha(0.05);
        let eom = EquationOfMotion::new(PotentialModel::harmonic(w).unwrap(), &units, true);
        let gamma = eom.tau * w * w;
        let steps = 200;
        let dt = 2.0 * PI / (w * steps as f64);
        let mut s = ParticleState::new(Vec3::new(1.0, 0.0, 0.0), Vec3::zeros(), 0.0);
        let e0 = eom.mechanical_energy(&s);
        let periods = 100;
        for _ in 0..steps * periods {
            s = step(&s, dt, &eom, &NoField).unwrap();
        }
        let t = s.t;
        let rate = -(eom.mechanical_energy(&s) / e0).ln() / t;
        assert!((rate - gamma).abs() < 0.01 * gamma, "{rate} vs {gamma}");
    }

    #[test]
    fn step_is_deterministic_and_checks_dt() {
        let spec = FieldSpec::new(0.3, 3.0, 30, 4, 0.5, 0).unwrap();
        let ens: ModeEnsemble =
            sample_modes(&spec, &Units::atomic(), &mut ChaCha8Rng::seed_from_u64(4));
        let eom = EquationOfMotion::new(PotentialModel::Coulomb, &Units::atomic(), true);
        let s = ParticleState::new(Vec3::x(), Vec3::y(), 0.0);
        let a = step(&s, 0.01, &eom, &ens).unwrap();
        let b = step(&s, 0.01, &eom, &ens).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            step(&s, 0.2, &eom, &ens),
            Err(DynamicsError::StepTooLarge { .. })
        ));
        assert_eq!(
            step(&s, 0.0, &eom, &ens),
            Err(DynamicsError::NonPositiveStep(0.0))
        );
    }

    #[test]
    fn step_halving_converges_at_fourth_order_with_field() {
        let units = Units::atomic_with_alpha(0.2);
        let spec = FieldSpec::new(0.3, 3.0, 40, 4, 0.5, 0).unwrap();
        let ens = sample_modes(&spec, &units, &mut ChaCha8Rng::seed_from_u64(8));
        let eom = EquationOfMotion::new(PotentialModel::Coulomb, &units, true);
        let t_end = 10.0;
        let run = |n: usize| {
            let dt = t_end / n as f64;
            let mut s = ParticleState::new(Vec3::x(), Vec3::y(), 0.0);
            for _ in 0..n {
                s = step(&s, dt, &eom, &ens).unwrap();
            }
            s.r
        };
        let (a, b, c) = (run(250), run(500), run(1000));
        let ratio = (a - b).norm() / (b - c).norm();
        assert!((ratio - 16.0).abs() < 1.0, "Richardson ratio {ratio}");
    }
}
