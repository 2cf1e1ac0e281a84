use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{rates, rk4, Augmented, EquationOfMotion, ParticleState, PotentialModel};
use crate::diagnostics::{EnergyLedger, LedgerSample};
use crate::units::Units;
use crate::zeropoint::{
    polarization_pair, sample_modes, DipoleBank, FieldSpec, PhasorCursor, Vec3,
};

/// How a trajectory starts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialCondition {
    /// Kepler orbit starting at pericenter `radius` with the given
    /// eccentricity and a uniformly random orientation. For a harmonic
    /// potential the speed is `ω·radius` (circular) and the eccentricity is
    /// ignored.
    Circular { radius: f64, eccentricity: f64 },
    /// At rest at the origin.
    Rest,
    /// Harmonic potential only: position and velocity drawn from the
    /// ground-state Gaussian, variances 1/(2ω) and ω/2 per component.
    GroundState,
}

/// Step-size rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DtPolicy {
    /// `min(2π/ω_max, orbital period at start) / divisor`, shrunk so that an
    /// integer number of steps lands exactly on `t_end`.
    Auto {
        divisor: f64,
    },
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Completed,
    /// Left the sphere `|r| < r_ionize`.
    Ionized,
    /// Non-finite state, Coulomb singularity, or `|r| < r_collapse`.
    Diverged,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Completed => "completed",
            Self::Ionized => "ionized",
            Self::Diverged => "diverged",
        }
    }
}

/// Everything needed to integrate one trajectory, minus the randomness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySetup {
    pub field_spec: FieldSpec,
    pub field_on: bool,
    pub units: Units,
    pub potential: PotentialModel,
    pub radiation_reaction: bool,
    pub init: InitialCondition,
    pub t_end: f64,
    pub dt: DtPolicy,
    pub r_ionize: f64,
    pub r_collapse: f64,
    /// Interval between recorded samples, rounded to a whole number of steps.
    pub stride: f64,
}

impl TrajectorySetup {
    pub fn equation_of_motion(&self) -> EquationOfMotion {
        EquationOfMotion::new(self.potential, &self.units, self.radiation_reaction)
    }

    /// `(dt, n_steps)` for a trajectory starting at `start`.
    pub fn resolve_steps(&self, start: &ParticleState) -> (f64, u64) {
        let target = match self.dt {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Auto { divisor } => {
                let field_period = 2.0 * PI / self.field_spec.omega_max();
                let orbit = self.potential.characteristic_period(&start.r);
                orbit.map_or(field_period, |p| p.min(field_period)) / divisor
            }
        };
        if self.t_end <= 0.0 {
            return (target, 0);
        }
        let n = (self.t_end / target).ceil().max(1.0);
        (self.t_end / n, n as u64)
    }

    pub fn stride_steps(&self, dt: f64) -> u64 {
        ((self.stride / dt).round() as u64).max(1)
    }

    /// Draw the starting state.
    pub fn initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> ParticleState {
        match self.init {
            InitialCondition::Rest => ParticleState::new(Vec3::zeros(), Vec3::zeros(), 0.0),
            InitialCondition::GroundState => {
                let omega = match self.potential {
                    PotentialModel::Harmonic { omega } => omega,
                    _ => 1.0,
                };
                let mut gauss = |sd: f64| {
                    Vec3::new(
                        rng.sample::<f64, _>(StandardNormal) * sd,
                        rng.sample::<f64, _>(StandardNormal) * sd,
                        rng.sample::<f64, _>(StandardNormal) * sd,
                    )
                };
                let r = gauss((0.5 / omega).sqrt());
                let v = gauss((0.5 * omega).sqrt());
                ParticleState::new(r, v, 0.0)
            }
            InitialCondition::Circular {
                radius,
                eccentricity,
            } => {
                let z: f64 = 1.0 - 2.0 * rng.random::<f64>();
                let phi = 2.0 * PI * rng.random::<f64>();
                let s = (1.0 - z * z).max(0.0).sqrt();
                let rhat = Vec3::new(s * phi.cos(), s * phi.sin(), z);
                let (e1, e2) = polarization_pair(&rhat);
                let psi = 2.0 * PI * rng.random::<f64>();
                let that = e1 * psi.cos() + e2 * psi.sin();
                let speed = match self.potential {
                    PotentialModel::Coulomb => ((1.0 + eccentricity) / radius).sqrt(),
                    PotentialModel::Harmonic { omega } => omega * radius,
                    PotentialModel::Free => 0.0,
                };
                ParticleState::new(rhat * radius, that * speed, 0.0)
            }
        }
    }
}

/// One recorded point of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    pub state: ParticleState,
    /// Power delivered by the field, F_field·v.
    pub p_in: f64,
    /// Larmor power τ|a|².
    pub p_rad: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub status: Status,
    pub ledger: EnergyLedger,
    /// Time step actually used.
    pub dt: f64,
}

impl Trajectory {
    /// Time at which integration stopped.
    pub fn end_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.state.t)
    }
}

/// Draw a fresh field realization and initial state from `rng`, then integrate.
pub fn simulate_trajectory<R: Rng + ?Sized>(setup: &TrajectorySetup, rng: &mut R) -> Trajectory {
    let bank = if setup.field_on {
        DipoleBank::new(&sample_modes(&setup.field_spec, &setup.units, rng))
    } else {
        DipoleBank::default()
    };
    simulate_in_field(setup, &bank, rng)
}

/// Integrate in a given (possibly shared) field; `rng` only draws the
/// initial state.
pub fn simulate_in_field<R: Rng + ?Sized>(
    setup: &TrajectorySetup,
    bank: &DipoleBank,
    rng: &mut R,
) -> Trajectory {
    let start = setup.initial_state(rng);
    integrate(setup, bank, start)
}

/// Deterministic integration from `start` to `setup.t_end`.
pub fn integrate(setup: &TrajectorySetup, bank: &DipoleBank, start: ParticleState) -> Trajectory {
    let eom = setup.equation_of_motion();
    let (dt, n_steps) = setup.resolve_steps(&start);
    let stride = setup.stride_steps(dt);
    let t0 = start.t;

    let mut cursor = PhasorCursor::new(bank, t0, dt);
    let mut y = Augmented::start(&start);
    let mut traj = Trajectory {
        samples: Vec::with_capacity((n_steps / stride + 2) as usize),
        status: Status::Completed,
        ledger: EnergyLedger::default(),
        dt,
    };

    let record = |traj: &mut Trajectory, y: &Augmented, t: f64, field| -> bool {
        let Ok(k) = rates(&eom, &y.r, &y.v, &field) else {
            return false;
        };
        let state = ParticleState::new(y.r, y.v, t);
        traj.samples.push(TrajectorySample {
            state,
            p_in: k.p_in,
            p_rad: k.p_rad,
        });
        traj.ledger.push(LedgerSample {
            t,
            work_in: y.work_in,
            radiated: y.radiated,
            reaction_work: y.reaction_work,
            mech: eom.mechanical_energy(&state),
        });
        true
    };

    if !start.is_finite() || !record(&mut traj, &y, t0, cursor.current()) {
        traj.status = Status::Diverged;
        return traj;
    }

    for n in 1..=n_steps {
        let f0 = cursor.current();
        let (fm, f1) = cursor.advance();
        let t = t0 + n as f64 * dt;
        let next = match rk4(&eom, &y, dt, &f0, &fm, &f1) {
            Ok(next) if next.is_finite() => next,
            _ => {
                traj.status = Status::Diverged;
                break;
            }
        };
        y = next;
        let dist = y.r.norm();
        let stop = if dist > setup.r_ionize {
            Some(Status::Ionized)
        } else if matches!(setup.potential, PotentialModel::Coulomb) && dist < setup.r_collapse {
            Some(Status::Diverged)
        } else {
            None
        };
        if let Some(status) = stop {
            traj.status = status;
            record(&mut traj, &y, t, f1);
            break;
        }
        if (n % stride == 0 || n == n_steps) && !record(&mut traj, &y, t, f1) {
            traj.status = Status::Diverged;
            break;
        }
    }
    traj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::FINE_STRUCTURE;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> TrajectorySetup {
        TrajectorySetup {
            field_spec: FieldSpec::new(0.3, 3.0, 60, 4, 0.5, 0).unwrap(),
            field_on: true,
            units: Units::atomic(),
            potential: PotentialModel::Coulomb,
            radiation_reaction: true,
            init: InitialCondition::Circular {
                radius: 1.0,
                eccentricity: 0.0,
            },
            t_end: 20.0,
            dt: DtPolicy::Auto { divisor: 200.0 },
            r_ionize: 25.0,
            r_collapse: 1e-3,
            stride: 0.5,
        }
    }

    #[test]
    fn zero_duration_gives_one_sample() {
        let s = TrajectorySetup {
            t_end: 0.0,
            ..setup()
        };
        let traj = simulate_trajectory(&s, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(traj.samples.len(), 1);
        assert_eq!(traj.status, Status::Completed);
        assert_eq!(traj.ledger.samples().len(), 1);
    }

    #[test]
    fn circular_start_is_on_the_orbit() {
        let s = setup();
        let st = s.initial_state(&mut ChaCha8Rng::seed_from_u64(3));
        assert!((st.r.norm() - 1.0).abs() < 1e-15);
        assert!((st.v.norm() - 1.0).abs() < 1e-15);
        assert!(st.r.dot(&st.v).abs() < 1e-15);
    }

    #[test]
    fn auto_step_policy() {
        let s = setup();
        let start = s.initial_state(&mut ChaCha8Rng::seed_from_u64(3));
        let (dt, n) = s.resolve_steps(&start);
        let target = 2.0 * PI / 3.0 / 200.0;
        assert!(dt <= target && dt > 0.99 * target);
        assert!((dt * n as f64 - 20.0).abs() < 1e-12);
    }

    #[test]
    fn samples_increase_and_end_at_t_end() {
        let traj = simulate_trajectory(&setup(), &mut ChaCha8Rng::seed_from_u64(9));
        assert!(traj.samples.windows(2).all(|w| w[1].state.t > w[0].state.t));
        assert!((traj.end_time() - 20.0).abs() < 1e-9);
        assert_eq!(traj.status, Status::Completed);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let a = simulate_trajectory(&setup(), &mut ChaCha8Rng::seed_from_u64(5));
        let b = simulate_trajectory(&setup(), &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }

    #[test]
    fn ledger_closes_to_integrator_tolerance() {
        let s = TrajectorySetup {
            units: Units::atomic_with_alpha(0.2),
            ..setup()
        };
        let coarse = simulate_trajectory(&s, &mut ChaCha8Rng::seed_from_u64(2));
        let fine = simulate_trajectory(
            &TrajectorySetup {
                dt: DtPolicy::Auto { divisor: 400.0 },
                ..s
            },
            &mut ChaCha8Rng::seed_from_u64(2),
        );
        let (ec, ef) = (coarse.ledger.closure_error(), fine.ledger.closure_error());
        assert!(ec < 1e-8, "{ec}");
        // the books close up to the fourth-order truncation error
        assert!(ec / ef > 10.0, "{ec} {ef}");
    }

    #[test]
    fn field_off_inspiral_loses_energy_monotonically() {
        let s = TrajectorySetup {
            field_on: false,
            t_end: 200.0,
            ..setup()
        };
        let traj = simulate_trajectory(&s, &mut ChaCha8Rng::seed_from_u64(2));
        let mech: Vec<f64> = traj.ledger.samples().iter().map(|l| l.mech).collect();
        assert!(mech.windows(2).all(|w| w[1] < w[0]));
        assert!(traj.ledger.samples().iter().all(|l| l.work_in == 0.0));
        // radius shrinks: dE = −τ t at r ≈ 1, so r ≈ 1 − 2τt
        let r_end = traj.samples.last().unwrap().state.r.norm();
        let tau = 2.0 / 3.0 * FINE_STRUCTURE.powi(3);
        assert!(r_end < 1.0);
        assert!((1.0 - r_end - 2.0 * tau * 200.0).abs() < 0.05 * 2.0 * tau * 200.0);
    }

    #[test]
    fn escaping_charge_is_ionized() {
        let s = TrajectorySetup {
            field_on: false,
            init: InitialCondition::Circular {
                radius: 1.0,
                eccentricity: 1.5,
            },
            r_ionize: 5.0,
            t_end: 50.0,
            ..setup()
        };
        let traj = simulate_trajectory(&s, &mut ChaCha8Rng::seed_from_u64(2));
        assert_eq!(traj.status, Status::Ionized);
        assert!(traj.samples.last().unwrap().state.r.norm() > 5.0);
    }

    #[test]
    fn plunging_orbit_is_diverged() {
        let s = TrajectorySetup {
            field_on: false,
            init: InitialCondition::Circular {
                radius: 1.0,
                eccentricity: -1.0,
            },
            // a radial fall can step across a tiny collapse sphere; 0.1 is
            // several steps wide at the local free-fall speed
            r_collapse: 0.1,
            t_end: 5.0,
            ..setup()
        };
        let traj = simulate_trajectory(&s, &mut ChaCha8Rng::seed_from_u64(2));
        assert_eq!(traj.status, Status::Diverged);
    }
}
