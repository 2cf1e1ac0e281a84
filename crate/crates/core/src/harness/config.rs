//! Flat `key = value` run configuration.
//!
//! Values are layered: experiment defaults, then the config file, then
//! `--set key=value` overrides, then the dedicated CLI flags. Keys whose
//! defaults depend on other keys (durations measured in orbital periods) are
//! materialized last, so `omega = 2` also shortens the default `t_end`.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::dynamics::{DtPolicy, InitialCondition, PotentialModel, TrajectorySetup};
use crate::nearfield::ParticleEM;
use crate::units::{Units, FINE_STRUCTURE};
use crate::zeropoint::{FieldSpec, Vec3};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{keys}: {reason}")]
    Invalid { keys: String, reason: String },
    #[error(
        "t_end ({t_end}) reaches the field recurrence time 2π/Δω = {recurrence}; \
         refine n_freq or pass --allow-recurrence"
    )]
    Recurrence { t_end: f64, recurrence: f64 },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown experiment `{0}` (expected hydrogen, oscillator, field-check, nearfield or inspiral)")]
    UnknownExperiment(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn invalid(keys: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        keys: keys.to_string(),
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Hydrogen,
    Oscillator,
    FieldCheck,
    Nearfield,
    Inspiral,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Hydrogen => "hydrogen",
            Self::Oscillator => "oscillator",
            Self::FieldCheck => "field-check",
            Self::Nearfield => "nearfield",
            Self::Inspiral => "inspiral",
        }
    }

    /// Experiments that integrate trajectories.
    pub fn is_dynamical(&self) -> bool {
        matches!(self, Self::Hydrogen | Self::Oscillator | Self::Inspiral)
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "hydrogen" => Self::Hydrogen,
            "oscillator" => Self::Oscillator,
            "field-check" => Self::FieldCheck,
            "nearfield" => Self::Nearfield,
            "inspiral" => Self::Inspiral,
            other => return Err(ConfigError::UnknownExperiment(other.to_string())),
        })
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every accepted key with its help text.
pub const KEYS: &[(&str, &str)] = &[
    ("omega_min", "lower edge of the field frequency window, 1/t_au [0.3]"),
    ("omega_max", "upper edge of the field frequency window, 1/t_au [3]"),
    ("n_freq", "number of frequency cells [600]"),
    ("n_dir", "propagation directions per frequency cell [16]"),
    ("jitter", "random offset of each frequency inside its cell, in [0,1) [0.5]"),
    ("field", "on|off: drive with the zero-point field [off for inspiral, else on]"),
    ("shared_field", "true: one field realization for all trajectories [false]"),
    ("alpha", "fine-structure constant; sets c = 1/alpha and tau_e = (2/3)alpha^3 [1/137.035999; 0.31 for oscillator]"),
    ("potential", "coulomb|harmonic|free [coulomb; harmonic for oscillator]"),
    ("omega", "harmonic angular frequency [1]"),
    ("radiation_reaction", "on|off [on]"),
    ("init", "circular|rest|ground initial condition [circular; rest for oscillator]"),
    ("r0", "initial (pericenter) radius for init = circular, a0 [1]"),
    ("eccentricity", "orbit eccentricity for init = circular [0]"),
    ("n_traj", "number of trajectories [hydrogen 50, oscillator 200, inspiral 1]"),
    ("t_end", "duration, t_au [200 periods; 1000 periods for inspiral]"),
    ("dt", "auto or a fixed step, t_au [auto]"),
    ("dt_divisor", "auto step = min(2pi/omega_max, orbital period)/dt_divisor [200]"),
    ("r_ionize", "radius beyond which a run counts as ionized, a0 [25]"),
    ("r_collapse", "Coulomb radius below which a run counts as diverged, a0 [1e-3]"),
    ("burn_in", "initial span excluded from statistics, t_au [50 periods]"),
    ("stride", "interval between recorded samples, t_au [period/16]"),
    ("hist_bins", "histogram bin count [100]"),
    ("hist_r_max", "upper edge of the radial histogram, a0 [6]"),
    ("hist_x_max", "half-width of the Cartesian position histograms, a0 [4/sqrt(omega)]"),
    ("n_resample", "field-check: number of independent field realizations [10000]"),
    ("n_times", "field-check: random evaluation times per realization [4]"),
    ("particle", "nearfield: electron|positron|proton|neutron|neutrino|custom [electron]"),
    ("z", "nearfield custom: charge number"),
    ("g", "nearfield custom: g-factor"),
    ("mass", "nearfield custom: mass, electron masses"),
    ("spin", "nearfield custom: spin vector x,y,z in units of hbar"),
    ("moment", "nearfield: explicit magnetic moment x,y,z overriding g(q/2m)S"),
    ("point", "nearfield: field point relative to the particle, a0 [1,0,0]"),
    ("velocity", "nearfield: particle velocity [0,0,0]"),
    ("acceleration", "nearfield: particle acceleration [0,0,0]"),
    ("seed", "master seed [1]"),
    ("out_dir", "output directory [runs/<experiment>]"),
    ("workers", "worker threads; never changes results [available cores]"),
    ("allow_recurrence", "accept t_end beyond the field recurrence time [false]"),
];

/// Multi-line key reference for `--help`.
pub fn key_help() -> String {
    let mut s = String::from("Config keys (file lines or --set key=value):\n");
    for (k, doc) in KEYS {
        s.push_str(&format!("  {k:<20} {doc}\n"));
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    Coulomb,
    Harmonic,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitKind {
    Circular,
    Rest,
    Ground,
}

/// A fully materialized, validated run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_freq: usize,
    pub n_dir: usize,
    pub jitter: f64,
    pub field: bool,
    pub shared_field: bool,
    pub alpha: f64,
    pub potential: PotentialKind,
    pub omega: f64,
    pub radiation_reaction: bool,
    pub init: InitKind,
    pub r0: f64,
    pub eccentricity: f64,
    pub n_traj: usize,
    pub t_end: f64,
    /// `None` = auto.
    pub dt: Option<f64>,
    pub dt_divisor: f64,
    pub r_ionize: f64,
    pub r_collapse: f64,
    pub burn_in: f64,
    pub stride: f64,
    pub hist_bins: usize,
    pub hist_r_max: f64,
    pub hist_x_max: f64,
    pub n_resample: usize,
    pub n_times: usize,
    pub particle: String,
    pub z: i32,
    pub g: f64,
    pub mass: f64,
    pub spin: Vec3,
    pub moment: Option<Vec3>,
    pub point: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub workers: usize,
    pub allow_recurrence: bool,
}

/// Raw layered overrides before materialization.
#[derive(Clone, Debug)]
pub struct ConfigBuilder {
    cfg: RunConfig,
    t_end: Option<f64>,
    burn_in: Option<f64>,
    stride: Option<f64>,
    hist_x_max: Option<f64>,
    out_dir: Option<PathBuf>,
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| bad(key, value, "not a number of the expected kind"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(bad(key, value, "expected on/off or true/false")),
    }
}

fn parse_vec3(key: &str, value: &str) -> Result<Vec3, ConfigError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad(key, value, "expected three comma-separated numbers"));
    }
    let mut v = Vec3::zeros();
    for (i, p) in parts.iter().enumerate() {
        v[i] = parse_num(key, p)?;
    }
    Ok(v)
}

fn fmt_vec3(v: &Vec3) -> String {
    format!("{},{},{}", v.x, v.y, v.z)
}

impl ConfigBuilder {
    /// Documented defaults for `experiment`.
    pub fn new(experiment: Experiment) -> Self {
        let mut cfg = RunConfig {
            experiment,
            omega_min: 0.3,
            omega_max: 3.0,
            n_freq: 600,
            n_dir: 16,
            jitter: 0.5,
            field: true,
            shared_field: false,
            alpha: FINE_STRUCTURE,
            potential: PotentialKind::Coulomb,
            omega: 1.0,
            radiation_reaction: true,
            init: InitKind::Circular,
            r0: 1.0,
            eccentricity: 0.0,
            n_traj: 50,
            t_end: 0.0,
            dt: None,
            dt_divisor: 200.0,
            r_ionize: 25.0,
            r_collapse: 1e-3,
            burn_in: 0.0,
            stride: 0.0,
            hist_bins: 100,
            hist_r_max: 6.0,
            hist_x_max: 4.0,
            n_resample: 10_000,
            n_times: 4,
            particle: "electron".to_string(),
            z: -1,
            g: crate::nearfield::G_ELECTRON,
            mass: 1.0,
            spin: Vec3::new(0.0, 0.0, 0.5),
            moment: None,
            point: Vec3::x(),
            velocity: Vec3::zeros(),
            acceleration: Vec3::zeros(),
            seed: 1,
            out_dir: PathBuf::new(),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            allow_recurrence: false,
        };
        match experiment {
            Experiment::Oscillator => {
                cfg.potential = PotentialKind::Harmonic;
                cfg.init = InitKind::Rest;
                cfg.alpha = 0.31;
                cfg.n_traj = 200;
            }
            Experiment::Inspiral => {
                cfg.field = false;
                cfg.n_traj = 1;
            }
            _ => {}
        }
        Self {
            cfg,
            t_end: None,
            burn_in: None,
            stride: None,
            hist_x_max: None,
            out_dir: None,
        }
    }

    /// Apply one `key = value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<&mut Self, ConfigError> {
        let c = &mut self.cfg;
        match key {
            "omega_min" => c.omega_min = parse_num(key, value)?,
            "omega_max" => c.omega_max = parse_num(key, value)?,
            "n_freq" => c.n_freq = parse_num(key, value)?,
            "n_dir" => c.n_dir = parse_num(key, value)?,
            "jitter" => c.jitter = parse_num(key, value)?,
            "field" => c.field = parse_bool(key, value)?,
            "shared_field" => c.shared_field = parse_bool(key, value)?,
            "alpha" => c.alpha = parse_num(key, value)?,
            "potential" => {
                c.potential = match value {
                    "coulomb" => PotentialKind::Coulomb,
                    "harmonic" => PotentialKind::Harmonic,
                    "free" => PotentialKind::Free,
                    _ => return Err(bad(key, value, "expected coulomb, harmonic or free")),
                }
            }
            "omega" => c.omega = parse_num(key, value)?,
            "radiation_reaction" => c.radiation_reaction = parse_bool(key, value)?,
            "init" => {
                c.init = match value {
                    "circular" => InitKind::Circular,
                    "rest" => InitKind::Rest,
                    "ground" => InitKind::Ground,
                    _ => return Err(bad(key, value, "expected circular, rest or ground")),
                }
            }
            "r0" => c.r0 = parse_num(key, value)?,
            "eccentricity" => c.eccentricity = parse_num(key, value)?,
            "n_traj" => c.n_traj = parse_num(key, value)?,
            "t_end" => self.t_end = Some(parse_num(key, value)?),
            "dt" => {
                c.dt = if value == "auto" {
                    None
                } else {
                    Some(parse_num(key, value)?)
                }
            }
            "dt_divisor" => c.dt_divisor = parse_num(key, value)?,
            "r_ionize" => c.r_ionize = parse_num(key, value)?,
            "r_collapse" => c.r_collapse = parse_num(key, value)?,
            "burn_in" => self.burn_in = Some(parse_num(key, value)?),
            "stride" => self.stride = Some(parse_num(key, value)?),
            "hist_bins" => c.hist_bins = parse_num(key, value)?,
            "hist_r_max" => c.hist_r_max = parse_num(key, value)?,
            "hist_x_max" => self.hist_x_max = Some(parse_num(key, value)?),
            "n_resample" => c.n_resample = parse_num(key, value)?,
            "n_times" => c.n_times = parse_num(key, value)?,
            "particle" => c.particle = value.to_string(),
            "z" => c.z = parse_num(key, value)?,
            "g" => c.g = parse_num(key, value)?,
            "mass" => c.mass = parse_num(key, value)?,
            "spin" => c.spin = parse_vec3(key, value)?,
            "moment" => {
                c.moment = if value == "none" {
                    None
                } else {
                    Some(parse_vec3(key, value)?)
                }
            }
            "point" => c.point = parse_vec3(key, value)?,
            "velocity" => c.velocity = parse_vec3(key, value)?,
            "acceleration" => c.acceleration = parse_vec3(key, value)?,
            "seed" => c.seed = parse_num(key, value)?,
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            "workers" => c.workers = parse_num(key, value)?,
            "allow_recurrence" => c.allow_recurrence = parse_bool(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(self)
    }

    /// Apply a `key=value` string as given to `--set`.
    pub fn set_pair(&mut self, pair: &str) -> Result<&mut Self, ConfigError> {
        let (k, v) = pair.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: 0,
            text: pair.to_string(),
        })?;
        self.set(k.trim(), v.trim())
    }

    /// Apply every line of a config file body.
    pub fn apply_text(&mut self, text: &str) -> Result<&mut Self, ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(self)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<&mut Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text)
    }

    /// Materialize derived defaults and validate.
    pub fn build(&self) -> Result<RunConfig, ConfigError> {
        let mut c = self.cfg.clone();
        let period = c.characteristic_period();
        let default_periods = if c.experiment == Experiment::Inspiral {
            1000.0
        } else {
            200.0
        };
        c.t_end = self.t_end.unwrap_or(default_periods * period);
        c.burn_in = self.burn_in.unwrap_or(50.0 * period);
        c.stride = self.stride.unwrap_or(period / 16.0);
        c.hist_x_max = self.hist_x_max.unwrap_or(4.0 / c.omega.sqrt());
        c.out_dir = self
            .out_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("runs").join(c.experiment.name()));
        c.validate()?;
        Ok(c)
    }
}

impl RunConfig {
    /// Defaults for `experiment`, materialized and validated.
    pub fn defaults(experiment: Experiment) -> Result<Self, ConfigError> {
        ConfigBuilder::new(experiment).build()
    }

    /// Orbital period that sets default durations: 2π/ω for the oscillator,
    /// the Kepler period at `r0` otherwise.
    pub fn characteristic_period(&self) -> f64 {
        match self.potential {
            PotentialKind::Harmonic => 2.0 * PI / self.omega,
            _ => 2.0 * PI * self.r0.powf(1.5),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.omega_min > 0.0) {
            return Err(invalid("omega_min", "must be positive"));
        }
        if !(self.omega_min < self.omega_max) {
            return Err(invalid(
                "omega_min, omega_max",
                format!(
                    "omega_min ({}) must be below omega_max ({})",
                    self.omega_min, self.omega_max
                ),
            ));
        }
        let positive = [
            ("alpha", self.alpha),
            ("omega", self.omega),
            ("r0", self.r0),
            ("dt_divisor", self.dt_divisor),
            ("r_ionize", self.r_ionize),
            ("r_collapse", self.r_collapse),
            ("stride", self.stride),
            ("hist_r_max", self.hist_r_max),
            ("hist_x_max", self.hist_x_max),
            ("mass", self.mass),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(key, format!("must be positive, got {v}")));
            }
        }
        let counts = [
            ("n_freq", self.n_freq),
            ("n_dir", self.n_dir),
            ("n_traj", self.n_traj),
            ("hist_bins", self.hist_bins),
            ("n_resample", self.n_resample),
            ("n_times", self.n_times),
            ("workers", self.workers),
        ];
        for (key, v) in counts {
            if v == 0 {
                return Err(invalid(key, "must be at least 1"));
            }
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return Err(invalid("jitter", "must lie in [0, 1)"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", "must be finite and non-negative"));
        }
        if !(self.burn_in >= 0.0) {
            return Err(invalid("burn_in", "must be non-negative"));
        }
        if !(self.eccentricity > -1.0) {
            return Err(invalid("eccentricity", "must exceed -1"));
        }
        if self.init == InitKind::Rest && self.potential == PotentialKind::Coulomb {
            return Err(invalid(
                "init, potential",
                "a charge at rest on a Coulomb center is singular",
            ));
        }
        let max_dt = 0.05 * 2.0 * PI / self.omega_max;
        match self.dt {
            Some(dt) if !(dt > 0.0 && dt <= max_dt) => {
                return Err(invalid(
                    "dt",
                    format!("must lie in (0, {max_dt}] (0.05 of the shortest field period)"),
                ))
            }
            None if self.dt_divisor < 20.0 => {
                return Err(invalid(
                    "dt_divisor",
                    "must be at least 20 so the step stays below 0.05 field periods",
                ))
            }
            _ => {}
        }
        if self.experiment.is_dynamical() && self.field && !self.allow_recurrence {
            let recurrence = self.field_spec().recurrence_time();
            if self.t_end >= recurrence {
                return Err(ConfigError::Recurrence {
                    t_end: self.t_end,
                    recurrence,
                });
            }
        }
        if self.experiment == Experiment::Nearfield {
            self.particle()?;
            if !(self.point.norm() > 0.0) {
                return Err(invalid(
                    "point",
                    "field point must differ from the particle position",
                ));
            }
        }
        Ok(())
    }

    pub fn units(&self) -> Units {
        Units::atomic_with_alpha(self.alpha)
    }

    /// Field window with the master seed as provenance.
    pub fn field_spec(&self) -> FieldSpec {
        FieldSpec::new(
            self.omega_min,
            self.omega_max,
            self.n_freq,
            self.n_dir,
            self.jitter,
            self.seed,
        )
        .expect("validated field spec")
    }

    pub fn potential_model(&self) -> PotentialModel {
        match self.potential {
            PotentialKind::Coulomb => PotentialModel::Coulomb,
            PotentialKind::Harmonic => PotentialModel::Harmonic { omega: self.omega },
            PotentialKind::Free => PotentialModel::Free,
        }
    }

    pub fn trajectory_setup(&self) -> TrajectorySetup {
        TrajectorySetup {
            field_spec: self.field_spec(),
            field_on: self.field,
            units: self.units(),
            potential: self.potential_model(),
            radiation_reaction: self.radiation_reaction,
            init: match self.init {
                InitKind::Circular => InitialCondition::Circular {
                    radius: self.r0,
                    eccentricity: self.eccentricity,
                },
                InitKind::Rest => InitialCondition::Rest,
                InitKind::Ground => InitialCondition::GroundState,
            },
            t_end: self.t_end,
            dt: match self.dt {
                Some(dt) => DtPolicy::Fixed(dt),
                None => DtPolicy::Auto {
                    divisor: self.dt_divisor,
                },
            },
            r_ionize: self.r_ionize,
            r_collapse: self.r_collapse,
            stride: self.stride,
        }
    }

    /// The particle for the `nearfield` experiment.
    pub fn particle(&self) -> Result<ParticleEM, ConfigError> {
        let mut p = if self.particle == "custom" {
            ParticleEM::new(self.z, self.mass, self.g, self.spin)
                .map_err(|e| invalid("mass", e.to_string()))?
        } else {
            ParticleEM::preset(&self.particle)
                .map_err(|e| bad("particle", &self.particle, e.to_string()))?
        };
        if self.moment.is_some() {
            p.moment_override = self.moment;
        }
        Ok(p)
    }

    /// Ordered `(key, value)` echo of every result-affecting key. `workers`
    /// and `out_dir` are left out: they never change the outputs.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let potential = match self.potential {
            PotentialKind::Coulomb => "coulomb",
            PotentialKind::Harmonic => "harmonic",
            PotentialKind::Free => "free",
        };
        let init = match self.init {
            InitKind::Circular => "circular",
            InitKind::Rest => "rest",
            InitKind::Ground => "ground",
        };
        let onoff = |b: bool| if b { "on" } else { "off" }.to_string();
        vec![
            ("experiment", self.experiment.name().to_string()),
            ("omega_min", self.omega_min.to_string()),
            ("omega_max", self.omega_max.to_string()),
            ("n_freq", self.n_freq.to_string()),
            ("n_dir", self.n_dir.to_string()),
            ("jitter", self.jitter.to_string()),
            ("field", onoff(self.field)),
            ("shared_field", self.shared_field.to_string()),
            ("alpha", self.alpha.to_string()),
            ("potential", potential.to_string()),
            ("omega", self.omega.to_string()),
            ("radiation_reaction", onoff(self.radiation_reaction)),
            ("init", init.to_string()),
            ("r0", self.r0.to_string()),
            ("eccentricity", self.eccentricity.to_string()),
            ("n_traj", self.n_traj.to_string()),
            ("t_end", self.t_end.to_string()),
            ("dt", self.dt.map_or("auto".to_string(), |d| d.to_string())),
            ("dt_divisor", self.dt_divisor.to_string()),
            ("r_ionize", self.r_ionize.to_string()),
            ("r_collapse", self.r_collapse.to_string()),
            ("burn_in", self.burn_in.to_string()),
            ("stride", self.stride.to_string()),
            ("hist_bins", self.hist_bins.to_string()),
            ("hist_r_max", self.hist_r_max.to_string()),
            ("hist_x_max", self.hist_x_max.to_string()),
            ("n_resample", self.n_resample.to_string()),
            ("n_times", self.n_times.to_string()),
            ("particle", self.particle.clone()),
            ("z", self.z.to_string()),
            ("g", self.g.to_string()),
            ("mass", self.mass.to_string()),
            ("spin", fmt_vec3(&self.spin)),
            (
                "moment",
                self.moment.map_or("none".to_string(), |m| fmt_vec3(&m)),
            ),
            ("point", fmt_vec3(&self.point)),
            ("velocity", fmt_vec3(&self.velocity)),
            ("acceleration", fmt_vec3(&self.acceleration)),
            ("seed", self.seed.to_string()),
            ("allow_recurrence", self.allow_recurrence.to_string()),
        ]
    }
}

/// Build a config the way the CLI does: defaults, file, `--set` pairs, then
/// the dedicated flags.
pub fn resolve_config(
    experiment: &str,
    config_file: Option<&Path>,
    sets: &[String],
    out: Option<&Path>,
    seed: Option<u64>,
    workers: Option<usize>,
    allow_recurrence: bool,
) -> Result<RunConfig, ConfigError> {
    let mut b = ConfigBuilder::new(experiment.parse()?);
    if let Some(path) = config_file {
        b.apply_file(path)?;
    }
    for pair in sets {
        b.set_pair(pair)?;
    }
    if let Some(out) = out {
        b.out_dir = Some(out.to_path_buf());
    }
    if let Some(seed) = seed {
        b.cfg.seed = seed;
    }
    if let Some(w) = workers {
        b.cfg.workers = w;
    }
    if allow_recurrence {
        b.cfg.allow_recurrence = true;
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_defaults() {
        let c = RunConfig::defaults(Experiment::Oscillator).unwrap();
        assert_eq!(c.potential, PotentialKind::Harmonic);
        assert_eq!(c.omega, 1.0);
        assert_eq!((c.omega_min, c.omega_max), (0.3, 3.0));
        assert_eq!((c.n_freq, c.n_dir, c.n_traj), (600, 16, 200));
        assert!((c.t_end - 400.0 * PI).abs() < 1e-9);
        assert!((c.burn_in - 100.0 * PI).abs() < 1e-9);
        assert_eq!(c.out_dir, PathBuf::from("runs/oscillator"));
    }

    #[test]
    fn every_experiment_has_valid_defaults() {
        for e in [
            "hydrogen",
            "oscillator",
            "field-check",
            "nearfield",
            "inspiral",
        ] {
            resolve_config(e, None, &[], None, None, None, false).unwrap();
        }
    }

    #[test]
    fn inverted_window_names_both_keys() {
        let err = resolve_config(
            "oscillator",
            None,
            &["omega_min=3".into(), "omega_max=1".into()],
            None,
            None,
            None,
            false,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("omega_min") && msg.contains("omega_max"),
            "{msg}"
        );
    }

    #[test]
    fn recurrence_needs_override() {
        let sets = vec!["t_end=6283.2".to_string()];
        let err = resolve_config("oscillator", None, &sets, None, None, None, false).unwrap_err();
        assert!(matches!(err, ConfigError::Recurrence { .. }));
        resolve_config("oscillator", None, &sets, None, None, None, true).unwrap();
        // no field, no recurrence
        let off = vec!["t_end=6283.2".to_string(), "field=off".to_string()];
        resolve_config("oscillator", None, &off, None, None, None, false).unwrap();
    }

    #[test]
    fn unknown_key_is_named() {
        let err = resolve_config(
            "hydrogen",
            None,
            &["colour=blue".into()],
            None,
            None,
            None,
            false,
        )
        .unwrap_err();
        assert!(err.to_string().contains("colour"));
    }

    #[test]
    fn out_of_range_values() {
        for set in [
            "jitter=1",
            "n_traj=0",
            "alpha=-1",
            "dt=0.5",
            "dt_divisor=10",
            "n_freq=x",
        ] {
            let err = resolve_config("hydrogen", None, &[set.into()], None, None, None, false)
                .unwrap_err();
            let key = set.split('=').next().unwrap();
            assert!(err.to_string().contains(key), "{set}: {err}");
        }
        let err = resolve_config(
            "hydrogen",
            None,
            &["init=rest".into()],
            None,
            None,
            None,
            false,
        )
        .unwrap_err();
        assert!(err.to_string().contains("init"));
    }

    #[test]
    fn file_then_sets_then_flags() {
        let mut b = ConfigBuilder::new(Experiment::Hydrogen);
        b.apply_text("# comment\nn_traj = 7\nseed = 4 # trailing\n\nomega = 2\n")
            .unwrap();
        b.set_pair("n_traj=9").unwrap();
        let c = b.build().unwrap();
        assert_eq!((c.n_traj, c.seed, c.omega), (9, 4, 2.0));
        assert!(matches!(
            ConfigBuilder::new(Experiment::Hydrogen).apply_text("nonsense"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn derived_defaults_follow_omega() {
        let c = resolve_config(
            "oscillator",
            None,
            &["omega=2".into()],
            None,
            None,
            None,
            false,
        )
        .unwrap();
        assert!((c.t_end - 200.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn echo_round_trips_through_builder() {
        let c = resolve_config(
            "nearfield",
            None,
            &[
                "particle=custom".into(),
                "z=2".into(),
                "spin=0,0.5,0".into(),
            ],
            None,
            Some(77),
            None,
            false,
        )
        .unwrap();
        let mut b = ConfigBuilder::new(Experiment::Nearfield);
        for (k, v) in c.entries() {
            if k != "experiment" {
                b.set(k, &v).unwrap();
            }
        }
        let mut again = b.build().unwrap();
        again.workers = c.workers;
        again.out_dir = c.out_dir.clone();
        assert_eq!(again, c);
    }

    #[test]
    fn help_lists_every_key() {
        let help = key_help();
        for (k, _) in KEYS {
            assert!(help.contains(k));
        }
    }
}
