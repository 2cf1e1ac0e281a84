use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::config::{Experiment, PotentialKind, RunConfig};
use super::output;
use super::{rng_for, shared_field_seed, trajectory_seed};
use crate::diagnostics::{
    compare_distributions, for_each_weighted, gaussian_reference, qm_ground_state_radial,
    reference_bin_densities, throughput_report, Axis, DiagnosticsError, DistributionMetrics,
    EnergyLedger, Histogram, LedgerSum, Moments, ThroughputReport,
};
use crate::dynamics::{simulate_in_field, Status};
use crate::nearfield::{near_field, FieldAtPoint, NearFieldError};
use crate::zeropoint::{
    sample_modes, window_energy_density, DipoleBank, FieldSource, ModeEnsemble,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("worker panicked: {0}")]
    WorkerPanic(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    NearField(#[from] NearFieldError),
    #[error(transparent)]
    Config(#[from] super::config::ConfigError),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StatusCounts {
    pub completed: usize,
    pub ionized: usize,
    pub diverged: usize,
}

impl StatusCounts {
    fn add(&mut self, s: Status) {
        match s {
            Status::Completed => self.completed += 1,
            Status::Ionized => self.ionized += 1,
            Status::Diverged => self.diverged += 1,
        }
    }
}

/// What a finished run reports back.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub config: RunConfig,
    pub version: &'static str,
    /// One seed per trajectory (dynamical runs) or resample (field check).
    pub seeds: Vec<u64>,
    pub status_counts: StatusCounts,
    /// Emitted files, relative to `config.out_dir`.
    pub files: Vec<PathBuf>,
    pub wall_clock: Duration,
    pub report: Vec<(String, String)>,
}

impl RunRecord {
    /// Flat key-value form written to `run_record.txt`. The wall-clock time
    /// is left out so that repeated runs give identical files.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut e = vec![("version".to_string(), self.version.to_string())];
        for (k, v) in self.config.entries() {
            e.push((format!("config.{k}"), v));
        }
        let c = &self.status_counts;
        e.push(("status.completed".into(), c.completed.to_string()));
        e.push(("status.ionized".into(), c.ionized.to_string()));
        e.push(("status.diverged".into(), c.diverged.to_string()));
        for (i, s) in self.seeds.iter().enumerate() {
            e.push((format!("seed.{i}"), s.to_string()));
        }
        for (i, f) in self.files.iter().enumerate() {
            e.push((format!("file.{i}"), f.display().to_string()));
        }
        e
    }
}

/// Per-trajectory result after the samples have been reduced.
#[derive(Clone, Debug)]
pub struct TrajectoryOutcome {
    pub index: usize,
    pub seed: u64,
    pub status: Status,
    pub end_time: f64,
    pub dt: f64,
    pub closure_error: f64,
    pub radial: Histogram,
    pub axes: [Histogram; 3],
    pub moments: [Moments; 3],
}

/// Merged diagnostics of a trajectory ensemble.
#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub outcomes: Vec<TrajectoryOutcome>,
    pub status_counts: StatusCounts,
    pub radial: Histogram,
    pub axes: [Histogram; 3],
    pub moments: [Moments; 3],
    /// Sum of the ledgers of completed trajectories.
    pub ledger_sum: LedgerSum,
    pub burn_in: f64,
    pub t_end: f64,
}

fn moments_minus(a: &Moments, b: &Moments) -> Moments {
    Moments {
        weight: a.weight - b.weight,
        s1: a.s1 - b.s1,
        s2: a.s2 - b.s2,
        s3: a.s3 - b.s3,
        s4: a.s4 - b.s4,
    }
}

impl EnsembleResult {
    pub fn bound_fraction(&self) -> f64 {
        self.status_counts.completed as f64 / self.outcomes.len() as f64
    }

    /// Ensemble-mean ledger of the completed trajectories.
    pub fn mean_ledger(&self) -> EnergyLedger {
        self.ledger_sum.mean()
    }

    /// Throughput on the stationary window `[burn_in, t_end]`.
    pub fn throughput(&self) -> Result<ThroughputReport, DiagnosticsError> {
        throughput_report(&self.mean_ledger(), (self.burn_in, self.t_end))
    }

    /// Jackknife (leave-one-trajectory-out) estimate and standard error of a
    /// statistic of the merged per-axis moments.
    pub fn jackknife<F: Fn(&Moments) -> f64>(&self, axis: Axis, stat: F) -> (f64, f64) {
        let k = axis.index();
        let total = &self.moments[k];
        let value = stat(total);
        let used: Vec<&TrajectoryOutcome> = self
            .outcomes
            .iter()
            .filter(|o| o.moments[k].weight > 0.0)
            .collect();
        let n = used.len();
        if n < 2 {
            return (value, f64::NAN);
        }
        let loo: Vec<f64> = used
            .iter()
            .map(|o| stat(&moments_minus(total, &o.moments[k])))
            .collect();
        let mean = loo.iter().sum::<f64>() / n as f64;
        let ss: f64 = loo.iter().map(|x| (x - mean).powi(2)).sum();
        (value, ((n as f64 - 1.0) / n as f64 * ss).sqrt())
    }

    pub fn variance_with_error(&self, axis: Axis) -> (f64, f64) {
        self.jackknife(axis, Moments::variance)
    }

    pub fn kurtosis_with_error(&self, axis: Axis) -> (f64, f64) {
        self.jackknife(axis, Moments::excess_kurtosis)
    }

    /// Radial histogram against the hydrogen ground state.
    pub fn radial_metrics(&self) -> Result<DistributionMetrics, DiagnosticsError> {
        compare_distributions(&self.radial, qm_ground_state_radial)
    }

    /// Cartesian histogram against the oscillator ground-state Gaussian.
    pub fn axis_metrics(
        &self,
        axis: Axis,
        omega: f64,
    ) -> Result<DistributionMetrics, DiagnosticsError> {
        compare_distributions(&self.axes[axis.index()], gaussian_reference(omega))
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".to_string()
    }
}

/// Map `job` over `0..n` on `workers` threads, results in index order.
fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(
    workers: usize,
    n: usize,
    job: F,
) -> Result<Vec<T>, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    catch_unwind(AssertUnwindSafe(|| {
        pool.install(|| (0..n).into_par_iter().map(&job).collect::<Vec<T>>())
    }))
    .map_err(|p| RunError::WorkerPanic(panic_message(p)))
}

fn empty_histograms(config: &RunConfig) -> (Histogram, [Histogram; 3]) {
    let radial = Histogram::uniform(0.0, config.hist_r_max, config.hist_bins).expect("validated");
    let axis = Histogram::uniform(-config.hist_x_max, config.hist_x_max, config.hist_bins)
        .expect("validated");
    (radial, [axis.clone(), axis.clone(), axis])
}

/// Integrate the `n_traj` trajectories of a dynamical experiment and merge
/// their diagnostics. Nothing is written to disk.
pub fn simulate_ensemble(config: &RunConfig) -> Result<EnsembleResult, RunError> {
    let setup = config.trajectory_setup();
    let shared = if config.field && config.shared_field {
        let mut rng = rng_for(shared_field_seed(config.seed));
        Some(DipoleBank::new(&sample_modes(
            &setup.field_spec,
            &setup.units,
            &mut rng,
        )))
    } else {
        None
    };
    let no_field = DipoleBank::default();

    let job = |index: usize| {
        let seed = trajectory_seed(config.seed, index as u64);
        let mut rng = rng_for(seed);
        let own;
        let bank = match (&shared, config.field) {
            (Some(b), _) => b,
            (None, true) => {
                own = DipoleBank::new(&sample_modes(&setup.field_spec, &setup.units, &mut rng));
                &own
            }
            (None, false) => &no_field,
        };
        let traj = simulate_in_field(&setup, bank, &mut rng);

        let (mut radial, mut axes) = empty_histograms(config);
        let mut moments = [Moments::default(); 3];
        for_each_weighted(&traj, config.burn_in, |s, w| {
            radial.add(s.state.r.norm(), w);
            for k in 0..3 {
                axes[k].add(s.state.r[k], w);
                moments[k].add(s.state.r[k], w);
            }
        });
        let outcome = TrajectoryOutcome {
            index,
            seed,
            status: traj.status,
            end_time: traj.end_time(),
            dt: traj.dt,
            closure_error: traj.ledger.closure_error(),
            radial,
            axes,
            moments,
        };
        let ledger = (traj.status == Status::Completed).then_some(traj.ledger);
        (outcome, ledger)
    };
    let results = par_map(config.workers, config.n_traj, job)?;

    let (mut radial, mut axes) = empty_histograms(config);
    let mut moments = [Moments::default(); 3];
    let mut counts = StatusCounts::default();
    let mut ledger_sum = LedgerSum::default();
    let mut outcomes = Vec::with_capacity(results.len());
    for (o, ledger) in results {
        counts.add(o.status);
        radial.merge(&o.radial)?;
        for k in 0..3 {
            axes[k].merge(&o.axes[k])?;
            moments[k].merge(&o.moments[k]);
        }
        if let Some(l) = ledger {
            ledger_sum.add(&l)?;
        }
        outcomes.push(o);
    }
    Ok(EnsembleResult {
        outcomes,
        status_counts: counts,
        radial,
        axes,
        moments,
        ledger_sum,
        burn_in: config.burn_in,
        t_end: config.t_end,
    })
}

/// Ensemble statistics of the synthesized field at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldCheckResult {
    pub seeds: Vec<u64>,
    /// ε₀⟨|E|²⟩ over all realizations and evaluation times.
    pub measured: f64,
    /// Standard error of `measured` from the spread across realizations.
    pub standard_error: f64,
    /// ∫ρ_ZP dω over the window.
    pub analytic: f64,
    pub relative_error: f64,
    /// ε₀⟨|E|²⟩ at t = 0 only.
    pub measured_t0: f64,
    /// ε₀⟨|E|²⟩ at the random later times only.
    pub measured_later: f64,
    /// ε₀⟨E_i E_j⟩ / measured; isotropy makes this δ_ij/3.
    pub covariance: [[f64; 3]; 3],
}

/// Resample the field `n_resample` times and compare the energy density at
/// the origin with the spectral integral.
pub fn field_check(config: &RunConfig) -> Result<FieldCheckResult, RunError> {
    let spec = config.field_spec();
    let units = config.units();
    let eps0 = units.eps0;
    let horizon = spec.recurrence_time();
    let n_times = config.n_times;

    let job = |index: usize| {
        let seed = trajectory_seed(config.seed, index as u64);
        let mut rng = rng_for(seed);
        let ensemble: ModeEnsemble = sample_modes(&spec, &units, &mut rng);
        let bank = DipoleBank::new(&ensemble);
        let e0 = bank.sample(0.0).e;
        let mut later = 0.0;
        for _ in 0..n_times {
            let t = horizon * rng.random::<f64>();
            later += eps0 * bank.sample(t).e.norm_squared();
        }
        (seed, e0, later / n_times as f64)
    };
    let results = par_map(config.workers, config.n_resample, job)?;

    let n = results.len() as f64;
    let mut cov = [[0.0; 3]; 3];
    let (mut sum, mut sum_sq, mut sum_t0, mut sum_later) = (0.0, 0.0, 0.0, 0.0);
    for (_, e0, later) in &results {
        let u0 = eps0 * e0.norm_squared();
        // equal weight for t = 0 and the random-time average
        let u = 0.5 * (u0 + later);
        sum += u;
        sum_sq += u * u;
        sum_t0 += u0;
        sum_later += later;
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += eps0 * e0[i] * e0[j];
            }
        }
    }
    let measured = sum / n;
    let var = (sum_sq / n - measured * measured).max(0.0) * n / (n - 1.0).max(1.0);
    let analytic = window_energy_density(&units, spec.omega_min(), spec.omega_max());
    for row in cov.iter_mut() {
        for c in row.iter_mut() {
            *c /= sum_t0;
        }
    }
    Ok(FieldCheckResult {
        seeds: results.iter().map(|r| r.0).collect(),
        measured,
        standard_error: (var / n).sqrt(),
        analytic,
        relative_error: (measured - analytic) / analytic,
        measured_t0: sum_t0 / n,
        measured_later: sum_later / n,
        covariance: cov,
    })
}

/// Near field of the configured particle at the configured point.
pub fn nearfield_report(config: &RunConfig) -> Result<FieldAtPoint, RunError> {
    let particle = config.particle()?;
    let r = config.point.norm();
    let rhat = config.point / r;
    Ok(near_field(
        &config.units(),
        &particle,
        &rhat,
        r,
        &config.velocity,
        &config.acceleration,
    )?)
}

fn kv(key: impl Into<String>, value: impl ToString) -> (String, String) {
    (key.into(), value.to_string())
}

fn metrics_entries(prefix: &str, m: &DistributionMetrics) -> Vec<(String, String)> {
    vec![
        kv(format!("{prefix}kl"), m.kl),
        kv(format!("{prefix}l2"), m.l2),
        kv(format!("{prefix}excluded_mass"), m.excluded_mass),
        kv(format!("{prefix}hist_peak"), m.hist_peak),
        kv(format!("{prefix}reference_peak"), m.reference_peak),
        kv(format!("{prefix}peak_offset"), m.peak_offset),
    ]
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(PathBuf::from(name));
        self.dir.join(name)
    }

    fn io<T>(path: &Path, r: std::io::Result<T>) -> Result<T, RunError> {
        r.map_err(|source| RunError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Inspiral oracle quantities over `[0, min(t_end, 1000 periods)]`.
fn inspiral_entries(config: &RunConfig, ledger: &EnergyLedger) -> Vec<(String, String)> {
    let horizon = config.t_end.min(1000.0 * config.characteristic_period());
    let samples = ledger.samples();
    let Some(first) = samples.first() else {
        return Vec::new();
    };
    let last = samples
        .iter()
        .take_while(|s| s.t <= horizon * (1.0 + 1e-12))
        .last()
        .unwrap_or(first);
    let loss = first.mech - last.mech;
    let radiated = last.radiated - first.radiated;
    let monotone = samples.windows(2).all(|w| w[1].mech <= w[0].mech);
    let mut e = vec![
        kv("inspiral.window", last.t - first.t),
        kv("inspiral.energy_loss", loss),
        kv("inspiral.larmor_energy", radiated),
        kv(
            "inspiral.larmor_rel_error",
            if radiated > 0.0 {
                (loss - radiated).abs() / radiated
            } else {
                f64::NAN
            },
        ),
        kv("inspiral.mech_monotone", monotone),
    ];
    if config.potential == PotentialKind::Coulomb && config.eccentricity == 0.0 && !config.field {
        // circular decay: r³ = r0³ − 6τt, E = −1/(2r)
        let tau = config.units().tau_e();
        let r3 = config.r0.powi(3) - 6.0 * tau * (last.t - first.t);
        if r3 > 0.0 {
            let analytic = -0.5 / config.r0 + 0.5 / r3.cbrt();
            e.push(kv("inspiral.analytic_energy_loss", analytic));
            e.push(kv(
                "inspiral.analytic_rel_error",
                (loss - analytic).abs() / analytic,
            ));
        }
    }
    e
}

/// Run `config` and write its output directory.
pub fn run_experiment(config: &RunConfig) -> Result<RunRecord, RunError> {
    let started = Instant::now();
    let dir = config.out_dir.as_path();
    Writer::io(dir, std::fs::create_dir_all(dir))?;
    let mut w = Writer {
        dir,
        files: Vec::new(),
    };
    let mut report = vec![kv("experiment", config.experiment)];
    let mut seeds = Vec::new();
    let mut counts = StatusCounts::default();

    match config.experiment {
        Experiment::FieldCheck => {
            let r = field_check(config)?;
            seeds = r.seeds.clone();
            report.extend([
                kv("n_resample", config.n_resample),
                kv("energy_density_measured", r.measured),
                kv("energy_density_standard_error", r.standard_error),
                kv("energy_density_analytic", r.analytic),
                kv("energy_density_rel_error", r.relative_error),
                kv("energy_density_t0", r.measured_t0),
                kv("energy_density_later", r.measured_later),
            ]);
            let names = ["x", "y", "z"];
            for i in 0..3 {
                for j in i..3 {
                    report.push(kv(
                        format!("cov_{}{}", names[i], names[j]),
                        r.covariance[i][j],
                    ));
                }
            }
        }
        Experiment::Nearfield => {
            let f = nearfield_report(config)?;
            let rows: Vec<Vec<String>> = f
                .terms()
                .iter()
                .map(|(name, v)| {
                    vec![
                        name.to_string(),
                        v.x.to_string(),
                        v.y.to_string(),
                        v.z.to_string(),
                    ]
                })
                .collect();
            let path = w.path("nearfield.csv");
            Writer::io(
                &path,
                output::write_table(&path, &["term", "x", "y", "z"], &rows),
            )?;
        }
        _ => {
            let ens = simulate_ensemble(config)?;
            counts = ens.status_counts;
            seeds = ens.outcomes.iter().map(|o| o.seed).collect();
            report.extend([
                kv("n_traj", config.n_traj),
                kv("completed", counts.completed),
                kv("ionized", counts.ionized),
                kv("diverged", counts.diverged),
                kv("bound_fraction", ens.bound_fraction()),
            ]);
            let n = ens.outcomes.len() as f64;
            let mean_end = ens.outcomes.iter().map(|o| o.end_time).sum::<f64>() / n;
            let min_end = ens
                .outcomes
                .iter()
                .map(|o| o.end_time)
                .fold(f64::INFINITY, f64::min);
            let max_closure = ens
                .outcomes
                .iter()
                .map(|o| o.closure_error)
                .fold(0.0, f64::max);
            report.extend([
                kv("mean_bound_time", mean_end),
                kv("min_bound_time", min_end),
                kv("max_closure_error", max_closure),
            ]);

            let mean = ens.mean_ledger();
            let path = w.path("ledger.csv");
            Writer::io(&path, output::write_ledger(&path, &mean))?;
            if let Ok(t) = ens.throughput() {
                report.extend([
                    kv("throughput.window_start", t.window.0),
                    kv("throughput.window_end", t.window.1),
                    kv("throughput.mean_p_in", t.mean_p_in),
                    kv("throughput.mean_p_rad", t.mean_p_rad),
                    kv("throughput.mech_drift", t.mech_drift),
                    kv("throughput.residual", t.residual),
                ]);
            }
            if config.experiment == Experiment::Inspiral {
                report.extend(inspiral_entries(config, &mean));
            }

            match config.potential {
                PotentialKind::Harmonic => {
                    let reference = gaussian_reference(config.omega);
                    report.push(kv("reference_variance", 0.5 / config.omega));
                    for axis in Axis::ALL {
                        let h = &ens.axes[axis.index()];
                        let refd = reference_bin_densities(h.edges(), reference);
                        let path = w.path(&format!("position_{}.csv", axis.name()));
                        Writer::io(&path, output::write_histogram(&path, h, &refd))?;
                        let (var, var_se) = ens.variance_with_error(axis);
                        let (kurt, kurt_se) = ens.kurtosis_with_error(axis);
                        let a = axis.name();
                        report.extend([
                            kv(format!("{a}.variance"), var),
                            kv(format!("{a}.variance_se"), var_se),
                            kv(format!("{a}.excess_kurtosis"), kurt),
                            kv(format!("{a}.excess_kurtosis_se"), kurt_se),
                        ]);
                        if let Ok(m) = ens.axis_metrics(axis, config.omega) {
                            report.extend(metrics_entries(&format!("{a}."), &m));
                        }
                    }
                }
                PotentialKind::Coulomb => {
                    let refd = reference_bin_densities(ens.radial.edges(), qm_ground_state_radial);
                    let path = w.path("radial_histogram.csv");
                    Writer::io(&path, output::write_histogram(&path, &ens.radial, &refd))?;
                    if let Ok(m) = ens.radial_metrics() {
                        report.extend(metrics_entries("radial.", &m));
                    }
                }
                PotentialKind::Free => {}
            }

            let rows: Vec<Vec<String>> = ens
                .outcomes
                .iter()
                .map(|o| {
                    vec![
                        o.index.to_string(),
                        o.seed.to_string(),
                        o.status.as_str().to_string(),
                        o.end_time.to_string(),
                        o.dt.to_string(),
                        o.closure_error.to_string(),
                    ]
                })
                .collect();
            let path = w.path("trajectories.csv");
            Writer::io(
                &path,
                output::write_table(
                    &path,
                    &["index", "seed", "status", "end_time", "dt", "closure_error"],
                    &rows,
                ),
            )?;
        }
    }

    let path = w.path("report.csv");
    Writer::io(&path, output::write_report(&path, &report))?;
    let echo: Vec<(String, String)> = config
        .entries()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let path = w.path("config.txt");
    Writer::io(&path, output::write_key_values(&path, &echo))?;
    w.files.push(PathBuf::from("run_record.txt"));

    let record = RunRecord {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION"),
        seeds,
        status_counts: counts,
        files: w.files,
        wall_clock: started.elapsed(),
        report,
    };
    let path = dir.join("run_record.txt");
    Writer::io(&path, output::write_key_values(&path, &record.entries()))?;
    Ok(record)
}
