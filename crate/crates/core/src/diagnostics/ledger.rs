use super::DiagnosticsError;

/// Cumulative energy integrals at one instant (Hartree).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LedgerSample {
    pub t: f64,
    /// Work done on the charge by the stochastic field.
    pub work_in: f64,
    /// Larmor-radiated energy.
    pub radiated: f64,
    /// Work done by the radiation-reaction force. Differs from −radiated by
    /// the bounded Schott term.
    pub reaction_work: f64,
    /// Kinetic plus potential energy.
    pub mech: f64,
}

/// Time series of energy integrals along one trajectory.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyLedger {
    samples: Vec<LedgerSample>,
}

impl EnergyLedger {
    pub fn from_samples(samples: Vec<LedgerSample>) -> Self {
        Self { samples }
    }

    pub fn push(&mut self, sample: LedgerSample) {
        debug_assert!(self.samples.last().is_none_or(|s| sample.t > s.t));
        self.samples.push(sample);
    }

    pub fn samples(&self) -> &[LedgerSample] {
        &self.samples
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.t, self.samples.last()?.t))
    }

    pub fn mech_samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().map(|s| (s.t, s.mech))
    }

    /// Largest violation of `mech(t) − mech(0) = work_in(t) + reaction_work(t)`.
    pub fn closure_error(&self) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        self.samples
            .iter()
            .map(|s| (s.mech - first.mech - s.work_in - s.reaction_work).abs())
            .fold(0.0, f64::max)
    }
}

/// Running elementwise sum of ledgers recorded on a common time grid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LedgerSum {
    count: usize,
    sum: Vec<LedgerSample>,
}

impl LedgerSum {
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn add(&mut self, ledger: &EnergyLedger) -> Result<(), DiagnosticsError> {
        self.merge(&LedgerSum {
            count: 1,
            sum: ledger.samples.clone(),
        })
    }

    pub fn merge(&mut self, other: &LedgerSum) -> Result<(), DiagnosticsError> {
        if other.count == 0 {
            return Ok(());
        }
        if self.count == 0 {
            *self = other.clone();
            return Ok(());
        }
        if self.sum.len() != other.sum.len()
            || self.sum.iter().zip(&other.sum).any(|(a, b)| a.t != b.t)
        {
            return Err(DiagnosticsError::GridMismatch);
        }
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            a.work_in += b.work_in;
            a.radiated += b.radiated;
            a.reaction_work += b.reaction_work;
            a.mech += b.mech;
        }
        self.count += other.count;
        Ok(())
    }

    /// Ensemble-mean ledger.
    pub fn mean(&self) -> EnergyLedger {
        let n = self.count.max(1) as f64;
        EnergyLedger::from_samples(
            self.sum
                .iter()
                .map(|s| LedgerSample {
                    t: s.t,
                    work_in: s.work_in / n,
                    radiated: s.radiated / n,
                    reaction_work: s.reaction_work / n,
                    mech: s.mech / n,
                })
                .collect(),
        )
    }
}

/// Mean energy flow through the charge on a time window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThroughputReport {
    pub mean_p_in: f64,
    pub mean_p_rad: f64,
    /// Least-squares slope of the mechanical energy.
    pub mech_drift: f64,
    /// `|mean_p_in − mean_p_rad − mech_drift| / mean_p_rad`; 0 when both
    /// numerator and denominator vanish, +∞ when only the denominator does.
    pub residual: f64,
    /// Ledger sample times actually bracketing the averages.
    pub window: (f64, f64),
}

/// Average the ledger over the samples falling inside `[t_start, t_end]`.
pub fn throughput_report(
    ledger: &EnergyLedger,
    window: (f64, f64),
) -> Result<ThroughputReport, DiagnosticsError> {
    let (t_start, t_end) = window;
    let inside: Vec<&LedgerSample> = ledger
        .samples()
        .iter()
        .filter(|s| s.t >= t_start && s.t <= t_end)
        .collect();
    if inside.len() < 2 {
        return Err(DiagnosticsError::EmptyWindow(t_start, t_end));
    }
    let (first, last) = (inside[0], inside[inside.len() - 1]);
    let span = last.t - first.t;
    let mean_p_in = (last.work_in - first.work_in) / span;
    let mean_p_rad = (last.radiated - first.radiated) / span;

    let n = inside.len() as f64;
    let t_mean = inside.iter().map(|s| s.t).sum::<f64>() / n;
    let e_mean = inside.iter().map(|s| s.mech).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for s in &inside {
        let dt = s.t - t_mean;
        sxy += dt * (s.mech - e_mean);
        sxx += dt * dt;
    }
    let mech_drift = sxy / sxx;

    let imbalance = (mean_p_in - mean_p_rad - mech_drift).abs();
    let residual = if mean_p_rad > 0.0 {
        imbalance / mean_p_rad
    } else if imbalance == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(ThroughputReport {
        mean_p_in,
        mean_p_rad,
        mech_drift,
        residual,
        window: (first.t, last.t),
    })
}
