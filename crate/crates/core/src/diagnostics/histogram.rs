use super::DiagnosticsError;
use crate::dynamics::{Status, Trajectory};

/// Weighted 1-D histogram on fixed edges.
///
/// Weight falling outside the edges is kept in `outside` and does not count
/// towards [`Histogram::normalization`].
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<f64>,
    outside: f64,
}

impl Histogram {
    pub fn new(edges: Vec<f64>) -> Result<Self, DiagnosticsError> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(DiagnosticsError::BadEdges);
        }
        let n = edges.len() - 1;
        Ok(Self {
            edges,
            counts: vec![0.0; n],
            outside: 0.0,
        })
    }

    /// `n` equal bins on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self, DiagnosticsError> {
        let w = (hi - lo) / n as f64;
        Self::new((0..=n).map(|i| lo + i as f64 * w).collect())
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }
    pub fn counts(&self) -> &[f64] {
        &self.counts
    }
    pub fn outside(&self) -> f64 {
        self.outside
    }
    pub fn len(&self) -> usize {
        self.counts.len()
    }
    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total in-range weight.
    pub fn normalization(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        let last = *self.edges.last()?;
        if !(x >= self.edges[0] && x <= last) {
            return None;
        }
        // first edge strictly greater than x
        let idx = self.edges.partition_point(|&e| e <= x);
        Some(idx.saturating_sub(1).min(self.counts.len() - 1))
    }

    pub fn add(&mut self, x: f64, weight: f64) {
        match self.bin_of(x) {
            Some(i) => self.counts[i] += weight,
            None => self.outside += weight,
        }
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<(), DiagnosticsError> {
        if self.edges != other.edges {
            return Err(DiagnosticsError::EdgeMismatch);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.outside += other.outside;
        Ok(())
    }

    /// Counts rescaled so they sum to one.
    pub fn normalized(&self) -> Result<Histogram, DiagnosticsError> {
        let total = self.normalization();
        if !(total > 0.0) {
            return Err(DiagnosticsError::EmptyHistogram);
        }
        Ok(Histogram {
            edges: self.edges.clone(),
            counts: self.counts.iter().map(|c| c / total).collect(),
            outside: self.outside / total,
        })
    }

    /// Probability density per bin (counts / (normalization · width)).
    pub fn densities(&self) -> Vec<f64> {
        let total = self.normalization();
        self.counts
            .iter()
            .zip(self.edges.windows(2))
            .map(|(c, w)| {
                if total > 0.0 {
                    c / (total * (w[1] - w[0]))
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Cartesian component selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(&self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        ["x", "y", "z"][self.index()]
    }
}

/// Visit `(sample, time weight)` for every post-burn-in sample of the bound
/// part of a trajectory. A sample's weight is the time since the previous
/// sample; the terminal sample of an ionized or diverged run is skipped.
/// Returns whether any sample was visited.
pub fn for_each_weighted<F: FnMut(&crate::dynamics::TrajectorySample, f64)>(
    traj: &Trajectory,
    burn_in: f64,
    mut f: F,
) -> bool {
    let t0 = traj.samples.first().map_or(0.0, |s| s.state.t);
    let usable = match traj.status {
        Status::Completed => traj.samples.len(),
        _ => traj.samples.len().saturating_sub(1),
    };
    let mut any = false;
    for i in 1..usable {
        let s = &traj.samples[i];
        if s.state.t - t0 < burn_in {
            continue;
        }
        f(s, s.state.t - traj.samples[i - 1].state.t);
        any = true;
    }
    any
}

/// Time-weighted occupancy of `|r|` over all trajectories after `burn_in`.
pub fn radial_histogram(
    trajectories: &[Trajectory],
    edges: &[f64],
    burn_in: f64,
) -> Result<Histogram, DiagnosticsError> {
    let mut hist = Histogram::new(edges.to_vec())?;
    let mut any = false;
    for traj in trajectories {
        any |= for_each_weighted(traj, burn_in, |s, w| hist.add(s.state.r.norm(), w));
    }
    if !any {
        return Err(DiagnosticsError::NoSamplesAfterBurnIn);
    }
    Ok(hist)
}

/// Time-weighted occupancy of one Cartesian position component.
pub fn position_histogram_1d(
    trajectories: &[Trajectory],
    axis: Axis,
    edges: &[f64],
    burn_in: f64,
) -> Result<Histogram, DiagnosticsError> {
    let mut hist = Histogram::new(edges.to_vec())?;
    let mut any = false;
    for traj in trajectories {
        any |= for_each_weighted(traj, burn_in, |s, w| hist.add(s.state.r[axis.index()], w));
    }
    if !any {
        return Err(DiagnosticsError::NoSamplesAfterBurnIn);
    }
    Ok(hist)
}
