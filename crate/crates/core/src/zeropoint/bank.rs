use super::{FieldSample, FieldSource, ModeEnsemble, Vec3};

/// Dipole field with all modes of one frequency merged:
/// `E(t) = Σ_i C_i cos ω_i t + D_i sin ω_i t`.
///
/// Stored structure-of-arrays so the inner loops vectorize.
#[derive(Clone, Debug, Default)]
pub struct DipoleBank {
    omega: Vec<f64>,
    cx: Vec<f64>,
    cy: Vec<f64>,
    cz: Vec<f64>,
    dx: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
}

const LANES: usize = 4;

impl DipoleBank {
    /// Merge consecutive modes that share a frequency.
    pub fn new(ensemble: &ModeEnsemble) -> Self {
        let mut bank = Self::default();
        for m in ensemble.modes() {
            let c = (m.eps1 * m.a1 + m.eps2 * m.a2) * m.amplitude_scale;
            let d = (m.eps1 * m.b1 + m.eps2 * m.b2) * m.amplitude_scale;
            if bank.omega.last() == Some(&m.omega) {
                let i = bank.omega.len() - 1;
                bank.cx[i] += c.x;
                bank.cy[i] += c.y;
                bank.cz[i] += c.z;
                bank.dx[i] += d.x;
                bank.dy[i] += d.y;
                bank.dz[i] += d.z;
            } else {
                bank.omega.push(m.omega);
                bank.cx.push(c.x);
                bank.cy.push(c.y);
                bank.cz.push(c.z);
                bank.dx.push(d.x);
                bank.dy.push(d.y);
                bank.dz.push(d.z);
            }
        }
        bank
    }

    /// Number of distinct frequencies.
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Sum the field given per-frequency phasors `cos ω_i t`, `sin ω_i t`.
    // lane-indexed accumulators keep the loop vectorizable
    #[allow(clippy::needless_range_loop)]
    fn accumulate(&self, cos: &[f64], sin: &[f64]) -> FieldSample {
        let n = self.omega.len();
        let mut acc = [[0.0f64; LANES]; 6];
        let chunks = n / LANES;
        for k in 0..chunks {
            for l in 0..LANES {
                let i = k * LANES + l;
                let (c, s, w) = (cos[i], sin[i], self.omega[i]);
                acc[0][l] += self.cx[i] * c + self.dx[i] * s;
                acc[1][l] += self.cy[i] * c + self.dy[i] * s;
                acc[2][l] += self.cz[i] * c + self.dz[i] * s;
                acc[3][l] += w * (self.dx[i] * c - self.cx[i] * s);
                acc[4][l] += w * (self.dy[i] * c - self.cy[i] * s);
                acc[5][l] += w * (self.dz[i] * c - self.cz[i] * s);
            }
        }
        for i in chunks * LANES..n {
            let (c, s, w) = (cos[i], sin[i], self.omega[i]);
            acc[0][0] += self.cx[i] * c + self.dx[i] * s;
            acc[1][0] += self.cy[i] * c + self.dy[i] * s;
            acc[2][0] += self.cz[i] * c + self.dz[i] * s;
            acc[3][0] += w * (self.dx[i] * c - self.cx[i] * s);
            acc[4][0] += w * (self.dy[i] * c - self.cy[i] * s);
            acc[5][0] += w * (self.dz[i] * c - self.cz[i] * s);
        }
        let sum = |a: &[f64; LANES]| (a[0] + a[1]) + (a[2] + a[3]);
        FieldSample {
            e: Vec3::new(sum(&acc[0]), sum(&acc[1]), sum(&acc[2])),
            e_dot: Vec3::new(sum(&acc[3]), sum(&acc[4]), sum(&acc[5])),
        }
    }

    fn phasors(&self, t: f64, cos: &mut [f64], sin: &mut [f64]) {
        for (i, w) in self.omega.iter().enumerate() {
            let (s, c) = (w * t).sin_cos();
            cos[i] = c;
            sin[i] = s;
        }
    }
}

impl FieldSource for DipoleBank {
    fn sample(&self, t: f64) -> FieldSample {
        let mut cos = vec![0.0; self.len()];
        let mut sin = vec![0.0; self.len()];
        self.phasors(t, &mut cos, &mut sin);
        self.accumulate(&cos, &sin)
    }

    fn omega_max(&self) -> Option<f64> {
        self.omega.iter().copied().reduce(f64::max)
    }
}

/// Walks a [`DipoleBank`] along a fixed-step time grid `t_n = t0 + n·dt`,
/// producing the field at `t_n`, `t_n + dt/2` and `t_n + dt` (the RK4 stage
/// times) by complex rotation instead of fresh trigonometry.
///
/// The phasors are recomputed exactly every `resync` steps, which bounds the
/// accumulated rotation error to a few ulps times `resync`.
#[derive(Clone, Debug)]
pub struct PhasorCursor<'a> {
    bank: &'a DipoleBank,
    t0: f64,
    dt: f64,
    step: u64,
    resync: u64,
    cos: Vec<f64>,
    sin: Vec<f64>,
    half_cos: Vec<f64>,
    half_sin: Vec<f64>,
    mid_cos: Vec<f64>,
    mid_sin: Vec<f64>,
    current: FieldSample,
}

impl<'a> PhasorCursor<'a> {
    pub const DEFAULT_RESYNC: u64 = 512;

    pub fn new(bank: &'a DipoleBank, t0: f64, dt: f64) -> Self {
        let n = bank.len();
        let mut half_cos = vec![0.0; n];
        let mut half_sin = vec![0.0; n];
        bank.phasors(0.5 * dt, &mut half_cos, &mut half_sin);
        let mut cursor = Self {
            bank,
            t0,
            dt,
            step: 0,
            resync: Self::DEFAULT_RESYNC,
            cos: vec![0.0; n],
            sin: vec![0.0; n],
            half_cos,
            half_sin,
            mid_cos: vec![0.0; n],
            mid_sin: vec![0.0; n],
            current: FieldSample::default(),
        };
        cursor.resync_now();
        cursor
    }

    fn resync_now(&mut self) {
        let t = self.time();
        self.bank.phasors(t, &mut self.cos, &mut self.sin);
        self.current = self.bank.accumulate(&self.cos, &self.sin);
    }

    /// Time of the current grid point.
    pub fn time(&self) -> f64 {
        self.t0 + self.step as f64 * self.dt
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    /// Field at the current grid point.
    pub fn current(&self) -> FieldSample {
        self.current
    }

    /// Move to the next grid point, returning the fields at the half step
    /// and at the new grid point.
    pub fn advance(&mut self) -> (FieldSample, FieldSample) {
        let n = self.bank.len();
        for i in 0..n {
            let (hc, hs) = (self.half_cos[i], self.half_sin[i]);
            let (c, s) = (self.cos[i], self.sin[i]);
            let c1 = c * hc - s * hs;
            let s1 = s * hc + c * hs;
            self.mid_cos[i] = c1;
            self.mid_sin[i] = s1;
            self.cos[i] = c1 * hc - s1 * hs;
            self.sin[i] = s1 * hc + c1 * hs;
        }
        let mid = self.bank.accumulate(&self.mid_cos, &self.mid_sin);
        self.step += 1;
        if self.step.is_multiple_of(self.resync) {
            self.resync_now();
        } else {
            self.current = self.bank.accumulate(&self.cos, &self.sin);
        }
        (mid, self.current)
    }
}
