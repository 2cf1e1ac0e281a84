use std::f64::consts::PI;

use super::{DiagnosticsError, Histogram};

/// Reference bins integrating below this are dropped from the KL sum and
/// their histogram mass reported as `excluded_mass`.
pub const ZERO_REFERENCE_THRESHOLD: f64 = 1e-15;

/// Hydrogen 1s radial probability density `4r²e^{−2r}` (atomic units).
pub fn qm_ground_state_radial(r: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    4.0 * r * r * (-2.0 * r).exp()
}

/// Harmonic-oscillator ground-state density of one Cartesian component:
/// zero-mean Gaussian with variance ħ/(2mω) = 1/(2ω).
pub fn gaussian_reference(omega: f64) -> impl Fn(f64) -> f64 + Copy {
    let var = 0.5 / omega;
    let norm = 1.0 / (2.0 * PI * var).sqrt();
    move |x| norm * (-0.5 * x * x / var).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistributionMetrics {
    /// L2 norm of the difference between the histogram density and the
    /// bin-averaged reference density.
    pub l2: f64,
    /// KL(hist ‖ reference) over bins, reference renormalized on the
    /// histogram range. +∞ when the reference is exactly zero on an
    /// occupied bin.
    pub kl: f64,
    /// Histogram mass in bins whose reference weight fell below
    /// [`ZERO_REFERENCE_THRESHOLD`].
    pub excluded_mass: f64,
    /// Center of the highest-density bin.
    pub hist_peak: f64,
    /// Location of the reference maximum on the histogram range.
    pub reference_peak: f64,
    pub peak_offset: f64,
}

/// Simpson's rule with `n` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Bin-averaged density of `reference` on `edges`, for side-by-side output
/// with a histogram.
pub fn reference_bin_densities<F: Fn(f64) -> f64>(edges: &[f64], reference: F) -> Vec<f64> {
    edges
        .windows(2)
        .map(|w| simpson(&reference, w[0], w[1], 32) / (w[1] - w[0]))
        .collect()
}

fn argmax_on<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let n = 4000;
    let h = (hi - lo) / n as f64;
    let best = (0..=n)
        .map(|i| lo + i as f64 * h)
        .fold((lo, f64::NEG_INFINITY), |acc, x| {
            let y = f(x);
            if y > acc.1 {
                (x, y)
            } else {
                acc
            }
        })
        .0;
    // golden-section refinement inside the bracketing grid cells
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Compare a histogram against a reference probability density.
pub fn compare_distributions<F: Fn(f64) -> f64>(
    hist: &Histogram,
    reference: F,
) -> Result<DistributionMetrics, DiagnosticsError> {
    let p = hist.normalized()?;
    let edges = p.edges();
    let q_raw: Vec<f64> = edges
        .windows(2)
        .map(|w| simpson(&reference, w[0], w[1], 32))
        .collect();

    let mut l2 = 0.0;
    for ((pi, qi), w) in p.counts().iter().zip(&q_raw).zip(edges.windows(2)) {
        let width = w[1] - w[0];
        let d = (pi - qi) / width;
        l2 += d * d * width;
    }

    let mut excluded_mass = 0.0;
    let mut undefined = false;
    let mut q_total = 0.0;
    for (pi, qi) in p.counts().iter().zip(&q_raw) {
        if *qi < ZERO_REFERENCE_THRESHOLD {
            if *qi == 0.0 && *pi > 0.0 {
                undefined = true;
            }
            excluded_mass += pi;
        } else {
            q_total += qi;
        }
    }
    let kl = if undefined || q_total == 0.0 {
        f64::INFINITY
    } else {
        p.counts()
            .iter()
            .zip(&q_raw)
            .filter(|(pi, qi)| **pi > 0.0 && **qi >= ZERO_REFERENCE_THRESHOLD)
            .map(|(pi, qi)| pi * (pi / (qi / q_total)).ln())
            .sum()
    };

    let densities = p.densities();
    let centers = p.centers();
    let peak_bin =
        densities.iter().enumerate().fold(
            0,
            |best, (i, d)| if *d > densities[best] { i } else { best },
        );
    let hist_peak = centers[peak_bin];
    let reference_peak = argmax_on(&reference, edges[0], edges[edges.len() - 1]);

    Ok(DistributionMetrics {
        l2: l2.sqrt(),
        kl,
        excluded_mass,
        hist_peak,
        reference_peak,
        peak_offset: hist_peak - reference_peak,
    })
}

/// Weighted raw moments of a sample, mergeable across workers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub weight: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
}

impl Moments {
    pub fn add(&mut self, x: f64, w: f64) {
        let x2 = x * x;
        self.weight += w;
        self.s1 += w * x;
        self.s2 += w * x2;
        self.s3 += w * x2 * x;
        self.s4 += w * x2 * x2;
    }

    pub fn merge(&mut self, o: &Moments) {
        self.weight += o.weight;
        self.s1 += o.s1;
        self.s2 += o.s2;
        self.s3 += o.s3;
        self.s4 += o.s4;
    }

    pub fn mean(&self) -> f64 {
        self.s1 / self.weight
    }

    /// Central moments (m2, m3, m4).
    fn central(&self) -> (f64, f64, f64) {
        let m = self.mean();
        let (e2, e3, e4) = (
            self.s2 / self.weight,
            self.s3 / self.weight,
            self.s4 / self.weight,
        );
        let c2 = e2 - m * m;
        let c3 = e3 - 3.0 * m * e2 + 2.0 * m.powi(3);
        let c4 = e4 - 4.0 * m * e3 + 6.0 * m * m * e2 - 3.0 * m.powi(4);
        (c2, c3, c4)
    }

    pub fn variance(&self) -> f64 {
        self.central().0
    }

    pub fn skewness(&self) -> f64 {
        let (c2, c3, _) = self.central();
        c3 / c2.powf(1.5)
    }

    pub fn excess_kurtosis(&self) -> f64 {
        let (c2, _, c4) = self.central();
        c4 / (c2 * c2) - 3.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Gamma, Normal};

    #[test]
    fn radial_reference_shape() {
        assert_eq!(qm_ground_state_radial(0.0), 0.0);
        // maximum at r = 1: derivative 8r e^{−2r}(1 − r) vanishes there
        let f = qm_ground_state_radial;
        assert!(f(1.0) > f(0.999) && f(1.0) > f(1.001));
        let peak = argmax_on(&f, 0.0, 10.0);
        assert!((peak - 1.0).abs() < 1e-7);
        // ∫₀^∞ = 1; tail beyond 60 is below e^{−100}
        let total = simpson(&f, 0.0, 60.0, 20_000);
        assert!((total - 1.0).abs() < 1e-10, "{total}");
    }

    #[test]
    fn gaussian_reference_variance() {
        let g = gaussian_reference(1.0);
        let var = simpson(&|x| x * x * g(x), -12.0, 12.0, 20_000);
        assert!((var - 0.5).abs() < 1e-12);
        let norm = simpson(&g, -12.0, 12.0, 20_000);
        assert!((norm - 1.0).abs() < 1e-12);
        let g2 = gaussian_reference(2.0);
        let var2 = simpson(&|x| x * x * g2(x), -12.0, 12.0, 20_000);
        assert!((var2 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn reference_against_itself() {
        let mut h = Histogram::uniform(0.0, 12.0, 120).unwrap();
        let edges = h.edges().to_vec();
        for w in edges.windows(2) {
            h.add(
                0.5 * (w[0] + w[1]),
                simpson(&qm_ground_state_radial, w[0], w[1], 32),
            );
        }
        let m = compare_distributions(&h, qm_ground_state_radial).unwrap();
        // l2 is measured against the un-renormalized reference, whose mass on
        // [0, 12] is 1 − O(e^{−24})
        assert!(m.l2 < 1e-8, "{:?}", m);
        assert!(m.kl.abs() < 1e-14, "{:?}", m);
        assert!(m.peak_offset.abs() < 0.05 + 1e-12);
    }

    #[test]
    fn sampled_reference_has_small_kl() {
        // 4r²e^{−2r} is Gamma(shape 3, scale 1/2)
        let gamma = Gamma::new(3.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut h = Histogram::uniform(0.0, 10.0, 100).unwrap();
        for _ in 0..1_000_000 {
            h.add(gamma.sample(&mut rng), 1.0);
        }
        let m = compare_distributions(&h, qm_ground_state_radial).unwrap();
        assert!(m.kl < 5e-3, "{:?}", m);
        assert!(m.kl >= 0.0);
        assert!(m.peak_offset.abs() < 0.15);
    }

    #[test]
    fn delta_at_bohr_radius() {
        let edges: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1 - 0.05).collect();
        let mut h = Histogram::new(edges).unwrap();
        h.add(1.0, 1.0);
        let m = compare_distributions(&h, qm_ground_state_radial).unwrap();
        assert!(m.peak_offset.abs() < 1e-6);
        assert!(m.kl > 2.0);
    }

    #[test]
    fn zero_reference_on_occupied_bin_is_infinite() {
        let mut h = Histogram::uniform(-1.0, 1.0, 2).unwrap();
        h.add(-0.5, 1.0);
        h.add(0.5, 1.0);
        let m = compare_distributions(&h, qm_ground_state_radial).unwrap();
        assert_eq!(m.kl, f64::INFINITY);
        assert_eq!(m.excluded_mass, 0.5);
    }

    #[test]
    fn tiny_reference_bins_are_excluded() {
        let mut h = Histogram::uniform(0.0, 40.0, 4).unwrap();
        h.add(5.0, 3.0);
        h.add(35.0, 1.0);
        let m = compare_distributions(&h, qm_ground_state_radial).unwrap();
        assert!(m.kl.is_finite());
        assert_eq!(m.excluded_mass, 0.25);
    }

    #[test]
    fn moments_of_gaussian_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = Normal::new(0.0, 0.5f64.sqrt()).unwrap();
        let mut m = Moments::default();
        for _ in 0..200_000 {
            m.add(n.sample(&mut rng), 1.0);
        }
        assert!((m.variance() - 0.5).abs() < 0.01);
        assert!(m.skewness().abs() < 0.02);
        assert!(m.excess_kurtosis().abs() < 0.05);
    }
}
