//! Weighted value statistics of Wigner functions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Wigner values with their phase-space weights (summing to one).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSamples {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSamples {
    /// Pairs values with non-negative weights and rescales the weights to
    /// sum to one.
    pub fn new(values: Vec<f64>, mut weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("no samples".into()));
        }
        if values.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument("weights sum to zero".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self { values, weights })
    }

    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(values, vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum()
    }
}

/// Relative size, in units of the largest magnitude, below which a value is
/// treated as a rounded zero rather than a negative value.
pub const NEGATIVE_ROUNDING_TOLERANCE: f64 = 1e-12;

/// Weighted mean, variance, excess (kurtosis minus 3) and negative fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsSummary {
    pub mean: f64,
    pub variance: f64,
    pub excess: f64,
    pub negative_fraction: f64,
    pub sample_count: usize,
}

pub fn moments_and_excess(samples: &WeightedSamples) -> Result<StatsSummary> {
    if samples.len() < 2 {
        return Err(Error::EmptyInput("need at least two samples".into()));
    }
    let mean = samples.mean();
    let scale = samples
        .values
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    // Values within rounding distance of zero carry no sign information.
    let cutoff = -NEGATIVE_ROUNDING_TOLERANCE * scale;
    let (mut m2, mut m4, mut negative) = (0.0, 0.0, 0.0);
    for (v, w) in samples.values.iter().zip(&samples.weights) {
        let d2 = (v - mean).powi(2);
        m2 += w * d2;
        m4 += w * d2 * d2;
        if *v < cutoff {
            negative += w;
        }
    }
    if m2 <= 1e-24 * scale * scale {
        return Err(Error::DegenerateDistribution(
            "zero variance, excess undefined".into(),
        ));
    }
    Ok(StatsSummary {
        mean,
        variance: m2,
        excess: m4 / (m2 * m2) - 3.0,
        negative_fraction: negative.clamp(0.0, 1.0),
        sample_count: samples.len(),
    })
}

/// Density-normalized histogram with uniform bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub densities: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.densities.len()
    }

    pub fn width(&self, bin: usize) -> f64 {
        self.edges[bin + 1] - self.edges[bin]
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1]))
    }

    /// `sum density * width`; one unless all mass fell outside the range.
    pub fn total_mass(&self) -> f64 {
        (0..self.bins())
            .map(|b| self.densities[b] * self.width(b))
            .sum()
    }

    fn from_weights(edges: Vec<f64>, mut mass: Vec<f64>) -> Self {
        let total: f64 = mass.iter().sum();
        for (b, m) in mass.iter_mut().enumerate() {
            let width = edges[b + 1] - edges[b];
            *m = if total > 0.0 {
                *m / (total * width)
            } else {
                0.0
            };
        }
        Self {
            edges,
            densities: mass,
        }
    }
}

/// Uniform edges over `[lo, hi]`.
pub fn uniform_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins)
        .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
        .collect()
}

fn bin_of(edges: &[f64], x: f64) -> Option<usize> {
    let bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[bins]);
    if !(x >= lo && x <= hi) {
        return None;
    }
    let b = ((x - lo) / (hi - lo) * bins as f64).floor() as usize;
    Some(b.min(bins - 1))
}

/// Weighted histogram of the values. The default range is `mean +/- 6`, i.e.
/// six standard deviations under the unit-variance normalization. Samples
/// outside the range are dropped before density normalization.
pub fn value_histogram(
    samples: &WeightedSamples,
    bins: usize,
    range: Option<(f64, f64)>,
) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("no samples to bin".into()));
    }
    if bins < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 bins, got {bins}"
        )));
    }
    let mean = samples.mean();
    let (lo, hi) = range.unwrap_or((mean - 6.0, mean + 6.0));
    if lo.is_nan() || hi.is_nan() || hi <= lo {
        return Err(Error::InvalidArgument(format!(
            "empty histogram range [{lo}, {hi}]"
        )));
    }
    let edges = uniform_edges(lo, hi, bins);
    let mut mass = vec![0.0; bins];
    for (v, w) in samples.values.iter().zip(&samples.weights) {
        if let Some(b) = bin_of(&edges, *v) {
            mass[b] += w;
        }
    }
    Ok(Histogram::from_weights(edges, mass))
}

/// Unweighted histogram of raw values over `[lo, hi]`.
pub fn histogram_of(values: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::EmptyInput("no samples to bin".into()));
    }
    if bins < 1 || lo.is_nan() || hi.is_nan() || hi <= lo {
        return Err(Error::InvalidArgument("invalid histogram layout".into()));
    }
    let edges = uniform_edges(lo, hi, bins);
    let mut mass = vec![0.0; bins];
    for v in values {
        if let Some(b) = bin_of(&edges, *v) {
            mass[b] += 1.0;
        }
    }
    Ok(Histogram::from_weights(edges, mass))
}

/// Two-dimensional density histogram; `densities[i * ybins + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram2d {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    pub densities: Vec<f64>,
}

pub fn histogram_2d(
    points: &[(f64, f64)],
    x_range: (f64, f64),
    y_range: (f64, f64),
    bins: (usize, usize),
) -> Result<Histogram2d> {
    if points.is_empty() {
        return Err(Error::EmptyInput("no points to bin".into()));
    }
    if !(x_range.1 > x_range.0 && y_range.1 > y_range.0) || bins.0 == 0 || bins.1 == 0 {
        return Err(Error::InvalidArgument(
            "invalid 2-d histogram layout".into(),
        ));
    }
    let x_edges = uniform_edges(x_range.0, x_range.1, bins.0);
    let y_edges = uniform_edges(y_range.0, y_range.1, bins.1);
    let mut counts = vec![0.0; bins.0 * bins.1];
    let mut total = 0.0;
    for &(x, y) in points {
        if let (Some(i), Some(j)) = (bin_of(&x_edges, x), bin_of(&y_edges, y)) {
            counts[i * bins.1 + j] += 1.0;
            total += 1.0;
        }
    }
    let area = (x_edges[1] - x_edges[0]) * (y_edges[1] - y_edges[0]);
    if total > 0.0 {
        counts.iter_mut().for_each(|c| *c /= total * area);
    }
    Ok(Histogram2d {
        x_edges,
        y_edges,
        densities: counts,
    })
}

/// Unit-variance Gaussian density centered at `mean`.
pub fn gaussian_reference(mean: f64) -> impl Fn(f64) -> f64 {
    let norm = 1.0 / (2.0 * PI).sqrt();
    move |w| norm * (-0.5 * (w - mean).powi(2)).exp()
}

/// Largest absolute deviation between histogram densities and `curve`
/// evaluated at the bin centers.
pub fn max_density_deviation(hist: &Histogram, curve: impl Fn(f64) -> f64) -> f64 {
    hist.centers()
        .zip(&hist.densities)
        .map(|(c, d)| (d - curve(c)).abs())
        .fold(0.0, f64::max)
}

/// Lyapunov exponent of the classical sawtooth map,
/// `ln((2 + K0 + sqrt((2 + K0)^2 - 4)) / 2)`.
pub fn lyapunov_sawtooth(k0: f64) -> Result<f64> {
    if !k0.is_finite() || k0 < 0.0 {
        return Err(Error::OutOfDomain(format!(
            "kick strength must be >= 0, got {k0}"
        )));
    }
    let a = 2.0 + k0;
    Ok(((a + (a * a - 4.0).sqrt()) / 2.0).ln())
}

/// Two-sample Kolmogorov-Smirnov distance between empirical distributions.
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("KS distance of an empty sample".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0_f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Empirical cumulative distribution: sorted values with `F = (i+1)/n`.
pub fn empirical_cdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, (i + 1) as f64 / n))
        .collect()
}

/// Median of a non-empty slice.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::RngStream;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn rounded_zeros_are_not_negative() {
        let values = vec![10.0, -1e-15, -1e-14, 0.0, -1.0];
        let s = moments_and_excess(&WeightedSamples::uniform(values).unwrap()).unwrap();
        assert_abs_diff_eq!(s.negative_fraction, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_excess_is_zero() {
        let mut rng = RngStream::new(1, 0);
        let values: Vec<f64> = (0..1_000_000).map(|_| rng.standard_normal()).collect();
        let s = moments_and_excess(&WeightedSamples::uniform(values).unwrap()).unwrap();
        assert!(s.excess.abs() < 0.02, "excess {}", s.excess);
        assert!((s.negative_fraction - 0.5).abs() < 0.005);
    }

    #[test]
    fn uniform_excess_is_minus_six_fifths() {
        // Analytic: <x^4> / <x^2>^2 = (1/5) / (1/9) = 9/5 on [-1, 1].
        let mut rng = RngStream::new(2, 0);
        let values: Vec<f64> = (0..1_000_000)
            .map(|_| rng.rng().random_range(-1.0..1.0))
            .collect();
        let s = moments_and_excess(&WeightedSamples::uniform(values).unwrap()).unwrap();
        assert_abs_diff_eq!(s.excess, -1.2, epsilon = 0.02);
    }

    #[test]
    fn constant_samples_are_degenerate() {
        let s = WeightedSamples::uniform(vec![0.3; 10]).unwrap();
        assert!(matches!(
            moments_and_excess(&s),
            Err(Error::DegenerateDistribution(_))
        ));
    }

    #[test]
    fn weights_are_respected() {
        let s = WeightedSamples::new(vec![-1.0, 1.0, 3.0], vec![1.0, 2.0, 1.0]).unwrap();
        let summary = moments_and_excess(&s).unwrap();
        assert_abs_diff_eq!(summary.mean, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(summary.variance, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(summary.negative_fraction, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn repeated_value_fills_one_bin() {
        let s = WeightedSamples::uniform(vec![0.25; 7]).unwrap();
        let h = value_histogram(&s, 12, None).unwrap();
        assert_abs_diff_eq!(h.total_mass(), 1.0, epsilon = 1e-12);
        let full: Vec<usize> = (0..h.bins()).filter(|&b| h.densities[b] > 0.0).collect();
        assert_eq!(full.len(), 1);
        assert_abs_diff_eq!(
            h.densities[full[0]],
            1.0 / h.width(full[0]),
            epsilon = 1e-12
        );
        assert!(value_histogram(&s, 1, None).is_err());
    }

    #[test]
    fn gaussian_reference_values() {
        let g = gaussian_reference(0.0);
        assert_abs_diff_eq!(g(0.0), 0.398_942_280_401_432_7, epsilon = 1e-15);
        assert_abs_diff_eq!(
            gaussian_reference(0.1)(0.1),
            0.398_942_280_401_432_7,
            epsilon = 1e-15
        );
        // Composite Simpson over [-8, 8].
        let n = 4000;
        let h = 16.0 / n as f64;
        let integral: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * g(-8.0 + i as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0;
        assert_abs_diff_eq!(integral, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn lyapunov_values() {
        assert_abs_diff_eq!(lyapunov_sawtooth(0.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            lyapunov_sawtooth(0.5).unwrap(),
            2.0_f64.ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            lyapunov_sawtooth(2.0).unwrap(),
            (2.0 + 3.0_f64.sqrt()).ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            lyapunov_sawtooth(2.0).unwrap(),
            1.316_957_896_924_816_6,
            epsilon = 1e-12
        );
        assert!(matches!(
            lyapunov_sawtooth(-0.1),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn ks_distance_basics() {
        assert_abs_diff_eq!(ks_distance(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(ks_distance(&[0.0, 1.0], &[2.0, 3.0]).unwrap(), 1.0);
        assert_abs_diff_eq!(ks_distance(&[0.0, 2.0], &[1.0, 3.0]).unwrap(), 0.5);
    }
}
