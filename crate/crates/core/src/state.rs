//! Pure states and the seeded random-number streams used by every stochastic
//! experiment.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Tolerance on the unit norm of a constructed state.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// A normalized pure state in a finite Hilbert space.
///
/// Torus states are stored in the position basis with storage index `i`
/// representing the symmetric index `i` for `i <= (N-1)/2` and `i - N`
/// otherwise (see [`crate::torus::symmetric_index`]). Sphere states are
/// stored in the `|J, m>` basis with index `i = m + J`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Normalizes `amplitudes` to unit norm.
    pub fn new(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension(format!(
                "state dimension must be at least 2, got {}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidArgument(
                "state vector has zero or non-finite norm".into(),
            ));
        }
        amplitudes.iter_mut().for_each(|c| *c /= norm);
        Ok(Self { amplitudes })
    }

    /// Basis vector `|index>` of a `dim`-dimensional space.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::OutOfRange(format!(
                "basis index {index} not below dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        if dim >= 1 {
            amplitudes[index] = Complex64::new(1.0, 0.0);
        }
        Self::new(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidDimension(format!(
                "inner product of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Wraps amplitudes produced by a unitary map, which are already unit
    /// norm up to rounding.
    pub(crate) fn from_unitary_image(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }
}

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Streams with distinct ids are statistically independent, so parallel
/// tasks can each own one without sharing generator state.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// An independent stream derived from this one's seed.
    pub fn substream(&self, stream_id: u64) -> Self {
        Self::new(self.seed, stream_id)
    }

    pub fn standard_normal(&mut self) -> f64 {
        rand_distr::StandardNormal.sample(&mut self.rng)
    }

    pub fn normal(&mut self, std_dev: f64) -> f64 {
        Normal::new(0.0, std_dev)
            .expect("finite non-negative standard deviation")
            .sample(&mut self.rng)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Random state with independent complex Gaussian amplitudes of variance
/// `<|c_l|^2> = 1/dim`, normalized after sampling.
pub fn random_state(dim: usize, rng: &mut RngStream) -> Result<QuantumState> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "random state dimension must be at least 2, got {dim}"
        )));
    }
    let sd = (0.5 / dim as f64).sqrt();
    let amplitudes = (0..dim)
        .map(|_| Complex64::new(rng.normal(sd), rng.normal(sd)))
        .collect();
    QuantumState::new(amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_dimension_one() {
        let mut rng = RngStream::new(1, 0);
        assert!(matches!(
            random_state(1, &mut rng),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn random_state_is_normalized() {
        let mut rng = RngStream::new(42, 3);
        let psi = random_state(101, &mut rng).unwrap();
        assert!((psi.norm() - 1.0).abs() < NORM_TOLERANCE);
    }

    #[test]
    fn equal_streams_are_bit_identical() {
        let a = random_state(64, &mut RngStream::new(9, 2)).unwrap();
        let b = random_state(64, &mut RngStream::new(9, 2)).unwrap();
        let c = random_state(64, &mut RngStream::new(9, 3)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ensemble_mean_of_first_weight() {
        let dim = 101;
        let n = 10_000;
        let mut rng = RngStream::new(2024, 0);
        let samples: Vec<f64> = (0..n)
            .map(|_| random_state(dim, &mut rng).unwrap().amplitudes()[0].norm_sqr())
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!(
            (mean - 1.0 / dim as f64).abs() < 3.0 * se,
            "mean {mean} se {se}"
        );
    }

    #[test]
    fn ensemble_amplitudes_uncorrelated() {
        let dim = 16;
        let n = 10_000;
        let mut rng = RngStream::new(77, 1);
        let pairs: Vec<Complex64> = (0..n)
            .map(|_| {
                let psi = random_state(dim, &mut rng).unwrap();
                psi.amplitudes()[2].conj() * psi.amplitudes()[5]
            })
            .collect();
        let mean: Complex64 = pairs.iter().sum::<Complex64>() / n as f64;
        let var = pairs.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!(mean.norm() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn basis_state_out_of_range() {
        assert!(QuantumState::basis(3, 3).is_err());
        assert_eq!(QuantumState::basis(3, 1).unwrap().amplitudes()[1].re, 1.0);
    }
}
