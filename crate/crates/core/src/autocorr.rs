//! Phase-space autocorrelation of torus Wigner functions.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::torus::{storage_index, symmetric_index, TorusWigner};

/// `C(dn, dm) = (1/N^2) sum_{n,m} W(n, m) W(n + dn, m + dm)` on storage
/// indices, with its radial average.
#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    pub grid: Array2<f64>,
    /// `(r, mean C over displacements with round(|d|) = r, count)`.
    pub radial: Vec<(f64, f64, usize)>,
}

impl Autocorrelation {
    /// Value at any integer displacement, reduced modulo `N`.
    pub fn at(&self, dn: i64, dm: i64) -> f64 {
        let n = self.grid.nrows();
        self.grid[[storage_index(dn, n), storage_index(dm, n)]]
    }

    /// Mean of `C` over all nonzero displacements.
    pub fn off_origin_mean(&self) -> f64 {
        let total: f64 = self.grid.iter().sum::<f64>() - self.grid[[0, 0]];
        total / (self.grid.len() - 1) as f64
    }
}

/// Circular autocorrelation via the Wiener-Khinchin relation,
/// `C = IFFT2(|FFT2(W)|^2) / N^4`.
pub fn autocorrelation_torus(w: &TorusWigner) -> Autocorrelation {
    let n = w.dim();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let mut data: Vec<Complex64> = w.values().iter().map(|v| Complex64::new(*v, 0.0)).collect();
    fft2(&mut data, n, |row| forward.process(row));
    data.iter_mut()
        .for_each(|z| *z = Complex64::new(z.norm_sqr(), 0.0));
    fft2(&mut data, n, |row| inverse.process(row));

    // C(d) = C(-d) holds exactly after averaging the two rounded values.
    let scale = 0.5 / (n as f64).powi(4);
    let grid = Array2::from_shape_fn((n, n), |(i, j)| {
        let mirror = ((n - i) % n) * n + (n - j) % n;
        (data[i * n + j].re + data[mirror].re) * scale
    });

    let half = (n - 1) / 2;
    let max_r = ((2 * half * half) as f64).sqrt().round() as usize;
    let mut sums = vec![0.0; max_r + 1];
    let mut counts = vec![0usize; max_r + 1];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (symmetric_index(i, n) as f64, symmetric_index(j, n) as f64);
            let r = (a * a + b * b).sqrt().round() as usize;
            sums[r] += grid[[i, j]];
            counts[r] += 1;
        }
    }
    let radial = sums
        .into_iter()
        .zip(counts)
        .enumerate()
        .filter(|(_, (_, c))| *c > 0)
        .map(|(r, (s, c))| (r as f64, s / c as f64, c))
        .collect();
    Autocorrelation { grid, radial }
}

/// In-place 2-d transform of a row-major `n x n` array.
fn fft2(data: &mut [Complex64], n: usize, mut transform: impl FnMut(&mut [Complex64])) {
    for row in data.chunks_mut(n) {
        transform(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            column[i] = data[i * n + j];
        }
        transform(&mut column);
        for i in 0..n {
            data[i * n + j] = column[i];
        }
    }
}
