//! SU(2) Wigner-Weyl transform on the sphere: multipole operators, the
//! coefficients `G_kq`, evaluation on the sphere and on an exact quadrature
//! grid, spin-coherent states and the kicked top.

mod harmonics;
mod top;
mod wigner3j;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::state::QuantumState;
use crate::stats::WeightedSamples;
use crate::torus::IMAG_TOLERANCE;

pub use harmonics::{gauss_legendre, legendre_index, normalized_legendre, spherical_harmonic};
pub use top::{kicked_top_step, KickedTop, TopParams};
pub use wigner3j::{ln_factorial, wigner_3j};

/// Spin quantum number `J`, stored doubled so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(u32);

impl Spin {
    /// Spin with `2J = two_j`; `J >= 1/2`.
    pub fn from_twice(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidArgument("spin must be at least 1/2".into()));
        }
        Ok(Self(two_j))
    }

    pub fn integer(j: u32) -> Result<Self> {
        Self::from_twice(2 * j)
    }

    /// Parses `J` given as a real number; it must be a positive multiple of 1/2.
    pub fn from_f64(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !(twice.is_finite() && twice >= 1.0 && (twice - twice.round()).abs() < 1e-9) {
            return Err(Error::InvalidArgument(format!(
                "{j} is not a positive half-integer"
            )));
        }
        Self::from_twice(twice.round() as u32)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Hilbert-space dimension `2J + 1`.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// Largest multipole rank `2J`.
    pub fn max_rank(self) -> usize {
        self.0 as usize
    }

    /// Doubled magnetic number `2m` of storage index `i`, with `m = i - J`.
    pub fn twice_m(self, index: usize) -> i32 {
        2 * index as i32 - self.0 as i32
    }

    /// Magnetic number of storage index `i`.
    pub fn m(self, index: usize) -> f64 {
        self.twice_m(index) as f64 / 2.0
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// `C_s = sqrt(4 pi (2J+1) / 2J)`.
pub fn sphere_norm_constant(spin: Spin) -> f64 {
    let tj = spin.twice() as f64;
    (4.0 * PI * (tj + 1.0) / tj).sqrt()
}

/// Phase-space mean `1/sqrt(2J)` of every pure-state Wigner function.
pub fn sphere_mean(spin: Spin) -> f64 {
    1.0 / (spin.twice() as f64).sqrt()
}

/// Offset of `(k, q)` in a `G_kq` table.
#[inline]
fn gkq_index(k: usize, q: i64) -> usize {
    ((k * k + k) as i64 + q) as usize
}

fn check_rank(spin: Spin, k: usize, q: i64) -> Result<()> {
    if k > spin.max_rank() || q.unsigned_abs() as usize > k {
        return Err(Error::InvalidArgument(format!(
            "multipole (k={k}, q={q}) outside 0 <= k <= 2J = {}, |q| <= k",
            spin.max_rank()
        )));
    }
    Ok(())
}

/// Nonzero matrix elements of the multipole operator `T_kq`,
/// `<m|T_kq|m-q> = (-1)^(J-m) sqrt(2k+1) (J k J; -m q m-q)`, indexed by the
/// row storage index `i` (`m = i - J`) starting at `first_row`.
#[derive(Debug, Clone)]
struct MultipoleBand {
    first_row: usize,
    values: Vec<f64>,
}

fn multipole_band(spin: Spin, k: usize, q: i64) -> MultipoleBand {
    let tj = spin.twice() as i32;
    let dim = spin.dim();
    let first_row = q.max(0) as usize;
    let last_row = (dim as i64 - 1 + q.min(0)) as usize;
    let values = (first_row..=last_row)
        .map(|i| {
            let tm = spin.twice_m(i);
            let tm_col = tm - 2 * q as i32;
            let phase = if ((tj - tm) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            phase
                * ((2 * k + 1) as f64).sqrt()
                * wigner_3j(tj, 2 * k as i32, tj, -tm, 2 * q as i32, tm_col)
        })
        .collect();
    MultipoleBand { first_row, values }
}

/// Dense multipole operator `T_kq`.
pub fn multipole_matrix(k: usize, q: i64, spin: Spin) -> Result<DMatrix<Complex64>> {
    check_rank(spin, k, q)?;
    let band = multipole_band(spin, k, q);
    let mut t = DMatrix::zeros(spin.dim(), spin.dim());
    for (offset, v) in band.values.iter().enumerate() {
        let row = band.first_row + offset;
        let col = (row as i64 - q) as usize;
        t[(row, col)] = Complex64::new(*v, 0.0);
    }
    Ok(t)
}

/// Per-spin precomputed data: multipole bands, the exact quadrature grid and
/// equator harmonics. Immutable once built and shared between threads.
pub struct SphereTransform {
    spin: Spin,
    bands: Vec<MultipoleBand>,
    quadrature: SphereQuadrature,
    /// `P~_k^q(0)`, i.e. `Y_kq(pi/2, 0)`, for `q >= 0`.
    equator: Vec<f64>,
}

/// Gauss-Legendre nodes in `cos theta` (`4J + 1` of them) times `8J + 2`
/// uniform azimuths: exact for band limit `8J`, which covers `W^4`.
pub struct SphereQuadrature {
    pub cos_theta: Vec<f64>,
    pub theta_weights: Vec<f64>,
    pub n_phi: usize,
    legendre: Vec<Vec<f64>>,
}

impl SphereQuadrature {
    fn new(spin: Spin) -> Self {
        let n_theta = 2 * spin.twice() as usize + 1;
        let n_phi = 4 * spin.twice() as usize + 2;
        let (cos_theta, theta_weights) = gauss_legendre(n_theta);
        let legendre = cos_theta
            .iter()
            .map(|x| normalized_legendre(spin.max_rank(), *x, (1.0 - x * x).max(0.0).sqrt()))
            .collect();
        Self {
            cos_theta,
            theta_weights,
            n_phi,
            legendre,
        }
    }

    pub fn n_theta(&self) -> usize {
        self.cos_theta.len()
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Normalized weights (summing to one) in the same order as
    /// [`SphereTransform::grid_values`].
    pub fn sample_weights(&self) -> Vec<f64> {
        let scale = 1.0 / (2.0 * self.n_phi as f64);
        self.theta_weights
            .iter()
            .flat_map(|w| std::iter::repeat_n(w * scale, self.n_phi))
            .collect()
    }

    /// Grid node `(theta, phi)` of a flat sample index.
    pub fn node(&self, index: usize) -> (f64, f64) {
        let (i, j) = (index / self.n_phi, index % self.n_phi);
        (
            self.cos_theta[i].acos(),
            2.0 * PI * j as f64 / self.n_phi as f64,
        )
    }
}

impl SphereTransform {
    pub fn new(spin: Spin) -> Self {
        let max_rank = spin.max_rank();
        let mut bands = Vec::with_capacity((max_rank + 1) * (max_rank + 1));
        for k in 0..=max_rank {
            for q in -(k as i64)..=(k as i64) {
                bands.push(multipole_band(spin, k, q));
            }
        }
        Self {
            spin,
            bands,
            quadrature: SphereQuadrature::new(spin),
            equator: normalized_legendre(max_rank, 0.0, 1.0),
        }
    }

    /// Process-wide transform for `spin`, built on first use.
    pub fn shared(spin: Spin) -> Arc<SphereTransform> {
        static CACHE: OnceLock<Mutex<HashMap<Spin, Arc<SphereTransform>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().expect("cache poisoned").get(&spin) {
            return Arc::clone(t);
        }
        let built = Arc::new(SphereTransform::new(spin));
        let mut guard = cache.lock().expect("cache poisoned");
        Arc::clone(guard.entry(spin).or_insert(built))
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn quadrature(&self) -> &SphereQuadrature {
        &self.quadrature
    }

    /// `G_kq = tr{rho T_kq^dagger} = sum_m <m|T_kq|m-q> psi_m conj(psi_{m-q})`.
    pub fn coefficients(&self, psi: &QuantumState) -> Result<SphereWigner> {
        if psi.dim() != self.spin.dim() {
            return Err(Error::InvalidDimension(format!(
                "state dimension {} does not match 2J+1 = {}",
                psi.dim(),
                self.spin.dim()
            )));
        }
        let amp = psi.amplitudes();
        let max_rank = self.spin.max_rank();
        let mut g = Vec::with_capacity(self.bands.len());
        for k in 0..=max_rank {
            for q in -(k as i64)..=(k as i64) {
                let band = &self.bands[gkq_index(k, q)];
                let mut acc = Complex64::new(0.0, 0.0);
                for (offset, t) in band.values.iter().enumerate() {
                    let row = band.first_row + offset;
                    let col = (row as i64 - q) as usize;
                    acc += *t * amp[row] * amp[col].conj();
                }
                g.push(acc);
            }
        }
        Ok(SphereWigner { spin: self.spin, g })
    }

    /// Wigner values on the quadrature grid, row-major in
    /// `(theta node, phi node)`.
    pub fn grid_values(&self, w: &SphereWigner) -> Result<Vec<f64>> {
        self.check_spin(w)?;
        let quad = &self.quadrature;
        let max_rank = self.spin.max_rank();
        let c_s = sphere_norm_constant(self.spin);
        let fft = FftPlanner::new().plan_fft_inverse(quad.n_phi);
        let mut out = Vec::with_capacity(quad.len());
        let mut buf = vec![Complex64::new(0.0, 0.0); quad.n_phi];
        for table in &quad.legendre {
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            for q in 0..=max_rank {
                let mut f = Complex64::new(0.0, 0.0);
                for k in q..=max_rank {
                    f += w.g[gkq_index(k, q as i64)] * table[legendre_index(k, q)];
                }
                buf[q] = if q == 0 { f } else { 2.0 * f };
            }
            fft.process(&mut buf);
            out.extend(buf.iter().map(|z| c_s * z.re));
        }
        Ok(out)
    }

    /// Grid values paired with the quadrature weights.
    pub fn samples(&self, w: &SphereWigner) -> Result<WeightedSamples> {
        WeightedSamples::new(self.grid_values(w)?, self.quadrature.sample_weights())
    }

    /// Complex Fourier coefficients `Z_q`, `q = 0..=2J`, of the Wigner
    /// function on the equator: `W(pi/2, phi) = sum_{|q| <= 2J} Z_q e^{i q phi}`
    /// with `Z_{-q} = conj(Z_q)`.
    pub fn equator_modes(&self, w: &SphereWigner) -> Result<Vec<Complex64>> {
        self.check_spin(w)?;
        let max_rank = self.spin.max_rank();
        let c_s = sphere_norm_constant(self.spin);
        Ok((0..=max_rank)
            .map(|q| {
                c_s * (q..=max_rank)
                    .map(|k| w.g[gkq_index(k, q as i64)] * self.equator[legendre_index(k, q)])
                    .sum::<Complex64>()
            })
            .collect())
    }

    fn check_spin(&self, w: &SphereWigner) -> Result<()> {
        if w.spin != self.spin {
            return Err(Error::InvalidDimension(format!(
                "Wigner function of spin {} given to transform of spin {}",
                w.spin, self.spin
            )));
        }
        Ok(())
    }
}

/// Coefficients `G_kq` of a sphere Wigner function,
/// `W(theta, phi) = C_s sum_kq G_kq Y_kq(theta, phi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereWigner {
    spin: Spin,
    g: Vec<Complex64>,
}

impl SphereWigner {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn coefficient(&self, k: usize, q: i64) -> Result<Complex64> {
        check_rank(self.spin, k, q)?;
        Ok(self.g[gkq_index(k, q)])
    }

    /// `sum |G_kq|^2`; one for pure states.
    pub fn parseval(&self) -> f64 {
        self.g.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Value at `(theta, phi)`.
    pub fn eval(&self, theta: f64, phi: f64) -> f64 {
        let max_rank = self.spin.max_rank();
        let table = normalized_legendre(max_rank, theta.cos(), theta.sin());
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=max_rank {
            for q in -(k as i64)..=(k as i64) {
                let aq = q.unsigned_abs() as usize;
                let y = Complex64::from_polar(table[legendre_index(k, aq)], aq as f64 * phi);
                let y = if q < 0 {
                    (if aq.is_multiple_of(2) { 1.0 } else { -1.0 }) * y.conj()
                } else {
                    y
                };
                acc += self.g[gkq_index(k, q)] * y;
            }
        }
        let value = sphere_norm_constant(self.spin) * acc;
        debug_assert!(
            value.im.abs() < IMAG_TOLERANCE,
            "sphere Wigner function has imaginary residual {}",
            value.im
        );
        value.re
    }
}

/// `G_kq` of `psi` for spin `spin`.
pub fn gkq_coefficients(psi: &QuantumState, spin: Spin) -> Result<SphereWigner> {
    SphereTransform::shared(spin).coefficients(psi)
}

/// `W(theta, phi)`.
pub fn wigner_sphere_eval(w: &SphereWigner, theta: f64, phi: f64) -> f64 {
    w.eval(theta, phi)
}

/// Spin-coherent state pointing along `(theta0, phi0)`:
/// `c_m ~ sqrt(C(2J, J-m)) cos^(J+m)(theta0/2) sin^(J-m)(theta0/2) e^{-i m phi0}`.
pub fn coherent_state_sphere(theta0: f64, phi0: f64, spin: Spin) -> Result<QuantumState> {
    if !(theta0.is_finite() && phi0.is_finite()) {
        return Err(Error::InvalidArgument(
            "non-finite coherent-state angles".into(),
        ));
    }
    let tj = spin.twice();
    let (c, s) = ((theta0 / 2.0).cos(), (theta0 / 2.0).sin());
    let amplitudes = (0..spin.dim())
        .map(|i| {
            let tm = spin.twice_m(i);
            let up = ((tj as i32 + tm) / 2) as u32; // J + m
            let down = ((tj as i32 - tm) / 2) as u32; // J - m
            let ln_binom = ln_factorial(tj) - ln_factorial(up) - ln_factorial(down);
            let factor = |base: f64, exp: u32| -> Option<(f64, f64)> {
                if exp == 0 {
                    Some((0.0, 1.0))
                } else if base == 0.0 {
                    None
                } else {
                    let sign = if base < 0.0 && exp % 2 == 1 {
                        -1.0
                    } else {
                        1.0
                    };
                    Some((exp as f64 * base.abs().ln(), sign))
                }
            };
            match (factor(c, up), factor(s, down)) {
                (Some((lc, sc)), Some((ls, ss))) => Complex64::from_polar(
                    sc * ss * (0.5 * ln_binom + lc + ls).exp(),
                    -(tm as f64 / 2.0) * phi0,
                ),
                _ => Complex64::new(0.0, 0.0),
            }
        })
        .collect();
    QuantumState::new(amplitudes)
}
