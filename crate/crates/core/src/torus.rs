//! Discrete Wigner-Weyl transform on the quantized 2-torus.
//!
//! All torus indices live in the symmetric range `-(N-1)/2 ..= (N-1)/2`.
//! Storage index `i` in `0..N` represents symmetric index `i` when
//! `i <= (N-1)/2` and `i - N` otherwise; [`symmetric_index`] and
//! [`storage_index`] implement the bijection.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView1};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::state::QuantumState;
use crate::stats::WeightedSamples;

/// Residual imaginary part tolerated before a Wigner value is declared real.
pub(crate) const IMAG_TOLERANCE: f64 = 1e-10;

pub fn check_odd(n: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidDimension(format!(
            "torus dimension must be odd and at least 3, got {n}"
        )));
    }
    Ok(())
}

/// Symmetric index represented by storage index `i`.
#[inline]
pub fn symmetric_index(i: usize, n: usize) -> i64 {
    let half = (n - 1) / 2;
    if i <= half {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Storage index of any integer index, reduced modulo `n`.
#[inline]
pub fn storage_index(s: i64, n: usize) -> usize {
    s.rem_euclid(n as i64) as usize
}

/// Normalization constant `sqrt(N^3 / (N-1))` fixing unit phase-space variance.
pub fn torus_norm_constant(n: usize) -> f64 {
    let n = n as f64;
    (n * n * n / (n - 1.0)).sqrt()
}

/// Phase-space mean `1/sqrt(N-1)` of every pure-state Wigner function.
pub fn torus_mean(n: usize) -> f64 {
    1.0 / ((n - 1) as f64).sqrt()
}

/// Smeared Kronecker delta `(1/N) sin(pi l/2) / sin(pi l/(2N))`.
///
/// Has period `2N` in `l`; at `l = 0 (mod 2N)` it takes its limit value 1.
pub fn fat_delta(l: i64, n: usize) -> Result<f64> {
    check_odd(n)?;
    Ok(fat_delta_unchecked(l, n))
}

#[inline]
fn fat_delta_unchecked(l: i64, n: usize) -> f64 {
    // Even in l; reducing |l| keeps the two signs bit-identical.
    let period = 2 * n as i64;
    let l = l.abs().rem_euclid(period);
    if l == 0 {
        return 1.0;
    }
    // Reduce the numerator argument mod 4 to keep sin exact at multiples of pi.
    let num = match l.rem_euclid(4) {
        0 | 2 => 0.0,
        1 => 1.0,
        _ => -1.0,
    };
    if num == 0.0 {
        return 0.0;
    }
    num / (n as f64 * (PI * l as f64 / (2.0 * n as f64)).sin())
}

/// Dense kernel operator for grid point `(n, k)`; indices are reduced into
/// the symmetric range. Intended for verification at small `N`.
pub fn kernel_matrix_torus(n_idx: i64, k_idx: i64, n: usize) -> Result<DMatrix<Complex64>> {
    check_odd(n)?;
    let half = ((n - 1) / 2) as i64;
    let n_sym = symmetric_index(storage_index(n_idx, n), n);
    let k_sym = symmetric_index(storage_index(k_idx, n), n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut omega = DMatrix::<Complex64>::zeros(n, n);
    for shift in -half..=half {
        let phase = Complex64::from_polar(scale, -2.0 * PI * (shift * k_sym) as f64 / n as f64);
        for l in -half..=half {
            let d = fat_delta_unchecked(2 * l - 2 * n_sym + shift, n);
            if d == 0.0 {
                continue;
            }
            omega[(storage_index(l, n), storage_index(l + shift, n))] += phase * d;
        }
    }
    Ok(omega)
}

/// Wigner function of a pure state on the `N x N` torus mesh, indexed by
/// storage indices `[n, k]` (position, momentum).
#[derive(Debug, Clone, PartialEq)]
pub struct TorusWigner {
    n: usize,
    values: Array2<f64>,
}

impl TorusWigner {
    /// Wraps an arbitrary real grid, e.g. for synthetic test patterns.
    pub fn from_grid(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(Error::InvalidDimension(format!(
                "torus grid must be square, got {rows}x{cols}"
            )));
        }
        if rows < 2 {
            return Err(Error::InvalidDimension(
                "torus grid smaller than 2x2".into(),
            ));
        }
        Ok(Self { n: rows, values })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Value at symmetric (or any integer) indices, reduced modulo `N`.
    pub fn at(&self, n_idx: i64, k_idx: i64) -> f64 {
        self.values[[storage_index(n_idx, self.n), storage_index(k_idx, self.n)]]
    }

    /// Fixed-position line `W(n, .)` over the momentum index.
    pub fn position_line(&self, n_idx: i64) -> ArrayView1<'_, f64> {
        self.values.row(storage_index(n_idx, self.n))
    }

    /// Fixed-momentum line `W(., k)` over the position index.
    pub fn momentum_line(&self, k_idx: i64) -> ArrayView1<'_, f64> {
        self.values.column(storage_index(k_idx, self.n))
    }

    pub fn mean(&self) -> f64 {
        self.values.mean().unwrap_or(0.0)
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.values.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / self.values.len() as f64
    }

    /// Grid values with uniform weights `1/N^2`.
    pub fn samples(&self) -> WeightedSamples {
        WeightedSamples::uniform(self.values.iter().copied().collect()).expect("non-empty grid")
    }

    /// Phase-space location `(2 pi n / N, 2 pi k / N)` of a storage cell,
    /// with both coordinates in `[0, 2 pi)`.
    pub fn cell_position(&self, n_storage: usize, k_storage: usize) -> (f64, f64) {
        let step = 2.0 * PI / self.n as f64;
        (n_storage as f64 * step, k_storage as f64 * step)
    }
}

/// Fast evaluator of the torus Wigner transform at a fixed odd dimension.
///
/// For each displacement `n'` the sum over `l` against the fat delta is a
/// circular correlation in `n`. Even `n'` reduce to a shift; odd `n'` share a
/// single kernel spectrum up to a shift, so the full grid costs
/// `O(N^2 log N)`.
pub struct TorusTransform {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Conjugated spectrum of `h(j) = fat_delta(2j - N)`.
    odd_kernel: Vec<Complex64>,
}

impl TorusTransform {
    pub fn new(n: usize) -> Result<Self> {
        check_odd(n)?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let mut odd_kernel: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(fat_delta_unchecked(2 * j as i64 - n as i64, n), 0.0))
            .collect();
        forward.process(&mut odd_kernel);
        odd_kernel.iter_mut().for_each(|c| *c = c.conj());
        Ok(Self {
            n,
            forward,
            inverse,
            odd_kernel,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn wigner(&self, psi: &QuantumState) -> Result<TorusWigner> {
        let n = self.n;
        if psi.dim() != n {
            return Err(Error::InvalidDimension(format!(
                "state dimension {} does not match transform dimension {n}",
                psi.dim()
            )));
        }
        let amp = psi.amplitudes();
        let half = ((n - 1) / 2) as i64;
        let inv_n = 1.0 / n as f64;

        // rows[n'_storage][n] = sum_l fat_delta(2l - 2n + n') psi_{l+n'} conj(psi_l)
        let rows: Vec<Vec<Complex64>> = (-half..=half)
            .into_par_iter()
            .map(|shift| {
                let a: Vec<Complex64> = (0..n)
                    .map(|l| amp[storage_index(l as i64 + shift, n)] * amp[l].conj())
                    .collect();
                if shift.rem_euclid(2) == 0 {
                    let half_shift = shift / 2;
                    (0..n)
                        .map(|m| a[storage_index(m as i64 - half_shift, n)])
                        .collect()
                } else {
                    let s = (shift + n as i64) / 2;
                    let mut spec = a;
                    self.forward.process(&mut spec);
                    spec.iter_mut()
                        .zip(&self.odd_kernel)
                        .for_each(|(x, h)| *x *= h * inv_n);
                    self.inverse.process(&mut spec);
                    (0..n)
                        .map(|m| spec[storage_index(m as i64 - s, n)])
                        .collect()
                }
            })
            .collect();

        // Reorder the displacement axis to storage order and transform over it.
        let c_t = torus_norm_constant(n) / (n as f64).sqrt();
        let lines: Vec<(Vec<f64>, f64)> = (0..n)
            .into_par_iter()
            .map(|m| {
                let mut line = vec![Complex64::new(0.0, 0.0); n];
                for (j, shift) in (-half..=half).enumerate() {
                    line[storage_index(shift, n)] = rows[j][m];
                }
                self.forward.process(&mut line);
                let max_imag = line
                    .iter()
                    .fold(0.0_f64, |acc, z| acc.max((c_t * z.im).abs()));
                (line.iter().map(|z| c_t * z.re).collect(), max_imag)
            })
            .collect();
        let mut values = Array2::<f64>::zeros((n, n));
        let mut max_imag: f64 = 0.0;
        for (m, (line, imag)) in lines.into_iter().enumerate() {
            values
                .row_mut(m)
                .iter_mut()
                .zip(line)
                .for_each(|(w, v)| *w = v);
            max_imag = max_imag.max(imag);
        }
        debug_assert!(
            max_imag < IMAG_TOLERANCE,
            "torus Wigner function has imaginary residual {max_imag}"
        );
        Ok(TorusWigner { n, values })
    }
}

/// Wigner function of `psi` on the `N x N` mesh.
pub fn wigner_torus(psi: &QuantumState) -> Result<TorusWigner> {
    TorusTransform::new(psi.dim())?.wigner(psi)
}

/// Number of lattice images summed on each side when periodizing a Gaussian.
const COHERENT_IMAGES: i64 = 5;

/// Minimum-uncertainty wave packet centered at `(q0, p0)` with equal position
/// and momentum widths `sqrt(pi/N)`, periodized over the torus.
///
/// Its Wigner function peaks at momentum index `k0 = p0 N / 2 pi`, i.e. the
/// packet carries the phase `exp(2 pi i n k0 / N)`.
pub fn coherent_state_torus(q0: f64, p0: f64, n: usize) -> Result<QuantumState> {
    check_odd(n)?;
    if !(q0.is_finite() && p0.is_finite()) {
        return Err(Error::InvalidArgument(
            "non-finite coherent-state center".into(),
        ));
    }
    let nf = n as f64;
    let n0 = q0 * nf / (2.0 * PI);
    let k0 = p0 * nf / (2.0 * PI);
    let amplitudes = (0..n)
        .map(|i| {
            let x = symmetric_index(i, n) as f64;
            (-COHERENT_IMAGES..=COHERENT_IMAGES)
                .map(|j| {
                    let y = x + (j * n as i64) as f64;
                    let d = y - n0;
                    Complex64::from_polar((-PI * d * d / nf).exp(), 2.0 * PI * k0 * (y - n0) / nf)
                })
                .sum()
        })
        .collect();
    QuantumState::new(amplitudes)
}

/// Momentum eigenstate `|k~>` with position amplitudes
/// `N^{-1/2} exp(-2 pi i n k / N)`.
pub fn momentum_state(k_idx: i64, n: usize) -> Result<QuantumState> {
    check_odd(n)?;
    let scale = 1.0 / (n as f64).sqrt();
    let amplitudes = (0..n)
        .map(|i| {
            let phase = -2.0 * PI * (symmetric_index(i, n) * k_idx) as f64 / n as f64;
            Complex64::from_polar(scale, phase)
        })
        .collect();
    QuantumState::new(amplitudes)
}

/// Position eigenstate `|n>` at a symmetric index.
pub fn position_state(n_idx: i64, n: usize) -> Result<QuantumState> {
    check_odd(n)?;
    QuantumState::basis(n, storage_index(n_idx, n))
}

/// Parameters of the quantized sawtooth map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusMapParams {
    pub k0: f64,
    pub l: u32,
    pub n: usize,
}

impl TorusMapParams {
    pub fn new(k0: f64, l: u32, n: usize) -> Result<Self> {
        check_odd(n)?;
        if l < 1 {
            return Err(Error::InvalidArgument(
                "sawtooth L must be at least 1".into(),
            ));
        }
        if !k0.is_finite() {
            return Err(Error::InvalidArgument("non-finite kick strength".into()));
        }
        Ok(Self { k0, l, n })
    }

    /// Forcing period `T = 2 pi L / N`.
    pub fn period(&self) -> f64 {
        2.0 * PI * self.l as f64 / self.n as f64
    }
}

/// One-period propagator `exp(-i T m^2 / 2) exp(i K0 T n^2 / 2 L^2)` with the
/// diagonal phases and FFT plans precomputed.
pub struct SawtoothMap {
    params: TorusMapParams,
    kick: Vec<Complex64>,
    rotation: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SawtoothMap {
    pub fn new(params: TorusMapParams) -> Result<Self> {
        let TorusMapParams { k0, l, n } = TorusMapParams::new(params.k0, params.l, params.n)?;
        let t = params.period();
        let l2 = (l as f64).powi(2);
        let kick = (0..n)
            .map(|i| {
                let x = symmetric_index(i, n) as f64;
                Complex64::from_polar(1.0, k0 * t * x * x / (2.0 * l2))
            })
            .collect();
        // Momentum phases carry the 1/N of the two basis changes.
        let rotation = (0..n)
            .map(|i| {
                let m = symmetric_index(i, n) as f64;
                Complex64::from_polar(1.0 / n as f64, -t * m * m / 2.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            params,
            kick,
            rotation,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn params(&self) -> &TorusMapParams {
        &self.params
    }

    pub fn step(&self, psi: &QuantumState) -> Result<QuantumState> {
        let n = self.params.n;
        if psi.dim() != n {
            return Err(Error::InvalidDimension(format!(
                "state dimension {} does not match map dimension {n}",
                psi.dim()
            )));
        }
        let mut buf: Vec<Complex64> = psi
            .amplitudes()
            .iter()
            .zip(&self.kick)
            .map(|(a, k)| a * k)
            .collect();
        // <k~|psi> = N^{-1/2} sum_n exp(+2 pi i n k / N) psi_n
        self.inverse.process(&mut buf);
        buf.iter_mut()
            .zip(&self.rotation)
            .for_each(|(a, r)| *a *= r);
        self.forward.process(&mut buf);
        Ok(QuantumState::from_unitary_image(buf))
    }
}

/// Applies one period of the sawtooth map.
pub fn sawtooth_step(psi: &QuantumState, params: &TorusMapParams) -> Result<QuantumState> {
    SawtoothMap::new(*params)?.step(psi)
}
