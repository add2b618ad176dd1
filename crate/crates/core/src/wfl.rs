//! Wigner functions restricted to a closed line of phase space, their zero
//! structure, and the random Fourier-mode model that describes them for
//! chaotic states.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::dynamics::Geometry;
use crate::error::{Error, Result};
use crate::sphere::{sphere_mean, SphereTransform, Spin};
use crate::state::{QuantumState, RngStream};
use crate::stats::{histogram_2d, histogram_of, Histogram, Histogram2d};
use crate::torus::{torus_mean, TorusTransform, TorusWigner};

/// Smallest number of grid points per Fourier mode accepted by the zero
/// finder.
pub const MIN_OVERSAMPLE: usize = 8;
/// Grid points per Fourier mode used when the caller has no preference.
pub const DEFAULT_OVERSAMPLE: usize = 16;
/// Bins per axis of the joint spacing/amplitude histogram.
pub const JOINT_BINS: usize = 60;

const T_TOLERANCE: f64 = 1e-12;
const F_TOLERANCE: f64 = 1e-12;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Real trigonometric polynomial
/// `W(t) = u_0 + sum_{q=1}^{M} u_q cos(q t) + v_q sin(q t)` on `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WFLine {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl WFLine {
    /// Builds a line from `u_0..=u_M` and `v_1..=v_M`.
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() < 2 || v.len() + 1 != u.len() {
            return Err(Error::InvalidArgument(format!(
                "expected u_0..u_M and v_1..v_M with M >= 1, got {} and {} coefficients",
                u.len(),
                v.len()
            )));
        }
        if u.iter().chain(&v).any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite line coefficient".into()));
        }
        let mut padded = Vec::with_capacity(u.len());
        padded.push(0.0);
        padded.extend(v);
        Ok(Self { u, v: padded })
    }

    /// Line with complex modes `Z_0..=Z_M` (and `Z_{-q} = conj Z_q`), minus a
    /// constant offset.
    pub fn from_modes(modes: &[Complex64], offset: f64) -> Result<Self> {
        if modes.len() < 2 {
            return Err(Error::InvalidArgument(
                "a line needs at least one oscillating mode".into(),
            ));
        }
        let u = std::iter::once(modes[0].re - offset)
            .chain(modes[1..].iter().map(|z| 2.0 * z.re))
            .collect();
        let v = modes[1..].iter().map(|z| -2.0 * z.im).collect();
        Self::new(u, v)
    }

    /// Trigonometric interpolant with `modes` modes of values sampled at
    /// `t_j = 2 pi j / P`, minus `offset`. Requires `P >= 2 modes + 1`.
    pub fn from_samples(values: &[f64], modes: usize, offset: f64) -> Result<Self> {
        let p = values.len();
        if modes < 1 || p < 2 * modes + 1 {
            return Err(Error::InvalidArgument(format!(
                "{p} samples cannot resolve {modes} modes"
            )));
        }
        let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        PLANNER.with(|pl| pl.borrow_mut().plan_fft_forward(p).process(&mut buf));
        let scale = 1.0 / p as f64;
        let z: Vec<Complex64> = buf[..=modes].iter().map(|c| c * scale).collect();
        Self::from_modes(&z, offset)
    }

    /// Number of oscillating modes `M`.
    pub fn modes(&self) -> usize {
        self.u.len() - 1
    }

    /// `u_0..=u_M`.
    pub fn u(&self) -> &[f64] {
        &self.u
    }

    /// `v_1..=v_M`.
    pub fn v(&self) -> &[f64] {
        &self.v[1..]
    }

    /// Complex modes `Z_0..=Z_M` of the line.
    pub fn complex_modes(&self) -> Vec<Complex64> {
        std::iter::once(Complex64::new(self.u[0], 0.0))
            .chain((1..=self.modes()).map(|q| Complex64::new(self.u[q], -self.v[q]) * 0.5))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.u.iter().chain(&self.v).all(|&c| c == 0.0)
    }

    /// `W(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        self.weighted_sum(t, |_| 1.0, false)
    }

    /// `W'(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        self.weighted_sum(t, |q| q, true)
    }

    /// `W''(t)`.
    pub fn second_derivative(&self, t: f64) -> f64 {
        -self.weighted_sum(t, |q| q * q, false)
    }

    // sum_q w(q) (u_q cos qt + v_q sin qt), or with the derivative pattern
    // (v_q cos qt - u_q sin qt) when `odd` is set.
    fn weighted_sum(&self, t: f64, weight: impl Fn(f64) -> f64, odd: bool) -> f64 {
        let (s1, c1) = t.sin_cos();
        let step = Complex64::new(c1, s1);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut acc = if odd { 0.0 } else { weight(0.0) * self.u[0] };
        for q in 1..=self.modes() {
            phase *= step;
            let (c, s) = (phase.re, phase.im);
            let term = if odd {
                self.v[q] * c - self.u[q] * s
            } else {
                self.u[q] * c + self.v[q] * s
            };
            acc += weight(q as f64) * term;
        }
        acc
    }

    /// Values at `t_j = 2 pi j / P`, `j = 0..P`, for `P >= 2M + 1`.
    pub fn sample_grid(&self, points: usize) -> Result<Vec<f64>> {
        let m = self.modes();
        if points < 2 * m + 1 {
            return Err(Error::InvalidArgument(format!(
                "{points} grid points undersample {m} modes"
            )));
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); points];
        for (q, z) in self.complex_modes().into_iter().enumerate() {
            buf[q] = z;
            if q > 0 {
                buf[points - q] = z.conj();
            }
        }
        PLANNER.with(|pl| pl.borrow_mut().plan_fft_inverse(points).process(&mut buf));
        Ok(buf.into_iter().map(|c| c.re).collect())
    }

    /// Values of `W'` at `t_j = 2 pi j / P`.
    pub fn derivative_grid(&self, points: usize) -> Result<Vec<f64>> {
        let modes: Vec<Complex64> = self
            .complex_modes()
            .into_iter()
            .enumerate()
            .map(|(q, z)| z * Complex64::new(0.0, q as f64))
            .collect();
        Self::from_modes(&modes, 0.0)?.sample_grid(points)
    }

    /// `max_t |W''(t)|`, from a dense FFT scan refined around its best point.
    pub fn max_abs_second_derivative(&self) -> f64 {
        let points = 64 * (self.modes() + 1);
        let h = 2.0 * PI / points as f64;
        let curvature: Vec<Complex64> = self
            .complex_modes()
            .into_iter()
            .enumerate()
            .map(|(q, z)| -z * (q * q) as f64)
            .collect();
        let grid = Self::from_modes(&curvature, 0.0)
            .and_then(|l| l.sample_grid(points))
            .expect("grid resolves every mode");
        let (best, peak) = grid.iter().enumerate().fold((0, 0.0_f64), |a, (j, v)| {
            if v.abs() > a.1 {
                (j, v.abs())
            } else {
                a
            }
        });
        let center = best as f64 * h;
        let t = golden_maximum(|t| self.second_derivative(t).abs(), center - h, center + h);
        self.second_derivative(t).abs().max(peak)
    }

    /// Mean of `W` over `[0, 2 pi)`.
    pub fn mean(&self) -> f64 {
        self.u[0]
    }
}

fn check_oversample(oversample: usize) -> Result<()> {
    if oversample < MIN_OVERSAMPLE {
        return Err(Error::InvalidArgument(format!(
            "oversample must be at least {MIN_OVERSAMPLE}, got {oversample}"
        )));
    }
    Ok(())
}

/// Sign convention of the zero finder: exact zeros count as positive.
#[inline]
fn positive(x: f64) -> bool {
    x >= 0.0
}

/// Location of the maximum of `f` on `[a, b]` by golden-section search.
fn golden_maximum(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a < T_TOLERANCE {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// A zero of a line together with the sign of the line just after it.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Crossing {
    t: f64,
    rising: bool,
}

fn bisect(line: &WFLine, mut lo: f64, mut hi: f64, lo_sign: bool, f_tol: f64) -> f64 {
    while hi - lo > T_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let fm = line.eval(mid);
        if fm.abs() < f_tol {
            return mid;
        }
        if positive(fm) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn crossings(line: &WFLine, oversample: usize) -> Result<Vec<Crossing>> {
    check_oversample(oversample)?;
    if line.is_zero() {
        return Err(Error::DegenerateLine);
    }
    let points = oversample * line.modes();
    let grid = line.sample_grid(points)?;
    let slope = line.derivative_grid(points)?;
    let scale = grid.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let f_tol = F_TOLERANCE * scale;
    let h = 2.0 * PI / points as f64;
    let mut out = Vec::new();
    let mut push = |t: f64, rising: bool| {
        out.push(Crossing {
            t: t.rem_euclid(2.0 * PI),
            rising,
        })
    };
    for j in 0..points {
        let next = (j + 1) % points;
        let (a, b) = (grid[j], grid[next]);
        let (lo, hi) = (j as f64 * h, (j + 1) as f64 * h);
        if positive(a) != positive(b) {
            push(bisect(line, lo, hi, positive(a), f_tol), positive(b));
            continue;
        }
        // No sign change, but an extremum inside the cell may still dip
        // through zero and hide a close pair of roots.
        if positive(slope[j]) == positive(slope[next]) {
            continue;
        }
        let side = if positive(a) { 1.0 } else { -1.0 };
        let t_ext = golden_maximum(|t| -side * line.eval(t), lo, hi);
        let f_ext = line.eval(t_ext);
        if positive(f_ext) != positive(a) {
            push(bisect(line, lo, t_ext, positive(a), f_tol), positive(f_ext));
            push(bisect(line, t_ext, hi, positive(f_ext), f_tol), positive(b));
        }
    }
    out.sort_by(|x, y| x.t.total_cmp(&y.t));
    Ok(out)
}

/// Sorted zeros of the line in `[0, 2 pi)`.
///
/// Sign changes are detected on `oversample * M` equidistant points and
/// refined by bisection. A pair of zeros closer than the grid spacing can
/// be missed together, so the count stays even.
pub fn find_zeros(line: &WFLine, oversample: usize) -> Result<Vec<f64>> {
    Ok(crossings(line, oversample)?
        .into_iter()
        .map(|c| c.t)
        .collect())
}

/// Arcs between adjacent zeros of one line.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineStructure {
    pub zeros: Vec<f64>,
    /// `s_i = t_{i+1} - t_i`, closing around the circle.
    pub spacings: Vec<f64>,
    /// Signed extremum of the line on each arc.
    pub amplitudes: Vec<f64>,
}

/// Zeros, spacings and arc extrema of a single line.
pub fn line_structure(line: &WFLine, oversample: usize) -> Result<LineStructure> {
    let cross = crossings(line, oversample)?;
    let count = cross.len();
    let mut out = LineStructure {
        zeros: cross.iter().map(|c| c.t).collect(),
        ..Default::default()
    };
    let grid_step = 2.0 * PI / (oversample * line.modes()) as f64;
    for (i, c) in cross.iter().enumerate() {
        let next = if i + 1 < count {
            cross[i + 1].t
        } else {
            cross[0].t + 2.0 * PI
        };
        let s = next - c.t;
        let sign = if c.rising { 1.0 } else { -1.0 };
        out.spacings.push(s);
        out.amplitudes
            .push(arc_extremum(line, c.t, s, sign, grid_step));
    }
    Ok(out)
}

fn arc_extremum(line: &WFLine, start: f64, s: f64, sign: f64, grid_step: f64) -> f64 {
    let scan = 16usize.max((2.0 * s / grid_step).ceil() as usize);
    let at = |j: usize| start + s * j as f64 / (scan + 1) as f64;
    let best = (1..=scan)
        .map(|j| (j, sign * line.eval(at(j))))
        .fold((1, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let t = golden_maximum(|t| sign * line.eval(t), at(best.0 - 1), at(best.0 + 1));
    let refined = sign * line.eval(t);
    sign * refined.max(best.1)
}

/// Zero structure aggregated over many lines.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureStats {
    pub spacings: Vec<f64>,
    pub amplitudes: Vec<f64>,
    /// `(s, A)` per arc.
    pub pairs: Vec<(f64, f64)>,
    pub zero_counts: Vec<usize>,
    /// Largest mode count among the lines.
    pub modes: usize,
}

impl StructureStats {
    /// Positive arc extrema.
    pub fn hills(&self) -> Vec<f64> {
        self.amplitudes
            .iter()
            .copied()
            .filter(|&a| a > 0.0)
            .collect()
    }

    /// Negative arc extrema reflected to positive values.
    pub fn mirrored_valleys(&self) -> Vec<f64> {
        self.amplitudes
            .iter()
            .filter(|&&a| a < 0.0)
            .map(|a| -a)
            .collect()
    }

    pub fn max_abs_amplitude(&self) -> f64 {
        self.amplitudes.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
    }

    /// Density of spacings on `[0, max s]`.
    pub fn spacing_histogram(&self, bins: usize) -> Result<Histogram> {
        let hi = self.spacings.iter().fold(0.0_f64, |m, &s| m.max(s));
        histogram_of(&self.spacings, 0.0, hi, bins)
    }

    /// Density of amplitudes on `[-max |A|, max |A|]`.
    pub fn amplitude_histogram(&self, bins: usize) -> Result<Histogram> {
        let a = self.max_abs_amplitude();
        histogram_of(&self.amplitudes, -a, a, bins)
    }

    /// Joint `(s, A)` density on `[0, 4 pi / M] x [-max |A|, max |A|]`.
    pub fn joint_histogram(&self) -> Result<Histogram2d> {
        let a = self.max_abs_amplitude();
        histogram_2d(
            &self.pairs,
            (0.0, 4.0 * PI / self.modes as f64),
            (-a, a),
            (JOINT_BINS, JOINT_BINS),
        )
    }
}

/// Aggregates [`line_structure`] over `lines`, in parallel.
pub fn structure_statistics(lines: &[WFLine], oversample: usize) -> Result<StructureStats> {
    check_oversample(oversample)?;
    if lines.is_empty() {
        return Err(Error::EmptyInput("no lines to analyse".into()));
    }
    let per_line = lines
        .par_iter()
        .map(|l| line_structure(l, oversample))
        .collect::<Result<Vec<_>>>()?;
    let mut stats = StructureStats {
        spacings: Vec::new(),
        amplitudes: Vec::new(),
        pairs: Vec::new(),
        zero_counts: Vec::with_capacity(lines.len()),
        modes: lines.iter().map(WFLine::modes).max().unwrap_or(1),
    };
    for ls in per_line {
        stats.zero_counts.push(ls.zeros.len());
        stats.pairs.extend(
            ls.spacings
                .iter()
                .copied()
                .zip(ls.amplitudes.iter().copied()),
        );
        stats.spacings.extend(ls.spacings);
        stats.amplitudes.extend(ls.amplitudes);
    }
    if stats.spacings.is_empty() {
        return Err(Error::EmptyStatistics("no line has any zero".into()));
    }
    Ok(stats)
}

/// Orientation of a straight line on the torus grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorusLine {
    /// `W(n, .)` at fixed position index.
    FixedPosition(i64),
    /// `W(., k)` at fixed momentum index.
    FixedMomentum(i64),
}

/// Line of a torus Wigner grid, with the phase-space mean subtracted. The
/// grid index `j` sits at `t = 2 pi j / N`.
pub fn torus_line(w: &TorusWigner, line: TorusLine) -> Result<WFLine> {
    let n = w.dim();
    let half = (n as i64 - 1) / 2;
    let idx = match line {
        TorusLine::FixedPosition(i) | TorusLine::FixedMomentum(i) => i,
    };
    if idx.abs() > half {
        return Err(Error::OutOfRange(format!(
            "line index {idx} outside -{half}..={half}"
        )));
    }
    let values = match line {
        TorusLine::FixedPosition(i) => w.position_line(i),
        TorusLine::FixedMomentum(i) => w.momentum_line(i),
    };
    WFLine::from_samples(&values.to_vec(), half as usize, torus_mean(n))
}

/// Fixed-position line of the Wigner function of `psi` at symmetric
/// position index `n_fixed`.
pub fn wfl_torus(psi: &QuantumState, n_fixed: i64) -> Result<WFLine> {
    let w = TorusTransform::new(psi.dim())?.wigner(psi)?;
    torus_line(&w, TorusLine::FixedPosition(n_fixed))
}

/// Wigner function of `psi` on the equator of the sphere, with the
/// phase-space mean subtracted.
pub fn wfl_sphere(psi: &QuantumState, spin: Spin) -> Result<WFLine> {
    let transform = SphereTransform::shared(spin);
    let w = transform.coefficients(psi)?;
    WFLine::from_modes(&transform.equator_modes(&w)?, sphere_mean(spin))
}

/// Semicircle variance `(2 / (J pi)) sqrt(1 - ((q - 1) / 2J)^2)` of the
/// equator mode `q >= 1` of a random spin-`J` state.
pub fn semicircle_variance(spin: Spin, q: usize) -> f64 {
    let j = spin.value();
    let x = (q as f64 - 1.0) / spin.twice() as f64;
    2.0 / (j * PI) * (1.0 - x * x).max(0.0).sqrt()
}

/// Variances `(var u_0, [var u_q = var v_q for q = 1..=M])` of the random
/// line model of `geometry`.
pub fn random_model_variances(geometry: Geometry) -> Result<(f64, Vec<f64>)> {
    match geometry {
        Geometry::Torus(n) => {
            if n < 3 || n % 2 == 0 {
                return Err(Error::InvalidDimension(format!(
                    "torus dimension {n} must be odd and >= 3"
                )));
            }
            let base = 1.0 / (n - 1) as f64;
            Ok((base, vec![2.0 * base; (n - 1) / 2]))
        }
        Geometry::Sphere(spin) => {
            if spin.twice() == 0 {
                return Err(Error::InvalidDimension("spin must be positive".into()));
            }
            let var: Vec<f64> = (1..=spin.max_rank())
                .map(|q| semicircle_variance(spin, q))
                .collect();
            Ok((var[0] / 2.0, var))
        }
    }
}

/// Line with independent zero-mean Gaussian coefficients whose variances
/// follow [`random_model_variances`].
pub fn random_wfl(geometry: Geometry, rng: &mut RngStream) -> Result<WFLine> {
    let (var0, var) = random_model_variances(geometry)?;
    let mut u = Vec::with_capacity(var.len() + 1);
    u.push(rng.normal(var0.sqrt()));
    let mut v = Vec::with_capacity(var.len());
    for s2 in &var {
        u.push(rng.normal(s2.sqrt()));
        v.push(rng.normal(s2.sqrt()));
    }
    WFLine::new(u, v)
}

/// Distribution of the lengths of maximal constant-sign runs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClusterDistribution {
    /// `counts[s]` is the number of clusters of length `s`.
    pub counts: Vec<u64>,
}

impl ClusterDistribution {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Fraction `P_s` of clusters with length `s`.
    pub fn probability(&self, s: usize) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        self.counts.get(s).copied().unwrap_or(0) as f64 / total as f64
    }

    /// Multinomial standard error of `P_s` at probability `p`.
    pub fn standard_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.total().max(1) as f64).sqrt()
    }

    pub fn add_length(&mut self, s: usize) {
        if self.counts.len() <= s {
            self.counts.resize(s + 1, 0);
        }
        self.counts[s] += 1;
    }

    pub fn merge(&mut self, other: &ClusterDistribution) {
        for (s, &c) in other.counts.iter().enumerate() {
            if c > 0 {
                if self.counts.len() <= s {
                    self.counts.resize(s + 1, 0);
                }
                self.counts[s] += c;
            }
        }
    }
}

/// Lengths of the maximal runs of equal entries of a cyclic sequence.
pub fn cyclic_run_lengths(signs: &[bool]) -> Vec<usize> {
    let n = signs.len();
    let Some(start) = (0..n).find(|&i| signs[i] != signs[(i + n - 1) % n]) else {
        return if n == 0 { Vec::new() } else { vec![n] };
    };
    let mut runs = Vec::new();
    let mut len = 0;
    for i in 0..n {
        let j = (start + i) % n;
        if i > 0 && signs[j] != signs[(j + n - 1) % n] {
            runs.push(len);
            len = 0;
        }
        len += 1;
    }
    runs.push(len);
    runs
}

/// Cluster lengths of `sign(W(n, .) - offset)` over every fixed-position
/// line of the grid, taken cyclically. Values equal to the offset count as
/// positive.
pub fn discrete_cluster_distribution(w: &TorusWigner, offset: f64) -> ClusterDistribution {
    let mut dist = ClusterDistribution::default();
    for row in w.values().rows() {
        let signs: Vec<bool> = row.iter().map(|&x| positive(x - offset)).collect();
        for s in cyclic_run_lengths(&signs) {
            dist.add_length(s);
        }
    }
    dist
}

/// Signed amplitude of every cluster of `sign(W(n, .) - offset)`: the
/// value of `W - offset` of largest magnitude inside the run. Clusters are
/// taken cyclically along every fixed-position line, as in
/// [`discrete_cluster_distribution`].
pub fn discrete_cluster_amplitudes(w: &TorusWigner, offset: f64) -> Vec<f64> {
    let mut amplitudes = Vec::new();
    for row in w.values().rows() {
        let values: Vec<f64> = row.iter().map(|&x| x - offset).collect();
        let n = values.len();
        let start = (0..n)
            .find(|&i| positive(values[i]) != positive(values[(i + n - 1) % n]))
            .unwrap_or(0);
        let mut peak = values[start];
        for i in 1..n {
            let v = values[(start + i) % n];
            if positive(v) != positive(peak) {
                amplitudes.push(peak);
                peak = v;
            } else if v.abs() > peak.abs() {
                peak = v;
            }
        }
        amplitudes.push(peak);
    }
    amplitudes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::coherent_state_sphere;
    use crate::state::random_state;
    use crate::torus::{position_state, wigner_torus};
    use ndarray::Array2;

    fn cos_line() -> WFLine {
        WFLine::new(vec![0.0, 1.0], vec![0.0]).unwrap()
    }

    #[test]
    fn evaluation_and_derivatives_match_direct_sums() {
        let line = WFLine::new(vec![0.3, -0.7, 0.2, 0.05], vec![0.4, -0.1, 0.9]).unwrap();
        for &t in &[0.0, 0.4, 2.0, 5.9] {
            let direct: f64 = 0.3
                + (1..=3)
                    .map(|q| {
                        let qf = q as f64;
                        line.u()[q] * (qf * t).cos() + line.v()[q - 1] * (qf * t).sin()
                    })
                    .sum::<f64>();
            let second: f64 = -(1..=3)
                .map(|q| {
                    let qf = q as f64;
                    qf * qf * (line.u()[q] * (qf * t).cos() + line.v()[q - 1] * (qf * t).sin())
                })
                .sum::<f64>();
            let h = 1e-5;
            let numeric = (line.eval(t + h) - line.eval(t - h)) / (2.0 * h);
            assert!((line.eval(t) - direct).abs() < 1e-14);
            assert!(
                (line.second_derivative(t) - second).abs() < 1e-12,
                "{} {}",
                line.second_derivative(t),
                second
            );
            assert!((line.derivative(t) - numeric).abs() < 1e-8);
        }
        let grid = line.sample_grid(16).unwrap();
        for (j, g) in grid.iter().enumerate() {
            assert!((g - line.eval(2.0 * PI * j as f64 / 16.0)).abs() < 1e-14);
        }
        let back = WFLine::from_samples(&grid, 3, 0.0).unwrap();
        for (a, b) in back
            .u()
            .iter()
            .zip(line.u())
            .chain(back.v().iter().zip(line.v()))
        {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn cosine_zeros_and_arcs() {
        let zeros = find_zeros(&cos_line(), 16).unwrap();
        assert_eq!(zeros.len(), 2);
        assert!((zeros[0] - PI / 2.0).abs() < 1e-12);
        assert!((zeros[1] - 3.0 * PI / 2.0).abs() < 1e-12);
        let s = line_structure(&cos_line(), 16).unwrap();
        assert!((s.spacings[0] - PI).abs() < 1e-11 && (s.spacings[1] - PI).abs() < 1e-11);
        assert!((s.amplitudes[0] + 1.0).abs() < 1e-12);
        assert!((s.amplitudes[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lifted_cosine_has_no_zeros() {
        let line = WFLine::new(vec![2.0, 1.0], vec![0.0]).unwrap();
        assert!(find_zeros(&line, 8).unwrap().is_empty());
        assert!(matches!(
            structure_statistics(&[line], 8),
            Err(Error::EmptyStatistics(_))
        ));
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let zero = WFLine::new(vec![0.0, 0.0], vec![0.0]).unwrap();
        assert_eq!(find_zeros(&zero, 16), Err(Error::DegenerateLine));
        assert!(find_zeros(&cos_line(), 4).is_err());
        assert!(WFLine::new(vec![1.0], vec![]).is_err());
        assert!(structure_statistics(&[], 16).is_err());
    }

    #[test]
    fn random_torus_lines_close_the_circle() {
        let mut rng = RngStream::new(11, 0);
        for _ in 0..50 {
            let line = random_wfl(Geometry::Torus(101), &mut rng).unwrap();
            let s = line_structure(&line, 16).unwrap();
            assert_eq!(s.zeros.len() % 2, 0);
            assert!(s.zeros.len() <= 100);
            let total: f64 = s.spacings.iter().sum();
            assert!((total - 2.0 * PI).abs() < 1e-8);
            for z in &s.zeros {
                assert!(line.eval(*z).abs() < 1e-10);
            }
            // A much finer scan finds the same sign changes.
            let fine = line.sample_grid(64 * 101).unwrap();
            let changes = (0..fine.len())
                .filter(|&j| positive(fine[j]) != positive(fine[(j + 1) % fine.len()]))
                .count();
            assert_eq!(changes, s.zeros.len());
            for (a, sp) in s.amplitudes.iter().zip(&s.spacings) {
                assert!(a.abs() > 0.0);
                assert!(*sp > 0.0);
            }
        }
    }

    #[test]
    fn arc_signs_alternate_and_match_the_line() {
        let mut rng = RngStream::new(12, 0);
        let line = random_wfl(Geometry::Torus(101), &mut rng).unwrap();
        let s = line_structure(&line, 16).unwrap();
        for i in 0..s.zeros.len() {
            let mid = s.zeros[i] + 0.5 * s.spacings[i];
            assert_eq!(line.eval(mid) > 0.0, s.amplitudes[i] > 0.0);
            let next = s.amplitudes[(i + 1) % s.amplitudes.len()];
            assert_ne!(s.amplitudes[i] > 0.0, next > 0.0);
        }
    }

    #[test]
    fn small_arcs_obey_the_curvature_shell() {
        let mut rng = RngStream::new(13, 0);
        let lines: Vec<WFLine> = (0..200)
            .map(|_| random_wfl(Geometry::Torus(101), &mut rng).unwrap())
            .collect();
        for line in &lines {
            let bound = line.max_abs_second_derivative();
            let s = line_structure(line, 16).unwrap();
            for (sp, a) in s.spacings.iter().zip(&s.amplitudes) {
                if *sp < 0.5 / 50.0 {
                    assert!(a.abs() <= sp * sp / 8.0 * bound + 1e-9);
                }
            }
        }
    }

    #[test]
    fn position_state_lines_are_constant() {
        let n = 101;
        let psi = position_state(7, n).unwrap();
        let c = 1.0 / ((n - 1) as f64).sqrt();
        let on = wfl_torus(&psi, 7).unwrap();
        assert!((on.u()[0] - (n as f64 * c - c)).abs() < 1e-10);
        let off = wfl_torus(&psi, -3).unwrap();
        assert!((off.u()[0] + c).abs() < 1e-10);
        for line in [&on, &off] {
            assert!(line.u()[1..]
                .iter()
                .chain(line.v())
                .all(|x| x.abs() < 1e-10));
        }
        assert!(matches!(wfl_torus(&psi, 51), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn torus_lines_interpolate_the_grid() {
        let n = 31;
        let psi = random_state(n, &mut RngStream::new(14, 0)).unwrap();
        let w = wigner_torus(&psi).unwrap();
        let mean = torus_mean(n);
        for idx in [-15i64, 0, 4] {
            let pos = torus_line(&w, TorusLine::FixedPosition(idx)).unwrap();
            let mom = torus_line(&w, TorusLine::FixedMomentum(idx)).unwrap();
            assert_eq!(pos.modes(), 15);
            for j in 0..n {
                let t = 2.0 * PI * j as f64 / n as f64;
                let sym = if j <= 15 {
                    j as i64
                } else {
                    j as i64 - n as i64
                };
                assert!((pos.eval(t) - (w.at(idx, sym) - mean)).abs() < 1e-9);
                assert!((mom.eval(t) - (w.at(sym, idx) - mean)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sphere_line_matches_equator_samples() {
        let spin = Spin::integer(6).unwrap();
        let psi = random_state(spin.dim(), &mut RngStream::new(15, 0)).unwrap();
        let line = wfl_sphere(&psi, spin).unwrap();
        assert_eq!(line.modes(), 12);
        let w = SphereTransform::shared(spin).coefficients(&psi).unwrap();
        let points = 4 * 6 + 2;
        let samples: Vec<f64> = (0..points)
            .map(|j| w.eval(PI / 2.0, 2.0 * PI * j as f64 / points as f64))
            .collect();
        let oracle = WFLine::from_samples(&samples, 12, sphere_mean(spin)).unwrap();
        for (a, b) in line
            .u()
            .iter()
            .zip(oracle.u())
            .chain(line.v().iter().zip(oracle.v()))
        {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        let mean: f64 = (0..1000)
            .map(|j| line.eval(2.0 * PI * j as f64 / 1000.0))
            .sum::<f64>()
            / 1000.0;
        assert!((mean - line.mean()).abs() < 1e-10);
    }

    #[test]
    fn north_pole_line_is_flat() {
        let spin = Spin::integer(5).unwrap();
        let psi = coherent_state_sphere(0.0, 0.0, spin).unwrap();
        let line = wfl_sphere(&psi, spin).unwrap();
        assert!(line.u()[1..]
            .iter()
            .chain(line.v())
            .all(|x| x.abs() < 1e-10));
        assert!(wfl_sphere(&random_state(5, &mut RngStream::new(1, 1)).unwrap(), spin).is_err());
    }

    #[test]
    fn random_model_variances_follow_the_profiles() {
        let mut rng = RngStream::new(16, 0);
        let lines: Vec<WFLine> = (0..20_000)
            .map(|_| random_wfl(Geometry::Torus(101), &mut rng).unwrap())
            .collect();
        let var = |f: &dyn Fn(&WFLine) -> f64| {
            lines.iter().map(|l| f(l).powi(2)).sum::<f64>() / lines.len() as f64
        };
        assert!((var(&|l| l.u()[3]) / 0.02 - 1.0).abs() < 0.05);
        assert!((var(&|l| l.v()[10]) / 0.02 - 1.0).abs() < 0.05);
        assert!((var(&|l| l.u()[0]) / 0.01 - 1.0).abs() < 0.05);

        let spin = Spin::integer(25).unwrap();
        let (v0, v) = random_model_variances(Geometry::Sphere(spin)).unwrap();
        assert_eq!(v.len(), 50);
        assert!((v[0] - 2.0 / (25.0 * PI)).abs() < 1e-15);
        assert!((v0 - v[0] / 2.0).abs() < 1e-15);
        // Edge of the semicircle: sqrt(1 - (49/50)^2) = 0.199.
        assert!((v[49] / v[0] - (1.0 - 0.98_f64.powi(2)).sqrt()).abs() < 1e-12);
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn cluster_lengths_of_synthetic_grids() {
        assert_eq!(cyclic_run_lengths(&[true, true, false, true]), vec![1, 3]);
        assert_eq!(cyclic_run_lengths(&[false; 5]), vec![5]);
        assert_eq!(cyclic_run_lengths(&[true, false, true, false]), vec![1; 4]);
        let n = 7;
        let alternating = Array2::from_shape_fn((n, n), |(_, k)| {
            // Odd N forces one doubled pair around the cycle.
            if k % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        });
        let w = TorusWigner::from_grid(alternating).unwrap();
        let dist = discrete_cluster_distribution(&w, 0.0);
        assert_eq!(dist.counts[1], 5 * n as u64);
        assert_eq!(dist.counts[2], n as u64);

        let constant = TorusWigner::from_grid(Array2::from_elem((n, n), 0.5)).unwrap();
        let dist = discrete_cluster_distribution(&constant, 0.0);
        assert_eq!(dist.total(), n as u64);
        assert_eq!(dist.probability(n), 1.0);
        let tied = discrete_cluster_distribution(&constant, 0.5);
        assert_eq!(tied.probability(n), 1.0);
    }

    #[test]
    fn cluster_amplitudes_are_signed_run_extrema() {
        let row = [0.5, 2.0, -1.0, -3.0, 0.25, -0.5, 1.5];
        let w = TorusWigner::from_grid(Array2::from_shape_fn((7, 7), |(_, k)| row[k])).unwrap();
        let amps = discrete_cluster_amplitudes(&w, 0.0);
        // Runs along the cycle: [-3, -1], [0.25], [-0.5], [1.5, 0.5, 2].
        assert_eq!(amps.len(), 4 * 7);
        let mut first: Vec<f64> = amps[..4].to_vec();
        first.sort_by(f64::total_cmp);
        assert_eq!(first, vec![-3.0, -0.5, 0.25, 2.0]);
        let lengths = discrete_cluster_distribution(&w, 0.0).total();
        assert_eq!(lengths, amps.len() as u64);

        let constant = TorusWigner::from_grid(Array2::from_elem((7, 7), 0.5)).unwrap();
        assert_eq!(discrete_cluster_amplitudes(&constant, 0.25), vec![0.25; 7]);
    }
}
