//! Orthonormal spherical harmonics (Condon-Shortley phase) and
//! Gauss-Legendre nodes.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Offset of `(k, q)` with `0 <= q <= k` in a triangular Legendre table.
#[inline]
pub fn legendre_index(k: usize, q: usize) -> usize {
    k * (k + 1) / 2 + q
}

/// Normalized associated Legendre functions
/// `P~_k^q(cos theta) = sqrt((2k+1)/(4 pi) (k-q)!/(k+q)!) P_k^q(cos theta)`
/// for `0 <= q <= k <= lmax`, Condon-Shortley phase included, so that
/// `Y_kq = P~_k^q e^{i q phi}`. Indexed by [`legendre_index`].
pub fn normalized_legendre(lmax: usize, cos_theta: f64, sin_theta: f64) -> Vec<f64> {
    let mut p = vec![0.0; legendre_index(lmax, lmax) + 1];
    let x = cos_theta;
    let s = sin_theta.abs();
    p[0] = 1.0 / (4.0 * PI).sqrt();
    for q in 0..=lmax {
        if q > 0 {
            let qf = q as f64;
            p[legendre_index(q, q)] =
                -((2.0 * qf + 1.0) / (2.0 * qf)).sqrt() * s * p[legendre_index(q - 1, q - 1)];
        }
        if q < lmax {
            p[legendre_index(q + 1, q)] =
                (2.0 * q as f64 + 3.0).sqrt() * x * p[legendre_index(q, q)];
        }
        for k in (q + 2)..=lmax {
            let (kf, qf) = (k as f64, q as f64);
            let a = ((4.0 * kf * kf - 1.0) / (kf * kf - qf * qf)).sqrt();
            let km1 = kf - 1.0;
            let b = ((km1 * km1 - qf * qf) / (4.0 * km1 * km1 - 1.0)).sqrt();
            p[legendre_index(k, q)] =
                a * (x * p[legendre_index(k - 1, q)] - b * p[legendre_index(k - 2, q)]);
        }
    }
    p
}

/// `Y_kq(theta, phi)`.
pub fn spherical_harmonic(k: u32, q: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if q.unsigned_abs() > k {
        return Err(Error::InvalidArgument(format!(
            "|q| = {} exceeds k = {k}",
            q.abs()
        )));
    }
    let table = normalized_legendre(k as usize, theta.cos(), theta.sin());
    let aq = q.unsigned_abs() as usize;
    let y = Complex64::from_polar(table[legendre_index(k as usize, aq)], aq as f64 * phi);
    Ok(if q < 0 {
        let sign = if aq.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * y.conj()
    } else {
        y
    })
}

/// Gauss-Legendre nodes on `[-1, 1]` and weights (summing to 2), with nodes
/// in decreasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
