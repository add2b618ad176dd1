//! Eigenstates of quantum maps and of Gaussian orthogonal random matrices,
//! and the excess statistics of their Wigner functions.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::dynamics::{check_geometry_dim, Geometry, MapConfig, WignerSampler};
use crate::error::{Error, Result};
use crate::state::{QuantumState, RngStream};
use crate::stats::{empirical_cdf, moments_and_excess};

/// Largest accepted `max |U^dagger U - I|` of a propagator matrix.
pub const PROPAGATOR_UNITARITY_TOLERANCE: f64 = 1e-10;
/// Largest accepted `max |U^dagger U - I|` of an input to
/// [`unitary_eigensystem`].
pub const UNITARITY_TOLERANCE: f64 = 1e-8;
/// Eigenphases closer than this are treated as one degenerate cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-8;
/// Bound on eigen-residuals and on deviations from orthonormality.
pub const EIGEN_TOLERANCE: f64 = 1e-8;

/// `max |A^dagger A - I|` over all entries.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

/// Matrix of one map period, column `j` being the image of basis vector
/// `j`.
pub fn propagator_matrix(system: &MapConfig) -> Result<DMatrix<Complex64>> {
    let propagator = system.propagator()?;
    let n = propagator.dim();
    let mut u = DMatrix::zeros(n, n);
    for j in 0..n {
        let image = propagator.step(&QuantumState::basis(n, j)?)?;
        u.column_mut(j)
            .iter_mut()
            .zip(image.amplitudes())
            .for_each(|(dst, a)| *dst = *a);
    }
    let defect = unitarity_defect(&u);
    if defect >= PROPAGATOR_UNITARITY_TOLERANCE {
        return Err(Error::InvalidOperator(format!(
            "propagator deviates from unitarity by {defect:e}"
        )));
    }
    Ok(u)
}

/// Eigenphases in `[0, 2 pi)` and orthonormal eigenstates of a unitary
/// matrix, sorted by phase.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub phases: Vec<f64>,
    pub states: Vec<QuantumState>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    /// `max_k || U psi_k - e^{i Omega_k} psi_k ||`.
    pub fn max_residual(&self, u: &DMatrix<Complex64>) -> f64 {
        self.phases
            .iter()
            .zip(&self.states)
            .map(|(&phase, psi)| {
                let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
                let lambda = Complex64::from_polar(1.0, phase);
                (u * &v - v * lambda).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max_{k,l} |<psi_k|psi_l> - delta_kl|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for k in 0..n {
            for l in k..n {
                let target = if k == l { 1.0 } else { 0.0 };
                worst = worst.max(
                    (self.states[k]
                        .inner(&self.states[l])
                        .expect("equal dimensions")
                        - target)
                        .norm(),
                );
            }
        }
        worst
    }
}

fn phase_of(z: Complex64) -> f64 {
    let p = z.arg().rem_euclid(2.0 * PI);
    if p >= 2.0 * PI {
        0.0
    } else {
        p
    }
}

/// Modified Gram-Schmidt, applied twice, on the columns `cols` of `v`.
fn orthonormalize(v: &mut DMatrix<Complex64>, cols: &[usize]) {
    for _ in 0..2 {
        for (a, &i) in cols.iter().enumerate() {
            for &j in &cols[..a] {
                let proj = v.column(j).dotc(&v.column(i));
                let cj = v.column(j).into_owned();
                let mut ci = v.column_mut(i);
                ci -= cj * proj;
            }
            let norm = v.column(i).norm();
            v.column_mut(i).unscale_mut(norm);
        }
    }
}

/// Full eigendecomposition of a unitary matrix.
///
/// Uses the complex Schur form `U = Q T Q^dagger`. Eigenvectors of `T` are
/// found by back substitution and mapped through `Q`. Within clusters of
/// eigenphases closer than [`CLUSTER_TOLERANCE`] (cyclically), the vectors
/// are re-orthonormalized.
pub fn unitary_eigensystem(u: &DMatrix<Complex64>) -> Result<EigenSystem> {
    let n = u.nrows();
    if n != u.ncols() || n < 2 {
        return Err(Error::InvalidOperator(format!(
            "expected a square matrix of size >= 2, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let defect = unitarity_defect(u);
    if defect.is_nan() || defect >= UNITARITY_TOLERANCE {
        return Err(Error::InvalidOperator(format!(
            "matrix deviates from unitarity by {defect:e}"
        )));
    }
    let (q, t) = Schur::new(u.clone()).unpack();
    let lambda: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();

    // Upper-triangular eigenvectors of T; near-degenerate pivots are left to
    // the cluster re-orthonormalization below.
    let mut x = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        x[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let gap = t[(i, i)] - lambda[k];
            if gap.norm() < CLUSTER_TOLERANCE {
                continue;
            }
            let s: Complex64 = ((i + 1)..=k).map(|j| t[(i, j)] * x[(j, k)]).sum();
            x[(i, k)] = -s / gap;
        }
    }
    let mut v = q * x;
    for k in 0..n {
        let norm = v.column(k).norm();
        v.column_mut(k).unscale_mut(norm);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let phases: Vec<f64> = lambda.iter().map(|&z| phase_of(z)).collect();
    order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]));
    for cluster in phase_clusters(&order, &phases) {
        if cluster.len() > 1 {
            orthonormalize(&mut v, &cluster);
        }
    }

    let es = EigenSystem {
        phases: order.iter().map(|&k| phases[k]).collect(),
        states: order
            .iter()
            .map(|&k| QuantumState::new(v.column(k).iter().copied().collect()))
            .collect::<Result<_>>()?,
    };
    let residual = es.max_residual(u);
    let ortho = es.orthonormality_defect();
    if !(residual < EIGEN_TOLERANCE && ortho < EIGEN_TOLERANCE) {
        return Err(Error::InvalidOperator(format!(
            "eigendecomposition inaccurate: residual {residual:e}, orthonormality {ortho:e}"
        )));
    }
    Ok(es)
}

/// Groups indices (sorted by phase) whose neighbouring phases differ by
/// less than [`CLUSTER_TOLERANCE`], joining the first and last group when
/// they meet across `2 pi`.
fn phase_clusters(order: &[usize], phases: &[f64]) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &k in order {
        match clusters.last_mut() {
            Some(c) if phases[k] - phases[*c.last().expect("non-empty")] < CLUSTER_TOLERANCE => {
                c.push(k)
            }
            _ => clusters.push(vec![k]),
        }
    }
    if clusters.len() > 1 {
        let first = phases[clusters[0][0]];
        let last = phases[*clusters.last().and_then(|c| c.last()).expect("non-empty")];
        if first + 2.0 * PI - last < CLUSTER_TOLERANCE {
            let tail = clusters.pop().expect("non-empty");
            clusters[0].extend(tail);
        }
    }
    clusters
}

/// Sorted excess values and their empirical cumulative distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcessDistribution {
    pub values: Vec<f64>,
    pub cdf: Vec<(f64, f64)>,
}

impl ExcessDistribution {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        let cdf = empirical_cdf(&values);
        Self { values, cdf }
    }

    /// Median of `|excess|`.
    pub fn median_abs(&self) -> f64 {
        let abs: Vec<f64> = self.values.iter().map(|e| e.abs()).collect();
        crate::stats::median(&abs)
    }
}

/// Excess of the Wigner value distribution of each state, in parallel.
pub fn excess_of_states(states: &[QuantumState], geometry: Geometry) -> Result<ExcessDistribution> {
    let sampler = WignerSampler::new(geometry)?;
    for s in states {
        check_geometry_dim(geometry, s.dim())?;
    }
    let values = states
        .par_iter()
        .map(|psi| Ok(moments_and_excess(&sampler.samples(psi)?)?.excess))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ExcessDistribution::from_values(values))
}

/// Excess of every eigenstate of `es` viewed as a state of `geometry`.
pub fn excess_of_eigenstates(es: &EigenSystem, geometry: Geometry) -> Result<ExcessDistribution> {
    check_geometry_dim(geometry, es.dim())?;
    excess_of_states(&es.states, geometry)
}

/// Real symmetric Gaussian matrix: off-diagonal variance 1, diagonal
/// variance 2.
pub fn goe_matrix(dim: usize, rng: &mut RngStream) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = rng.normal(2.0_f64.sqrt());
        for j in (i + 1)..dim {
            let x = rng.standard_normal();
            h[(i, j)] = x;
            h[(j, i)] = x;
        }
    }
    h
}

/// Orthonormal eigenvectors of a real symmetric matrix as states.
pub fn symmetric_eigenstates(h: DMatrix<f64>) -> Result<Vec<QuantumState>> {
    let eig = SymmetricEigen::new(h);
    eig.eigenvectors
        .column_iter()
        .map(|c| QuantumState::new(c.iter().map(|&x| Complex64::new(x, 0.0)).collect()))
        .collect()
}

/// Excess distribution over the eigenvectors of `realizations` GOE
/// matrices, each eigenvector read as a state in the basis of `geometry`.
pub fn goe_ensemble_excess(
    dim: usize,
    realizations: usize,
    geometry: Geometry,
    rng: &mut RngStream,
) -> Result<ExcessDistribution> {
    goe_ensemble_excess_with(dim, realizations, geometry, rng, |h| h)
}

/// As [`goe_ensemble_excess`], with every sampled matrix passed through
/// `transform` before diagonalization.
pub fn goe_ensemble_excess_with(
    dim: usize,
    realizations: usize,
    geometry: Geometry,
    rng: &mut RngStream,
    transform: impl Fn(DMatrix<f64>) -> DMatrix<f64> + Sync,
) -> Result<ExcessDistribution> {
    check_geometry_dim(geometry, dim)?;
    if realizations < 1 {
        return Err(Error::InvalidArgument(
            "need at least one realization".into(),
        ));
    }
    let seeds: Vec<u64> = (0..realizations).map(|_| rng.rng().random()).collect();
    let states = seeds
        .par_iter()
        .map(|&seed| {
            let h = goe_matrix(dim, &mut RngStream::new(seed, 0));
            symmetric_eigenstates(transform(h))
        })
        .collect::<Result<Vec<_>>>()?;
    excess_of_states(&states.concat(), geometry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{Spin, TopParams};
    use crate::state::random_state;
    use crate::torus::TorusMapParams;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_sawtooth_is_diagonal_in_momentum() {
        let n = 5;
        let system = MapConfig::Sawtooth(TorusMapParams::new(0.0, 1, n).unwrap());
        let u = propagator_matrix(&system).unwrap();
        let t = 2.0 * PI / n as f64;
        let sym = |i: usize| {
            if i <= 2 {
                i as f64
            } else {
                i as f64 - n as f64
            }
        };
        // <n|k~> = N^{-1/2} exp(-2 pi i n k / N)
        let f = DMatrix::from_fn(n, n, |a, k| {
            Complex64::from_polar(
                1.0 / (n as f64).sqrt(),
                -2.0 * PI * sym(a) * sym(k) / n as f64,
            )
        });
        let d = DMatrix::from_fn(n, n, |a, b| {
            if a == b {
                Complex64::from_polar(1.0, -t * sym(a) * sym(a) / 2.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let expected = &f * d * f.adjoint();
        assert!((u - expected).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn unkicked_top_is_diagonal() {
        let spin = Spin::integer(1).unwrap();
        let alpha = 0.7;
        let u = propagator_matrix(&MapConfig::KickedTop(
            TopParams::new(alpha, 0.0, spin).unwrap(),
        ))
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let m = i as f64 - 1.0;
                let expected = if i == j {
                    Complex64::from_polar(1.0, alpha * m * m / 2.0)
                } else {
                    c(0.0, 0.0)
                };
                assert!((u[(i, j)] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_gives_an_orthonormal_basis() {
        let u = DMatrix::<Complex64>::identity(5, 5);
        let es = unitary_eigensystem(&u).unwrap();
        assert!(es.phases.iter().all(|&p| p == 0.0));
        assert!(es.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn diagonal_phases() {
        let u = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(0.0, 1.0),
            c(-1.0, 0.0),
        ]));
        let es = unitary_eigensystem(&u).unwrap();
        let expected = [0.0, PI / 2.0, PI];
        for (p, e) in es.phases.iter().zip(expected) {
            assert!((p - e).abs() < 1e-14);
        }
    }

    #[test]
    fn phase_clusters_wrap_around() {
        let phases = vec![1e-10, 1.0, 2.0 * PI - 1e-10, 1.0 + 1e-9];
        let mut order = vec![0, 1, 3, 2];
        order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]));
        let clusters = phase_clusters(&order, &phases);
        assert_eq!(clusters, vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn degenerate_unitary_is_decomposed() {
        // Conjugate a spectrum with two exact pairs by a random unitary.
        let n = 6;
        let mut rng = RngStream::new(5, 0);
        let z = DMatrix::from_fn(n, n, |_, _| c(rng.standard_normal(), rng.standard_normal()));
        let q = z.qr().q();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            [0.3, 0.3, 2.0, 2.0, 4.0, 6.1]
                .iter()
                .map(|&p| Complex64::from_polar(1.0, p))
                .collect(),
        ));
        let u = &q * d * q.adjoint();
        let es = unitary_eigensystem(&u).unwrap();
        assert!(es.max_residual(&u) < 1e-10);
        assert!(es.orthonormality_defect() < 1e-10);
        assert!((es.phases[0] - 0.3).abs() < 1e-10 && (es.phases[1] - 0.3).abs() < 1e-10);
    }

    #[test]
    fn sawtooth_eigensystem_is_accurate_and_complete() {
        let system = MapConfig::Sawtooth(TorusMapParams::new(0.5, 1, 101).unwrap());
        let u = propagator_matrix(&system).unwrap();
        let es = unitary_eigensystem(&u).unwrap();
        assert!(es.max_residual(&u) < 1e-8);
        assert!(es.orthonormality_defect() < 1e-8);
        assert!(es.phases.windows(2).all(|w| w[0] <= w[1]));
        let phi = random_state(101, &mut RngStream::new(6, 0)).unwrap();
        let total: f64 = es
            .states
            .iter()
            .map(|s| s.inner(&phi).unwrap().norm_sqr())
            .sum();
        assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn non_unitary_input_is_rejected() {
        let mut u = DMatrix::<Complex64>::identity(3, 3);
        u[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            unitary_eigensystem(&u),
            Err(Error::InvalidOperator(_))
        ));
    }

    #[test]
    fn position_basis_excess_is_bernoulli() {
        let n = 11;
        let u = DMatrix::<Complex64>::identity(n, n);
        let es = unitary_eigensystem(&u).unwrap();
        // Degenerate eigenvectors of the identity are the Schur basis, which
        // for an identity input is the position basis itself.
        let dist = excess_of_eigenstates(&es, Geometry::Torus(n)).unwrap();
        let nf = n as f64;
        let bernoulli = (nf * nf - 6.0 * nf + 6.0) / (nf - 1.0);
        for e in &dist.values {
            assert!((e - bernoulli).abs() < 1e-9, "{e} vs {bernoulli}");
        }
        assert!(excess_of_eigenstates(&es, Geometry::Torus(13)).is_err());
    }

    #[test]
    fn goe_smoke_and_reproducibility() {
        let dist =
            goe_ensemble_excess(3, 1, Geometry::Torus(3), &mut RngStream::new(7, 0)).unwrap();
        assert_eq!(dist.values.len(), 3);
        assert!(dist.values.iter().all(|e| e.is_finite()));
        assert_eq!(dist.cdf.last().unwrap().1, 1.0);
        let a = goe_ensemble_excess(21, 2, Geometry::Torus(21), &mut RngStream::new(8, 0)).unwrap();
        let b = goe_ensemble_excess(21, 2, Geometry::Torus(21), &mut RngStream::new(8, 0)).unwrap();
        assert_eq!(a, b);
        assert!(
            goe_ensemble_excess(21, 0, Geometry::Torus(21), &mut RngStream::new(8, 0)).is_err()
        );
    }

    #[test]
    fn goe_entry_variances() {
        let mut rng = RngStream::new(9, 0);
        let (mut diag, mut off, mut count) = (0.0, 0.0, 0);
        for _ in 0..400 {
            let h = goe_matrix(20, &mut rng);
            diag += (0..20).map(|i| h[(i, i)].powi(2)).sum::<f64>();
            off += h[(0, 1)].powi(2) + h[(5, 17)].powi(2);
            count += 1;
            assert_eq!(h.transpose(), h);
        }
        assert!((diag / (20 * count) as f64 - 2.0).abs() < 0.1);
        assert!((off / (2 * count) as f64 - 1.0).abs() < 0.1);
    }
}
