//! Quantized kicked top `U = exp(-i gamma J_x) exp(i alpha J_z^2 / 2J)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::Spin;
use crate::error::{Error, Result};
use crate::state::QuantumState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopParams {
    pub alpha: f64,
    pub gamma: f64,
    pub spin: Spin,
}

impl TopParams {
    pub fn new(alpha: f64, gamma: f64, spin: Spin) -> Result<Self> {
        if !(alpha.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidArgument(
                "non-finite kicked-top parameters".into(),
            ));
        }
        Ok(Self { alpha, gamma, spin })
    }
}

/// `J_x` in the `|J, m>` basis (ascending `m`), a real symmetric tridiagonal
/// matrix.
pub fn jx_matrix(spin: Spin) -> DMatrix<f64> {
    let dim = spin.dim();
    let j = spin.value();
    let mut jx = DMatrix::zeros(dim, dim);
    for i in 0..dim - 1 {
        let m = spin.m(i);
        let v = 0.5 * (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        jx[(i + 1, i)] = v;
        jx[(i, i + 1)] = v;
    }
    jx
}

/// Kicked-top propagator with the `J_x` rotation precomputed from one dense
/// eigendecomposition; each step is a diagonal twist and an `O(J^2)`
/// matrix-vector product.
#[derive(Debug, Clone)]
pub struct KickedTop {
    params: TopParams,
    twist: Vec<Complex64>,
    rotation: DMatrix<Complex64>,
}

impl KickedTop {
    pub fn new(params: TopParams) -> Self {
        let spin = params.spin;
        let two_j = spin.twice() as f64;
        let twist = (0..spin.dim())
            .map(|i| {
                let m = spin.m(i);
                Complex64::from_polar(1.0, params.alpha * m * m / two_j)
            })
            .collect();
        let eigen = SymmetricEigen::new(jx_matrix(spin));
        let vectors = eigen.eigenvectors.map(|v| Complex64::new(v, 0.0));
        let phases = DVector::from_iterator(
            spin.dim(),
            eigen
                .eigenvalues
                .iter()
                .map(|l| Complex64::from_polar(1.0, -params.gamma * l)),
        );
        let rotation = &vectors * DMatrix::from_diagonal(&phases) * vectors.transpose();
        Self {
            params,
            twist,
            rotation,
        }
    }

    pub fn params(&self) -> &TopParams {
        &self.params
    }

    /// The dense rotation `exp(-i gamma J_x)`.
    pub fn rotation(&self) -> &DMatrix<Complex64> {
        &self.rotation
    }

    pub fn step(&self, psi: &QuantumState) -> Result<QuantumState> {
        let dim = self.params.spin.dim();
        if psi.dim() != dim {
            return Err(Error::InvalidDimension(format!(
                "state dimension {} does not match 2J+1 = {dim}",
                psi.dim()
            )));
        }
        let twisted = DVector::from_iterator(
            dim,
            psi.amplitudes().iter().zip(&self.twist).map(|(a, t)| a * t),
        );
        let out = &self.rotation * twisted;
        Ok(QuantumState::from_unitary_image(
            out.iter().copied().collect(),
        ))
    }
}

pub fn kicked_top_step(psi: &QuantumState, params: &TopParams) -> Result<QuantumState> {
    KickedTop::new(*params).step(psi)
}
