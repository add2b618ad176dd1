//! Map configurations and geometry-generic Wigner evaluation shared by the
//! relaxation, spectral and structure experiments.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sphere::{coherent_state_sphere, KickedTop, SphereTransform, Spin, TopParams};
use crate::state::{random_state, QuantumState, RngStream};
use crate::stats::WeightedSamples;
use crate::torus::{coherent_state_torus, SawtoothMap, TorusMapParams, TorusTransform};

/// Phase-space geometry of a Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// Quantized torus of odd dimension `N`.
    Torus(usize),
    /// Sphere of spin `J`, dimension `2J + 1`.
    Sphere(Spin),
}

impl Geometry {
    pub fn dim(&self) -> usize {
        match self {
            Geometry::Torus(n) => *n,
            Geometry::Sphere(spin) => spin.dim(),
        }
    }

    /// Phase-space mean of every pure-state Wigner function.
    pub fn wigner_mean(&self) -> f64 {
        match self {
            Geometry::Torus(n) => crate::torus::torus_mean(*n),
            Geometry::Sphere(spin) => crate::sphere::sphere_mean(*spin),
        }
    }
}

/// A chaotic quantum map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapConfig {
    Sawtooth(TorusMapParams),
    KickedTop(TopParams),
}

impl MapConfig {
    pub fn geometry(&self) -> Geometry {
        match self {
            MapConfig::Sawtooth(p) => Geometry::Torus(p.n),
            MapConfig::KickedTop(p) => Geometry::Sphere(p.spin),
        }
    }

    pub fn propagator(&self) -> Result<Propagator> {
        Ok(match self {
            MapConfig::Sawtooth(p) => Propagator::Sawtooth(SawtoothMap::new(*p)?),
            MapConfig::KickedTop(p) => Propagator::KickedTop(KickedTop::new(*p)),
        })
    }
}

/// One-period evolution operator of a [`MapConfig`].
pub enum Propagator {
    Sawtooth(SawtoothMap),
    KickedTop(KickedTop),
}

impl Propagator {
    pub fn step(&self, psi: &QuantumState) -> Result<QuantumState> {
        match self {
            Propagator::Sawtooth(map) => map.step(psi),
            Propagator::KickedTop(top) => top.step(psi),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Propagator::Sawtooth(map) => map.params().n,
            Propagator::KickedTop(top) => top.params().spin.dim(),
        }
    }
}

/// Initial state of an evolution run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Coherent state at `(q, p)` on the torus or `(theta, phi)` on the sphere.
    Coherent { a: f64, b: f64 },
    /// Random state drawn from the stream `(seed, stream_id)`.
    Random { seed: u64, stream_id: u64 },
    /// Basis vector by storage index.
    Basis(usize),
}

impl InitialState {
    pub fn build(&self, geometry: Geometry) -> Result<QuantumState> {
        match (*self, geometry) {
            (InitialState::Coherent { a, b }, Geometry::Torus(n)) => coherent_state_torus(a, b, n),
            (InitialState::Coherent { a, b }, Geometry::Sphere(spin)) => {
                coherent_state_sphere(a, b, spin)
            }
            (InitialState::Random { seed, stream_id }, g) => {
                random_state(g.dim(), &mut RngStream::new(seed, stream_id))
            }
            (InitialState::Basis(i), g) => QuantumState::basis(g.dim(), i),
        }
    }
}

/// Evaluates Wigner value samples for either geometry: the full torus mesh
/// with uniform weights, or the exact sphere quadrature grid.
pub enum WignerSampler {
    Torus(TorusTransform),
    Sphere(Arc<SphereTransform>),
}

impl WignerSampler {
    pub fn new(geometry: Geometry) -> Result<Self> {
        Ok(match geometry {
            Geometry::Torus(n) => WignerSampler::Torus(TorusTransform::new(n)?),
            Geometry::Sphere(spin) => WignerSampler::Sphere(SphereTransform::shared(spin)),
        })
    }

    pub fn geometry(&self) -> Geometry {
        match self {
            WignerSampler::Torus(t) => Geometry::Torus(t.dim()),
            WignerSampler::Sphere(t) => Geometry::Sphere(t.spin()),
        }
    }

    pub fn samples(&self, psi: &QuantumState) -> Result<WeightedSamples> {
        match self {
            WignerSampler::Torus(t) => Ok(t.wigner(psi)?.samples()),
            WignerSampler::Sphere(t) => t.samples(&t.coefficients(psi)?),
        }
    }
}

pub(crate) fn check_geometry_dim(geometry: Geometry, dim: usize) -> Result<()> {
    if geometry.dim() != dim {
        return Err(Error::InvalidDimension(format!(
            "dimension {dim} does not match geometry dimension {}",
            geometry.dim()
        )));
    }
    Ok(())
}
